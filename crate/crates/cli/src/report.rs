//! JSON reports. Every float is rounded to 12 significant digits when a
//! report is built, so writing and re-reading a report reproduces it.

use rpr3_core::degeneracy::{condition_value, degeneracy_condition};
use rpr3_core::{
    degenerate_orientations, Diagnostic, FamilyClass, FamilyKind, FkSolution, ForwardSolution, Geometry, HalfAngle,
    JointVector, Pose, RootKind, Route,
};
use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rounds to 12 significant digits. Negative zero becomes zero.
pub fn sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { 0.0 } else { v };
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

fn deg(rad: f64) -> f64 {
    sig(rad.to_degrees())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionEntry {
    pub phi_deg: f64,
    pub x: f64,
    pub y: f64,
    pub kind: RootKind,
    pub multiplicity: usize,
    pub max_residual: f64,
}

impl From<&FkSolution> for SolutionEntry {
    fn from(s: &FkSolution) -> Self {
        SolutionEntry {
            phi_deg: deg(s.pose.phi),
            x: sig(s.pose.x),
            y: sig(s.pose.y),
            kind: s.kind,
            multiplicity: s.multiplicity,
            max_residual: sig(s.max_residual),
        }
    }
}

impl SolutionEntry {
    pub fn pose(&self) -> Pose {
        Pose::new(self.x, self.y, self.phi_deg.to_radians())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyReport {
    pub kind: FamilyKind,
    pub conditions: [f64; 3],
    pub relative_deviation: f64,
}

impl From<&FamilyClass> for FamilyReport {
    fn from(c: &FamilyClass) -> Self {
        FamilyReport { kind: c.kind, conditions: c.conditions.map(sig), relative_deviation: sig(c.relative_deviation) }
    }
}

/// A singular orientation of the position linear system, with its
/// consistency condition evaluated at the joints when they are known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientationReport {
    pub phi_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sw_vq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rw_uq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_condition: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active: Option<bool>,
}

fn orientation_report(g: &Geometry, j: Option<&JointVector>, t: HalfAngle, tol: f64) -> OrientationReport {
    let mut r = OrientationReport {
        phi_deg: deg(t.to_angle()),
        sw_vq: None,
        rw_uq: None,
        relative_condition: None,
        active: None,
    };
    if let Some(j) = j {
        let cond = degeneracy_condition(g, t);
        let rel = condition_value(g, j, t);
        r.sw_vq = Some(sig(cond.sw_vq.evaluate(j)));
        r.rw_uq = Some(sig(cond.rw_uq.evaluate(j)));
        r.relative_condition = Some(sig(rel));
        r.active = Some(rel <= tol);
    }
    r
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum DiagnosticEntry {
    NearDegenerateInput { phi_deg: f64, relative_condition: f64 },
    NearDegenerateFamily { relative_deviation: f64 },
    InfeasibleDegenerateOrientation { phi_deg: f64 },
    FamilyCubicMismatch { relative_deviation: f64 },
}

impl From<&Diagnostic> for DiagnosticEntry {
    fn from(d: &Diagnostic) -> Self {
        match *d {
            Diagnostic::NearDegenerateInput { phi, relative_condition } => {
                DiagnosticEntry::NearDegenerateInput { phi_deg: deg(phi), relative_condition: sig(relative_condition) }
            }
            Diagnostic::NearDegenerateFamily { relative_deviation } => {
                DiagnosticEntry::NearDegenerateFamily { relative_deviation: sig(relative_deviation) }
            }
            Diagnostic::InfeasibleDegenerateOrientation { phi } => {
                DiagnosticEntry::InfeasibleDegenerateOrientation { phi_deg: deg(phi) }
            }
            Diagnostic::FamilyCubicMismatch { relative_deviation } => {
                DiagnosticEntry::FamilyCubicMismatch { relative_deviation: sig(relative_deviation) }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleReport {
    pub samples: usize,
    pub solutions: Vec<SolutionEntry>,
    /// Present when compared with a pipeline solve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matches: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionReport {
    pub version: String,
    pub route: Route,
    pub family: FamilyReport,
    pub degenerate_orientations: Vec<OrientationReport>,
    pub active_degeneracies_deg: Vec<f64>,
    /// Characteristic polynomial in `tan(phi/2)`, ascending coefficients.
    pub polynomial: Vec<f64>,
    pub solutions: Vec<SolutionEntry>,
    pub diagnostics: Vec<DiagnosticEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
}

impl SolutionReport {
    pub fn new(
        g: &Geometry,
        j: &JointVector,
        class: &FamilyClass,
        solved: &ForwardSolution,
        degenerate_tol: f64,
    ) -> Self {
        let orientations = degenerate_orientations(g);
        SolutionReport {
            version: VERSION.to_string(),
            route: solved.route,
            family: class.into(),
            degenerate_orientations: orientations
                .orientations
                .iter()
                .map(|&t| orientation_report(g, Some(j), t, degenerate_tol))
                .collect(),
            active_degeneracies_deg: solved.active_degeneracies.iter().map(|t| deg(t.to_angle())).collect(),
            polynomial: solved.polynomial.coeffs().iter().map(|&c| sig(c)).collect(),
            solutions: solved.solutions.iter().map(SolutionEntry::from).collect(),
            diagnostics: solved.diagnostics.iter().map(DiagnosticEntry::from).collect(),
            oracle: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyReport {
    pub version: String,
    pub family: FamilyReport,
    pub all_orientations: bool,
    /// Singular-orientation quadratic, ascending coefficients.
    pub orientation_quadratic: [f64; 3],
    pub degenerate_orientations: Vec<OrientationReport>,
}

impl ClassifyReport {
    pub fn new(g: &Geometry, j: Option<&JointVector>, class: &FamilyClass, degenerate_tol: f64) -> Self {
        let o = degenerate_orientations(g);
        ClassifyReport {
            version: VERSION.to_string(),
            family: class.into(),
            all_orientations: o.all_orientations,
            orientation_quadratic: o.coefficients.map(sig),
            degenerate_orientations: o
                .orientations
                .iter()
                .map(|&t| orientation_report(g, j, t, degenerate_tol))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepReport {
    pub version: String,
    pub oracle: OracleReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IkReport {
    pub version: String,
    pub joints: [f64; 3],
}

impl IkReport {
    pub fn new(j: &JointVector) -> Self {
        IkReport { version: VERSION.to_string(), joints: j.as_array().map(sig) }
    }
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// Whether two solution sets have the same size and pair up within the
/// given position and orientation tolerances.
pub fn sets_match(a: &[SolutionEntry], b: &[SolutionEntry], pos_tol: f64, deg_tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|s| {
        let hit = b.iter().enumerate().position(|(i, o)| {
            let dphi = (s.phi_deg - o.phi_deg).rem_euclid(360.0);
            !used[i] && dphi.min(360.0 - dphi) <= deg_tol && (s.x - o.x).hypot(s.y - o.y) <= pos_tol
        });
        match hit {
            Some(i) => {
                used[i] = true;
                true
            }
            None => false,
        }
    })
}
