//! Problem files: one JSON object describing a manipulator, its joint
//! lengths and optional solver settings.

use std::path::Path;

use rpr3_core::{FkOptions, Geometry, JointVector, Pose};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub geometry: GeometrySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joints: Option<[f64; 3]>,
    /// Pose for `ik`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pose: Option<PoseSpec>,
    #[serde(default)]
    pub options: OptionsSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub c2: f64,
    pub c3: f64,
    pub d3: f64,
    pub l2: f64,
    pub l3: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_rad: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseSpec {
    pub x: f64,
    pub y: f64,
    pub phi_deg: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    /// Residual acceptance tolerance, scaled by `1 + rho_max^2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degenerate_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_tol: Option<f64>,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
    }

    pub fn geometry(&self) -> Result<Geometry, Failure> {
        let g = &self.geometry;
        let beta = match (g.beta_deg, g.beta_rad) {
            (Some(d), None) => d.to_radians(),
            (None, Some(r)) => r,
            _ => return Err(Failure::Invalid("geometry needs exactly one of beta_deg and beta_rad".into())),
        };
        for (name, v) in [("c2", g.c2), ("l2", g.l2), ("l3", g.l3)] {
            if v < 0.0 {
                return Err(Failure::Invalid(format!("{name} must be nonnegative, got {v}")));
            }
        }
        Geometry::new(g.c2, g.c3, g.d3, g.l2, g.l3, beta).map_err(|e| Failure::Invalid(e.to_string()))
    }

    pub fn joints(&self) -> Result<JointVector, Failure> {
        let [r1, r2, r3] = self.joints.ok_or_else(|| Failure::Invalid("problem file has no joints".into()))?;
        JointVector::new(r1, r2, r3).map_err(|e| Failure::Invalid(e.to_string()))
    }

    pub fn pose(&self) -> Result<Pose, Failure> {
        let p = self.pose.ok_or_else(|| Failure::Invalid("problem file has no pose".into()))?;
        if ![p.x, p.y, p.phi_deg].iter().all(|v| v.is_finite()) {
            return Err(Failure::Invalid("pose must be finite".into()));
        }
        Ok(Pose::new(p.x, p.y, p.phi_deg.to_radians()))
    }

    /// Solver options from the file, with `tol` from the command line
    /// taking precedence over `residual_tol`.
    pub fn fk_options(&self, tol: Option<f64>) -> Result<FkOptions, Failure> {
        let mut opts = FkOptions::default();
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Failure::Invalid(format!("{name} must be positive, got {v}")))
            }
        };
        if let Some(v) = tol.or(self.options.residual_tol) {
            opts.residual_tol = positive("residual tolerance", v)?;
        }
        if let Some(v) = self.options.degenerate_tol {
            opts.degenerate_tol = positive("degenerate_tol", v)?;
        }
        if let Some(v) = self.options.family_tol {
            opts.family_tol = positive("family_tol", v)?;
        }
        Ok(opts)
    }
}
