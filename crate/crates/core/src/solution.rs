//! Assembly-mode records shared by the solvers, plus pose refinement and
//! deduplication.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::model::{angle_distance, max_abs_residual, normalize_angle, Geometry, HalfAngle, JointVector, Pose};
use crate::polynomial::{Polynomial, RootOptions};

/// How an assembly mode was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootKind {
    /// Regular root: positions from the nonsingular linear system.
    GenericRoot,
    /// The linear system is singular at this orientation; positions come from
    /// a line/circle intersection and may be two for a single orientation.
    DegenerateRoot,
}

/// One assembly mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FkSolution {
    pub pose: Pose,
    pub kind: RootKind,
    /// Multiplicity of the orientation as a root of the characteristic
    /// polynomial that produced it.
    pub multiplicity: usize,
    pub max_residual: f64,
}

/// Which solver handled an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    /// Sextic characteristic polynomial.
    General,
    /// Cubic characteristic polynomial of the degenerate-manipulator family.
    DegenerateFamily,
}

/// Non-fatal findings attached to a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Diagnostic {
    /// The inputs are close to, but not on, a degeneracy condition. A near
    /// double root of the characteristic polynomial is expected here and
    /// does not indicate coalescing assembly modes.
    NearDegenerateInput { phi: f64, relative_condition: f64 },
    /// The geometry is close to the degenerate-manipulator family.
    NearDegenerateFamily { relative_deviation: f64 },
    /// A degenerate orientation is active but admits no real position.
    InfeasibleDegenerateOrientation { phi: f64 },
    /// The closed-form family cubic disagreed with the one derived from the
    /// linear system; the derived one was used.
    FamilyCubicMismatch { relative_deviation: f64 },
}

/// Full result of a forward-kinematics solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardSolution {
    pub route: Route,
    /// Characteristic polynomial that was solved (degree <= 6, or <= 3 on
    /// the family route), before any deflation.
    pub polynomial: Polynomial,
    /// Degenerate orientations whose consistency condition holds for the
    /// given joints. Empty on the family route, where every orientation is
    /// degenerate.
    pub active_degeneracies: Vec<HalfAngle>,
    pub solutions: Vec<FkSolution>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Tolerances for the forward-kinematics pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkOptions {
    pub roots: RootOptions,
    /// A solution is accepted when `max|residual| < residual_tol * (1 + rho_max^2)`.
    pub residual_tol: f64,
    /// Relative threshold on the consistency condition at a degenerate
    /// orientation.
    pub degenerate_tol: f64,
    /// Relative threshold on `|A(t)|` below which a root is routed to the
    /// degenerate position recovery.
    pub singular_tol: f64,
    /// Relative tolerance for the degenerate-family classification.
    pub family_tol: f64,
    /// Relative threshold for near-degeneracy warnings.
    pub warn_tol: f64,
}

impl Default for FkOptions {
    fn default() -> Self {
        FkOptions {
            roots: RootOptions::default(),
            residual_tol: 1e-8,
            degenerate_tol: 1e-9,
            singular_tol: 1e-7,
            family_tol: 1e-9,
            warn_tol: 1e-4,
        }
    }
}

impl FkOptions {
    pub fn acceptance_threshold(&self, j: &JointVector) -> f64 {
        self.residual_tol * (1.0 + j.max().powi(2))
    }
}

/// Newton iteration on the three constraints in `(x, y, phi)`.
///
/// Returns the best pose seen; the input pose if no iterate improves it.
pub fn refine_pose(g: &Geometry, j: &JointVector, pose: Pose) -> Pose {
    let sq = j.squared();
    let [a1, a2, a3] = g.anchors();
    let eval = |p: &Pose| {
        let [b1, b2, b3] = g.platform_points(p);
        let (d1, d2, d3) = (b1 - a1, b2 - a2, b3 - a3);
        let f = Vector3::new(d1.norm_squared() - sq[0], d2.norm_squared() - sq[1], d3.norm_squared() - sq[2]);
        let (s, c) = p.phi.sin_cos();
        let (s3, c3) = (p.phi + g.beta).sin_cos();
        let jac = Matrix3::new(
            2.0 * d1.x,
            2.0 * d1.y,
            0.0,
            2.0 * d2.x,
            2.0 * d2.y,
            2.0 * g.l2 * (-d2.x * s + d2.y * c),
            2.0 * d3.x,
            2.0 * d3.y,
            2.0 * g.l3 * (-d3.x * s3 + d3.y * c3),
        );
        (f, jac)
    };

    let mut current = pose;
    let mut best = pose;
    let mut best_norm = eval(&pose).0.amax();
    for _ in 0..30 {
        let (f, jac) = eval(&current);
        let Some(step) = jac.lu().solve(&-f) else { break };
        current = Pose { x: current.x + step.x, y: current.y + step.y, phi: current.phi + step.z };
        let norm = eval(&current).0.amax();
        if !norm.is_finite() {
            break;
        }
        if norm < best_norm {
            best = current;
            best_norm = norm;
        }
        if step.amax() <= 4.0 * f64::EPSILON * (1.0 + current.x.abs() + current.y.abs()) || best_norm == 0.0 {
            break;
        }
    }
    Pose::new(best.x, best.y, best.phi)
}

/// Refines `pose` and records it when it satisfies the constraints.
pub(crate) fn accept(
    out: &mut Vec<FkSolution>,
    g: &Geometry,
    j: &JointVector,
    pose: Pose,
    kind: RootKind,
    multiplicity: usize,
    opts: &FkOptions,
) -> bool {
    let refined = refine_pose(g, j, pose);
    let max_residual = max_abs_residual(g, &refined, j);
    if max_residual < opts.acceptance_threshold(j) {
        out.push(FkSolution { pose: refined, kind, multiplicity, max_residual });
        true
    } else {
        false
    }
}

/// Two solutions describe the same assembly mode.
pub fn same_mode(a: &Pose, b: &Pose, position_tol: f64, angle_tol: f64) -> bool {
    angle_distance(a.phi, b.phi) <= angle_tol && (a.position() - b.position()).norm() <= position_tol
}

/// Whether every point on the segment from `a` to `b` satisfies the
/// constraints to within `tol`. Near a singular configuration the accepted
/// set is a thin sliver rather than a point, and two refinements of the same
/// mode can land at different ends of it.
fn joined(g: &Geometry, j: &JointVector, a: &Pose, b: &Pose, tol: f64) -> bool {
    let dphi = normalize_angle(b.phi - a.phi);
    (1..6).all(|k| {
        let s = k as f64 / 6.0;
        let p = Pose { x: a.x + s * (b.x - a.x), y: a.y + s * (b.y - a.y), phi: a.phi + s * dphi };
        max_abs_residual(g, &p, j) < tol
    })
}

/// Merges duplicates and sorts by orientation, then by position.
///
/// Two solutions are the same mode when they coincide to `1e-7` of the
/// problem scale, or when one of them is only loosely converged and the
/// constraints hold along the whole segment between them about as well as
/// at its ends (never looser than `tol`). Two poses that both satisfy the
/// constraints to rounding level are kept apart however close they are.
pub(crate) fn dedup_and_sort(mut sols: Vec<FkSolution>, g: &Geometry, j: &JointVector, tol: f64) -> Vec<FkSolution> {
    let scale = 1.0 + g.scale() + j.max();
    let rounding = 1e-13 * (1.0 + j.max().powi(2));
    let mut out: Vec<FkSolution> = Vec::with_capacity(sols.len());
    sols.sort_by(|a, b| a.max_residual.total_cmp(&b.max_residual));
    for s in sols {
        let same = |o: &FkSolution| {
            let worst = o.max_residual.max(s.max_residual);
            same_mode(&o.pose, &s.pose, 1e-7 * scale, 1e-8)
                || (worst > rounding
                    && same_mode(&o.pose, &s.pose, 1e-3 * scale, 1e-3)
                    && joined(g, j, &o.pose, &s.pose, (4.0 * worst).min(tol)))
        };
        match out.iter_mut().find(|o| same(o)) {
            Some(o) => {
                o.multiplicity = o.multiplicity.max(s.multiplicity);
                if s.kind == RootKind::DegenerateRoot {
                    o.kind = RootKind::DegenerateRoot;
                }
            }
            None => out.push(s),
        }
    }
    out.sort_by(|a, b| {
        a.pose.phi.total_cmp(&b.pose.phi).then(a.pose.x.total_cmp(&b.pose.x)).then(a.pose.y.total_cmp(&b.pose.y))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::inverse_kinematics;

    #[test]
    fn refinement_recovers_perturbed_pose() {
        let g = Geometry::new(2.0, 0.5, 1.0, 2.0, 1.5, 1.0).unwrap();
        let truth = Pose::new(0.4, -0.7, 0.6);
        let j = inverse_kinematics(&g, &truth);
        let p = refine_pose(&g, &j, Pose::new(0.4 + 1e-4, -0.7 - 1e-4, 0.6 + 1e-4));
        assert!((p.x - truth.x).abs() < 1e-12);
        assert!((p.y - truth.y).abs() < 1e-12);
        assert!((p.phi - truth.phi).abs() < 1e-12);
    }

    #[test]
    fn dedup_merges_nearby_modes() {
        let s = |x: f64, r: f64| FkSolution {
            pose: Pose::new(x, 0.0, 0.1),
            kind: RootKind::GenericRoot,
            multiplicity: 1,
            max_residual: r,
        };
        let g = Geometry::new(1.0, 0.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        let j = JointVector::new(1.0, 1.0, 1.0).unwrap();
        let out = dedup_and_sort(vec![s(0.5, 1e-12), s(0.5 + 1e-10, 1e-14), s(-0.5, 0.0)], &g, &j, 1e-8);
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].max_residual, 1e-14);
    }
}
