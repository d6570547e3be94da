//! Orientations where the position linear system is singular, the joint
//! conditions under which such an orientation is actually reached, and
//! recovery of the (up to two) positions at a singular orientation.

use serde::{Deserialize, Serialize};

use crate::charpoly::{degeneracy_polys, linear_coeffs, linear_coeffs_t, LinearCoeffsT};
use crate::error::{Error, Result};
use crate::model::{max_abs_residual, Geometry, HalfAngle, JointVector, Point, Pose};
use crate::polynomial::Polynomial;

/// Relative tolerance on the singular-orientation quadratic.
pub const DEFAULT_ORIENTATION_TOL: f64 = 1e-12;

/// Reference magnitude of the singular-orientation quadratic's coefficients.
pub fn orientation_scale(g: &Geometry) -> f64 {
    (g.c2 + g.l2) * (g.l3 + g.c3.abs() + g.d3.abs())
}

/// Quadratic in `t` whose roots are the orientations with `RV - SU = 0`,
/// ascending coefficients.
pub fn orientation_quadratic(g: &Geometry) -> Polynomial {
    let Geometry { c2, c3, d3, l2, l3, beta } = *g;
    let (sb, cb) = beta.sin_cos();
    Polynomial::new(vec![
        -d3 * (l2 - c2) + l3 * sb * (l2 - c2),
        2.0 * (l2 * c3 - c2 * l3 * cb),
        d3 * (l2 + c2) + l3 * sb * (l2 + c2),
    ])
}

/// Orientations at which the position linear system is singular.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateOrientations {
    /// The singular-orientation quadratic, ascending coefficients `[c0, c1, c2]`.
    pub coefficients: [f64; 3],
    /// Zero, one or two orientations. Includes `phi = pi` when the leading
    /// coefficient vanishes.
    pub orientations: Vec<HalfAngle>,
    /// The quadratic vanishes identically: singular at every orientation.
    pub all_orientations: bool,
}

pub fn degenerate_orientations(g: &Geometry) -> DegenerateOrientations {
    degenerate_orientations_with_tol(g, DEFAULT_ORIENTATION_TOL)
}

pub fn degenerate_orientations_with_tol(g: &Geometry, tol: f64) -> DegenerateOrientations {
    let quad = orientation_quadratic(g);
    let [c, b, a] = [0, 1, 2].map(|i| quad.coeff(i));
    let zero = tol * orientation_scale(g);
    let mut orientations = Vec::new();
    let all_orientations = a.abs() <= zero && b.abs() <= zero && c.abs() <= zero;
    if !all_orientations {
        if a.abs() <= zero {
            if b.abs() > zero {
                orientations.push(HalfAngle::Finite(-c / b));
            }
            orientations.push(HalfAngle::Infinite);
        } else {
            let disc = b * b - 4.0 * a * c;
            let disc_tol = tol * (b * b + (4.0 * a * c).abs());
            if disc.abs() <= disc_tol {
                orientations.push(HalfAngle::Finite(-b / (2.0 * a)));
            } else if disc > 0.0 {
                let q = -0.5 * (b + b.signum() * disc.sqrt());
                let mut roots = vec![q / a];
                roots.push(if q != 0.0 { c / q } else { -q / a });
                roots.sort_by(|x, y| x.total_cmp(y));
                orientations.extend(roots.into_iter().map(HalfAngle::Finite));
            }
        }
    }
    DegenerateOrientations { coefficients: [c, b, a], orientations, all_orientations }
}

/// Cleared numerator of `SW - VQ` as a polynomial in `t` (degree <= 4).
pub fn condition_quartic(g: &Geometry, j: &JointVector) -> Polynomial {
    degeneracy_polys(g, j).b
}

/// An expression affine in the squared joint lengths:
/// `constant + sum_i linear[i] * rho_i^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineForm {
    pub constant: f64,
    pub linear: [f64; 3],
}

impl AffineForm {
    pub fn evaluate(&self, j: &JointVector) -> f64 {
        let sq = j.squared();
        self.constant + (0..3).map(|i| self.linear[i] * sq[i]).sum::<f64>()
    }
}

/// The joint-space condition attached to one singular orientation.
///
/// Both cleared consistency numerators are kept: where `S` and `V` vanish
/// together the first is identically zero and only the second carries the
/// condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyCondition {
    pub orientation: HalfAngle,
    /// `SW - VQ`, cleared by `(1+t^2)^2` (leading coefficient at infinity).
    pub sw_vq: AffineForm,
    /// `RW - UQ`, cleared likewise.
    pub rw_uq: AffineForm,
}

/// Value of a cleared quantity of nominal degree `deg` at a half angle.
fn cleared_at(p: &Polynomial, t: HalfAngle, deg: usize) -> f64 {
    match t {
        HalfAngle::Finite(t) => p.evaluate(t),
        HalfAngle::Infinite => p.coeff(deg),
    }
}

pub fn degeneracy_condition(g: &Geometry, orientation: HalfAngle) -> DegeneracyCondition {
    // Q~ and W~ are the only coefficients that depend on the joints:
    // Q~ = Q0 + (1+t^2)(rho1^2 - rho2^2), W~ = W0 + (1+t^2)(rho1^2 - rho3^2)
    let zero = JointVector::new(0.0, 0.0, 0.0).expect("zero joints are valid");
    let LinearCoeffsT { r, s, q, u, v, w } = linear_coeffs_t(g, &zero);
    let at = |p: &Polynomial| cleared_at(p, orientation, 2);
    let (r, s, q, u, v, w) = (at(&r), at(&s), at(&q), at(&u), at(&v), at(&w));
    let d = match orientation {
        HalfAngle::Finite(t) => 1.0 + t * t,
        HalfAngle::Infinite => 1.0,
    };
    DegeneracyCondition {
        orientation,
        sw_vq: AffineForm { constant: s * w - v * q, linear: [d * (s - v), d * v, -d * s] },
        rw_uq: AffineForm { constant: r * w - u * q, linear: [d * (r - u), d * u, -d * r] },
    }
}

/// `max(|SW - VQ|, |RW - UQ|)` at `orientation`, relative to the size of the
/// cleared polynomials' coefficients.
pub fn condition_value(g: &Geometry, j: &JointVector, orientation: HalfAngle) -> f64 {
    let polys = degeneracy_polys(g, j);
    let weight = match orientation {
        HalfAngle::Finite(t) => t.abs().max(1.0).powi(4),
        HalfAngle::Infinite => 1.0,
    };
    let scale = polys.b.max_abs_coeff().max(polys.c.max_abs_coeff()) * weight;
    if scale == 0.0 {
        return 0.0;
    }
    let b = cleared_at(&polys.b, orientation, 4);
    let c = cleared_at(&polys.c, orientation, 4);
    b.abs().max(c.abs()) / scale
}

/// Which singular orientations are consistent for a joint vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DegenerateInput {
    /// The geometry is singular at every orientation (degenerate family);
    /// handled by the analytic solver.
    AllOrientations,
    /// Singular orientations whose condition holds at these joints.
    Active(Vec<HalfAngle>),
}

pub fn check_degenerate_input(g: &Geometry, j: &JointVector, tol: f64) -> DegenerateInput {
    let orientations = degenerate_orientations(g);
    if orientations.all_orientations {
        return DegenerateInput::AllOrientations;
    }
    DegenerateInput::Active(
        orientations.orientations.into_iter().filter(|&t| condition_value(g, j, t) <= tol).collect(),
    )
}

/// Positions at a singular orientation, validated against all three
/// constraints.
pub fn recover_degenerate_positions(g: &Geometry, j: &JointVector, t: HalfAngle) -> Result<Vec<Point>> {
    let phi = t.to_angle();
    let candidates = degenerate_candidates(g, j, phi)?;
    let threshold = 1e-8 * (1.0 + j.max().powi(2));
    let valid: Vec<Point> =
        candidates.into_iter().filter(|p| max_abs_residual(g, &Pose::new(p.x, p.y, phi), j) < threshold).collect();
    if valid.is_empty() {
        return Err(Error::InconsistentDegeneracy(0.0));
    }
    Ok(valid)
}

/// Candidate positions at `phi` from one of the two linear equations and
/// the first constraint, without checking the remaining constraints.
///
/// The equation is chosen by the ladder: `R != 0` uses the first equation,
/// else `U != 0` the second, else whichever of `S`, `V` is nonzero. If all
/// four vanish the system only admits the origin, which requires `Q = W = 0`
/// and zero leg lengths.
pub(crate) fn degenerate_candidates(g: &Geometry, j: &JointVector, phi: f64) -> Result<Vec<Point>> {
    let lc = linear_coeffs(g, j, phi);
    let first_tol = 1e-9 * (g.l2 + g.c2);
    let second_tol = 1e-9 * (g.l3 + g.c3.hypot(g.d3));
    let rho1 = j.rho1();
    let line = if lc.r.abs() > first_tol {
        Some((lc.r, lc.s, lc.q))
    } else if lc.u.abs() > second_tol {
        Some((lc.u, lc.v, lc.w))
    } else if lc.s.abs() > first_tol {
        Some((0.0, lc.s, lc.q))
    } else if lc.v.abs() > second_tol {
        Some((0.0, lc.v, lc.w))
    } else {
        None
    };
    match line {
        Some((a, b, c)) => line_circle(a, b, c, rho1),
        None => {
            let q_tol = 1e-9 * (1.0 + g.scale().powi(2) + j.max().powi(2));
            if lc.q.abs() <= q_tol && lc.w.abs() <= q_tol && rho1 <= 1e-9 * (1.0 + g.scale()) {
                Ok(vec![Point::new(0.0, 0.0)])
            } else {
                Err(Error::InconsistentDegeneracy(-(lc.q.abs().max(lc.w.abs()))))
            }
        }
    }
}

/// Intersection of the line `a x + b y + c = 0` with the circle of radius
/// `rho` about the origin.
///
/// Equivalent to eliminating one coordinate and solving the quadratic in the
/// other; written via the foot of the perpendicular so that it stays
/// accurate when `a` or `b` is small.
fn line_circle(a: f64, b: f64, c: f64, rho: f64) -> Result<Vec<Point>> {
    let n2 = a * a + b * b;
    let foot = Point::new(-a * c / n2, -b * c / n2);
    let dist2 = c * c / n2;
    let h2 = rho * rho - dist2;
    let tol = 1e-9 * (rho * rho + dist2).max(f64::MIN_POSITIVE);
    if h2 < -tol {
        return Err(Error::InconsistentDegeneracy(h2));
    }
    if h2 <= tol * 1e-3 {
        return Ok(vec![foot]);
    }
    let dir = Point::new(-b, a) / n2.sqrt();
    let h = h2.max(0.0).sqrt();
    Ok(vec![foot + h * dir, foot - h * dir])
}
