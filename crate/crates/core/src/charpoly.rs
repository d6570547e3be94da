//! Position linear system, the sextic characteristic polynomial and the
//! general forward-kinematics pipeline.
//!
//! Subtracting the first constraint from the other two gives a system that
//! is linear in the platform position:
//!
//! ```text
//! R x + S y + Q = 0
//! U x + V y + W = 0
//! ```
//!
//! With `A = RV - SU`, `B = SW - VQ` and `C = RW - UQ`, every solution
//! satisfies `rho1^2 A^2 = B^2 + C^2`. Clearing denominators after the
//! substitution `t = tan(phi/2)` turns this identity into a polynomial in `t`
//! that never divides by `A`, so it remains valid where the linear system is
//! singular.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analytic::{self, FamilyKind};
use crate::degeneracy::{self, DegenerateInput};
use crate::error::{Error, Result};
use crate::model::{Geometry, HalfAngle, JointVector, Pose};
use crate::polynomial::Polynomial;
use crate::solution::{accept, dedup_and_sort, Diagnostic, FkOptions, FkSolution, ForwardSolution, RootKind, Route};

/// Coefficients of the position linear system at a fixed orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearCoeffs {
    pub r: f64,
    pub s: f64,
    pub q: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl LinearCoeffs {
    pub fn triple(&self) -> DegeneracyTriple {
        DegeneracyTriple {
            a: self.r * self.v - self.s * self.u,
            b: self.s * self.w - self.v * self.q,
            c: self.r * self.w - self.u * self.q,
        }
    }

    /// Cramer solution of the system. `None` when the determinant is zero.
    pub fn solve(&self) -> Option<(f64, f64)> {
        let DegeneracyTriple { a, b, c } = self.triple();
        if a == 0.0 {
            return None;
        }
        // x A = SW - VQ, y A = UQ - RW
        Some((b / a, -c / a))
    }
}

/// `A = RV - SU`, `B = SW - VQ`, `C = RW - UQ` at a fixed orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyTriple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub fn linear_coeffs(g: &Geometry, j: &JointVector, phi: f64) -> LinearCoeffs {
    let [r1, r2, r3] = j.squared();
    let (sp, cp) = phi.sin_cos();
    let (spb, cpb) = (phi + g.beta).sin_cos();
    let Geometry { c2, c3, d3, l2, l3, .. } = *g;
    LinearCoeffs {
        r: 2.0 * l2 * cp - 2.0 * c2,
        s: 2.0 * l2 * sp,
        q: -2.0 * c2 * l2 * cp + l2 * l2 + c2 * c2 - r2 + r1,
        u: 2.0 * l3 * cpb - 2.0 * c3,
        v: 2.0 * l3 * spb - 2.0 * d3,
        w: -2.0 * d3 * l3 * spb - 2.0 * c3 * l3 * cpb + l3 * l3 + c3 * c3 + d3 * d3 - r3 + r1,
    }
}

/// The six system coefficients multiplied by `1 + t^2`, as quadratics in
/// `t = tan(phi/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearCoeffsT {
    pub r: Polynomial,
    pub s: Polynomial,
    pub q: Polynomial,
    pub u: Polynomial,
    pub v: Polynomial,
    pub w: Polynomial,
}

impl LinearCoeffsT {
    /// Evaluates back to [`LinearCoeffs`] at a finite `t`.
    pub fn at(&self, t: f64) -> LinearCoeffs {
        let d = 1.0 + t * t;
        LinearCoeffs {
            r: self.r.evaluate(t) / d,
            s: self.s.evaluate(t) / d,
            q: self.q.evaluate(t) / d,
            u: self.u.evaluate(t) / d,
            v: self.v.evaluate(t) / d,
            w: self.w.evaluate(t) / d,
        }
    }

    /// Cleared numerators of `A`, `B` and `C`.
    ///
    /// `R~V~ - S~U~` always carries a factor `1 + t^2` (its second harmonics
    /// cancel), which is divided out so that `a` has degree at most 2.
    pub fn triple(&self) -> DegeneracyPolys {
        let a_full = &(&self.r * &self.v) - &(&self.s * &self.u);
        let (a, _) = a_full.divide_out(&one_plus_t2());
        DegeneracyPolys {
            a,
            b: &(&self.s * &self.w) - &(&self.v * &self.q),
            c: &(&self.r * &self.w) - &(&self.u * &self.q),
        }
    }
}

/// Cleared numerators: `A = a(t) / (1+t^2)`, `B = b(t) / (1+t^2)^2`,
/// `C = c(t) / (1+t^2)^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyPolys {
    pub a: Polynomial,
    pub b: Polynomial,
    pub c: Polynomial,
}

pub(crate) fn one_plus_t2() -> Polynomial {
    Polynomial::new(vec![1.0, 0.0, 1.0])
}

pub fn linear_coeffs_t(g: &Geometry, j: &JointVector) -> LinearCoeffsT {
    let [r1, r2, r3] = j.squared();
    let Geometry { c2, c3, d3, l2, l3, beta } = *g;
    let (sb, cb) = beta.sin_cos();
    // (1+t^2) cos(phi), (1+t^2) sin(phi), (1+t^2)
    let cos_t = [1.0, 0.0, -1.0];
    let sin_t = [0.0, 2.0, 0.0];
    let one = [1.0, 0.0, 1.0];
    // (1+t^2) cos(phi+beta) and (1+t^2) sin(phi+beta)
    let cos_b = [0, 1, 2].map(|i| cb * cos_t[i] - sb * sin_t[i]);
    let sin_b = [0, 1, 2].map(|i| cb * sin_t[i] + sb * cos_t[i]);
    let k2 = l2 * l2 + c2 * c2 - r2 + r1;
    let k3 = l3 * l3 + c3 * c3 + d3 * d3 - r3 + r1;
    let quad = |f: &dyn Fn(usize) -> f64| Polynomial::new([0, 1, 2].map(f).to_vec());
    LinearCoeffsT {
        r: quad(&|i| 2.0 * l2 * cos_t[i] - 2.0 * c2 * one[i]),
        s: quad(&|i| 2.0 * l2 * sin_t[i]),
        q: quad(&|i| -2.0 * c2 * l2 * cos_t[i] + k2 * one[i]),
        u: quad(&|i| 2.0 * l3 * cos_b[i] - 2.0 * c3 * one[i]),
        v: quad(&|i| 2.0 * l3 * sin_b[i] - 2.0 * d3 * one[i]),
        w: quad(&|i| -2.0 * d3 * l3 * sin_b[i] - 2.0 * c3 * l3 * cos_b[i] + k3 * one[i]),
    }
}

pub fn degeneracy_polys(g: &Geometry, j: &JointVector) -> DegeneracyPolys {
    linear_coeffs_t(g, j).triple()
}

/// Relative size below which all coefficients of `a(t)` count as zero.
const FAMILY_DETERMINANT_TOL: f64 = 1e-12;

/// Sextic characteristic polynomial `P(t)`.
///
/// Built as `b^2 + c^2 - rho1^2 a^2 (1+t^2)^2` (degree 8) and divided by
/// its structural factor `1 + t^2`, whose remainder is checked. Fails with
/// [`Error::DegenerateFamily`] when `a(t)` vanishes identically.
pub fn characteristic_polynomial(g: &Geometry, j: &JointVector) -> Result<Polynomial> {
    let polys = degeneracy_polys(g, j);
    let a_scale = 4.0 * degeneracy::orientation_scale(g);
    if polys.a.max_abs_coeff() <= FAMILY_DETERMINANT_TOL * a_scale {
        return Err(Error::DegenerateFamily);
    }
    let d = one_plus_t2();
    let a_d = &polys.a * &d;
    let raw = &(&(&polys.b * &polys.b) + &(&polys.c * &polys.c)) - &(&a_d * &a_d).scale(j.squared()[0]);
    let (p, remainder) = raw.divide_out(&d);
    if remainder > 1e-9 * raw.max_abs_coeff() {
        return Err(Error::Internal(format!(
            "(1+t^2) does not divide the raw characteristic polynomial: remainder {remainder:.3e}, max coefficient {:.3e}",
            raw.max_abs_coeff()
        )));
    }
    Ok(p)
}

/// Forward kinematics with default tolerances; solutions only.
pub fn forward_kinematics(g: &Geometry, j: &JointVector) -> Result<Vec<FkSolution>> {
    Ok(solve_forward(g, j, &FkOptions::default())?.solutions)
}

/// Complex roots this close to the real axis seed a Newton search.
const NEAR_REAL_BAND: f64 = 1e-3;

/// Complete forward-kinematics solve, routed by geometry.
pub fn solve_forward(g: &Geometry, j: &JointVector, opts: &FkOptions) -> Result<ForwardSolution> {
    let class = analytic::classify_family(g, opts.family_tol);
    if class.kind == FamilyKind::DegenerateFamily {
        return analytic::solve_family(g, j, opts);
    }
    let p = match characteristic_polynomial(g, j) {
        Err(Error::DegenerateFamily) => return analytic::solve_family(g, j, opts),
        other => other?,
    };
    if p.trimmed(opts.roots.tol_lead).is_zero() {
        return Err(Error::ContinuumOfSolutions);
    }

    let mut diagnostics = Vec::new();
    if class.relative_deviation <= opts.warn_tol {
        diagnostics.push(Diagnostic::NearDegenerateFamily { relative_deviation: class.relative_deviation });
    }

    let polys = degeneracy_polys(g, j);
    let active = match degeneracy::check_degenerate_input(g, j, opts.degenerate_tol) {
        DegenerateInput::Active(list) => list,
        // a(t) is not identically zero here, so this cannot happen
        DegenerateInput::AllOrientations => return analytic::solve_family(g, j, opts),
    };
    for orientation in degeneracy::degenerate_orientations(g).orientations {
        if active.contains(&orientation) {
            continue;
        }
        let rel = degeneracy::condition_value(g, j, orientation);
        if rel <= opts.warn_tol {
            diagnostics.push(Diagnostic::NearDegenerateInput { phi: orientation.to_angle(), relative_condition: rel });
        }
    }

    let mut found = Vec::new();
    let mut deflated = p.clone();
    for &orientation in &active {
        let phi = orientation.to_angle();
        match degeneracy::degenerate_candidates(g, j, phi) {
            Ok(points) => {
                for pt in points {
                    accept(&mut found, g, j, Pose::new(pt.x, pt.y, phi), RootKind::DegenerateRoot, 2, opts);
                }
            }
            Err(Error::InconsistentDegeneracy(_)) => {
                diagnostics.push(Diagnostic::InfeasibleDegenerateOrientation { phi })
            }
            Err(e) => return Err(e),
        }
        // The active orientation is a double root of P; remove it so the
        // remaining roots are found without a near-multiple cluster. At
        // infinity the two leading coefficients vanish instead.
        if let HalfAngle::Finite(t) = orientation {
            deflated = deflated.deflate(t).deflate(t);
        }
    }

    let roots = match deflated.real_roots(&opts.roots) {
        Ok(r) => r,
        Err(Error::ZeroPolynomial) => Vec::new(),
        Err(e) => return Err(e),
    };
    for root in roots {
        let t = root.value;
        let phi = 2.0 * t.atan();
        let a_scale = polys.a.max_abs_coeff() * t.abs().max(1.0).powi(2);
        let singular = polys.a.evaluate(t).abs() <= opts.singular_tol * a_scale;
        if root.multiplicity == 1 {
            recover_at(&mut found, g, j, phi, singular, 1, opts)?;
            continue;
        }
        // Near a degenerate input two simple roots can sit closer than the
        // cluster tolerance while carrying distinct positions. Seed Newton
        // from both line/circle candidates as well as from Cramer.
        let mut cluster = Vec::new();
        recover_at(&mut cluster, g, j, phi, singular, root.multiplicity, opts)?;
        if !singular {
            if let Ok(points) = degeneracy::degenerate_candidates(g, j, phi) {
                for pt in points {
                    accept(
                        &mut cluster,
                        g,
                        j,
                        Pose::new(pt.x, pt.y, phi),
                        RootKind::GenericRoot,
                        root.multiplicity,
                        opts,
                    );
                }
            }
        }
        let mut cluster = dedup_and_sort(cluster, g, j, opts.acceptance_threshold(j));
        let share = (root.multiplicity / cluster.len().max(1)).max(1);
        for s in &mut cluster {
            s.multiplicity = s.multiplicity.min(share);
        }
        found.extend(cluster);
    }

    // Inputs close to a degeneracy condition put two simple roots of P so
    // close together that they may come back as a complex pair. Both
    // positions lie near the degenerate orientation, so seed Newton there.
    for orientation in degeneracy::degenerate_orientations(g).orientations {
        if active.contains(&orientation) || degeneracy::condition_value(g, j, orientation) > opts.warn_tol {
            continue;
        }
        let phi = orientation.to_angle();
        if let Ok(points) = degeneracy::degenerate_candidates(g, j, phi) {
            for pt in points {
                accept(&mut found, g, j, Pose::new(pt.x, pt.y, phi), RootKind::GenericRoot, 1, opts);
            }
        }
    }

    // Rounding in the coefficients can also turn a tight cluster of real
    // roots into complex pairs. The constraints themselves stay well
    // conditioned there, so such pairs are tried as Newton seeds.
    for re in deflated.near_real_parts(&opts.roots, NEAR_REAL_BAND) {
        let phi = 2.0 * re.atan();
        if let Some((x, y)) = linear_coeffs(g, j, phi).solve() {
            accept(&mut found, g, j, Pose::new(x, y, phi), RootKind::GenericRoot, 1, opts);
        }
        if let Ok(points) = degeneracy::degenerate_candidates(g, j, phi) {
            for pt in points {
                accept(&mut found, g, j, Pose::new(pt.x, pt.y, phi), RootKind::GenericRoot, 1, opts);
            }
        }
    }

    // Close to the degenerate family every assembly mode pairs up with
    // another at nearly the same orientation. Those orientations are near
    // the roots of the SW - VQ numerator.
    if class.relative_deviation <= opts.warn_tol {
        let b = polys.b.trimmed(opts.roots.tol_lead);
        let mut seeds = b.near_real_parts(&opts.roots, NEAR_REAL_BAND);
        if let Ok(roots) = b.real_roots(&opts.roots) {
            seeds.extend(roots.iter().map(|r| r.value));
        }
        for t in seeds {
            let phi = 2.0 * t.atan();
            if let Ok(points) = degeneracy::degenerate_candidates(g, j, phi) {
                for pt in points {
                    accept(&mut found, g, j, Pose::new(pt.x, pt.y, phi), RootKind::GenericRoot, 1, opts);
                }
            }
        }
    }

    // phi = pi is not reachable by a finite t
    let a_pi = polys.a.coeff(2).abs();
    recover_at(&mut found, g, j, PI, a_pi <= opts.singular_tol * polys.a.max_abs_coeff(), 1, opts)?;

    Ok(ForwardSolution {
        route: Route::General,
        polynomial: p,
        active_degeneracies: active,
        solutions: dedup_and_sort(found, g, j, opts.acceptance_threshold(j)),
        diagnostics,
    })
}

/// Recovers the position(s) at one orientation and records valid modes.
fn recover_at(
    found: &mut Vec<FkSolution>,
    g: &Geometry,
    j: &JointVector,
    phi: f64,
    singular: bool,
    multiplicity: usize,
    opts: &FkOptions,
) -> Result<()> {
    let lc = linear_coeffs(g, j, phi);
    if !singular {
        if let Some((x, y)) = lc.solve() {
            accept(found, g, j, Pose::new(x, y, phi), RootKind::GenericRoot, multiplicity, opts);
            return Ok(());
        }
    }
    match degeneracy::degenerate_candidates(g, j, phi) {
        Ok(points) => {
            for pt in points {
                accept(found, g, j, Pose::new(pt.x, pt.y, phi), RootKind::DegenerateRoot, multiplicity, opts);
            }
            Ok(())
        }
        Err(Error::InconsistentDegeneracy(_)) => Ok(()),
        Err(e) => Err(e),
    }
}
