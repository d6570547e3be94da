//! The degenerate-manipulator family: congruent base and platform triangles
//! with the platform flipped about side `l2`. Its position linear system is
//! singular for every orientation and every input, and the forward
//! kinematics reduce to a cubic in `t` followed by a line/circle
//! intersection per orientation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::charpoly::degeneracy_polys;
use crate::degeneracy;
use crate::error::{Error, Result};
use crate::model::{Geometry, JointVector, Pose};
use crate::polynomial::Polynomial;
use crate::solution::{accept, dedup_and_sort, Diagnostic, FkOptions, FkSolution, ForwardSolution, RootKind, Route};

pub const DEFAULT_FAMILY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    General,
    /// `l2 = c2`, `l3 sin(beta) = -d3`, `l3 cos(beta) = c3`.
    DegenerateFamily,
    /// `l2 = c2`, `l3 sin(beta) = d3`, `l3 cos(beta) = c3`: congruent
    /// triangles without the flip. Classified only; solved by the general
    /// pipeline.
    MirrorSimilarCongruent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyClass {
    pub kind: FamilyKind,
    /// Residuals of the three conditions that make the singular-orientation
    /// quadratic vanish identically (its `t^2` coefficient, half its `t`
    /// coefficient, its constant term).
    pub conditions: [f64; 3],
    /// Largest of `|l2 - c2|`, `|l3 sin(beta) + d3|`, `|l3 cos(beta) - c3|`
    /// relative to the geometry scale.
    pub relative_deviation: f64,
}

pub fn classify_family(g: &Geometry, tol: f64) -> FamilyClass {
    let Geometry { c2, c3, d3, l2, l3, beta } = *g;
    let (sb, cb) = beta.sin_cos();
    let scale = g.scale();
    let conditions =
        [d3 * (l2 + c2) + l3 * sb * (l2 + c2), l2 * c3 - c2 * l3 * cb, -d3 * (l2 - c2) + l3 * sb * (l2 - c2)];
    let base = (l2 - c2).abs().max((l3 * cb - c3).abs());
    let flipped = base.max((l3 * sb + d3).abs()) / scale;
    let mirrored = base.max((l3 * sb - d3).abs()) / scale;
    let kind = if flipped <= tol {
        FamilyKind::DegenerateFamily
    } else if mirrored <= tol {
        FamilyKind::MirrorSimilarCongruent
    } else {
        FamilyKind::General
    };
    FamilyClass { kind, conditions, relative_deviation: flipped }
}

fn require_family(g: &Geometry) -> Result<()> {
    match classify_family(g, DEFAULT_FAMILY_TOL).kind {
        FamilyKind::DegenerateFamily => Ok(()),
        _ => Err(Error::NotInFamily),
    }
}

/// The family's cubic characteristic polynomial, ascending coefficients.
pub fn cubic_characteristic(g: &Geometry, j: &JointVector) -> Result<Polynomial> {
    require_family(g)?;
    let Geometry { c2, c3, d3, .. } = *g;
    let [r1, r2, r3] = j.squared();
    Ok(Polynomial::new(vec![
        d3 * (r2 - r1),
        c3 * (r1 - r2) + r3 * c2 - 4.0 * d3 * d3 * c2 - r1 * c2,
        d3 * (8.0 * c3 * c2 - 4.0 * c2 * c2 + r2 - r1),
        c3 * (r1 - r2 + 4.0 * c2 * c2 - 4.0 * c3 * c2) + c2 * (r3 - r1),
    ]))
}

/// The same cubic obtained from the cleared `SW - VQ` numerator, whose
/// quartic coefficient vanishes on the family. Normalised to the scale of
/// [`cubic_characteristic`] (the numerator is `-4` times it).
pub fn derived_cubic(g: &Geometry, j: &JointVector) -> Result<Polynomial> {
    require_family(g)?;
    let b = degeneracy_polys(g, j).b;
    let quartic = b.coeff(4).abs();
    if quartic > 1e-8 * b.max_abs_coeff().max(1.0) {
        return Err(Error::Internal(format!("quartic coefficient {quartic:.3e} does not vanish on a family geometry")));
    }
    Ok(Polynomial::new((0..4).map(|i| -0.25 * b.coeff(i)).collect::<Vec<_>>()))
}

pub fn forward_kinematics_family(g: &Geometry, j: &JointVector) -> Result<Vec<FkSolution>> {
    require_family(g)?;
    Ok(solve_family(g, j, &FkOptions::default())?.solutions)
}

/// Family solve: cubic roots, then up to two positions per orientation.
pub(crate) fn solve_family(g: &Geometry, j: &JointVector, opts: &FkOptions) -> Result<ForwardSolution> {
    let class = classify_family(g, opts.family_tol.max(DEFAULT_FAMILY_TOL));
    if class.kind != FamilyKind::DegenerateFamily {
        return Err(Error::NotInFamily);
    }
    let mut diagnostics = Vec::new();
    let closed_form = cubic_characteristic(g, j)?;
    let derived = derived_cubic(g, j)?;
    let deviation = (0..4).map(|i| (closed_form.coeff(i) - derived.coeff(i)).abs()).fold(0.0, f64::max)
        / closed_form.max_abs_coeff().max(derived.max_abs_coeff()).max(f64::MIN_POSITIVE);
    let cubic = if deviation > 1e-9 {
        diagnostics.push(Diagnostic::FamilyCubicMismatch { relative_deviation: deviation });
        derived
    } else {
        closed_form
    };

    let roots = match cubic.real_roots(&opts.roots) {
        Ok(r) => r,
        Err(Error::ZeroPolynomial) => return Err(Error::ContinuumOfSolutions),
        Err(e) => return Err(e),
    };

    let mut found = Vec::new();
    let orientations = roots.iter().map(|r| (2.0 * r.value.atan(), r.multiplicity)).chain([(PI, 1)]);
    for (phi, multiplicity) in orientations {
        match degeneracy::degenerate_candidates(g, j, phi) {
            Ok(points) => {
                for pt in points {
                    accept(&mut found, g, j, Pose::new(pt.x, pt.y, phi), RootKind::DegenerateRoot, multiplicity, opts);
                }
            }
            Err(Error::InconsistentDegeneracy(_)) => {}
            Err(e) => return Err(e),
        }
    }

    Ok(ForwardSolution {
        route: Route::DegenerateFamily,
        polynomial: cubic,
        active_degeneracies: Vec::new(),
        solutions: dedup_and_sort(found, g, j, opts.acceptance_threshold(j)),
        diagnostics,
    })
}
