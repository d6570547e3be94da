//! Seeded random instance generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rpr3_core::model::{inverse_kinematics, same_orientation};
use rpr3_core::{degenerate_orientations, FkSolution, Geometry, HalfAngle, JointVector, Pose};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn geometry(rng: &mut impl Rng) -> Geometry {
    Geometry::new(
        rng.random_range(0.5..2.5),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(0.5..2.5),
        rng.random_range(0.5..2.5),
        rng.random_range(-PI..PI),
    )
    .unwrap()
}

/// Congruent triangles with the platform flipped about side `l2`.
pub fn family_geometry(rng: &mut impl Rng) -> Geometry {
    let c2 = rng.random_range(0.5..2.5);
    let c3 = rng.random_range(-2.0..2.0);
    let d3 = rng.random_range(0.2..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    Geometry::new(c2, c3, d3, c2, c3.hypot(d3), (-d3).atan2(c3)).unwrap()
}

/// `l2 = c2` with `d3` kept away from `l3 sin(beta)`.
pub fn parallelogram_geometry(rng: &mut impl Rng) -> Geometry {
    loop {
        let mut g = geometry(rng);
        g.l2 = g.c2;
        if (g.d3 - g.l3 * g.beta.sin()).abs() > 0.1 && (g.d3 + g.l3 * g.beta.sin()).abs() > 0.1 {
            return g;
        }
    }
}

pub fn pose(rng: &mut impl Rng) -> Pose {
    Pose::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-PI..PI))
}

pub fn position_at(rng: &mut impl Rng, phi: f64) -> Pose {
    Pose::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), phi)
}

/// A geometry with a finite singular orientation and a pose seeded there,
/// so that the joints satisfy that orientation's degeneracy condition.
pub fn degenerate_instance(rng: &mut impl Rng) -> (Geometry, Pose, JointVector) {
    loop {
        let g = geometry(rng);
        let finite: Vec<f64> = degenerate_orientations(&g)
            .orientations
            .into_iter()
            .filter_map(|t| match t {
                HalfAngle::Finite(t) => Some(2.0 * t.atan()),
                HalfAngle::Infinite => None,
            })
            .collect();
        if finite.is_empty() {
            continue;
        }
        let phi = finite[rng.random_range(0..finite.len())];
        let p = position_at(rng, phi);
        let j = inverse_kinematics(&g, &p);
        return (g, p, j);
    }
}

/// Greedy set comparison. Returns the largest position and orientation
/// mismatch, or `None` when the counts differ or some solution is unmatched.
pub fn match_sets(a: &[FkSolution], b: &[FkSolution], pos_tol: f64, ang_tol: f64) -> Option<(f64, f64)> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let (mut worst_pos, mut worst_ang) = (0.0f64, 0.0f64);
    for s in a {
        let best = b
            .iter()
            .enumerate()
            .filter(|(i, o)| !used[*i] && same_orientation(s.pose.phi, o.pose.phi, ang_tol))
            .map(|(i, o)| (i, (s.pose.position() - o.pose.position()).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))?;
        if best.1 > pos_tol {
            return None;
        }
        used[best.0] = true;
        worst_pos = worst_pos.max(best.1);
        worst_ang = worst_ang.max(rpr3_core::model::angle_distance(s.pose.phi, b[best.0].pose.phi));
    }
    Some((worst_pos, worst_ang))
}
