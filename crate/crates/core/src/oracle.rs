//! Brute-force forward kinematics used to cross-check the polynomial
//! solvers. Works directly on the three distance constraints and shares no
//! code with the characteristic-polynomial path.
//!
//! For a fixed orientation the first two legs constrain `B1` to the circle of
//! radius `rho1` about `A1` and to the circle of radius `rho2` about
//! `A2 - l2 e(phi)`. Each of the (up to) two intersection branches is
//! followed over a grid of orientations while the signed third-leg residual
//! is watched for sign changes, which are then bisected. Intervals where the
//! residual nears zero without changing sign are subdivided, since a close
//! pair of roots leaves no sign change at the grid samples.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{max_abs_residual, Geometry, JointVector, Point, Pose};
use crate::solution::{dedup_and_sort, FkSolution, RootKind};

/// Relative tolerance used by [`circle_intersection`].
pub const DEFAULT_TANGENCY_TOL: f64 = 1e-12;

const SUBDIVISIONS: usize = 16;
const SCAN_DEPTH: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    /// Grid size over `(-pi, pi]`.
    pub samples: usize,
    /// Bisection stops once `|f| <= refine_tol * (1 + rho_max^2)`.
    pub refine_tol: f64,
    /// A root is kept when `max|residual| < residual_tol * (1 + rho_max^2)`.
    pub residual_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { samples: 7200, refine_tol: 1e-12, residual_tol: 1e-8 }
    }
}

impl SweepConfig {
    pub fn with_samples(samples: usize) -> Result<Self> {
        let cfg = SweepConfig { samples, ..SweepConfig::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 360 {
            return Err(Error::InvalidInput(format!("sweep needs at least 360 samples, got {}", self.samples)));
        }
        if !(self.refine_tol > 0.0 && self.residual_tol > 0.0) {
            return Err(Error::InvalidInput("sweep tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Intersection points of two circles. A tangency yields one point;
/// disjoint, nested or concentric circles yield none.
pub fn circle_intersection(center1: Point, r1: f64, center2: Point, r2: f64) -> Vec<Point> {
    circle_intersection_with_tol(center1, r1, center2, r2, DEFAULT_TANGENCY_TOL)
}

pub fn circle_intersection_with_tol(center1: Point, r1: f64, center2: Point, r2: f64, tol: f64) -> Vec<Point> {
    let delta = center2 - center1;
    let d = delta.norm();
    if d == 0.0 {
        return Vec::new();
    }
    let dir = delta / d;
    let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let h2 = r1 * r1 - a * a;
    let scale = (r1 * r1).max(r2 * r2).max(d * d);
    if h2 < -tol * scale {
        return Vec::new();
    }
    let base = center1 + a * dir;
    if h2 <= tol * scale {
        return vec![base];
    }
    let perp = Point::new(-dir.y, dir.x);
    let h = h2.sqrt();
    vec![base + h * perp, base - h * perp]
}

/// Largest second difference of the samples around interval `i..i+1`.
fn second_difference(pts: &[(f64, Option<f64>)], i: usize) -> f64 {
    let v = |k: usize| pts.get(k).and_then(|p| p.1);
    let mut out = 0.0f64;
    for c in [i, i + 1] {
        if c == 0 {
            continue;
        }
        if let (Some(a), Some(b), Some(d)) = (v(c - 1), v(c), v(c + 1)) {
            out = out.max((a - 2.0 * b + d).abs());
        }
    }
    out
}

struct Sweep<'a> {
    g: &'a Geometry,
    j: &'a JointVector,
    cfg: &'a SweepConfig,
    anchors: [Point; 3],
    sq: [f64; 3],
    concentric_tol: f64,
}

impl Sweep<'_> {
    fn leg2_center(&self, phi: f64) -> Point {
        let (s, c) = phi.sin_cos();
        self.anchors[1] - self.g.l2 * Point::new(c, s)
    }

    /// `B1` on branch `sign` (+1 or -1), if the two circles meet. Always
    /// `None` where the circles are concentric.
    fn branch_point(&self, phi: f64, sign: f64) -> Option<Point> {
        let center = self.leg2_center(phi);
        let d = center.norm();
        if d <= self.concentric_tol {
            return None;
        }
        let dir = center / d;
        let a = (d * d + self.sq[0] - self.sq[1]) / (2.0 * d);
        let h2 = self.sq[0] - a * a;
        if h2 < 0.0 {
            return None;
        }
        Some(a * dir + sign * h2.sqrt() * Point::new(-dir.y, dir.x))
    }

    fn third_leg_residual(&self, phi: f64, b1: Point) -> f64 {
        let (s, c) = (phi + self.g.beta).sin_cos();
        let b3 = b1 + self.g.l3 * Point::new(c, s);
        (b3 - self.anchors[2]).norm_squared() - self.sq[2]
    }

    fn f(&self, phi: f64, sign: f64) -> Option<f64> {
        self.branch_point(phi, sign).map(|b1| self.third_leg_residual(phi, b1))
    }

    /// Last orientation between `inside` (branch exists) and `outside`
    /// (it does not) at which the branch still exists.
    fn boundary(&self, mut inside: f64, mut outside: f64, sign: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if self.branch_point(mid, sign).is_some() {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    }

    /// Bisects a sign change of `h` on `[lo, hi]`.
    fn bisect(&self, h: &dyn Fn(f64) -> Option<f64>, mut lo: f64, mut hi: f64) -> Option<f64> {
        let stop = self.cfg.refine_tol * (1.0 + self.j.max().powi(2));
        let mut h_lo = h(lo)?;
        let h_hi = h(hi)?;
        if h_lo == 0.0 {
            return Some(lo);
        }
        if h_hi == 0.0 {
            return Some(hi);
        }
        let mut best = if h_lo.abs() < h_hi.abs() { lo } else { hi };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            let h_mid = h(mid)?;
            best = mid;
            if h_mid.abs() <= stop * 1e-3 {
                break;
            }
            if (h_mid < 0.0) == (h_lo < 0.0) {
                lo = mid;
                h_lo = h_mid;
            } else {
                hi = mid;
            }
        }
        Some(best)
    }

    fn push(&self, out: &mut Vec<FkSolution>, phi: f64, b1: Point, kind: RootKind) {
        let pose = Pose::new(b1.x, b1.y, phi);
        let max_residual = max_abs_residual(self.g, &pose, self.j);
        if max_residual < self.cfg.residual_tol * (1.0 + self.j.max().powi(2)) {
            out.push(FkSolution { pose, kind, multiplicity: 1, max_residual });
        }
    }

    fn push_branch_root(&self, out: &mut Vec<FkSolution>, phi: f64, sign: f64) {
        if let Some(b1) = self.branch_point(phi, sign) {
            self.push(out, phi, b1, RootKind::GenericRoot);
        }
    }

    /// Searches `[s0, s1]` of a parametrised branch segment for roots. Where
    /// the end values share a sign but are small next to the local variation
    /// `spread`, two roots may hide in between, so the interval is split.
    #[allow(clippy::too_many_arguments)]
    fn scan(
        &self,
        out: &mut Vec<FkSolution>,
        phi_of: &dyn Fn(f64) -> f64,
        sign: f64,
        (s0, v0): (f64, f64),
        (s1, v1): (f64, f64),
        spread: f64,
        depth: u32,
    ) {
        if v0 == 0.0 {
            self.push_branch_root(out, phi_of(s0), sign);
            return;
        }
        if v1 != 0.0 && (v0 < 0.0) != (v1 < 0.0) {
            let h = |s: f64| self.f(phi_of(s), sign);
            if let Some(root) = self.bisect(&h, s0, s1) {
                self.push_branch_root(out, phi_of(root), sign);
            }
            return;
        }
        if depth > 0 && v0.abs().min(v1.abs()) <= 8.0 * ((v1 - v0).abs() + spread) {
            self.subdivide(out, phi_of, sign, s0, s1, SUBDIVISIONS, depth - 1);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn subdivide(
        &self,
        out: &mut Vec<FkSolution>,
        phi_of: &dyn Fn(f64) -> f64,
        sign: f64,
        s0: f64,
        s1: f64,
        n: usize,
        depth: u32,
    ) {
        let pts: Vec<(f64, Option<f64>)> = (0..=n)
            .map(|i| {
                let s = s0 + (s1 - s0) * i as f64 / n as f64;
                (s, self.f(phi_of(s), sign))
            })
            .collect();
        for i in 0..n {
            if let (Some(a), Some(b)) = (pts[i].1, pts[i + 1].1) {
                let spread = second_difference(&pts, i);
                self.scan(out, phi_of, sign, (pts[i].0, a), (pts[i + 1].0, b), spread, depth);
            }
        }
    }

    fn track_branch(&self, out: &mut Vec<FkSolution>, grid: &[f64], sign: f64) {
        let pts: Vec<(f64, Option<f64>)> = grid.iter().map(|&phi| (phi, self.f(phi, sign))).collect();
        let identity = |s: f64| s;
        for k in 0..grid.len() - 1 {
            match (pts[k].1, pts[k + 1].1) {
                (Some(a), Some(b)) => {
                    let spread = second_difference(&pts, k);
                    self.scan(out, &identity, sign, (grid[k], a), (grid[k + 1], b), spread, SCAN_DEPTH);
                }
                // The branch ends (or starts) inside this interval.
                (Some(_), None) => self.edge(out, grid[k], grid[k + 1], sign),
                (None, Some(_)) => self.edge(out, grid[k + 1], grid[k], sign),
                (None, None) => {}
            }
        }
    }

    /// Scans from `inside` up to where the branch ends. Near a tangency the
    /// branch behaves like a square root of the distance to the end, so the
    /// segment is sampled in `s` with `phi = end + (inside - end) s^2`.
    fn edge(&self, out: &mut Vec<FkSolution>, inside: f64, outside: f64, sign: f64) {
        let end = self.boundary(inside, outside, sign);
        let phi_of = |s: f64| end + (inside - end) * s * s;
        let n = 4 * SUBDIVISIONS;
        self.subdivide(out, &phi_of, sign, 0.0, 1.0, n, SCAN_DEPTH);
        // A root at the tangency itself changes sign across the two
        // branches rather than along either one.
        let near = phi_of(1.0 / n as f64);
        if let (Some(a), Some(b)) = (self.f(near, sign), self.f(near, -sign)) {
            if a == 0.0 || b == 0.0 || (a < 0.0) != (b < 0.0) {
                self.push_branch_root(out, end, sign);
            }
        }
    }

    /// At an orientation where the two leg circles coincide, `B1` is only
    /// constrained by the first and third legs.
    fn concentric(&self, out: &mut Vec<FkSolution>, phi: f64) {
        if self.leg2_center(phi).norm() > self.concentric_tol {
            return;
        }
        if (self.j.rho1() - self.j.rho2()).abs() > 1e-9 * (1.0 + self.j.max()) {
            return;
        }
        let (s, c) = (phi + self.g.beta).sin_cos();
        let center = self.anchors[2] - self.g.l3 * Point::new(c, s);
        for b1 in circle_intersection(Point::zeros(), self.j.rho1(), center, self.j.rho3()) {
            self.push(out, phi, b1, RootKind::DegenerateRoot);
        }
    }
}

/// All assembly modes found by sweeping the orientation.
pub fn sweep_fk(g: &Geometry, j: &JointVector, cfg: &SweepConfig) -> Vec<FkSolution> {
    let sweep = Sweep { g, j, cfg, anchors: g.anchors(), sq: j.squared(), concentric_tol: 1e-12 * (g.c2 + g.l2) };
    let n = cfg.samples.max(360);
    let step = 2.0 * PI / n as f64;
    // (-pi, pi] plus one wrap-around sample so the last interval closes the loop
    let grid: Vec<f64> = (1..=n + 1).map(|k| -PI + k as f64 * step).collect();

    let mut out = Vec::new();
    for sign in [1.0, -1.0] {
        sweep.track_branch(&mut out, &grid, sign);
    }
    for phi in [0.0, PI] {
        sweep.concentric(&mut out, phi);
    }
    dedup_and_sort(out, g, j, cfg.residual_tol * (1.0 + j.max().powi(2)))
}
