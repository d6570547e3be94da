//! Manipulator geometry, poses, joint vectors and the three loop-closure
//! constraints.
//!
//! The reference frame is centred at the first base joint `A1` with the
//! x-axis through `A2 = (c2, 0)`. The third base joint is `A3 = (c3, d3)`.
//! The platform operation point is `B1 = (x, y)`; `B2` lies at distance `l2`
//! along the platform orientation `phi`, and `B3` at distance `l3` along
//! `phi + beta`.

use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = Vector2<f64>;

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    // rem_euclid maps -pi to pi, and tiny negative values to just below 2pi
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Smallest absolute difference between two angles, accounting for wrap.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    normalize_angle(a - b).abs()
}

pub fn same_orientation(a: f64, b: f64, tol: f64) -> bool {
    angle_distance(a, b) <= tol
}

/// Base and platform triangle parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Length of the base side `A1A2`.
    pub c2: f64,
    /// x coordinate of `A3`.
    pub c3: f64,
    /// y coordinate of `A3`.
    pub d3: f64,
    /// Length of the platform side `B1B2`.
    pub l2: f64,
    /// Length of the platform side `B1B3`.
    pub l3: f64,
    /// Angle from `B1B2` to `B1B3`, in radians.
    pub beta: f64,
}

impl Geometry {
    /// Validates the parameters and wraps `beta` into `(-pi, pi]`.
    pub fn new(c2: f64, c3: f64, d3: f64, l2: f64, l3: f64, beta: f64) -> Result<Self> {
        let all = [c2, c3, d3, l2, l3, beta];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGeometry("parameters must be finite".into()));
        }
        for (name, value) in [("c2", c2), ("l2", l2), ("l3", l3)] {
            if value <= 0.0 {
                return Err(Error::InvalidGeometry(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(Geometry { c2, c3, d3, l2, l3, beta: normalize_angle(beta) })
    }

    pub fn anchors(&self) -> [Point; 3] {
        [Point::new(0.0, 0.0), Point::new(self.c2, 0.0), Point::new(self.c3, self.d3)]
    }

    /// Platform joint centres `B1, B2, B3` at the given pose.
    pub fn platform_points(&self, pose: &Pose) -> [Point; 3] {
        let b1 = Point::new(pose.x, pose.y);
        let (s, c) = pose.phi.sin_cos();
        let (s3, c3) = (pose.phi + self.beta).sin_cos();
        [b1, b1 + self.l2 * Point::new(c, s), b1 + self.l3 * Point::new(c3, s3)]
    }

    /// Characteristic length used to make tolerances scale invariant.
    pub fn scale(&self) -> f64 {
        self.c2.max(self.l2).max(self.l3).max(self.c3.abs()).max(self.d3.abs())
    }
}

/// Platform pose: position of `B1` and orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Orientation in radians, in `(-pi, pi]`.
    pub phi: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, phi: f64) -> Self {
        Pose { x, y, phi: normalize_angle(phi) }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Actuated leg lengths. Always nonnegative and finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct JointVector {
    rho: [f64; 3],
}

impl JointVector {
    pub fn new(rho1: f64, rho2: f64, rho3: f64) -> Result<Self> {
        let rho = [rho1, rho2, rho3];
        for (i, r) in rho.iter().enumerate() {
            if !r.is_finite() || *r < 0.0 {
                return Err(Error::InvalidInput(format!("rho{} must be a nonnegative finite length, got {r}", i + 1)));
            }
        }
        Ok(JointVector { rho })
    }

    pub fn rho1(&self) -> f64 {
        self.rho[0]
    }

    pub fn rho2(&self) -> f64 {
        self.rho[1]
    }

    pub fn rho3(&self) -> f64 {
        self.rho[2]
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.rho
    }

    pub fn squared(&self) -> [f64; 3] {
        self.rho.map(|r| r * r)
    }

    pub fn max(&self) -> f64 {
        self.rho.iter().copied().fold(0.0, f64::max)
    }
}

impl TryFrom<[f64; 3]> for JointVector {
    type Error = Error;

    fn try_from(rho: [f64; 3]) -> Result<Self> {
        JointVector::new(rho[0], rho[1], rho[2])
    }
}

impl From<JointVector> for [f64; 3] {
    fn from(j: JointVector) -> Self {
        j.rho
    }
}

/// `t = tan(phi / 2)`, with an explicit point at infinity for `phi = pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HalfAngle {
    Finite(f64),
    Infinite,
}

impl HalfAngle {
    pub fn from_angle(phi: f64) -> Self {
        let phi = normalize_angle(phi);
        if phi == PI {
            HalfAngle::Infinite
        } else {
            HalfAngle::Finite((phi / 2.0).tan())
        }
    }

    pub fn to_angle(self) -> f64 {
        match self {
            HalfAngle::Finite(t) => 2.0 * t.atan(),
            HalfAngle::Infinite => PI,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, HalfAngle::Infinite)
    }
}

/// Leg lengths that realise `pose`. Total: each is a Euclidean distance.
pub fn inverse_kinematics(g: &Geometry, pose: &Pose) -> JointVector {
    let anchors = g.anchors();
    let platform = g.platform_points(pose);
    let rho = [0, 1, 2].map(|i| (platform[i] - anchors[i]).norm());
    JointVector { rho }
}

/// Signed residuals `rho_i^2 - |B_i - A_i|^2` of the three constraints.
pub fn residuals(g: &Geometry, pose: &Pose, j: &JointVector) -> [f64; 3] {
    let anchors = g.anchors();
    let platform = g.platform_points(pose);
    let sq = j.squared();
    [0, 1, 2].map(|i| sq[i] - (platform[i] - anchors[i]).norm_squared())
}

pub fn max_abs_residual(g: &Geometry, pose: &Pose, j: &JointVector) -> f64 {
    residuals(g, pose, j).iter().fold(0.0, |m, r| m.max(r.abs()))
}
