//! Angle helpers shared by the wheel and tilt code paths.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::decimal;

/// Reduces an angle into the half-open interval (−π, π].
pub fn wrap_pi(angle: f64) -> f64 {
    let reduced = angle.rem_euclid(TAU);
    if reduced > PI {
        reduced - TAU
    } else {
        reduced
    }
}

/// Signed difference `a − b` taken the short way around the circle.
pub fn angdiff(a: f64, b: f64) -> f64 {
    wrap_pi(a - b)
}

/// A closed interval `[lo, hi]` of angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedInterval {
    #[serde(with = "decimal")]
    pub lo: f64,
    #[serde(with = "decimal")]
    pub hi: f64,
}

impl ClosedInterval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}
