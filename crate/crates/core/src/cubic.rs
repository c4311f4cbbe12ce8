//! Third-order characterization curves mapping ADC counts to angles.

use serde::{Deserialize, Serialize};

use crate::decimal;
use crate::error::{Error, Result};

/// Number of grid points used to certify monotonicity of a cubic.
pub const MONOTONE_GRID: usize = 1024;

/// Angle tolerance for bisection inversion, radians.
pub const INVERT_TOL: f64 = 1e-9;

/// Closed interval of voltage counts on which a [`CubicModel`] is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoltageWindow {
    #[serde(with = "decimal")]
    pub lo: f64,
    #[serde(with = "decimal")]
    pub hi: f64,
}

impl VoltageWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!("voltage window [{lo}, {hi}] is empty")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct RawCubic {
    #[serde(with = "decimal")]
    c3: f64,
    #[serde(with = "decimal")]
    c2: f64,
    #[serde(with = "decimal")]
    c1: f64,
    #[serde(with = "decimal")]
    c0: f64,
    v_window: VoltageWindow,
}

/// `θ = c3·V³ + c2·V² + c1·V + c0`, strictly monotone on `v_window`.
///
/// Construction checks the sign of the derivative on a 1,024-point grid, so
/// every value of this type can be inverted by bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCubic", into = "RawCubic")]
pub struct CubicModel {
    c3: f64,
    c2: f64,
    c1: f64,
    c0: f64,
    v_window: VoltageWindow,
    increasing: bool,
}

impl TryFrom<RawCubic> for CubicModel {
    type Error = Error;

    fn try_from(raw: RawCubic) -> Result<Self> {
        CubicModel::new([raw.c3, raw.c2, raw.c1, raw.c0], raw.v_window)
    }
}

impl From<CubicModel> for RawCubic {
    fn from(m: CubicModel) -> Self {
        RawCubic { c3: m.c3, c2: m.c2, c1: m.c1, c0: m.c0, v_window: m.v_window }
    }
}

impl CubicModel {
    /// Builds a model from coefficients ordered `[c3, c2, c1, c0]`.
    pub fn new(coeffs: [f64; 4], v_window: VoltageWindow) -> Result<Self> {
        let [c3, c2, c1, c0] = coeffs;
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("cubic coefficients must be finite".into()));
        }
        let mut model = Self { c3, c2, c1, c0, v_window, increasing: true };
        let (lo, hi) = (v_window.lo, v_window.hi);
        let step = (hi - lo) / (MONOTONE_GRID - 1) as f64;
        let mut positive = 0usize;
        let mut negative = 0usize;
        for i in 0..MONOTONE_GRID {
            let v = if i == MONOTONE_GRID - 1 { hi } else { lo + step * i as f64 };
            let d = model.derivative(v);
            if d > 0.0 {
                positive += 1;
            } else if d < 0.0 {
                negative += 1;
            }
        }
        if positive == MONOTONE_GRID {
            model.increasing = true;
        } else if negative == MONOTONE_GRID {
            model.increasing = false;
        } else {
            return Err(Error::NonMonotone { lo, hi });
        }
        Ok(model)
    }

    /// Coefficients ordered `[c3, c2, c1, c0]`.
    pub fn coeffs(&self) -> [f64; 4] {
        [self.c3, self.c2, self.c1, self.c0]
    }

    pub fn v_window(&self) -> VoltageWindow {
        self.v_window
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    /// Evaluates the polynomial; no window check.
    pub fn eval(&self, v: f64) -> f64 {
        ((self.c3 * v + self.c2) * v + self.c1) * v + self.c0
    }

    pub fn derivative(&self, v: f64) -> f64 {
        (3.0 * self.c3 * v + 2.0 * self.c2) * v + self.c1
    }

    /// Angles reached at the window ends, ordered ascending.
    pub fn angle_range(&self) -> (f64, f64) {
        let a = self.eval(self.v_window.lo);
        let b = self.eval(self.v_window.hi);
        if self.increasing {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Largest |dθ/dV| on the window; the angle covered by one ADC count.
    pub fn max_slope(&self) -> f64 {
        let mut best = self.derivative(self.v_window.lo).abs().max(self.derivative(self.v_window.hi).abs());
        // The derivative is a parabola; its vertex is the only interior extremum.
        if self.c3 != 0.0 {
            let vertex = -self.c2 / (3.0 * self.c3);
            if self.v_window.contains(vertex) {
                best = best.max(self.derivative(vertex).abs());
            }
        }
        best
    }

    /// Solves `eval(V) = theta` for `V` inside the window by bisection.
    pub fn invert(&self, theta: f64) -> Result<f64> {
        let (lo_angle, hi_angle) = self.angle_range();
        if !(theta >= lo_angle && theta <= hi_angle) {
            return Err(Error::OutOfModelRange { target: theta, lo: lo_angle, hi: hi_angle });
        }
        let sign = if self.increasing { 1.0 } else { -1.0 };
        let residual = |v: f64| sign * (self.eval(v) - theta);

        let mut lo = self.v_window.lo;
        let mut hi = self.v_window.hi;
        if residual(lo) >= 0.0 {
            return Ok(lo);
        }
        if residual(hi) <= 0.0 {
            return Ok(hi);
        }
        let mut mid = 0.5 * (lo + hi);
        for _ in 0..200 {
            mid = 0.5 * (lo + hi);
            let r = residual(mid);
            if r == 0.0 || hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
                break;
            }
            if r < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Pick whichever bracket end is closest; the bracket has collapsed to ulps.
        let best = [lo, mid, hi]
            .into_iter()
            .min_by(|a, b| residual(*a).abs().total_cmp(&residual(*b).abs()))
            .unwrap_or(mid);
        if residual(best).abs() >= INVERT_TOL {
            return Err(Error::Numerical(format!(
                "bisection stalled at V = {best} with residual {}",
                residual(best)
            )));
        }
        Ok(best)
    }
}

/// Solves `model(V) = theta` on the model's voltage window.
pub fn invert_cubic(model: &CubicModel, theta: f64) -> Result<f64> {
    model.invert(theta)
}

/// Characterization curves reported for a reference wheel and tilt sensor.
pub mod reference {
    use super::*;

    pub const WHEEL_WIPER0: [f64; 4] = [5.0281e-9, -1.2255e-5, 1.7856e-2, -7.2750];
    pub const WHEEL_WIPER1: [f64; 4] = [5.1596e-9, -1.2409e-5, 1.7927e-2, -5.8128];
    pub const TILT: [f64; 4] = [4.7517e-9, -8.7608e-6, 8.6756e-3, -2.7173];
    /// Second tilt unit, used by the tilt tracking experiment.
    pub const TILT_EXPERIMENT: [f64; 4] = [4.4674e-10, -1.5933e-6, 6.5369e-3, -2.1117];

    /// A reference curve defined over the full 10-bit ADC range.
    pub fn full_scale(coeffs: [f64; 4]) -> CubicModel {
        CubicModel::new(coeffs, VoltageWindow { lo: 0.0, hi: 1023.0 })
            .expect("reference curves are monotone on [0, 1023]")
    }
}
