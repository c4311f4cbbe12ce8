//! Scalar Kalman filters for wheel and tilt joints.
//!
//! The state is the joint angle. Instead of linearizing the cubic
//! voltage-to-angle curves, each usable wiper reading is converted to an
//! angle first (`z = f(V)`), which makes the observation model the identity
//! (`z = x + v`). A wheel joint then has zero, one or two such features per
//! step depending on which wipers are on the track.
//!
//! Transition: `x_t = x_{t−1} + G·u + U·n` with `G = k·δt`, `U = δt`,
//! `n ~ N(0, Q)`.

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use crate::angle::wrap_pi;
use crate::characterize::ValidRange;
use crate::cubic::CubicModel;
use crate::error::{Error, Result};
use crate::sensor_sim::{AdcReading, WheelGeometry, Wiper};

/// Initial variance used when none is configured, rad².
pub const DEFAULT_SIGMA0: f64 = 1e-4;
/// Process-noise power used when none is configured, rad²/s².
pub const DEFAULT_Q: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionModel {
    /// Transmission ratio, joint rad per motor rad.
    pub k: f64,
    pub dt: f64,
    /// Process-noise power Q, rad²/s².
    pub q: f64,
}

impl TransitionModel {
    pub fn new(k: f64, dt: f64, q: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        if !(q >= 0.0 && q.is_finite()) {
            return Err(Error::Config(format!("q must be ≥ 0, got {q}")));
        }
        if !k.is_finite() {
            return Err(Error::Config(format!("transmission ratio {k} is not finite")));
        }
        Ok(Self { k, dt, q })
    }

    /// Input gain `G = k·δt`.
    pub fn g(&self) -> f64 {
        self.k * self.dt
    }

    /// Noise gain `U = δt`.
    pub fn u_gain(&self) -> f64 {
        self.dt
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBelief {
    pub mu: f64,
    pub sigma: f64,
}

impl GaussianBelief {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu.is_finite() && sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Numerical(format!("invalid belief N({mu}, {sigma})")));
        }
        Ok(Self { mu, sigma })
    }
}

fn check_variance(r: f64, what: &str) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Config(format!("{what} must be positive, got {r}")));
    }
    Ok(())
}

/// Per-wiper curves, measurement variances and trusted count ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct WheelObservationModel {
    models: [CubicModel; 2],
    r: [f64; 2],
    ranges: [ValidRange; 2],
    geometry: WheelGeometry,
}

impl WheelObservationModel {
    pub fn new(
        models: [CubicModel; 2],
        r: [f64; 2],
        ranges: [ValidRange; 2],
        geometry: WheelGeometry,
    ) -> Result<Self> {
        check_variance(r[0], "r0")?;
        check_variance(r[1], "r1")?;
        geometry.validate()?;
        Ok(Self { models, r, ranges, geometry })
    }

    pub fn model(&self, wiper: Wiper) -> &CubicModel {
        &self.models[wiper.index()]
    }

    pub fn r(&self, wiper: Wiper) -> f64 {
        self.r[wiper.index()]
    }

    pub fn range(&self, wiper: Wiper) -> ValidRange {
        self.ranges[wiper.index()]
    }

    pub fn geometry(&self) -> &WheelGeometry {
        &self.geometry
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TiltObservationModel {
    model: CubicModel,
    r: f64,
}

impl TiltObservationModel {
    pub fn new(model: CubicModel, r: f64) -> Result<Self> {
        check_variance(r, "r")?;
        Ok(Self { model, r })
    }

    pub fn model(&self) -> &CubicModel {
        &self.model
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// A converted measurement from one wiper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feature {
    pub wiper: Wiper,
    /// `f̄ᵢ(Vᵢ)`, in the wiper's shifted chart.
    pub z: f64,
    pub r: f64,
}

pub type Features = ArrayVec<Feature, 2>;

/// Wheel initialization: prefer wiper 0, fall back to wiper 1.
pub fn init_wheel(readings: &[AdcReading; 2], obs: &WheelObservationModel, sigma0: f64) -> Result<GaussianBelief> {
    let usable = |wiper: Wiper| {
        let r = readings[wiper.index()];
        (r.available && obs.range(wiper).contains(r.count)).then_some(r.count)
    };
    let mu = if let Some(v0) = usable(Wiper::Zero) {
        let x = obs.model(Wiper::Zero).eval(v0 as f64);
        if x < -std::f64::consts::PI {
            x + std::f64::consts::TAU
        } else {
            x
        }
    } else if let Some(v1) = usable(Wiper::One) {
        let x = obs.model(Wiper::One).eval(v1 as f64);
        if x > std::f64::consts::PI {
            x - std::f64::consts::TAU
        } else {
            x
        }
    } else {
        return Err(Error::Initialization(format!(
            "neither wiper reading is inside its valid range (v0 = {:?}, v1 = {:?})",
            readings[0].value(),
            readings[1].value()
        )));
    };
    GaussianBelief::new(wrap_pi(mu), sigma0)
}

pub fn init_tilt(reading: &AdcReading, obs: &TiltObservationModel, sigma0: f64) -> Result<GaussianBelief> {
    let v = reading.count as f64;
    if !reading.available || !obs.model().v_window().contains(v) {
        return Err(Error::Initialization(format!(
            "tilt count {:?} is outside the calibrated window",
            reading.value()
        )));
    }
    GaussianBelief::new(obs.model().eval(v), sigma0)
}

/// `μ̄ = μ + G·u`, `Σ̄ = Σ + U²·Q`. No wrapping.
pub fn predict(belief: &GaussianBelief, u: f64, tm: &TransitionModel) -> GaussianBelief {
    GaussianBelief {
        mu: belief.mu + tm.g() * u,
        sigma: belief.sigma + tm.u_gain() * tm.u_gain() * tm.q,
    }
}

/// Converted measurements from every wiper whose count is strictly inside
/// its valid range.
pub fn extract_features(readings: &[AdcReading; 2], obs: &WheelObservationModel) -> Features {
    let mut out = Features::new();
    for wiper in Wiper::BOTH {
        let reading = readings[wiper.index()];
        if reading.available && obs.range(wiper).contains(reading.count) {
            out.push(Feature { wiper, z: obs.model(wiper).eval(reading.count as f64), r: obs.r(wiper) });
        }
    }
    out
}

/// The shifted state `xⁱ` a wiper should report when the joint is at
/// `mu_bar`.
pub fn predicted_feature_measurement(mu_bar: f64, wiper: Wiper, geometry: &WheelGeometry) -> f64 {
    geometry.shifted_state(mu_bar, wiper)
}

/// `z − z̄`, taken the short way round.
///
/// Both terms live in the same shifted chart, so this is a plain difference
/// except when the predicted and true angles straddle a shift point and
/// disagree by nearly 2π.
fn innovation(z: f64, z_bar: f64) -> f64 {
    let d = z - z_bar;
    if d.abs() > std::f64::consts::PI {
        wrap_pi(d)
    } else {
        d
    }
}

/// Measurement update with zero, one or two converted features.
///
/// Two features use the stacked model `C = [1, 1]ᵀ`, `R = diag(r⁰, r¹)`.
/// The result is not wrapped; see [`wrap_wheel_belief`].
pub fn update_wheel(belief_bar: &GaussianBelief, features: &[Feature], geometry: &WheelGeometry) -> Result<GaussianBelief> {
    let s_bar = belief_bar.sigma;
    let mu_bar = belief_bar.mu;
    let innov = |f: &Feature| innovation(f.z, predicted_feature_measurement(mu_bar, f.wiper, geometry));
    match features {
        [] => Ok(*belief_bar),
        [f] => {
            let s = s_bar + f.r;
            if s.is_nan() || s <= 0.0 {
                return Err(Error::Numerical(format!("innovation covariance {s}")));
            }
            let gain = s_bar / s;
            Ok(GaussianBelief { mu: mu_bar + gain * innov(f), sigma: s_bar * f.r / s })
        }
        [f0, f1] => {
            // S = C Σ̄ Cᵀ + R
            let s = [[s_bar + f0.r, s_bar], [s_bar, s_bar + f1.r]];
            let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
            if det.is_nan() || det <= 0.0 {
                return Err(Error::Numerical(format!("innovation covariance determinant {det}")));
            }
            let s_inv = [[s[1][1] / det, -s[0][1] / det], [-s[1][0] / det, s[0][0] / det]];
            // K = Σ̄ Cᵀ S⁻¹, a 1×2 row.
            let gain = [s_bar * (s_inv[0][0] + s_inv[1][0]), s_bar * (s_inv[0][1] + s_inv[1][1])];
            let mu = mu_bar + gain[0] * innov(f0) + gain[1] * innov(f1);
            // Σ̄ − K C Σ̄ = Σ̄ (1 − Σ̄ (r⁰ + r¹)/det) = Σ̄ r⁰ r¹ / det, written
            // without the cancellation.
            let sigma = s_bar * f0.r * f1.r / det;
            Ok(GaussianBelief { mu, sigma })
        }
        _ => Err(Error::Numerical(format!("{} features supplied, at most two expected", features.len()))),
    }
}

pub fn wrap_wheel_belief(belief: &GaussianBelief) -> GaussianBelief {
    GaussianBelief { mu: wrap_pi(belief.mu), sigma: belief.sigma }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltUpdate {
    pub belief: GaussianBelief,
    /// The reading was unusable and the prediction was passed through.
    pub rejected: bool,
}

/// `K = Σ̄/(Σ̄ + R)`, `μ = μ̄ + K(z − μ̄)`, `Σ = Σ̄ − KΣ̄` with `z = f(V₀)`.
pub fn update_tilt(belief_bar: &GaussianBelief, reading: &AdcReading, obs: &TiltObservationModel) -> TiltUpdate {
    let v = reading.count as f64;
    if !reading.available || !obs.model().v_window().contains(v) {
        return TiltUpdate { belief: *belief_bar, rejected: true };
    }
    let z = obs.model().eval(v);
    let s = belief_bar.sigma + obs.r();
    let gain = belief_bar.sigma / s;
    TiltUpdate {
        belief: GaussianBelief {
            mu: belief_bar.mu + gain * (z - belief_bar.mu),
            sigma: belief_bar.sigma * obs.r() / s,
        },
        rejected: false,
    }
}

/// Noise and initialization settings shared by both filters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterTuning {
    pub k: f64,
    pub q: f64,
    pub sigma0: f64,
}

/// Result of one filter step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub belief: GaussianBelief,
    /// Which features (wheel) or reading (tilt) were used in the update.
    pub used: [bool; 2],
}

/// Running wheel estimator.
#[derive(Debug, Clone)]
pub struct WheelFilter {
    obs: WheelObservationModel,
    tuning: FilterTuning,
    belief: GaussianBelief,
}

impl WheelFilter {
    pub fn new(obs: WheelObservationModel, tuning: FilterTuning, first: &[AdcReading; 2]) -> Result<Self> {
        let belief = init_wheel(first, &obs, tuning.sigma0)?;
        Ok(Self { obs, tuning, belief })
    }

    pub fn belief(&self) -> GaussianBelief {
        self.belief
    }

    /// Predict with the motor speed applied over the last `dt` seconds, then
    /// fuse whatever features the new readings provide.
    pub fn step(&mut self, u: f64, dt: f64, readings: &[AdcReading; 2]) -> Result<StepOutcome> {
        let tm = TransitionModel::new(self.tuning.k, dt, self.tuning.q)?;
        let predicted = predict(&self.belief, u, &tm);
        let features = extract_features(readings, &self.obs);
        let updated = update_wheel(&predicted, &features, self.obs.geometry())?;
        self.belief = wrap_wheel_belief(&updated);
        let mut used = [false; 2];
        for f in &features {
            used[f.wiper.index()] = true;
        }
        Ok(StepOutcome { belief: self.belief, used })
    }
}

/// Running tilt estimator.
#[derive(Debug, Clone)]
pub struct TiltFilter {
    obs: TiltObservationModel,
    tuning: FilterTuning,
    belief: GaussianBelief,
}

impl TiltFilter {
    pub fn new(obs: TiltObservationModel, tuning: FilterTuning, first: &AdcReading) -> Result<Self> {
        let belief = init_tilt(first, &obs, tuning.sigma0)?;
        Ok(Self { obs, tuning, belief })
    }

    pub fn belief(&self) -> GaussianBelief {
        self.belief
    }

    pub fn step(&mut self, u: f64, dt: f64, reading: &AdcReading) -> Result<StepOutcome> {
        let tm = TransitionModel::new(self.tuning.k, dt, self.tuning.q)?;
        let predicted = predict(&self.belief, u, &tm);
        let update = update_tilt(&predicted, reading, &self.obs);
        self.belief = update.belief;
        Ok(StepOutcome { belief: self.belief, used: [!update.rejected, false] })
    }
}
