//! Closed-loop tracking experiments.
//!
//! A rest-to-rest quintic reference is tracked by a feedforward plus
//! proportional velocity controller that acts on the filter estimate. The
//! loop runs against the simulated plant and sensor, one step per tick:
//! reference → command → plant → ADC → predict → update → log.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::angle::{angdiff, wrap_pi};
use crate::bundle::ModelBundle;
use crate::characterize::{calibrate, synthesize_sweep};
use crate::error::{Error, Result};
use crate::estimate::{FilterTuning, TiltFilter, WheelFilter};
use crate::sensor_sim::{read_tilt, read_wheel, simulate_plant_step, AdcReading, DofKind, SensorSpec, WheelGeometry};

/// `p(τ) = Σ aᵢ τⁱ` with normalized time `τ = t / t_total`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuinticTrajectory {
    pub coeffs: [f64; 6],
    pub t_total: f64,
    pub x0: f64,
    pub xf: f64,
}

/// Rest-to-rest quintic from `x0` to `xf`: zero velocity and acceleration at
/// both ends.
pub fn plan_quintic(x0: f64, xf: f64, t_total: f64) -> Result<QuinticTrajectory> {
    if !(t_total > 0.0 && t_total.is_finite()) {
        return Err(Error::Config(format!("trajectory duration must be positive, got {t_total}")));
    }
    let d = xf - x0;
    Ok(QuinticTrajectory { coeffs: [x0, 0.0, 0.0, 10.0 * d, -15.0 * d, 6.0 * d], t_total, x0, xf })
}

impl QuinticTrajectory {
    /// Position and velocity at time `t`, clamped to the trajectory's span.
    pub fn sample(&self, t: f64) -> (f64, f64) {
        if t <= 0.0 {
            return (self.x0, 0.0);
        }
        if t >= self.t_total {
            return (self.xf, 0.0);
        }
        let tau = t / self.t_total;
        let a = &self.coeffs;
        let pos = a.iter().rev().fold(0.0, |acc, c| acc * tau + c);
        let dpos = (1..6).rev().fold(0.0, |acc, i| acc * tau + i as f64 * a[i]);
        (pos, dpos / self.t_total)
    }

    /// Acceleration at time `t`, for boundary checks.
    pub fn acceleration(&self, t: f64) -> f64 {
        let tau = (t / self.t_total).clamp(0.0, 1.0);
        let a = &self.coeffs;
        let dd = (2..6).rev().fold(0.0, |acc, i| acc * tau + (i * (i - 1)) as f64 * a[i]);
        dd / (self.t_total * self.t_total)
    }
}

pub fn sample(traj: &QuinticTrajectory, t: f64) -> (f64, f64) {
    traj.sample(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlGains {
    pub kp: f64,
    pub omega_max: f64,
}

impl Default for ControlGains {
    fn default() -> Self {
        Self { kp: 4.0, omega_max: 10.0 }
    }
}

/// Motor speed `ω = (v_ref + kp·e)/k`, saturated at `±omega_max`.
///
/// Wheel position errors are taken the short way round the circle.
pub fn control_step(est_mu: f64, ref_pos: f64, ref_vel: f64, gains: &ControlGains, k: f64, kind: DofKind) -> f64 {
    let error = match kind {
        DofKind::Wheel => angdiff(ref_pos, est_mu),
        DofKind::Tilt => ref_pos - est_mu,
    };
    let omega = (ref_vel + gains.kp * error) / k;
    omega.clamp(-gains.omega_max, gains.omega_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub rate_hz: f64,
    pub duration_s: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self { rate_hz: 14.0, duration_s: 50.0 }
    }
}

/// True plant parameters; may differ from what the filter assumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantSettings {
    pub k: f64,
    pub q_true: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSettings {
    pub k: f64,
    pub q: f64,
    pub sigma0: f64,
    /// Overrides the residual-derived measurement variances.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySettings {
    pub x0: f64,
    pub xf: f64,
    pub duration_s: f64,
    pub rate_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub sensor: SensorSpec,
    /// Pre-computed calibration. When absent, the sensor is characterized
    /// from a simulated sweep first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub models: Option<ModelBundle>,
    #[serde(default)]
    pub calibration: SweepSettings,
    pub plant: PlantSettings,
    pub filter: FilterSettings,
    #[serde(default)]
    pub control: ControlGains,
    pub trajectory: TrajectorySettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub t: f64,
    pub theta_true: f64,
    pub theta_est: f64,
    pub theta_ref: f64,
    pub u_cmd: f64,
    pub f0_avail: bool,
    pub f1_avail: bool,
}

/// Raw sensor log of an experiment, replayable through the estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadingRow {
    pub t: f64,
    pub v0: Option<u32>,
    pub v1: Option<u32>,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub kind: DofKind,
    pub rows: Vec<ExperimentRow>,
    pub readings: Vec<ReadingRow>,
    pub bundle: ModelBundle,
    pub avg_abs_error: f64,
    pub max_abs_error: f64,
}

enum Loop {
    Wheel(WheelFilter),
    Tilt(TiltFilter),
}

fn tracking_error(kind: DofKind, est: f64, reference: f64) -> f64 {
    match kind {
        DofKind::Wheel => angdiff(est, reference).abs(),
        DofKind::Tilt => (est - reference).abs(),
    }
}

/// Runs one tracking experiment. Deterministic for a given config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let kind = config.sensor.kind();
    let ts = config.trajectory;
    if !(ts.rate_hz > 0.0 && ts.rate_hz.is_finite()) {
        return Err(Error::Config(format!("loop rate must be positive, got {}", ts.rate_hz)));
    }
    if config.filter.k == 0.0 || !config.filter.k.is_finite() {
        return Err(Error::Config("filter transmission ratio must be non-zero".into()));
    }
    let traj = plan_quintic(ts.x0, ts.xf, ts.duration_s)?;
    let dt = 1.0 / ts.rate_hz;
    let steps = (ts.duration_s * ts.rate_hz).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let geometry = match &config.sensor {
        SensorSpec::Wheel(w) => *w.geometry(),
        SensorSpec::Tilt(_) => WheelGeometry::default(),
    };
    let mut bundle = match &config.models {
        Some(b) => b.clone(),
        None => {
            let sweep = synthesize_sweep(&config.sensor, config.calibration.rate_hz, config.calibration.duration_s, &mut rng)?;
            let cal = calibrate(&sweep, &geometry)?;
            ModelBundle::from_calibration(&cal, &geometry, config.filter.k, dt)
        }
    };
    if bundle.sensor_kind != kind {
        return Err(Error::Config(format!(
            "model bundle is for a {:?} sensor but the experiment drives a {:?} joint",
            bundle.sensor_kind, kind
        )));
    }
    bundle.filter.k = config.filter.k;
    bundle.filter.dt = dt;
    bundle.filter.q = config.filter.q;
    bundle.filter.sigma0 = config.filter.sigma0;
    if let Some(r) = &config.filter.r {
        bundle.filter.r = r.clone();
    }
    let tuning = FilterTuning { k: config.filter.k, q: config.filter.q, sigma0: config.filter.sigma0 };

    let mut theta = match kind {
        DofKind::Wheel => wrap_pi(ts.x0),
        DofKind::Tilt => ts.x0,
    };
    let read = |theta: f64, rng: &mut ChaCha8Rng| -> Result<[AdcReading; 2]> {
        match &config.sensor {
            SensorSpec::Wheel(w) => read_wheel(theta, w, rng),
            SensorSpec::Tilt(s) => {
                let r = read_tilt(theta, s, rng)?;
                Ok([r, AdcReading::unavailable(crate::sensor_sim::Wiper::One)])
            }
        }
    };

    let first = read(theta, &mut rng)?;
    let (mut filter, mut used) = match kind {
        DofKind::Wheel => {
            let obs = bundle.wheel_observation()?;
            let feats = crate::estimate::extract_features(&first, &obs);
            let mut used = [false; 2];
            for f in &feats {
                used[f.wiper.index()] = true;
            }
            (Loop::Wheel(WheelFilter::new(obs, tuning, &first)?), used)
        }
        DofKind::Tilt => (Loop::Tilt(TiltFilter::new(bundle.tilt_observation()?, tuning, &first[0])?), [true, false]),
    };
    let mut readings_now = first;

    let mut rows = Vec::with_capacity(steps + 1);
    let mut readings = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = i as f64 * dt;
        let (ref_pos, ref_vel) = traj.sample(t);
        let est = match &filter {
            Loop::Wheel(f) => f.belief().mu,
            Loop::Tilt(f) => f.belief().mu,
        };
        let u = if i < steps { control_step(est, ref_pos, ref_vel, &config.control, config.filter.k, kind) } else { 0.0 };
        rows.push(ExperimentRow {
            t,
            theta_true: theta,
            theta_est: est,
            theta_ref: ref_pos,
            u_cmd: u,
            f0_avail: used[0],
            f1_avail: used[1],
        });
        readings.push(ReadingRow { t, v0: readings_now[0].value(), v1: readings_now[1].value(), omega: u });
        if i == steps {
            break;
        }
        theta = simulate_plant_step(theta, u, config.plant.k, dt, config.plant.q_true, kind, &mut rng).theta;
        readings_now = read(theta, &mut rng)?;
        let outcome = match &mut filter {
            Loop::Wheel(f) => f.step(u, dt, &readings_now)?,
            Loop::Tilt(f) => f.step(u, dt, &readings_now[0])?,
        };
        used = outcome.used;
    }

    let errors: Vec<f64> = rows.iter().map(|r| tracking_error(kind, r.theta_est, r.theta_ref)).collect();
    let avg_abs_error = errors.iter().sum::<f64>() / errors.len() as f64;
    let max_abs_error = errors.iter().copied().fold(0.0, f64::max);
    Ok(ExperimentResult { kind, rows, readings, bundle, avg_abs_error, max_abs_error })
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Trace CSV: `t,theta_true,theta_est,theta_ref,u_cmd,f0_avail,f1_avail`.
pub fn write_trace<W: Write>(result: &ExperimentResult, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["t", "theta_true", "theta_est", "theta_ref", "u_cmd", "f0_avail", "f1_avail"])?;
    for r in &result.rows {
        w.write_record([
            r.t.to_string(),
            r.theta_true.to_string(),
            r.theta_est.to_string(),
            r.theta_ref.to_string(),
            r.u_cmd.to_string(),
            flag(r.f0_avail).to_string(),
            flag(r.f1_avail).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Readings CSV: `t,v0,v1,omega` (wheel) or `t,v0,omega` (tilt). A blank
/// count means the wiper was in its gap.
pub fn write_readings<W: Write>(result: &ExperimentResult, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let cell = |v: Option<u32>| v.map(|c| c.to_string()).unwrap_or_default();
    match result.kind {
        DofKind::Wheel => w.write_record(["t", "v0", "v1", "omega"])?,
        DofKind::Tilt => w.write_record(["t", "v0", "omega"])?,
    }
    for r in &result.readings {
        match result.kind {
            DofKind::Wheel => w.write_record([r.t.to_string(), cell(r.v0), cell(r.v1), r.omega.to_string()])?,
            DofKind::Tilt => w.write_record([r.t.to_string(), cell(r.v0), r.omega.to_string()])?,
        }
    }
    w.flush()?;
    Ok(())
}

/// Bundled experiment configurations.
pub mod presets {
    use super::*;

    pub const NAMES: [&str; 3] = ["pan_pi_to_0", "pan_negpi_to_0", "tilt_sweep"];

    pub fn source(name: &str) -> Option<&'static str> {
        match name {
            "pan_pi_to_0" => Some(include_str!("../configs/pan_pi_to_0.json")),
            "pan_negpi_to_0" => Some(include_str!("../configs/pan_negpi_to_0.json")),
            "tilt_sweep" => Some(include_str!("../configs/tilt_sweep.json")),
            _ => None,
        }
    }

    pub fn load(name: &str) -> Result<ExperimentConfig> {
        let text = source(name).ok_or_else(|| Error::Config(format!("no bundled experiment named {name:?}")))?;
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensor_sim::{TiltSensorSpec, WheelSensorSpec};
    use std::f64::consts::PI;

    #[test]
    fn null_motion_has_zero_coefficients() {
        let q = plan_quintic(0.0, 0.0, 2.0).unwrap();
        assert_eq!(q.coeffs, [0.0; 6]);
    }

    #[test]
    fn unit_quintic_coefficients() {
        let q = plan_quintic(0.0, 1.0, 1.0).unwrap();
        assert_eq!(q.coeffs, [0.0, 0.0, 0.0, 10.0, -15.0, 6.0]);
        let (p, v) = q.sample(0.5);
        assert!((p - 0.5).abs() < 1e-15);
        assert!((v - 1.875).abs() < 1e-15);
        assert_eq!(q.sample(0.0), (0.0, 0.0));
        assert_eq!(q.sample(1.0), (1.0, 0.0));
        assert_eq!(q.sample(7.0), (1.0, 0.0));
        assert!(plan_quintic(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn midpoint_is_average() {
        let q = plan_quintic(-1.3, 1.3, 5.0).unwrap();
        assert!(q.sample(2.5).0.abs() < 1e-12);
    }

    #[test]
    fn control_examples() {
        let g = ControlGains { kp: 2.0, omega_max: 10.0 };
        assert_eq!(control_step(0.3, 0.3, 0.0, &g, 0.5, DofKind::Tilt), 0.0);
        assert!((control_step(0.0, 0.1, 0.0, &g, 0.5, DofKind::Tilt) - 0.4).abs() < 1e-15);
        let w = control_step(0.95 * PI, -0.95 * PI, 0.0, &ControlGains { kp: 1.0, omega_max: 10.0 }, 1.0, DofKind::Wheel);
        assert!((w - 0.1 * PI).abs() < 1e-12);
        assert_eq!(control_step(0.0, 1.0, 0.0, &g, 0.01, DofKind::Tilt), 10.0);
    }

    fn ideal_config(sensor: SensorSpec, x0: f64, xf: f64) -> ExperimentConfig {
        ExperimentConfig {
            name: "ideal".into(),
            seed: 1,
            sensor,
            models: None,
            calibration: SweepSettings { rate_hz: 100.0, duration_s: 50.0 },
            plant: PlantSettings { k: 0.25, q_true: 0.0 },
            filter: FilterSettings { k: 0.25, q: 0.05, sigma0: 1e-4, r: None },
            control: ControlGains::default(),
            trajectory: TrajectorySettings { x0, xf, duration_s: 5.0, rate_hz: 100.0 },
        }
    }

    #[test]
    fn zero_noise_pan_tracks_closely() {
        let sensor = SensorSpec::Wheel(WheelSensorSpec::reference().with_noise_std(0.0).unwrap());
        let result = run_experiment(&ideal_config(sensor, PI, 0.0)).unwrap();
        assert!(result.avg_abs_error < 0.01, "avg error {}", result.avg_abs_error);
        assert_eq!(result.rows.len(), 501);
    }

    #[test]
    fn zero_noise_tilt_tracks_closely() {
        let sensor = SensorSpec::Tilt(TiltSensorSpec::reference().with_noise_std(0.0).unwrap());
        let result = run_experiment(&ideal_config(sensor, -1.3, 1.3)).unwrap();
        assert!(result.avg_abs_error < 0.01, "avg error {}", result.avg_abs_error);
    }

    #[test]
    fn mismatched_bundle_is_rejected() {
        let tilt = ideal_config(SensorSpec::Tilt(TiltSensorSpec::reference()), 0.0, 1.0);
        let tilt_bundle = run_experiment(&tilt).unwrap().bundle;
        let mut wheel = ideal_config(SensorSpec::Wheel(WheelSensorSpec::reference()), 0.0, 1.0);
        wheel.models = Some(tilt_bundle);
        assert!(matches!(run_experiment(&wheel), Err(Error::Config(_))));
    }

    #[test]
    fn presets_parse() {
        for name in presets::NAMES {
            let cfg = presets::load(name).unwrap();
            assert_eq!(cfg.name, name);
        }
        assert!(presets::load("nope").is_err());
    }

    #[test]
    fn identical_seeds_give_identical_runs() {
        let cfg = presets::load("pan_pi_to_0").unwrap();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a, b);
    }
}
