//! Ground-truth plant and ADC model for wheel and tilt PaintPots.
//!
//! A wheel sensor has two wipers. Each wiper crosses the V-shaped gap in the
//! track over a closed interval of joint angle, and its reading there is
//! garbage. Outside the gap a wiper's voltage follows a "shifted" truth curve:
//! wiper 0 sees `θ − 2π` once the joint has passed the top of its gap, wiper 1
//! sees `θ + 2π` below the bottom of its gap, so that each curve is continuous.
//!
//! A tilt sensor has one wiper that is always on the track over `[−π/2, π/2]`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::angle::{wrap_pi, ClosedInterval};
use crate::cubic::{reference, CubicModel};
use crate::decimal;
use crate::error::{Error, Result};

pub const DEFAULT_ADC_MAX: u32 = 1023;
pub const DEFAULT_NOISE_STD: f64 = 1.0;

/// Which wiper of a wheel sensor a reading came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Wiper {
    Zero,
    One,
}

impl Wiper {
    pub const BOTH: [Wiper; 2] = [Wiper::Zero, Wiper::One];

    pub fn index(self) -> usize {
        match self {
            Wiper::Zero => 0,
            Wiper::One => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DofKind {
    Wheel,
    Tilt,
}

/// Gap intervals of a wheel track, in joint angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WheelGeometry {
    pub gap_w0: ClosedInterval,
    pub gap_w1: ClosedInterval,
}

impl Default for WheelGeometry {
    fn default() -> Self {
        Self {
            gap_w0: ClosedInterval::new(2.0 * PI / 3.0, 5.0 * PI / 6.0),
            gap_w1: ClosedInterval::new(-5.0 * PI / 6.0, -2.0 * PI / 3.0),
        }
    }
}

impl WheelGeometry {
    pub fn validate(&self) -> Result<()> {
        let (g0, g1) = (self.gap_w0, self.gap_w1);
        if !(g0.lo > 0.0 && g0.hi < PI && g0.lo < g0.hi) {
            return Err(Error::Config(format!("wiper-0 gap [{}, {}] must lie inside (0, π)", g0.lo, g0.hi)));
        }
        if !(g1.lo > -PI && g1.hi < 0.0 && g1.lo < g1.hi) {
            return Err(Error::Config(format!("wiper-1 gap [{}, {}] must lie inside (−π, 0)", g1.lo, g1.hi)));
        }
        Ok(())
    }

    pub fn gap(&self, wiper: Wiper) -> ClosedInterval {
        match wiper {
            Wiper::Zero => self.gap_w0,
            Wiper::One => self.gap_w1,
        }
    }

    /// The per-wiper shifted state for a joint angle in (−π, π].
    pub fn shifted_state(&self, theta: f64, wiper: Wiper) -> f64 {
        match wiper {
            Wiper::Zero if theta > self.gap_w0.hi => theta - TAU,
            Wiper::One if theta < self.gap_w1.lo => theta + TAU,
            _ => theta,
        }
    }

    /// Shifted-angle interval a wiper reports outside its gap: from the top
    /// of the gap around to the bottom of the gap.
    pub fn shifted_span(&self, wiper: Wiper) -> (f64, f64) {
        match wiper {
            Wiper::Zero => (self.gap_w0.hi - TAU, self.gap_w0.lo),
            Wiper::One => (self.gap_w1.hi, self.gap_w1.lo + TAU),
        }
    }
}

fn validate_adc_max(adc_max: u32) -> Result<()> {
    if adc_max == 0 || (adc_max & (adc_max.wrapping_add(1))) != 0 {
        return Err(Error::Config(format!("adc_max {adc_max} is not 2^b − 1")));
    }
    Ok(())
}

fn validate_noise(noise_std: f64) -> Result<()> {
    if !(noise_std.is_finite() && noise_std >= 0.0) {
        return Err(Error::Config(format!("noise_std {noise_std} must be finite and ≥ 0")));
    }
    Ok(())
}

fn covers(model: &CubicModel, lo: f64, hi: f64, what: &str) -> Result<()> {
    let (a, b) = model.angle_range();
    if a > lo || b < hi {
        return Err(Error::Config(format!(
            "{what} truth curve spans [{a}, {b}] rad but must cover [{lo}, {hi}]"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawWheelSpec {
    #[serde(flatten)]
    geometry: WheelGeometry,
    adc_max: u32,
    #[serde(with = "decimal")]
    noise_std: f64,
    truth_w0: CubicModel,
    truth_w1: CubicModel,
}

/// Wheel sensor: gap geometry, ADC depth, noise and ground-truth curves.
///
/// The joint angle lives in (−π, π].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWheelSpec", into = "RawWheelSpec")]
pub struct WheelSensorSpec {
    geometry: WheelGeometry,
    adc_max: u32,
    noise_std: f64,
    truth: [CubicModel; 2],
}

impl TryFrom<RawWheelSpec> for WheelSensorSpec {
    type Error = Error;

    fn try_from(raw: RawWheelSpec) -> Result<Self> {
        WheelSensorSpec::new(raw.geometry, raw.adc_max, raw.noise_std, raw.truth_w0, raw.truth_w1)
    }
}

impl From<WheelSensorSpec> for RawWheelSpec {
    fn from(s: WheelSensorSpec) -> Self {
        RawWheelSpec {
            geometry: s.geometry,
            adc_max: s.adc_max,
            noise_std: s.noise_std,
            truth_w0: s.truth[0],
            truth_w1: s.truth[1],
        }
    }
}

impl WheelSensorSpec {
    pub fn new(
        geometry: WheelGeometry,
        adc_max: u32,
        noise_std: f64,
        truth_w0: CubicModel,
        truth_w1: CubicModel,
    ) -> Result<Self> {
        geometry.validate()?;
        validate_adc_max(adc_max)?;
        validate_noise(noise_std)?;
        for (wiper, model) in Wiper::BOTH.into_iter().zip([&truth_w0, &truth_w1]) {
            let (lo, hi) = geometry.shifted_span(wiper);
            covers(model, lo, hi, &format!("wiper-{}", wiper.index()))?;
            let w = model.v_window();
            if w.lo < 0.0 || w.hi > adc_max as f64 {
                return Err(Error::Config(format!("wiper-{} truth window exceeds [0, {adc_max}]", wiper.index())));
            }
        }
        Ok(Self { geometry, adc_max, noise_std, truth: [truth_w0, truth_w1] })
    }

    /// Reference wheel with the published wiper curves and 1-count noise.
    pub fn reference() -> Self {
        Self::new(
            WheelGeometry::default(),
            DEFAULT_ADC_MAX,
            DEFAULT_NOISE_STD,
            reference::full_scale(reference::WHEEL_WIPER0),
            reference::full_scale(reference::WHEEL_WIPER1),
        )
        .expect("reference wheel spec is valid")
    }

    pub fn with_noise_std(mut self, noise_std: f64) -> Result<Self> {
        validate_noise(noise_std)?;
        self.noise_std = noise_std;
        Ok(self)
    }

    pub fn geometry(&self) -> &WheelGeometry {
        &self.geometry
    }

    pub fn adc_max(&self) -> u32 {
        self.adc_max
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    pub fn truth(&self, wiper: Wiper) -> &CubicModel {
        &self.truth[wiper.index()]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawTiltSpec {
    adc_max: u32,
    #[serde(with = "decimal")]
    noise_std: f64,
    truth: CubicModel,
}

/// Tilt sensor: ADC depth, noise and ground-truth curve over [−π/2, π/2].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTiltSpec", into = "RawTiltSpec")]
pub struct TiltSensorSpec {
    adc_max: u32,
    noise_std: f64,
    truth: CubicModel,
}

impl TryFrom<RawTiltSpec> for TiltSensorSpec {
    type Error = Error;

    fn try_from(raw: RawTiltSpec) -> Result<Self> {
        TiltSensorSpec::new(raw.adc_max, raw.noise_std, raw.truth)
    }
}

impl From<TiltSensorSpec> for RawTiltSpec {
    fn from(s: TiltSensorSpec) -> Self {
        RawTiltSpec { adc_max: s.adc_max, noise_std: s.noise_std, truth: s.truth }
    }
}

impl TiltSensorSpec {
    pub const RANGE: ClosedInterval = ClosedInterval::new(-FRAC_PI_2, FRAC_PI_2);

    pub fn new(adc_max: u32, noise_std: f64, truth: CubicModel) -> Result<Self> {
        validate_adc_max(adc_max)?;
        validate_noise(noise_std)?;
        covers(&truth, -FRAC_PI_2, FRAC_PI_2, "tilt")?;
        let w = truth.v_window();
        if w.lo < 0.0 || w.hi > adc_max as f64 {
            return Err(Error::Config(format!("tilt truth window exceeds [0, {adc_max}]")));
        }
        Ok(Self { adc_max, noise_std, truth })
    }

    pub fn reference() -> Self {
        Self::new(DEFAULT_ADC_MAX, DEFAULT_NOISE_STD, reference::full_scale(reference::TILT))
            .expect("reference tilt spec is valid")
    }

    pub fn with_noise_std(mut self, noise_std: f64) -> Result<Self> {
        validate_noise(noise_std)?;
        self.noise_std = noise_std;
        Ok(self)
    }

    pub fn adc_max(&self) -> u32 {
        self.adc_max
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    pub fn truth(&self) -> &CubicModel {
        &self.truth
    }
}

/// Either kind of sensor, tagged by `kind` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SensorSpec {
    Wheel(WheelSensorSpec),
    Tilt(TiltSensorSpec),
}

impl SensorSpec {
    pub fn kind(&self) -> DofKind {
        match self {
            SensorSpec::Wheel(_) => DofKind::Wheel,
            SensorSpec::Tilt(_) => DofKind::Tilt,
        }
    }

    pub fn adc_max(&self) -> u32 {
        match self {
            SensorSpec::Wheel(s) => s.adc_max(),
            SensorSpec::Tilt(s) => s.adc_max(),
        }
    }
}

/// One ADC sample. When `available` is false the wiper is in its gap and
/// `count` carries no information.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdcReading {
    pub wiper: Wiper,
    pub count: u32,
    pub available: bool,
}

impl AdcReading {
    pub fn valid(wiper: Wiper, count: u32) -> Self {
        Self { wiper, count, available: true }
    }

    pub fn unavailable(wiper: Wiper) -> Self {
        Self { wiper, count: 0, available: false }
    }

    /// The count, if the wiper was on the track.
    pub fn value(&self) -> Option<u32> {
        self.available.then_some(self.count)
    }
}

fn canonical_wheel_angle(theta: f64) -> Result<f64> {
    if theta == -PI {
        return Ok(PI);
    }
    if !(theta > -PI && theta <= PI) {
        return Err(Error::AngleOutOfRange { angle: theta, range: "(−π, π]" });
    }
    Ok(theta)
}

/// Noiseless continuous voltage of a wheel wiper, or `None` inside its gap.
pub fn wheel_ideal_voltage(theta: f64, wiper: Wiper, spec: &WheelSensorSpec) -> Result<Option<f64>> {
    let theta = canonical_wheel_angle(theta)?;
    let geometry = spec.geometry();
    if geometry.gap(wiper).contains(theta) {
        return Ok(None);
    }
    let shifted = geometry.shifted_state(theta, wiper);
    spec.truth(wiper).invert(shifted).map(Some)
}

/// Noiseless continuous voltage of the tilt wiper.
pub fn tilt_ideal_voltage(theta: f64, spec: &TiltSensorSpec) -> Result<f64> {
    if !TiltSensorSpec::RANGE.contains(theta) {
        return Err(Error::AngleOutOfRange { angle: theta, range: "[−π/2, π/2]" });
    }
    spec.truth().invert(theta)
}

/// Adds Gaussian noise in counts, rounds half away from zero and clamps to
/// `[0, adc_max]`.
pub fn quantize<R: Rng + ?Sized>(voltage: f64, noise_std: f64, rng: &mut R, adc_max: u32) -> u32 {
    let noisy = if noise_std > 0.0 {
        let normal = Normal::new(0.0, noise_std).expect("noise_std is finite and positive");
        voltage + normal.sample(rng)
    } else {
        voltage
    };
    // `as` saturates and maps NaN to 0.
    noisy.round().clamp(0.0, adc_max as f64) as u32
}

/// Both wiper readings of a wheel sensor at joint angle `theta`.
pub fn read_wheel<R: Rng + ?Sized>(theta: f64, spec: &WheelSensorSpec, rng: &mut R) -> Result<[AdcReading; 2]> {
    let mut out = [AdcReading::unavailable(Wiper::Zero), AdcReading::unavailable(Wiper::One)];
    for wiper in Wiper::BOTH {
        if let Some(v) = wheel_ideal_voltage(theta, wiper, spec)? {
            let count = quantize(v, spec.noise_std(), rng, spec.adc_max());
            out[wiper.index()] = AdcReading::valid(wiper, count);
        }
    }
    Ok(out)
}

pub fn read_tilt<R: Rng + ?Sized>(theta: f64, spec: &TiltSensorSpec, rng: &mut R) -> Result<AdcReading> {
    let v = tilt_ideal_voltage(theta, spec)?;
    Ok(AdcReading::valid(Wiper::Zero, quantize(v, spec.noise_std(), rng, spec.adc_max())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantStep {
    pub theta: f64,
    /// Tilt only: the joint hit a mechanical stop during this step.
    pub saturated: bool,
}

/// Euler step of `θ̇ = kω + n`, `n ~ N(0, q_true)`.
///
/// Wheel angles wrap into (−π, π]; tilt angles clamp at ±π/2.
#[allow(clippy::too_many_arguments)]
pub fn simulate_plant_step<R: Rng + ?Sized>(
    theta: f64,
    omega: f64,
    k: f64,
    dt: f64,
    q_true: f64,
    kind: DofKind,
    rng: &mut R,
) -> PlantStep {
    let noise = if q_true > 0.0 {
        Normal::new(0.0, q_true.sqrt()).expect("q_true is finite and positive").sample(rng)
    } else {
        0.0
    };
    let next = theta + k * omega * dt + noise * dt;
    match kind {
        DofKind::Wheel => PlantStep { theta: wrap_pi(next), saturated: false },
        DofKind::Tilt => {
            let clamped = next.clamp(-FRAC_PI_2, FRAC_PI_2);
            PlantStep { theta: clamped, saturated: clamped != next }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubic::VoltageWindow;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn linear_wheel() -> WheelSensorSpec {
        let window = VoltageWindow::new(0.0, 1023.0).unwrap();
        // Linear curves covering more than the shifted spans.
        let m0 = CubicModel::new([0.0, 0.0, 2.0 * PI / 1023.0 * 1.2, -1.25 * PI], window).unwrap();
        let m1 = CubicModel::new([0.0, 0.0, 2.0 * PI / 1023.0 * 1.2, -0.95 * PI], window).unwrap();
        WheelSensorSpec::new(WheelGeometry::default(), 1023, 0.0, m0, m1).unwrap()
    }

    fn linear_tilt() -> TiltSensorSpec {
        let window = VoltageWindow::new(0.0, 1023.0).unwrap();
        let m = CubicModel::new([0.0, 0.0, PI / 1023.0, -FRAC_PI_2], window).unwrap();
        TiltSensorSpec::new(1023, 0.0, m).unwrap()
    }

    #[test]
    fn wiper0_unavailable_in_its_gap() {
        let spec = WheelSensorSpec::reference();
        assert_eq!(wheel_ideal_voltage(0.75 * PI, Wiper::Zero, &spec).unwrap(), None);
        assert!(wheel_ideal_voltage(0.75 * PI, Wiper::One, &spec).unwrap().is_some());
    }

    #[test]
    fn linear_wheel_midscale() {
        let window = VoltageWindow::new(0.0, 1023.0).unwrap();
        let m = CubicModel::new([0.0, 0.0, 2.0 * PI / 1023.0, -PI], window).unwrap();
        assert!((m.invert(0.0).unwrap() - 511.5).abs() < 1e-6);
    }

    #[test]
    fn reference_wheel_zero_angle_voltage() {
        let spec = WheelSensorSpec::reference();
        let v = wheel_ideal_voltage(0.0, Wiper::Zero, &spec).unwrap().unwrap();
        assert!(spec.truth(Wiper::Zero).eval(v).abs() < 1e-9);
        assert!((v - 586.910_865_872_061_9).abs() < 1e-6);
    }

    #[test]
    fn wheel_domain_is_checked() {
        let spec = WheelSensorSpec::reference();
        assert!(matches!(
            wheel_ideal_voltage(3.5, Wiper::Zero, &spec),
            Err(Error::AngleOutOfRange { .. })
        ));
        // −π is the same point as π.
        assert_eq!(
            wheel_ideal_voltage(-PI, Wiper::One, &spec).unwrap(),
            wheel_ideal_voltage(PI, Wiper::One, &spec).unwrap()
        );
    }

    #[test]
    fn quantize_rounds_and_clamps() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(quantize(511.5, 0.0, &mut rng, 1023), 512);
        assert_eq!(quantize(-3.2, 0.0, &mut rng, 1023), 0);
        assert_eq!(quantize(2000.0, 0.0, &mut rng, 1023), 1023);
        assert_eq!(quantize(f64::NAN, 0.0, &mut rng, 1023), 0);
    }

    #[test]
    fn quantize_noise_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| quantize(511.5, 2.0, &mut rng, 1023) as f64).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 511.5).abs() < 0.05, "mean {mean}");
        // Rounding adds 1/12 count² of variance on top of the Gaussian noise.
        let std = var.sqrt();
        assert!((std - 2.0).abs() < 0.05, "std {std}");
    }

    #[test]
    fn read_wheel_availability() {
        let spec = WheelSensorSpec::reference();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = read_wheel(0.0, &spec, &mut rng).unwrap();
        assert!(r[0].available && r[1].available);
        let r = read_wheel(-0.75 * PI, &spec, &mut rng).unwrap();
        assert!(r[0].available && !r[1].available);
        let r = read_wheel(PI, &spec, &mut rng).unwrap();
        assert!(r[0].available && r[1].available);
    }

    #[test]
    fn at_least_one_wiper_everywhere() {
        let spec = linear_wheel();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 10_000;
        for i in 0..n {
            let theta = -PI + TAU * (i + 1) as f64 / n as f64;
            let r = read_wheel(theta, &spec, &mut rng).unwrap();
            assert!(r[0].available || r[1].available, "θ = {theta}");
        }
    }

    #[test]
    fn noiseless_reads_are_deterministic() {
        let spec = WheelSensorSpec::reference().with_noise_std(0.0).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(1);
        let mut b = ChaCha8Rng::seed_from_u64(99);
        for theta in [-3.0, -1.0, 0.3, 2.2, 3.1] {
            assert_eq!(read_wheel(theta, &spec, &mut a).unwrap(), read_wheel(theta, &spec, &mut b).unwrap());
        }
    }

    #[test]
    fn tilt_linear_examples() {
        let spec = linear_tilt();
        assert!((tilt_ideal_voltage(0.0, &spec).unwrap() - 511.5).abs() < 1e-6);
        assert!(tilt_ideal_voltage(-FRAC_PI_2, &spec).unwrap().abs() < 1e-6);
        assert!(tilt_ideal_voltage(1.6, &spec).is_err());
    }

    #[test]
    fn tilt_reference_half_radian() {
        let spec = TiltSensorSpec::reference();
        let v = tilt_ideal_voltage(0.5, &spec).unwrap();
        assert!((spec.truth().eval(v) - 0.5).abs() < 1e-9);
        assert!((v - 642.335_286_391_508_3).abs() < 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = read_tilt(0.5, &spec.with_noise_std(0.0).unwrap(), &mut rng).unwrap();
        assert_eq!(r.count, 642);
    }

    #[test]
    fn plant_step_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = simulate_plant_step(0.0, 0.0, 0.1, 0.01, 0.0, DofKind::Wheel, &mut rng);
        assert_eq!(s.theta, 0.0);
        let s = simulate_plant_step(0.0, 1.0, 0.1, 0.01, 0.0, DofKind::Wheel, &mut rng);
        assert!((s.theta - 0.001).abs() < 1e-15);
        let s = simulate_plant_step(PI - 0.0005, 1.0, 0.1, 0.01, 0.0, DofKind::Wheel, &mut rng);
        // Oracle: (x + π) mod 2π − π.
        let expected = (PI - 0.0005 + 0.001 + PI).rem_euclid(TAU) - PI;
        assert!((s.theta - expected).abs() < 1e-12);
        assert!((s.theta - (-PI + 0.0005)).abs() < 1e-12);
        let s = simulate_plant_step(1.5, 10.0, 1.0, 0.01, 0.0, DofKind::Tilt, &mut rng);
        assert!(s.saturated && s.theta == FRAC_PI_2);
    }

    #[test]
    fn plant_step_is_affine_in_omega() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = |w: f64, rng: &mut ChaCha8Rng| simulate_plant_step(0.2, w, 0.3, 0.01, 0.0, DofKind::Tilt, rng).theta;
        let (a, b, c) = (f(0.0, &mut rng), f(1.0, &mut rng), f(3.0, &mut rng));
        assert!(((c - a) - 3.0 * (b - a)).abs() < 1e-15);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let wheel = WheelSensorSpec::reference();
        let m0 = *wheel.truth(Wiper::Zero);
        let m1 = *wheel.truth(Wiper::One);
        let bad_gap = WheelGeometry { gap_w0: ClosedInterval::new(2.0, 3.5), ..Default::default() };
        assert!(WheelSensorSpec::new(bad_gap, 1023, 1.0, m0, m1).is_err());
        assert!(WheelSensorSpec::new(WheelGeometry::default(), 1000, 1.0, m0, m1).is_err());
        assert!(WheelSensorSpec::new(WheelGeometry::default(), 1023, -1.0, m0, m1).is_err());
        // Wiper-0 curve tops out near 3.55 rad, short of the wiper-1 span.
        assert!(WheelSensorSpec::new(WheelGeometry::default(), 1023, 1.0, m0, m0).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = SensorSpec::Wheel(WheelSensorSpec::reference());
        let json = serde_json::to_string_pretty(&spec).unwrap();
        assert!(json.contains("\"kind\": \"wheel\""));
        let back: SensorSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}
