//! Sensor characterization: from a sweep log to per-wiper cubic curves.
//!
//! A wheel wiper's raw angle-vs-voltage curve is piecewise: it jumps by 2π
//! where the wiper crosses the track gap. Samples taken while a wiper is in
//! its gap are dropped, and the segment past the gap is moved by 2π so the
//! remaining points lie on a single continuous, monotone curve. A cubic is
//! then fitted by least squares.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cubic::{CubicModel, VoltageWindow};
use crate::error::{Error, Result};
use crate::sensor_sim::{read_tilt, read_wheel, DofKind, SensorSpec, WheelGeometry, Wiper};

pub use crate::cubic::invert_cubic;

/// Minimum number of pairs for a cubic fit.
pub const MIN_FIT_SAMPLES: usize = 8;
/// Minimum voltage span of a fit, as a fraction of full scale.
pub const MIN_SPAN_FRACTION: f64 = 0.5;
/// How far (rad) a valid-range target may sit beyond the fitted data before
/// [`compute_valid_ranges`] gives up instead of clamping to the data hull.
pub const VALID_RANGE_SLACK: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationSample {
    pub t: f64,
    pub theta: f64,
    /// `None` when the wiper reported nothing (blank cell in the log).
    pub v0: Option<u32>,
    pub v1: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationDataset {
    pub sensor_kind: DofKind,
    pub samples: Vec<CalibrationSample>,
    pub adc_max: u32,
}

fn parse_count(cell: &str, adc_max: u32, row: u64, name: &str) -> Result<Option<u32>> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    let count: i64 = cell
        .parse()
        .map_err(|_| Error::Row { row, message: format!("{name} = {cell:?} is not an integer count") })?;
    if count < 0 || count > adc_max as i64 {
        return Err(Error::Row { row, message: format!("{name} = {count} outside [0, {adc_max}]") });
    }
    Ok(Some(count as u32))
}

fn parse_real(cell: &str, row: u64, name: &str) -> Result<f64> {
    cell.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Row { row, message: format!("{name} = {cell:?} is not a finite number") })
}

fn csv_row_error(err: csv::Error) -> Error {
    match err.position() {
        Some(pos) => Error::Row { row: pos.line(), message: format!("{err} (byte offset {})", pos.byte()) },
        None => Error::Csv(err),
    }
}

/// Parses a calibration log with header `t,theta,v0[,v1]`.
///
/// Row numbers in errors are file line numbers (the header is line 1).
pub fn ingest_log<R: Read>(source: R, sensor_kind: DofKind, adc_max: u32) -> Result<CalibrationDataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = reader.headers().map_err(csv_row_error)?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let (t_col, theta_col, v0_col) = match (column("t"), column("theta"), column("v0")) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(Error::Schema("calibration log needs columns t, theta, v0".into())),
    };
    let v1_col = column("v1");
    if sensor_kind == DofKind::Wheel && v1_col.is_none() {
        return Err(Error::Schema("wheel calibration log needs a v1 column".into()));
    }

    let mut samples = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for record in reader.records() {
        let record = record.map_err(csv_row_error)?;
        let row = record.position().map_or(samples.len() as u64 + 2, |p| p.line());
        let t = parse_real(&record[t_col], row, "t")?;
        let mut theta = parse_real(&record[theta_col], row, "theta")?;
        let v0 = parse_count(&record[v0_col], adc_max, row, "v0")?;
        let v1 = match (sensor_kind, v1_col) {
            (DofKind::Wheel, Some(c)) => parse_count(&record[c], adc_max, row, "v1")?,
            _ => None,
        };
        match sensor_kind {
            DofKind::Wheel => {
                if theta == -PI {
                    theta = PI;
                }
                if !(theta > -PI && theta <= PI) {
                    return Err(Error::Row { row, message: format!("theta = {theta} outside (−π, π]") });
                }
            }
            DofKind::Tilt => {
                if !(-FRAC_PI_2..=FRAC_PI_2).contains(&theta) {
                    return Err(Error::Row { row, message: format!("theta = {theta} outside [−π/2, π/2]") });
                }
                if v0.is_none() {
                    return Err(Error::Row { row, message: "tilt sample without v0".into() });
                }
            }
        }
        if t < last_t {
            return Err(Error::Row { row, message: format!("timestamp {t} goes backwards (previous {last_t})") });
        }
        last_t = t;
        samples.push(CalibrationSample { t, theta, v0, v1 });
    }
    if samples.is_empty() {
        return Err(Error::Schema("calibration log has no samples".into()));
    }
    Ok(CalibrationDataset { sensor_kind, samples, adc_max })
}

/// Writes a dataset in the format [`ingest_log`] reads. Missing counts are
/// written as blank cells.
pub fn write_log<W: Write>(dataset: &CalibrationDataset, sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    let cell = |v: Option<u32>| v.map(|c| c.to_string()).unwrap_or_default();
    match dataset.sensor_kind {
        DofKind::Wheel => writer.write_record(["t", "theta", "v0", "v1"])?,
        DofKind::Tilt => writer.write_record(["t", "theta", "v0"])?,
    }
    for s in &dataset.samples {
        let mut row = vec![s.t.to_string(), s.theta.to_string(), cell(s.v0)];
        if dataset.sensor_kind == DofKind::Wheel {
            row.push(cell(s.v1));
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Simulates the characterization rig: the joint sweeps its full range at
/// constant speed and back, sampled at `rate_hz`.
pub fn synthesize_sweep<R: Rng + ?Sized>(
    spec: &SensorSpec,
    rate_hz: f64,
    duration_s: f64,
    rng: &mut R,
) -> Result<CalibrationDataset> {
    if !(rate_hz > 0.0 && rate_hz.is_finite()) {
        return Err(Error::Config(format!("rate_hz must be positive, got {rate_hz}")));
    }
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(Error::Config(format!("duration_s must be positive, got {duration_s}")));
    }
    let n = (duration_s * rate_hz).round() as usize;
    if n < 2 {
        return Err(Error::Config("sweep would produce fewer than two samples".into()));
    }
    let (lo, hi) = match spec {
        SensorSpec::Wheel(_) => (-PI, PI),
        SensorSpec::Tilt(_) => (-FRAC_PI_2, FRAC_PI_2),
    };
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / rate_hz;
        let phase = 2.0 * t / duration_s;
        let theta = if phase <= 1.0 { lo + (hi - lo) * phase } else { hi - (hi - lo) * (phase - 1.0) };
        let theta = theta.clamp(lo, hi);
        let sample = match spec {
            SensorSpec::Wheel(w) => {
                let theta = if theta <= -PI { PI } else { theta };
                let r = read_wheel(theta, w, rng)?;
                CalibrationSample { t, theta, v0: r[0].value(), v1: r[1].value() }
            }
            SensorSpec::Tilt(s) => {
                let r = read_tilt(theta, s, rng)?;
                CalibrationSample { t, theta, v0: r.value(), v1: None }
            }
        };
        samples.push(sample);
    }
    Ok(CalibrationDataset { sensor_kind: spec.kind(), samples, adc_max: spec.adc_max() })
}

/// One point of a continuous characterization curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedPair {
    pub theta: f64,
    pub v: f64,
}

/// Drops gap samples and applies the ±2π shift, per wiper.
///
/// Returns one partition per wiper (two for wheel, one for tilt). Tilt data
/// passes through unchanged.
pub fn trim_and_shift(dataset: &CalibrationDataset, geometry: &WheelGeometry) -> Result<Vec<Vec<ShiftedPair>>> {
    let partitions = match dataset.sensor_kind {
        DofKind::Tilt => {
            let pairs: Vec<ShiftedPair> = dataset
                .samples
                .iter()
                .filter_map(|s| s.v0.map(|v| ShiftedPair { theta: s.theta, v: v as f64 }))
                .collect();
            vec![pairs]
        }
        DofKind::Wheel => Wiper::BOTH
            .iter()
            .map(|&wiper| {
                dataset
                    .samples
                    .iter()
                    .filter_map(|s| {
                        let v = match wiper {
                            Wiper::Zero => s.v0,
                            Wiper::One => s.v1,
                        }?;
                        if geometry.gap(wiper).contains(s.theta) {
                            return None;
                        }
                        Some(ShiftedPair { theta: geometry.shifted_state(s.theta, wiper), v: v as f64 })
                    })
                    .collect()
            })
            .collect(),
    };
    for (wiper, pairs) in partitions.iter().enumerate() {
        if pairs.is_empty() {
            return Err(Error::InsufficientCoverage { wiper });
        }
    }
    Ok(partitions)
}

/// Least-squares cubic with the default full scale of 1023 counts.
pub fn fit_cubic(pairs: &[ShiftedPair]) -> Result<CubicModel> {
    fit_cubic_with(pairs, 1023)
}

/// Least-squares cubic `θ = p(V)`.
///
/// Voltages are mapped affinely onto [−1, 1] and the system is solved by
/// Householder QR; the scaled coefficients are then expanded back into raw
/// counts. The returned model's window is the voltage hull of the data.
pub fn fit_cubic_with(pairs: &[ShiftedPair], adc_max: u32) -> Result<CubicModel> {
    if pairs.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples { required: MIN_FIT_SAMPLES, got: pairs.len() });
    }
    let mut distinct: Vec<f64> = pairs.iter().map(|p| p.v).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::RankDeficient { distinct: distinct.len() });
    }
    let (v_lo, v_hi) = (distinct[0], distinct[distinct.len() - 1]);
    let required = MIN_SPAN_FRACTION * adc_max as f64;
    if v_hi - v_lo < required {
        return Err(Error::InsufficientSpan { span: v_hi - v_lo, required });
    }

    let center = 0.5 * (v_lo + v_hi);
    let half = 0.5 * (v_hi - v_lo);
    let n = pairs.len();
    let design = DMatrix::from_fn(n, 4, |i, j| ((pairs[i].v - center) / half).powi(j as i32));
    let rhs = DVector::from_iterator(n, pairs.iter().map(|p| p.theta));

    let qr = design.qr();
    let r = qr.r();
    let max_diag = (0..4).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..4).any(|i| r[(i, i)].abs() <= 1e-12 * max_diag) {
        return Err(Error::RankDeficient { distinct: distinct.len() });
    }
    let qtb = qr.q().transpose() * rhs;
    let scaled = r
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::Numerical("singular triangular factor".into()))?;

    // p(V) = Σ d_j ((V − m)/h)^j  ⇒  c_i = Σ_{j≥i} d_j h^{−j} C(j, i) (−m)^{j−i}
    const BINOM: [[f64; 4]; 4] = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    let mut raw = [0.0f64; 4];
    for (i, c) in raw.iter_mut().enumerate() {
        *c = (i..4)
            .map(|j| scaled[j] / half.powi(j as i32) * BINOM[j][i] * (-center).powi((j - i) as i32))
            .sum();
    }
    CubicModel::new([raw[3], raw[2], raw[1], raw[0]], VoltageWindow::new(v_lo, v_hi)?)
}

/// Open ADC interval `(v_min, v_max)` inside which a wiper's count is trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidRange {
    pub v_min: u32,
    pub v_max: u32,
}

impl ValidRange {
    pub fn new(v_min: u32, v_max: u32) -> Result<Self> {
        if v_min >= v_max {
            return Err(Error::Config(format!("valid range ({v_min}, {v_max}) is empty")));
        }
        Ok(Self { v_min, v_max })
    }

    /// Strict membership, `v_min < count < v_max`.
    pub fn contains(&self, count: u32) -> bool {
        self.v_min < count && count < self.v_max
    }
}

fn invert_near_hull(model: &CubicModel, target: f64) -> Result<f64> {
    let (lo, hi) = model.angle_range();
    let window = model.v_window();
    let (lo_v, hi_v) = if model.is_increasing() { (window.lo, window.hi) } else { (window.hi, window.lo) };
    if target < lo && lo - target <= VALID_RANGE_SLACK {
        Ok(lo_v)
    } else if target > hi && target - hi <= VALID_RANGE_SLACK {
        Ok(hi_v)
    } else {
        model.invert(target)
    }
}

fn outward(a: f64, b: f64) -> Result<ValidRange> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    ValidRange::new(lo.floor().max(0.0) as u32, hi.ceil() as u32)
}

/// Count intervals in which each wheel wiper maps to a legitimate shifted
/// state: wiper 0 between the inverses of `gap0.hi − 2π` and `gap0.lo`,
/// wiper 1 between the inverses of `gap1.hi` and `gap1.lo + 2π`.
///
/// Targets that fall just outside a fitted curve's data hull (by at most
/// [`VALID_RANGE_SLACK`]) snap to the hull edge.
pub fn compute_valid_ranges(
    m0: &CubicModel,
    m1: &CubicModel,
    geometry: &WheelGeometry,
) -> Result<(ValidRange, ValidRange)> {
    let (a0, b0) = geometry.shifted_span(Wiper::Zero);
    let (a1, b1) = geometry.shifted_span(Wiper::One);
    let r0 = outward(invert_near_hull(m0, a0)?, invert_near_hull(m0, b0)?)?;
    let r1 = outward(invert_near_hull(m1, a1)?, invert_near_hull(m1, b1)?)?;
    Ok((r0, r1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WiperFit {
    pub wiper: usize,
    pub samples: usize,
    pub rms: f64,
    pub max_abs: f64,
}

/// Residual summary of a calibration, one entry per wiper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub wipers: Vec<WiperFit>,
}

fn residual_summary(wiper: usize, pairs: &[ShiftedPair], model: &CubicModel) -> WiperFit {
    let (mut sum_sq, mut max_abs) = (0.0, 0.0f64);
    for p in pairs {
        let r = p.theta - model.eval(p.v);
        sum_sq += r * r;
        max_abs = max_abs.max(r.abs());
    }
    WiperFit { wiper, samples: pairs.len(), rms: (sum_sq / pairs.len() as f64).sqrt(), max_abs }
}

/// Residuals of `models` on the trimmed and shifted pairs of `dataset`.
pub fn fit_report(dataset: &CalibrationDataset, models: &[CubicModel], geometry: &WheelGeometry) -> Result<FitReport> {
    let partitions = trim_and_shift(dataset, geometry)?;
    if partitions.len() != models.len() {
        return Err(Error::Config(format!(
            "{} models supplied for {} wiper partitions",
            models.len(),
            partitions.len()
        )));
    }
    let wipers = partitions
        .iter()
        .zip(models)
        .enumerate()
        .map(|(i, (pairs, model))| residual_summary(i, pairs, model))
        .collect();
    Ok(FitReport { wipers })
}

/// Output of the full characterization pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub sensor_kind: DofKind,
    pub models: Vec<CubicModel>,
    /// Empty for tilt sensors.
    pub valid_ranges: Vec<ValidRange>,
    pub report: FitReport,
}

/// trim/shift → fit → valid ranges → residual report.
pub fn calibrate(dataset: &CalibrationDataset, geometry: &WheelGeometry) -> Result<Calibration> {
    let partitions = trim_and_shift(dataset, geometry)?;
    let models = partitions
        .iter()
        .map(|pairs| fit_cubic_with(pairs, dataset.adc_max))
        .collect::<Result<Vec<_>>>()?;
    let valid_ranges = match dataset.sensor_kind {
        DofKind::Wheel => {
            let (r0, r1) = compute_valid_ranges(&models[0], &models[1], geometry)?;
            vec![r0, r1]
        }
        DofKind::Tilt => Vec::new(),
    };
    let wipers = partitions
        .iter()
        .zip(&models)
        .enumerate()
        .map(|(i, (pairs, model))| residual_summary(i, pairs, model))
        .collect();
    Ok(Calibration { sensor_kind: dataset.sensor_kind, models, valid_ranges, report: FitReport { wipers } })
}

/// Angle equivalent of one ADC count: the largest slope of the curve.
pub fn lsb_angle(model: &CubicModel) -> f64 {
    model.max_slope()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubic::reference;
    use crate::sensor_sim::{TiltSensorSpec, WheelSensorSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};
    use std::f64::consts::TAU;

    const WHEEL_CSV: &str = "t,theta,v0,v1\n0.0,0.1,500,520\n0.07,0.2,510,530\n0.14,0.3,520,540\n";

    #[test]
    fn ingest_well_formed_wheel_log() {
        let ds = ingest_log(WHEEL_CSV.as_bytes(), DofKind::Wheel, 1023).unwrap();
        assert_eq!(ds.samples.len(), 3);
        assert_eq!(ds.samples[1], CalibrationSample { t: 0.07, theta: 0.2, v0: Some(510), v1: Some(530) });
    }

    #[test]
    fn ingest_names_offending_row() {
        let csv = "t,theta,v0,v1\n0.0,0.1,500,520\n0.1,0.2,1500,530\n";
        match ingest_log(csv.as_bytes(), DofKind::Wheel, 1023) {
            Err(Error::Row { row, message }) => {
                assert_eq!(row, 3);
                assert!(message.contains("1500"));
            }
            other => panic!("expected row error, got {other:?}"),
        }
    }

    #[test]
    fn ingest_tilt_without_v1() {
        let csv = "t,theta,v0\n0,0.0,512\n0.1,0.1,530\n";
        let ds = ingest_log(csv.as_bytes(), DofKind::Tilt, 1023).unwrap();
        assert_eq!(ds.samples.len(), 2);
        assert!(ingest_log(csv.as_bytes(), DofKind::Wheel, 1023).is_err());
    }

    #[test]
    fn ingest_rejects_bad_input() {
        let backwards = "t,theta,v0\n1,0.0,512\n0.5,0.1,530\n";
        assert!(matches!(ingest_log(backwards.as_bytes(), DofKind::Tilt, 1023), Err(Error::Row { row: 3, .. })));
        let truncated = "t,theta,v0,v1\n0,0.1,500,520\n0.1,0.2,5";
        assert!(matches!(ingest_log(truncated.as_bytes(), DofKind::Wheel, 1023), Err(Error::Row { row: 3, .. })));
        let empty = "t,theta,v0\n";
        assert!(ingest_log(empty.as_bytes(), DofKind::Tilt, 1023).is_err());
        let out_of_range = "t,theta,v0\n0,1.7,512\n";
        assert!(ingest_log(out_of_range.as_bytes(), DofKind::Tilt, 1023).is_err());
    }

    fn wheel_dataset(points: &[(f64, Option<u32>, Option<u32>)]) -> CalibrationDataset {
        CalibrationDataset {
            sensor_kind: DofKind::Wheel,
            samples: points
                .iter()
                .enumerate()
                .map(|(i, &(theta, v0, v1))| CalibrationSample { t: i as f64, theta, v0, v1 })
                .collect(),
            adc_max: 1023,
        }
    }

    #[test]
    fn trim_and_shift_examples() {
        let ds = wheel_dataset(&[
            (0.9 * PI, Some(900), Some(700)),
            (0.75 * PI, Some(850), Some(650)),
            (-0.9 * PI, Some(100), Some(80)),
        ]);
        let parts = trim_and_shift(&ds, &WheelGeometry::default()).unwrap();
        let w0: Vec<_> = parts[0].iter().map(|p| (p.theta, p.v)).collect();
        assert_eq!(w0.len(), 2);
        assert!((w0[0].0 - (-1.1 * PI)).abs() < 1e-12 && w0[0].1 == 900.0);
        assert!(!w0.iter().any(|p| p.1 == 850.0));
        let w1 = &parts[1];
        let last = w1.last().unwrap();
        assert!((last.theta - 1.1 * PI).abs() < 1e-12 && last.v == 80.0);
    }

    #[test]
    fn trim_and_shift_reports_empty_partition() {
        let ds = wheel_dataset(&[(0.75 * PI, Some(850), Some(650))]);
        assert!(matches!(
            trim_and_shift(&ds, &WheelGeometry::default()),
            Err(Error::InsufficientCoverage { wiper: 0 })
        ));
    }

    #[test]
    fn fit_recovers_noiseless_cubic() {
        let truth = |v: f64| 1e-9 * v.powi(3) + 0.003 * v - 1.5;
        let pairs: Vec<_> = (0..=10).map(|i| i as f64 * 100.0).map(|v| ShiftedPair { theta: truth(v), v }).collect();
        let m = fit_cubic(&pairs).unwrap();
        let expected = [1e-9, 0.0, 0.003, -1.5];
        for (got, want) in m.coeffs().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert_eq!(m.v_window(), VoltageWindow { lo: 0.0, hi: 1000.0 });
    }

    #[test]
    fn fit_tracks_noisy_reference_curve() {
        let truth = reference::full_scale(reference::WHEEL_WIPER0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let pairs: Vec<_> = (0..700)
            .map(|i| {
                let v = i as f64 * 1023.0 / 699.0;
                ShiftedPair { theta: truth.eval(v) + noise.sample(&mut rng), v }
            })
            .collect();
        let m = fit_cubic(&pairs).unwrap();
        let worst = (0..=1023).map(|v| (m.eval(v as f64) - truth.eval(v as f64)).abs()).fold(0.0, f64::max);
        assert!(worst < 0.01, "max deviation {worst}");
    }

    #[test]
    fn fit_preconditions() {
        let three: Vec<_> = (0..3).map(|i| ShiftedPair { theta: i as f64, v: i as f64 * 400.0 }).collect();
        assert!(matches!(fit_cubic(&three), Err(Error::TooFewSamples { .. })));
        let few_levels: Vec<_> =
            (0..12).map(|i| ShiftedPair { theta: i as f64, v: (i % 3) as f64 * 500.0 }).collect();
        assert!(matches!(fit_cubic(&few_levels), Err(Error::RankDeficient { distinct: 3 })));
        let narrow: Vec<_> = (0..12).map(|i| ShiftedPair { theta: i as f64, v: i as f64 * 10.0 }).collect();
        assert!(matches!(fit_cubic(&narrow), Err(Error::InsufficientSpan { .. })));
    }

    #[test]
    fn fit_is_order_invariant() {
        let truth = reference::full_scale(reference::TILT);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let noise = Normal::new(0.0, 0.02).unwrap();
        let mut pairs: Vec<_> = (0..200)
            .map(|i| {
                let v = 100.0 + i as f64 * 4.0;
                ShiftedPair { theta: truth.eval(v) + noise.sample(&mut rng), v }
            })
            .collect();
        let a = fit_cubic(&pairs).unwrap();
        pairs.reverse();
        pairs.swap(3, 150);
        let b = fit_cubic(&pairs).unwrap();
        for v in (100..900).step_by(7) {
            assert!((a.eval(v as f64) - b.eval(v as f64)).abs() < 1e-9);
        }
    }

    #[test]
    fn valid_ranges_of_linear_models() {
        // θ̄₀ = V·(2π·23/24)/1023 − 7π/6; wiper 1 mirrored.
        let window = VoltageWindow::new(0.0, 1023.0).unwrap();
        let slope = TAU * 23.0 / 24.0 / 1023.0;
        let m0 = CubicModel::new([0.0, 0.0, slope, -7.0 * PI / 6.0], window).unwrap();
        let m1 = CubicModel::new([0.0, 0.0, slope, -2.0 * PI / 3.0 - PI / 24.0], window).unwrap();
        let (r0, r1) = compute_valid_ranges(&m0, &m1, &WheelGeometry::default()).unwrap();
        // Oracle: direct inversion of the linear maps.
        let inv0 = |th: f64| (th + 7.0 * PI / 6.0) / slope;
        let inv1 = |th: f64| (th + 2.0 * PI / 3.0 + PI / 24.0) / slope;
        assert_eq!(r0.v_min, inv0(-7.0 * PI / 6.0).floor() as u32);
        assert_eq!(r0.v_max, inv0(2.0 * PI / 3.0).ceil() as u32);
        assert_eq!(r1.v_min, inv1(-2.0 * PI / 3.0).floor() as u32);
        assert_eq!(r1.v_max, inv1(7.0 * PI / 6.0).ceil() as u32);
        assert!(r0.v_min < r0.v_max && r1.v_min < r1.v_max);
    }

    #[test]
    fn valid_ranges_of_reference_curves() {
        let m0 = reference::full_scale(reference::WHEEL_WIPER0);
        let m1 = reference::full_scale(reference::WHEEL_WIPER1);
        let (r0, r1) = compute_valid_ranges(&m0, &m1, &WheelGeometry::default()).unwrap();
        let v_max = m0.invert(2.0 * PI / 3.0).unwrap();
        assert!((m0.eval(v_max) - 2.0 * PI / 3.0).abs() < 1e-9);
        assert_eq!(r0, ValidRange { v_min: 236, v_max: 845 });
        assert_eq!(r1, ValidRange { v_min: 244, v_max: 855 });
    }

    #[test]
    fn valid_ranges_fail_when_curve_misses_target() {
        let window = VoltageWindow::new(0.0, 1023.0).unwrap();
        let short = CubicModel::new([0.0, 0.0, 0.004, -3.8], window).unwrap(); // tops out at 0.29 rad
        let m1 = reference::full_scale(reference::WHEEL_WIPER1);
        assert!(matches!(
            compute_valid_ranges(&short, &m1, &WheelGeometry::default()),
            Err(Error::OutOfModelRange { .. })
        ));
    }

    #[test]
    fn noiseless_report_is_tight() {
        let truth = |v: f64| 2e-9 * v.powi(3) + 0.002 * v - 1.0;
        let ds = CalibrationDataset {
            sensor_kind: DofKind::Tilt,
            samples: (0..=1000)
                .map(|i| {
                    let v = i as u32;
                    CalibrationSample { t: i as f64, theta: truth(v as f64), v0: Some(v), v1: None }
                })
                .collect(),
            adc_max: 1023,
        };
        let cal = calibrate(&ds, &WheelGeometry::default()).unwrap();
        assert!(cal.report.wipers[0].rms < 1e-10);
        assert_eq!(cal.report, fit_report(&ds, &cal.models, &WheelGeometry::default()).unwrap());
    }

    #[test]
    fn noisy_report_rms_matches_noise_level() {
        let truth = reference::full_scale(reference::TILT);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let ds = CalibrationDataset {
            sensor_kind: DofKind::Tilt,
            samples: (0..1200)
                .map(|i| {
                    let v = 170 + (i * 740 / 1199) as u32;
                    let theta = (truth.eval(v as f64) + noise.sample(&mut rng)).clamp(-FRAC_PI_2, FRAC_PI_2);
                    CalibrationSample { t: i as f64, theta, v0: Some(v), v1: None }
                })
                .collect(),
            adc_max: 1023,
        };
        let cal = calibrate(&ds, &WheelGeometry::default()).unwrap();
        let rms = cal.report.wipers[0].rms;
        assert!((0.007..=0.013).contains(&rms), "rms {rms}");
    }

    #[test]
    fn sweep_round_trips_through_csv() {
        let spec = SensorSpec::Wheel(WheelSensorSpec::reference());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ds = synthesize_sweep(&spec, 14.0, 50.0, &mut rng).unwrap();
        assert_eq!(ds.samples.len(), 700);
        let mut buf = Vec::new();
        write_log(&ds, &mut buf).unwrap();
        let back = ingest_log(buf.as_slice(), DofKind::Wheel, 1023).unwrap();
        assert_eq!(back, ds);
        assert!(synthesize_sweep(&spec, 14.0, 0.0, &mut rng).is_err());
    }

    #[test]
    fn tilt_sweep_calibrates() {
        let spec = SensorSpec::Tilt(TiltSensorSpec::reference());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ds = synthesize_sweep(&spec, 14.0, 50.0, &mut rng).unwrap();
        let cal = calibrate(&ds, &WheelGeometry::default()).unwrap();
        assert_eq!(cal.models.len(), 1);
        assert!(cal.valid_ranges.is_empty());
    }
}
