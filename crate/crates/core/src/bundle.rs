//! The persisted output of a calibration: curves, trusted count ranges,
//! residuals and filter settings.

use serde::{Deserialize, Serialize};

use crate::characterize::{lsb_angle, Calibration, FitReport, ValidRange};
use crate::cli::RunManifest;
use crate::cubic::CubicModel;
use crate::decimal;
use crate::error::{Error, Result};
use crate::estimate::{FilterTuning, TiltObservationModel, WheelObservationModel, DEFAULT_Q, DEFAULT_SIGMA0};
use crate::sensor_sim::{DofKind, WheelGeometry};

pub const DEFAULT_K: f64 = 0.25;
pub const DEFAULT_DT: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterParams {
    #[serde(with = "decimal")]
    pub k: f64,
    #[serde(with = "decimal")]
    pub dt: f64,
    #[serde(with = "decimal")]
    pub q: f64,
    /// Measurement variance per wiper, rad².
    pub r: Vec<f64>,
    #[serde(with = "decimal")]
    pub sigma0: f64,
}

impl FilterParams {
    pub fn tuning(&self) -> FilterTuning {
        FilterTuning { k: self.k, q: self.q, sigma0: self.sigma0 }
    }
}

/// Measurement variance derived from fit residuals, floored at one LSB.
pub fn residual_variance(rms: f64, model: &CubicModel) -> f64 {
    let lsb = lsb_angle(model);
    (rms * rms).max(lsb * lsb)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub sensor_kind: DofKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<WheelGeometry>,
    pub models: Vec<CubicModel>,
    pub valid_ranges: Vec<ValidRange>,
    pub fit_report: FitReport,
    pub filter: FilterParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

impl ModelBundle {
    /// Packs a calibration with default filter settings; `R` per wiper comes
    /// from the fit residuals.
    pub fn from_calibration(cal: &Calibration, geometry: &WheelGeometry, k: f64, dt: f64) -> Self {
        let r = cal
            .report
            .wipers
            .iter()
            .zip(&cal.models)
            .map(|(fit, model)| residual_variance(fit.rms, model))
            .collect();
        Self {
            sensor_kind: cal.sensor_kind,
            geometry: (cal.sensor_kind == DofKind::Wheel).then_some(*geometry),
            models: cal.models.clone(),
            valid_ranges: cal.valid_ranges.clone(),
            fit_report: cal.report.clone(),
            filter: FilterParams { k, dt, q: DEFAULT_Q, r, sigma0: DEFAULT_SIGMA0 },
            manifest: None,
        }
    }

    pub fn wheel_observation(&self) -> Result<WheelObservationModel> {
        if self.sensor_kind != DofKind::Wheel {
            return Err(Error::Config("model bundle is for a tilt sensor, not a wheel".into()));
        }
        match (self.models.as_slice(), self.valid_ranges.as_slice(), self.filter.r.as_slice()) {
            ([m0, m1], [v0, v1], [r0, r1]) => WheelObservationModel::new(
                [*m0, *m1],
                [*r0, *r1],
                [*v0, *v1],
                self.geometry.unwrap_or_default(),
            ),
            _ => Err(Error::Config("wheel bundle needs two models, two valid ranges and two variances".into())),
        }
    }

    pub fn tilt_observation(&self) -> Result<TiltObservationModel> {
        if self.sensor_kind != DofKind::Tilt {
            return Err(Error::Config("model bundle is for a wheel sensor, not a tilt".into()));
        }
        match (self.models.as_slice(), self.filter.r.as_slice()) {
            ([m], [r]) => TiltObservationModel::new(*m, *r),
            _ => Err(Error::Config("tilt bundle needs one model and one variance".into())),
        }
    }
}
