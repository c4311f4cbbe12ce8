//! Position sensing with PaintPots, hand-painted potentiometers whose
//! voltage-to-angle curve is nonlinear and, on continuous wheels, broken by a
//! gap in the track.
//!
//! The crate covers the whole pipeline:
//!
//! - [`sensor_sim`]: a ground-truth plant and noisy, quantized ADC model.
//! - [`characterize`]: turning a calibration sweep into per-wiper cubic
//!   curves and trusted count ranges.
//! - [`estimate`]: scalar Kalman filters that convert each usable reading to
//!   an angle first, so the observation model stays linear.
//! - [`trajectory`]: quintic references and closed-loop tracking experiments.
//! - [`cli`]: the `paintpot` command-line tool.
//!
//! ```
//! use paintpot::cubic::reference;
//!
//! let wiper0 = reference::full_scale(reference::WHEEL_WIPER0);
//! let v = wiper0.invert(0.0).unwrap();
//! assert!(wiper0.eval(v).abs() < 1e-9);
//! ```

pub mod angle;
pub mod bundle;
pub mod characterize;
pub mod cli;
pub mod cubic;
pub mod decimal;
pub mod error;
pub mod estimate;
pub mod sensor_sim;
pub mod trajectory;

pub use error::{Error, Result};

// The guide's code listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sensor-model.md")]
    mod sensor_model {}
    #[doc = include_str!("../../../book/src/characterization.md")]
    mod characterization {}
    #[doc = include_str!("../../../book/src/filter.md")]
    mod filter {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
