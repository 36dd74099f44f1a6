//! Model of the optical two-sender experiment.

pub mod channels;
pub mod montecarlo;
pub mod optics;

pub use channels::{eta_channel, eta_threshold, visibility_channel, PriorPolicy};
pub use montecarlo::{monte_carlo_joint, CountTable, ExperimentConfig, McRun};
pub use optics::{g2_from_counts, phase_plate_shift};

use crate::error::{Error, Result};

pub(crate) fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidParameter(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}
