//! Noise temperature, line budget and added-noise calibration.

mod budget;
mod fit;
mod thermal;

pub use budget::{
    chain_gain_from_noise, critical_power_planes, input_attenuation, transport_loss,
    transport_loss_with_uncertainty, CriticalPowerPlanes, LineBudget,
};
pub use fit::{
    fit_added_noise, reference_vts_grid, synth_noise_data, FitResult, FitSettings, NoiseModel,
    NoiseSample, REFERENCE_FRIDGE_TEMPS,
};
pub use thermal::thermal_occupancy;
