mod amp;
mod channel;
mod ensemble;
mod measure;

pub use amp::{amp_readout, AmpKind, AmpModel, DEFAULT_AMP_GAIN_DB};
pub use channel::{apply_loss, squeeze_state, LossChannel, Squeezer};
pub use ensemble::{vacuum_ensemble, PhasorEnsemble, MIN_SAMPLES};
pub use measure::{
    default_quanta_scale, power_cut, readout_histograms, squeezing_vs_operating_point,
    squeezing_vs_theta, squeezing_with, MonteCarlo, QuadratureHistogram, SqueezeResult,
    DEFAULT_N_THETA, DEFAULT_SAMPLES,
};
