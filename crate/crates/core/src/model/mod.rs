//! Physical constants, device description and the steady-state Kerr
//! input–output map.

pub mod constants;
pub mod cubic;
pub mod device;
pub mod steady;

pub use constants::{PhysConstants, CODATA, HBAR, K_B};
pub use device::{critical_params, kerr_constant, CriticalParams, DeviceParams, SquidGeometry};
pub use steady::{
    linear_response, solve_photon_number, steady_output, steady_output_with_state, Branch,
    Jacobian, Phasor, SteadyState,
};
