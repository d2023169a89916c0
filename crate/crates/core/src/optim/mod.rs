//! Convex optimization machinery and the alternating (seesaw) searches over
//! entanglement-assisted models.

pub mod correlator;
pub mod model;
pub mod nogo;
pub mod sdp;
pub mod seesaw;

pub use correlator::{
    pm_boundary_point, seesaw_correlator_boundary, seesaw_correlator_extreme, CorrelatorPoint,
};
pub use nogo::{unitary_nogo_check, unitary_pair_w2};
pub use sdp::{sdp_solve, IterTrace, LinearForm, SdpProblem, SdpSolution};
pub use seesaw::{seesaw_w2, SeesawConfig, SeesawOutcome};
