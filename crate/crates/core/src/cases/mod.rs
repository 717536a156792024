//! Ready-made systems: a four-vehicle intersection protocol, a 30-bit
//! Boolean network with random initial sets, and LFSR key recovery.

mod boolean10;
mod intersection;
pub mod lfsr;

pub use boolean10::boolean10_model;
pub use intersection::intersection_model;
