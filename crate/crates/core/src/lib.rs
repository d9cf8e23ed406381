//! Capacity bounds for the two-qubit amplitude damping channel with an
//! arbitrary degree of memory.
//!
//! The channel interpolates between two independent uses of the single-qubit
//! amplitude damping channel (`mu = 0`) and fully correlated damping
//! (`mu = 1`). The crate provides
//!
//! - [`qmat`]: the small complex linear-algebra and entropy kernel,
//! - [`channel`]: Kraus, closed-form and dilation representations of the channel,
//! - [`ensembles`]: the two symmetrized input ensemble families,
//! - [`optimize`]: deterministic multistart Nelder–Mead on boxes and simplices,
//! - [`capacity`]: Holevo lower bounds, quantum-capacity bounds and the
//!   entanglement-assisted capacity, plus threshold finders,
//! - [`checks`]: randomized consistency suites for the channel,
//! - [`sweep`]: grid sweeps and their CSV/JSON encodings.

pub mod capacity;
pub mod channel;
pub mod checks;
pub mod ensembles;
pub mod error;
pub mod optimize;
pub mod qmat;
pub mod sweep;

pub use capacity::{Argmax, CapacityPoint, Quantity};
pub use channel::ChannelParams;
pub use error::{Error, Result};
pub use optimize::OptimizerConfig;
