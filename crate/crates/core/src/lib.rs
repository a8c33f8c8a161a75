//! Local Lindblad-bath qubit channels and entanglement sudden death.
//!
//! The crate builds the thermal, squeezed-thermal and QND single-qubit
//! channels, evolves entangled states under them, and locates the time at
//! which a channel's Choi state becomes separable. Because of the
//! concurrence factorization law that time bounds the disentanglement time
//! of every pure two-qubit (and d⊗2) state, and via sequential one-sided
//! application, of every n-qubit state.
//!
//! Module map:
//!
//! * [`matlin`]: dense complex linear algebra.
//! * [`states`]: density matrices, pure states and their constructors.
//! * [`channels`]: generators, propagators, closed forms, Choi states.
//! * [`entanglement`]: concurrence, PPT/negativity, entanglement of formation.
//! * [`esd`]: separability-transition search and certificates.
//! * [`cli`]: the command-line front end used by the `lindblad-esd` binary.

pub mod channels;
pub mod cli;
pub mod entanglement;
mod error;
pub mod esd;
pub mod matlin;
pub mod states;

pub use channels::{BathParams, Superoperator};
pub use entanglement::Concurrence;
pub use error::{Error, Result};
pub use esd::{ChannelFamily, EsdReport};
pub use matlin::{ComplexMatrix, C64};
pub use states::{DensityMatrix, PureState};
