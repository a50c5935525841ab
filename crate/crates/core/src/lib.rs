//! Steady-state photon statistics of a driven two-level atom coupled to a
//! high-frequency cavity mode, which is in turn coupled to a low-frequency
//! mode through a χ⁽²⁾ down-conversion term.
//!
//! The pipeline is: build a truncated [`hilbert::HilbertSpace`], assemble
//! the rotating-frame Hamiltonian ([`model`]) and the thermal Lindblad
//! generator ([`liouvillian`]), solve for the steady state ([`solver`]) and
//! read off `g²(0)`, photon numbers and populations ([`observables`]).
//! [`sweep`] runs that pipeline over parameter grids.

pub mod cli;
pub mod error;
pub mod hilbert;
pub mod liouvillian;
pub mod model;
pub mod observables;
pub mod solver;
pub mod sparse;
pub mod sweep;

pub use error::{Error, Result};
pub use hilbert::{make_space, Atom, BasisState, HilbertSpace, QOperator};
pub use liouvillian::{liouvillian, DensityMatrix, Superoperator};
pub use model::{cpb_condition, eigenfrequencies, hamiltonian, ConstrainedDetuning, SystemParams};
pub use observables::{g2_zero, mean_photon, population, Mode, ObservableSet};
pub use solver::{steady_state_direct, steady_state_evolved, SteadyStateResult};
