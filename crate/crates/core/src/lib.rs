//! Synthesis of periodic drives for one-dimensional chains.
//!
//! A fixed nearest-neighbour chain, driven piecewise-constantly in its onsite
//! energies and (optionally) couplings, is steered so that its one-period
//! propagator equals `exp(-i H_target T)` for a target of arbitrary
//! connectivity. The crate provides the occupation bases ([`basis`]), the
//! Hamiltonian builders ([`operators`]), dense unitary algebra ([`numerics`]),
//! the control optimizer ([`grape`]), named targets ([`targets`]) and Floquet
//! analysis including adiabatic sweeps ([`floquet`]).
//!
//! Units: energies in the chain coupling `J`, times in `1/J`, `ħ = 1`.

pub mod basis;
pub mod error;
pub mod floquet;
pub mod grape;
pub mod io;
pub mod numerics;
pub mod operators;
pub mod targets;

pub use basis::{Basis, Occupation, Sector, Statistics};
pub use error::{Error, Result};
pub use numerics::{CMatrix, CVector, EigenSystem, UnitaryOperator};
pub use operators::{CouplingGraph, HermitianOperator, PauliTermList, Space};
