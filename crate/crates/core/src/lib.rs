//! Exact computations for chromatic homotopy theory at height one and an
//! odd prime: continuous cohomology of `Z_p^×`, the spectral sequence of the
//! `p`-adic filtration with its differentials and chart, a Mahler-basis model
//! of `E_0 KU`, derived limits of towers, and cobar Ext of exterior Hopf
//! algebras.

pub mod chart;
pub mod cli;
pub mod cobar;
pub mod field;
pub mod gmod;
pub mod grpcoh;
pub mod mahler;
pub mod padic;
pub mod ssq;
pub mod towers;
