//! Entanglement tensor of pure multipartite qudit states.
//!
//! A state over parties with dimensions `N_1 … N_M` has one tensor component
//! for every subset of at least two parties. Components vanish for parties
//! that factor out of the state, are invariant under local phase gates, and
//! reduce to the generalized concurrence for two parties.
//!
//! ```
//! use etensor::{states, full_tensor, NormalizationScheme};
//!
//! let w3 = states::w(3).unwrap();
//! let report = full_tensor(&w3, &NormalizationScheme::default(), None).unwrap();
//! assert!((report.get_one_based(&[1, 2]).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
//! ```

pub mod coeffs;
pub mod error;
pub mod golden;
pub mod ket;
pub mod localops;
pub mod oracles;
pub mod random;
pub mod state;
pub mod states;
pub mod supremum;
pub mod tensor;

pub use error::{Error, Result};
pub use ket::{parse_ket, parse_ket_normalized};
pub use localops::{
    apply_all, apply_local, measure_party, reduced_density, regroup, trace_to_pair, ungroup,
    DensityMatrix, LocalUnitary, Measurement, PartyGrouping,
};
pub use nalgebra::DMatrix;
pub use num_complex::Complex64;
pub use oracles::{
    concurrence_mixed_2qubit, concurrence_pure_2qubit, concurrence_purity, dur_average, SpinFlip,
};
pub use state::{projection_probability, BasisProjection, PartyStructure, StateVector};
pub use supremum::{
    maximize_component, maximize_simultaneous, Objective, OptimizerConfig, RestartStats,
    SupremumResult,
};
pub use tensor::{
    component, full_tensor, permutation_difference, separability_scan, tensor_norm,
    NormalizationScheme, PermutationDifference, ReportJson, SubsetSelector, TensorReport,
};
