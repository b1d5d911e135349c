//! Named states used throughout the examples and fixtures.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{PartyStructure, StateVector};

fn from_terms(dims: Vec<usize>, terms: &[(&[usize], f64)]) -> Result<StateVector> {
    let structure = PartyStructure::new(dims)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); structure.total_dim()];
    for (tuple, coeff) in terms {
        amps[structure.flat_index(tuple)?] += Complex64::new(*coeff, 0.0);
    }
    StateVector::normalized(structure, amps)
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn epr() -> StateVector {
    let s = PartyStructure::qubits(2).expect("valid");
    let mut amps = vec![Complex64::new(0.0, 0.0); 4];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[3] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    StateVector::from_parts_unchecked(s, amps)
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `m` qubits.
pub fn ghz(m: usize) -> Result<StateVector> {
    if m < 2 {
        return Err(Error::Argument(format!(
            "GHZ needs at least 2 qubits, got {m}"
        )));
    }
    let s = PartyStructure::qubits(m)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); s.total_dim()];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[s.total_dim() - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Ok(StateVector::from_parts_unchecked(s, amps))
}

/// Equal superposition of the `m` single-excitation basis states.
pub fn w(m: usize) -> Result<StateVector> {
    if m < 2 {
        return Err(Error::Argument(format!(
            "W needs at least 2 qubits, got {m}"
        )));
    }
    let s = PartyStructure::qubits(m)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); s.total_dim()];
    let a = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
    for j in 0..m {
        amps[1 << (m - 1 - j)] = a;
    }
    Ok(StateVector::from_parts_unchecked(s, amps))
}

/// `(|000⟩ + |011⟩ + |101⟩ + |110⟩)/2`, the GHZ state after a Hadamard on
/// every qubit.
pub fn w_bar() -> StateVector {
    from_terms(
        vec![2, 2, 2],
        &[
            (&[0, 0, 0], 1.0),
            (&[0, 1, 1], 1.0),
            (&[1, 0, 1], 1.0),
            (&[1, 1, 0], 1.0),
        ],
    )
    .expect("valid")
}

/// `(|0110⟩ + |1001⟩ + |0111⟩ + |1000⟩)/2`, a three-qubit GHZ-type state
/// with a detached fourth qubit in `(|0⟩+|1⟩)/√2`.
pub fn ghz_with_spectator() -> StateVector {
    from_terms(
        vec![2, 2, 2, 2],
        &[
            (&[0, 1, 1, 0], 1.0),
            (&[1, 0, 0, 1], 1.0),
            (&[0, 1, 1, 1], 1.0),
            (&[1, 0, 0, 0], 1.0),
        ],
    )
    .expect("valid")
}

/// `([|00⟩+|11⟩]⊗[|01⟩+|10⟩] + [|01⟩+|10⟩]⊗[|00⟩+|11⟩]) / (2√2)`.
pub fn nested() -> StateVector {
    let phi = [[0, 0], [1, 1]];
    let psi = [[0, 1], [1, 0]];
    let mut terms: Vec<[usize; 4]> = Vec::new();
    for (a, b) in [(phi, psi), (psi, phi)] {
        for x in a {
            for y in b {
                terms.push([x[0], x[1], y[0], y[1]]);
            }
        }
    }
    let refs: Vec<(&[usize], f64)> = terms.iter().map(|t| (&t[..], 1.0)).collect();
    from_terms(vec![2, 2, 2, 2], &refs).expect("valid")
}

/// `(|110⟩ + |101⟩ + |011⟩ + |100⟩)/2`, carrying both pair and triple
/// components.
pub fn mixed_type() -> StateVector {
    from_terms(
        vec![2, 2, 2],
        &[
            (&[1, 1, 0], 1.0),
            (&[1, 0, 1], 1.0),
            (&[0, 1, 1], 1.0),
            (&[1, 0, 0], 1.0),
        ],
    )
    .expect("valid")
}
