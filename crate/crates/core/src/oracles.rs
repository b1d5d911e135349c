//! Reference concurrence computations used to cross-check the tensor engine.
//!
//! Nothing here calls into [`crate::tensor`].

use nalgebra::{DMatrix, Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::localops::{regroup, trace_to_pair, DensityMatrix, PartyGrouping};
use crate::state::StateVector;
use crate::states;

/// The two-qubit spin flip `|Ψ̃⟩ = (σ_y ⊗ σ_y)|Ψ*⟩`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpinFlip;

impl SpinFlip {
    pub fn sigma_y() -> Matrix2<Complex64> {
        let z = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        Matrix2::new(z, -i, i, z)
    }

    /// `σ_y ⊗ σ_y` as a 4×4 matrix.
    pub fn operator() -> Matrix4<Complex64> {
        let y = Self::sigma_y();
        Matrix4::from_fn(|r, c| y[(r / 2, c / 2)] * y[(r % 2, c % 2)])
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        check_two_qubits(state)?;
        let yy = Self::operator();
        let conj = nalgebra::Vector4::from_iterator(state.amplitudes().iter().map(|a| a.conj()));
        let flipped = yy * conj;
        StateVector::new(state.structure().clone(), flipped.iter().copied().collect())
    }

    /// `(σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y)`.
    pub fn apply_density(&self, rho: &Matrix4<Complex64>) -> Matrix4<Complex64> {
        let yy = Self::operator();
        yy * rho.conjugate() * yy
    }
}

fn check_two_qubits(state: &StateVector) -> Result<()> {
    if state.dims() != [2, 2] {
        return Err(Error::Dimension(format!(
            "expected a two-qubit state, got dims {:?}",
            state.dims()
        )));
    }
    Ok(())
}

/// `|⟨Ψ|Ψ̃⟩|` for a pure two-qubit state.
pub fn concurrence_pure_2qubit(state: &StateVector) -> Result<f64> {
    let flipped = SpinFlip.apply(state)?;
    Ok(state.overlap(&flipped))
}

/// Generalized bipartite concurrence `sqrt(2(1 − Tr ρ_A²))` across a
/// two-block grouping.
pub fn concurrence_purity(state: &StateVector, bipartition: &PartyGrouping) -> Result<f64> {
    if bipartition.groups().len() != 2 {
        return Err(Error::Grouping(format!(
            "expected two blocks, got {}",
            bipartition.groups().len()
        )));
    }
    let grouped = regroup(state, bipartition)?;
    let (da, db) = (grouped.dims()[0], grouped.dims()[1]);
    let psi = DMatrix::from_row_slice(da, db, grouped.amplitudes());
    let rho_a = &psi * psi.adjoint();
    let purity: f64 = rho_a.iter().map(|z| z.norm_sqr()).sum();
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt())
}

/// Eigenvalues of `ρ` at or below this are treated as exact zeros.
const RANK_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`.
///
/// The `λ_i` (square roots of the eigenvalues of `ρ ρ̃`) are computed as the
/// singular values of `τ = Xᵀ (σ_y ⊗ σ_y) X`, where the columns of `X` are
/// the subnormalized eigenvectors `√μ_i |v_i⟩` of `ρ`. Eigenvalues below
/// [`RANK_FLOOR`] are dropped so round-off never passes through a square
/// root.
pub fn concurrence_mixed_2qubit(rho: &DensityMatrix) -> f64 {
    let eig = SymmetricEigen::new(*rho.entries());
    let cols: Vec<nalgebra::Vector4<Complex64>> = (0..4)
        .filter(|&i| eig.eigenvalues[i] > RANK_FLOOR)
        .map(|i| eig.eigenvectors.column(i) * Complex64::new(eig.eigenvalues[i].sqrt(), 0.0))
        .collect();
    if cols.is_empty() {
        return 0.0;
    }
    let x = nalgebra::OMatrix::<Complex64, nalgebra::U4, nalgebra::Dyn>::from_columns(&cols);
    let tau = x.transpose() * SpinFlip::operator() * &x;
    let mut lambdas: Vec<f64> = tau.singular_values().iter().copied().collect();
    lambdas.resize(4, 0.0);
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

/// Mean of the squared Wootters concurrence over all pairs of `W_M`, each
/// pair obtained by tracing out the other `M − 2` qubits.
pub fn dur_average(m: usize) -> Result<f64> {
    if !(3..=10).contains(&m) {
        return Err(Error::Argument(format!("M must be in 3..=10, got {m}")));
    }
    let w = states::w(m)?;
    let mut total = 0.0;
    let mut count = 0usize;
    for a in 0..m {
        for b in a + 1..m {
            let rho = trace_to_pair(&w, (a, b))?;
            total += concurrence_mixed_2qubit(&rho).powi(2);
            count += 1;
        }
    }
    Ok(total / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ket::parse_ket;
    use crate::state::PartyStructure;

    #[test]
    fn pure_examples() {
        assert!((concurrence_pure_2qubit(&states::epr()).unwrap() - 1.0).abs() < 1e-15);
        let prod = parse_ket("(|0,0> + |0,1>)/sqrt(2)", None).unwrap();
        assert!(concurrence_pure_2qubit(&prod).unwrap() < 1e-15);
        let s = parse_ket("sqrt(0.9)|0,0> + sqrt(0.1)|1,1>", None).unwrap();
        assert!((concurrence_pure_2qubit(&s).unwrap() - 0.6).abs() < 1e-12);
        assert!(concurrence_pure_2qubit(&states::ghz(3).unwrap()).is_err());
    }

    #[test]
    fn flip_twice_is_identity() {
        let s = parse_ket("(|0,0> + i|0,1> - 2|1,0> + (1-i)|1,1>)/sqrt(8)", None).unwrap();
        let back = SpinFlip.apply(&SpinFlip.apply(&s).unwrap()).unwrap();
        assert!(s.approx_eq_up_to_phase(&back, 1e-15));
    }

    #[test]
    fn purity_examples() {
        let g = PartyGrouping::parse("1|2", 2).unwrap();
        assert!((concurrence_purity(&states::epr(), &g).unwrap() - 1.0).abs() < 1e-12);
        let g = PartyGrouping::parse("1|2,3", 3).unwrap();
        assert!((concurrence_purity(&states::ghz(3).unwrap(), &g).unwrap() - 1.0).abs() < 1e-12);
        let g3 = PartyGrouping::parse("1|2|3", 3).unwrap();
        assert!(concurrence_purity(&states::ghz(3).unwrap(), &g3).is_err());
    }

    #[test]
    fn mixed_examples() {
        assert!(concurrence_mixed_2qubit(&DensityMatrix::maximally_mixed()) < 1e-12);
        let rho = DensityMatrix::from_pure(&states::epr()).unwrap();
        assert!((concurrence_mixed_2qubit(&rho) - 1.0).abs() < 1e-9);
        let w3 = states::w(3).unwrap();
        let rho = trace_to_pair(&w3, (0, 1)).unwrap();
        assert!((concurrence_mixed_2qubit(&rho) - 2.0 / 3.0).abs() < 1e-9);
        let ghz = states::ghz(3).unwrap();
        assert!(concurrence_mixed_2qubit(&trace_to_pair(&ghz, (0, 2)).unwrap()) < 1e-9);
        let prod = StateVector::basis(PartyStructure::qubits(3).unwrap(), &[1, 0, 1]).unwrap();
        assert!(concurrence_mixed_2qubit(&trace_to_pair(&prod, (1, 2)).unwrap()) < 1e-9);
    }

    #[test]
    fn dur_average_values() {
        for (m, expected) in [(3, 4.0 / 9.0), (4, 0.25), (6, 1.0 / 9.0)] {
            assert!((dur_average(m).unwrap() - expected).abs() < 1e-9);
        }
        assert!(dur_average(2).is_err());
        assert!(dur_average(11).is_err());
    }
}
