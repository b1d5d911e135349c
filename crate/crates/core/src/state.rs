//! Party structures, dense pure-state amplitude tensors and projection
//! probabilities.
//!
//! Party and basis indices are 0-based throughout the library. Amplitudes are
//! stored row-major with party 0 outermost, so the last party varies fastest.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed deviation of `Σ|α|²` from one when building a state.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Subsystem dimensions `N_1 … N_M` plus display labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartyStructure {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl PartyStructure {
    /// Builds a structure with default labels `"1"…"M"`.
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        let labels = (1..=dims.len()).map(|i| i.to_string()).collect();
        Self::with_labels(dims, labels)
    }

    pub fn with_labels(dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Structure("at least one party is required".into()));
        }
        if let Some(pos) = dims.iter().position(|&n| n < 2) {
            return Err(Error::Structure(format!(
                "party {} has dimension {}; every party needs dimension >= 2",
                pos + 1,
                dims[pos]
            )));
        }
        if labels.len() != dims.len() {
            return Err(Error::Structure(format!(
                "{} labels given for {} parties",
                labels.len(),
                dims.len()
            )));
        }
        dims.iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::Structure("total dimension overflows".into()))?;
        Ok(Self { dims, labels })
    }

    /// `M` qubits.
    pub fn qubits(m: usize) -> Result<Self> {
        Self::new(vec![2; m])
    }

    pub fn num_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, party: usize) -> usize {
        self.dims[party]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_all_qubits(&self) -> bool {
        self.dims.iter().all(|&n| n == 2)
    }

    /// Row-major strides, last party fastest.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for j in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * self.dims[j + 1];
        }
        strides
    }

    pub(crate) fn check_party(&self, party: usize) -> Result<()> {
        if party >= self.dims.len() {
            return Err(Error::IndexOutOfRange(format!(
                "party index {} but only {} parties",
                party,
                self.dims.len()
            )));
        }
        Ok(())
    }

    /// Maps an index tuple `(k_1,…,k_M)` to its flat position.
    pub fn flat_index(&self, tuple: &[usize]) -> Result<usize> {
        if tuple.len() != self.dims.len() {
            return Err(Error::IndexOutOfRange(format!(
                "tuple has {} components, structure has {} parties",
                tuple.len(),
                self.dims.len()
            )));
        }
        let mut flat = 0;
        for (j, (&k, &n)) in tuple.iter().zip(&self.dims).enumerate() {
            if k >= n {
                return Err(Error::IndexOutOfRange(format!(
                    "component {} of party {} exceeds dimension {}",
                    k,
                    j + 1,
                    n
                )));
            }
            flat = flat * n + k;
        }
        Ok(flat)
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn tuple_of(&self, flat: usize) -> Result<Vec<usize>> {
        let total = self.total_dim();
        if flat >= total {
            return Err(Error::IndexOutOfRange(format!(
                "flat index {} outside 0..{}",
                flat, total
            )));
        }
        let mut tuple = vec![0; self.dims.len()];
        let mut rest = flat;
        for j in (0..self.dims.len()).rev() {
            tuple[j] = rest % self.dims[j];
            rest /= self.dims[j];
        }
        Ok(tuple)
    }
}

impl fmt::Display for PartyStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "H({})", dims.join("x"))
    }
}

/// A normalized pure state over a [`PartyStructure`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    structure: PartyStructure,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state, rejecting amplitude vectors whose squared norm is not 1
    /// within [`NORM_TOLERANCE`].
    pub fn new(structure: PartyStructure, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(&structure, &amplitudes)?;
        let norm_sq = norm_sqr(&amplitudes);
        if norm_sq == 0.0 {
            return Err(Error::ZeroVector);
        }
        if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self {
            structure,
            amplitudes,
        })
    }

    /// Builds a state after dividing by the norm.
    pub fn normalized(structure: PartyStructure, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(&structure, &amplitudes)?;
        let norm_sq = norm_sqr(&amplitudes);
        if norm_sq == 0.0 || !norm_sq.is_finite() {
            return Err(Error::ZeroVector);
        }
        let inv = 1.0 / norm_sq.sqrt();
        amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(Self {
            structure,
            amplitudes,
        })
    }

    /// Computational basis state `|k_1,…,k_M⟩`.
    pub fn basis(structure: PartyStructure, tuple: &[usize]) -> Result<Self> {
        let flat = structure.flat_index(tuple)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); structure.total_dim()];
        amplitudes[flat] = Complex64::new(1.0, 0.0);
        Ok(Self {
            structure,
            amplitudes,
        })
    }

    /// Tensor product `self ⊗ other`, parties of `other` appended.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut dims = self.structure.dims.clone();
        dims.extend_from_slice(&other.structure.dims);
        let structure = PartyStructure::new(dims).expect("dims already validated");
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        StateVector {
            structure,
            amplitudes,
        }
    }

    pub(crate) fn from_parts_unchecked(
        structure: PartyStructure,
        amplitudes: Vec<Complex64>,
    ) -> Self {
        debug_assert_eq!(structure.total_dim(), amplitudes.len());
        Self {
            structure,
            amplitudes,
        }
    }

    pub fn structure(&self) -> &PartyStructure {
        &self.structure
    }

    pub fn num_parties(&self) -> usize {
        self.structure.num_parties()
    }

    pub fn dims(&self) -> &[usize] {
        self.structure.dims()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, tuple: &[usize]) -> Result<Complex64> {
        Ok(self.amplitudes[self.structure.flat_index(tuple)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// Relabels parties without touching amplitudes.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        self.structure = PartyStructure::with_labels(self.structure.dims.clone(), labels)?;
        Ok(self)
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }

    /// Equality up to a global phase, within `tol` on every amplitude.
    pub fn approx_eq_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        if self.structure.dims != other.structure.dims {
            return false;
        }
        let inner: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        if inner.norm() == 0.0 {
            return false;
        }
        let phase = inner / inner.norm();
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .all(|(a, b)| (a * phase - b).norm() <= tol)
    }
}

fn check_len(structure: &PartyStructure, amplitudes: &[Complex64]) -> Result<()> {
    if amplitudes.len() != structure.total_dim() {
        return Err(Error::Dimension(format!(
            "{} amplitudes for total dimension {}",
            amplitudes.len(),
            structure.total_dim()
        )));
    }
    Ok(())
}

fn norm_sqr(amplitudes: &[Complex64]) -> f64 {
    amplitudes.iter().map(|a| a.norm_sqr()).sum()
}

/// Probability of finding a fixed set of parties in given basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisProjection {
    pub fixed: BTreeMap<usize, usize>,
    pub probability: f64,
}

/// `p = Σ |α|²` over all amplitudes consistent with `fixed` (party → value).
pub fn projection_probability(
    state: &StateVector,
    fixed: &BTreeMap<usize, usize>,
) -> Result<BasisProjection> {
    let structure = state.structure();
    for (&party, &value) in fixed {
        structure.check_party(party)?;
        if value >= structure.dim(party) {
            return Err(Error::IndexOutOfRange(format!(
                "value {} for party {} exceeds dimension {}",
                value,
                party + 1,
                structure.dim(party)
            )));
        }
    }
    let strides = structure.strides();
    let dims = structure.dims();
    let probability = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(flat, _)| {
            fixed
                .iter()
                .all(|(&party, &value)| (flat / strides[party]) % dims[party] == value)
        })
        .map(|(_, a)| a.norm_sqr())
        .sum();
    Ok(BasisProjection {
        fixed: fixed.clone(),
        probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn flat_index_examples() {
        let s = PartyStructure::new(vec![2, 2, 2]).unwrap();
        assert_eq!(s.flat_index(&[1, 0, 1]).unwrap(), 5);
        let s = PartyStructure::new(vec![2, 3]).unwrap();
        assert_eq!(s.flat_index(&[1, 2]).unwrap(), 5);
        let s = PartyStructure::new(vec![2, 2]).unwrap();
        assert!(s.tuple_of(4).is_err());
        assert!(s.flat_index(&[0, 2]).is_err());
        assert!(s.flat_index(&[0]).is_err());
    }

    #[test]
    fn flat_tuple_bijection() {
        let s = PartyStructure::new(vec![3, 2, 4]).unwrap();
        for flat in 0..s.total_dim() {
            let t = s.tuple_of(flat).unwrap();
            assert_eq!(s.flat_index(&t).unwrap(), flat);
        }
    }

    #[test]
    fn structure_rejects_trivial_parties() {
        assert!(PartyStructure::new(vec![2, 1]).is_err());
        assert!(PartyStructure::new(vec![]).is_err());
        assert!(PartyStructure::with_labels(vec![2], vec![]).is_err());
    }

    #[test]
    fn constructor_checks_norm() {
        let s = PartyStructure::qubits(1).unwrap();
        assert!(matches!(
            StateVector::new(s.clone(), vec![c(1.0), c(1.0)]),
            Err(Error::NotNormalized { .. })
        ));
        assert_eq!(
            StateVector::new(s.clone(), vec![c(0.0), c(0.0)]),
            Err(Error::ZeroVector)
        );
        let v = StateVector::normalized(s, vec![c(1.0), c(1.0)]).unwrap();
        assert!((v.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn projection_examples() {
        let w3 = crate::states::w(3).unwrap();
        let p = projection_probability(&w3, &BTreeMap::from([(2, 0)])).unwrap();
        assert!((p.probability - 2.0 / 3.0).abs() < 1e-15);

        let ghz = crate::states::ghz(3).unwrap();
        let p = projection_probability(&ghz, &BTreeMap::from([(0, 0)])).unwrap();
        assert!((p.probability - 0.5).abs() < 1e-15);

        let p = projection_probability(&ghz, &BTreeMap::new()).unwrap();
        assert!((p.probability - 1.0).abs() < 1e-15);

        assert!(projection_probability(&ghz, &BTreeMap::from([(3, 0)])).is_err());
        assert!(projection_probability(&ghz, &BTreeMap::from([(0, 2)])).is_err());
    }

    #[test]
    fn tensor_product_layout() {
        let zero = StateVector::basis(PartyStructure::qubits(1).unwrap(), &[0]).unwrap();
        let one = StateVector::basis(PartyStructure::qubits(1).unwrap(), &[1]).unwrap();
        let t = zero.tensor(&one);
        assert_eq!(t.amplitude(&[0, 1]).unwrap(), c(1.0));
        assert_eq!(t.dims(), &[2, 2]);
    }
}
