//! Operations local to individual parties: unitaries, computational basis
//! measurement, regrouping of parties, and partial traces.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{PartyStructure, StateVector};

/// Tolerance on `U†U = I` for [`LocalUnitary`].
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// Below this probability a measurement outcome is reported as impossible.
pub const OUTCOME_FLOOR: f64 = 1e-14;

/// A unitary acting on one party.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitary {
    party: usize,
    matrix: DMatrix<Complex64>,
}

impl LocalUnitary {
    pub fn new(party: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() < 2 {
            return Err(Error::Dimension(format!(
                "local unitary must be square with size >= 2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n = matrix.nrows();
        let dev = (matrix.adjoint() * &matrix - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { party, matrix })
    }

    pub fn identity(party: usize, n: usize) -> Self {
        Self {
            party,
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn hadamard(party: usize) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0),
            ],
        );
        Self { party, matrix: m }
    }

    /// Diagonal `Σ_k e^{iφ_k} |k⟩⟨k|`.
    pub fn phase(party: usize, phases: &[f64]) -> Result<Self> {
        if phases.len() < 2 {
            return Err(Error::Dimension(
                "phase gate needs at least two phases".into(),
            ));
        }
        let diag: Vec<Complex64> = phases
            .iter()
            .map(|&p| Complex64::from_polar(1.0, p))
            .collect();
        Ok(Self {
            party,
            matrix: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)),
        })
    }

    pub fn party(&self) -> usize {
        self.party
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            party: self.party,
            matrix: self.matrix.adjoint(),
        }
    }

    pub(crate) fn from_matrix_unchecked(party: usize, matrix: DMatrix<Complex64>) -> Self {
        Self { party, matrix }
    }
}

/// Applies `unitary` to its party.
pub fn apply_local(state: &StateVector, unitary: &LocalUnitary) -> Result<StateVector> {
    let structure = state.structure();
    structure.check_party(unitary.party)?;
    let n = structure.dim(unitary.party);
    if unitary.dim() != n {
        return Err(Error::Dimension(format!(
            "{}x{} unitary on party {} of dimension {}",
            unitary.dim(),
            unitary.dim(),
            unitary.party + 1,
            n
        )));
    }
    let stride = structure.strides()[unitary.party];
    let block = stride * n;
    let amps = state.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    let u = &unitary.matrix;
    for outer in (0..amps.len()).step_by(block) {
        for inner in 0..stride {
            let base = outer + inner;
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += u[(i, k)] * amps[base + k * stride];
                }
                out[base + i * stride] = acc;
            }
        }
    }
    Ok(StateVector::from_parts_unchecked(structure.clone(), out))
}

/// Applies several local unitaries in order.
pub fn apply_all(state: &StateVector, unitaries: &[LocalUnitary]) -> Result<StateVector> {
    let mut s = state.clone();
    for u in unitaries {
        s = apply_local(&s, u)?;
    }
    Ok(s)
}

/// Outcome of measuring one party in its computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub probability: f64,
    /// Renormalized state of the remaining parties; `None` when the outcome
    /// has probability below [`OUTCOME_FLOOR`]. Party labels are carried
    /// over from the original state.
    pub state: Option<StateVector>,
}

pub fn measure_party(state: &StateVector, party: usize, outcome: usize) -> Result<Measurement> {
    let structure = state.structure();
    structure.check_party(party)?;
    let n = structure.dim(party);
    if outcome >= n {
        return Err(Error::IndexOutOfRange(format!(
            "outcome {} for party {} of dimension {}",
            outcome,
            party + 1,
            n
        )));
    }
    if structure.num_parties() < 2 {
        return Err(Error::Argument(
            "cannot measure the only party of a state".into(),
        ));
    }
    let stride = structure.strides()[party];
    let block = stride * n;
    let amps = state.amplitudes();
    let mut rest = Vec::with_capacity(amps.len() / n);
    for outer in (0..amps.len()).step_by(block) {
        let start = outer + outcome * stride;
        rest.extend_from_slice(&amps[start..start + stride]);
    }
    let probability: f64 = rest.iter().map(|a| a.norm_sqr()).sum();
    if probability < OUTCOME_FLOOR {
        return Ok(Measurement {
            probability: 0.0,
            state: None,
        });
    }
    let mut dims = structure.dims().to_vec();
    let mut labels = structure.labels().to_vec();
    dims.remove(party);
    labels.remove(party);
    let remaining = PartyStructure::with_labels(dims, labels)?;
    let conditioned = StateVector::normalized(remaining, rest)?;
    Ok(Measurement {
        probability,
        state: Some(conditioned),
    })
}

/// A partition of the parties into ordered blocks that act as merged parties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartyGrouping {
    groups: Vec<Vec<usize>>,
}

impl PartyGrouping {
    pub fn new(groups: Vec<Vec<usize>>, num_parties: usize) -> Result<Self> {
        let mut seen = vec![false; num_parties];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::Grouping("empty block".into()));
            }
            for &p in g {
                if p >= num_parties {
                    return Err(Error::Grouping(format!(
                        "party {} does not exist in a {}-party state",
                        p + 1,
                        num_parties
                    )));
                }
                if seen[p] {
                    return Err(Error::Grouping(format!("party {} appears twice", p + 1)));
                }
                seen[p] = true;
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(Error::Grouping(format!(
                "party {} is not assigned to a block",
                p + 1
            )));
        }
        Ok(Self { groups })
    }

    /// Parses `"1,2|3,4"` (1-based).
    pub fn parse(text: &str, num_parties: usize) -> Result<Self> {
        let groups = text
            .split('|')
            .map(|block| {
                block
                    .split(',')
                    .map(|p| {
                        let v: usize = p.trim().parse().map_err(|_| {
                            Error::Grouping(format!("'{}' is not a party label", p.trim()))
                        })?;
                        v.checked_sub(1)
                            .ok_or_else(|| Error::Grouping("party labels start at 1".into()))
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(groups, num_parties)
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }
}

fn grouped_structure(
    structure: &PartyStructure,
    grouping: &PartyGrouping,
) -> Result<PartyStructure> {
    let dims = grouping
        .groups
        .iter()
        .map(|g| g.iter().map(|&p| structure.dim(p)).product())
        .collect();
    let labels = grouping
        .groups
        .iter()
        .map(|g| {
            g.iter()
                .map(|&p| structure.labels()[p].as_str())
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect();
    PartyStructure::with_labels(dims, labels)
}

/// Flat index in the grouped layout for each flat index of the original.
fn group_permutation(structure: &PartyStructure, grouping: &PartyGrouping) -> Vec<usize> {
    let dims = structure.dims();
    (0..structure.total_dim())
        .map(|flat| {
            let tuple = structure.tuple_of(flat).expect("in range");
            grouping.groups.iter().fold(0usize, |acc, g| {
                let block_dim: usize = g.iter().map(|&p| dims[p]).product();
                let block_index = g.iter().fold(0usize, |b, &p| b * dims[p] + tuple[p]);
                acc * block_dim + block_index
            })
        })
        .collect()
}

/// Re-indexes a state so that each block of `grouping` becomes one party.
pub fn regroup(state: &StateVector, grouping: &PartyGrouping) -> Result<StateVector> {
    let structure = state.structure();
    if grouping.groups.iter().flatten().count() != structure.num_parties() {
        return Err(Error::Grouping("grouping does not match the state".into()));
    }
    let target = grouped_structure(structure, grouping)?;
    let perm = group_permutation(structure, grouping);
    let mut out = vec![Complex64::new(0.0, 0.0); perm.len()];
    for (src, &dst) in perm.iter().enumerate() {
        out[dst] = state.amplitudes()[src];
    }
    Ok(StateVector::from_parts_unchecked(target, out))
}

/// Inverse of [`regroup`], restoring the original party structure.
pub fn ungroup(
    state: &StateVector,
    grouping: &PartyGrouping,
    original: &PartyStructure,
) -> Result<StateVector> {
    let expected = grouped_structure(original, grouping)?;
    if expected.dims() != state.dims() {
        return Err(Error::Grouping(format!(
            "state has dims {:?}, grouping of the original gives {:?}",
            state.dims(),
            expected.dims()
        )));
    }
    let perm = group_permutation(original, grouping);
    let out = perm.iter().map(|&dst| state.amplitudes()[dst]).collect();
    Ok(StateVector::from_parts_unchecked(original.clone(), out))
}

/// Reduced density operator on the `keep` parties, in the order given.
pub fn reduced_density(state: &StateVector, keep: &[usize]) -> Result<DMatrix<Complex64>> {
    let structure = state.structure();
    let m = structure.num_parties();
    let mut seen = vec![false; m];
    for &p in keep {
        structure.check_party(p)?;
        if seen[p] {
            return Err(Error::Argument(format!("party {} kept twice", p + 1)));
        }
        seen[p] = true;
    }
    let traced: Vec<usize> = (0..m).filter(|p| !seen[*p]).collect();
    let mut order = keep.to_vec();
    order.extend(&traced);
    let grouping = if traced.is_empty() {
        PartyGrouping::new(vec![order], m)?
    } else {
        PartyGrouping::new(vec![keep.to_vec(), traced], m)?
    };
    let grouped = regroup(state, &grouping)?;
    let dk = grouped.dims()[0];
    let dt = grouped.amplitudes().len() / dk;
    let psi = DMatrix::from_row_slice(dk, dt, grouped.amplitudes());
    Ok(&psi * psi.adjoint())
}

/// A validated two-qubit density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Matrix4<Complex64>,
}

impl DensityMatrix {
    pub fn new(entries: Matrix4<Complex64>) -> Result<Self> {
        let herm = (entries - entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm > 1e-10 {
            return Err(Error::Density(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = entries.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::Density(format!("trace is {tr}, not 1")));
        }
        let herm_part = (entries + entries.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(herm_part);
        let min = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -1e-9 {
            return Err(Error::Density(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { entries })
    }

    pub fn from_pure(state: &StateVector) -> Result<Self> {
        if state.dims() != [2, 2] {
            return Err(Error::Dimension("expected a two-qubit state".into()));
        }
        let v = nalgebra::Vector4::from_column_slice(state.amplitudes());
        Self::new(v * v.adjoint())
    }

    pub fn maximally_mixed() -> Self {
        Self {
            entries: Matrix4::identity() * Complex64::new(0.25, 0.0),
        }
    }

    pub fn entries(&self) -> &Matrix4<Complex64> {
        &self.entries
    }
}

/// Partial trace onto two qubit parties (`keep.0` is the first factor).
pub fn trace_to_pair(state: &StateVector, keep: (usize, usize)) -> Result<DensityMatrix> {
    let structure = state.structure();
    structure.check_party(keep.0)?;
    structure.check_party(keep.1)?;
    if structure.dim(keep.0) != 2 || structure.dim(keep.1) != 2 {
        return Err(Error::Dimension("both kept parties must be qubits".into()));
    }
    let rho = reduced_density(state, &[keep.0, keep.1])?;
    DensityMatrix::new(Matrix4::from_fn(|i, j| rho[(i, j)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ket::parse_ket;
    use crate::states;

    fn close(a: &StateVector, b: &StateVector, tol: f64) -> bool {
        a.dims() == b.dims()
            && a.amplitudes()
                .iter()
                .zip(b.amplitudes())
                .all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn unitary_validation() {
        let bad = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(
            LocalUnitary::new(0, bad),
            Err(Error::NotUnitary(_))
        ));
        let rect = DMatrix::from_element(2, 3, Complex64::new(0.0, 0.0));
        assert!(matches!(
            LocalUnitary::new(0, rect),
            Err(Error::Dimension(_))
        ));
        let h = LocalUnitary::hadamard(0);
        assert!(LocalUnitary::new(0, h.matrix().clone()).is_ok());
    }

    #[test]
    fn hadamard_on_ghz() {
        let ghz = states::ghz(3).unwrap();
        let out = apply_local(&ghz, &LocalUnitary::hadamard(0)).unwrap();
        let expected = parse_ket("(|0,0,0> + |1,0,0> + |0,1,1> - |1,1,1>)/2", None).unwrap();
        assert!(close(&out, &expected, 1e-15));

        let all = apply_all(
            &ghz,
            &[
                LocalUnitary::hadamard(0),
                LocalUnitary::hadamard(1),
                LocalUnitary::hadamard(2),
            ],
        )
        .unwrap();
        assert!(close(&all, &states::w_bar(), 1e-15));
    }

    #[test]
    fn apply_errors() {
        let ghz = states::ghz(3).unwrap();
        assert!(apply_local(&ghz, &LocalUnitary::identity(3, 2)).is_err());
        assert!(apply_local(&ghz, &LocalUnitary::identity(0, 3)).is_err());
        assert_eq!(
            apply_local(&ghz, &LocalUnitary::identity(1, 2)).unwrap(),
            ghz
        );
    }

    #[test]
    fn measurement_branches() {
        let ghz = states::ghz(3).unwrap();
        let hg = apply_local(&ghz, &LocalUnitary::hadamard(0)).unwrap();
        let m0 = measure_party(&hg, 0, 0).unwrap();
        assert!((m0.probability - 0.5).abs() < 1e-15);
        let s0 = m0.state.unwrap();
        assert!(close(&s0, &states::epr(), 1e-15));
        assert_eq!(s0.structure().labels(), &["2".to_string(), "3".to_string()]);
        let m1 = measure_party(&hg, 0, 1).unwrap();
        let minus = parse_ket("(|0,0> - |1,1>)/sqrt(2)", None).unwrap();
        assert!(close(&m1.state.unwrap(), &minus, 1e-15));

        let w3 = states::w(3).unwrap();
        let m = measure_party(&w3, 2, 1).unwrap();
        assert!((m.probability - 1.0 / 3.0).abs() < 1e-15);
        let expected = StateVector::basis(PartyStructure::qubits(2).unwrap(), &[0, 0]).unwrap();
        assert!(close(&m.state.unwrap(), &expected, 1e-15));

        let basis = StateVector::basis(PartyStructure::qubits(2).unwrap(), &[0, 0]).unwrap();
        let m = measure_party(&basis, 0, 1).unwrap();
        assert_eq!(m.probability, 0.0);
        assert!(m.state.is_none());
        assert!(measure_party(&basis, 0, 2).is_err());
        assert!(measure_party(&basis, 2, 0).is_err());
    }

    #[test]
    fn grouping_validation() {
        assert!(PartyGrouping::new(vec![vec![0], vec![0, 1]], 2).is_err());
        assert!(PartyGrouping::new(vec![vec![0]], 2).is_err());
        assert!(PartyGrouping::new(vec![vec![0], vec![]], 1).is_err());
        assert!(PartyGrouping::parse("1,2|3,4", 4).is_ok());
        assert!(PartyGrouping::parse("0|1", 2).is_err());
        assert!(PartyGrouping::parse("1|x", 2).is_err());
    }

    #[test]
    fn regroup_examples() {
        let epr = states::epr();
        let g = PartyGrouping::parse("1|2", 2).unwrap();
        assert_eq!(regroup(&epr, &g).unwrap().amplitudes(), epr.amplitudes());

        let ghz = states::ghz(3).unwrap();
        let g = PartyGrouping::parse("1|2,3", 3).unwrap();
        let r = regroup(&ghz, &g).unwrap();
        assert_eq!(r.dims(), &[2, 4]);
        assert_eq!(r.structure().labels()[1], "2+3");

        let g = PartyGrouping::parse("3,1|2", 3).unwrap();
        let s = parse_ket("|1,0,1>", None).unwrap();
        let r = regroup(&s, &g).unwrap();
        // (k3, k1) = (1, 1) -> 3, k2 = 0.
        assert_eq!(r.amplitude(&[3, 0]).unwrap().re, 1.0);
        assert_eq!(ungroup(&r, &g, s.structure()).unwrap(), s);
    }

    #[test]
    fn pair_traces() {
        let ghz = states::ghz(3).unwrap();
        let rho = trace_to_pair(&ghz, (0, 1)).unwrap();
        let e = rho.entries();
        assert!((e[(0, 0)].re - 0.5).abs() < 1e-15 && (e[(3, 3)].re - 0.5).abs() < 1e-15);
        assert!(e[(0, 3)].norm() < 1e-15);
        let q = parse_ket("(|0,0> + |2,1>)/sqrt(2)", None).unwrap();
        assert!(trace_to_pair(&q, (0, 1)).is_err());
    }

    #[test]
    fn density_validation() {
        let mut m = Matrix4::<Complex64>::identity() * Complex64::new(0.25, 0.0);
        assert!(DensityMatrix::new(m).is_ok());
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        let m = Matrix4::<Complex64>::identity() * Complex64::new(0.5, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        let mut m = Matrix4::<Complex64>::zeros();
        m[(0, 0)] = Complex64::new(1.5, 0.0);
        m[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(DensityMatrix::new(m).is_err());
    }
}
