//! Multi-start search for the supremum of tensor components over products of
//! local unitaries.
//!
//! Each restart starts from a set of local unitaries (the identity for
//! restart 0, Haar-random otherwise) and climbs the objective with
//! finite-difference gradient ascent. Unitaries are updated as
//! `U ← exp(iH) U` with `H` Hermitian, parameterized by `N²` reals per party.
//! A backtracking line search only ever accepts steps that increase the
//! objective.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::localops::{apply_all, LocalUnitary};
use crate::random::haar_unitary;
use crate::state::StateVector;
use crate::tensor::{component, NormalizationScheme, SubsetSelector};

/// Central finite-difference step.
const FD_STEP: f64 = 1e-6;
/// Sufficient-increase constant of the line search.
const ARMIJO: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Number of random starts, in addition to the identity start.
    pub restarts: usize,
    pub max_iters: usize,
    pub step_tol: f64,
    pub value_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 500,
            step_tol: 1e-8,
            value_tol: 1e-10,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Argument("max_iters must be positive".into()));
        }
        let positive = |x: f64| x > 0.0;
        if !positive(self.step_tol) || !positive(self.value_tol) {
            return Err(Error::Argument("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// How several components are combined into one objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    #[default]
    Min,
    Mean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartStats {
    pub start_value: f64,
    pub final_value: f64,
    pub iterations: usize,
    /// Objective after every accepted step, starting with the initial value.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupremumResult {
    pub best_value: f64,
    /// One unitary per party, in party order.
    pub unitaries: Vec<LocalUnitary>,
    /// Index into `restarts` of the winning run; 0 is the identity start.
    pub best_restart: usize,
    pub restarts: Vec<RestartStats>,
}

impl SupremumResult {
    /// Applies the winning unitaries to `state`.
    pub fn transformed(&self, state: &StateVector) -> Result<StateVector> {
        apply_all(state, &self.unitaries)
    }
}

struct Problem<'a> {
    state: &'a StateVector,
    subsets: &'a [SubsetSelector],
    scheme: &'a NormalizationScheme,
    objective: Objective,
}

impl Problem<'_> {
    fn value(&self, unitaries: &[LocalUnitary]) -> f64 {
        let s = apply_all(self.state, unitaries).expect("dimensions checked up front");
        let values = self
            .subsets
            .iter()
            .map(|sub| component(&s, sub, self.scheme).expect("subsets checked up front"));
        match self.objective {
            Objective::Min => values.fold(f64::INFINITY, f64::min),
            Objective::Mean => values.sum::<f64>() / self.subsets.len() as f64,
        }
    }
}

/// `exp(iH)` for the Hermitian `H` encoded by `params` (`n` diagonal reals,
/// then real and imaginary parts of the upper triangle).
fn exp_hermitian(params: &[f64], n: usize, scale: f64) -> DMatrix<Complex64> {
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = Complex64::new(params[i] * scale, 0.0);
    }
    let mut idx = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = Complex64::new(params[idx], params[idx + 1]) * scale;
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            idx += 2;
        }
    }
    let eig = SymmetricEigen::new(h);
    let phases = DVector::from_iterator(
        n,
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, l)),
    );
    &eig.eigenvectors * DMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint()
}

/// `exp(i·scale·H(params_j)) U_j` for every party.
fn step(current: &[LocalUnitary], params: &[f64], scale: f64) -> Vec<LocalUnitary> {
    let mut offset = 0;
    current
        .iter()
        .map(|u| {
            let n = u.dim();
            let e = exp_hermitian(&params[offset..offset + n * n], n, scale);
            offset += n * n;
            LocalUnitary::from_matrix_unchecked(u.party(), e * u.matrix())
        })
        .collect()
}

fn ascend(
    problem: &Problem<'_>,
    start: Vec<LocalUnitary>,
    config: &OptimizerConfig,
) -> (RestartStats, Vec<LocalUnitary>) {
    let num_params: usize = start.iter().map(|u| u.dim() * u.dim()).sum();
    let mut current = start;
    let mut value = problem.value(&current);
    let start_value = value;
    let mut history = vec![value];
    let mut t = 1.0;
    let mut iterations = 0;
    let mut e = vec![0.0; num_params];
    for _ in 0..config.max_iters {
        iterations += 1;
        let grad: Vec<f64> = (0..num_params)
            .map(|p| {
                e[p] = 1.0;
                let plus = problem.value(&step(&current, &e, FD_STEP));
                let minus = problem.value(&step(&current, &e, -FD_STEP));
                e[p] = 0.0;
                (plus - minus) / (2.0 * FD_STEP)
            })
            .collect();
        let gnorm_sq: f64 = grad.iter().map(|g| g * g).sum();
        let gnorm = gnorm_sq.sqrt();
        if gnorm == 0.0 || !gnorm.is_finite() {
            break;
        }
        let mut accepted = None;
        while t * gnorm >= config.step_tol {
            let cand = step(&current, &grad, t);
            let v = problem.value(&cand);
            if v > value && v >= value + ARMIJO * t * gnorm_sq {
                accepted = Some((cand, v));
                break;
            }
            t *= 0.5;
        }
        // Kinks of the objective can defeat the sufficient-increase test; any
        // strict increase at the smallest step is still taken.
        let Some((cand, v)) = accepted.or_else(|| {
            let cand = step(&current, &grad, t);
            let v = problem.value(&cand);
            (v > value).then_some((cand, v))
        }) else {
            break;
        };
        let gain = v - value;
        current = cand;
        value = v;
        history.push(value);
        if gain < config.value_tol {
            break;
        }
        t = (t * 2.0).min(1e3);
    }
    (
        RestartStats {
            start_value,
            final_value: value,
            iterations,
            history,
        },
        current,
    )
}

/// Maximizes the min (or mean) of several components over local unitaries.
pub fn maximize_simultaneous(
    state: &StateVector,
    subsets: &[SubsetSelector],
    scheme: &NormalizationScheme,
    objective: Objective,
    config: &OptimizerConfig,
) -> Result<SupremumResult> {
    config.validate()?;
    if subsets.is_empty() {
        return Err(Error::Argument("at least one subset is required".into()));
    }
    for s in subsets {
        component(state, s, scheme)?;
    }
    let problem = Problem {
        state,
        subsets,
        scheme,
        objective,
    };
    let dims = state.dims().to_vec();

    let runs: Vec<(RestartStats, Vec<LocalUnitary>)> = (0..=config.restarts)
        .into_par_iter()
        .map(|r| {
            let start: Vec<LocalUnitary> = if r == 0 {
                dims.iter()
                    .enumerate()
                    .map(|(j, &n)| LocalUnitary::identity(j, n))
                    .collect()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(r as u64);
                dims.iter()
                    .enumerate()
                    .map(|(j, &n)| {
                        LocalUnitary::from_matrix_unchecked(j, haar_unitary(n, &mut rng))
                    })
                    .collect()
            };
            ascend(&problem, start, config)
        })
        .collect();

    let mut best = 0;
    for (i, (stats, _)) in runs.iter().enumerate() {
        if stats.final_value > runs[best].0.final_value {
            best = i;
        }
    }
    let best_value = runs[best].0.final_value;
    let unitaries = runs[best].1.clone();
    Ok(SupremumResult {
        best_value,
        unitaries,
        best_restart: best,
        restarts: runs.into_iter().map(|(s, _)| s).collect(),
    })
}

/// Maximizes a single component over local unitaries.
pub fn maximize_component(
    state: &StateVector,
    subset: &SubsetSelector,
    scheme: &NormalizationScheme,
    config: &OptimizerConfig,
) -> Result<SupremumResult> {
    maximize_simultaneous(
        state,
        std::slice::from_ref(subset),
        scheme,
        Objective::Min,
        config,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;

    #[test]
    fn exp_hermitian_is_unitary() {
        let params = [0.3, -1.2, 0.5, 0.7];
        let u = exp_hermitian(&params, 2, 1.0);
        let dev = (u.adjoint() * &u - DMatrix::identity(2, 2)).norm();
        assert!(dev < 1e-13);
        let id = exp_hermitian(&params, 2, 0.0);
        assert!((id - DMatrix::<Complex64>::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let mut c = OptimizerConfig::default();
        assert!(c.validate().is_ok());
        c.step_tol = 0.0;
        assert!(c.validate().is_err());
        c = OptimizerConfig {
            max_iters: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn empty_subset_list_is_rejected() {
        let ghz = states::ghz(3).unwrap();
        let r = maximize_simultaneous(
            &ghz,
            &[],
            &NormalizationScheme::default(),
            Objective::Min,
            &OptimizerConfig::default(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn identity_start_on_separable_pair() {
        let ghz = states::ghz(3).unwrap();
        let cfg = OptimizerConfig {
            restarts: 0,
            max_iters: 20,
            ..Default::default()
        };
        let sub = SubsetSelector::new(vec![1, 2], 3).unwrap();
        let r = maximize_component(&ghz, &sub, &NormalizationScheme::default(), &cfg).unwrap();
        assert_eq!(r.restarts.len(), 1);
        assert!(r.best_value >= 0.0);
    }
}
