//! Closed-form reference values for the named example states, runnable as a
//! self-check.

use crate::error::Result;
use crate::localops::{
    apply_all, apply_local, measure_party, regroup, LocalUnitary, PartyGrouping,
};
use crate::oracles::{concurrence_pure_2qubit, dur_average};
use crate::state::StateVector;
use crate::states;
use crate::supremum::{maximize_component, OptimizerConfig};
use crate::tensor::{
    component, full_tensor, separability_scan, NormalizationScheme, SubsetSelector,
};

/// Tolerance for directly evaluated components.
pub const DIRECT_TOL: f64 = 1e-12;
/// Tolerance for values produced through eigen-decompositions.
pub const ORACLE_TOL: f64 = 1e-9;
/// Tolerance for optimizer results.
pub const OPTIMIZER_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureResult {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    /// `false` for checks of the form `actual >= expected - tolerance`.
    pub two_sided: bool,
}

impl FixtureResult {
    pub fn passed(&self) -> bool {
        if self.two_sided {
            (self.actual - self.expected).abs() <= self.tolerance
        } else {
            self.actual >= self.expected - self.tolerance
        }
    }
}

struct Collector {
    out: Vec<FixtureResult>,
}

impl Collector {
    fn eq(&mut self, name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) {
        self.out.push(FixtureResult {
            name: name.into(),
            expected,
            actual,
            tolerance,
            two_sided: true,
        });
    }

    fn at_least(&mut self, name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) {
        self.out.push(FixtureResult {
            name: name.into(),
            expected,
            actual,
            tolerance,
            two_sided: false,
        });
    }

    /// Every component of `state` against `expected(subset_one_based)`.
    fn report(
        &mut self,
        label: &str,
        state: &StateVector,
        expected: impl Fn(&[usize]) -> f64,
    ) -> Result<()> {
        let r = full_tensor(state, &NormalizationScheme::default(), None)?;
        for (k, v) in &r.components {
            let e = expected(&k.one_based());
            self.eq(format!("{label} {k}"), e, *v, DIRECT_TOL);
        }
        Ok(())
    }
}

/// Runs every fixture. The optimizer fixture uses a fixed seed.
pub fn run_all() -> Result<Vec<FixtureResult>> {
    let mut c = Collector { out: Vec::new() };
    let scheme = NormalizationScheme::default();

    let epr = states::epr();
    c.eq(
        "EPR c{1,2}",
        1.0,
        component(&epr, &SubsetSelector::new(vec![0, 1], 2)?, &scheme)?,
        DIRECT_TOL,
    );
    c.eq(
        "EPR spin-flip concurrence",
        1.0,
        concurrence_pure_2qubit(&epr)?,
        DIRECT_TOL,
    );

    let w3 = states::w(3)?;
    let r23 = (2.0f64 / 3.0).sqrt();
    c.report("W3", &w3, |s| if s.len() == 2 { r23 } else { 0.0 })?;

    let ghz = states::ghz(3)?;
    c.report("GHZ", &ghz, |s| if s.len() == 3 { 1.0 } else { 0.0 })?;

    let hghz = apply_local(&ghz, &LocalUnitary::hadamard(0))?;
    c.report("H1·GHZ", &hghz, |s| if s == [2, 3] { 1.0 } else { 0.0 })?;

    let wbar = apply_all(
        &ghz,
        &[
            LocalUnitary::hadamard(0),
            LocalUnitary::hadamard(1),
            LocalUnitary::hadamard(2),
        ],
    )?;
    c.report("H⊗3·GHZ", &wbar, |s| if s.len() == 2 { 1.0 } else { 0.0 })?;

    for outcome in 0..2 {
        let m = measure_party(&hghz, 0, outcome)?;
        c.eq(
            format!("H1·GHZ measure party 1 = {outcome}: probability"),
            0.5,
            m.probability,
            DIRECT_TOL,
        );
        let conc = match &m.state {
            Some(s) => concurrence_pure_2qubit(s)?,
            None => 0.0,
        };
        c.eq(
            format!("H1·GHZ measure party 1 = {outcome}: concurrence"),
            1.0,
            conc,
            DIRECT_TOL,
        );
    }

    let spect = states::ghz_with_spectator();
    c.report("GHZ⊗(|0>+|1>)", &spect, |s| {
        if s == [1, 2, 3] {
            1.0
        } else {
            0.0
        }
    })?;
    let detached = separability_scan(&spect, &scheme)?;
    c.eq(
        "GHZ⊗(|0>+|1>) party 4 detached",
        1.0,
        f64::from(u8::from(detached[3])),
        0.0,
    );

    let nested = states::nested();
    c.report("nested", &nested, |s| if s.len() == 2 { 1.0 } else { 0.0 })?;
    let grouped = regroup(&nested, &PartyGrouping::parse("1,2|3,4", 4)?)?;
    c.eq(
        "nested regrouped {1,2}|{3,4} c{1,2}",
        1.0,
        component(&grouped, &SubsetSelector::new(vec![0, 1], 2)?, &scheme)?,
        DIRECT_TOL,
    );

    for m in 3..=8 {
        let w = states::w(m)?;
        let expected = (2.0 / m as f64).sqrt();
        c.report(&format!("W{m}"), &w, |s| {
            if s.len() == 2 {
                expected
            } else {
                0.0
            }
        })?;
        c.eq(
            format!("W{m} traced pair average C^2"),
            4.0 / (m * m) as f64,
            dur_average(m)?,
            ORACLE_TOL,
        );
    }

    let cfg = OptimizerConfig {
        restarts: 8,
        seed: 7,
        ..Default::default()
    };
    let sup = maximize_component(&ghz, &SubsetSelector::new(vec![1, 2], 3)?, &scheme, &cfg)?;
    c.at_least(
        "GHZ sup c{2,3} (8 restarts)",
        1.0,
        sup.best_value,
        OPTIMIZER_TOL,
    );

    Ok(c.out)
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_fixtures_pass() {
        let results = super::run_all().unwrap();
        let failed: Vec<_> = results.iter().filter(|r| !r.passed()).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert!(results.len() > 100);
    }
}
