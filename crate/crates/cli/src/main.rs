//! `etensor`: entanglement tensor reports, local operations and supremum
//! search from the command line.

mod error;
mod gates;
mod input;
mod output;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use etensor::{
    apply_all, component, concurrence_mixed_2qubit, concurrence_pure_2qubit, concurrence_purity,
    dur_average, full_tensor, golden, maximize_simultaneous, measure_party, regroup, states,
    tensor::BASIS_NOTE, trace_to_pair, NormalizationScheme, Objective, OptimizerConfig,
    PartyGrouping, StateVector, SubsetSelector, TensorReport,
};
use serde::Serialize;
use serde_json::json;

use error::CliError;
use input::{parse_list, StateArgs};
use output::{fmt, print_json, print_table, r15, report_json, report_rows, state_json, state_rows};

#[derive(Debug, Parser)]
#[command(
    name = "etensor",
    version,
    about = "Entanglement tensor of pure multipartite states"
)]
struct Cli {
    /// Print an aligned table instead of JSON.
    #[arg(long, global = true)]
    table: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tensor components of a state.
    Compute {
        #[command(flatten)]
        input: StateArgs,
        /// Every subset of every size (the default when nothing else is asked for).
        #[arg(long)]
        all: bool,
        /// Subset sizes, e.g. "2,3".
        #[arg(long, value_name = "D,D,...", conflicts_with = "subset")]
        sizes: Option<String>,
        /// 1-based subset, e.g. "1,3". Repeatable.
        #[arg(long, value_name = "P,P,...")]
        subset: Vec<String>,
        /// Normalization constant for one subset size, e.g. "3=9". Repeatable.
        #[arg(long, value_name = "D=VALUE")]
        norm_const: Vec<String>,
    },
    /// Maximize components over local unitaries.
    Optimize {
        #[command(flatten)]
        input: StateArgs,
        /// 1-based subset to maximize. Repeat to maximize several at once.
        #[arg(long, value_name = "P,P,...", required = true)]
        subset: Vec<String>,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Min)]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = OptimizerConfig::default().restarts)]
        restarts: usize,
        #[arg(long, default_value_t = OptimizerConfig::default().max_iters)]
        iters: usize,
        #[arg(long, default_value_t = OptimizerConfig::default().step_tol)]
        step_tol: f64,
        #[arg(long, default_value_t = OptimizerConfig::default().value_tol)]
        value_tol: f64,
        #[arg(long, env = "ETENSOR_SEED", default_value_t = OptimizerConfig::default().seed)]
        seed: u64,
        #[arg(long, value_name = "D=VALUE")]
        norm_const: Vec<String>,
    },
    /// Measure one party in the computational basis.
    Measure {
        #[command(flatten)]
        input: StateArgs,
        /// 1-based party.
        #[arg(long)]
        party: usize,
        /// Basis value, 0-based.
        #[arg(long)]
        outcome: usize,
    },
    /// Apply local gates: H@P, PHASE(a,b,...)@P, U(file.json)@P.
    Apply {
        #[command(flatten)]
        input: StateArgs,
        #[arg(long, value_name = "GATE@P", required = true)]
        gate: Vec<String>,
        /// Print the tensor report of the result instead of its amplitudes.
        #[arg(long)]
        report: bool,
    },
    /// Merge parties into blocks, e.g. "1,2|3,4".
    Regroup {
        #[command(flatten)]
        input: StateArgs,
        #[arg(long)]
        groups: String,
        #[arg(long)]
        report: bool,
    },
    /// Reference concurrences computed without the tensor engine.
    Oracle {
        #[command(flatten)]
        input: StateArgs,
        #[arg(long, value_enum)]
        kind: OracleKind,
        /// Two-block bipartition for `purity`, e.g. "1|2,3".
        #[arg(long)]
        groups: Option<String>,
        /// Kept pair for `wootters`, e.g. "1,2".
        #[arg(long, value_name = "A,B")]
        pair: Option<String>,
        /// Number of qubits for `dur`.
        #[arg(long, value_name = "M")]
        m: Option<usize>,
    },
    /// Check every built-in reference value.
    PaperSuite,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Min,
    Mean,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OracleKind {
    SpinFlip,
    Purity,
    Wootters,
    Dur,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("etensor: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let table = cli.table;
    match cli.command {
        Command::Compute {
            input,
            all,
            sizes,
            subset,
            norm_const,
        } => {
            let state = input.load()?;
            let scheme = parse_scheme(&norm_const)?;
            let report = if !subset.is_empty() && !all {
                let subsets = parse_subsets(&subset, state.num_parties())?;
                let mut components = BTreeMap::new();
                for s in subsets {
                    let v = component(&state, &s, &scheme).map_err(CliError::compute)?;
                    components.insert(s, v);
                }
                TensorReport {
                    dims: state.dims().to_vec(),
                    labels: state.structure().labels().to_vec(),
                    components,
                    scheme,
                    basis_note: BASIS_NOTE.to_string(),
                }
            } else {
                let sizes = sizes
                    .as_deref()
                    .map(|s| parse_list(s, "subset size"))
                    .transpose()?;
                let m = state.num_parties();
                if let Some(bad) = sizes.iter().flatten().find(|&&d| d < 2 || d > m) {
                    return Err(CliError::Usage(format!(
                        "subset size {bad} outside 2..={m}"
                    )));
                }
                full_tensor(&state, &scheme, sizes.as_deref()).map_err(CliError::compute)?
            };
            emit_report(&report, table);
        }
        Command::Optimize {
            input,
            subset,
            objective,
            restarts,
            iters,
            step_tol,
            value_tol,
            seed,
            norm_const,
        } => {
            let state = input.load()?;
            let scheme = parse_scheme(&norm_const)?;
            let subsets = parse_subsets(&subset, state.num_parties())?;
            let config = OptimizerConfig {
                restarts,
                max_iters: iters,
                step_tol,
                value_tol,
                seed,
            };
            config.validate().map_err(CliError::usage)?;
            let objective_name = objective
                .to_possible_value()
                .expect("no skipped variants")
                .get_name()
                .to_string();
            let objective = match objective {
                ObjectiveArg::Min => Objective::Min,
                ObjectiveArg::Mean => Objective::Mean,
            };
            let result = maximize_simultaneous(&state, &subsets, &scheme, objective, &config)
                .map_err(CliError::compute)?;
            let best = result.transformed(&state).map_err(CliError::compute)?;
            let components: Vec<_> = subsets
                .iter()
                .map(|s| {
                    let before = component(&state, s, &scheme).map_err(CliError::compute)?;
                    let after = component(&best, s, &scheme).map_err(CliError::compute)?;
                    Ok(SubsetValues {
                        subset: s.one_based(),
                        initial: r15(before),
                        best: r15(after),
                    })
                })
                .collect::<Result<_, CliError>>()?;
            if table {
                let mut rows = vec![
                    ("best_value".to_string(), fmt(result.best_value)),
                    ("best_restart".to_string(), result.best_restart.to_string()),
                    ("seed".to_string(), seed.to_string()),
                ];
                for c in &components {
                    rows.push((
                        format!("c{{{}}}", join(&c.subset)),
                        format!("{} -> {}", c.initial, c.best),
                    ));
                }
                for (i, r) in result.restarts.iter().enumerate() {
                    rows.push((
                        format!("restart {i}"),
                        format!(
                            "{} -> {} ({} iters)",
                            fmt(r.start_value),
                            fmt(r.final_value),
                            r.iterations
                        ),
                    ));
                }
                print_table(&rows);
            } else {
                let restarts: Vec<_> = result
                    .restarts
                    .iter()
                    .map(|r| json!({"start_value": r15(r.start_value), "final_value": r15(r.final_value), "iterations": r.iterations}))
                    .collect();
                let unitaries: Vec<_> = result
                    .unitaries
                    .iter()
                    .map(|u| json!({"party": u.party() + 1, "matrix": output::matrix_json(u.matrix())}))
                    .collect();
                print_json(&json!({
                    "objective": objective_name,
                    "best_value": r15(result.best_value),
                    "best_restart": result.best_restart,
                    "seed": seed,
                    "components": components,
                    "unitaries": unitaries,
                    "restarts": restarts,
                }));
            }
        }
        Command::Measure {
            input,
            party,
            outcome,
        } => {
            let state = input.load()?;
            let p = to_party(party, state.num_parties())?;
            if outcome >= state.dims()[p] {
                return Err(CliError::Usage(format!(
                    "outcome {outcome} does not exist for party {party} of dimension {}",
                    state.dims()[p]
                )));
            }
            let m = measure_party(&state, p, outcome).map_err(CliError::usage)?;
            let report = match &m.state {
                Some(s) if s.num_parties() >= 2 => Some(
                    full_tensor(s, &NormalizationScheme::default(), None)
                        .map_err(CliError::compute)?,
                ),
                _ => None,
            };
            if table {
                let mut rows = vec![("probability".to_string(), fmt(m.probability))];
                if let Some(s) = &m.state {
                    rows.extend(state_rows(s));
                }
                if let Some(r) = &report {
                    rows.extend(report_rows(r).into_iter().skip(1));
                }
                print_table(&rows);
            } else {
                print_json(&json!({
                    "party": party,
                    "outcome": outcome,
                    "probability": r15(m.probability),
                    "labels": m.state.as_ref().map(|s| s.structure().labels().to_vec()),
                    "state": m.state.as_ref().map(state_json),
                    "report": report.as_ref().map(report_json),
                }));
            }
        }
        Command::Apply {
            input,
            gate,
            report,
        } => {
            let state = input.load()?;
            let gates = gate
                .iter()
                .map(|g| gates::parse_gate(g))
                .collect::<Result<Vec<_>, _>>()?;
            for (g, u) in gate.iter().zip(&gates) {
                let p = to_party(u.party() + 1, state.num_parties())?;
                if state.dims()[p] != u.dim() {
                    return Err(CliError::Usage(format!(
                        "gate '{g}' is {0}x{0} but party {1} has dimension {2}",
                        u.dim(),
                        p + 1,
                        state.dims()[p]
                    )));
                }
            }
            let out = apply_all(&state, &gates).map_err(CliError::compute)?;
            emit_state(&out, report, table)?;
        }
        Command::Regroup {
            input,
            groups,
            report,
        } => {
            let state = input.load()?;
            let g = PartyGrouping::parse(&groups, state.num_parties()).map_err(CliError::usage)?;
            let out = regroup(&state, &g).map_err(CliError::compute)?;
            emit_state(&out, report, table)?;
        }
        Command::Oracle {
            input,
            kind,
            groups,
            pair,
            m,
        } => oracle(&input, kind, groups, pair, m, table)?,
        Command::PaperSuite => {
            let results = golden::run_all().map_err(CliError::compute)?;
            let failed = results.iter().filter(|r| !r.passed()).count();
            for r in &results {
                let tag = if r.passed() { "PASS" } else { "FAIL" };
                let rel = if r.two_sided {
                    "expected"
                } else {
                    "expected at least"
                };
                println!(
                    "[{tag}] {}: {rel} {}, got {} (tol {:e})",
                    r.name,
                    fmt(r.expected),
                    fmt(r.actual),
                    r.tolerance
                );
            }
            println!(
                "{} of {} fixtures passed",
                results.len() - failed,
                results.len()
            );
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SubsetValues {
    subset: Vec<usize>,
    initial: f64,
    best: f64,
}

fn oracle(
    input: &StateArgs,
    kind: OracleKind,
    groups: Option<String>,
    pair: Option<String>,
    m: Option<usize>,
    table: bool,
) -> Result<(), CliError> {
    let scheme = NormalizationScheme::default();
    let mut rows: Vec<(String, f64)> = Vec::new();
    match kind {
        OracleKind::SpinFlip => {
            let state = input.load()?;
            let v = concurrence_pure_2qubit(&state).map_err(CliError::usage)?;
            let c = component(
                &state,
                &SubsetSelector::new(vec![0, 1], 2).map_err(CliError::usage)?,
                &scheme,
            )
            .map_err(CliError::compute)?;
            rows.push(("concurrence".into(), v));
            rows.push(("component".into(), c));
        }
        OracleKind::Purity => {
            let state = input.load()?;
            let text =
                groups.ok_or_else(|| CliError::Usage("--kind purity needs --groups".into()))?;
            let g = PartyGrouping::parse(&text, state.num_parties()).map_err(CliError::usage)?;
            let v = concurrence_purity(&state, &g).map_err(CliError::usage)?;
            let grouped = regroup(&state, &g).map_err(CliError::compute)?;
            let c = component(
                &grouped,
                &SubsetSelector::new(vec![0, 1], 2).map_err(CliError::usage)?,
                &scheme,
            )
            .map_err(CliError::compute)?;
            rows.push(("concurrence".into(), v));
            rows.push(("component".into(), c));
        }
        OracleKind::Wootters => {
            let state = input.load()?;
            let text =
                pair.ok_or_else(|| CliError::Usage("--kind wootters needs --pair".into()))?;
            let sub =
                SubsetSelector::from_one_based(&parse_list(&text, "party")?, state.num_parties())
                    .map_err(CliError::usage)?;
            if sub.size() != 2 {
                return Err(CliError::Usage("--pair takes exactly two parties".into()));
            }
            let (a, b) = (sub.parties()[0], sub.parties()[1]);
            let rho = trace_to_pair(&state, (a, b)).map_err(CliError::usage)?;
            let c = component(&state, &sub, &scheme).map_err(CliError::compute)?;
            rows.push(("concurrence".into(), concurrence_mixed_2qubit(&rho)));
            rows.push(("component".into(), c));
        }
        OracleKind::Dur => {
            if input.is_given() {
                return Err(CliError::Usage("--kind dur takes --m, not a state".into()));
            }
            let m = m.ok_or_else(|| CliError::Usage("--kind dur needs --m".into()))?;
            let avg = dur_average(m).map_err(CliError::usage)?;
            let w = states::w(m).map_err(CliError::compute)?;
            let c = component(
                &w,
                &SubsetSelector::new(vec![0, 1], m).map_err(CliError::usage)?,
                &scheme,
            )
            .map_err(CliError::compute)?;
            rows.push(("traced_average".into(), avg));
            rows.push(("component_squared".into(), c * c));
            rows.push(("ratio".into(), c * c / avg));
        }
    }
    if table {
        print_table(
            &rows
                .iter()
                .map(|(k, v)| (k.clone(), fmt(*v)))
                .collect::<Vec<_>>(),
        );
    } else {
        let mut obj = serde_json::Map::new();
        obj.insert(
            "kind".into(),
            json!(kind
                .to_possible_value()
                .expect("no skipped variants")
                .get_name()),
        );
        for (k, v) in rows {
            obj.insert(k, json!(r15(v)));
        }
        print_json(&obj);
    }
    Ok(())
}

fn emit_report(report: &TensorReport, table: bool) {
    if table {
        print_table(&report_rows(report));
    } else {
        print_json(&report_json(report));
    }
}

fn emit_state(state: &StateVector, report: bool, table: bool) -> Result<(), CliError> {
    if report {
        if state.num_parties() < 2 {
            return Err(CliError::Usage(
                "a single-party state has no tensor components".into(),
            ));
        }
        let r =
            full_tensor(state, &NormalizationScheme::default(), None).map_err(CliError::compute)?;
        emit_report(&r, table);
    } else if table {
        print_table(&state_rows(state));
    } else {
        print_json(&state_json(state));
    }
    Ok(())
}

fn join(parties: &[usize]) -> String {
    parties
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn to_party(label: usize, m: usize) -> Result<usize, CliError> {
    if label == 0 || label > m {
        return Err(CliError::Usage(format!(
            "party {label} does not exist in a {m}-party state"
        )));
    }
    Ok(label - 1)
}

fn parse_subsets(texts: &[String], m: usize) -> Result<Vec<SubsetSelector>, CliError> {
    texts
        .iter()
        .map(|t| {
            SubsetSelector::from_one_based(&parse_list(t, "party")?, m).map_err(CliError::usage)
        })
        .collect()
}

fn parse_scheme(entries: &[String]) -> Result<NormalizationScheme, CliError> {
    let mut scheme = NormalizationScheme::default();
    for e in entries {
        let (d, v) = e
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--norm-const '{e}' is not D=VALUE")))?;
        let d: usize = d
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("'{d}' is not a subset size")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("'{v}' is not a number")))?;
        scheme = scheme.with_constant(d, v).map_err(CliError::usage)?;
    }
    Ok(scheme)
}
