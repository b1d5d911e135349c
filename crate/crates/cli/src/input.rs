use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use etensor::{coeffs, parse_ket, parse_ket_normalized, PartyStructure, StateVector};

use crate::error::CliError;

#[derive(Debug, Args)]
pub struct StateArgs {
    /// A `.ket` expression file or a `.ket.json` coefficient file.
    #[arg(long, value_name = "PATH", conflicts_with = "expr")]
    pub state: Option<PathBuf>,

    /// Inline ket expression, e.g. "(|0,0>+|1,1>)/sqrt(2)".
    #[arg(long, value_name = "TEXT")]
    pub expr: Option<String>,

    /// Rescale the input to unit norm instead of rejecting it.
    #[arg(long)]
    pub normalize: bool,

    /// Party dimensions, e.g. "2,3,2". Inferred from the kets if omitted.
    #[arg(long, value_name = "N,N,...")]
    pub dims: Option<String>,
}

impl StateArgs {
    pub fn is_given(&self) -> bool {
        self.state.is_some() || self.expr.is_some()
    }

    pub fn load(&self) -> Result<StateVector, CliError> {
        let hint = self.dims.as_deref().map(parse_dims).transpose()?;
        match (&self.state, &self.expr) {
            (Some(path), _) => load_file(path, hint.as_ref(), self.normalize),
            (None, Some(text)) => parse_text(text, hint.as_ref(), self.normalize),
            (None, None) => Err(CliError::Usage(
                "a state is required (--state or --expr)".into(),
            )),
        }
    }
}

fn parse_dims(text: &str) -> Result<PartyStructure, CliError> {
    let dims = parse_list(text, "dimension")?;
    PartyStructure::new(dims).map_err(CliError::usage)
}

/// Comma separated positive integers.
pub fn parse_list(text: &str, what: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("'{}' is not a valid {what}", t.trim())))
        })
        .collect()
}

fn parse_text(
    text: &str,
    hint: Option<&PartyStructure>,
    normalize: bool,
) -> Result<StateVector, CliError> {
    let parsed = if normalize {
        parse_ket_normalized(text, hint)
    } else {
        parse_ket(text, hint)
    };
    parsed.map_err(CliError::usage)
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Unreadable(format!("{}: {e}", path.display())))
}

fn load_file(
    path: &Path,
    hint: Option<&PartyStructure>,
    normalize: bool,
) -> Result<StateVector, CliError> {
    let text = read(path)?;
    let is_json = path.to_string_lossy().ends_with(".json");
    if !is_json {
        return parse_text(&text, hint, normalize);
    }
    let state = coeffs::from_json(&text, normalize).map_err(CliError::usage)?;
    if let Some(h) = hint {
        if h.dims() != state.dims() {
            return Err(CliError::Usage(format!(
                "--dims {:?} disagrees with the file's dims {:?}",
                h.dims(),
                state.dims()
            )));
        }
    }
    Ok(state)
}
