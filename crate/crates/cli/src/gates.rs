use std::path::Path;

use etensor::{Complex64, DMatrix, LocalUnitary};
use serde::Deserialize;

use crate::error::CliError;
use crate::input::read;

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

/// Parses `H@1`, `PHASE(0.1,0.2)@2` or `U(path.json)@3` (1-based party).
pub fn parse_gate(text: &str) -> Result<LocalUnitary, CliError> {
    let bad = || CliError::Usage(format!("gate '{text}' is not NAME@PARTY"));
    let (name, party) = text.rsplit_once('@').ok_or_else(bad)?;
    let party: usize = party.trim().parse().map_err(|_| bad())?;
    let party = party
        .checked_sub(1)
        .ok_or_else(|| CliError::Usage("party labels start at 1".into()))?;
    let name = name.trim();

    if name == "H" {
        return Ok(LocalUnitary::hadamard(party));
    }
    if let Some(args) = name
        .strip_prefix("PHASE(")
        .and_then(|r| r.strip_suffix(')'))
    {
        let phases = args
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("'{}' is not a phase", p.trim())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        return LocalUnitary::phase(party, &phases).map_err(CliError::usage);
    }
    if let Some(path) = name.strip_prefix("U(").and_then(|r| r.strip_suffix(')')) {
        let m = load_matrix(Path::new(path))?;
        return LocalUnitary::new(party, m).map_err(CliError::usage);
    }
    Err(CliError::Usage(format!(
        "unknown gate '{name}' (expected H, PHASE(...) or U(file))"
    )))
}

/// A JSON array of rows; entries are reals or `[re, im]` pairs.
pub fn load_matrix(path: &Path) -> Result<DMatrix<Complex64>, CliError> {
    let text = read(path)?;
    let rows: Vec<Vec<Entry>> = serde_json::from_str(&text).map_err(|e| {
        CliError::Parse(format!(
            "parse error at {}:{}: {}",
            e.line(),
            e.column(),
            "expected an array of matrix rows"
        ))
    })?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Usage(format!(
            "{}: matrix must be square and non-empty",
            path.display()
        )));
    }
    Ok(DMatrix::from_fn(n, n, |r, c| match rows[r][c] {
        Entry::Real(x) => Complex64::new(x, 0.0),
        Entry::Complex([re, im]) => Complex64::new(re, im),
    }))
}
