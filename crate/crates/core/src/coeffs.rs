//! The `.ket.json` coefficient file format:
//!
//! ```json
//! { "dims": [2, 2], "amplitudes": [{"index": [0, 0], "re": 0.7071, "im": 0.0}, ...] }
//! ```
//!
//! Omitted indices are zero. Repeated indices are summed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{PartyStructure, StateVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeEntry {
    pub index: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<AmplitudeEntry>,
}

impl CoefficientFile {
    /// Entries are written for every amplitude that is not `+0 + 0i`, so a
    /// reload reproduces the amplitude bits exactly.
    pub fn from_state(state: &StateVector) -> Self {
        let structure = state.structure();
        let amplitudes = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.re.to_bits() != 0 || a.im.to_bits() != 0)
            .map(|(flat, a)| AmplitudeEntry {
                index: structure.tuple_of(flat).expect("flat index in range"),
                re: a.re,
                im: a.im,
            })
            .collect();
        Self {
            dims: structure.dims().to_vec(),
            amplitudes,
        }
    }

    fn raw(&self) -> Result<(PartyStructure, Vec<Complex64>)> {
        let structure = PartyStructure::new(self.dims.clone())?;
        let mut amps = vec![Complex64::new(0.0, 0.0); structure.total_dim()];
        let mut seen = vec![false; amps.len()];
        for entry in &self.amplitudes {
            let flat = structure.flat_index(&entry.index)?;
            let value = Complex64::new(entry.re, entry.im);
            if seen[flat] {
                amps[flat] += value;
            } else {
                amps[flat] = value;
                seen[flat] = true;
            }
        }
        Ok((structure, amps))
    }

    pub fn to_state(&self) -> Result<StateVector> {
        let (structure, amps) = self.raw()?;
        StateVector::new(structure, amps)
    }

    pub fn to_state_normalized(&self) -> Result<StateVector> {
        let (structure, amps) = self.raw()?;
        StateVector::normalized(structure, amps)
    }
}

pub fn to_json(state: &StateVector) -> String {
    serde_json::to_string_pretty(&CoefficientFile::from_state(state)).expect("serializable")
}

pub fn from_json(text: &str, normalize: bool) -> Result<StateVector> {
    let file: CoefficientFile = serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        Error::Parse {
            line: e.line(),
            col: e.column(),
            msg: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
        }
    })?;
    if normalize {
        file.to_state_normalized()
    } else {
        file.to_state()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;

    #[test]
    fn ghz4_from_two_entries() {
        let text = r#"{"dims":[2,2,2,2],"amplitudes":[
            {"index":[0,0,0,0],"re":0.7071067811865476,"im":0.0},
            {"index":[1,1,1,1],"re":0.7071067811865476,"im":0.0}]}"#;
        let s = from_json(text, false).unwrap();
        assert_eq!(s, states::ghz(4).unwrap());
    }

    #[test]
    fn bad_index_and_norm() {
        let text = r#"{"dims":[2,2],"amplitudes":[{"index":[0,2],"re":1.0,"im":0.0}]}"#;
        assert!(matches!(
            from_json(text, false),
            Err(Error::IndexOutOfRange(_))
        ));
        let text = r#"{"dims":[2,2],"amplitudes":[{"index":[0,1],"re":2.0,"im":0.0}]}"#;
        assert!(matches!(
            from_json(text, false),
            Err(Error::NotNormalized { .. })
        ));
        assert!(from_json(text, true).is_ok());
        assert!(matches!(from_json("{", false), Err(Error::Parse { .. })));
    }

    #[test]
    fn round_trip_is_exact() {
        let s =
            crate::ket::parse_ket_normalized("0.3|0,1> - i/7 |1,2> + sqrt(5)|1,0>", None).unwrap();
        let back = from_json(&to_json(&s), false).unwrap();
        for (a, b) in s.amplitudes().iter().zip(back.amplitudes()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}
