use etensor::{coeffs::CoefficientFile, Complex64, DMatrix, ReportJson, StateVector, TensorReport};
use serde::Serialize;

/// Rounds to 15 significant digits. JSON and table output both print the
/// rounded value, so they agree digit for digit.
pub fn r15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

/// The rounded value exactly as it appears in JSON output.
pub fn fmt(x: f64) -> String {
    serde_json::to_string(&r15(x)).expect("finite floats serialize")
}

pub fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

pub fn report_json(report: &TensorReport) -> ReportJson {
    let mut j = report.to_json_value();
    for c in &mut j.components {
        c.value = r15(c.value);
    }
    for v in j.norm_constants.values_mut() {
        *v = r15(*v);
    }
    j.tensor_norm = r15(j.tensor_norm);
    j
}

pub fn state_json(state: &StateVector) -> CoefficientFile {
    let mut f = CoefficientFile::from_state(state);
    for a in &mut f.amplitudes {
        a.re = r15(a.re);
        a.im = r15(a.im);
    }
    f
}

/// Rows of `[re, im]` pairs.
pub fn matrix_json(m: &DMatrix<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [r15(m[(r, c)].re), r15(m[(r, c)].im)])
                .collect()
        })
        .collect()
}

/// Two left-aligned columns.
pub fn print_table(rows: &[(String, String)]) {
    let width = rows
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0);
    for (k, v) in rows {
        println!("{k:<width$}  {v}");
    }
}

pub fn report_rows(report: &TensorReport) -> Vec<(String, String)> {
    let j = report_json(report);
    let mut rows = vec![("dims".to_string(), format!("{:?}", j.dims))];
    for c in &j.components {
        let name = c
            .subset
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",");
        rows.push((format!("c{{{name}}}"), fmt(c.value)));
    }
    rows.push(("tensor_norm".into(), fmt(j.tensor_norm)));
    rows
}

pub fn state_rows(state: &StateVector) -> Vec<(String, String)> {
    let mut rows = vec![
        ("dims".to_string(), format!("{:?}", state.dims())),
        ("labels".to_string(), state.structure().labels().join(" ")),
    ];
    for a in state_json(state).amplitudes {
        let idx = a
            .index
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",");
        rows.push((
            format!("|{idx}>"),
            format!(
                "{}{}{}i",
                fmt(a.re),
                if a.im.is_sign_negative() { "" } else { "+" },
                fmt(a.im)
            ),
        ));
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(r15((2.0f64 / 3.0).sqrt()), 0.816496580927726);
        assert_eq!(fmt(1.0), "1.0");
        assert_eq!(r15(0.0), 0.0);
        assert_eq!(fmt(1e-17 / 3.0), "3.33333333333333e-18");
        assert!(r15(f64::NAN).is_nan());
    }
}
