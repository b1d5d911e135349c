//! Parser for bra-ket style state expressions such as
//! `(|0,0> + |1,1>)/sqrt(2)` or `1/2 |0,1> - i/2 |1,0> + ...`.
//!
//! The accepted language is a small arithmetic grammar over two kinds of
//! values, complex scalars and sparse ket sums:
//!
//! ```text
//! expr    := ["+"|"-"] product (("+"|"-") product)*
//! product := unary (("*"|"/") unary | unary)*      -- juxtaposition multiplies
//! unary   := ("-"|"+") unary | primary
//! primary := number | "i" | "sqrt" "(" expr ")" | "(" expr ")" | ket
//! ket     := "|" digits ("," digits)* ">"
//! ```
//!
//! Kets without commas and with more than one digit (`|0110>`) are read as
//! one qubit per digit, which is only allowed when every party is a qubit.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{PartyStructure, StateVector};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    I,
    Sqrt,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Ket(Vec<String>),
    End,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Spanned {
                tok,
                line: l0,
                col: c0,
            });
            advance(1, &mut i);
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                j += 1;
            }
            if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                let mut k = j + 1;
                if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    j = k;
                }
            }
            let s: String = chars[start..j].iter().collect();
            let v: f64 = s
                .parse()
                .map_err(|_| err(l0, c0, format!("malformed number '{s}'")))?;
            out.push(Spanned {
                tok: Tok::Num(v),
                line: l0,
                col: c0,
            });
            advance(j - start, &mut i);
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_alphabetic() {
                j += 1;
            }
            let word: String = chars[start..j].iter().collect();
            let tok = match word.as_str() {
                "i" => Tok::I,
                "sqrt" => Tok::Sqrt,
                _ => return Err(err(l0, c0, format!("unknown identifier '{word}'"))),
            };
            out.push(Spanned {
                tok,
                line: l0,
                col: c0,
            });
            advance(j - start, &mut i);
            continue;
        }
        if c == '|' {
            let mut j = i + 1;
            while j < chars.len() && chars[j] != '>' {
                if !(chars[j].is_ascii_digit() || chars[j] == ',' || chars[j] == ' ') {
                    return Err(err(
                        l0,
                        c0 + (j - i),
                        format!("unexpected '{}' inside ket", chars[j]),
                    ));
                }
                j += 1;
            }
            if j == chars.len() {
                return Err(err(l0, c0, "unterminated ket, expected '>'"));
            }
            let body: String = chars[i + 1..j].iter().collect();
            let groups: Vec<String> = body.split(',').map(|g| g.trim().to_string()).collect();
            if groups.iter().any(|g| g.is_empty() || g.contains(' ')) {
                return Err(err(l0, c0, format!("malformed ket '|{body}>'")));
            }
            out.push(Spanned {
                tok: Tok::Ket(groups),
                line: l0,
                col: c0,
            });
            advance(j + 1 - i, &mut i);
            continue;
        }
        return Err(err(l0, c0, format!("unexpected character '{c}'")));
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

#[derive(Debug, Clone)]
enum Value {
    Scalar(Complex64),
    Vector(BTreeMap<Vec<usize>, Complex64>),
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    hint: Option<&'a PartyStructure>,
    arity: Option<usize>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let t = self.next();
        if t.tok != tok {
            return Err(err(t.line, t.col, format!("expected {what}")));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Value> {
        let mut acc = match self.peek().tok {
            Tok::Plus => {
                self.next();
                self.product()?
            }
            Tok::Minus => {
                self.next();
                let t = self.peek().clone();
                let v = self.product()?;
                scale(v, Complex64::new(-1.0, 0.0), &t)?
            }
            _ => self.product()?,
        };
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Plus => {
                    self.next();
                    let rhs = self.product()?;
                    acc = add(acc, rhs, 1.0, &t)?;
                }
                Tok::Minus => {
                    self.next();
                    let rhs = self.product()?;
                    acc = add(acc, rhs, -1.0, &t)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_primary(tok: &Tok) -> bool {
        matches!(
            tok,
            Tok::Num(_) | Tok::I | Tok::Sqrt | Tok::LParen | Tok::Ket(_)
        )
    }

    fn product(&mut self) -> Result<Value> {
        let mut acc = self.unary()?;
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Star => {
                    self.next();
                    let rhs = self.unary()?;
                    acc = mul(acc, rhs, &t)?;
                }
                Tok::Slash => {
                    self.next();
                    let rhs = self.unary()?;
                    acc = div(acc, rhs, &t)?;
                }
                ref tok if Self::starts_primary(tok) => {
                    let rhs = self.unary()?;
                    acc = mul(acc, rhs, &t)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Value> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Minus => {
                self.next();
                let v = self.unary()?;
                scale(v, Complex64::new(-1.0, 0.0), &t)
            }
            Tok::Plus => {
                self.next();
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Value> {
        let t = self.next();
        match t.tok {
            Tok::Num(v) => Ok(Value::Scalar(Complex64::new(v, 0.0))),
            Tok::I => Ok(Value::Scalar(Complex64::new(0.0, 1.0))),
            Tok::Sqrt => {
                self.expect(Tok::LParen, "'(' after sqrt")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                match inner {
                    Value::Scalar(z) if z.im == 0.0 && z.re >= 0.0 => {
                        Ok(Value::Scalar(Complex64::new(z.re.sqrt(), 0.0)))
                    }
                    Value::Scalar(_) => Err(err(
                        t.line,
                        t.col,
                        "sqrt needs a non-negative real argument",
                    )),
                    Value::Vector(_) => Err(err(t.line, t.col, "sqrt of a ket")),
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ket(groups) => {
                let tuple = self.resolve_ket(&groups, t.line, t.col)?;
                Ok(Value::Vector(BTreeMap::from([(
                    tuple,
                    Complex64::new(1.0, 0.0),
                )])))
            }
            Tok::End => Err(err(t.line, t.col, "unexpected end of input")),
            _ => Err(err(t.line, t.col, "expected a number, ket or '('")),
        }
    }

    fn resolve_ket(&mut self, groups: &[String], line: usize, col: usize) -> Result<Vec<usize>> {
        let single_party_hint = self.hint.map(|h| h.num_parties() == 1).unwrap_or(false);
        let compact = groups.len() == 1 && groups[0].len() > 1 && !single_party_hint;
        let tuple: Vec<usize> = if compact {
            if let Some(h) = self.hint {
                if !h.is_all_qubits() {
                    return Err(err(
                        line,
                        col,
                        "compact kets are only allowed when every party is a qubit",
                    ));
                }
            }
            groups[0]
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(err(
                        line,
                        col,
                        format!("compact ket digit '{c}' is not a qubit value"),
                    )),
                })
                .collect::<Result<_>>()?
        } else {
            groups
                .iter()
                .map(|g| {
                    g.parse::<usize>()
                        .map_err(|_| err(line, col, format!("ket label '{g}' is too large")))
                })
                .collect::<Result<_>>()?
        };
        match self.arity {
            None => self.arity = Some(tuple.len()),
            Some(a) if a != tuple.len() => {
                return Err(err(
                    line,
                    col,
                    format!("ket has {} parties, earlier kets have {}", tuple.len(), a),
                ))
            }
            _ => {}
        }
        if let Some(h) = self.hint {
            if tuple.len() != h.num_parties() {
                return Err(err(
                    line,
                    col,
                    format!(
                        "ket has {} parties, structure has {}",
                        tuple.len(),
                        h.num_parties()
                    ),
                ));
            }
            for (j, (&k, &n)) in tuple.iter().zip(h.dims()).enumerate() {
                if k >= n {
                    return Err(err(
                        line,
                        col,
                        format!("value {} for party {} exceeds dimension {}", k, j + 1, n),
                    ));
                }
            }
        }
        Ok(tuple)
    }
}

fn type_err(t: &Spanned, msg: &str) -> Error {
    err(t.line, t.col, msg)
}

fn scale(v: Value, s: Complex64, _t: &Spanned) -> Result<Value> {
    Ok(match v {
        Value::Scalar(z) => Value::Scalar(z * s),
        Value::Vector(mut m) => {
            m.values_mut().for_each(|a| *a *= s);
            Value::Vector(m)
        }
    })
}

fn add(a: Value, b: Value, sign: f64, t: &Spanned) -> Result<Value> {
    match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x + y * sign)),
        (Value::Vector(mut x), Value::Vector(y)) => {
            for (k, v) in y {
                *x.entry(k).or_insert(Complex64::new(0.0, 0.0)) += v * sign;
            }
            Ok(Value::Vector(x))
        }
        _ => Err(type_err(t, "cannot add a scalar and a ket")),
    }
}

fn mul(a: Value, b: Value, t: &Spanned) -> Result<Value> {
    match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x * y)),
        (Value::Scalar(x), v @ Value::Vector(_)) | (v @ Value::Vector(_), Value::Scalar(x)) => {
            scale(v, x, t)
        }
        _ => Err(type_err(t, "cannot multiply two kets")),
    }
}

fn div(a: Value, b: Value, t: &Spanned) -> Result<Value> {
    match b {
        Value::Scalar(y) if y.norm() == 0.0 => Err(type_err(t, "division by zero")),
        Value::Scalar(y) => scale(a, y.inv(), t),
        Value::Vector(_) => Err(type_err(t, "cannot divide by a ket")),
    }
}

/// Parses an expression into its raw (unnormalized) amplitude vector.
///
/// Without a hint, dimensions are inferred per position as the largest label
/// plus one, never below 2.
pub fn parse_amplitudes(
    text: &str,
    hint: Option<&PartyStructure>,
) -> Result<(PartyStructure, Vec<Complex64>)> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        hint,
        arity: None,
    };
    let value = p.expr()?;
    let end = p.peek().clone();
    if end.tok != Tok::End {
        return Err(err(end.line, end.col, "unexpected trailing input"));
    }
    let terms = match value {
        Value::Vector(m) => m,
        Value::Scalar(_) => return Err(err(1, 1, "expression contains no ket")),
    };
    let structure = match hint {
        Some(h) => h.clone(),
        None => {
            let arity = p.arity.unwrap_or(0);
            let mut dims = vec![2usize; arity];
            for tuple in terms.keys() {
                for (d, &k) in dims.iter_mut().zip(tuple) {
                    *d = (*d).max(k + 1);
                }
            }
            PartyStructure::new(dims)?
        }
    };
    let mut amps = vec![Complex64::new(0.0, 0.0); structure.total_dim()];
    for (tuple, a) in terms {
        amps[structure.flat_index(&tuple)?] += a;
    }
    Ok((structure, amps))
}

/// Parses a state expression; the result must already be normalized.
pub fn parse_ket(text: &str, hint: Option<&PartyStructure>) -> Result<StateVector> {
    let (structure, amps) = parse_amplitudes(text, hint)?;
    StateVector::new(structure, amps)
}

/// Parses a state expression and divides by its norm.
pub fn parse_ket_normalized(text: &str, hint: Option<&PartyStructure>) -> Result<StateVector> {
    let (structure, amps) = parse_amplitudes(text, hint)?;
    StateVector::normalized(structure, amps)
}
