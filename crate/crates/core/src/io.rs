//! File formats.
//!
//! Matrix JSON: `{"n":2,"mode":"semi","cells":[[1,2,3,4],...]}` where `cells`
//! is the row-major `N x N` grid and a cell value `v` stands for `a_{|v|-1}`
//! with the sign of `v`. Plain text: one row per line, tokens `a3`, `+a3` or
//! `-a3`; `#` starts a comment, and a `# mode: semi|special` line pins the
//! mode (otherwise any explicit sign makes the matrix special).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::Gf2System;
use crate::matrix::{Mode, Sign, SignedEntry, SymbolicMatrix};
use crate::operator::{Couple, Division};

#[derive(Debug, Serialize, Deserialize)]
struct MatrixFile {
    n: u32,
    mode: String,
    cells: Vec<Vec<i64>>,
}

pub fn parse_mode(s: &str) -> Result<Mode> {
    match s {
        "semi" => Ok(Mode::Semi),
        "special" => Ok(Mode::Special),
        other => Err(Error::Parse(format!("unknown mode {other:?}"))),
    }
}

/// Canonical JSON encoding, newline-terminated.
pub fn to_json(m: &SymbolicMatrix) -> String {
    let file = MatrixFile {
        n: m.qubits(),
        mode: m.mode().as_str().to_string(),
        cells: m.encoded_rows(),
    };
    let mut s = serde_json::to_string(&file).expect("matrix file serializes");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> Result<SymbolicMatrix> {
    let file: MatrixFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mode = parse_mode(&file.mode)?;
    if file.n == 0 || file.n > 16 || file.cells.len() != 1usize << file.n {
        return Err(Error::MalformedMatrix(format!(
            "n = {} does not match {} rows",
            file.n,
            file.cells.len()
        )));
    }
    let m = SymbolicMatrix::from_encoded(mode, &file.cells)?;
    m.check_columns()?;
    Ok(m)
}

pub fn to_text(m: &SymbolicMatrix) -> String {
    format!("# mode: {}\n{m}", m.mode().as_str())
}

pub fn parse_text(text: &str) -> Result<SymbolicMatrix> {
    let mut pinned = None;
    let mut rows: Vec<Vec<(usize, Option<bool>)>> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(mode) = comment.trim().strip_prefix("mode:") {
                pinned = Some(parse_mode(mode.trim())?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(parse_token)
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let explicit = rows.iter().flatten().any(|(_, s)| s.is_some());
    let mode = pinned.unwrap_or(if explicit { Mode::Special } else { Mode::Semi });
    let mut decoded = Vec::with_capacity(rows.len());
    for row in rows {
        let mut out = Vec::with_capacity(row.len());
        for (index, sign) in row {
            let sign = match (mode, sign) {
                (Mode::Semi, None) => Sign::Unknown,
                (Mode::Semi, Some(_)) => {
                    return Err(Error::MalformedMatrix(
                        "signed cell in a semi matrix".into(),
                    ))
                }
                (Mode::Special, s) => Sign::from_negative(s.unwrap_or(false)),
            };
            out.push(SignedEntry::new(index, sign));
        }
        decoded.push(out);
    }
    let m = SymbolicMatrix::new(mode, decoded)?;
    m.check_columns()?;
    Ok(m)
}

fn parse_token(tok: &str) -> Result<(usize, Option<bool>)> {
    let (sign, rest) = match tok.as_bytes().first() {
        Some(b'-') => (Some(true), &tok[1..]),
        Some(b'+') => (Some(false), &tok[1..]),
        _ => (None, tok),
    };
    let digits = rest
        .strip_prefix('a')
        .ok_or_else(|| Error::Parse(format!("bad cell {tok:?}")))?;
    let index = digits
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("bad cell {tok:?}")))?;
    Ok((index, sign))
}

/// Reads JSON when the text starts with `{`, plain text otherwise.
pub fn parse_any(text: &str) -> Result<SymbolicMatrix> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_text(text)
    }
}

/// `[[lo, hi, value], ...]` ordered by `lo`, value `0`, `1` or `null`.
pub fn division_to_json(d: &Division) -> String {
    let triples: Vec<(usize, usize, Option<u8>)> = d
        .couples()
        .iter()
        .map(|c| (c.lo, c.hi, c.value.map(u8::from)))
        .collect();
    serde_json::to_string(&triples).expect("division serializes")
}

pub fn division_from_json(text: &str, order: usize) -> Result<Division> {
    let triples: Vec<(usize, usize, Option<u8>)> =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let couples = triples
        .into_iter()
        .map(|(lo, hi, v)| match v {
            None => Ok(Couple::unknown(lo, hi)),
            Some(0) => Ok(Couple::new(lo, hi, false)),
            Some(1) => Ok(Couple::new(lo, hi, true)),
            Some(x) => Err(Error::Parse(format!("couple value {x} is not 0/1/null"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Division::new(couples, order)
}

/// Reads the [`Gf2System::dump`] layout: `0101|1` per row; blank lines and
/// `#` comments are skipped.
pub fn parse_system(text: &str) -> Result<Gf2System> {
    let mut rows = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (coeffs, constant) = line
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("missing '|' in {line:?}")))?;
        let row = coeffs
            .chars()
            .chain(constant.chars())
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("bad bit {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        if constant.len() != 1 {
            return Err(Error::Parse(format!("constant must be one bit in {line:?}")));
        }
        rows.push(row);
    }
    let cols = rows
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::MalformedSystem("no equations".into()))?;
    Gf2System::from_rows(cols, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_layout_is_canonical() {
        let m = parse_text("a0 a1\na1 -a0").unwrap();
        assert_eq!(
            to_json(&m),
            "{\"n\":1,\"mode\":\"special\",\"cells\":[[1,2],[2,-1]]}\n"
        );
        assert_eq!(parse_json(&to_json(&m)).unwrap(), m);
    }

    #[test]
    fn json_reader_rejects_repeated_index() {
        let err = parse_json("{\"n\":1,\"mode\":\"semi\",\"cells\":[[1,2],[1,1]]}").unwrap_err();
        assert_eq!(err.kind(), "MalformedMatrix");
    }

    #[test]
    fn json_reader_rejects_n_mismatch() {
        let err = parse_json("{\"n\":2,\"mode\":\"semi\",\"cells\":[[1,2],[2,1]]}").unwrap_err();
        assert_eq!(err.kind(), "MalformedMatrix");
    }

    #[test]
    fn text_mode_inference() {
        assert_eq!(parse_text("a0 a1\na1 a0").unwrap().mode(), Mode::Semi);
        assert_eq!(parse_text("a0 a1\na1 -a0").unwrap().mode(), Mode::Special);
        let pinned = parse_text("# mode: special\na0 a1\na1 a0").unwrap();
        assert_eq!(pinned.mode(), Mode::Special);
        assert!(parse_text("# mode: semi\na0 a1\na1 -a0").is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = parse_text("a0 a1\na1 -a0").unwrap();
        assert_eq!(parse_text(&to_text(&m)).unwrap(), m);
        let s = parse_text("a0 a1\na1 a0").unwrap();
        assert_eq!(parse_text(&to_text(&s)).unwrap(), s);
    }

    #[test]
    fn division_json_round_trip() {
        let d = Division::new(vec![Couple::new(2, 3, true), Couple::unknown(0, 1)], 4).unwrap();
        let s = division_to_json(&d);
        assert_eq!(s, "[[0,1,null],[2,3,1]]");
        assert_eq!(division_from_json(&s, 4).unwrap(), d);
    }

    #[test]
    fn system_dump_round_trip() {
        let text = "0110|1\n1001|0\n";
        let sys = parse_system(text).unwrap();
        assert_eq!((sys.rows(), sys.cols()), (2, 5));
        assert_eq!(sys.dump(), text);
        assert_eq!(parse_system("01|1\n1|0").unwrap_err().kind(), "MalformedSystem");
    }
}
