//! Line-oriented text formats shared by the CLI and test harnesses.
//!
//! Integers under multiplication travel as lowercase big-endian hex with no
//! prefix, whitespace-tolerant on the way in so files can be wrapped and
//! diffed. Everything else is `key=value` records or small whitespace
//! tables, one datum per line, designed to be greppable and stable under
//! golden-file comparison. Blank lines and `#` comments are ignored by all
//! parsers.

use std::fmt::Write as _;

use num_bigint::BigUint;
use thiserror::Error;

use crate::costmodel::{CostRow, TimingProfile};
use crate::multiplier::LevelSpec;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {detail}")]
pub struct ParseError {
    pub line: usize,
    pub detail: String,
}

fn bad(line: usize, detail: impl Into<String>) -> ParseError {
    ParseError {
        line,
        detail: detail.into(),
    }
}

/// Lines that carry data: numbered, trimmed, comments and blanks dropped.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

// ---------------------------------------------------------------------------
// Hex integers
// ---------------------------------------------------------------------------

pub fn format_hex(x: &BigUint) -> String {
    x.to_str_radix(16)
}

/// Parses a hex integer, ignoring all interior whitespace. Uppercase
/// digits are accepted; the writer side always emits lowercase.
pub fn parse_hex(text: &str) -> Result<BigUint, ParseError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad(1, "empty integer"));
    }
    BigUint::parse_bytes(compact.as_bytes(), 16)
        .ok_or_else(|| bad(1, format!("not a hex integer: {compact:?}")))
}

// ---------------------------------------------------------------------------
// key=value scaffolding
// ---------------------------------------------------------------------------

fn take_kv<'a>(token: &'a str, key: &str, line: usize) -> Result<&'a str, ParseError> {
    token
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| bad(line, format!("expected {key}=<value>, found {token:?}")))
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str, line: usize) -> Result<T, ParseError> {
    s.parse()
        .map_err(|_| bad(line, format!("bad {what}: {s:?}")))
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

/// One line per level: `level i: r=<r> lambda=<l> eta=<e> N=<N> beta=<b>`.
pub fn format_plan(specs: &[LevelSpec]) -> String {
    let mut out = String::new();
    for (i, s) in specs.iter().enumerate() {
        writeln!(
            out,
            "level {i}: r={} lambda={} eta={} N={} beta={}",
            s.r, s.lambda, s.eta, s.big_n, s.beta
        )
        .expect("string write");
    }
    out
}

pub fn parse_plan(text: &str) -> Result<Vec<LevelSpec>, ParseError> {
    let mut specs = Vec::new();
    for (line, l) in data_lines(text) {
        let (head, rest) = l
            .split_once(':')
            .ok_or_else(|| bad(line, "missing ':' after the level index"))?;
        let idx: usize = head
            .strip_prefix("level")
            .map(str::trim)
            .ok_or_else(|| bad(line, "line must start with 'level'"))
            .and_then(|s| parse_num(s, "level index", line))?;
        if idx != specs.len() {
            return Err(bad(line, format!("level {idx} out of order")));
        }
        let toks: Vec<&str> = rest.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(bad(line, "expected r=, lambda=, eta=, N=, beta="));
        }
        specs.push(LevelSpec {
            r: parse_num(take_kv(toks[0], "r", line)?, "r", line)?,
            lambda: parse_num(take_kv(toks[1], "lambda", line)?, "lambda", line)?,
            eta: parse_num(take_kv(toks[2], "eta", line)?, "eta", line)?,
            big_n: parse_num(take_kv(toks[3], "N", line)?, "N", line)?,
            beta: parse_num(take_kv(toks[4], "beta", line)?, "beta", line)?,
        });
    }
    if specs.is_empty() {
        return Err(bad(1, "no levels in plan"));
    }
    Ok(specs)
}

// ---------------------------------------------------------------------------
// Prime tables
// ---------------------------------------------------------------------------

/// A row of the prime-selection table: the input-size range (in bits) a
/// modulus is intended for, then its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeTableRow {
    pub min_bits: u64,
    pub max_bits: u64,
    pub r: u64,
    pub lambda: u32,
}

/// Whitespace table, one row per line: `min_bits max_bits r lambda`.
pub fn parse_prime_table(text: &str) -> Result<Vec<PrimeTableRow>, ParseError> {
    let mut rows = Vec::new();
    for (line, l) in data_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(bad(line, "expected: min_bits max_bits r lambda"));
        }
        rows.push(PrimeTableRow {
            min_bits: parse_num(toks[0], "min_bits", line)?,
            max_bits: parse_num(toks[1], "max_bits", line)?,
            r: parse_num(toks[2], "r", line)?,
            lambda: parse_num(toks[3], "lambda", line)?,
        });
    }
    Ok(rows)
}

pub fn format_prime_table(rows: &[PrimeTableRow]) -> String {
    let mut out = String::from("# min_bits max_bits r lambda\n");
    for row in rows {
        writeln!(out, "{} {} {} {}", row.min_bits, row.max_bits, row.r, row.lambda)
            .expect("string write");
    }
    out
}

// ---------------------------------------------------------------------------
// Timing profiles
// ---------------------------------------------------------------------------

/// Lines `bits=<b> seconds=<s>`: user-measured cost of one generic product
/// at each operand size.
pub fn parse_profile(text: &str) -> Result<TimingProfile, ParseError> {
    let mut points = Vec::new();
    for (line, l) in data_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(bad(line, "expected: bits=<b> seconds=<s>"));
        }
        let bits: u64 = parse_num(take_kv(toks[0], "bits", line)?, "bits", line)?;
        let seconds: f64 = parse_num(take_kv(toks[1], "seconds", line)?, "seconds", line)?;
        if bits == 0 || !seconds.is_finite() || seconds < 0.0 {
            return Err(bad(line, "bits must be positive and seconds finite"));
        }
        points.push((bits, seconds));
    }
    if points.is_empty() {
        return Err(bad(1, "no profile points"));
    }
    Ok(TimingProfile::new(points))
}

// ---------------------------------------------------------------------------
// Density and cost records
// ---------------------------------------------------------------------------

/// `lambda=<l> lo=<lo> hi=<hi> count=<c> estimate=<e>`; a missing count
/// (window not actually searched) prints as `-`.
pub fn format_density_record(
    lambda: u32,
    lo: u64,
    hi: u64,
    count: Option<u64>,
    estimate: f64,
) -> String {
    let c = match count {
        Some(c) => c.to_string(),
        None => "-".to_string(),
    };
    format!("lambda={lambda} lo={lo} hi={hi} count={c} estimate={estimate:.2}")
}

/// One record per cost row, mirroring the report fields.
pub fn format_cost_record(row: &CostRow) -> String {
    let mut s = format!(
        "n={} r={} lambda={} eta={} big_n={} expensive_count={} ks_bits={}",
        row.n, row.r, row.lambda, row.eta, row.big_n, row.count, row.ks_bits
    );
    if let Some(t) = row.seconds {
        write!(s, " est_time_s={t:.6}").expect("string write");
    }
    s
}

// ---------------------------------------------------------------------------
// Aligned tables
// ---------------------------------------------------------------------------

/// Right-aligns every column to its widest cell; numeric tables read best
/// that way and the output stays byte-stable for golden tests.
pub fn align_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut width: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        debug_assert_eq!(row.len(), cols);
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let emit = |out: &mut String, cells: &mut dyn Iterator<Item = &str>| {
        for (i, (cell, w)) in cells.zip(&width).enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            for _ in cell.len()..*w {
                out.push(' ');
            }
            out.push_str(cell);
        }
        out.push('\n');
    };
    emit(&mut out, &mut headers.iter().copied());
    for row in rows {
        emit(&mut out, &mut row.iter().map(String::as_str));
    }
    out
}

/// The human-facing cost table. The count column is shown factored as
/// `2^k*m` (transform length times per-slot rounds), the shape in which
/// such counts are usually quoted and checked.
pub fn format_cost_table(rows: &[CostRow]) -> String {
    let has_time = rows.iter().any(|r| r.seconds.is_some());
    let mut headers = vec!["n", "r", "lambda", "eta", "N", "count", "ks_bits"];
    if has_time {
        headers.push("est_time_s");
    }
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![
                r.n.to_string(),
                r.r.to_string(),
                r.lambda.to_string(),
                r.eta.to_string(),
                format!("2^{}", r.big_n.trailing_zeros()),
                format!("2^{}*{}", r.big_n.trailing_zeros(), r.count / r.big_n),
                r.ks_bits.to_string(),
            ];
            if has_time {
                row.push(match r.seconds {
                    Some(t) => format!("{t:.3}"),
                    None => "-".to_string(),
                });
            }
            row
        })
        .collect();
    align_table(&headers, &body)
}

#[cfg(test)]
mod roundtrip {
    use super::*;

    #[test]
    fn plan_lines_roundtrip() {
        let specs = vec![
            LevelSpec {
                r: 44,
                lambda: 4,
                eta: 32,
                big_n: 4096,
                beta: 4,
            },
            LevelSpec {
                r: 118,
                lambda: 3,
                eta: 22,
                big_n: 4,
                beta: 0,
            },
        ];
        let text = format_plan(&specs);
        assert_eq!(parse_plan(&text).unwrap(), specs);
    }

    #[test]
    fn hex_io_is_whitespace_tolerant() {
        let x = BigUint::parse_bytes(b"deadbeef", 16).unwrap();
        assert_eq!(format_hex(&x), "deadbeef");
        assert_eq!(parse_hex("dead\n  beef\n").unwrap(), x);
        assert!(parse_hex("  \n").is_err());
    }
}
