//! On-disk trace formats.
//!
//! - plain: one key per line, decimal or `0x` hexadecimal, `#` comments.
//! - smpc: `op address` per line with op codes 0 (instruction fetch),
//!   2 (data read) and 3 (data write). Ops are recorded but every line is a
//!   cache access.
//! - LRU problem sets: `N SCRIPT` lines ended by a line holding `0`.
//!
//! All parsers accept LF or CRLF line endings and report 1-based line numbers.

use std::fmt::Write as _;

use cachelab_core::trace::{LruCase, LruProblemSet, TraceError};
use cachelab_core::{Key, Op, Trace, TraceSource};

/// Splits into `(line_no, line)` with any trailing `\r` removed.
fn lines(text: &[u8]) -> impl Iterator<Item = (usize, &[u8])> {
    let body = text.strip_suffix(b"\n").unwrap_or(text);
    body.split(|&b| b == b'\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix(b"\r").unwrap_or(l)))
}

/// `None` for blank and comment lines.
fn content(line: &[u8]) -> Option<&[u8]> {
    let line = line.trim_ascii();
    (!line.is_empty() && !line.starts_with(b"#")).then_some(line)
}

fn parse_key(token: &[u8]) -> Option<Key> {
    let s = std::str::from_utf8(token).ok()?;
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => Key::from_str_radix(hex, 16).ok(),
        None => s.parse().ok(),
    }
}

pub fn parse_plain(text: &[u8]) -> Result<Trace, TraceError> {
    let mut keys = Vec::new();
    for (no, line) in lines(text) {
        let Some(token) = content(line) else { continue };
        keys.push(parse_key(token).ok_or(TraceError::MalformedLine(no))?);
    }
    Ok(Trace::from_keys(keys, TraceSource::Plain))
}

/// Plain-format rendering: one decimal key per line.
pub fn emit_plain(trace: &Trace) -> String {
    let mut out = String::with_capacity(trace.len() * 8);
    for key in trace.keys() {
        writeln!(out, "{key}").unwrap();
    }
    out
}

pub fn parse_smpc(text: &[u8]) -> Result<Trace, TraceError> {
    let mut accesses = Vec::new();
    for (no, line) in lines(text) {
        let Some(body) = content(line) else { continue };
        let bad = TraceError::MalformedLine(no);
        let mut fields = body.split(|b| b.is_ascii_whitespace()).filter(|f| !f.is_empty());
        let op = match fields.next() {
            Some(b"0") => Op::InstrFetch,
            Some(b"2") => Op::DataRead,
            Some(b"3") => Op::DataWrite,
            _ => return Err(bad),
        };
        let addr = fields
            .next()
            .and_then(|f| std::str::from_utf8(f).ok())
            .and_then(|f| f.parse::<Key>().ok())
            .ok_or(bad.clone())?;
        if fields.next().is_some() {
            return Err(bad);
        }
        accesses.push((addr, op));
    }
    Ok(Trace::from_ops(accesses, TraceSource::Smpc))
}

/// Reads `N SCRIPT` cases up to the terminating `0` line. Anything after the
/// terminator is ignored; blank lines are skipped. End of input also ends the
/// set.
pub fn parse_lru_problem(text: &[u8]) -> Result<LruProblemSet, TraceError> {
    let mut cases = Vec::new();
    for (no, line) in lines(text) {
        let line = line.trim_ascii();
        if line.is_empty() {
            continue;
        }
        if line == b"0" {
            break;
        }
        let malformed = |reason| TraceError::MalformedCase { line: no, reason };
        let line = std::str::from_utf8(line).map_err(|_| malformed("not valid UTF-8"))?;
        let (n, script) = line
            .split_once(|c: char| c.is_ascii_whitespace())
            .ok_or(malformed("expected a capacity and a script"))?;
        let capacity: usize = n.parse().map_err(|_| malformed("capacity is not a whole number"))?;
        let case = LruCase { capacity, script: script.trim().to_string() };
        case.validate().map_err(malformed)?;
        cases.push(case);
    }
    Ok(LruProblemSet { cases })
}
