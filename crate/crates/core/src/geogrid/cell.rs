use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Signed (row, column) name of a grid anchor.
///
/// The canonical text form is `201U_54L`: row magnitude with `U`/`D`, an
/// underscore, then column magnitude with `R`/`L`. Zero renders as `0U` and
/// `0R`. Parsing additionally accepts the comma-separated `201U, 54L` form
/// and lower-case suffixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId {
    pub row: i32,
    pub col: i32,
}

impl CellId {
    pub const fn new(row: i32, col: i32) -> Self {
        CellId { row, col }
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ns = if self.row < 0 { 'D' } else { 'U' };
        let ew = if self.col < 0 { 'L' } else { 'R' };
        write!(f, "{}{}_{}{}", self.row.unsigned_abs(), ns, self.col.unsigned_abs(), ew)
    }
}

impl FromStr for CellId {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let err = |token: &str, reason| Error::CellParse {
            input: input.to_string(),
            token: token.to_string(),
            reason,
        };
        let trimmed = input.trim();
        let (row_tok, col_tok) = trimmed
            .split_once(['_', ','])
            .ok_or_else(|| err(trimmed, "missing separator"))?;
        let row_tok = row_tok.trim();
        let col_tok = col_tok.trim();
        let row = parse_axis(row_tok, 'U', 'D').map_err(|reason| err(row_tok, reason))?;
        let col = parse_axis(col_tok, 'R', 'L').map_err(|reason| err(col_tok, reason))?;
        Ok(CellId { row, col })
    }
}

fn parse_axis(token: &str, positive: char, negative: char) -> Result<i32, &'static str> {
    let suffix = token.chars().last().ok_or("empty index")?;
    let digits = &token[..token.len() - suffix.len_utf8()];
    let sign = match suffix.to_ascii_uppercase() {
        c if c == positive => 1i64,
        c if c == negative => -1i64,
        c if c.is_ascii_digit() => return Err("missing direction suffix"),
        _ => return Err("unknown direction suffix"),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err("index is not a non-negative integer");
    }
    let magnitude: i64 = digits.parse().map_err(|_| "index too large")?;
    i32::try_from(sign * magnitude).map_err(|_| "index too large")
}

impl Serialize for CellId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CellId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
