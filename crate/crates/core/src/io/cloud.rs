//! Point clouds as text: a `dim count` header, then one point per line with
//! whitespace-separated coordinates. Blank lines and `#` comments are skipped.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hausdorff::FiniteCompact;

/// Serializes in canonical (sorted) order with shortest round-trip floats,
/// so equal sets give identical bytes.
pub fn write_cloud(set: &FiniteCompact) -> String {
    let mut out = String::with_capacity(set.len() * set.dim() * 12);
    let _ = writeln!(out, "{} {}", set.dim(), set.len());
    for p in set.points() {
        for (i, c) in p.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{c:?}");
        }
        out.push('\n');
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_cloud(text: &str) -> Result<FiniteCompact> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty point cloud"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [dim, count] = fields[..] else {
        return Err(parse_err(hl, "header must be `dim count`"));
    };
    let dim: usize = dim
        .parse()
        .map_err(|_| parse_err(hl, format!("bad dimension `{dim}`")))?;
    let count: usize = count
        .parse()
        .map_err(|_| parse_err(hl, format!("bad count `{count}`")))?;
    if dim == 0 {
        return Err(parse_err(hl, "dimension must be positive"));
    }
    if count == 0 {
        return Err(parse_err(hl, "point cloud must contain at least one point"));
    }
    let mut coords = Vec::with_capacity(dim * count);
    let mut seen = 0;
    for (ln, line) in lines {
        seen += 1;
        if seen > count {
            return Err(parse_err(ln, format!("more than the declared {count} points")));
        }
        let before = coords.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(ln, format!("bad coordinate `{tok}`")))?;
            if !v.is_finite() {
                return Err(parse_err(ln, format!("non-finite coordinate `{tok}`")));
            }
            coords.push(v);
        }
        let got = coords.len() - before;
        if got != dim {
            return Err(parse_err(ln, format!("expected {dim} coordinates, found {got}")));
        }
    }
    if seen < count {
        return Err(parse_err(
            text.lines().count().max(1),
            format!("declared {count} points but found {seen}"),
        ));
    }
    FiniteCompact::from_flat(dim, coords)
}

pub fn read_cloud(path: &Path) -> Result<FiniteCompact> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_cloud(&text)
}
