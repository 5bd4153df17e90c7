//! The text matrix-set format and small rendering helpers.
//!
//! A matrix-set file is a header line `n m`, followed by `m` blocks of `n`
//! lines of `n` characters over `{0,1}`, with blocks separated by blank
//! lines:
//!
//! ```text
//! 3 2
//! 010
//! 100
//! 001
//!
//! 101
//! 001
//! 010
//! ```

use num_traits::ToPrimitive;
use spf_core::boolmat::{BinaryMatrix, MatrixSet};
use spf_core::Rational;

use crate::CliError;

pub fn parse_matrix_set(text: &str) -> Result<MatrixSet, CliError> {
    let mut lines = text.lines();
    let header = loop {
        match lines.next() {
            Some(l) if l.trim().is_empty() => continue,
            Some(l) => break l,
            None => return Err(CliError::Parse("empty input".into())),
        }
    };
    let mut parts = header.split_whitespace();
    let n: usize = parts
        .next()
        .ok_or_else(|| CliError::Parse("missing dimension in header".into()))?
        .parse()
        .map_err(|_| CliError::Parse(format!("bad header line `{header}`")))?;
    let m: usize = parts
        .next()
        .ok_or_else(|| CliError::Parse("missing matrix count in header".into()))?
        .parse()
        .map_err(|_| CliError::Parse(format!("bad header line `{header}`")))?;
    if parts.next().is_some() {
        return Err(CliError::Parse(format!(
            "trailing tokens in header `{header}`"
        )));
    }
    if n == 0 || n > 64 {
        return Err(CliError::Parse(format!("dimension {n} outside 1..=64")));
    }
    if m == 0 {
        return Err(CliError::Parse("matrix count must be at least 1".into()));
    }

    let mut matrices = Vec::with_capacity(m);
    for index in 0..m {
        let mut mat = BinaryMatrix::zeros(n);
        for i in 0..n {
            let line = loop {
                match lines.next() {
                    Some(l) if l.trim().is_empty() && i == 0 => continue,
                    Some(l) if l.trim().is_empty() => {
                        return Err(CliError::Parse(format!(
                            "matrix {} row {}: unexpected blank line",
                            index + 1,
                            i + 1
                        )))
                    }
                    Some(l) => break l.trim(),
                    None => {
                        return Err(CliError::Parse(format!(
                            "matrix {} row {}: unexpected end of input",
                            index + 1,
                            i + 1
                        )))
                    }
                }
            };
            if line.len() != n {
                return Err(CliError::Parse(format!(
                    "matrix {} row {}: expected {n} characters, found {}",
                    index + 1,
                    i + 1,
                    line.len()
                )));
            }
            for (j, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => mat.set(i, j, true),
                    other => {
                        return Err(CliError::Parse(format!(
                            "matrix {} row {}: character `{other}` is not 0 or 1",
                            index + 1,
                            i + 1
                        )))
                    }
                }
            }
        }
        matrices.push(mat);
    }
    for rest in lines {
        if !rest.trim().is_empty() {
            return Err(CliError::Parse(format!(
                "trailing content `{}`",
                rest.trim()
            )));
        }
    }
    MatrixSet::new(matrices).map_err(|e| CliError::Parse(e.to_string()))
}

pub fn serialize_matrix_set(set: &MatrixSet) -> String {
    let n = set.dim();
    let mut out = format!("{} {}\n", n, set.len());
    for (idx, mat) in set.matrices().iter().enumerate() {
        if idx > 0 {
            out.push('\n');
        }
        for i in 0..n {
            for j in 0..n {
                out.push(if mat.get(i, j) { '1' } else { '0' });
            }
            out.push('\n');
        }
    }
    out
}

/// Exact `p/q` rendering (integers render without the slash).
pub fn rational_exact(v: &Rational) -> String {
    v.to_string()
}

/// Six-decimal rendering for plotting.
pub fn rational_decimal(v: &Rational) -> String {
    format!("{:.6}", v.to_f64().unwrap_or(f64::NAN))
}

pub fn word_string(word: &[usize]) -> String {
    word.iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use spf_core::families::example_set;
    use spf_core::rat;

    #[test]
    fn round_trips_the_example_catalog() {
        for id in spf_core::families::EXAMPLE_IDS {
            let set = example_set(id).unwrap();
            let text = serialize_matrix_set(&set);
            let back = parse_matrix_set(&text).unwrap();
            assert_eq!(back, set, "{id}");
        }
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_matrix_set("").is_err());
        assert!(parse_matrix_set("2\n01\n10\n").is_err());
        assert!(parse_matrix_set("2 1\n01\n1\n").is_err());
        assert!(parse_matrix_set("2 1\n01\n12\n").is_err());
        assert!(parse_matrix_set("2 2\n01\n10\n").is_err());
        assert!(parse_matrix_set("0 1\n").is_err());
        assert!(parse_matrix_set("2 1\n01\n10\nextra\n").is_err());
    }

    #[test]
    fn renders_rationals() {
        assert_eq!(rational_exact(&rat(3, 4)), "3/4");
        assert_eq!(rational_exact(&rat(2, 1)), "2");
        assert_eq!(rational_decimal(&rat(1, 3)), "0.333333");
    }
}
