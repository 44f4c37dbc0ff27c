//! Plain-text instance and certificate files.
//!
//! Instance: a header line `m n`, then `m` rows of `n` numbers. Blank lines and
//! lines starting with `#` are ignored. Certificate: `kernel` or `image`, then
//! the vector, then the 1-based support indices.

use std::fmt::Write as _;

use super::{ConicInstance, Provenance};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Numbered content lines, skipping blanks and comments.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_numbers(line: usize, s: &str) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|t| {
            let v: f64 = t.parse().map_err(|_| parse_err(line, format!("not a number: {t:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("non-finite value {t:?}")));
            }
            Ok(v)
        })
        .collect()
}

pub fn parse_instance(text: &str) -> Result<ConicInstance> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header \"m n\""))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let parse_dim = |t: &str| -> Result<usize> {
        t.parse::<usize>()
            .ok()
            .filter(|v| *v > 0)
            .ok_or_else(|| parse_err(hline, format!("invalid dimension {t:?}")))
    };
    if dims.len() != 2 {
        return Err(parse_err(hline, "header must be \"m n\""));
    }
    let (m, n) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
    let mut rows = Vec::with_capacity(m);
    let mut last = hline;
    for _ in 0..m {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(last + 1, format!("expected {m} rows, found {}", rows.len())))?;
        let row = parse_numbers(ln, l)?;
        if row.len() != n {
            return Err(parse_err(ln, format!("expected {n} entries, found {}", row.len())));
        }
        rows.push(row);
        last = ln;
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "unexpected content after the last row"));
    }
    let a = Matrix::from_rows(&rows)?;
    Ok(ConicInstance::new(a, Provenance::Parsed))
}

fn join(v: &[f64]) -> String {
    let mut s = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x}");
    }
    s
}

/// Canonical text form; numbers use the shortest round-trip decimal.
pub fn write_instance(a: &Matrix) -> String {
    let mut s = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        s.push_str(&join(a.row(i)));
        s.push('\n');
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    Kernel,
    Image,
}

impl CertificateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificateKind::Kernel => "kernel",
            CertificateKind::Image => "image",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateFile {
    pub kind: CertificateKind,
    pub vector: Vec<f64>,
    /// 0-based.
    pub support: Vec<usize>,
}

pub fn write_certificate(cert: &CertificateFile) -> String {
    let support: Vec<String> = cert.support.iter().map(|j| (j + 1).to_string()).collect();
    format!("{}\n{}\n{}\n", cert.kind.as_str(), join(&cert.vector), support.join(" "))
}

pub fn parse_certificate(text: &str) -> Result<CertificateFile> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('#'))
        .collect();
    let (kl, kind) = lines.first().copied().ok_or_else(|| parse_err(1, "empty certificate"))?;
    let kind = match kind {
        "kernel" => CertificateKind::Kernel,
        "image" => CertificateKind::Image,
        other => return Err(parse_err(kl, format!("expected \"kernel\" or \"image\", found {other:?}"))),
    };
    let (vl, vline) = lines.get(1).copied().ok_or_else(|| parse_err(kl + 1, "missing vector line"))?;
    let vector = parse_numbers(vl, vline)?;
    if vector.is_empty() {
        return Err(parse_err(vl, "empty vector"));
    }
    let (sl, sline) = lines.get(2).copied().unwrap_or((vl + 1, ""));
    let mut support = Vec::new();
    for t in sline.split_whitespace() {
        let j: usize = t.parse().ok().filter(|j| *j > 0).ok_or_else(|| parse_err(sl, format!("invalid index {t:?}")))?;
        support.push(j - 1);
    }
    support.sort_unstable();
    support.dedup();
    if let Some((ln, _)) = lines.iter().skip(3).find(|(_, l)| !l.is_empty()) {
        return Err(parse_err(*ln, "unexpected content after the support line"));
    }
    Ok(CertificateFile { kind, vector, support })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let inst = parse_instance("2 2\n1 0\n0 1\n").unwrap();
        assert_eq!(inst.a, Matrix::identity(2));
        assert!(inst.is_integer);
        let inst = parse_instance("1 2\n1 -1\n").unwrap();
        assert_eq!(inst.a.data(), &[1.0, -1.0]);
        let inst = parse_instance("# comment\n1 1\n\n0.5\n# trailing\n").unwrap();
        assert!(!inst.is_integer);
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert!(matches!(parse_instance(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_instance("2 x\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_instance("1 2\n1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_instance("1 1\nabc\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_instance("2 1\n1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_instance("1 1\n1\n2\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn certificate_round_trip() {
        let c = CertificateFile { kind: CertificateKind::Image, vector: vec![0.5, -1.25], support: vec![0, 2] };
        let text = write_certificate(&c);
        assert_eq!(text, "image\n0.5 -1.25\n1 3\n");
        assert_eq!(parse_certificate(&text).unwrap(), c);
        let empty = CertificateFile { kind: CertificateKind::Kernel, vector: vec![0.0], support: vec![] };
        assert_eq!(parse_certificate(&write_certificate(&empty)).unwrap(), empty);
    }
}
