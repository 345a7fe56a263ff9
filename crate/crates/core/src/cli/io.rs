//! Family files: a plain text format and a JSON object form.
//!
//! ```text
//! # comment
//! n=3
//! 1 2 3
//! 2 1 3
//! ```
//!
//! The JSON form is `{"n": 3, "members": [[1, 2, 3], [2, 1, 3]]}`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::perm_core::{PermFamily, Permutation};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyJson {
    n: usize,
    members: Vec<Vec<usize>>,
}

/// Parses either format; JSON is recognised by a leading `{`.
pub fn parse_family(text: &str) -> Result<PermFamily> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_text(text)
    }
}

fn build(n: usize, members: impl IntoIterator<Item = (usize, Vec<usize>)>) -> Result<PermFamily> {
    let mut seen = HashSet::new();
    let mut perms = Vec::new();
    for (line, images) in members {
        if images.len() != n {
            return Err(parse_err(line, format!("expected {n} images, found {}", images.len())));
        }
        let p = Permutation::new(images).map_err(|e| parse_err(line, e.to_string()))?;
        if !seen.insert(p.clone()) {
            return Err(parse_err(line, format!("duplicate member {p}")));
        }
        perms.push(p);
    }
    PermFamily::from_perms(n, &perms).map_err(|e| parse_err(1, e.to_string()))
}

fn parse_text(text: &str) -> Result<PermFamily> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing `n=<n>` header"))?;
    let n: usize = header
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| parse_err(hl, format!("expected `n=<n>`, found `{header}`")))?;
    let mut members = Vec::new();
    for (line, l) in lines {
        let images = l
            .split_whitespace()
            .map(|tok| tok.parse::<usize>().map_err(|_| parse_err(line, format!("not an integer: `{tok}`"))))
            .collect::<Result<Vec<_>>>()?;
        members.push((line, images));
    }
    build(n, members)
}

fn parse_json(text: &str) -> Result<PermFamily> {
    let raw: FamilyJson = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    // members are reported by their 1-based position in the array
    build(raw.n, raw.members.into_iter().enumerate().map(|(k, m)| (k + 1, m)))
}

pub fn read_family(path: &Path) -> Result<PermFamily> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_family(&text)
}

/// The text format, members in rank order.
pub fn emit_family(f: &PermFamily) -> String {
    let mut out = format!("n={}\n", f.n());
    for p in f.iter() {
        writeln!(out, "{p}").expect("writing to a String");
    }
    out
}

pub fn emit_family_json(f: &PermFamily) -> String {
    serde_json::to_string(f).expect("families serialize")
}

pub fn write_family(path: &Path, f: &PermFamily) -> Result<()> {
    let body = if path.extension().is_some_and(|e| e == "json") { emit_family_json(f) } else { emit_family(f) };
    std::fs::write(path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm_core::antipodal_pair;

    #[test]
    fn text_examples() {
        let f = parse_family("n=3\n1 2 3\n").unwrap();
        assert_eq!(f.members(), vec![Permutation::identity(3)]);
        let err = parse_family("n=3\n1 1 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_family("# c\n\nn=3\n1 2 3\n3 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err}");
        let err = parse_family("n=3\n1 2 3\n1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(matches!(parse_family("3\n1 2 3\n").unwrap_err(), Error::Parse { line: 1, .. }));
        assert!(matches!(parse_family("n=3\n1 x 3\n").unwrap_err(), Error::Parse { line: 2, .. }));
        assert!(parse_family("n=3\n").unwrap().is_empty());
    }

    #[test]
    fn round_trips() {
        let (f, _) = antipodal_pair(4).unwrap();
        let back = parse_family(&emit_family(&f)).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.len(), 4);
        assert_eq!(parse_family(&emit_family_json(&f)).unwrap(), f);
    }

    #[test]
    fn json_errors() {
        assert!(matches!(parse_family("{\"n\": 3, \"members\": [[1,2,2]]}").unwrap_err(), Error::Parse { line: 1, .. }));
        assert!(parse_family("{\"n\": 3, \"members\": [[1,2,3]], \"x\": 1}").is_err());
    }
}
