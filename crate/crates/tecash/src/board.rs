//! Bulletin board stored as JSON lines:
//! `{"idx":1,"provider":"shop","scheme":"compact/v1","payment_b64":"…","info_b64":"…"}`.
//!
//! A final line without a newline is what a crash mid-append leaves behind.
//! Readers ignore it and the next append cuts it off.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::{Deserialize, Serialize};
use tecash_core::ledger::{BulletinBoard, Entry};
use tecash_core::withdraw::Scheme;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BoardLine {
    pub idx: u64,
    pub provider: String,
    pub scheme: String,
    pub payment_b64: String,
    pub info_b64: String,
}

impl From<&Entry> for BoardLine {
    fn from(e: &Entry) -> Self {
        BoardLine {
            idx: e.index,
            provider: e.provider.clone(),
            scheme: e.scheme.tag().into(),
            payment_b64: B64.encode(&e.payment),
            info_b64: B64.encode(&e.info),
        }
    }
}

impl TryFrom<BoardLine> for Entry {
    type Error = Error;

    fn try_from(l: BoardLine) -> Result<Entry> {
        let bad = |what: &str| Error::Artifact(format!("board line {}: bad {what}", l.idx));
        Ok(Entry {
            index: l.idx,
            scheme: Scheme::from_tag(&l.scheme).ok_or_else(|| bad("scheme"))?,
            payment: B64.decode(&l.payment_b64).map_err(|_| bad("payment"))?,
            info: B64.decode(&l.info_b64).map_err(|_| bad("info"))?,
            provider: l.provider,
        })
    }
}

pub fn line(e: &Entry) -> Result<String> {
    let mut s = serde_json::to_string(&BoardLine::from(e))?;
    s.push('\n');
    Ok(s)
}

pub fn to_jsonl(bb: &BulletinBoard) -> Result<String> {
    bb.entries().iter().map(line).collect()
}

/// Parses complete lines; returns the board and the length of the valid prefix.
pub fn parse(text: &str) -> Result<(BulletinBoard, usize)> {
    let complete = text.rfind('\n').map_or(0, |i| i + 1);
    let mut entries = Vec::new();
    for l in text[..complete].lines().filter(|l| !l.trim().is_empty()) {
        let parsed: BoardLine = serde_json::from_str(l)?;
        entries.push(Entry::try_from(parsed)?);
    }
    Ok((BulletinBoard::from_entries(entries)?, complete))
}

/// Loads a board file; a missing file is an empty board.
pub fn load(path: &Path) -> Result<BulletinBoard> {
    match fs::read_to_string(path) {
        Ok(text) => Ok(parse(&text)?.0),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(BulletinBoard::new()),
        Err(e) => Err(Error::io(path, e)),
    }
}

/// Appends one deposit through the board's duplicate check.
pub fn deposit(path: &Path, provider: &str, scheme: Scheme, payment: &[u8], info: &[u8], raw: bool) -> Result<u64> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
        Err(e) => return Err(Error::io(path, e)),
    };
    let (mut bb, valid) = parse(&text)?;
    let index = if raw {
        bb.raw_append(provider, scheme, payment, info)
    } else {
        bb.deposit(provider, scheme, payment, info)?
    };
    let io = |e| Error::io(path, e);
    if valid < text.len() {
        OpenOptions::new().write(true).open(path).and_then(|f| f.set_len(valid as u64)).map_err(io)?;
    }
    let entry = bb.read(index).expect("just appended");
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    f.write_all(line(entry)?.as_bytes()).map_err(io)?;
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_trailing_line_is_ignored_then_replaced() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bb.jsonl");
        assert_eq!(deposit(&path, "a", Scheme::Compact, b"p1", b"i1", false).unwrap(), 1);
        assert_eq!(deposit(&path, "a", Scheme::Compact, b"p2", b"i2", false).unwrap(), 2);
        let before = fs::read_to_string(&path).unwrap();

        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"idx\":3,\"prov").unwrap();
        assert_eq!(load(&path).unwrap().len(), 2);

        assert!(deposit(&path, "a", Scheme::Compact, b"p2", b"i2", false).is_err());
        assert_eq!(deposit(&path, "b", Scheme::Divisible, b"p3", b"i3", false).unwrap(), 3);
        let after = fs::read_to_string(&path).unwrap();
        assert!(after.starts_with(&before));
        let bb = load(&path).unwrap();
        assert_eq!(bb.len(), 3);
        assert_eq!(bb.read(3).unwrap().scheme, Scheme::Divisible);
        assert_eq!(to_jsonl(&bb).unwrap(), after);
    }

    #[test]
    fn corrupt_complete_lines_are_errors() {
        assert!(parse("not json\n").is_err());
        let gap = "{\"idx\":2,\"provider\":\"a\",\"scheme\":\"compact/v1\",\"payment_b64\":\"\",\"info_b64\":\"\"}\n";
        assert!(parse(gap).is_err());
        assert_eq!(parse("").unwrap().0.len(), 0);
    }
}
