//! Single-file index container.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic    8 bytes  "MKDRIDX\0"
//! version  u32
//! length   u64      payload byte count
//! payload  ...
//! crc32    u32      CRC-32 (IEEE) of payload
//! ```
//!
//! The payload stores the vocabulary, groups, category names and per-document
//! bitsets. Aggregate counts are rebuilt on load.

use std::collections::BTreeMap;
use std::io::{Cursor, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use super::{words_for, DocMark, IndexError, YearTermIndex};
use crate::corpus::VocabTerm;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"MKDRIDX\0";
const HEADER_LEN: usize = 8 + 4 + 8;

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.write_u32::<LE>(s.len() as u32).unwrap();
    out.extend_from_slice(s.as_bytes());
}

fn encode_payload(idx: &YearTermIndex) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + idx.docs.len() * (24 + idx.words * 8));
    put_str(&mut out, &idx.lexicon_name);
    out.write_u32::<LE>(idx.vocabulary.len() as u32).unwrap();
    for v in &idx.vocabulary {
        put_str(&mut out, &v.term);
        out.write_u8(v.case_sensitive as u8).unwrap();
    }
    out.write_u32::<LE>(idx.groups.len() as u32).unwrap();
    for (name, members) in &idx.groups {
        put_str(&mut out, name);
        out.write_u32::<LE>(members.len() as u32).unwrap();
        members.iter().for_each(|m| put_str(&mut out, m));
    }
    out.write_u32::<LE>(idx.categories.len() as u32).unwrap();
    idx.categories.iter().for_each(|c| put_str(&mut out, c));
    out.write_u64::<LE>(idx.docs.len() as u64).unwrap();
    for (i, d) in idx.docs.iter().enumerate() {
        put_str(&mut out, &d.id);
        out.write_i32::<LE>(d.year).unwrap();
        out.write_u32::<LE>(d.categories.len() as u32).unwrap();
        for &c in &d.categories {
            out.write_u32::<LE>(c).unwrap();
        }
        for &w in idx.doc_marks(i) {
            out.write_u64::<LE>(w).unwrap();
        }
    }
    out
}

struct Reader<'a> {
    cur: Cursor<&'a [u8]>,
}

fn corrupt(what: &str) -> IndexError {
    IndexError::Corrupt(format!("unexpected end of payload reading {what}"))
}

impl Reader<'_> {
    fn remaining(&self) -> usize {
        self.cur.get_ref().len() - self.cur.position() as usize
    }

    fn u32(&mut self, what: &str) -> Result<u32, IndexError> {
        self.cur.read_u32::<LE>().map_err(|_| corrupt(what))
    }

    fn count(&mut self, what: &str, min_item: usize) -> Result<usize, IndexError> {
        let n = self.u32(what)? as usize;
        if n.saturating_mul(min_item) > self.remaining() {
            return Err(corrupt(what));
        }
        Ok(n)
    }

    fn string(&mut self, what: &str) -> Result<String, IndexError> {
        let len = self.count(what, 1)?;
        let mut buf = vec![0; len];
        self.cur.read_exact(&mut buf).map_err(|_| corrupt(what))?;
        String::from_utf8(buf).map_err(|_| IndexError::Corrupt(format!("{what} is not UTF-8")))
    }
}

fn decode_payload(payload: &[u8]) -> Result<YearTermIndex, IndexError> {
    let mut r = Reader {
        cur: Cursor::new(payload),
    };
    let lexicon_name = r.string("lexicon name")?;
    let n_vocab = r.count("vocabulary", 5)?;
    let mut vocabulary = Vec::with_capacity(n_vocab);
    for _ in 0..n_vocab {
        let term = r.string("term")?;
        let case_sensitive = r.cur.read_u8().map_err(|_| corrupt("term flags"))? != 0;
        vocabulary.push(VocabTerm {
            term,
            case_sensitive,
        });
    }
    let n_groups = r.count("groups", 8)?;
    let mut groups = BTreeMap::new();
    for _ in 0..n_groups {
        let name = r.string("group name")?;
        let n = r.count("group members", 4)?;
        let members = (0..n)
            .map(|_| r.string("group member"))
            .collect::<Result<Vec<_>, _>>()?;
        groups.insert(name, members);
    }
    let n_cat = r.count("categories", 4)?;
    let categories = (0..n_cat)
        .map(|_| r.string("category"))
        .collect::<Result<Vec<_>, _>>()?;

    let words = words_for(vocabulary.len());
    let n_docs = r
        .cur
        .read_u64::<LE>()
        .map_err(|_| corrupt("document count"))? as usize;
    if n_docs.saturating_mul(12 + words * 8) > r.remaining() {
        return Err(corrupt("documents"));
    }
    let mut docs = Vec::with_capacity(n_docs);
    let mut marks = Vec::with_capacity(n_docs * words);
    for _ in 0..n_docs {
        let id = r.string("document id")?;
        let year = r.cur.read_i32::<LE>().map_err(|_| corrupt("year"))?;
        let nc = r.count("document categories", 4)?;
        let mut cats = Vec::with_capacity(nc);
        for _ in 0..nc {
            let c = r.u32("category id")?;
            if c as usize >= n_cat {
                return Err(IndexError::Corrupt(format!("category id {c} out of range")));
            }
            cats.push(c);
        }
        for _ in 0..words {
            marks.push(r.cur.read_u64::<LE>().map_err(|_| corrupt("term bits"))?);
        }
        if let Some(prev) = docs.last() {
            let prev: &DocMark = prev;
            if (prev.year, prev.id.as_str()) >= (year, id.as_str()) {
                return Err(IndexError::Corrupt("documents out of order".into()));
            }
        }
        docs.push(DocMark {
            id,
            year,
            categories: cats,
        });
    }
    if r.remaining() != 0 {
        return Err(IndexError::Corrupt("trailing bytes in payload".into()));
    }
    Ok(YearTermIndex::assemble(
        lexicon_name,
        vocabulary,
        groups,
        categories,
        docs,
        marks,
    ))
}

/// Serializes the index into the container format.
pub fn to_bytes(idx: &YearTermIndex) -> Vec<u8> {
    let payload = encode_payload(idx);
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len() + 4);
    out.extend_from_slice(MAGIC);
    out.write_u32::<LE>(FORMAT_VERSION).unwrap();
    out.write_u64::<LE>(payload.len() as u64).unwrap();
    out.extend_from_slice(&payload);
    out.write_u32::<LE>(crc32fast::hash(&payload)).unwrap();
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<YearTermIndex, IndexError> {
    if bytes.len() < 8 || &bytes[..8] != MAGIC {
        return Err(IndexError::BadMagic);
    }
    if bytes.len() < HEADER_LEN + 4 {
        return Err(IndexError::Checksum("file truncated".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(IndexError::Version {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    let len = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let expected_len = (HEADER_LEN as u64)
        .checked_add(len)
        .and_then(|n| n.checked_add(4));
    if expected_len != Some(bytes.len() as u64) {
        return Err(IndexError::Checksum(format!(
            "payload length {len} does not match file size {}",
            bytes.len()
        )));
    }
    let payload = &bytes[HEADER_LEN..bytes.len() - 4];
    let stored = u32::from_le_bytes(bytes[bytes.len() - 4..].try_into().unwrap());
    let actual = crc32fast::hash(payload);
    if stored != actual {
        return Err(IndexError::Checksum(format!(
            "stored {stored:08x}, computed {actual:08x}"
        )));
    }
    decode_payload(payload)
}

pub fn save_index(idx: &YearTermIndex, path: impl AsRef<Path>) -> Result<(), IndexError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(&to_bytes(idx))?;
    f.flush()?;
    Ok(())
}

pub fn load_index(path: impl AsRef<Path>) -> Result<YearTermIndex, IndexError> {
    from_bytes(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use crate::index::build_index;
    use crate::lexicon::builtin_lexicon;

    fn sample() -> YearTermIndex {
        let docs = vec![
            Document::new("a", 2022, "intricate meticulous").with_categories(["eng"]),
            Document::new("b", 2023, "a large language model, notable")
                .with_categories(["bio", "eng"]),
            Document::new("c", 2023, "blue"),
        ];
        build_index(&docs, &builtin_lexicon()).unwrap()
    }

    #[test]
    fn round_trip() {
        let idx = sample();
        assert_eq!(from_bytes(&to_bytes(&idx)).unwrap(), idx);
    }

    #[test]
    fn truncated_is_checksum_error() {
        let bytes = to_bytes(&sample());
        for cut in [bytes.len() - 1, bytes.len() - 10, 21] {
            assert!(
                matches!(from_bytes(&bytes[..cut]), Err(IndexError::Checksum(_))),
                "cut {cut}"
            );
        }
    }

    #[test]
    fn flipped_bit_is_checksum_error() {
        let mut bytes = to_bytes(&sample());
        bytes[HEADER_LEN + 3] ^= 0x10;
        assert!(matches!(from_bytes(&bytes), Err(IndexError::Checksum(_))));
    }

    #[test]
    fn future_version_rejected() {
        let mut bytes = to_bytes(&sample());
        bytes[8..12].copy_from_slice(&(FORMAT_VERSION + 1).to_le_bytes());
        assert!(matches!(
            from_bytes(&bytes),
            Err(IndexError::Version {
                found: 2,
                supported: 1
            })
        ));
    }

    #[test]
    fn not_an_index() {
        assert!(matches!(
            from_bytes(b"hello world"),
            Err(IndexError::BadMagic)
        ));
    }
}
