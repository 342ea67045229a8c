//! `embeddings.bin`: magic `CSEM`, u32 dim, u64 count, then `count` records
//! of a 16-byte id hash followed by `dim` little-endian f32 values.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::types::EmbeddingVector;
use crate::{CsemError, Result};

pub const EMBEDDINGS_MAGIC: &[u8; 4] = b"CSEM";

/// First 16 bytes of SHA-256 over the UTF-8 id.
pub fn id_hash(id: &str) -> [u8; 16] {
    let digest = Sha256::digest(id.as_bytes());
    let mut out = [0u8; 16];
    out.copy_from_slice(&digest[..16]);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRecord {
    pub id_hash: [u8; 16],
    pub values: Vec<f32>,
}

pub fn write_embeddings(path: &Path, entries: &[(String, EmbeddingVector)]) -> Result<()> {
    let dim = entries.first().map_or(0, |(_, v)| v.dim());
    if let Some((id, v)) = entries.iter().find(|(_, v)| v.dim() != dim) {
        return Err(CsemError::validation(id, format!("dimension {} differs from {dim}", v.dim())));
    }
    let file = fs::File::create(path).map_err(|e| CsemError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = |bytes: &[u8]| w.write_all(bytes).map_err(|e| CsemError::io(path, e));
    write(EMBEDDINGS_MAGIC)?;
    write(&(dim as u32).to_le_bytes())?;
    write(&(entries.len() as u64).to_le_bytes())?;
    for (id, v) in entries {
        write(&id_hash(id))?;
        for x in v.values() {
            write(&(*x as f32).to_le_bytes())?;
        }
    }
    w.flush().map_err(|e| CsemError::io(path, e))
}

pub fn read_embeddings(path: &Path) -> Result<(usize, Vec<EmbeddingRecord>)> {
    let bytes = fs::read(path).map_err(|e| CsemError::io(path, e))?;
    let bad = |message: String| CsemError::Format { path: path.to_path_buf(), message };
    if bytes.len() < 16 || &bytes[..4] != EMBEDDINGS_MAGIC {
        return Err(bad("missing CSEM header".into()));
    }
    let dim = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let count = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let rec_len = 16 + 4 * dim;
    let body = &bytes[16..];
    if body.len() != rec_len * count {
        return Err(bad(format!("expected {count} records of {rec_len} bytes, found {} body bytes", body.len())));
    }
    let records = body
        .chunks_exact(rec_len)
        .map(|rec| EmbeddingRecord {
            id_hash: rec[..16].try_into().unwrap(),
            values: rec[16..].chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().unwrap())).collect(),
        })
        .collect();
    Ok((dim, records))
}

/// Map records back to ids drawn from `known_ids`, renormalizing in f64.
pub fn resolve_records(
    path: &Path,
    records: Vec<EmbeddingRecord>,
    known_ids: &[String],
) -> Result<Vec<(String, EmbeddingVector)>> {
    let lookup: HashMap<[u8; 16], &String> = known_ids.iter().map(|id| (id_hash(id), id)).collect();
    records
        .into_iter()
        .map(|r| {
            let id = lookup.get(&r.id_hash).ok_or_else(|| CsemError::Format {
                path: path.to_path_buf(),
                message: format!("record hash {} matches no known id", hex16(&r.id_hash)),
            })?;
            let v = EmbeddingVector::normalized(r.values.into_iter().map(f64::from).collect())?;
            Ok(((*id).clone(), v))
        })
        .collect()
}

fn hex16(b: &[u8; 16]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.bin");
        let v = EmbeddingVector::normalized(vec![1.0, 0.0, 0.0]).unwrap();
        write_embeddings(&p, &[("a".into(), v)]).unwrap();
        let bytes = fs::read(&p).unwrap();
        assert_eq!(&bytes[..4], b"CSEM");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 3);
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 1);
        assert_eq!(bytes.len(), 16 + 16 + 12);
        assert_eq!(&bytes[16..32], &id_hash("a"));
        assert_eq!(f32::from_le_bytes(bytes[32..36].try_into().unwrap()), 1.0);

        let (dim, recs) = read_embeddings(&p).unwrap();
        assert_eq!(dim, 3);
        let resolved = resolve_records(&p, recs, &["a".to_string()]).unwrap();
        assert_eq!(resolved[0].0, "a");
    }

    #[test]
    fn truncated_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.bin");
        let v = EmbeddingVector::normalized(vec![1.0, 1.0]).unwrap();
        write_embeddings(&p, &[("a".into(), v)]).unwrap();
        let mut bytes = fs::read(&p).unwrap();
        bytes.pop();
        fs::write(&p, bytes).unwrap();
        assert!(matches!(read_embeddings(&p), Err(CsemError::Format { .. })));
    }
}
