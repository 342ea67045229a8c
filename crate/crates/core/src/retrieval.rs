//! Exact top-k cosine search over a flat, contiguous index.

use std::cmp::Ordering;
use std::path::Path;

use rayon::prelude::*;

use crate::chartcore::{read_embeddings, resolve_records, write_embeddings, EmbeddingVector, RankedEntry, RankedList};
use crate::{CsemError, Result};

/// Chart embeddings sorted by id and stored row-major in one buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorIndex {
    dim: usize,
    ids: Vec<String>,
    data: Vec<f64>,
}

impl VectorIndex {
    pub fn build(mut pairs: Vec<(String, EmbeddingVector)>) -> Result<Self> {
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(CsemError::DuplicateId(w[0].0.clone()));
        }
        let dim = pairs.first().map_or(0, |p| p.1.dim());
        let mut data = Vec::with_capacity(dim * pairs.len());
        let mut ids = Vec::with_capacity(pairs.len());
        for (id, v) in pairs {
            if v.dim() != dim {
                return Err(CsemError::DimMismatch { expected: dim, actual: v.dim() });
            }
            data.extend_from_slice(v.values());
            ids.push(id);
        }
        Ok(VectorIndex { dim, ids, data })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn entries(&self) -> Vec<(String, EmbeddingVector)> {
        (0..self.len())
            .map(|i| (self.ids[i].clone(), EmbeddingVector::normalized(self.vector(i).to_vec()).expect("unit vectors")))
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_embeddings(path, &self.entries())
    }

    /// Load `embeddings.bin`; ids are recovered by hashing `known_ids`.
    pub fn load(path: &Path, known_ids: &[String]) -> Result<Self> {
        let (_, records) = read_embeddings(path)?;
        Self::build(resolve_records(path, records, known_ids)?)
    }

    /// Exact top-k by dot product; ties go to the smaller chart id.
    pub fn search(&self, query: &EmbeddingVector, k: usize) -> Result<RankedList> {
        self.search_as("", query, k)
    }

    pub fn search_as(&self, query_id: &str, query: &EmbeddingVector, k: usize) -> Result<RankedList> {
        if k == 0 {
            return Err(CsemError::InvalidArgument("k must be at least 1".into()));
        }
        if !self.is_empty() && query.dim() != self.dim {
            return Err(CsemError::DimMismatch { expected: self.dim, actual: query.dim() });
        }
        let q = query.values();
        // (score, row) kept sorted best-first; rows arrive in id order, so a
        // newcomer never beats an equal score already held
        let mut top: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        for (row, v) in self.data.chunks_exact(self.dim.max(1)).enumerate() {
            let s = score(q, v);
            if top.len() == k && s <= top[k - 1].0 {
                continue;
            }
            let pos = top.partition_point(|&(t, _)| t >= s);
            top.insert(pos, (s, row));
            top.truncate(k);
        }
        Ok(RankedList {
            query_id: query_id.to_string(),
            entries: top.into_iter().map(|(score, r)| RankedEntry { chart_id: self.ids[r].clone(), score }).collect(),
            k,
        })
    }

    /// Element-wise identical to repeated [`VectorIndex::search_as`].
    pub fn batch_search(&self, queries: &[(String, EmbeddingVector)], k: usize) -> Result<Vec<RankedList>> {
        queries.par_iter().map(|(id, q)| self.search_as(id, q, k)).collect()
    }
}

/// Sequential dot product; the summation order is part of the contract so
/// scores are reproducible bit for bit.
pub fn score(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

/// Best-first order: score descending, then id ascending.
pub fn rank_order(a: (&str, f64), b: (&str, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: &[f64]) -> EmbeddingVector {
        EmbeddingVector::normalized(v.to_vec()).unwrap()
    }

    fn ab() -> VectorIndex {
        VectorIndex::build(vec![("b".into(), e(&[0.0, 1.0])), ("a".into(), e(&[1.0, 0.0]))]).unwrap()
    }

    #[test]
    fn top1() {
        let r = ab().search(&e(&[1.0, 0.0]), 1).unwrap();
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].chart_id, "a");
        assert_eq!(r.entries[0].score, 1.0);
    }

    #[test]
    fn ties_break_by_id() {
        let r = ab().search(&e(&[1.0, 1.0]), 2).unwrap();
        let ids: Vec<_> = r.entries.iter().map(|x| x.chart_id.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);
        assert!((r.entries[1].score - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn k_beyond_size() {
        assert_eq!(ab().search(&e(&[0.0, 1.0]), 10).unwrap().entries.len(), 2);
    }

    #[test]
    fn build_errors() {
        assert!(matches!(
            VectorIndex::build(vec![("a".into(), e(&[1.0])), ("a".into(), e(&[1.0]))]),
            Err(CsemError::DuplicateId(_))
        ));
        assert!(VectorIndex::build(vec![("a".into(), e(&[1.0])), ("b".into(), e(&[1.0, 0.0]))]).is_err());
        assert!(ab().search(&e(&[1.0, 0.0, 0.0]), 1).is_err());
        assert!(ab().search(&e(&[1.0, 0.0]), 0).is_err());
    }
}
