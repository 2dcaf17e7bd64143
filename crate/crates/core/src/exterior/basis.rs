use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::index::{MultiIndex, MAX_DIM};

/// Lexicographically ordered basis of `Λ^p(R^n)` with reverse lookup.
#[derive(Debug)]
pub struct FormBasis {
    pub dim: usize,
    pub degree: usize,
    indices: Vec<MultiIndex>,
    lookup: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl FormBasis {
    /// Shared, cached basis for `(n, p)`.
    pub fn get(n: usize, p: usize) -> Arc<FormBasis> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<FormBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry((n, p))
            .or_insert_with(|| Arc::new(FormBasis::build(n, p)))
            .clone()
    }

    fn build(n: usize, p: usize) -> FormBasis {
        assert!(n <= MAX_DIM, "dimension {n} exceeds {MAX_DIM}");
        let mut indices = Vec::with_capacity(binomial(n, p));
        let mut current = Vec::with_capacity(p);
        combinations(n, p, 0, &mut current, &mut indices);
        let mut lookup = vec![ABSENT; 1 << n];
        for (pos, idx) in indices.iter().enumerate() {
            lookup[idx.bits() as usize] = pos as u32;
        }
        FormBasis { dim: n, degree: p, indices, lookup }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index(&self, pos: usize) -> MultiIndex {
        self.indices[pos]
    }

    pub fn position(&self, idx: MultiIndex) -> Option<usize> {
        match self.lookup.get(idx.bits() as usize) {
            Some(&p) if p != ABSENT => Some(p as usize),
            _ => None,
        }
    }
}

fn combinations(
    n: usize,
    p: usize,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<MultiIndex>,
) {
    if current.len() == p {
        out.push(MultiIndex::new(current).expect("increasing by construction"));
        return;
    }
    for a in start..n {
        if n - a < p - current.len() {
            break;
        }
        current.push(a);
        combinations(n, p, a + 1, current, out);
        current.pop();
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_order() {
        for n in 0..=8 {
            for p in 0..=n {
                let b = FormBasis::get(n, p);
                assert_eq!(b.len(), binomial(n, p));
                assert!(b.indices().windows(2).all(|w| w[0] < w[1]));
                for (i, idx) in b.indices().iter().enumerate() {
                    assert_eq!(b.position(*idx), Some(i));
                }
            }
        }
    }

    #[test]
    fn position_of_foreign_degree_is_none() {
        let b = FormBasis::get(4, 2);
        assert_eq!(b.position(MultiIndex::single(0)), None);
    }
}
