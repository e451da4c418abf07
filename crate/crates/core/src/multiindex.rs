//! Multi-indices, section indices and the graded order on sections.

use std::cmp::Ordering;
use std::fmt;

use num::BigInt;

use crate::rational::{binomial, factorial};

/// Exponent tuple `(p_1, ..., p_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        MultiIndex(exps)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&p| factorial(p)).product()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&p| p == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when every entry stays nonnegative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(MultiIndex)
    }

    /// All multi-indices of `n` variables with total degree exactly `d`,
    /// in descending lexicographic order.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if i + 1 == n {
                cur[i] = left;
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for v in (0..=left).rev() {
                cur[i] = v;
                rec(i + 1, left - v, cur, out);
            }
        }
        if n == 0 {
            if d == 0 {
                out.push(MultiIndex(vec![]));
            }
            return out;
        }
        rec(0, d, &mut cur, &mut out);
        out
    }

    /// All multi-indices with degree at most `d`, graded then descending lexicographic.
    pub fn all_up_to(n: usize, d: u32) -> Vec<MultiIndex> {
        (0..=d).flat_map(|k| Self::all_of_degree(n, k)).collect()
    }

    /// Graded comparison: degree first, then larger exponent tuple first.
    pub fn graded_cmp(&self, other: &MultiIndex) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// A section label `(P, j)` with bundle index `j` in `1..=r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SectionIndex {
    pub p: MultiIndex,
    pub j: usize,
}

impl SectionIndex {
    pub fn new(p: MultiIndex, j: usize) -> Self {
        assert!(j >= 1, "bundle index is 1-based");
        SectionIndex { p, j }
    }

    pub fn cmp_order(&self, other: &SectionIndex) -> Ordering {
        self.p.graded_cmp(&other.p).then(self.j.cmp(&other.j))
    }
}

impl fmt::Display for SectionIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.j)
    }
}

/// Number of sections `(P, j)` with `|P| = alpha`.
pub fn count_of_degree(n: usize, r: usize, alpha: u32) -> usize {
    r * binomial((n - 1) as u64 + alpha as u64, (n - 1) as u64) as usize
}

/// Number of sections with `|P| <= s`.
pub fn count_up_to(n: usize, r: usize, s: u32) -> usize {
    r * binomial(n as u64 + s as u64, n as u64) as usize
}

/// 1-based position of `idx` in the graded order on sections.
pub fn section_rank(idx: &SectionIndex, n: usize, r: usize) -> usize {
    assert_eq!(idx.p.n(), n, "multi-index length must equal n");
    assert!(idx.j >= 1 && idx.j <= r, "bundle index out of range");
    let d = idx.p.degree();
    let below = if d == 0 { 0 } else { count_up_to(n, r, d - 1) };
    let pos = MultiIndex::all_of_degree(n, d)
        .iter()
        .position(|q| q == &idx.p)
        .expect("multi-index enumerated in its own degree");
    below + pos * r + idx.j
}

/// Inverse of [`section_rank`].
pub fn section_at_rank(rank: usize, n: usize, r: usize) -> SectionIndex {
    assert!(rank >= 1);
    let mut d = 0;
    let mut below = 0;
    loop {
        let c = count_of_degree(n, r, d);
        if rank <= below + c {
            let off = rank - below - 1;
            let p = MultiIndex::all_of_degree(n, d).swap_remove(off / r);
            return SectionIndex::new(p, off % r + 1);
        }
        below += c;
        d += 1;
    }
}

/// All sections with `|P| <= s` in rank order.
pub fn enumerate_sections(n: usize, r: usize, s: u32) -> Vec<SectionIndex> {
    MultiIndex::all_up_to(n, s)
        .into_iter()
        .flat_map(|p| (1..=r).map(move |j| SectionIndex::new(p.clone(), j)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn si(p: &[u32], j: usize) -> SectionIndex {
        SectionIndex::new(MultiIndex::new(p.to_vec()), j)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(section_rank(&si(&[0, 0], 1), 2, 1), 1);
        assert_eq!(section_rank(&si(&[0, 0], 2), 2, 2), 2);
        assert_eq!(section_rank(&si(&[1, 0], 1), 2, 2), 3);
    }

    #[test]
    fn rank_of_second_coordinate_second_frame() {
        for n in 2..=4 {
            for r in 2..=3 {
                let mut p = vec![0; n];
                p[1] = 1;
                assert_eq!(section_rank(&si(&p, 2), n, r), 2 * r + 2);
            }
        }
    }

    #[test]
    fn factorial_and_degree() {
        let p = MultiIndex::new(vec![2, 1]);
        assert_eq!(p.degree(), 3);
        assert_eq!(p.factorial(), BigInt::from(2));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_sections(2, 1, 2).len(), 6);
        assert_eq!(count_of_degree(3, 2, 2), 12);
        assert_eq!(MultiIndex::all_of_degree(3, 2).len(), 6);
    }

    proptest! {
        #[test]
        fn rank_is_bijective(n in 1usize..4, r in 1usize..4, s in 0u32..4) {
            let all = enumerate_sections(n, r, s);
            prop_assert_eq!(all.len(), count_up_to(n, r, s));
            for (i, idx) in all.iter().enumerate() {
                prop_assert_eq!(section_rank(idx, n, r), i + 1);
                prop_assert_eq!(&section_at_rank(i + 1, n, r), idx);
            }
            for w in all.windows(2) {
                prop_assert_eq!(w[0].cmp_order(&w[1]), Ordering::Less);
            }
        }
    }
}
