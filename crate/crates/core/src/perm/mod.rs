//! Permutations in one-line notation and the constructions built on them:
//! pattern containment, point deletion, direct/skew sums, interleaves, sum
//! decomposition and the increasing oscillations.

mod containment;
mod decompose;
mod oscillation;

pub use containment::contains;
pub use decompose::SumDecomposition;
pub use oscillation::{
    classify_oscillation, family_interleave, family_sum, OscKind, OscillationId, Shape, ShapeKind,
};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A permutation of `1..=n` in one-line notation. The empty permutation is
/// allowed and plays the role of the poset's bottom element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Permutation {
    values: Vec<u32>,
}

/// Compact byte key for a permutation of length at most 255.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermKey(Box<[u8]>);

impl PermKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl Permutation {
    pub fn empty() -> Self {
        Permutation { values: Vec::new() }
    }

    pub fn singleton() -> Self {
        Permutation { values: vec![1] }
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            values: (1..=n as u32).collect(),
        }
    }

    pub fn reverse_identity(n: usize) -> Self {
        Permutation {
            values: (1..=n as u32).rev().collect(),
        }
    }

    /// Every permutation of length `n`, in lexicographic order.
    pub fn all_of_length(n: usize) -> Vec<Permutation> {
        let mut v: Vec<u32> = (1..=n as u32).collect();
        let mut out = vec![Permutation { values: v.clone() }];
        loop {
            let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
                return out;
            };
            let j = (i..v.len())
                .rev()
                .find(|&j| v[j] > v[i - 1])
                .expect("exists");
            v.swap(i - 1, j);
            v[i..].reverse();
            out.push(Permutation { values: v.clone() });
        }
    }

    /// Validates that `seq` is a bijection onto `1..=seq.len()`.
    pub fn from_one_line<I>(seq: I) -> Result<Self>
    where
        I: IntoIterator<Item = u32>,
    {
        let values: Vec<u32> = seq.into_iter().collect();
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in &values {
            let idx = v as usize;
            if idx == 0 || idx > n {
                return Err(Error::NotAPermutation(format!("value {v} outside 1..={n}")));
            }
            if std::mem::replace(&mut seen[idx - 1], true) {
                return Err(Error::NotAPermutation(format!("repeated value {v}")));
            }
        }
        Ok(Permutation { values })
    }

    /// Callers guarantee `values` is already a permutation of `1..=len`.
    pub(crate) fn from_vec_unchecked(values: Vec<u32>) -> Self {
        debug_assert!(Permutation::from_one_line(values.iter().copied()).is_ok());
        Permutation { values }
    }

    /// Relabels any sequence of distinct integers to its order pattern.
    pub fn standardize(seq: &[u32]) -> Self {
        let mut order: Vec<usize> = (0..seq.len()).collect();
        order.sort_unstable_by_key(|&i| seq[i]);
        let mut values = vec![0u32; seq.len()];
        for (rank, &i) in order.iter().enumerate() {
            values[i] = rank as u32 + 1;
        }
        Permutation { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u32> {
        self.values
    }

    /// Canonical key: the value sequence packed as bytes.
    pub fn key(&self) -> Result<PermKey> {
        if self.len() > u8::MAX as usize {
            return Err(Error::TooLarge {
                len: self.len(),
                cap: u8::MAX as usize,
            });
        }
        Ok(PermKey(self.values.iter().map(|&v| v as u8).collect()))
    }

    pub fn is_identity(&self) -> bool {
        self.values
            .iter()
            .enumerate()
            .all(|(i, &v)| v as usize == i + 1)
    }

    pub fn is_reverse_identity(&self) -> bool {
        let n = self.len();
        self.values
            .iter()
            .enumerate()
            .all(|(i, &v)| v as usize == n - i)
    }

    /// True when `pattern` occurs in `self`.
    pub fn contains(&self, pattern: &Permutation) -> bool {
        contains(pattern, self)
    }

    /// Removes the point at 1-based `position` and renormalizes.
    pub fn delete_point(&self, position: usize) -> Result<Permutation> {
        if position == 0 || position > self.len() {
            return Err(Error::IndexOutOfRange {
                position,
                len: self.len(),
            });
        }
        let removed = self.values[position - 1];
        let values = self
            .values
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != position - 1)
            .map(|(_, &v)| if v > removed { v - 1 } else { v })
            .collect();
        Ok(Permutation { values })
    }

    /// All distinct permutations obtained by deleting one point.
    pub fn children(&self) -> Vec<Permutation> {
        let mut out: Vec<Permutation> = (1..=self.len())
            .map(|p| self.delete_point(p).expect("position in range"))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn direct_sum(&self, other: &Permutation) -> Permutation {
        let shift = self.len() as u32;
        let values = self
            .values
            .iter()
            .copied()
            .chain(other.values.iter().map(|&v| v + shift))
            .collect();
        Permutation { values }
    }

    pub fn skew_sum(&self, other: &Permutation) -> Permutation {
        let shift = other.len() as u32;
        let values = self
            .values
            .iter()
            .map(|&v| v + shift)
            .chain(other.values.iter().copied())
            .collect();
        Permutation { values }
    }

    /// `self ⊙ other`: the direct sum with the largest point of `self` and the
    /// smallest point of `other` exchanging values.
    pub fn interleave(&self, other: &Permutation) -> Result<Permutation> {
        if self.is_empty() || other.is_empty() {
            return Err(Error::EmptyOperand);
        }
        let m = self.len() as u32;
        let mut sum = self.direct_sum(other);
        for v in &mut sum.values {
            if *v == m {
                *v = m + 1;
            } else if *v == m + 1 {
                *v = m;
            }
        }
        Ok(sum)
    }

    /// `self ⊘ other`: the skew sum with the smallest point of `self` and the
    /// largest point of `other` exchanging values.
    pub fn skew_interleave(&self, other: &Permutation) -> Result<Permutation> {
        if self.is_empty() || other.is_empty() {
            return Err(Error::EmptyOperand);
        }
        let n = other.len() as u32;
        let mut sum = self.skew_sum(other);
        for v in &mut sum.values {
            if *v == n + 1 {
                *v = n;
            } else if *v == n {
                *v = n + 1;
            }
        }
        Ok(sum)
    }

    /// `⊕^r self`.
    pub fn iterated_sum(&self, r: usize) -> Result<Permutation> {
        if r == 0 {
            return Err(Error::PreconditionViolation(
                "iterated sum needs at least one copy".into(),
            ));
        }
        let m = self.len() as u32;
        let values = (0..r as u32)
            .flat_map(|copy| self.values.iter().map(move |&v| v + copy * m))
            .collect();
        Ok(Permutation { values })
    }

    /// `⊙^k(21)`, built left to right.
    pub fn iterated_interleave_21(k: usize) -> Result<Permutation> {
        if k == 0 {
            return Err(Error::PreconditionViolation(
                "need at least one 21 block".into(),
            ));
        }
        let two_one = Permutation { values: vec![2, 1] };
        let mut acc = two_one.clone();
        for _ in 1..k {
            acc = acc.interleave(&two_one)?;
        }
        Ok(acc)
    }

    pub fn inverse(&self) -> Permutation {
        let mut values = vec![0u32; self.len()];
        for (i, &v) in self.values.iter().enumerate() {
            values[v as usize - 1] = i as u32 + 1;
        }
        Permutation { values }
    }

    pub fn reverse(&self) -> Permutation {
        Permutation {
            values: self.values.iter().rev().copied().collect(),
        }
    }

    pub fn complement(&self) -> Permutation {
        let n = self.len() as u32;
        Permutation {
            values: self.values.iter().map(|&v| n + 1 - v).collect(),
        }
    }

    pub fn sum_decompose(&self) -> SumDecomposition {
        SumDecomposition::of(self)
    }

    pub fn is_sum_indecomposable(&self) -> bool {
        // A component boundary sits wherever the prefix maximum equals the
        // prefix length; only the final position may qualify.
        let mut max = 0;
        let n = self.len();
        for (i, &v) in self.values.iter().enumerate() {
            max = max.max(v);
            if max as usize == i + 1 && i + 1 < n {
                return false;
            }
        }
        !self.is_empty()
    }

    /// Simple: no intervals besides singletons and the whole permutation.
    pub fn is_simple(&self) -> bool {
        let n = self.len();
        if n <= 2 {
            return true;
        }
        for start in 0..n {
            let (mut lo, mut hi) = (u32::MAX, 0);
            for end in start..n {
                lo = lo.min(self.values[end]);
                hi = hi.max(self.values[end]);
                let width = end - start + 1;
                if width > 1 && width < n && (hi - lo) as usize + 1 == width {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("ε");
        }
        // Bare digits while unambiguous, commas beyond that.
        let sep = if self.len() <= 9 { "" } else { "," };
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl serde::Serialize for Permutation {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

/// Accepts comma- or whitespace-separated integers, or for `n <= 9` a bare
/// digit string such as `315264`. `ε`, `e` and the empty string denote the
/// empty permutation.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let parse_err = |reason: String| Error::Parse {
            input: s.to_string(),
            reason,
        };
        if trimmed.is_empty() || trimmed == "ε" || trimmed == "e" {
            return Ok(Permutation::empty());
        }
        let separated = trimmed.contains(|c: char| c == ',' || c.is_whitespace());
        let values: Vec<u32> = if separated {
            trimmed
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|tok| !tok.is_empty())
                .map(|tok| {
                    tok.parse::<u32>()
                        .map_err(|e| parse_err(format!("bad entry {tok:?}: {e}")))
                })
                .collect::<Result<_>>()?
        } else {
            if trimmed.len() > 9 {
                return Err(parse_err(
                    "bare digit strings are only accepted for length <= 9".into(),
                ));
            }
            trimmed
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| parse_err(format!("unexpected character {c:?}")))
                })
                .collect::<Result<_>>()?
        };
        Permutation::from_one_line(values).map_err(|e| parse_err(e.to_string()))
    }
}
