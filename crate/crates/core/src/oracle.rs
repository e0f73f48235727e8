//! Ground truth: explicit downsets and intervals, with the Möbius function
//! evaluated straight from its defining recursion.

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::perm::Permutation;

pub const DEFAULT_DOWNSET_CAP: usize = 12;

/// Every nonempty permutation contained in a given top element, with the
/// containment relation materialized as one bitset per member.
#[derive(Clone, Debug)]
pub struct Downset {
    /// Sorted by length, then lexicographically.
    members: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    /// `below[i]` has bit `j` set iff `members[j] <= members[i]`.
    below: Vec<FixedBitSet>,
}

impl Downset {
    fn build(top: &Permutation) -> Self {
        let mut levels: Vec<Vec<Permutation>> = vec![vec![top.clone()]];
        while let Some(last) = levels.last() {
            if last.first().is_none_or(|p| p.len() <= 1) {
                break;
            }
            let mut next: Vec<Permutation> = last.iter().flat_map(Permutation::children).collect();
            next.sort_unstable();
            next.dedup();
            levels.push(next);
        }
        let members: Vec<Permutation> = levels.into_iter().rev().flatten().collect();
        let index: HashMap<Permutation, usize> = members
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let size = members.len();
        let mut below: Vec<FixedBitSet> = Vec::with_capacity(size);
        for (i, m) in members.iter().enumerate() {
            let mut set = FixedBitSet::with_capacity(size);
            set.insert(i);
            for child in m.children().iter().filter_map(|c| index.get(c)) {
                set.union_with(&below[*child]);
            }
            below.push(set);
        }
        Downset {
            members,
            index,
            below,
        }
    }

    pub fn top(&self) -> &Permutation {
        self.members.last().expect("downset is never empty")
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Permutation] {
        &self.members
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// True when `members[lower] <= members[upper]`.
    pub fn le(&self, lower: usize, upper: usize) -> bool {
        self.below[upper].contains(lower)
    }

    /// Members grouped by length.
    pub fn by_length(&self) -> BTreeMap<usize, Vec<Permutation>> {
        let mut out: BTreeMap<usize, Vec<Permutation>> = BTreeMap::new();
        for m in &self.members {
            out.entry(m.len()).or_default().push(m.clone());
        }
        out
    }

    /// `μ(members[lower], m)` for every member `m`; `None` outside the
    /// principal filter of `lower`. Evaluated bottom-up by length.
    pub fn mobius_column(&self, lower: usize) -> Result<Vec<Option<i64>>> {
        let size = self.len();
        let mut in_interval = FixedBitSet::with_capacity(size);
        for (i, set) in self.below.iter().enumerate() {
            if set.contains(lower) {
                in_interval.insert(i);
            }
        }
        let mut mu: Vec<Option<i64>> = vec![None; size];
        for i in in_interval.ones() {
            if i == lower {
                mu[i] = Some(1);
                continue;
            }
            let mut total: i64 = 0;
            for j in self.below[i].intersection(&in_interval) {
                if j == i {
                    continue;
                }
                let value = mu[j].expect("strictly smaller members come first");
                total = total.checked_add(value).ok_or(Error::Overflow)?;
            }
            mu[i] = Some(total.checked_neg().ok_or(Error::Overflow)?);
        }
        Ok(mu)
    }
}

/// A closed interval `[lower, upper]`, optionally annotated with `μ(lower, ·)`.
#[derive(Clone, Debug, Default)]
pub struct IntervalTable {
    pub lower: Permutation,
    pub upper: Permutation,
    pub members: BTreeMap<usize, Vec<Permutation>>,
    pub mu: HashMap<Permutation, i64>,
}

impl IntervalTable {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.values().map(Vec::len).sum()
    }

    /// Members in ascending length order.
    pub fn iter(&self) -> impl Iterator<Item = &Permutation> {
        self.members.values().flatten()
    }

    pub fn mu_of(&self, p: &Permutation) -> Option<i64> {
        self.mu.get(p).copied()
    }
}

/// Naive engine with a cap on the size of the upper bound.
#[derive(Clone, Copy, Debug)]
pub struct Oracle {
    cap: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            cap: DEFAULT_DOWNSET_CAP,
        }
    }
}

impl Oracle {
    pub fn with_cap(cap: usize) -> Self {
        Oracle { cap }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn downset(&self, pi: &Permutation) -> Result<Downset> {
        if pi.len() > self.cap {
            return Err(Error::TooLarge {
                len: pi.len(),
                cap: self.cap,
            });
        }
        Ok(Downset::build(pi))
    }

    /// Members of `[sigma, pi]`; empty when `sigma` is not contained in `pi`.
    pub fn interval(&self, sigma: &Permutation, pi: &Permutation) -> Result<IntervalTable> {
        let down = self.downset(pi)?;
        let mut table = IntervalTable {
            lower: sigma.clone(),
            upper: pi.clone(),
            ..Default::default()
        };
        if sigma.is_empty() {
            return Err(Error::PreconditionViolation(
                "interval lower bound must be nonempty".into(),
            ));
        }
        if let Some(lo) = down.index_of(sigma) {
            for (i, m) in down.members().iter().enumerate() {
                if down.le(lo, i) {
                    table.members.entry(m.len()).or_default().push(m.clone());
                }
            }
        }
        Ok(table)
    }

    /// `[sigma, pi]` with `μ(sigma, ·)` filled in for every member.
    pub fn interval_with_mobius(
        &self,
        sigma: &Permutation,
        pi: &Permutation,
    ) -> Result<IntervalTable> {
        let down = self.downset(pi)?;
        let mut table = IntervalTable {
            lower: sigma.clone(),
            upper: pi.clone(),
            ..Default::default()
        };
        if sigma.is_empty() {
            return Err(Error::PreconditionViolation(
                "interval lower bound must be nonempty".into(),
            ));
        }
        if let Some(lo) = down.index_of(sigma) {
            let column = down.mobius_column(lo)?;
            for (m, value) in down.members().iter().zip(column) {
                if let Some(value) = value {
                    table.members.entry(m.len()).or_default().push(m.clone());
                    table.mu.insert(m.clone(), value);
                }
            }
        }
        Ok(table)
    }

    pub fn mobius_naive(&self, sigma: &Permutation, pi: &Permutation) -> Result<i64> {
        if sigma.len() > pi.len() {
            return Ok(0);
        }
        if sigma.is_empty() {
            return Ok(match pi.len() {
                0 => 1,
                1 => -1,
                _ => 0,
            });
        }
        if sigma == pi {
            return Ok(1);
        }
        let down = self.downset(pi)?;
        match down.index_of(sigma) {
            None => Ok(0),
            Some(lo) => Ok(down.mobius_column(lo)?[down.len() - 1].unwrap_or(0)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::contains;
    use proptest::prelude::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    /// Independent oracle: every subsequence, standardized.
    fn downset_by_subsets(pi: &Permutation) -> Vec<Permutation> {
        let n = pi.len();
        let mut out: Vec<Permutation> = (1u32..1 << n)
            .map(|mask| {
                let sub: Vec<u32> = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| pi.values()[i])
                    .collect();
                Permutation::standardize(&sub)
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    #[test]
    fn downset_examples() {
        let o = Oracle::default();
        let d = o.downset(&p("21")).unwrap();
        assert_eq!(d.members(), &[p("1"), p("21")]);
        let d = o.downset(&p("123")).unwrap();
        assert_eq!(d.members(), &[p("1"), p("12"), p("123")]);
        assert_eq!(o.downset(&p("24153")).unwrap().len(), 14);
        assert_eq!(downset_by_subsets(&p("24153")).len(), 14);
        assert!(matches!(
            Oracle::with_cap(4).downset(&p("24153")),
            Err(Error::TooLarge { len: 5, cap: 4 })
        ));
    }

    #[test]
    fn downset_matches_subset_enumeration() {
        for s in ["315274968", "24153", "2413", "4321", "1", "35142"] {
            let pi = p(s);
            let d = Oracle::default().downset(&pi).unwrap();
            let mut mine = d.members().to_vec();
            mine.sort_unstable();
            assert_eq!(mine, downset_by_subsets(&pi), "{pi}");
            for (i, a) in d.members().iter().enumerate() {
                for (j, b) in d.members().iter().enumerate() {
                    assert_eq!(d.le(i, j), contains(a, b), "{a} <= {b}");
                }
            }
        }
    }

    #[test]
    fn interval_examples() {
        let o = Oracle::default();
        let t = o.interval(&p("1"), &p("123")).unwrap();
        assert_eq!(
            t.iter().cloned().collect::<Vec<_>>(),
            vec![p("1"), p("12"), p("123")]
        );
        let t = o.interval(&p("24153"), &p("24153")).unwrap();
        assert_eq!(t.len(), 1);
        assert!(o.interval(&p("21"), &p("12")).unwrap().is_empty());
    }

    #[test]
    fn mobius_examples() {
        let o = Oracle::default();
        assert_eq!(o.mobius_naive(&p("1"), &p("24153")).unwrap(), 6);
        assert_eq!(o.mobius_naive(&p("21"), &p("321")).unwrap(), -1);
        assert_eq!(o.mobius_naive(&p("1"), &p("123")).unwrap(), 0);
        assert_eq!(o.mobius_naive(&p("21"), &p("12")).unwrap(), 0);
        assert_eq!(o.mobius_naive(&p("3142"), &p("3142")).unwrap(), 1);
        assert_eq!(o.mobius_naive(&Permutation::empty(), &p("1")).unwrap(), -1);
        assert_eq!(o.mobius_naive(&Permutation::empty(), &p("12")).unwrap(), 0);
        assert_eq!(o.mobius_naive(&p("3142"), &p("315274968")).unwrap(), -6);
    }

    #[test]
    fn interval_mobius_sums_to_zero() {
        let o = Oracle::default();
        let t = o.interval_with_mobius(&p("1"), &p("24153")).unwrap();
        assert_eq!(t.len(), 14);
        assert_eq!(t.mu.values().sum::<i64>(), 0);
        assert_eq!(t.mu_of(&p("24153")), Some(6));
    }

    fn arb_perm(lo: usize, hi: usize) -> impl Strategy<Value = Permutation> {
        (lo..=hi)
            .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|v| Permutation::from_one_line(v).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn closed_intervals_sum_to_zero(pi in arb_perm(2, 7), pick in any::<prop::sample::Index>()) {
            let o = Oracle::default();
            let down = o.downset(&pi).unwrap();
            let sigma = down.members()[pick.index(down.len() - 1)].clone();
            let t = o.interval_with_mobius(&sigma, &pi).unwrap();
            prop_assert_eq!(t.mu.values().sum::<i64>(), 0);
        }

        #[test]
        fn covering_pairs_give_minus_one(pi in arb_perm(2, 8)) {
            let o = Oracle::default();
            for child in pi.children() {
                prop_assert_eq!(o.mobius_naive(&child, &pi).unwrap(), -1);
            }
        }

        #[test]
        fn downsets_are_monotone(pi in arb_perm(2, 7)) {
            let o = Oracle::default();
            let down = o.downset(&pi).unwrap();
            for child in pi.children().iter().filter(|c| !c.is_empty()) {
                for m in o.downset(child).unwrap().members() {
                    prop_assert!(down.index_of(m).is_some());
                }
            }
        }

        #[test]
        fn symmetric_under_dihedral_maps(pi in arb_perm(3, 7), pick in any::<prop::sample::Index>()) {
            let o = Oracle::default();
            let down = o.downset(&pi).unwrap();
            let sigma = down.members()[pick.index(down.len())].clone();
            let mu = o.mobius_naive(&sigma, &pi).unwrap();
            prop_assert_eq!(o.mobius_naive(&sigma.inverse(), &pi.inverse()).unwrap(), mu);
            prop_assert_eq!(o.mobius_naive(&sigma.reverse(), &pi.reverse()).unwrap(), mu);
            prop_assert_eq!(o.mobius_naive(&sigma.complement(), &pi.complement()).unwrap(), mu);
        }
    }
}
