//! Möbius values through the sum-decomposition recursions, the weighted
//! contributing set for indecomposable lower bounds, and a dispatcher.

use std::collections::HashMap;
use std::rc::Rc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::oscillation_fast::OscillationSolver;
use crate::perm::{classify_oscillation, contains, PermKey, Permutation};

/// Rough per-entry footprint used to turn a byte budget into an entry cap.
const ENTRY_BYTES: usize = 96;

#[derive(Clone, Debug, Default)]
pub struct MobiusCache {
    entries: HashMap<(PermKey, PermKey), i64>,
    max_entries: Option<usize>,
}

impl MobiusCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_max_entries(max: usize) -> Self {
        MobiusCache {
            entries: HashMap::new(),
            max_entries: Some(max),
        }
    }

    /// Reads `MOBIUS_CACHE_BYTES`; unbounded when unset or unparsable.
    pub fn from_env() -> Self {
        match std::env::var("MOBIUS_CACHE_BYTES")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            Some(bytes) => Self::with_max_entries(bytes / ENTRY_BYTES),
            None => Self::new(),
        }
    }

    pub fn get(&self, sigma: &Permutation, pi: &Permutation) -> Option<i64> {
        let key = (sigma.key().ok()?, pi.key().ok()?);
        self.entries.get(&key).copied()
    }

    /// Entries past the cap are dropped silently.
    pub fn insert(&mut self, sigma: &Permutation, pi: &Permutation, value: i64) {
        if self.max_entries.is_some_and(|m| self.entries.len() >= m) {
            return;
        }
        if let (Ok(a), Ok(b)) = (sigma.key(), pi.key()) {
            self.entries.insert((a, b), value);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightedContribution {
    pub alpha: Permutation,
    pub r: usize,
    pub weight: i8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Route {
    Trivial,
    Chain,
    Prop1,
    Prop2,
    Cor3,
    Oscillation,
    Theorem,
    Naive,
    /// Decomposable `σ` under indecomposable `π`; no recursion applies.
    NaiveFallback,
}

fn one() -> Permutation {
    Permutation::singleton()
}

fn lt(x: &Permutation, pi: &Permutation) -> bool {
    x.len() < pi.len() && contains(x, pi)
}

fn capped(alpha_r: &Permutation, leading: bool, trailing: bool) -> Permutation {
    let mut x = alpha_r.clone();
    if leading {
        x = one().direct_sum(&x);
    }
    if trailing {
        x = x.direct_sum(&one());
    }
    x
}

/// Smallest `r` with `1⊕(⊕^r α)⊕1 ≰ π`.
pub fn min_r_general(alpha: &Permutation, pi: &Permutation) -> Result<usize> {
    if alpha.is_empty() {
        return Err(Error::EmptyOperand);
    }
    let bound = pi.len() / alpha.len() + 1;
    for r in 1..=bound {
        let x = capped(&alpha.iterated_sum(r)?, true, true);
        if !contains(&x, pi) {
            return Ok(r);
        }
    }
    Ok(bound)
}

fn min_r_strict(alpha: &Permutation, pi: &Permutation) -> Result<usize> {
    if alpha.is_empty() {
        return Err(Error::EmptyOperand);
    }
    let bound = pi.len() / alpha.len() + 1;
    for r in 1..=bound {
        let x = capped(&alpha.iterated_sum(r)?, true, true);
        if !lt(&x, pi) {
            return Ok(r);
        }
    }
    Ok(bound)
}

/// The three-case weight with `r` from [`min_r_general`], taken literally.
pub fn weight_general(sigma: &Permutation, alpha: &Permutation, pi: &Permutation) -> Result<i8> {
    let r = min_r_general(alpha, pi)?;
    let base = alpha.iterated_sum(r)?;
    if !(contains(sigma, &base) && contains(&base, pi)) {
        return Ok(0);
    }
    let lead = contains(&capped(&base, true, false), pi);
    let trail = contains(&capped(&base, false, true), pi);
    if !lead && !trail {
        return Ok(1);
    }
    if lead && trail && !contains(&alpha.iterated_sum(r + 1)?, pi) {
        return Ok(-1);
    }
    Ok(0)
}

/// Weight of `α` over the half-open interval: every comparison with `π`
/// is strict. Agrees with [`weight_general`] for indecomposable `π`. The
/// `σ ≤ ⊕^r α` condition is left to the caller.
fn weight_strict(alpha: &Permutation, pi: &Permutation) -> Result<(usize, i8)> {
    let r = min_r_strict(alpha, pi)?;
    let base = alpha.iterated_sum(r)?;
    if !lt(&base, pi) {
        return Ok((r, 0));
    }
    let lead = lt(&capped(&base, true, false), pi);
    let trail = lt(&capped(&base, false, true), pi);
    let w = if !lead && !trail {
        1
    } else if lead && trail && !lt(&alpha.iterated_sum(r + 1)?, pi) {
        -1
    } else {
        0
    };
    Ok((r, w))
}

type Contributions = Rc<Vec<WeightedContribution>>;

/// Evaluation session: engine choice, oracle, and memo.
pub struct Engine {
    oracle: Oracle,
    cache: MobiusCache,
    use_cache: bool,
    use_oscillation: bool,
    /// Contributing candidates per upper bound, independent of `σ`.
    weights: HashMap<Permutation, Contributions>,
    fallbacks: usize,
    last_route: Route,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(Oracle::default())
    }
}

impl Engine {
    pub fn new(oracle: Oracle) -> Self {
        Engine {
            oracle,
            cache: MobiusCache::from_env(),
            use_cache: true,
            use_oscillation: true,
            weights: HashMap::new(),
            fallbacks: 0,
            last_route: Route::Trivial,
        }
    }

    pub fn with_cache(mut self, cache: MobiusCache) -> Self {
        self.cache = cache;
        self
    }

    pub fn without_cache(mut self) -> Self {
        self.use_cache = false;
        self
    }

    pub fn with_oscillation(mut self, enabled: bool) -> Self {
        self.use_oscillation = enabled;
        self
    }

    pub fn oracle(&self) -> &Oracle {
        &self.oracle
    }

    pub fn cache(&self) -> &MobiusCache {
        &self.cache
    }

    /// Number of pairs that had to be handed to the naive oracle because
    /// `σ` is decomposable and `π` is not.
    pub fn fallbacks(&self) -> usize {
        self.fallbacks
    }

    /// Route taken by the outermost call of the last [`Engine::mobius`].
    pub fn last_route(&self) -> Route {
        self.last_route
    }

    pub fn mobius(&mut self, sigma: &Permutation, pi: &Permutation) -> Result<i64> {
        let (value, route) = self.dispatch(sigma, pi)?;
        self.last_route = route;
        Ok(value)
    }

    fn dispatch(&mut self, sigma: &Permutation, pi: &Permutation) -> Result<(i64, Route)> {
        if sigma.is_empty() {
            let v = match pi.len() {
                0 => 1,
                1 => -1,
                _ => 0,
            };
            return Ok((v, Route::Trivial));
        }
        if sigma.len() > pi.len() || !contains(sigma, pi) {
            return Ok((0, Route::Trivial));
        }
        if sigma.len() == pi.len() {
            return Ok((1, Route::Trivial));
        }
        if sigma.len() + 1 == pi.len() {
            return Ok((-1, Route::Trivial));
        }
        if pi.is_identity() || pi.is_reverse_identity() {
            // A chain: anything two or more levels apart has μ = 0.
            return Ok((0, Route::Chain));
        }
        if self.use_cache {
            if let Some(v) = self.cache.get(sigma, pi) {
                return Ok((v, Route::Trivial));
            }
        }
        let decomposition = pi.sum_decompose();
        let sigma_indecomposable = sigma.is_sum_indecomposable();
        let (value, route) = if decomposition.len() >= 2 {
            if decomposition.components()[0].len() == 1 {
                (self.mobius_prop1(sigma, pi)?, Route::Prop1)
            } else if sigma_indecomposable {
                (self.mobius_cor3(sigma, pi)?, Route::Cor3)
            } else {
                (self.mobius_prop2(sigma, pi)?, Route::Prop2)
            }
        } else if !sigma_indecomposable {
            self.fallbacks += 1;
            (self.oracle.mobius_naive(sigma, pi)?, Route::NaiveFallback)
        } else if self.use_oscillation && pi.len() >= 4 && classify_oscillation(pi).is_some() {
            let id = classify_oscillation(pi).expect("checked").oscillation_id();
            (
                OscillationSolver::new(sigma)?.mobius_contained(id)?,
                Route::Oscillation,
            )
        } else if pi.len() <= 3 {
            (self.oracle.mobius_naive(sigma, pi)?, Route::Naive)
        } else {
            (self.mobius_theorem(sigma, pi)?, Route::Theorem)
        };
        if self.use_cache {
            self.cache.insert(sigma, pi, value);
        }
        Ok((value, route))
    }

    /// First component of `π` is `1`.
    pub fn mobius_prop1(&mut self, sigma: &Permutation, pi: &Permutation) -> Result<i64> {
        let pd = pi.sum_decompose();
        if sigma.is_empty() || pd.len() < 2 || pd.components()[0].len() != 1 {
            return Err(Error::PreconditionViolation(
                "needs a nonempty lower bound and π = 1 ⊕ …".into(),
            ));
        }
        let sd = sigma.sum_decompose();
        let k = pd.leading_ones();
        let l = sd.leading_ones();
        let rest = pd.suffix(k);
        if k - 1 > l {
            Ok(0)
        } else if k - 1 == l {
            let v = self.dispatch(&sd.suffix(k - 1), &rest)?.0;
            v.checked_neg().ok_or(Error::Overflow)
        } else {
            let a = self.dispatch(&sd.suffix(k), &rest)?.0;
            let b = self.dispatch(&sd.suffix(k - 1), &rest)?.0;
            a.checked_sub(b).ok_or(Error::Overflow)
        }
    }

    /// First component of `π` is not `1`.
    pub fn mobius_prop2(&mut self, sigma: &Permutation, pi: &Permutation) -> Result<i64> {
        let pd = pi.sum_decompose();
        if sigma.is_empty() || pd.len() < 2 || pd.components()[0].len() == 1 {
            return Err(Error::PreconditionViolation(
                "needs a nonempty lower bound and π = π₁ ⊕ … with π₁ ≠ 1".into(),
            ));
        }
        let sd = sigma.sum_decompose();
        let first = pd.components()[0].clone();
        let k = pd.leading_run();
        let mut total: i64 = 0;
        for i in 1..=sd.len() {
            let head = self.dispatch(&sd.prefix(i), &first)?.0;
            if head == 0 {
                continue;
            }
            let tail_sigma = sd.suffix(i);
            for j in 1..=k {
                let tail = self.dispatch(&tail_sigma, &pd.suffix(j))?.0;
                total = head
                    .checked_mul(tail)
                    .and_then(|t| total.checked_add(t))
                    .ok_or(Error::Overflow)?;
            }
        }
        Ok(total)
    }

    /// Indecomposable `σ`, first component of `π` not `1`.
    pub fn mobius_cor3(&mut self, sigma: &Permutation, pi: &Permutation) -> Result<i64> {
        let pd = pi.sum_decompose();
        if !sigma.is_sum_indecomposable() || pd.len() < 2 || pd.components()[0].len() == 1 {
            return Err(Error::PreconditionViolation(
                "needs indecomposable σ and π = π₁ ⊕ … with π₁ ≠ 1".into(),
            ));
        }
        let first = pd.components()[0].clone();
        let k = pd.leading_run();
        let rest = &pd.components()[k..];
        if rest.is_empty() {
            self.dispatch(sigma, &first).map(|v| v.0)
        } else if rest.len() == 1 && rest[0].len() == 1 {
            let v = self.dispatch(sigma, &first)?.0;
            v.checked_neg().ok_or(Error::Overflow)
        } else {
            Ok(0)
        }
    }

    fn candidates(&mut self, pi: &Permutation) -> Result<Contributions> {
        if let Some(c) = self.weights.get(pi) {
            return Ok(Rc::clone(c));
        }
        let down = self.oracle.downset(pi)?;
        let mut out = Vec::new();
        for alpha in down.members() {
            if alpha.len() == pi.len() || !alpha.is_sum_indecomposable() {
                continue;
            }
            let (r, weight) = weight_strict(alpha, pi)?;
            if weight != 0 {
                out.push(WeightedContribution {
                    alpha: alpha.clone(),
                    r,
                    weight,
                });
            }
        }
        let out = Rc::new(out);
        if self.weights.len() >= 4096 {
            self.weights.clear();
        }
        self.weights.insert(pi.clone(), Rc::clone(&out));
        Ok(out)
    }

    /// Sum-indecomposable `α ∈ [σ, π)` with nonzero weight.
    pub fn contributing_set(
        &mut self,
        sigma: &Permutation,
        pi: &Permutation,
    ) -> Result<Vec<WeightedContribution>> {
        if !contains(sigma, pi) {
            return Ok(Vec::new());
        }
        let all = self.candidates(pi)?;
        Ok(all
            .iter()
            .filter(|c| contains(sigma, &c.alpha))
            .cloned()
            .collect())
    }

    /// `μ(σ, π) = −Σ μ(σ, α)·W(σ, α, π)` over the contributing set.
    pub fn mobius_theorem(&mut self, sigma: &Permutation, pi: &Permutation) -> Result<i64> {
        if !sigma.is_sum_indecomposable() {
            return Err(Error::PreconditionViolation(format!(
                "{sigma} is sum decomposable"
            )));
        }
        if pi.len() <= 3 || pi.is_identity() || pi.is_reverse_identity() {
            return Err(Error::PreconditionViolation(format!(
                "{pi} is too short or monotone"
            )));
        }
        if !contains(sigma, pi) {
            return Ok(0);
        }
        if sigma.len() == pi.len() {
            return Ok(1);
        }
        if sigma.len() + 1 == pi.len() {
            return Ok(-1);
        }
        let all = self.candidates(pi)?;
        let mut total: i64 = 0;
        for c in all.iter() {
            if c.alpha.len() < sigma.len() || !contains(sigma, &c.alpha) {
                continue;
            }
            let mu = self.dispatch(sigma, &c.alpha)?.0;
            total = mu
                .checked_mul(c.weight as i64)
                .and_then(|t| total.checked_add(t))
                .ok_or(Error::Overflow)?;
        }
        total.checked_neg().ok_or(Error::Overflow)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{OscillationId, Shape, ShapeKind};

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn all_perms(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut v: Vec<u32> = (1..=n as u32).collect();
        permute(&mut v, 0, &mut out);
        out.sort();
        out
    }

    fn permute(v: &mut Vec<u32>, i: usize, out: &mut Vec<Permutation>) {
        if i == v.len() {
            out.push(Permutation::from_one_line(v.clone()).unwrap());
            return;
        }
        for j in i..v.len() {
            v.swap(i, j);
            permute(v, i + 1, out);
            v.swap(i, j);
        }
    }

    #[test]
    fn dispatcher_examples() {
        let mut e = Engine::default();
        assert_eq!(e.mobius(&p("1"), &p("12345")).unwrap(), 0);
        assert_eq!(e.last_route(), Route::Chain);
        assert_eq!(e.mobius(&p("1"), &p("1")).unwrap(), 1);
        assert_eq!(e.mobius(&p("1"), &p("24153")).unwrap(), 6);
        assert_eq!(e.mobius(&p("21"), &p("12")).unwrap(), 0);
        let naive = Oracle::default()
            .mobius_naive(&p("132"), &p("24153"))
            .unwrap();
        assert_eq!(e.mobius(&p("132"), &p("24153")).unwrap(), naive);
        assert_eq!(e.last_route(), Route::NaiveFallback);
        assert_eq!(e.fallbacks(), 1);
    }

    #[test]
    fn proposition_examples() {
        let mut e = Engine::default();
        assert_eq!(e.mobius_prop1(&p("1"), &p("1243")).unwrap(), 0);
        assert_eq!(e.mobius_prop1(&p("12"), &p("132")).unwrap(), -1);
        assert_eq!(e.mobius_prop1(&p("1"), &p("123")).unwrap(), 0);
        assert_eq!(e.mobius_prop2(&p("21"), &p("2143")).unwrap(), 1);
        assert_eq!(e.mobius_prop2(&p("21"), &p("214365")).unwrap(), 1);
        assert_eq!(e.mobius_prop2(&p("1"), &p("2143")).unwrap(), -1);
        assert_eq!(e.mobius_cor3(&p("21"), &p("2143")).unwrap(), 1);
        assert_eq!(e.mobius_cor3(&p("21"), &p("21435")).unwrap(), -1);
        assert_eq!(e.mobius_cor3(&p("21"), &p("21543")).unwrap(), 0);
        assert!(e.mobius_prop1(&p("1"), &p("2143")).is_err());
        assert!(e.mobius_prop2(&p("1"), &p("1243")).is_err());
        let o = Oracle::default();
        for (s, t) in [
            ("1", "1243"),
            ("12", "132"),
            ("21", "2143"),
            ("1", "2143"),
            ("21", "21435"),
        ] {
            assert_eq!(
                e.mobius(&p(s), &p(t)).unwrap(),
                o.mobius_naive(&p(s), &p(t)).unwrap()
            );
        }
    }

    #[test]
    fn min_r_examples() {
        assert_eq!(min_r_general(&p("21"), &p("24153")).unwrap(), 1);
        assert_eq!(min_r_general(&p("21"), &p("2143")).unwrap(), 1);
        let w9 = OscillationId::w(9).realize();
        assert_eq!(min_r_general(&p("3142"), &w9).unwrap(), 2);
    }

    #[test]
    fn weight_examples() {
        let w9 = OscillationId::w(9).realize();
        let sigma = p("3142");
        let chain = |k| Shape::new(ShapeKind::Plain, k).unwrap().realize();
        assert_eq!(weight_general(&sigma, &chain(3), &w9).unwrap(), -1);
        assert_eq!(weight_general(&sigma, &chain(2), &w9).unwrap(), 0);
        assert_eq!(weight_general(&p("21"), &p("21"), &p("123")).unwrap(), 0);
    }

    #[test]
    fn contributing_set_examples() {
        let mut e = Engine::default();
        assert!(e.contributing_set(&p("21"), &p("12")).unwrap().is_empty());
        let c = e.contributing_set(&p("21"), &p("2143")).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].alpha, p("21"));
        let w9 = OscillationId::w(9).realize();
        let c = e.contributing_set(&p("3142"), &w9).unwrap();
        assert!(c.iter().all(|x| classify_oscillation(&x.alpha).is_some()));
    }

    #[test]
    fn theorem_examples() {
        let mut e = Engine::default().with_oscillation(false);
        let w9 = OscillationId::w(9).realize();
        assert_eq!(e.mobius_theorem(&p("3142"), &w9).unwrap(), -6);
        assert_eq!(e.mobius_theorem(&p("1"), &p("24153")).unwrap(), 6);
        assert!(e.mobius_theorem(&p("12"), &p("24153")).is_err());
    }

    #[test]
    fn theorem_agrees_with_oracle_up_to_6() {
        let o = Oracle::default();
        let mut e = Engine::default().with_oscillation(false);
        for n in 4..=6 {
            for pi in all_perms(n) {
                if pi.is_identity() || pi.is_reverse_identity() {
                    continue;
                }
                let down = o.downset(&pi).unwrap();
                for (i, sigma) in down.members().iter().enumerate() {
                    if !sigma.is_sum_indecomposable() {
                        continue;
                    }
                    let expected = down.mobius_column(i).unwrap()[down.len() - 1].unwrap();
                    assert_eq!(
                        e.mobius_theorem(sigma, &pi).unwrap(),
                        expected,
                        "{sigma} {pi}"
                    );
                }
            }
        }
    }

    #[test]
    fn decomposable_routing_agrees_with_oracle_up_to_6() {
        let o = Oracle::default();
        let mut e = Engine::default();
        for n in 2..=6 {
            for pi in all_perms(n) {
                if pi.is_sum_indecomposable() {
                    continue;
                }
                let down = o.downset(&pi).unwrap();
                for (i, sigma) in down.members().iter().enumerate() {
                    let expected = down.mobius_column(i).unwrap()[down.len() - 1].unwrap();
                    assert_eq!(e.mobius(sigma, &pi).unwrap(), expected, "{sigma} {pi}");
                }
            }
        }
    }

    #[test]
    fn cache_does_not_change_results() {
        let mut cached = Engine::default();
        let mut plain = Engine::default().without_cache();
        for pi in all_perms(6) {
            for sigma in [p("1"), p("21"), p("231"), p("3142"), p("12")] {
                assert_eq!(
                    cached.mobius(&sigma, &pi).unwrap(),
                    plain.mobius(&sigma, &pi).unwrap()
                );
            }
        }
        assert!(!cached.cache().is_empty());
        assert!(plain.cache().is_empty());
        let mut tiny = Engine::default().with_cache(MobiusCache::with_max_entries(3));
        tiny.mobius(&p("1"), &p("315274968")).unwrap();
        assert!(tiny.cache().len() <= 3);
    }
}
