//! Exhaustive cross-checks of the engines against the oracle, and of the
//! embedding inequalities against the containment matcher.

use serde::Serialize;

use crate::engine::{weight_general, Engine};
use crate::error::Result;
use crate::oracle::{Downset, Oracle};
use crate::oscillation_fast::{fits_in_pi, raw_min_k, Caps, OscillationSolver, PiClass};
use crate::perm::{
    classify_oscillation, contains, family_sum, OscillationId, Permutation, Shape, ShapeKind,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub sigma: Permutation,
    pub pi: Permutation,
    pub expected: i64,
    pub actual: i64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepReport {
    pub name: String,
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl SweepReport {
    fn new(name: &str) -> Self {
        SweepReport {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn record(&mut self, sigma: &Permutation, pi: &Permutation, expected: i64, actual: i64) {
        self.checked += 1;
        if expected != actual {
            self.mismatches.push(Mismatch {
                sigma: sigma.clone(),
                pi: pi.clone(),
                expected,
                actual,
            });
        }
    }
}

/// `μ(σ, top)` for every member `σ` of the downset.
fn column_to_top(down: &Downset) -> Result<Vec<i64>> {
    let top = down.len() - 1;
    (0..down.len())
        .map(|i| Ok(down.mobius_column(i)?[top].unwrap_or(0)))
        .collect()
}

fn oscillations_up_to(max_len: usize) -> Vec<Permutation> {
    let mut out: Vec<Permutation> = (1..=max_len as u32)
        .flat_map(|n| [OscillationId::w(n), OscillationId::m(n)])
        .map(|id| id.realize())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// General theorem against the oracle: every `π` with `min_len <= |π| <= max_len`
/// other than the identity and its reverse, every sum-indecomposable `σ ≤ π`.
pub fn theorem_vs_oracle(oracle: Oracle, min_len: usize, max_len: usize) -> Result<SweepReport> {
    let mut report = SweepReport::new("theorem");
    let mut engine = Engine::new(oracle).with_oscillation(false);
    for n in min_len.max(4)..=max_len {
        for pi in Permutation::all_of_length(n) {
            if pi.is_identity() || pi.is_reverse_identity() {
                continue;
            }
            let down = oracle.downset(&pi)?;
            let expected = column_to_top(&down)?;
            for (sigma, &e) in down.members().iter().zip(&expected) {
                if sigma.is_sum_indecomposable() {
                    let actual = engine.mobius_theorem(sigma, &pi)?;
                    report.record(sigma, &pi, e, actual);
                }
            }
        }
    }
    Ok(report)
}

/// Decomposable upper bounds through the dispatcher's sum recursions, every
/// `σ ≤ π`.
pub fn decomposable_vs_oracle(oracle: Oracle, max_len: usize) -> Result<SweepReport> {
    let mut report = SweepReport::new("decomposable");
    let mut engine = Engine::new(oracle).with_oscillation(false);
    for n in 2..=max_len {
        for pi in Permutation::all_of_length(n) {
            if pi.is_sum_indecomposable() {
                continue;
            }
            let down = oracle.downset(&pi)?;
            let expected = column_to_top(&down)?;
            for (sigma, &e) in down.members().iter().zip(&expected) {
                let actual = engine.mobius(sigma, &pi)?;
                report.record(sigma, &pi, e, actual);
            }
        }
    }
    Ok(report)
}

/// Oscillation fast path against the oracle: every oscillation of length
/// `<= max_len`, every sum-indecomposable `σ ≤ π`.
pub fn oscillation_vs_oracle(oracle: Oracle, max_len: usize) -> Result<SweepReport> {
    let mut report = SweepReport::new("oscillation");
    for pi in oscillations_up_to(max_len) {
        let id = match classify_oscillation(&pi) {
            Some(shape) => shape.oscillation_id(),
            None => OscillationId::w(1),
        };
        let down = oracle.downset(&pi)?;
        let expected = column_to_top(&down)?;
        for (sigma, &e) in down.members().iter().zip(&expected) {
            if !sigma.is_sum_indecomposable() {
                continue;
            }
            let actual = OscillationSolver::new(sigma)?.mobius_contained(id)?;
            report.record(sigma, &pi, e, actual);
        }
    }
    Ok(report)
}

/// The dispatcher with every engine enabled, all pairs up to `max_len`.
pub fn auto_vs_oracle(oracle: Oracle, max_len: usize) -> Result<SweepReport> {
    let mut report = SweepReport::new("auto");
    let mut engine = Engine::new(oracle);
    for n in 1..=max_len {
        for pi in Permutation::all_of_length(n) {
            let down = oracle.downset(&pi)?;
            let expected = column_to_top(&down)?;
            for (sigma, &e) in down.members().iter().zip(&expected) {
                let actual = engine.mobius(sigma, &pi)?;
                report.record(sigma, &pi, e, actual);
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct FitsDisagreement {
    pub shape: Shape,
    pub r: u32,
    pub pi: OscillationId,
    pub caps: u8,
    pub inequality: bool,
    pub matcher: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TableSweep {
    pub checked: usize,
    pub fits: Vec<FitsDisagreement>,
    pub min_k: Vec<(Permutation, ShapeKind, Option<u32>, Option<u32>)>,
}

fn sum_with_caps(alpha: &Permutation, r: usize, caps: Caps) -> Result<Permutation> {
    let mut x = alpha.iterated_sum(r)?;
    if caps.leading {
        x = Permutation::singleton().direct_sum(&x);
    }
    if caps.trailing {
        x = x.direct_sum(&Permutation::singleton());
    }
    Ok(x)
}

/// `fits_in_pi` against the matcher for every shape with `k <= max_k`,
/// `r <= max_r`, all four cap patterns and every oscillation of length
/// `4..=max_len`.
pub fn fits_sweep(max_len: u32, max_k: u32, max_r: u32) -> Result<TableSweep> {
    let mut out = TableSweep::default();
    let caps_all = [
        Caps::NONE,
        Caps {
            leading: false,
            trailing: true,
        },
        Caps {
            leading: true,
            trailing: false,
        },
        Caps::BOTH,
    ];
    for n in 4..=max_len {
        for id in [OscillationId::w(n), OscillationId::m(n)] {
            let class = PiClass::of(id)?;
            let text = id.realize();
            for kind in ShapeKind::ALL {
                let ks = if kind == ShapeKind::Single21 {
                    1..=1
                } else {
                    kind.min_blocks()..=max_k
                };
                for k in ks {
                    let shape = Shape::new(kind, k)?;
                    let alpha = shape.realize();
                    for r in 1..=max_r {
                        for (code, caps) in caps_all.iter().enumerate() {
                            let inequality = fits_in_pi(shape, r, class, *caps);
                            let pattern = sum_with_caps(&alpha, r as usize, *caps)?;
                            let matcher = contains(&pattern, &text);
                            out.checked += 1;
                            if inequality != matcher {
                                out.fits.push(FitsDisagreement {
                                    shape,
                                    r,
                                    pi: id,
                                    caps: code as u8,
                                    inequality,
                                    matcher,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `raw_min_k` against the smallest `k <= max_k` with `σ ≤ α_k`, for every
/// oscillation `σ` with `2 <= |σ| <= max_sigma`. The bare `21` shape has no
/// `k`; there the check is `raw_min_k ≤ 1 ⟺ σ ≤ 21`.
pub fn raw_min_k_sweep(max_sigma: u32, max_k: u32, out: &mut TableSweep) -> Result<()> {
    for n in 2..=max_sigma {
        for id in [OscillationId::w(n), OscillationId::m(n)] {
            let sigma = id.realize();
            for kind in ShapeKind::ALL {
                let raw = raw_min_k(&sigma, kind)?;
                out.checked += 1;
                if kind == ShapeKind::Single21 {
                    let below = contains(&sigma, &Shape::single21().realize());
                    if raw.is_some_and(|k| k <= 1) != below {
                        out.min_k
                            .push((sigma.clone(), kind, raw, below.then_some(1)));
                    }
                    continue;
                }
                let first = (kind.min_blocks()..=max_k)
                    .find(|&k| Shape::new(kind, k).is_ok_and(|s| contains(&sigma, &s.realize())));
                // Beyond the sweep limit the matcher cannot confirm a value.
                let comparable = raw.map_or(first, |k| if k <= max_k { Some(k) } else { None });
                if comparable != first {
                    out.min_k.push((sigma.clone(), kind, raw, first));
                }
            }
        }
    }
    Ok(())
}

/// Members of `F_⊕(⊕^r α)` for every `r >= 1` with room in a length budget.
fn families(alpha: &Permutation, max_len: usize) -> Result<Vec<(usize, Permutation)>> {
    let mut out = Vec::new();
    for r in 1..=max_len / alpha.len() {
        for m in family_sum(&alpha.iterated_sum(r)?)? {
            if m.len() <= max_len {
                out.push((r, m));
            }
        }
    }
    Ok(out)
}

/// Sum-indecomposable permutations of every length in `lo..=hi`.
fn indecomposables(lo: usize, hi: usize) -> Vec<Permutation> {
    (lo..=hi)
        .flat_map(Permutation::all_of_length)
        .filter(|p| p.is_sum_indecomposable())
        .collect()
}

/// Family values: for indecomposable `σ ≤ α`, `μ(σ, ⊕^r α) = μ(σ, 1⊕(⊕^r α)⊕1)
/// = −μ(σ, 1⊕(⊕^r α)) = −μ(σ, (⊕^r α)⊕1) = μ(σ, α)`, so each family sums
/// to zero. Compared against the oracle for families of length `<= max_len`.
pub fn family_values(oracle: Oracle, max_len: usize) -> Result<SweepReport> {
    let mut report = SweepReport::new("family values");
    let one = Permutation::singleton();
    for alpha in indecomposables(2, max_len.saturating_sub(2)) {
        let alpha_down = oracle.downset(&alpha)?;
        for r in 1..=max_len / alpha.len() {
            let base = alpha.iterated_sum(r)?;
            let members = [
                (base.clone(), 1),
                (one.direct_sum(&base).direct_sum(&one), 1),
                (one.direct_sum(&base), -1),
                (base.direct_sum(&one), -1),
            ];
            for sigma in alpha_down
                .members()
                .iter()
                .filter(|s| s.is_sum_indecomposable())
            {
                let mu_alpha = oracle.mobius_naive(sigma, &alpha)?;
                let mut net = 0;
                let mut complete = true;
                for (pi, sign) in &members {
                    if pi.len() > max_len {
                        complete = false;
                        continue;
                    }
                    let v = oracle.mobius_naive(sigma, pi)?;
                    report.record(sigma, pi, sign * mu_alpha, v);
                    net += v;
                }
                if complete {
                    report.record(sigma, &members[1].0, 0, net);
                }
            }
        }
    }
    Ok(report)
}

/// Zero classes: `μ(σ, π) = 0` for indecomposable `σ` when `π` is `1⊕1⊕τ`,
/// `τ⊕1⊕1` with `τ` nonempty, or a member of `F_⊕((⊕^r α)⊕τ')` with `r` maximal, `α > 1`
/// indecomposable and `|τ'| >= 2`. Both the dispatcher and the oracle are
/// compared to zero.
pub fn zero_classes(oracle: Oracle, max_len: usize) -> Result<SweepReport> {
    let mut report = SweepReport::new("zero classes");
    let mut engine = Engine::new(oracle);
    let one = Permutation::singleton();
    let twelve = one.direct_sum(&one);
    let mut uppers: Vec<Permutation> = Vec::new();
    for n in 0..=max_len.saturating_sub(2) {
        for tau in Permutation::all_of_length(n) {
            uppers.push(twelve.direct_sum(&tau));
            uppers.push(tau.direct_sum(&twelve));
        }
    }
    for alpha in indecomposables(2, max_len.saturating_sub(2)) {
        for n in 2..=max_len - alpha.len() {
            for tau in Permutation::all_of_length(n) {
                if tau.sum_decompose().components()[0] == alpha {
                    continue;
                }
                for r in 1..=(max_len - n) / alpha.len() {
                    let core = alpha.iterated_sum(r)?.direct_sum(&tau);
                    for m in family_sum(&core)? {
                        if m.len() <= max_len {
                            uppers.push(m);
                        }
                    }
                }
            }
        }
    }
    uppers.sort();
    uppers.dedup();
    // `τ = ε` gives the covering pair `(1, 12)`, where `μ = −1`.
    uppers.retain(|p| p.len() > 2);
    for pi in uppers {
        let down = oracle.downset(&pi)?;
        let expected = column_to_top(&down)?;
        for (sigma, &naive) in down.members().iter().zip(&expected) {
            if !sigma.is_sum_indecomposable() {
                continue;
            }
            report.record(sigma, &pi, 0, naive);
            report.record(sigma, &pi, 0, engine.mobius(sigma, &pi)?);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct WeightRowsReport {
    pub checked: usize,
    /// How many `(σ, α, π)` triples fell in each table row.
    pub row_hits: [usize; 5],
    pub mismatches: Vec<(Permutation, Permutation, Permutation, i64, i64)>,
}

/// Weight rows: for every indecomposable `π` of length `<= max_len`, every
/// indecomposable `α < π` and indecomposable `σ ≤ α` with `⊕^r α ≤ π`, the
/// oracle's net contribution of all families `F_⊕(⊕^k α)` inside `[σ, π)`
/// equals `μ(σ, α)·W(σ, α, π)`, and the containment pattern selects the
/// row whose contribution matches.
pub fn weight_rows(oracle: Oracle, max_len: usize) -> Result<WeightRowsReport> {
    let mut out = WeightRowsReport::default();
    let one = Permutation::singleton();
    for n in 4..=max_len {
        for pi in Permutation::all_of_length(n) {
            if !pi.is_sum_indecomposable() {
                continue;
            }
            let down = oracle.downset(&pi)?;
            for (ai, alpha) in down.members().iter().enumerate() {
                if alpha.len() < 2 || alpha.len() == n || !alpha.is_sum_indecomposable() {
                    continue;
                }
                let r = crate::engine::min_r_general(alpha, &pi)?;
                let base = alpha.iterated_sum(r)?;
                if !contains(&base, &pi) {
                    continue;
                }
                let lead = contains(&one.direct_sum(&base), &pi);
                let trail = contains(&base.direct_sum(&one), &pi);
                let next = contains(&alpha.iterated_sum(r + 1)?, &pi);
                let (row, factor) = match (lead, trail, next) {
                    (true, true, true) => (0, 0),
                    (true, true, false) => (1, -1),
                    (true, false, _) => (2, 0),
                    (false, true, _) => (3, 0),
                    (false, false, _) => (4, 1),
                };
                let fams = families(alpha, n - 1)?;
                for (si, sigma) in down.members().iter().enumerate() {
                    if !sigma.is_sum_indecomposable() || !down.le(si, ai) {
                        continue;
                    }
                    let column = down.mobius_column(si)?;
                    let net: i64 = fams
                        .iter()
                        .filter_map(|(_, m)| down.index_of(m))
                        .filter_map(|i| column[i])
                        .sum();
                    let mu_alpha = column[ai].unwrap_or(0);
                    let w = weight_general(sigma, alpha, &pi)? as i64;
                    out.checked += 1;
                    out.row_hits[row] += 1;
                    if net != mu_alpha * w || w != factor {
                        out.mismatches.push((
                            sigma.clone(),
                            alpha.clone(),
                            pi.clone(),
                            net,
                            mu_alpha * w,
                        ));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `μ(σ, π) = μ(σ⁻¹, π⁻¹)` through the dispatcher, all pairs up to `max_len`.
pub fn inverse_symmetry(oracle: Oracle, max_len: usize) -> Result<SweepReport> {
    let mut report = SweepReport::new("inverse symmetry");
    let mut engine = Engine::new(oracle);
    for n in 1..=max_len {
        for pi in Permutation::all_of_length(n) {
            let down = oracle.downset(&pi)?;
            for sigma in down.members() {
                let a = engine.mobius(sigma, &pi)?;
                let b = engine.mobius(&sigma.inverse(), &pi.inverse())?;
                report.record(sigma, &pi, a, b);
            }
        }
    }
    Ok(report)
}

/// `Σ_{λ ∈ [σ, π]} μ(σ, λ) = 0` for every `σ < π` with dispatcher values.
pub fn interval_sums(oracle: Oracle, max_len: usize) -> Result<SweepReport> {
    let mut report = SweepReport::new("interval sums");
    let mut engine = Engine::new(oracle);
    for n in 2..=max_len {
        for pi in Permutation::all_of_length(n) {
            let down = oracle.downset(&pi)?;
            let top = down.len() - 1;
            for (si, sigma) in down.members().iter().enumerate().take(top) {
                let mut total = 0i64;
                for (li, lambda) in down.members().iter().enumerate() {
                    if down.le(si, li) && down.le(li, top) {
                        total += engine.mobius(sigma, lambda)?;
                    }
                }
                report.record(sigma, &pi, 0, total);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps_pass() {
        let o = Oracle::default();
        assert!(theorem_vs_oracle(o, 4, 6).unwrap().passed());
        assert!(decomposable_vs_oracle(o, 6).unwrap().passed());
        assert!(oscillation_vs_oracle(o, 8).unwrap().passed());
        assert!(auto_vs_oracle(o, 6).unwrap().passed());
    }

    #[test]
    fn small_table_sweeps_pass() {
        let t = fits_sweep(14, 6, 4).unwrap();
        assert!(t.fits.is_empty(), "{:?}", &t.fits[..t.fits.len().min(5)]);
        let mut t = TableSweep::default();
        raw_min_k_sweep(10, 10, &mut t).unwrap();
        assert!(t.min_k.is_empty(), "{:?}", t.min_k);
    }

    #[test]
    fn small_property_sweeps_pass() {
        let o = Oracle::default();
        let f = family_values(o, 7).unwrap();
        assert!(
            f.passed(),
            "{:?}",
            &f.mismatches[..f.mismatches.len().min(5)]
        );
        let z = zero_classes(o, 7).unwrap();
        assert!(
            z.passed(),
            "{:?}",
            &z.mismatches[..z.mismatches.len().min(5)]
        );
        let t = weight_rows(o, 6).unwrap();
        assert!(
            t.mismatches.is_empty(),
            "{:?}",
            &t.mismatches[..t.mismatches.len().min(5)]
        );
        assert!(inverse_symmetry(o, 6).unwrap().passed());
        assert!(interval_sums(o, 5).unwrap().passed());
    }
}
