//! Möbius values below increasing oscillations, evaluated with the
//! embedding inequalities only (no containment tests, no downsets).

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::perm::{classify_oscillation, OscKind, OscillationId, Permutation, Shape, ShapeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Parity {
    WEven,
    WOdd,
    MEven,
    MOdd,
}

/// Oscillation class in table form: `W_{2n}`, `W_{2n-1}`, `M_{2n}` or `M_{2n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PiClass {
    pub parity: Parity,
    pub n: u32,
}

impl PiClass {
    /// Class of an oscillation of length at least 2. `21` is `W_2`.
    pub fn of(id: OscillationId) -> Result<Self> {
        let len = id.n;
        if len < 2 {
            return Err(Error::NotAnOscillation(format!("{id} has no table class")));
        }
        let kind = if len == 2 { OscKind::W } else { id.kind };
        let parity = match (kind, len.is_multiple_of(2)) {
            (OscKind::W, true) => Parity::WEven,
            (OscKind::W, false) => Parity::WOdd,
            (OscKind::M, true) => Parity::MEven,
            (OscKind::M, false) => Parity::MOdd,
        };
        Ok(PiClass {
            parity,
            n: len.div_ceil(2),
        })
    }

    pub fn of_perm(p: &Permutation) -> Result<Self> {
        let shape =
            classify_oscillation(p).ok_or_else(|| Error::NotAnOscillation(p.to_string()))?;
        PiClass::of(shape.oscillation_id())
    }

    pub fn id(&self) -> OscillationId {
        let (kind, len) = match self.parity {
            Parity::WEven => (OscKind::W, 2 * self.n),
            Parity::WOdd => (OscKind::W, 2 * self.n - 1),
            Parity::MEven => (OscKind::M, 2 * self.n),
            Parity::MOdd => (OscKind::M, 2 * self.n - 1),
        };
        OscillationId { kind, n: len }
    }

    pub fn len(&self) -> usize {
        self.id().len()
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn is_even(&self) -> bool {
        matches!(self.parity, Parity::WEven | Parity::MEven)
    }

    /// Right-hand side of every row.
    fn bound(&self) -> i64 {
        2 * self.n as i64
    }
}

impl fmt::Display for PiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Which of the leading `1⊕` and trailing `⊕1` are attached.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Caps {
    pub leading: bool,
    pub trailing: bool,
}

impl Caps {
    pub const NONE: Caps = Caps {
        leading: false,
        trailing: false,
    };
    pub const ONE: Caps = Caps {
        leading: false,
        trailing: true,
    };
    pub const BOTH: Caps = Caps {
        leading: true,
        trailing: true,
    };

    pub fn count(&self) -> i64 {
        self.leading as i64 + self.trailing as i64
    }
}

/// Points consumed by `⊕^r α` inside `π` are `a·r + b`.
fn linear(shape: Shape, pi: PiClass) -> (i64, i64) {
    linear_in(shape.kind(), shape.k() as i64, pi)
}

fn linear_in(kind: ShapeKind, k: i64, pi: PiClass) -> (i64, i64) {
    match (kind, pi.parity) {
        (ShapeKind::Single21, _) => (3, if pi.is_even() { -1 } else { 0 }),
        (ShapeKind::Plain, Parity::WEven) => (2 * k + 2, -2),
        (ShapeKind::LeftCapped, Parity::WOdd) | (ShapeKind::RightCapped, Parity::MOdd) => {
            (2 * k + 2, 2)
        }
        (ShapeKind::BothCapped, Parity::MEven) => (2 * k + 4, -2),
        (ShapeKind::BothCapped, _) => (2 * k + 4, 0),
        _ => (2 * k + 2, 0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmbeddingBudget {
    pub shape: Shape,
    pub r: u32,
    pub pi: PiClass,
    pub min_points: i64,
}

impl EmbeddingBudget {
    pub fn new(shape: Shape, r: u32, pi: PiClass) -> Self {
        EmbeddingBudget {
            shape,
            r,
            pi,
            min_points: min_points(shape, r, pi),
        }
    }

    pub fn fits(&self, caps: Caps) -> bool {
        self.min_points + 2 * caps.count() <= self.pi.bound()
    }
}

/// Left-hand side of the inequality for `⊕^r α ≤ π`.
pub fn min_points(shape: Shape, r: u32, pi: PiClass) -> i64 {
    let (a, b) = linear(shape, pi);
    a * r as i64 + b
}

/// Whether `⊕^r α`, with the given caps, embeds in `π`.
pub fn fits_in_pi(shape: Shape, r: u32, pi: PiClass, caps: Caps) -> bool {
    min_points(shape, r, pi) + 2 * caps.count() <= pi.bound()
}

/// Smallest `k` with `σ ≤ α_k`; `None` for the row that never holds.
pub fn raw_min_k(sigma: &Permutation, shape: ShapeKind) -> Result<Option<u32>> {
    let class = PiClass::of_perm(sigma)?;
    Ok(raw_min_k_class(class, shape))
}

fn raw_min_k_class(class: PiClass, shape: ShapeKind) -> Option<u32> {
    use Parity::*;
    let n = class.n;
    let k = match (class.parity, shape) {
        (WOdd | MEven | MOdd, ShapeKind::Single21) => return None,
        (WOdd, ShapeKind::RightCapped) => n - 1,
        (MOdd, ShapeKind::LeftCapped) => n - 1,
        (WOdd | MEven | MOdd, ShapeKind::BothCapped) => n - 1,
        (MEven, ShapeKind::Plain) => n + 1,
        _ => n,
    };
    Some(k.max(shape.min_blocks()))
}

/// Lower summation limit for a shape. `pi_len` is the sentinel used when
/// no `k` works.
pub fn min_k(sigma: &Permutation, shape: ShapeKind, pi_len: usize) -> Result<u32> {
    if sigma.len() == 1 {
        return Ok(shape.min_blocks());
    }
    let class = PiClass::of_perm(sigma)?;
    Ok(min_k_class(Some(class), shape, pi_len))
}

fn min_k_class(sigma: Option<PiClass>, shape: ShapeKind, pi_len: usize) -> u32 {
    match sigma {
        None => shape.min_blocks(),
        Some(class) => match raw_min_k_class(class, shape) {
            None => pi_len as u32,
            Some(_) if shape == ShapeKind::Single21 => 1,
            Some(k) => k,
        },
    }
}

/// Upper summation limit for a shape.
pub fn max_k(shape: ShapeKind, pi: PiClass) -> u32 {
    if shape == ShapeKind::Single21 {
        return fits_in_pi(Shape::single21(), 1, pi, Caps::NONE) as u32;
    }
    // a·1 + b <= 2n with a = 2k + c.
    let (a1, b) = linear_in(shape, 1, pi);
    let c = a1 - 2;
    let top = (pi.bound() - b - c).div_euclid(2);
    if top < shape.min_blocks() as i64 {
        return 0;
    }
    let same = pi.id().shape().map(|s| s.kind()) == Some(shape);
    let k = top as u32 - same as u32;
    if k < shape.min_blocks() {
        0
    } else {
        k
    }
}

/// Smallest `r` with `1⊕(⊕^r α)⊕1 ≰ π`, solved in closed form.
pub fn min_r_osc(shape: Shape, pi: PiClass) -> u32 {
    let (a, b) = linear(shape, pi);
    let r = (pi.bound() - 4 - b).div_euclid(a) + 1;
    r.max(1) as u32
}

/// The oscillation weight exactly as defined: the `σ ≤ ⊕^r α ≤ π`
/// condition is not part of it.
pub fn weight_osc(shape: Shape, pi: PiClass) -> (u32, i8) {
    let r = min_r_osc(shape, pi);
    let w = if !fits_in_pi(shape, r, pi, Caps::ONE) {
        1
    } else if !fits_in_pi(shape, r + 1, pi, Caps::NONE) {
        -1
    } else {
        0
    };
    (r, w)
}

/// Weight as it enters the recursion: zero unless `⊕^r α ≤ π`.
pub fn effective_weight(shape: Shape, pi: PiClass) -> i8 {
    let (r, w) = weight_osc(shape, pi);
    if fits_in_pi(shape, r, pi, Caps::NONE) {
        w
    } else {
        0
    }
}

/// `σ ≤ π` for an oscillation `π`, by the inequalities.
fn contained(sigma: Option<PiClass>, sigma_len: usize, pi: OscillationId) -> bool {
    if sigma_len > pi.len() {
        return false;
    }
    let Some(class) = sigma else {
        return !pi.is_empty();
    };
    match pi.shape() {
        None => false,
        Some(shape) => raw_min_k_class(class, shape.kind()).is_some_and(|k| k <= shape.k()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KRange {
    pub shape: ShapeKind,
    pub min_k: u32,
    pub max_k: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub shape: Shape,
    pub alpha: Permutation,
    pub r: u32,
    pub weight: i8,
    pub mu: i64,
    pub effective: i8,
}

#[derive(Clone, Debug, Serialize)]
pub struct OscillationTrace {
    pub sigma: Permutation,
    pub pi: OscillationId,
    pub ranges: Vec<KRange>,
    pub rows: Vec<TraceRow>,
    pub value: i64,
}

impl fmt::Display for OscillationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "shape\tmin_k\tmax_k")?;
        for range in &self.ranges {
            writeln!(
                f,
                "{}\t{}\t{}",
                range.shape.label(),
                range.min_k,
                range.max_k
            )?;
        }
        writeln!(f)?;
        for range in &self.ranges {
            let rows: Vec<_> = self
                .rows
                .iter()
                .filter(|r| r.shape.kind() == range.shape)
                .collect();
            if rows.is_empty() {
                writeln!(f, "{}\tNo possibilities", range.shape.label())?;
            }
            for row in rows {
                writeln!(
                    f,
                    "alpha={} r={} weight={} mu={} effective={} shape={}",
                    row.alpha, row.r, row.weight, row.mu, row.effective, row.shape
                )?;
            }
        }
        Ok(())
    }
}

/// `μ(σ, ·)` on increasing oscillations for one fixed `σ`. Values are kept
/// per kind and length and filled in ascending length order.
#[derive(Clone, Debug)]
pub struct OscillationSolver {
    sigma: Permutation,
    class: Option<PiClass>,
    w: Vec<i64>,
    m: Vec<i64>,
}

impl OscillationSolver {
    /// `σ` must be `1` or a sum-indecomposable increasing oscillation.
    pub fn new(sigma: &Permutation) -> Result<Self> {
        let class = match sigma.len() {
            0 => {
                return Err(Error::PreconditionViolation(
                    "lower bound must be nonempty".into(),
                ))
            }
            1 => None,
            _ => Some(PiClass::of_perm(sigma)?),
        };
        Ok(OscillationSolver {
            sigma: sigma.clone(),
            class,
            w: Vec::new(),
            m: Vec::new(),
        })
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    /// Whether `σ ≤ π`.
    pub fn below(&self, pi: OscillationId) -> bool {
        contained(self.class, self.sigma.len(), pi)
    }

    /// Largest length filled so far.
    pub fn filled(&self) -> usize {
        self.w.len().saturating_sub(1)
    }

    pub fn mobius(&mut self, pi: OscillationId) -> Result<i64> {
        if pi.is_empty() {
            return Err(Error::NotAnOscillation("ε".into()));
        }
        self.fill_to(pi.len())?;
        Ok(self.lookup(pi))
    }

    /// Like [`OscillationSolver::mobius`] but fails when `σ ≰ π`.
    pub fn mobius_contained(&mut self, pi: OscillationId) -> Result<i64> {
        if !self.below(pi) {
            return Err(Error::NotContained {
                sigma: self.sigma.to_string(),
                pi: pi.realize().to_string(),
            });
        }
        self.mobius(pi)
    }

    fn lookup(&self, pi: OscillationId) -> i64 {
        let len = pi.len();
        match pi.kind {
            OscKind::W => self.w[len],
            OscKind::M => self.m[len],
        }
    }

    fn fill_to(&mut self, len: usize) -> Result<()> {
        while self.w.len() <= len {
            let next = self.w.len();
            let w = self.evaluate(OscillationId {
                kind: OscKind::W,
                n: next as u32,
            })?;
            let m = self.evaluate(OscillationId {
                kind: OscKind::M,
                n: next as u32,
            })?;
            self.w.push(w);
            self.m.push(m);
        }
        Ok(())
    }

    fn evaluate(&self, pi: OscillationId) -> Result<i64> {
        let len = pi.len();
        let s = self.sigma.len();
        if len == 0 || !self.below(pi) {
            return Ok(0);
        }
        if len == s {
            return Ok(1);
        }
        if len == s + 1 {
            return Ok(-1);
        }
        if len <= 3 {
            return Oracle::default().mobius_naive(&self.sigma, &pi.realize());
        }
        let class = PiClass::of(pi)?;
        let mut total: i64 = 0;
        for shape in ShapeKind::ALL {
            let lo = min_k_class(self.class, shape, len);
            let hi = max_k(shape, class);
            for v in lo..=hi {
                let alpha = Shape::new(shape, v)?;
                let e = effective_weight(alpha, class);
                if e == 0 {
                    continue;
                }
                let mu = self.lookup(alpha.oscillation_id());
                total = mu
                    .checked_mul(e as i64)
                    .and_then(|t| total.checked_add(t))
                    .ok_or(Error::Overflow)?;
            }
        }
        total.checked_neg().ok_or(Error::Overflow)
    }

    /// Recomputes the top-level sum for `π` with every term recorded.
    pub fn trace(&mut self, pi: OscillationId) -> Result<OscillationTrace> {
        let value = self.mobius(pi)?;
        let len = pi.len();
        let mut ranges = Vec::new();
        let mut rows = Vec::new();
        if len >= 4 {
            let class = PiClass::of(pi)?;
            for shape in ShapeKind::ALL {
                let lo = min_k_class(self.class, shape, len);
                let hi = max_k(shape, class);
                ranges.push(KRange {
                    shape,
                    min_k: lo,
                    max_k: hi,
                });
                for v in lo..=hi {
                    let alpha = Shape::new(shape, v)?;
                    let id = alpha.oscillation_id();
                    if !self.below(id) {
                        continue;
                    }
                    let (r, weight) = weight_osc(alpha, class);
                    rows.push(TraceRow {
                        shape: alpha,
                        alpha: alpha.realize(),
                        r,
                        weight,
                        mu: self.lookup(id),
                        effective: effective_weight(alpha, class),
                    });
                }
            }
        }
        Ok(OscillationTrace {
            sigma: self.sigma.clone(),
            pi,
            ranges,
            rows,
            value,
        })
    }
}

/// One-shot evaluation of `μ(σ, π)` for an increasing oscillation `π`.
pub fn mobius_oscillation(sigma: &Permutation, pi: OscillationId) -> Result<i64> {
    OscillationSolver::new(sigma)?.mobius_contained(pi)
}
