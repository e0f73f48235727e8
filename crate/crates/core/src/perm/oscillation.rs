use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Permutation;
use crate::error::{Error, Result};

/// The five shapes of sum-indecomposable increasing oscillations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ShapeKind {
    /// `21`
    Single21,
    /// `⊙^k(21)`, `k >= 2`
    Plain,
    /// `1 ⊙ (⊙^k 21)`
    LeftCapped,
    /// `(⊙^k 21) ⊙ 1`
    RightCapped,
    /// `1 ⊙ (⊙^k 21) ⊙ 1`
    BothCapped,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 5] = [
        ShapeKind::Single21,
        ShapeKind::Plain,
        ShapeKind::LeftCapped,
        ShapeKind::RightCapped,
        ShapeKind::BothCapped,
    ];

    /// Smallest admissible block count.
    pub fn min_blocks(self) -> u32 {
        match self {
            ShapeKind::Plain => 2,
            _ => 1,
        }
    }

    /// Label in the notation of the oscillation tables.
    pub fn label(self) -> &'static str {
        match self {
            ShapeKind::Single21 => "21",
            ShapeKind::Plain => "⊙^k(21)",
            ShapeKind::LeftCapped => "1⊙(⊙^k 21)",
            ShapeKind::RightCapped => "(⊙^k 21)⊙1",
            ShapeKind::BothCapped => "1⊙(⊙^k 21)⊙1",
        }
    }
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShapeKind::Single21 => "Single21",
            ShapeKind::Plain => "Plain",
            ShapeKind::LeftCapped => "LeftCapped",
            ShapeKind::RightCapped => "RightCapped",
            ShapeKind::BothCapped => "BothCapped",
        })
    }
}

/// A shape together with its number `k` of 21 blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Shape {
    kind: ShapeKind,
    k: u32,
}

impl Shape {
    pub fn new(kind: ShapeKind, k: u32) -> Result<Self> {
        let ok = match kind {
            ShapeKind::Single21 => k == 1,
            ShapeKind::Plain => k >= 2,
            _ => k >= 1,
        };
        if !ok {
            return Err(Error::InvalidShape(format!("{kind} with k = {k}")));
        }
        Ok(Shape { kind, k })
    }

    pub fn single21() -> Self {
        Shape {
            kind: ShapeKind::Single21,
            k: 1,
        }
    }

    pub fn kind(&self) -> ShapeKind {
        self.kind
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        let k = self.k as usize;
        match self.kind {
            ShapeKind::Single21 => 2,
            ShapeKind::Plain => 2 * k,
            ShapeKind::LeftCapped | ShapeKind::RightCapped => 2 * k + 1,
            ShapeKind::BothCapped => 2 * k + 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn realize(&self) -> Permutation {
        let chain = interleave_chain(self.k as usize);
        let one = Permutation::singleton();
        match self.kind {
            ShapeKind::Single21 | ShapeKind::Plain => chain,
            ShapeKind::LeftCapped => one.interleave(&chain).expect("nonempty"),
            ShapeKind::RightCapped => chain.interleave(&one).expect("nonempty"),
            ShapeKind::BothCapped => one
                .interleave(&chain)
                .and_then(|p| p.interleave(&one))
                .expect("nonempty"),
        }
    }

    /// The `W_n` / `M_n` this shape realizes.
    pub fn oscillation_id(&self) -> OscillationId {
        let k = self.k;
        let (kind, n) = match self.kind {
            ShapeKind::Single21 => (OscKind::W, 2),
            ShapeKind::Plain => (OscKind::W, 2 * k),
            ShapeKind::RightCapped => (OscKind::W, 2 * k + 1),
            ShapeKind::LeftCapped => (OscKind::M, 2 * k + 1),
            ShapeKind::BothCapped => (OscKind::M, 2 * k + 2),
        };
        OscillationId { kind, n }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ShapeKind::Single21 => f.write_str("Single21"),
            kind => write!(f, "{kind}({})", self.k),
        }
    }
}

/// `⊙^k(21)` in linear time: each step raises the current maximum by one and
/// appends the next descent.
fn interleave_chain(k: usize) -> Permutation {
    let mut values: Vec<u32> = Vec::with_capacity(2 * k);
    values.extend([2, 1]);
    let mut max_pos = 0;
    for _ in 1..k {
        let m = values.len() as u32;
        values[max_pos] = m + 1;
        values.push(m + 2);
        values.push(m);
        max_pos = values.len() - 2;
    }
    Permutation::from_vec_unchecked(values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OscKind {
    /// Starts with a descent.
    W,
    /// Starts with an ascent.
    M,
}

impl fmt::Display for OscKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OscKind::W => "W",
            OscKind::M => "M",
        })
    }
}

/// Handle for the increasing oscillation `W_n` or `M_n` without materializing it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OscillationId {
    pub kind: OscKind,
    pub n: u32,
}

impl OscillationId {
    pub fn new(kind: OscKind, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::PreconditionViolation(
                "oscillation length must be at least 1".into(),
            ));
        }
        Ok(OscillationId { kind, n })
    }

    pub fn w(n: u32) -> Self {
        OscillationId {
            kind: OscKind::W,
            n,
        }
    }

    pub fn m(n: u32) -> Self {
        OscillationId {
            kind: OscKind::M,
            n,
        }
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Shape of the oscillation; `None` for the singleton.
    pub fn shape(&self) -> Option<Shape> {
        let n = self.n;
        let (kind, k) = match (self.kind, n) {
            (_, 0 | 1) => return None,
            (_, 2) => return Some(Shape::single21()),
            (OscKind::W, n) if n % 2 == 0 => (ShapeKind::Plain, n / 2),
            (OscKind::W, n) => (ShapeKind::RightCapped, (n - 1) / 2),
            (OscKind::M, n) if n % 2 == 0 => (ShapeKind::BothCapped, n / 2 - 1),
            (OscKind::M, n) => (ShapeKind::LeftCapped, (n - 1) / 2),
        };
        Some(Shape { kind, k })
    }

    pub fn realize(&self) -> Permutation {
        match self.shape() {
            Some(shape) => shape.realize(),
            None if self.n == 1 => Permutation::singleton(),
            None => Permutation::empty(),
        }
    }

    /// `W_n ↔ M_n`; the realizations are mutually inverse.
    pub fn inverse(&self) -> Self {
        let kind = match self.kind {
            OscKind::W => OscKind::M,
            OscKind::M => OscKind::W,
        };
        OscillationId { kind, n: self.n }
    }
}

impl fmt::Display for OscillationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.kind, self.n)
    }
}

/// The shape `s` with `realize(s) == pi`, if any.
pub fn classify_oscillation(pi: &Permutation) -> Option<Shape> {
    let len = pi.len();
    let candidates: [(ShapeKind, usize); 2] = match len {
        0 | 1 => return None,
        2 => [(ShapeKind::Single21, 1), (ShapeKind::Single21, 1)],
        n if n % 2 == 0 => [
            (ShapeKind::Plain, n / 2),
            (ShapeKind::BothCapped, n / 2 - 1),
        ],
        n => [
            (ShapeKind::LeftCapped, n / 2),
            (ShapeKind::RightCapped, n / 2),
        ],
    };
    candidates.into_iter().find_map(|(kind, k)| {
        let shape = Shape::new(kind, k as u32).ok()?;
        (shape.realize() == *pi).then_some(shape)
    })
}

/// `F⊕(α) = {α, 1⊕α, α⊕1, 1⊕α⊕1}`.
pub fn family_sum(alpha: &Permutation) -> Result<BTreeSet<Permutation>> {
    if alpha.is_empty() {
        return Err(Error::EmptyOperand);
    }
    let one = Permutation::singleton();
    let left = one.direct_sum(alpha);
    let right = alpha.direct_sum(&one);
    let both = left.direct_sum(&one);
    Ok([alpha.clone(), left, right, both].into_iter().collect())
}

/// `F⊙(α) = {α, 1⊙α, α⊙1, 1⊙α⊙1}` for `|α| > 1`.
pub fn family_interleave(alpha: &Permutation) -> Result<BTreeSet<Permutation>> {
    if alpha.is_empty() {
        return Err(Error::EmptyOperand);
    }
    if alpha.len() < 2 {
        return Err(Error::OperandTooShort);
    }
    let one = Permutation::singleton();
    let left = one.interleave(alpha)?;
    let right = alpha.interleave(&one)?;
    let both = left.interleave(&one)?;
    Ok([alpha.clone(), left, right, both].into_iter().collect())
}
