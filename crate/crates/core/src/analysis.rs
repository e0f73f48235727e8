//! The principal series `μ(1, W_n)`, `μ(1, M_n)` and the checks run over it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oscillation_fast::OscillationSolver;
use crate::perm::{OscillationId, Permutation};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesRecord {
    /// Length of the oscillation.
    pub n: usize,
    pub mu_w: i64,
    pub mu_m: i64,
    /// `M(n) = |μ(1, W_n)|`.
    pub abs: u64,
    /// `M(2m)/m²` for even `n = 2m`, `M(2m+1)/(m²+m)` for odd `n = 2m+1`.
    pub ratio: f64,
    pub class_mod_12: usize,
}

fn ratio(n: usize, abs: u64) -> f64 {
    let m = (n / 2) as f64;
    if n.is_multiple_of(2) {
        abs as f64 / (m * m)
    } else {
        abs as f64 / (m * m + m)
    }
}

/// Records for lengths `4..=n_max`.
pub fn principal_series(n_max: usize) -> Result<Vec<SeriesRecord>> {
    if n_max < 4 {
        return Err(Error::RangeError(format!("n_max = {n_max} is below 4")));
    }
    let mut solver = OscillationSolver::new(&Permutation::singleton())?;
    let mut out = Vec::with_capacity(n_max - 3);
    for n in 4..=n_max {
        let mu_w = solver.mobius(OscillationId::w(n as u32))?;
        let mu_m = solver.mobius(OscillationId::m(n as u32))?;
        let abs = mu_w.unsigned_abs();
        out.push(SeriesRecord {
            n,
            mu_w,
            mu_m,
            abs,
            ratio: ratio(n, abs),
            class_mod_12: n % 12,
        });
    }
    Ok(out)
}

/// Looks up a record by length.
pub fn record(series: &[SeriesRecord], n: usize) -> Option<&SeriesRecord> {
    let first = series.first()?.n;
    series.get(n.checked_sub(first)?).filter(|r| r.n == n)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub n: usize,
    pub rule: String,
    pub expected: String,
    pub actual: String,
}

/// `μ(1, W_n) < 0` for even `n`, `> 0` for odd `n`, and `μ(1, W_n) = μ(1, M_n)`.
pub fn sign_check(series: &[SeriesRecord]) -> Vec<Violation> {
    let mut out = Vec::new();
    for r in series {
        let (ok, expected) = if r.n % 2 == 0 {
            (r.mu_w < 0, "negative")
        } else {
            (r.mu_w > 0, "positive")
        };
        if !ok {
            out.push(Violation {
                n: r.n,
                rule: "sign".into(),
                expected: expected.into(),
                actual: r.mu_w.to_string(),
            });
        }
        if r.mu_w != r.mu_m {
            out.push(Violation {
                n: r.n,
                rule: "W = M".into(),
                expected: r.mu_w.to_string(),
                actual: r.mu_m.to_string(),
            });
        }
    }
    out
}

/// `|μ| ≤ 2^n` everywhere, and the normalized ratio is at most 1.
pub fn bound_check(series: &[SeriesRecord]) -> Vec<Violation> {
    let mut out = Vec::new();
    for r in series {
        if r.n < 64 && r.abs > 1u64 << r.n {
            out.push(Violation {
                n: r.n,
                rule: "2^n".into(),
                expected: format!("<= {}", 1u64 << r.n),
                actual: r.abs.to_string(),
            });
        }
        if r.ratio > 1.0 {
            out.push(Violation {
                n: r.n,
                rule: "ratio <= 1".into(),
                expected: "<= 1".into(),
                actual: format!("{:.6}", r.ratio),
            });
        }
    }
    out
}

/// Deterministic Miller-Rabin; exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in WITNESSES {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Which odd-length targets to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OddForm {
    /// `n² − n` and `n² − n − 1`, as the conjecture is printed.
    Printed,
    /// `n² + n` and `n² + n − 1`.
    PlusN,
}

/// All four biconditionals for `n_lo <= n <= n_hi`, where `n` is the
/// half-length: `M(2n)` and `M(2n+1)` are read from the series.
pub fn jelinek_check(n_lo: usize, n_hi: usize, series: &[SeriesRecord]) -> Result<Vec<Violation>> {
    jelinek_check_with(n_lo, n_hi, series, OddForm::Printed)
}

pub fn jelinek_check_with(
    n_lo: usize,
    n_hi: usize,
    series: &[SeriesRecord],
    form: OddForm,
) -> Result<Vec<Violation>> {
    if n_lo <= 50 {
        return Err(Error::RangeError(format!(
            "n_lo = {n_lo}; the conjecture is stated for n > 50"
        )));
    }
    if n_hi < n_lo {
        return Err(Error::RangeError(format!("empty range {n_lo}..{n_hi}")));
    }
    if record(series, 2 * n_hi + 1).is_none() || record(series, 2 * n_lo).is_none() {
        return Err(Error::RangeError(format!(
            "series must cover lengths {}..={}",
            2 * n_lo,
            2 * n_hi + 1
        )));
    }
    let mut out = Vec::new();
    for n in n_lo..=n_hi {
        let prime = is_prime(n as u64 + 1);
        let residue = n % 6;
        let nn = (n * n) as u64;
        let even = record(series, 2 * n).expect("checked").abs;
        let odd = record(series, 2 * n + 1).expect("checked").abs;
        let (odd0, odd4, label0, label4) = match form {
            OddForm::Printed => (
                nn - n as u64,
                nn - n as u64 - 1,
                "M(2n+1) = n^2 - n",
                "M(2n+1) = n^2 - n - 1",
            ),
            OddForm::PlusN => (
                nn + n as u64,
                nn + n as u64 - 1,
                "M(2n+1) = n^2 + n",
                "M(2n+1) = n^2 + n - 1",
            ),
        };
        let rules = [
            ("M(2n) = n^2", even, nn, prime && residue == 0),
            ("M(2n) = n^2 - 1", even, nn - 1, prime && residue == 4),
            (label0, odd, odd0, prime && residue == 0),
            (label4, odd, odd4, prime && residue == 4),
        ];
        for (rule, actual, target, condition) in rules {
            if (actual == target) != condition {
                let expected = if condition {
                    format!("{target}")
                } else {
                    format!("!= {target}")
                };
                out.push(Violation {
                    n,
                    rule: rule.into(),
                    expected,
                    actual: actual.to_string(),
                });
            }
        }
    }
    Ok(out)
}

pub const BAND_LABELS: [&str; 4] = ["[a,b]", "[c,d]", "[e,f]", "[g,1]"];

/// Conjectured band index (into [`BAND_LABELS`]) for a length class.
pub fn band_of(class_mod_12: usize) -> usize {
    match class_mod_12 {
        10 | 11 => 0,
        2 | 3 | 6 | 7 => 1,
        4 | 5 => 2,
        _ => 3,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandReport {
    pub class_mod_12: usize,
    /// `E` for even lengths, `O` for odd.
    pub kind: char,
    pub band: &'static str,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Constants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl Constants {
    pub const CONJECTURED: Constants = Constants {
        a: 0.615,
        b: 0.680,
        c: 0.692,
        d: 0.760,
        e: 0.821,
        f: 0.896,
        g: 0.923,
    };

    pub fn named(&self) -> [(&'static str, f64); 7] {
        [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("e", self.e),
            ("f", self.f),
            ("g", self.g),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Deviation {
    pub constant: &'static str,
    pub estimated: f64,
    pub conjectured: f64,
    pub difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandingReport {
    pub range: (usize, usize),
    pub bands: Vec<BandReport>,
    pub constants: Constants,
    /// `0 < a < b < c < d < e < f < g < 1` and no ratio above 1.
    pub ordering_ok: bool,
    /// Every class lies strictly above every class of the band below it.
    pub pairing_ok: bool,
    pub deviations: Vec<Deviation>,
    pub tolerance: f64,
}

impl BandingReport {
    pub fn within_tolerance(&self) -> bool {
        self.deviations.is_empty()
    }
}

pub const BANDING_TOLERANCE: f64 = 0.05;

pub fn banding_report(n_lo: usize, n_hi: usize, series: &[SeriesRecord]) -> Result<BandingReport> {
    if n_lo < 4 || n_hi <= n_lo {
        return Err(Error::RangeError(format!("invalid window {n_lo}..{n_hi}")));
    }
    if record(series, n_lo).is_none() || record(series, n_hi).is_none() {
        return Err(Error::RangeError(format!(
            "series does not cover {n_lo}..{n_hi}"
        )));
    }
    let mut bands: Vec<BandReport> = (0..12)
        .map(|c| BandReport {
            class_mod_12: c,
            kind: if c % 2 == 0 { 'E' } else { 'O' },
            band: BAND_LABELS[band_of(c)],
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            count: 0,
        })
        .collect();
    for r in series.iter().filter(|r| (n_lo..=n_hi).contains(&r.n)) {
        let b = &mut bands[r.class_mod_12];
        b.min = b.min.min(r.ratio);
        b.max = b.max.max(r.ratio);
        b.count += 1;
    }
    let mut lo = [f64::INFINITY; 4];
    let mut hi = [f64::NEG_INFINITY; 4];
    for b in &bands {
        let i = band_of(b.class_mod_12);
        lo[i] = lo[i].min(b.min);
        hi[i] = hi[i].max(b.max);
    }
    let constants = Constants {
        a: lo[0],
        b: hi[0],
        c: lo[1],
        d: hi[1],
        e: lo[2],
        f: hi[2],
        g: lo[3],
    };
    let chain = [0.0, lo[0], hi[0], lo[1], hi[1], lo[2], hi[2], lo[3], 1.0];
    let ordering_ok = chain.windows(2).all(|w| w[0] < w[1]) && hi[3] <= 1.0;
    let pairing_ok = bands.iter().all(|x| {
        bands
            .iter()
            .filter(|y| band_of(y.class_mod_12) + 1 == band_of(x.class_mod_12))
            .all(|y| y.max < x.min)
    });
    let deviations = constants
        .named()
        .iter()
        .zip(Constants::CONJECTURED.named())
        .filter_map(|(&(name, est), (_, conjectured))| {
            let difference = est - conjectured;
            (difference.abs() > BANDING_TOLERANCE).then_some(Deviation {
                constant: name,
                estimated: est,
                conjectured,
                difference,
            })
        })
        .collect();
    Ok(BandingReport {
        range: (n_lo, n_hi),
        bands,
        constants,
        ordering_ok,
        pairing_ok,
        deviations,
        tolerance: BANDING_TOLERANCE,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogLog {
    pub rows: Vec<(f64, f64)>,
    pub skipped: usize,
}

/// `(ln n, ln |μ(1, W_n)|)` over a window; zero values are skipped.
pub fn loglog_export(series: &[SeriesRecord], n_lo: usize, n_hi: usize) -> LogLog {
    let mut rows = Vec::new();
    let mut skipped = 0;
    for r in series.iter().filter(|r| (n_lo..=n_hi).contains(&r.n)) {
        if r.abs == 0 {
            skipped += 1;
        } else {
            rows.push(((r.n as f64).ln(), (r.abs as f64).ln()));
        }
    }
    LogLog { rows, skipped }
}

/// Machine-readable form of a check, shared by every suite.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub range: (usize, usize),
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constants: Option<Constants>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Oracle;

    fn trial_division(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn primes() {
        assert!(is_prime(2));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(is_prime(10007));
        for n in 0..20000 {
            assert_eq!(is_prime(n), trial_division(n), "{n}");
        }
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751));
    }

    #[test]
    fn series_matches_oracle() {
        let series = principal_series(10).unwrap();
        assert_eq!(series.first().unwrap().n, 4);
        assert_eq!(series.len(), 7);
        let o = Oracle::default();
        for r in &series {
            let w = o
                .mobius_naive(
                    &Permutation::singleton(),
                    &OscillationId::w(r.n as u32).realize(),
                )
                .unwrap();
            let m = o
                .mobius_naive(
                    &Permutation::singleton(),
                    &OscillationId::m(r.n as u32).realize(),
                )
                .unwrap();
            assert_eq!((r.mu_w, r.mu_m), (w, m), "{}", r.n);
        }
        assert_eq!(record(&series, 5).unwrap().mu_m, 6);
    }

    #[test]
    fn series_is_prefix_stable() {
        let short = principal_series(60).unwrap();
        let long = principal_series(120).unwrap();
        assert_eq!(&long[..short.len()], &short[..]);
        assert!(principal_series(3).is_err());
    }

    #[test]
    fn small_series_checks() {
        let series = principal_series(400).unwrap();
        assert!(sign_check(&series).is_empty());
        assert!(bound_check(&series).is_empty());
        assert!(series.iter().all(|r| r.mu_w == r.mu_m));
        let printed = jelinek_check(51, 199, &series).unwrap();
        assert!(!printed.is_empty());
        assert!(printed.iter().all(|v| v.rule.starts_with("M(2n+1)")));
        assert!(jelinek_check_with(51, 199, &series, OddForm::PlusN)
            .unwrap()
            .is_empty());
        assert!(jelinek_check(50, 100, &series).is_err());
        assert!(jelinek_check(51, 300, &series).is_err());
    }

    #[test]
    fn loglog_rows() {
        let series = principal_series(100).unwrap();
        let out = loglog_export(&series, 10, 100);
        assert_eq!(out.rows.len() + out.skipped, 91);
        assert!(out.rows.windows(2).all(|w| w[0].0 < w[1].0));
        let fake = vec![SeriesRecord {
            n: 4,
            mu_w: 0,
            mu_m: 0,
            abs: 0,
            ratio: 0.0,
            class_mod_12: 4,
        }];
        assert_eq!(loglog_export(&fake, 4, 4).skipped, 1);
    }

    #[test]
    fn banding_on_small_window() {
        let series = principal_series(2000).unwrap();
        let report = banding_report(200, 2000, &series).unwrap();
        assert_eq!(report.bands.len(), 12);
        assert!(report.bands.iter().all(|b| b.min <= b.max && b.count > 0));
        assert!(banding_report(200, 3000, &series).is_err());
        assert!(banding_report(10, 10, &series).is_err());
    }
}
