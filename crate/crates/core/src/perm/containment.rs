use super::Permutation;

/// True when `text` has a subsequence order-isomorphic to `pattern`.
///
/// Backtracking matcher: pattern entries are placed left to right, each at the
/// leftmost text position whose value lies strictly between the images of the
/// pattern entry's nearest smaller and nearest larger predecessors.
pub fn contains(pattern: &Permutation, text: &Permutation) -> bool {
    let (m, n) = (pattern.len(), text.len());
    if m == 0 {
        return true;
    }
    if m > n {
        return false;
    }
    if m == n {
        return pattern == text;
    }
    Matcher::new(pattern.values(), text.values()).run()
}

struct Matcher<'a> {
    text: &'a [u32],
    /// For each pattern index, the earlier pattern index holding the largest
    /// smaller value and the smallest larger value.
    below: Vec<Option<usize>>,
    above: Vec<Option<usize>>,
    image: Vec<u32>,
}

impl<'a> Matcher<'a> {
    fn new(pattern: &[u32], text: &'a [u32]) -> Self {
        let m = pattern.len();
        let mut below = Vec::with_capacity(m);
        let mut above = Vec::with_capacity(m);
        for i in 0..m {
            let v = pattern[i];
            let mut lo: Option<usize> = None;
            let mut hi: Option<usize> = None;
            for (j, &w) in pattern[..i].iter().enumerate() {
                if w < v && lo.is_none_or(|l| pattern[l] < w) {
                    lo = Some(j);
                }
                if w > v && hi.is_none_or(|h| pattern[h] > w) {
                    hi = Some(j);
                }
            }
            below.push(lo);
            above.push(hi);
        }
        Matcher {
            text,
            below,
            above,
            image: vec![0; m],
        }
    }

    fn run(&mut self) -> bool {
        self.place(0, 0)
    }

    fn place(&mut self, i: usize, start: usize) -> bool {
        let m = self.image.len();
        if i == m {
            return true;
        }
        let last = self.text.len() - (m - i);
        let lo = self.below[i].map_or(0, |j| self.image[j]);
        let hi = self.above[i].map_or(u32::MAX, |j| self.image[j]);
        for t in start..=last {
            let v = self.text[t];
            if v <= lo || v >= hi {
                continue;
            }
            self.image[i] = v;
            if self.place(i + 1, t + 1) {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    /// Exhaustive oracle: try every index subset.
    fn brute(pattern: &Permutation, text: &Permutation) -> bool {
        let (m, n) = (pattern.len(), text.len());
        if m > n {
            return false;
        }
        (0u32..1 << n)
            .filter(|mask| mask.count_ones() as usize == m)
            .any(|mask| {
                let sub: Vec<u32> = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| text.values()[i])
                    .collect();
                Permutation::standardize(&sub) == *pattern
            })
    }

    #[test]
    fn examples() {
        assert!(contains(&p("1"), &p("24153")));
        assert!(!contains(&p("21"), &p("123")));
        assert!(contains(&p("3142"), &p("315274968")));
        assert!(contains(&Permutation::empty(), &p("21")));
        assert!(contains(&Permutation::empty(), &Permutation::empty()));
        assert!(!contains(&p("1"), &Permutation::empty()));
        assert!(!contains(&p("13254"), &p("24153")));
    }

    fn all_perms(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<u32> = (1..=n as u32).collect();
        heap(&mut cur, n, &mut out);
        out
    }

    fn heap(a: &mut Vec<u32>, k: usize, out: &mut Vec<Permutation>) {
        if k <= 1 {
            out.push(Permutation::from_one_line(a.clone()).unwrap());
            return;
        }
        for i in 0..k {
            heap(a, k - 1, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            if i + 1 < k {
                a.swap(j, k - 1);
            }
        }
    }

    #[test]
    fn agrees_with_subset_scan_small() {
        let texts: Vec<Permutation> = (0..=6).flat_map(all_perms).collect();
        let patterns: Vec<Permutation> = (0..=4).flat_map(all_perms).collect();
        for t in &texts {
            for pat in &patterns {
                assert_eq!(contains(pat, t), brute(pat, t), "{pat} in {t}");
            }
        }
    }

    #[test]
    fn agrees_with_subset_scan_length_9() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..300 {
            let mut t: Vec<u32> = (1..=9).collect();
            t.shuffle(&mut rng);
            let text = Permutation::from_one_line(t).unwrap();
            for m in 3..=6 {
                let mut s: Vec<u32> = (1..=m).collect();
                s.shuffle(&mut rng);
                let pat = Permutation::from_one_line(s).unwrap();
                assert_eq!(contains(&pat, &text), brute(&pat, &text), "{pat} in {text}");
            }
        }
    }
}
