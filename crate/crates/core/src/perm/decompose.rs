use super::Permutation;

/// Maximal decomposition `π = π₁ ⊕ … ⊕ π_m` into sum-indecomposable
/// components. The empty permutation has no components.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SumDecomposition {
    components: Vec<Permutation>,
}

impl SumDecomposition {
    pub fn of(pi: &Permutation) -> Self {
        let mut components = Vec::new();
        let mut start = 0;
        let mut max = 0u32;
        for (i, &v) in pi.values().iter().enumerate() {
            max = max.max(v);
            if max as usize == i + 1 {
                let offset = start as u32;
                let block = pi.values()[start..=i].iter().map(|&x| x - offset).collect();
                components.push(Permutation::from_vec_unchecked(block));
                start = i + 1;
            }
        }
        SumDecomposition { components }
    }

    pub fn components(&self) -> &[Permutation] {
        &self.components
    }

    /// Number of components.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `π_{≤i}`: sum of the first `i` components (`ε` when `i == 0`).
    pub fn prefix(&self, i: usize) -> Permutation {
        sum_all(&self.components[..i.min(self.len())])
    }

    /// `π_{>i}`: sum of the components after the first `i` (`ε` when `i >= m`).
    pub fn suffix(&self, i: usize) -> Permutation {
        sum_all(&self.components[i.min(self.len())..])
    }

    /// Length of the run of leading components equal to `1`.
    pub fn leading_ones(&self) -> usize {
        self.components.iter().take_while(|c| c.len() == 1).count()
    }

    /// Length of the run of leading components equal to the first one.
    pub fn leading_run(&self) -> usize {
        match self.components.first() {
            None => 0,
            Some(first) => self.components.iter().take_while(|c| *c == first).count(),
        }
    }

    pub fn reconstruct(&self) -> Permutation {
        sum_all(&self.components)
    }
}

fn sum_all(parts: &[Permutation]) -> Permutation {
    let values = parts
        .iter()
        .scan(0u32, |offset, c| {
            let shift = *offset;
            *offset += c.len() as u32;
            Some(c.values().iter().map(move |&v| v + shift))
        })
        .flatten()
        .collect();
    Permutation::from_vec_unchecked(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(
            p("321546").sum_decompose().components(),
            &[p("321"), p("21"), p("1")]
        );
        assert_eq!(p("3142").sum_decompose().components(), &[p("3142")]);
        assert_eq!(
            p("1234").sum_decompose().components(),
            vec![p("1"); 4].as_slice()
        );
        assert!(Permutation::empty().sum_decompose().is_empty());
    }

    #[test]
    fn prefix_suffix() {
        let d = p("1243").sum_decompose();
        assert_eq!(d.len(), 3);
        assert_eq!(d.prefix(0), Permutation::empty());
        assert_eq!(d.prefix(2), p("12"));
        assert_eq!(d.suffix(1), p("132"));
        assert_eq!(d.suffix(3), Permutation::empty());
        assert_eq!(d.leading_ones(), 2);
        assert_eq!(p("21354").sum_decompose().leading_run(), 1);
        assert_eq!(p("214365").sum_decompose().leading_run(), 3);
    }

    fn arb_perm(max: usize) -> impl Strategy<Value = Permutation> {
        (0..=max)
            .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|v| Permutation::from_one_line(v).unwrap())
    }

    proptest! {
        #[test]
        fn decomposition_of_sum_concatenates(a in arb_perm(7), b in arb_perm(7)) {
            let s = a.direct_sum(&b);
            prop_assert_eq!(s.len(), a.len() + b.len());
            prop_assert_eq!(a.skew_sum(&b).len(), a.len() + b.len());
            let mut expected = a.sum_decompose().components().to_vec();
            expected.extend_from_slice(b.sum_decompose().components());
            prop_assert_eq!(s.sum_decompose().components().to_vec(), expected);
        }

        #[test]
        fn decomposition_is_unique_and_indecomposable(a in arb_perm(10)) {
            let d = a.sum_decompose();
            prop_assert_eq!(d.reconstruct(), a.clone());
            prop_assert!(d.components().iter().all(|c| c.is_sum_indecomposable()));
            prop_assert_eq!(d.reconstruct().sum_decompose(), d);
        }
    }
}
