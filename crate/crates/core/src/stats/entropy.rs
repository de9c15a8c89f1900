use crate::prob::ProbVector;

/// Shannon entropy in bits, with `0 · log2(0) = 0`.
pub fn shannon_entropy(p: &ProbVector) -> f64 {
    let h: f64 = p
        .as_slice()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum();
    // Rounding can leave -0.0 or a hair past log2(S).
    h.max(0.0).min((p.len() as f64).log2()) + 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert_eq!(shannon_entropy(&ProbVector::uniform(64)), 6.0);
        assert_eq!(
            shannon_entropy(&ProbVector::new(vec![0.0, 1.0, 0.0]).unwrap()),
            0.0
        );
        assert_eq!(
            shannon_entropy(&ProbVector::new(vec![0.5, 0.25, 0.25]).unwrap()),
            1.5
        );
        assert_eq!(shannon_entropy(&ProbVector::new(vec![1.0]).unwrap()), 0.0);
    }

    proptest! {
        #[test]
        fn permutation_invariant_and_bounded(
            w in prop::collection::vec(0.0f64..10.0, 1..40),
            rot in 0usize..40,
        ) {
            prop_assume!(w.iter().sum::<f64>() > 1e-6);
            let p = ProbVector::from_weights(&w).unwrap();
            let mut r = w.clone();
            r.reverse();
            let k = rot % r.len();
            r.rotate_left(k);
            let q = ProbVector::from_weights(&r).unwrap();
            let (hp, hq) = (shannon_entropy(&p), shannon_entropy(&q));
            prop_assert!((hp - hq).abs() < 1e-12);
            prop_assert!(hp >= 0.0 && hp <= (w.len() as f64).log2());
        }
    }
}
