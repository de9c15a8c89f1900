use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// One-sided sign test: `P(X >= successes)` for `X ~ Binomial(trials, 1/2)`.
///
/// The tail is summed exactly as an integer over `2^trials` and rounded to
/// `f64` once at the end.
pub fn binomial_sign_test(successes: u64, trials: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::invalid("binomial test needs at least one trial"));
    }
    if successes > trials {
        return Err(Error::invalid(format!(
            "{successes} successes out of {trials} trials"
        )));
    }
    if successes == 0 {
        return Ok(1.0);
    }
    // Walk C(n, k) downward from k = n, accumulating the upper tail.
    let mut coeff = BigUint::one();
    let mut tail = BigUint::zero();
    let mut k = trials;
    loop {
        tail += &coeff;
        if k == successes {
            break;
        }
        coeff = coeff * BigUint::from(k) / BigUint::from(trials - k + 1);
        k -= 1;
    }
    Ok(scale_by_pow2(&tail, trials))
}

/// `value / 2^exp` with a single rounding.
fn scale_by_pow2(value: &BigUint, exp: u64) -> f64 {
    // Keep 64 leading bits so the conversion to f64 rounds once; the lost
    // low bits only matter for ties, which the sticky bit resolves.
    let bits = value.bits();
    let (mantissa, shift) = if bits > 64 {
        let drop = bits - 64;
        let mut m = (value >> drop).to_u64().expect("64 bits fit");
        if value.trailing_zeros().unwrap_or(0) < drop {
            m |= 1;
        }
        (m, drop as i64)
    } else {
        (value.to_u64().expect("fits"), 0)
    };
    let mut out = mantissa as f64;
    let mut e = shift - exp as i64;
    // Apply the power of two in exact steps.
    while e < -1000 {
        out *= 2f64.powi(-1000);
        e += 1000;
    }
    while e > 1000 {
        out *= 2f64.powi(1000);
        e -= 1000;
    }
    out * 2f64.powi(e as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_tails() {
        assert_eq!(binomial_sign_test(20, 20).unwrap(), 2f64.powi(-20));
        assert_eq!(binomial_sign_test(15, 20).unwrap(), 21700.0 / 1048576.0);
        assert_eq!(binomial_sign_test(0, 20).unwrap(), 1.0);
        assert_eq!(binomial_sign_test(5, 5).unwrap(), 0.03125);
        assert_eq!(binomial_sign_test(1, 1).unwrap(), 0.5);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(binomial_sign_test(3, 2).is_err());
        assert!(binomial_sign_test(0, 0).is_err());
    }

    #[test]
    fn large_trials_stay_finite() {
        let p = binomial_sign_test(600, 1000).unwrap();
        assert!(p > 0.0 && p < 1e-9);
        assert_eq!(binomial_sign_test(2000, 2000).unwrap(), 0.0);
        let half = binomial_sign_test(501, 1001).unwrap();
        assert_eq!(half, 0.5);
    }

    #[test]
    fn monotone_in_successes() {
        for n in [1u64, 7, 20, 63, 64, 65, 200] {
            let mut prev = f64::INFINITY;
            for s in 0..=n {
                let p = binomial_sign_test(s, n).unwrap();
                assert!(p <= prev, "n={n} s={s}");
                prev = p;
            }
        }
    }
}
