//! Two-sided p-value for H0: μ = 0.

use crate::error::{Error, Result};
use crate::numerics::std_normal_cdf;

/// 2(1 − Φ(|t|)), computed as 2Φ(−|t|) so the upper tail keeps full relative
/// precision. Depends on nothing but `t`.
pub fn p_value(t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::domain(format!("t must be finite, got {t}")));
    }
    Ok(2.0 * std_normal_cdf(-t.abs())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(p_value(0.0).unwrap(), 1.0);
        assert!((p_value(1.959964).unwrap() - 0.05).abs() < 1e-6);
        assert!((p_value(3.0).unwrap() - 0.0026998).abs() < 1e-6);
        assert!(p_value(f64::NAN).is_err());
        assert!(p_value(f64::INFINITY).is_err());
    }

    #[test]
    fn tail_is_relatively_accurate() {
        // 40-digit reference for 2Φ(-8)
        let want = 1.244_192_114_854_356_8e-15;
        assert!(((p_value(8.0).unwrap() - want) / want).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn symmetric(t in -40.0f64..40.0) {
            prop_assert_eq!(p_value(t).unwrap(), p_value(-t).unwrap());
        }

        #[test]
        fn decreasing_in_magnitude(x in 0.0f64..8.0, dx in 1e-3f64..4.0) {
            prop_assert!(p_value(x).unwrap() > p_value(x + dx).unwrap());
        }

        #[test]
        fn equals_twice_lower_tail(t in -10.0f64..10.0) {
            let alt = 2.0 * std_normal_cdf(-t.abs()).unwrap();
            prop_assert!((p_value(t).unwrap() - alt).abs() <= 1e-14);
            let complement = 2.0 * (1.0 - std_normal_cdf(t.abs()).unwrap());
            prop_assert!((p_value(t).unwrap() - complement).abs() <= 1e-14);
        }
    }
}
