use crate::error::{Error, Result};

/// Gini impurity `1 - sum_k (c_k / total)^2` of a class-count vector.
pub fn gini_impurity(class_counts: &[u64]) -> Result<f64> {
    let total: u64 = class_counts.iter().sum();
    if total == 0 {
        return Err(Error::Domain("gini impurity of an empty node".into()));
    }
    let total = total as f64;
    let sum_sq: f64 = class_counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            p * p
        })
        .sum();
    Ok(1.0 - sum_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert_eq!(gini_impurity(&[10, 0, 0]).unwrap(), 0.0);
        assert_eq!(gini_impurity(&[5, 5]).unwrap(), 0.5);
        // 1 - (4 + 1 + 1) / 16
        assert_eq!(gini_impurity(&[2, 1, 1]).unwrap(), 0.625);
    }

    #[test]
    fn empty_counts_are_a_domain_error() {
        assert!(matches!(gini_impurity(&[0, 0]), Err(Error::Domain(_))));
        assert!(gini_impurity(&[]).is_err());
    }

    proptest! {
        #[test]
        fn scale_invariant(counts in prop::collection::vec(0u64..50, 2..6), a in 1u64..20) {
            prop_assume!(counts.iter().any(|&c| c > 0));
            let scaled: Vec<u64> = counts.iter().map(|c| c * a).collect();
            let g = gini_impurity(&counts).unwrap();
            let gs = gini_impurity(&scaled).unwrap();
            prop_assert!((g - gs).abs() < 1e-12);
            prop_assert!((0.0..1.0).contains(&g));
        }
    }
}
