use crate::error::{Error, Result};

/// Gini index of a non-negative distribution: 0 when uniform, 1 when all mass
/// sits on one entity.
///
/// Values are normalized to proportions `p` and sorted ascending, then
/// `G = sum_k (2k - n - 1) / (n - 1) * p_k` for `k = 1..=n`.
pub fn gini_index(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Degenerate(format!("Gini index needs at least two entities, got {n}")));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Degenerate("Gini index needs finite non-negative values".into()));
    }
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return Err(Error::Degenerate("Gini index of an all-zero vector".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let denom = (n - 1) as f64;
    let g: f64 = sorted
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let k = (idx + 1) as f64;
            (2.0 * k - n as f64 - 1.0) / denom * (v / total)
        })
        .sum();
    Ok(g.clamp(0.0, 1.0))
}

/// [`gini_index`] over integer counts.
pub fn gini_counts(values: &[u64]) -> Result<f64> {
    let v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
    gini_index(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_is_zero() {
        for n in 2..20 {
            assert!(gini_index(&vec![3.0; n]).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn one_hot_is_one() {
        assert_eq!(gini_index(&[0.0, 7.0, 0.0]).unwrap(), 1.0);
        assert_eq!(gini_index(&[0.0, 0.0, 0.0, 1.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn hand_value() {
        // proportions [0.25, 0.75]: (-1)(0.25) + (1)(0.75)
        assert!((gini_index(&[1.0, 3.0]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(gini_index(&[1.0]).is_err());
        assert!(gini_index(&[0.0, 0.0]).is_err());
        assert!(gini_index(&[1.0, -1.0]).is_err());
    }

    proptest! {
        #[test]
        fn permutation_and_scale_invariant(
            v in proptest::collection::vec(0.0f64..100.0, 2..30).prop_shuffle(),
            c in 0.001f64..1000.0,
        ) {
            prop_assume!(v.iter().sum::<f64>() > 0.0);
            let g = gini_index(&v).unwrap();
            let mut rev = v.clone();
            rev.reverse();
            let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
            prop_assert!((g - gini_index(&rev).unwrap()).abs() < 1e-12);
            prop_assert!((g - gini_index(&scaled).unwrap()).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&g));
        }
    }
}
