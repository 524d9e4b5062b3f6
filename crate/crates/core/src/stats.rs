//! Small statistics helpers shared across the pipeline.

/// Arithmetic mean. Returns 0.0 for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation (divides by N, not N-1).
pub fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64;
    var.sqrt()
}

/// Kendall's tau-b rank correlation with tie correction.
///
/// Direct O(n^2) pair scan; fine at the corpus sizes this crate handles.
/// Returns NaN when either sequence is constant (denominator zero).
pub fn kendall_tau(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "kendall_tau: length mismatch");
    let n = a.len();
    if n < 2 {
        return f64::NAN;
    }
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    let mut ties_a = 0i64;
    let mut ties_b = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let da = a[i] - a[j];
            let db = b[i] - b[j];
            if da == 0.0 && db == 0.0 {
                ties_a += 1;
                ties_b += 1;
            } else if da == 0.0 {
                ties_a += 1;
            } else if db == 0.0 {
                ties_b += 1;
            } else if da * db > 0.0 {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    let denom = (((n0 - ties_a) as f64) * ((n0 - ties_b) as f64)).sqrt();
    if denom == 0.0 {
        return f64::NAN;
    }
    (concordant - discordant) as f64 / denom
}

/// Numerically stable logistic function.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Inverse of [`sigmoid`]: ln(p / (1 - p)).
pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Softmax with max-subtraction. Output entries are non-negative and sum
/// to 1 up to rounding.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.iter().map(|e| e / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn mean_and_std() {
        assert_abs_diff_eq!(mean(&[0.0, 2.0]), 1.0);
        // population std of {0, 2} is 1, not sqrt(2)
        assert_abs_diff_eq!(population_std(&[0.0, 2.0]), 1.0);
    }

    #[test]
    fn tau_perfect_orders() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let up = [0.1, 0.5, 0.7, 0.9];
        let down = [4.0, 3.0, 2.0, 1.0];
        assert_abs_diff_eq!(kendall_tau(&a, &up), 1.0);
        assert_abs_diff_eq!(kendall_tau(&a, &down), -1.0);
    }

    #[test]
    fn tau_with_ties_matches_hand_count() {
        // a: (1,1,2), b: (1,2,3). Pairs: (0,1) tied in a; (0,2), (1,2) concordant.
        // n0 = 3, ties_a = 1, ties_b = 0 -> tau = 2 / sqrt(2 * 3)
        let tau = kendall_tau(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]);
        assert_abs_diff_eq!(tau, 2.0 / (6.0f64).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn tau_constant_is_nan() {
        assert!(kendall_tau(&[1.0, 1.0], &[1.0, 2.0]).is_nan());
    }

    #[test]
    fn sigmoid_logit_roundtrip() {
        for &x in &[-20.0, -3.0, 0.0, 0.5, 7.0] {
            assert_abs_diff_eq!(logit(sigmoid(x)), x, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(sigmoid(0.0), 0.5);
        assert_abs_diff_eq!(sigmoid((3.0f64).ln()), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn softmax_is_probability_vector() {
        let w = softmax(&[1.0, 2.0, 3.0]);
        assert!(w.iter().all(|&x| x > 0.0));
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        // shift invariance
        let w2 = softmax(&[101.0, 102.0, 103.0]);
        for (x, y) in w.iter().zip(&w2) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }
}
