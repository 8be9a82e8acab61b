/// Associated Laguerre polynomial `L_n^k(x)` by the upward three-term recurrence
/// `(j+1) L_{j+1} = (2j + 1 + k − x) L_j − (j + k) L_{j−1}`.
pub fn laguerre_assoc(n: usize, k: usize, x: f64) -> f64 {
    let kf = k as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + kf - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + kf - x) * cur - (jf + kf) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_0^k(x), ..., L_{len-1}^k(x)` in one pass of the recurrence.
pub fn laguerre_column(len: usize, k: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    let kf = k as f64;
    out.push(1.0);
    if len == 1 {
        return out;
    }
    out.push(1.0 + kf - x);
    for j in 1..len - 1 {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + kf - x) * out[j] - (jf + kf) * out[j - 1]) / (jf + 1.0);
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    // L_n^k(x) = Σ_i (-1)^i C(n+k, n-i) x^i / i!
    fn series(n: usize, k: usize, x: f64) -> f64 {
        let binom = |a: usize, b: usize| -> f64 {
            (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64)
        };
        let mut sum = 0.0;
        let mut xi_over_fact = 1.0;
        for i in 0..=n {
            if i > 0 {
                xi_over_fact *= x / i as f64;
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * binom(n + k, n - i) * xi_over_fact;
        }
        sum
    }

    #[test]
    fn low_orders() {
        for &x in &[0.0, 0.3, 2.5, 11.0] {
            for k in 0..4 {
                assert_eq!(laguerre_assoc(0, k, x), 1.0);
            }
            assert!((laguerre_assoc(1, 0, x) - (1.0 - x)).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_series() {
        assert!((laguerre_assoc(5, 2, 0.3) - series(5, 2, 0.3)).abs() < 1e-12);
        for n in 0..12 {
            for k in 0..5 {
                for &x in &[0.0, 0.7, 3.1] {
                    let (a, b) = (laguerre_assoc(n, k, x), series(n, k, x));
                    assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "n={n} k={k} x={x}");
                }
            }
        }
    }

    #[test]
    fn column_agrees_with_pointwise() {
        let col = laguerre_column(15, 3, 4.2);
        for (n, v) in col.iter().enumerate() {
            assert_eq!(*v, laguerre_assoc(n, 3, 4.2));
        }
    }
}
