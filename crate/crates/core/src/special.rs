//! Special functions needed by the Coulomb wavefunctions: associated
//! Laguerre polynomials and log-factorials.

/// Associated Laguerre polynomial L_n^k(x), evaluated with the three-term
/// recurrence
///
///   (n+1) L_{n+1}^k = (2n + k + 1 − x) L_n^k − (n + k) L_{n−1}^k,
///
/// which is numerically stable for the moderate n, k used here. The explicit
/// factorial sum is kept as a test oracle.
pub fn laguerre(n: u32, k: u32, x: f64) -> f64 {
    let kf = k as f64;
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0; // L_0
    let mut cur = 1.0 + kf - x; // L_1
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + kf + 1.0 - x) * cur - (jf + kf) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// ln(n!) by direct summation. The arguments are small (n ≲ 30 in every
/// caller) so no asymptotic expansion is needed; summation keeps the
/// relative error at a few ulps.
pub fn ln_factorial(n: u32) -> f64 {
    let mut acc = 0.0;
    for i in 2..=n as u64 {
        acc += (i as f64).ln();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The explicit sum Σ_m (−1)^m (n+k)! / ((n−m)! (m+k)! m!) x^m,
    /// independent of the recurrence path.
    fn laguerre_by_sum(n: u32, k: u32, x: f64) -> f64 {
        let fact = |j: u32| -> f64 { (1..=j as u64).map(|v| v as f64).product() };
        let mut acc = 0.0;
        for m in 0..=n {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let coeff = fact(n + k) / (fact(n - m) * fact(m + k) * fact(m));
            acc += sign * coeff * x.powi(m as i32);
        }
        acc
    }

    #[test]
    fn base_cases() {
        assert_eq!(laguerre(0, 0, 3.7), 1.0);
        assert_eq!(laguerre(0, 5, -1.0), 1.0);
        // L_1^1(x) = 2 - x
        assert_eq!(laguerre(1, 1, 2.0), 0.0);
        assert_eq!(laguerre(1, 1, 0.5), 1.5);
    }

    #[test]
    fn quadratic_value() {
        // L_2^1(2) = 3 - 3·2 + 2²/2 = -1
        assert!((laguerre(2, 1, 2.0) - (-1.0)).abs() < 1e-14);
    }

    #[test]
    fn recurrence_agrees_with_factorial_sum() {
        // Deterministic sweep over the (n, k, x) ranges used by the
        // wavefunctions; the sum oracle is exact in this range.
        let xs = [0.0, 0.13, 1.0, 2.7, 5.0, 11.3, 25.0, 50.0];
        for n in 0..=10u32 {
            for k in 0..=8u32 {
                for &x in &xs {
                    let rec = laguerre(n, k, x);
                    let sum = laguerre_by_sum(n, k, x);
                    let scale = rec.abs().max(sum.abs()).max(1.0);
                    assert!(
                        (rec - sum).abs() <= 1e-10 * scale,
                        "L_{n}^{k}({x}): recurrence {rec} vs sum {sum}"
                    );
                }
            }
        }
    }

    #[test]
    fn recurrence_identity_holds() {
        // (n+1) L_{n+1}^k = (2n+k+1−x) L_n^k − (n+k) L_{n−1}^k
        let xs = [0.1, 1.0, 7.3, 19.0, 42.0];
        for n in 1..=10u32 {
            for k in 0..=8u32 {
                for &x in &xs {
                    let lhs = (n as f64 + 1.0) * laguerre(n + 1, k, x);
                    let rhs = (2.0 * n as f64 + k as f64 + 1.0 - x) * laguerre(n, k, x)
                        - (n as f64 + k as f64) * laguerre(n - 1, k, x);
                    let scale = lhs.abs().max(rhs.abs()).max(1.0);
                    assert!(
                        (lhs - rhs).abs() <= 1e-10 * scale,
                        "recurrence violated at n={n} k={k} x={x}: {lhs} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn ln_factorial_matches_direct_product() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        let direct: f64 = (1..=15u64).map(|v| v as f64).product();
        assert!((ln_factorial(15) - direct.ln()).abs() < 1e-12);
    }
}
