//! Jacobi polynomials `P_n^{(a,b)}(x)` for arbitrary real `a`, `b` and `x`.
//!
//! The eigenfunction parameters are non-classical (`b` is typically below
//! `-1`) and the argument `1 + 2 q s` leaves `[-1, 1]`, so only polynomial
//! identities are used here, never orthogonality.

use crate::error::{Error, Result};

/// Below this magnitude a divisor of the three-term recurrence is treated as
/// vanishing and the explicit sum is used instead.
const RECURRENCE_GUARD: f64 = 1e-8;

/// Degree-`n` Jacobi polynomial. Classical parameters (`a, b >= -1`) use the
/// three-term recurrence seeded with
/// `P_0 = 1`, `P_1 = (a - b)/2 + (a + b + 2) x / 2`, which is unstable
/// otherwise; those fall back to the two-point binomial sum.
pub fn jacobi_eval(n: u32, a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && x.is_finite()) {
        return Err(Error::NonFinite(format!(
            "Jacobi arguments a = {a}, b = {b}, x = {x}"
        )));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let p1 = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    if n == 1 {
        return finite(p1, n, a, b, x);
    }
    let ab = a + b;
    let degenerate = (2..=n).any(|k| {
        let k = f64::from(k);
        (k + ab).abs() < RECURRENCE_GUARD || (2.0 * k + ab - 2.0).abs() < RECURRENCE_GUARD
    });
    if degenerate || a < -1.0 || b < -1.0 {
        return two_point_sum(n, a, b, x);
    }

    let (mut prev, mut cur) = (1.0, p1);
    for k in 2..=n {
        let k = f64::from(k);
        let c = 2.0 * k + ab;
        let lead = 2.0 * k * (k + ab) * (c - 2.0);
        let mid = (c - 1.0) * (c * (c - 2.0) * x + a * a - b * b);
        let tail = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
        let next = (mid * cur - tail * prev) / lead;
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            return Err(Error::JacobiOverflow { n: k as u32, a, b, x });
        }
    }
    Ok(cur)
}

/// `sum_k C(n+a, n-k) C(n+b, k) ((x-1)/2)^k ((x+1)/2)^(n-k)`. Expanding
/// about both endpoints at once keeps the cancellation mild near `x = 0`,
/// where the one-sided series loses digits.
fn two_point_sum(n: u32, a: f64, b: f64, x: f64) -> Result<f64> {
    let (u, v) = (0.5 * (x - 1.0), 0.5 * (x + 1.0));
    let mut total = 0.0;
    for k in 0..=n {
        let c = binomial(f64::from(n) + a, n - k) * binomial(f64::from(n) + b, k);
        total += c * u.powi(k as i32) * v.powi((n - k) as i32);
    }
    finite(total, n, a, b, x)
}

/// Generalized binomial coefficient `C(r, j)` for real `r`.
fn binomial(r: f64, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (r - f64::from(i)) / f64::from(i + 1))
}

fn finite(v: f64, n: u32, a: f64, b: f64, x: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::JacobiOverflow { n, a, b, x })
    }
}

/// `P_n^{(a,b)}(1) = Gamma(a + n + 1) / (n! Gamma(a + 1))`, evaluated as the
/// product `prod_{k=1}^{n} (a + k) / k`.
pub fn jacobi_at_one(n: u32, a: f64) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * (a + f64::from(k)) / f64::from(k))
}

/// `d/dx P_n^{(a,b)}(x) = (n + a + b + 1)/2 * P_{n-1}^{(a+1,b+1)}(x)`.
pub fn jacobi_derivative(n: u32, a: f64, b: f64, x: f64) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let inner = jacobi_eval(n - 1, a + 1.0, b + 1.0, x)?;
    Ok(0.5 * (f64::from(n) + a + b + 1.0) * inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_degrees() {
        assert_eq!(jacobi_eval(0, 3.2, -7.1, 11.0).unwrap(), 1.0);
        for x in [-1.0, 0.0, 0.5, 2.0] {
            let legendre = 0.5 * (3.0 * x * x - 1.0);
            assert_relative_eq!(jacobi_eval(2, 0.0, 0.0, x).unwrap(), legendre, epsilon = 1e-15);
        }
    }

    #[test]
    fn values_at_one() {
        assert_eq!(jacobi_at_one(0, -0.3), 1.0);
        assert_eq!(jacobi_at_one(2, 0.0), 1.0);
        assert_eq!(jacobi_at_one(3, 2.0), 10.0);
        assert_relative_eq!(jacobi_eval(3, 2.0, 0.7, 1.0).unwrap(), 10.0, max_relative = 1e-14);
    }

    #[test]
    fn derivatives() {
        assert_eq!(jacobi_derivative(0, 1.0, 1.0, 0.2).unwrap(), 0.0);
        for (a, b) in [(0.3, -2.4), (1.5, 0.5)] {
            assert_relative_eq!(
                jacobi_derivative(1, a, b, 0.77).unwrap(),
                0.5 * (a + b + 2.0),
                max_relative = 1e-15
            );
        }
        assert_relative_eq!(jacobi_derivative(2, 0.0, 0.0, 0.5).unwrap(), 1.5, max_relative = 1e-15);
    }

    /// `sum_k C(n+a, n-k) C(n+a+b+k, k) ((x-1)/2)^k`, the terminating
    /// hypergeometric series written with generalized binomials. Polynomial in
    /// `a` and `b`, so it has no parameter poles.
    fn explicit_sum(n: u32, a: f64, b: f64, x: f64) -> Result<f64> {
        let t = 0.5 * (x - 1.0);
        let mut total = 0.0;
        let mut tk = 1.0;
        for k in 0..=n {
            let c1 = binomial(f64::from(n) + a, n - k);
            let c2 = binomial(f64::from(n + k) + a + b, k);
            total += c1 * c2 * tk;
            tk *= t;
        }
        finite(total, n, a, b, x)
    }

    #[test]
    fn non_classical_parameters_match_one_sided_series() {
        // k + a + b = 0 at k = 3
        let (a, b) = (0.4, -3.4);
        let v = jacobi_eval(4, a, b, 1.7).unwrap();
        let near = jacobi_eval(4, a, b + 1e-6, 1.7).unwrap();
        assert!((v - near).abs() < 1e-4 * near.abs().max(1.0));
        // the explicit sum and the recurrence agree away from the poles
        for x in [-0.3, 1.2, 2.9] {
            let r = jacobi_eval(6, 0.35, -2.2, x).unwrap();
            let e = explicit_sum(6, 0.35, -2.2, x).unwrap();
            assert_relative_eq!(r, e, max_relative = 1e-11, epsilon = 1e-12);
        }
    }

    #[test]
    fn recurrence_matches_two_point_sum_for_classical_parameters() {
        for &(a, b) in &[(0.5, -0.5), (2.0, 3.5), (-0.9, 0.1)] {
            for x in [-2.5, -0.4, 0.0, 0.9, 2.2] {
                let r = jacobi_eval(9, a, b, x).unwrap();
                let t = two_point_sum(9, a, b, x).unwrap();
                assert_relative_eq!(r, t, max_relative = 1e-11, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        match jacobi_eval(40, 300.0, 300.0, 1e12) {
            Err(Error::JacobiOverflow { .. }) => {}
            other => panic!("expected overflow, got {other:?}"),
        }
    }
}
