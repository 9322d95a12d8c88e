use num_complex::Complex64;

/// Chebyshev polynomial of the second kind, `U_n(xi)`, by the three-term
/// recurrence `U_{k+1} = 2 xi U_k − U_{k−1}`.
pub fn chebyshev_u(n: u32, xi: Complex64) -> Complex64 {
    chebyshev_u_tail(n, xi)[2]
}

/// `[U_{n−2}, U_{n−1}, U_n]`, with `U_{−1} = 0` and `U_{−2} = −1`.
pub fn chebyshev_u_tail(n: u32, xi: Complex64) -> [Complex64; 3] {
    let two_xi = 2.0 * xi;
    let mut prev2 = Complex64::new(-1.0, 0.0);
    let mut prev = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        let next = two_xi * cur - prev;
        prev2 = prev;
        prev = cur;
        cur = next;
    }
    [prev2, prev, cur]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        let xi = Complex64::new(0.3, -1.7);
        assert_eq!(chebyshev_u(0, xi), Complex64::new(1.0, 0.0));
        assert_eq!(chebyshev_u(1, xi), 2.0 * xi);
        assert_eq!(
            chebyshev_u(2, Complex64::new(0.0, 0.0)),
            Complex64::new(-1.0, 0.0)
        );
    }

    #[test]
    fn closed_form_at_one_half() {
        let z = 0.5f64;
        let xi = Complex64::new((z + 1.0 / z) / 2.0, 0.0);
        assert!((chebyshev_u(2, xi).re - 5.25).abs() < 1e-14);
        let closed = (z.powi(3) - z.powi(-3)) / (z - 1.0 / z);
        assert!((closed - 5.25).abs() < 1e-14);
    }

    #[test]
    fn tail_is_consistent() {
        let xi = Complex64::new(0.7, 0.2);
        let [a, b, c] = chebyshev_u_tail(9, xi);
        assert_eq!(a, chebyshev_u(7, xi));
        assert_eq!(b, chebyshev_u(8, xi));
        assert_eq!(c, chebyshev_u(9, xi));
        assert_eq!(chebyshev_u_tail(1, xi)[0], Complex64::new(0.0, 0.0));
    }
}
