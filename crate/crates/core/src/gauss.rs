//! Gauss–Legendre rules, barycentric interpolation on Gauss nodes and
//! Legendre series evaluation.

use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1],
/// nodes increasing.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    (x.iter().map(|t| c + h * t).collect(), w.iter().map(|v| h * v).collect())
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = if (1.0 - x * x).abs() < 1e-300 {
        0.5 * (n * (n + 1)) as f64 * x.signum().powi(n as i32 + 1)
    } else {
        n as f64 * (p0 - x * p1) / (1.0 - x * x)
    };
    (p1, d)
}

/// Barycentric weights for Gauss–Legendre nodes x with weights w.
pub fn barycentric_weights(x: &[f64], w: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(w)
        .enumerate()
        .map(|(j, (xj, wj))| {
            let s = ((1.0 - xj * xj) * wj).sqrt();
            if j % 2 == 0 {
                s
            } else {
                -s
            }
        })
        .collect()
}

/// Values of all Lagrange basis polynomials at `t`.
pub fn lagrange_basis(nodes: &[f64], bary: &[f64], t: f64, out: &mut [f64]) {
    let mut denom = 0.0;
    for (j, (&xj, &bj)) in nodes.iter().zip(bary).enumerate() {
        let d = t - xj;
        if d == 0.0 {
            out.iter_mut().for_each(|o| *o = 0.0);
            out[j] = 1.0;
            return;
        }
        out[j] = bj / d;
        denom += out[j];
    }
    out.iter_mut().for_each(|o| *o /= denom);
}

/// Legendre polynomials and their first two derivatives at x, degrees 0..n.
pub fn legendre_table(n: usize, x: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; n];
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    if n == 0 {
        return (p, d1, d2);
    }
    p[0] = 1.0;
    if n > 1 {
        p[1] = x;
        d1[1] = 1.0;
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        p[k + 1] = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
        d1[k + 1] = d1[k - 1] + (2.0 * kf + 1.0) * p[k];
        d2[k + 1] = d2[k - 1] + (2.0 * kf + 1.0) * d1[k];
    }
    (p, d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 16, 64, 129] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg} got {got}");
            }
        }
    }

    #[test]
    fn nodes_are_sorted_and_symmetric() {
        let (x, _) = gauss_legendre(33);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        for i in 0..33 {
            assert!((x[i] + x[32 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn barycentric_reproduces_polynomials_off_grid() {
        let (x, w) = gauss_legendre(12);
        let b = barycentric_weights(&x, &w);
        let f = |t: f64| 3.0 * t.powi(7) - t.powi(3) + 0.5;
        let vals: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let mut l = vec![0.0; 12];
        for &t in &[-1.0, -0.3, 0.123, 1.0] {
            lagrange_basis(&x, &b, t, &mut l);
            let p: f64 = l.iter().zip(&vals).map(|(a, b)| a * b).sum();
            assert!((p - f(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_recurrences_match_closed_forms() {
        let (p, d1, d2) = legendre_table(6, 0.3);
        let x: f64 = 0.3;
        assert!((p[3] - 0.5 * (5.0 * x.powi(3) - 3.0 * x)).abs() < 1e-15);
        assert!((d1[3] - 0.5 * (15.0 * x * x - 3.0)).abs() < 1e-14);
        assert!((d2[3] - 15.0 * x).abs() < 1e-14);
        let (p, d1, d2) = legendre_table(6, 1.0);
        for k in 0..6 {
            let kf = k as f64;
            assert!((p[k] - 1.0).abs() < 1e-15);
            assert!((d1[k] - kf * (kf + 1.0) / 2.0).abs() < 1e-13);
            assert!((d2[k] - (kf - 1.0) * kf * (kf + 1.0) * (kf + 2.0) / 8.0).abs() < 1e-12);
        }
    }
}
