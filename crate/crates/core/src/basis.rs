//! Legendre modal basis on the reference element `[-1, 1]`, Gauss–Legendre
//! quadrature and Gauss–Lobatto node sets.

use std::f64::consts::PI;

/// Value, first and second derivative of a function at a point.
pub type Jet = [f64; 3];

/// `P_l(x)` together with its first two derivatives, by the three-term
/// recurrence. `P_l(+-1) = (+-1)^l` holds exactly.
pub fn legendre(l: usize, x: f64) -> Jet {
    let mut prev = [1.0, 0.0, 0.0];
    if l == 0 {
        return prev;
    }
    let mut cur = [x, 1.0, 0.0];
    for n in 1..l {
        let nf = n as f64;
        let c = 2.0 * nf + 1.0;
        let next = [
            (c * x * cur[0] - nf * prev[0]) / (nf + 1.0),
            prev[1] + c * cur[0],
            prev[2] + c * cur[1],
        ];
        prev = cur;
        cur = next;
    }
    cur
}

/// Jets of `P_0, ..., P_k` at `x`.
pub fn legendre_all(k: usize, x: f64) -> Vec<Jet> {
    let mut out = Vec::with_capacity(k + 1);
    out.push([1.0, 0.0, 0.0]);
    if k == 0 {
        return out;
    }
    out.push([x, 1.0, 0.0]);
    for n in 1..k {
        let nf = n as f64;
        let c = 2.0 * nf + 1.0;
        let (p, q) = (out[n - 1], out[n]);
        out.push([
            (c * x * q[0] - nf * p[0]) / (nf + 1.0),
            p[1] + c * q[0],
            p[2] + c * q[1],
        ]);
    }
    out
}

/// `P_l(+-1)`, exact.
pub fn legendre_endpoint(l: usize, right: bool) -> Jet {
    // P_l'(1) = l(l+1)/2, P_l''(1) = (l-1)l(l+1)(l+2)/8; odd/even symmetry for -1.
    let lf = l as f64;
    let d1 = lf * (lf + 1.0) / 2.0;
    let d2 = (lf - 1.0) * lf * (lf + 1.0) * (lf + 2.0) / 8.0;
    if right {
        [1.0, d1, d2]
    } else {
        let s = if l % 2 == 0 { 1.0 } else { -1.0 };
        [s, -s * d1, s * d2]
    }
}

/// A quadrature rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// Highest monomial degree integrated exactly.
    pub order: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    /// `int_{-1}^{1} f`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// `n`-point Gauss–Legendre rule (exact through degree `2n - 1`). Roots of
/// `P_n` are found by Newton's method from Chebyshev-like initial guesses.
pub fn gauss_legendre(n: usize) -> QuadratureRule {
    assert!(n >= 1, "a quadrature rule needs at least one point");
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let [p, d, _] = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let dp = legendre(n, x)[1];
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = -x;
        points[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    QuadratureRule { points, weights, order: 2 * n - 1 }
}

/// Gauss–Lobatto nodes of degree `k`: `-1`, the roots of `P_k'`, and `1`.
pub fn gauss_lobatto_nodes(k: usize) -> Vec<f64> {
    assert!(k >= 1, "Gauss-Lobatto nodes need degree at least 1");
    let mut z = vec![0.0; k + 1];
    z[0] = -1.0;
    z[k] = 1.0;
    for s in 1..k {
        let mut x = -(PI * s as f64 / k as f64).cos();
        for _ in 0..100 {
            let [_, d1, d2] = legendre(k, x);
            let dx = d1 / d2;
            x -= dx;
            if dx.abs() < 1e-14 {
                break;
            }
        }
        z[s] = x;
    }
    // Enforce exact symmetry.
    for s in 0..=k / 2 {
        let m = 0.5 * (z[k - s] - z[s]);
        z[s] = -m;
        z[k - s] = m;
    }
    if k % 2 == 0 {
        z[k / 2] = 0.0;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn endpoint_values() {
        for l in 0..12 {
            assert_eq!(legendre(l, 1.0)[0], 1.0);
            assert_eq!(legendre(l, -1.0)[0], if l % 2 == 0 { 1.0 } else { -1.0 });
            for right in [false, true] {
                let x = if right { 1.0 } else { -1.0 };
                let a = legendre(l, x);
                let b = legendre_endpoint(l, right);
                for i in 0..3 {
                    assert_abs_diff_eq!(a[i], b[i], epsilon = 1e-9 * (1.0 + b[i].abs()));
                }
            }
        }
    }

    #[test]
    fn small_degrees() {
        assert_eq!(legendre(0, 0.3), [1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(legendre(2, 0.5)[0], -0.125, epsilon = 1e-15);
        let all = legendre_all(5, 0.37);
        for (l, jet) in all.iter().enumerate() {
            assert_eq!(*jet, legendre(l, 0.37));
        }
    }

    #[test]
    fn gauss_rules() {
        let r1 = gauss_legendre(1);
        assert_eq!(r1.points, vec![0.0]);
        assert_abs_diff_eq!(r1.weights[0], 2.0, epsilon = 1e-15);
        let r2 = gauss_legendre(2);
        let s = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(r2.points[0], -s, epsilon = 1e-15);
        assert_abs_diff_eq!(r2.points[1], s, epsilon = 1e-15);
        assert_abs_diff_eq!(r2.weights[0], 1.0, epsilon = 1e-15);
        let r5 = gauss_legendre(5);
        assert_abs_diff_eq!(r5.integrate(|x| x.powi(9)), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn lobatto_nodes() {
        assert_eq!(gauss_lobatto_nodes(1), vec![-1.0, 1.0]);
        assert_eq!(gauss_lobatto_nodes(2), vec![-1.0, 0.0, 1.0]);
        let z = gauss_lobatto_nodes(3);
        let s = 1.0 / 5f64.sqrt();
        assert_abs_diff_eq!(z[1], -s, epsilon = 1e-15);
        assert_abs_diff_eq!(z[2], s, epsilon = 1e-15);
        for k in 2..10 {
            let z = gauss_lobatto_nodes(k);
            for s in 1..k {
                assert!(legendre(k, z[s])[1].abs() < 1e-11 * (k * k) as f64);
                assert!(z[s] > z[s - 1]);
            }
        }
    }
}
