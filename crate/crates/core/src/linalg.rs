//! Minimal dense helpers: Cholesky solves of small SPD systems and
//! polynomial least squares on a fixed grid. Polynomials are always fitted
//! in a coordinate scaled to [-1, 1] to keep the normal equations
//! well-conditioned.

/// Cholesky factor (lower triangular, row-major) of a small SPD matrix.
/// `None` when a pivot is not strictly positive (rank deficiency).
pub(crate) fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(sum > 0.0) {
                    return None;
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Some(l)
}

/// Solve `L L^T x = b` given the Cholesky factor.
pub(crate) fn solve_cholesky(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    x
}

/// Horner evaluation of `c[0] + c[1] x + ... + c[d] x^d`.
pub(crate) fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Least-squares polynomial fitting on a fixed grid of scaled abscissae.
/// The normal matrix is factored once, so repeated fits over the same grid
/// (the detrending inner loop) cost one pass per window.
pub(crate) struct PolyBasis {
    xs: Vec<f64>,
    chol: Vec<Vec<f64>>,
    degree: usize,
}

impl PolyBasis {
    /// `xs` must already be scaled into [-1, 1]. `None` when the design is
    /// rank-deficient (fewer distinct points than coefficients).
    pub fn new(xs: Vec<f64>, degree: usize) -> Option<Self> {
        let p = degree + 1;
        if xs.len() < p {
            return None;
        }
        let mut ata = vec![vec![0.0; p]; p];
        for &x in &xs {
            let mut pow = vec![0.0; p];
            let mut v = 1.0;
            for item in pow.iter_mut() {
                *item = v;
                v *= x;
            }
            for i in 0..p {
                for j in 0..=i {
                    ata[i][j] += pow[i] * pow[j];
                }
            }
        }
        for i in 0..p {
            for j in (i + 1)..p {
                ata[i][j] = ata[j][i];
            }
        }
        let chol = cholesky(&ata)?;
        Some(PolyBasis { xs, chol, degree })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    /// Coefficients of the least-squares polynomial through `(xs, ys)`.
    pub fn fit(&self, ys: &[f64]) -> Vec<f64> {
        let p = self.degree + 1;
        let mut aty = vec![0.0; p];
        for (&x, &y) in self.xs.iter().zip(ys) {
            let mut v = 1.0;
            for item in aty.iter_mut() {
                *item += v * y;
                v *= x;
            }
        }
        solve_cholesky(&self.chol, &aty)
    }

    /// Fitted value at grid point `i`.
    pub fn eval_at(&self, coeffs: &[f64], i: usize) -> f64 {
        eval_poly(coeffs, self.xs[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        let a = vec![vec![4.0, 2.0], vec![2.0, 3.0]];
        let l = cholesky(&a).unwrap();
        let x = solve_cholesky(&l, &[10.0, 8.0]);
        assert!((4.0 * x[0] + 2.0 * x[1] - 10.0).abs() < 1e-12);
        assert!((2.0 * x[0] + 3.0 * x[1] - 8.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(cholesky(&a).is_none());
    }

    #[test]
    fn polyfit_recovers_exact_polynomial() {
        let xs: Vec<f64> = (0..50).map(|i| -1.0 + 2.0 * i as f64 / 49.0).collect();
        let truth = [1.0, -2.0, 0.5, 3.0];
        let ys: Vec<f64> = xs.iter().map(|&x| eval_poly(&truth, x)).collect();
        let basis = PolyBasis::new(xs, 3).unwrap();
        let coeffs = basis.fit(&ys);
        for (c, t) in coeffs.iter().zip(&truth) {
            assert!((c - t).abs() < 1e-10, "{c} vs {t}");
        }
        for i in 0..basis.len() {
            assert!((basis.eval_at(&coeffs, i) - ys[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn rank_deficiency_detected() {
        assert!(PolyBasis::new(vec![0.5, 0.5, 0.5], 2).is_none());
        assert!(PolyBasis::new(vec![0.1, 0.2], 2).is_none());
    }
}
