//! Householder QR factorization for tall dense matrices.
//!
//! The factored matrix keeps the Householder vectors on and below the
//! diagonal and the strict upper triangle of `R` above it; the diagonal of
//! `R` lives in `r_diag`.

#[derive(Debug, Clone)]
pub(crate) struct HouseholderQr {
    /// Row-major `m x n` working matrix.
    qr: Vec<f64>,
    r_diag: Vec<f64>,
    m: usize,
    n: usize,
}

impl HouseholderQr {
    /// Factors a row-major `m x n` matrix with `m >= n`.
    pub(crate) fn new(data: &[f64], m: usize, n: usize) -> Self {
        assert!(m >= n, "QR requires at least as many rows as columns");
        assert_eq!(data.len(), m * n);
        let mut qr = data.to_vec();
        let mut r_diag = vec![0.0; n];

        for k in 0..n {
            let norm = (k..m)
                .map(|i| qr[i * n + k] * qr[i * n + k])
                .sum::<f64>()
                .sqrt();
            if norm == 0.0 {
                // Column already zero below the diagonal: identity reflector.
                r_diag[k] = 0.0;
                continue;
            }
            let x0 = qr[k * n + k];
            let alpha = if x0 > 0.0 { -norm } else { norm };
            // v = x - alpha e_k, stored in place.
            qr[k * n + k] = x0 - alpha;
            let vtv: f64 = (k..m).map(|i| qr[i * n + k] * qr[i * n + k]).sum();
            for j in (k + 1)..n {
                let dot: f64 = (k..m).map(|i| qr[i * n + k] * qr[i * n + j]).sum();
                let s = 2.0 * dot / vtv;
                for i in k..m {
                    qr[i * n + j] -= s * qr[i * n + k];
                }
            }
            r_diag[k] = alpha;
        }

        Self { qr, r_diag, m, n }
    }

    pub(crate) fn r_diag(&self) -> &[f64] {
        &self.r_diag
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.r_diag[i]
        } else {
            self.qr[i * self.n + j]
        }
    }

    /// Replaces `y` with `Qᵀ y`.
    pub(crate) fn apply_qt(&self, y: &mut [f64]) {
        let (m, n) = (self.m, self.n);
        assert_eq!(y.len(), m);
        for k in 0..n {
            let vtv: f64 = (k..m)
                .map(|i| self.qr[i * n + k] * self.qr[i * n + k])
                .sum();
            if vtv == 0.0 {
                continue;
            }
            let dot: f64 = (k..m).map(|i| self.qr[i * n + k] * y[i]).sum();
            let s = 2.0 * dot / vtv;
            for (i, yi) in y.iter_mut().enumerate().skip(k) {
                *yi -= s * self.qr[i * n + k];
            }
        }
    }

    /// Least-squares solution of `A x ≈ y`. Assumes `R` is nonsingular.
    pub(crate) fn solve(&self, y: &[f64]) -> Vec<f64> {
        let mut qty = y.to_vec();
        self.apply_qt(&mut qty);
        let n = self.n;
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = qty[i];
            for (j, xj) in x.iter().enumerate().skip(i + 1) {
                s -= self.r(i, j) * xj;
            }
            x[i] = s / self.r_diag[i];
        }
        x
    }

    /// `R⁻¹`, row-major `n x n` upper triangular.
    pub(crate) fn r_inverse(&self) -> Vec<f64> {
        let n = self.n;
        let mut inv = vec![0.0; n * n];
        for col in 0..n {
            // Solve R z = e_col by back substitution; z is zero below `col`.
            for i in (0..=col).rev() {
                let mut s = if i == col { 1.0 } else { 0.0 };
                for j in (i + 1)..=col {
                    s -= self.r(i, j) * inv[j * n + col];
                }
                inv[i * n + col] = s / self.r_diag[i];
            }
        }
        inv
    }

    /// `(AᵀA)⁻¹ = R⁻¹ R⁻ᵀ`, row-major `n x n`.
    pub(crate) fn gram_inverse(&self) -> Vec<f64> {
        let n = self.n;
        let ri = self.r_inverse();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                // Row i of R⁻¹ is zero before column i.
                let s: f64 = (j..n).map(|k| ri[i * n + k] * ri[j * n + k]).sum();
                out[i * n + j] = s;
                out[j * n + i] = s;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_square_system() {
        // [2 1; 1 3] x = [3; 5]  ->  x = [0.8, 1.4]
        let qr = HouseholderQr::new(&[2.0, 1.0, 1.0, 3.0], 2, 2);
        let x = qr.solve(&[3.0, 5.0]);
        assert!((x[0] - 0.8).abs() < 1e-14);
        assert!((x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn line_fit() {
        // y = 1 + 2 t exactly
        let t = [0.0, 1.0, 2.0, 3.0];
        let a: Vec<f64> = t.iter().flat_map(|&ti| [1.0, ti]).collect();
        let y: Vec<f64> = t.iter().map(|ti| 1.0 + 2.0 * ti).collect();
        let x = HouseholderQr::new(&a, 4, 2).solve(&y);
        assert!((x[0] - 1.0).abs() < 1e-13 && (x[1] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn gram_inverse_matches_closed_form() {
        // AᵀA = [3 3; 3 5], inverse = [5 -3; -3 3] / 6
        let a = [1.0, 0.0, 1.0, 1.0, 1.0, 2.0];
        let g = HouseholderQr::new(&a, 3, 2).gram_inverse();
        let expect = [5.0 / 6.0, -0.5, -0.5, 0.5];
        for (got, want) in g.iter().zip(expect) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
    }

    #[test]
    fn zero_column_gives_zero_diagonal() {
        let a = [1.0, 0.0, 2.0, 0.0, 3.0, 0.0];
        let qr = HouseholderQr::new(&a, 3, 2);
        assert_eq!(qr.r_diag()[1].abs(), 0.0);
    }
}
