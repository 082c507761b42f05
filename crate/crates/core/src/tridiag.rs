//! Thomas algorithm with a reusable forward factorisation.

/// Factorised tridiagonal matrix `tridiag(sub, diag, sup)`.
///
/// `sub[0]` and `sup[n-1]` are ignored. The matrix must be diagonally
/// dominant (or otherwise safe for elimination without pivoting).
#[derive(Debug, Clone)]
pub(crate) struct Tridiagonal {
    sub: Vec<f64>,
    c_prime: Vec<f64>,
    denom: Vec<f64>,
}

impl Tridiagonal {
    pub(crate) fn factor(sub: &[f64], diag: &[f64], sup: &[f64]) -> Self {
        let n = diag.len();
        assert!(n > 0 && sub.len() == n && sup.len() == n);
        let mut c_prime = vec![0.0; n];
        let mut denom = vec![0.0; n];
        denom[0] = diag[0];
        c_prime[0] = sup[0] / denom[0];
        for i in 1..n {
            denom[i] = diag[i] - sub[i] * c_prime[i - 1];
            c_prime[i] = if i + 1 < n { sup[i] / denom[i] } else { 0.0 };
        }
        Self { sub: sub.to_vec(), c_prime, denom }
    }

    /// Solves in place: `rhs` is overwritten with the solution.
    pub(crate) fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.denom.len();
        assert_eq!(rhs.len(), n);
        rhs[0] /= self.denom[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.sub[i] * rhs[i - 1]) / self.denom[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.c_prime[i] * rhs[i + 1];
        }
    }
}
