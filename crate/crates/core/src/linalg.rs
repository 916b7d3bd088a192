//! Small dense/banded kernels used by the finite-difference oracle.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// Tridiagonal matrix stored by diagonals; `lower[i]` is entry `(i+1, i)` and
/// `upper[i]` is entry `(i, i+1)`.
#[derive(Debug, Clone)]
pub(crate) struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.upper[i] * x[i + 1];
            }
            out[i] = v;
        }
    }

    /// Gaussian elimination with partial pivoting; fill-in adds a second
    /// superdiagonal.
    pub fn factor(&self) -> Result<TridiagonalLu> {
        let n = self.len();
        let mut dl = self.lower.clone();
        let mut d = self.diag.clone();
        let mut du = self.upper.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swap = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if dl[i].abs() > d[i].abs() {
                swap[i] = true;
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
            } else {
                if d[i] == 0.0 {
                    return Err(Error::Linearization(format!("zero pivot at row {i}")));
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            return Err(Error::Linearization(format!("zero pivot at row {}", n - 1)));
        }
        Ok(TridiagonalLu { dl, d, du, du2, swap })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swap: Vec<bool>,
}

impl TridiagonalLu {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.dl[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                v -= self.du2[i] * b[i + 2];
            }
            b[i] = v / self.d[i];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Ritz pair from an Arnoldi run.
#[derive(Debug, Clone)]
pub(crate) struct Ritz {
    pub value: Complex<f64>,
    /// Real part of the Ritz vector (sufficient for real eigenvalues).
    pub vector: Vec<f64>,
}

/// Arnoldi with full (twice-applied) Gram-Schmidt on an operator of size
/// `dim`, returning the Ritz values of the Hessenberg projection and, for the
/// nearly real ones, their Ritz vectors.
pub(crate) fn arnoldi(
    dim: usize,
    krylov: usize,
    start: &[f64],
    mut apply: impl FnMut(&[f64], &mut [f64]),
) -> Result<Vec<Ritz>> {
    let m = krylov.min(dim);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut h = DMatrix::<f64>::zeros(m + 1, m);
    let nrm = norm(start);
    if !(nrm > 0.0 && nrm.is_finite()) {
        return Err(Error::Linearization("degenerate Arnoldi start vector".into()));
    }
    basis.push(start.iter().map(|v| v / nrm).collect());
    let mut w = vec![0.0; dim];
    let mut steps = m;
    for j in 0..m {
        apply(&basis[j], &mut w);
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Linearization("non-finite Krylov vector".into()));
        }
        for _ in 0..2 {
            for (i, b) in basis.iter().enumerate() {
                let c = dot(b, &w);
                h[(i, j)] += c;
                for (wk, bk) in w.iter_mut().zip(b) {
                    *wk -= c * bk;
                }
            }
        }
        let beta = norm(&w);
        h[(j + 1, j)] = beta;
        if beta < 1e-14 * h.column(j).norm().max(1.0) {
            steps = j + 1;
            break;
        }
        basis.push(w.iter().map(|v| v / beta).collect());
    }

    let hm = h.view((0, 0), (steps, steps)).into_owned();
    let values = hm.clone().complex_eigenvalues();
    let mut out = Vec::with_capacity(steps);
    for &theta in values.iter() {
        let vector = if theta.im.abs() <= 1e-8 * theta.norm() {
            let y = real_null_vector(&hm, theta.re);
            let mut v = vec![0.0; dim];
            for (k, yk) in y.iter().enumerate() {
                for (vi, bi) in v.iter_mut().zip(&basis[k]) {
                    *vi += yk * bi;
                }
            }
            v
        } else {
            Vec::new()
        };
        out.push(Ritz {
            value: theta,
            vector,
        });
    }
    Ok(out)
}

/// Approximate null vector of `H - theta I` by two steps of inverse iteration.
fn real_null_vector(hm: &DMatrix<f64>, theta: f64) -> Vec<f64> {
    let n = hm.nrows();
    let shift = theta + 1e-10 * theta.abs().max(1.0);
    let a = hm - DMatrix::<f64>::identity(n, n) * shift;
    let lu = a.lu();
    let mut y = nalgebra::DVector::<f64>::from_element(n, 1.0);
    for _ in 0..3 {
        match lu.solve(&y) {
            Some(next) => {
                let nn = next.norm();
                if !(nn > 0.0 && nn.is_finite()) {
                    break;
                }
                y = next / nn;
            }
            None => break,
        }
    }
    y.iter().copied().collect()
}

/// Eigenvalues of a dense square matrix.
pub(crate) fn dense_eigenvalues(a: DMatrix<f64>) -> Vec<Complex<f64>> {
    a.complex_eigenvalues().iter().copied().collect()
}
