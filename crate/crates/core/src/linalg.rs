//! Dense complex linear algebra for small fiber matrices.
//!
//! Everything here targets N <= 64 Hermitian/unitary matrices, so a cyclic
//! Jacobi eigensolver is both adequate and fully deterministic. Matrix
//! functions (exp of Hermitian generators, inverse square roots, polar
//! factors) are all routed through the same eigensolver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Frobenius norm. Used for all residual diagnostics; it upper-bounds the
/// spectral norm, so thresholds checked against it are conservative.
pub fn fro_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry modulus of the difference.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// ||M - M^*||_F, zero iff Hermitian.
pub fn hermiticity_residual(m: &CMat) -> f64 {
    fro_norm(&(m - m.adjoint()))
}

/// ||M^* M - 1||_F, zero iff unitary.
pub fn unitarity_residual(m: &CMat) -> f64 {
    let n = m.nrows();
    fro_norm(&(m.adjoint() * m - CMat::identity(n, n)))
}

/// Entry-wise complex conjugate (no transpose).
pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

const MAX_JACOBI_SWEEPS: usize = 60;

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the unitary matrix of
/// eigenvectors as columns, `A = V diag(w) V^*`. The output is made
/// deterministic by fixing each eigenvector's global phase so that its
/// largest-modulus component is real positive (ties broken by lowest index).
pub fn herm_eigen(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "herm_eigen needs a square matrix");
    let mut m = a.clone();
    let mut v = CMat::identity(n, n);
    let scale = fro_norm(&m).max(1.0);
    let tol = 1e-15 * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diag_norm(&m);
        if off <= tol {
            break;
        }
        if sweeps >= MAX_JACOBI_SWEEPS {
            return Err(Error::EigenConvergence {
                sweeps,
                off_norm: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let vals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &v.column(src));
    }
    fix_column_phases(&mut vecs);
    Ok((vals, vecs))
}

fn off_diag_norm(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One two-sided Jacobi rotation zeroing the (p, q) entry of the Hermitian
/// working matrix, accumulated into `v`.
fn jacobi_rotate(m: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r < 1e-300 {
        return;
    }
    let phase = apq / r; // e^{i phi}
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Absorb the phase so the 2x2 block becomes real symmetric, then apply
    // the classic symmetric Jacobi rotation.
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // R restricted to (p, q): [[c*phase, -s*phase], [s, c]].
    let rpp = phase * c;
    let rpq = -phase * s;
    let rqp = Complex64::new(s, 0.0);
    let rqq = Complex64::new(c, 0.0);

    let n = m.nrows();
    // M <- R^* M R: first columns (M R), then rows (R^* M).
    for i in 0..n {
        let mip = m[(i, p)];
        let miq = m[(i, q)];
        m[(i, p)] = mip * rpp + miq * rqp;
        m[(i, q)] = mip * rpq + miq * rqq;
    }
    for j in 0..n {
        let mpj = m[(p, j)];
        let mqj = m[(q, j)];
        m[(p, j)] = rpp.conj() * mpj + rqp.conj() * mqj;
        m[(q, j)] = rpq.conj() * mpj + rqq.conj() * mqj;
    }
    // Clean up round-off: the pivot is zero by construction and the diagonal
    // of a Hermitian matrix is real.
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * rpp + viq * rqp;
        v[(i, q)] = vip * rpq + viq * rqq;
    }
}

/// Rotate each column's global phase so its largest-modulus component is
/// real positive; ties in modulus break toward the lowest index.
pub fn fix_column_phases(v: &mut CMat) {
    let (n, cols) = v.shape();
    for j in 0..cols {
        let mut best = 0;
        let mut best_mod = -1.0;
        for i in 0..n {
            let m = v[(i, j)].norm();
            if m > best_mod + 1e-14 {
                best_mod = m;
                best = i;
            }
        }
        let z = v[(best, j)];
        if z.norm() > 0.0 {
            let ph = z.conj() / z.norm();
            for i in 0..n {
                v[(i, j)] *= ph;
            }
            // Kill the residual imaginary part introduced by rounding.
            v[(best, j)] = Complex64::new(v[(best, j)].re, 0.0);
        }
    }
}

/// Eigendecomposition of a Hermitian matrix, packaged for reuse.
pub struct HermEigen {
    pub vals: Vec<f64>,
    pub vecs: CMat,
}

impl HermEigen {
    pub fn new(a: &CMat) -> Result<Self> {
        let (vals, vecs) = herm_eigen(a)?;
        Ok(Self { vals, vecs })
    }

    /// f(A) = V diag(f(w)) V^* for a scalar function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> CMat {
        let n = self.vals.len();
        let mut d = CMat::zeros(n, n);
        for i in 0..n {
            d[(i, i)] = f(self.vals[i]);
        }
        &self.vecs * d * self.vecs.adjoint()
    }

    /// exp(i s A).
    pub fn exp_i_scaled(&self, s: f64) -> CMat {
        self.apply(|w| Complex64::from_polar(1.0, s * w))
    }
}

/// Eigendecomposition of a unitary matrix via its commuting Hermitian and
/// skew-Hermitian parts.
///
/// `A = (U + U^*)/2` and `B = (U - U^*)/(2i)` commute for unitary `U`;
/// eigenvectors of `A` are refined inside near-degenerate clusters by
/// diagonalizing `B` restricted there. Returns unimodular eigenvalues and a
/// unitary eigenbasis, unsorted; callers impose their own ordering.
pub fn unitary_eigen(u: &CMat) -> Result<(Vec<Complex64>, CMat)> {
    let n = u.nrows();
    let a = (u + u.adjoint()).map(|z| z * 0.5);
    let b = (u - u.adjoint()).map(|z| z * Complex64::new(0.0, -0.5));

    let (avals, mut v) = herm_eigen(&a)?;

    // Cluster nearly equal cosines; sines split phases +phi / -phi.
    let cluster_tol = 1e-8 * fro_norm(u).max(1.0);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (avals[end] - avals[end - 1]).abs() <= cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            let vc = v.columns(start, end - start).clone_owned();
            let b_sub = vc.adjoint() * &b * &vc;
            let (_, w) = herm_eigen(&b_sub)?;
            let rotated = vc * w;
            for (offset, col) in (start..end).enumerate() {
                v.set_column(col, &rotated.column(offset));
            }
        }
        start = end;
    }
    fix_column_phases(&mut v);

    // Rayleigh quotients give the eigenvalues to full accuracy.
    let vals: Vec<Complex64> = (0..n)
        .map(|j| {
            let col = v.column(j);
            (col.adjoint() * u * col)[(0, 0)]
        })
        .collect();
    Ok((vals, v))
}

/// Nearest unitary matrix (polar factor), computed as `T (T^* T)^{-1/2}`.
pub fn polar_unitary(t: &CMat) -> Result<CMat> {
    let s = t.adjoint() * t;
    let eig = HermEigen::new(&s)?;
    let inv_sqrt = eig.apply(|w| Complex64::new(1.0 / w.max(1e-300).sqrt(), 0.0));
    Ok(t * inv_sqrt)
}

/// Inverse of a square complex matrix via LU.
pub fn inverse(m: &CMat) -> Option<CMat> {
    m.clone().try_inverse()
}

/// Determinant via LU.
pub fn determinant(m: &CMat) -> Complex64 {
    m.clone().lu().determinant()
}

/// Build a DMatrix from rows of complex entries (test and model plumbing).
pub fn mat_from_rows(rows: &[Vec<Complex64>]) -> CMat {
    let nr = rows.len();
    let nc = if nr > 0 { rows[0].len() } else { 0 };
    CMat::from_fn(nr, nc, |i, j| rows[i][j])
}
