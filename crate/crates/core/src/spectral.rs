//! Hermitian eigendecomposition of fibers, gap certification, spectral
//! projections (eigen route plus an independent Riesz contour route),
//! projector derivatives, and the Kato-Nagy intertwining unitary.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, HermEigen, ONE, ZERO};
use crate::model::{FiberSample, TightBindingModel};
use crate::{GAP_THRESHOLD, STRUCTURAL_TOL};

/// Eigendecomposition of one fiber, eigenvalues ascending, eigenvectors as
/// orthonormal columns with deterministic phases.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub k: f64,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

/// Certified zero-centered spectral gap over a sampling grid.
#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    /// Half-width of the certified gap: min over the grid of min_i |E_i(k)|.
    pub g: f64,
    pub min_abs_eigenvalue: f64,
    /// Momentum achieving the minimum.
    pub argmin_k: f64,
    /// -2r with r the Riesz radius (max sampled spectral radius plus one).
    pub lower_bound: f64,
    pub grid_size: usize,
}

/// Diagonalize one fiber sample.
pub fn eigensystem(fiber: &FiberSample) -> Result<EigenSystem> {
    let (eigenvalues, eigenvectors) = linalg::herm_eigen(&fiber.h)?;
    Ok(EigenSystem {
        k: fiber.k,
        eigenvalues,
        eigenvectors,
    })
}

/// Certify the spectral gap of a model over a uniform k-grid. Fails with
/// `NotAnInsulator` when the smallest |eigenvalue| drops below the gap
/// threshold.
pub fn certify_gap(model: &TightBindingModel, grid_size: usize) -> Result<GapReport> {
    if grid_size < 4 {
        return Err(Error::GridSize {
            got: grid_size,
            reason: "gap certification needs at least 4 samples",
        });
    }
    let mut g = f64::INFINITY;
    let mut argmin_k = 0.0;
    let mut radius: f64 = 0.0;
    for j in 0..grid_size {
        let k = TAU * (j as f64) / (grid_size as f64);
        let es = eigensystem(&model.fiber(k))?;
        for &e in &es.eigenvalues {
            radius = radius.max(e.abs());
            if e.abs() < g {
                g = e.abs();
                argmin_k = k;
            }
        }
    }
    let r = radius + 1.0;
    if g < GAP_THRESHOLD {
        return Err(Error::NotAnInsulator {
            k: argmin_k,
            min_abs: g,
        });
    }
    Ok(GapReport {
        g,
        min_abs_eigenvalue: g,
        argmin_k,
        lower_bound: -2.0 * r,
        grid_size,
    })
}

/// Negative- and positive-energy spectral projections from an
/// eigendecomposition: P- = sum_{E_i < 0} v_i v_i^*, P+ = 1 - P-.
/// Eigenvalues inside the ambiguity band `gap_floor` are rejected.
pub fn projector_eigen(es: &EigenSystem, gap_floor: f64) -> Result<(CMat, CMat)> {
    let n = es.eigenvalues.len();
    let mut p_minus = CMat::zeros(n, n);
    for (i, &e) in es.eigenvalues.iter().enumerate() {
        if e.abs() < gap_floor {
            return Err(Error::AmbiguousProjection {
                k: es.k,
                eigenvalue: e,
            });
        }
        if e < 0.0 {
            let v = es.eigenvectors.column(i);
            p_minus += &v * v.adjoint();
        }
    }
    let p_plus = CMat::identity(n, n) - &p_minus;
    Ok((p_minus, p_plus))
}

/// Negative-energy projection by the Riesz contour integral
/// `(2 pi i)^{-1} \oint (z - H)^{-1} dz` over the circle of radius r
/// centered at -r, discretized by the trapezoid rule. Used solely as an
/// independent oracle for `projector_eigen`.
pub fn projector_riesz(fiber: &FiberSample, r: f64, quad_points: usize) -> Result<CMat> {
    if quad_points < 32 {
        return Err(Error::InvalidQuadrature {
            points: quad_points,
        });
    }
    let n = fiber.h.nrows();
    let id = CMat::identity(n, n);
    let mut acc = CMat::zeros(n, n);
    // dz = i r e^{i theta} d theta, so (2 pi i)^{-1} \oint f dz reduces to
    // (r / Q) sum_j e^{i theta_j} f(z_j).
    for j in 0..quad_points {
        let theta = TAU * (j as f64) / (quad_points as f64);
        let z = Complex64::new(-r, 0.0) + Complex64::from_polar(r, theta);
        let shifted = id.map(|e| e * z) - &fiber.h;
        let resolvent = linalg::inverse(&shifted)
            .ok_or(Error::ContourNearSingular { theta })?;
        // A resolvent norm this large means an eigenvalue sits essentially
        // on the contour.
        if linalg::fro_norm(&resolvent) > 1e12 {
            return Err(Error::ContourNearSingular { theta });
        }
        acc += resolvent.map(|e| e * Complex64::from_polar(1.0, theta));
    }
    Ok(acc.map(|e| e * Complex64::new(r / quad_points as f64, 0.0)))
}

/// Analytic derivative of the spectral projection from first-order
/// perturbation of the Riesz integral:
/// dP = sum_{E_a<0} sum_{E_b>0} v_b (v_b^* dH v_a) v_a^* / (E_a - E_b) + h.c.
pub fn projector_derivative(es: &EigenSystem, dh: &CMat) -> CMat {
    let n = es.eigenvalues.len();
    let mut dp = CMat::zeros(n, n);
    for (a, &ea) in es.eigenvalues.iter().enumerate() {
        if ea >= 0.0 {
            continue;
        }
        let va = es.eigenvectors.column(a);
        for (b, &eb) in es.eigenvalues.iter().enumerate() {
            if eb <= 0.0 {
                continue;
            }
            let vb = es.eigenvectors.column(b);
            let amp = (vb.adjoint() * dh * va)[(0, 0)] / Complex64::new(ea - eb, 0.0);
            let term = (&vb * va.adjoint()).map(|e| e * amp);
            dp += &term + term.adjoint();
        }
    }
    dp
}

/// Kato-Nagy unitary intertwining two orthogonal projections at distance
/// less than one: `U = [1 - (P - Q)^2]^{-1/2} [P Q + (1 - P)(1 - Q)]`,
/// satisfying `P U = U Q`.
pub fn kato_nagy(p: &CMat, q: &CMat) -> Result<CMat> {
    let n = p.nrows();
    let d = p - q;
    // P - Q is Hermitian; its spectral norm is the projector distance.
    let (dvals, _) = linalg::herm_eigen(&d)?;
    let distance = dvals.iter().fold(0.0f64, |m, &w| m.max(w.abs()));
    if distance >= 1.0 {
        return Err(Error::ProjectorDistance { distance });
    }
    let id = CMat::identity(n, n);
    let m = &id - &d * &d;
    let inv_sqrt = HermEigen::new(&m)?.apply(|w| Complex64::new(1.0 / w.max(1e-300).sqrt(), 0.0));
    let mix = p * q + (&id - p) * (&id - q);
    Ok(inv_sqrt * mix)
}

/// Spectral projections P-(k), their derivatives, and midpoint samples over
/// a uniform grid of `grid_size` steps on [0, 2pi]. The public grid carries
/// `grid_size + 1` samples with the endpoint duplicated; midpoints back the
/// transport integrator.
#[derive(Debug, Clone)]
pub struct ProjectionFamily {
    pub grid: Vec<f64>,
    pub p: Vec<CMat>,
    pub dp: Vec<CMat>,
    /// Rank of P-(k), constant over the grid.
    pub m: usize,
    pub gap: GapReport,
    pub(crate) mid_p: Vec<CMat>,
    pub(crate) mid_dp: Vec<CMat>,
}

impl ProjectionFamily {
    /// Sample projections and derivatives over the grid. The gap is
    /// certified on the same grid first.
    pub fn sample(model: &TightBindingModel, grid_size: usize) -> Result<Self> {
        if grid_size < 8 || grid_size % 2 != 0 {
            return Err(Error::GridSize {
                got: grid_size,
                reason: "projection sampling needs an even grid of at least 8 steps",
            });
        }
        let gap = certify_gap(model, grid_size)?;
        let floor = GAP_THRESHOLD.min(gap.g * 0.5);

        let sample_at = |k: f64| -> Result<(CMat, CMat)> {
            let fiber = model.fiber(k);
            let es = eigensystem(&fiber)?;
            let (p, _) = projector_eigen(&es, floor)?;
            let dp = projector_derivative(&es, &fiber.dh);
            Ok((p, dp))
        };

        let h = TAU / grid_size as f64;
        let nodes: Result<Vec<(CMat, CMat)>> = (0..=grid_size)
            .into_par_iter()
            .map(|j| sample_at(h * j as f64))
            .collect();
        let nodes = nodes?;
        let mids: Result<Vec<(CMat, CMat)>> = (0..grid_size)
            .into_par_iter()
            .map(|j| sample_at(h * (j as f64 + 0.5)))
            .collect();
        let mids = mids?;

        let grid: Vec<f64> = (0..=grid_size).map(|j| h * j as f64).collect();
        let m = nodes[0].0.diagonal().sum().re.round() as usize;
        let (p, dp): (Vec<CMat>, Vec<CMat>) = nodes.into_iter().unzip();
        let (mid_p, mid_dp): (Vec<CMat>, Vec<CMat>) = mids.into_iter().unzip();
        Ok(Self {
            grid,
            p,
            dp,
            m,
            gap,
            mid_p,
            mid_dp,
        })
    }

    pub fn grid_size(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.p[0].nrows()
    }

    /// Largest violation of the projection structure over the grid:
    /// hermiticity, idempotency, rank constancy, endpoint closure.
    pub fn structure_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for p in &self.p {
            worst = worst.max(linalg::hermiticity_residual(p));
            worst = worst.max(linalg::fro_norm(&(p * p - p)));
            worst = worst.max((p.diagonal().sum().re - self.m as f64).abs());
        }
        worst.max(linalg::max_abs_diff(&self.p[0], &self.p[self.grid.len() - 1]))
    }
}
