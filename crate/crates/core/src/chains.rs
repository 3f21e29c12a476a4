//! Built-in SSH and Kitaev chain constructors with closed-form band, gap,
//! and invariant oracles.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{mat_from_rows, CMat, ZERO};
use crate::model::{SymmetryDescriptor, SymmetryKind, TightBindingModel};

/// Sweep points closer than this to a gapless set are skipped: conditioning
/// blows up near gap closure and the invariant is undefined there.
pub const GAPLESS_MARGIN: f64 = 0.05;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// SSH chain: A0 = [[0, delta], [delta, 0]], A1 = [[0, 0], [1, 0]], chiral
/// symmetry S = diag(1, -1). Gapped iff delta is not in {-1, 1}.
pub fn ssh_model(delta: f64) -> TightBindingModel {
    let a0 = mat_from_rows(&[vec![ZERO, re(delta)], vec![re(delta), ZERO]]);
    let a1 = mat_from_rows(&[vec![ZERO, ZERO], vec![re(1.0), ZERO]]);
    let s = mat_from_rows(&[vec![re(1.0), ZERO], vec![ZERO, re(-1.0)]]);
    let sym = SymmetryDescriptor::new(SymmetryKind::Chiral, s).expect("sigma_3 is unitary");
    TightBindingModel::new(vec![a0, a1], Some(sym)).expect("SSH model is well-formed")
}

/// Kitaev chain: A0 = [[0, mu], [mu, 0]], A1 = [[0, 1+delta], [1-delta, 0]],
/// particle-hole symmetry C (x, y) -> (conj x, -conj y). Gapped iff
/// (mu, delta) avoids { |mu| < 2, delta = 0 } and { |mu| = 2 }.
pub fn kitaev_model(mu: f64, delta: f64) -> TightBindingModel {
    let a0 = mat_from_rows(&[vec![ZERO, re(mu)], vec![re(mu), ZERO]]);
    let a1 = mat_from_rows(&[vec![ZERO, re(1.0 + delta)], vec![re(1.0 - delta), ZERO]]);
    let c = mat_from_rows(&[vec![re(1.0), ZERO], vec![ZERO, re(-1.0)]]);
    let sym = SymmetryDescriptor::new(SymmetryKind::ParticleHole, c).expect("C is unitary");
    TightBindingModel::new(vec![a0, a1], Some(sym)).expect("Kitaev model is well-formed")
}

/// Positive SSH band: sqrt((delta + cos k)^2 + sin^2 k).
pub fn ssh_band(delta: f64, k: f64) -> f64 {
    ((delta + k.cos()).powi(2) + k.sin().powi(2)).sqrt()
}

/// Positive Kitaev band: sqrt((mu + 2 cos k)^2 + (2 delta sin k)^2).
pub fn kitaev_band(mu: f64, delta: f64, k: f64) -> f64 {
    ((mu + 2.0 * k.cos()).powi(2) + (2.0 * delta * k.sin()).powi(2)).sqrt()
}

/// Distance of delta from the SSH gapless set {-1, +1}.
pub fn ssh_gap_margin(delta: f64) -> f64 {
    (delta.abs() - 1.0).abs()
}

/// Distance of (mu, delta) from the Kitaev gapless set
/// eta = { |mu| < 2, delta = 0 } union { |mu| = 2 }.
pub fn kitaev_gap_margin(mu: f64, delta: f64) -> f64 {
    let to_lines = (mu.abs() - 2.0).abs();
    let to_segment = if mu.abs() <= 2.0 {
        delta.abs()
    } else {
        ((mu.abs() - 2.0).powi(2) + delta * delta).sqrt()
    };
    to_lines.min(to_segment)
}

/// Closed-form SSH invariant: 1 iff delta in (-1, 1). Rejects gapless
/// parameters.
pub fn ssh_invariant_oracle(delta: f64) -> Result<u8> {
    if ssh_gap_margin(delta) < 1e-12 {
        return Err(Error::GaplessParameters(format!("SSH delta = {delta}")));
    }
    Ok(if delta.abs() < 1.0 { 1 } else { 0 })
}

/// Closed-form Kitaev invariant: 1 iff |mu| < 2 and delta != 0. Rejects
/// gapless parameters.
pub fn kitaev_invariant_oracle(mu: f64, delta: f64) -> Result<u8> {
    if kitaev_gap_margin(mu, delta) < 1e-12 {
        return Err(Error::GaplessParameters(format!(
            "Kitaev mu = {mu}, delta = {delta}"
        )));
    }
    Ok(if mu.abs() < 2.0 && delta != 0.0 { 1 } else { 0 })
}
