//! Finite-range translation-invariant Hamiltonians and their symmetry
//! descriptors.
//!
//! A model is the hopping list `[A_0, ..., A_R]` of N x N complex matrices
//! with `A_0` Hermitian; its Bloch fiber at momentum k is
//! `H(k) = A_0 + sum_j e^{-ijk} A_j + e^{ijk} A_j^*`, a Hermitian
//! trigonometric polynomial. Anti-unitary symmetries are stored as a unitary
//! part plus a conjugation flag, acting as `v -> U conj(v)`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::STRUCTURAL_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryKind {
    /// Unitary S with S H(k) = -H(k) S.
    Chiral,
    /// Anti-unitary C = U K with C H(-k) = -H(k) C.
    ParticleHole,
}

/// Chiral or particle-hole symmetry of a model. For the particle-hole case
/// only the unitary part is stored; application is `v -> matrix * conj(v)`.
#[derive(Debug, Clone)]
pub struct SymmetryDescriptor {
    pub kind: SymmetryKind,
    pub matrix: CMat,
}

impl SymmetryDescriptor {
    pub fn new(kind: SymmetryKind, matrix: CMat) -> Result<Self> {
        let residual = linalg::unitarity_residual(&matrix);
        if residual > STRUCTURAL_TOL {
            return Err(Error::NonUnitarySymmetry { residual });
        }
        Ok(Self { kind, matrix })
    }

    pub fn is_antiunitary(&self) -> bool {
        self.kind == SymmetryKind::ParticleHole
    }

    /// Apply the symmetry operator to a vector.
    pub fn apply_vec(&self, v: &CVec) -> CVec {
        match self.kind {
            SymmetryKind::Chiral => &self.matrix * v,
            SymmetryKind::ParticleHole => &self.matrix * v.map(|z| z.conj()),
        }
    }

    /// Unitary part of the operator composition `Sym . M` as a matrix acting
    /// before the (possible) conjugation: chiral `S M`, particle-hole
    /// `U conj(M)` (since U K M = U conj(M) K).
    pub fn compose_left(&self, m: &CMat) -> CMat {
        match self.kind {
            SymmetryKind::Chiral => &self.matrix * m,
            SymmetryKind::ParticleHole => &self.matrix * linalg::conj(m),
        }
    }

    /// Unitary part of `M . Sym`: chiral `M S`, particle-hole `M U`.
    pub fn compose_right(&self, m: &CMat) -> CMat {
        m * &self.matrix
    }
}

/// Fiber Hamiltonian and its k-derivative at one momentum.
#[derive(Debug, Clone)]
pub struct FiberSample {
    pub k: f64,
    pub h: CMat,
    pub dh: CMat,
}

/// Finite-range, translation-invariant tight-binding Hamiltonian.
#[derive(Debug, Clone)]
pub struct TightBindingModel {
    n: usize,
    range: usize,
    hoppings: Vec<CMat>,
    symmetry: Option<SymmetryDescriptor>,
}

impl TightBindingModel {
    /// Build and validate a model from its hopping list `[A_0, ..., A_R]`.
    pub fn new(hoppings: Vec<CMat>, symmetry: Option<SymmetryDescriptor>) -> Result<Self> {
        if hoppings.is_empty() {
            return Err(Error::EmptyHoppings);
        }
        let n = hoppings[0].nrows();
        for (j, a) in hoppings.iter().enumerate() {
            if a.nrows() != n || a.ncols() != n {
                return Err(Error::HoppingDimensionMismatch {
                    name: format!("A{j}"),
                    rows: a.nrows(),
                    cols: a.ncols(),
                    n,
                });
            }
        }
        let herm = linalg::hermiticity_residual(&hoppings[0]);
        if herm > STRUCTURAL_TOL {
            return Err(Error::NonHermitianA0 { residual: herm });
        }
        if let Some(sym) = &symmetry {
            if n % 2 != 0 {
                return Err(Error::OddDimensionWithSymmetry { n });
            }
            if sym.matrix.nrows() != n || sym.matrix.ncols() != n {
                return Err(Error::HoppingDimensionMismatch {
                    name: "symmetry".into(),
                    rows: sym.matrix.nrows(),
                    cols: sym.matrix.ncols(),
                    n,
                });
            }
        }
        Ok(Self {
            n,
            range: hoppings.len() - 1,
            hoppings,
            symmetry,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn hopping(&self, j: usize) -> &CMat {
        &self.hoppings[j]
    }

    pub fn symmetry(&self) -> Option<&SymmetryDescriptor> {
        self.symmetry.as_ref()
    }

    /// Momentum reduced to [0, 2pi) so that fiber evaluation is exactly
    /// periodic: `fiber(k)` and `fiber(k + 2pi)` share the same floats.
    pub fn reduce_k(k: f64) -> f64 {
        let r = k.rem_euclid(TAU);
        if r == TAU {
            0.0
        } else {
            r
        }
    }

    /// Evaluate the fiber Hamiltonian H(k) and its derivative H'(k).
    pub fn fiber(&self, k: f64) -> FiberSample {
        let k = Self::reduce_k(k);
        let mut h = self.hoppings[0].clone();
        let mut dh = CMat::zeros(self.n, self.n);
        for j in 1..=self.range {
            let jf = j as f64;
            let e_minus = Complex64::from_polar(1.0, -jf * k);
            let e_plus = Complex64::from_polar(1.0, jf * k);
            let aj = &self.hoppings[j];
            let aj_dag = aj.adjoint();
            h += aj.map(|z| z * e_minus) + aj_dag.map(|z| z * e_plus);
            let im_j = Complex64::new(0.0, jf);
            dh += aj.map(|z| z * (-im_j * e_minus)) + aj_dag.map(|z| z * (im_j * e_plus));
        }
        FiberSample { k, h, dh }
    }

    /// Max residual of the fiber anticommutation relation over a uniform
    /// k-grid: `S H(k) + H(k) S` for chiral symmetry,
    /// `C H(-k) + H(k) C` for particle-hole symmetry.
    pub fn validate_symmetry(&self, grid_size: usize) -> Result<SymmetryReport> {
        let sym = self.symmetry.as_ref().ok_or(Error::MissingSymmetry)?;
        let mut max_residual: f64 = 0.0;
        for j in 0..grid_size {
            let k = TAU * (j as f64) / (grid_size as f64);
            let h_k = self.fiber(k).h;
            let residual = match sym.kind {
                SymmetryKind::Chiral => {
                    linalg::fro_norm(&(sym.compose_left(&h_k) + sym.compose_right(&h_k)))
                }
                SymmetryKind::ParticleHole => {
                    let h_mk = self.fiber(-k).h;
                    linalg::fro_norm(&(sym.compose_left(&h_mk) + &h_k * &sym.matrix))
                }
            };
            max_residual = max_residual.max(residual);
        }
        Ok(SymmetryReport {
            kind: sym.kind,
            grid_size,
            max_residual,
            pass: max_residual <= STRUCTURAL_TOL,
        })
    }
}

/// Outcome of the symmetry anticommutation check.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub kind: SymmetryKind,
    pub grid_size: usize,
    pub max_residual: f64,
    pub pass: bool,
}

// ---------------------------------------------------------------------
// Model file parsing. Complex numbers are serialized as [re, im] pairs;
// matrices as rows of pairs; hoppings as an object with keys "A0".."AR".
// ---------------------------------------------------------------------

type MatrixDoc = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymmetryDoc {
    kind: SymmetryKind,
    matrix: MatrixDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "R")]
    r: usize,
    hoppings: BTreeMap<String, MatrixDoc>,
    symmetry: Option<SymmetryDoc>,
}

fn matrix_from_doc(doc: &MatrixDoc, name: &str, n: usize) -> Result<CMat> {
    let rows = doc.len();
    let cols = doc.first().map_or(0, |r| r.len());
    if doc.iter().any(|r| r.len() != cols) {
        return Err(Error::Schema(format!("{name}: ragged rows")));
    }
    if rows != n || cols != n {
        return Err(Error::HoppingDimensionMismatch {
            name: name.into(),
            rows,
            cols,
            n,
        });
    }
    Ok(CMat::from_fn(n, n, |i, j| {
        Complex64::new(doc[i][j][0], doc[i][j][1])
    }))
}

fn matrix_to_doc(m: &CMat) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Parse and validate a model document (JSON text).
pub fn parse_model(document: &str) -> Result<TightBindingModel> {
    let doc: ModelDoc = serde_json::from_str(document).map_err(|e| Error::Schema(e.to_string()))?;
    if doc.n == 0 {
        return Err(Error::Schema("N must be positive".into()));
    }
    let mut hoppings = Vec::with_capacity(doc.r + 1);
    for j in 0..=doc.r {
        let key = format!("A{j}");
        let m = doc
            .hoppings
            .get(&key)
            .ok_or_else(|| Error::Schema(format!("missing hopping {key}")))?;
        hoppings.push(matrix_from_doc(m, &key, doc.n)?);
    }
    if doc.hoppings.len() != doc.r + 1 {
        let extra: Vec<&String> = doc
            .hoppings
            .keys()
            .filter(|k| {
                k.strip_prefix('A')
                    .and_then(|s| s.parse::<usize>().ok())
                    .map_or(true, |j| j > doc.r)
            })
            .collect();
        return Err(Error::Schema(format!("unexpected hopping keys: {extra:?}")));
    }
    let symmetry = match doc.symmetry {
        None => None,
        Some(s) => {
            let m = matrix_from_doc(&s.matrix, "symmetry", doc.n)?;
            Some(SymmetryDescriptor::new(s.kind, m)?)
        }
    };
    TightBindingModel::new(hoppings, symmetry)
}

/// Serialize a model back to the document format (used by the CLI to route
/// built-in models through the same parse path as file inputs).
pub fn model_to_document(model: &TightBindingModel) -> String {
    let doc = ModelDoc {
        n: model.dim(),
        r: model.range(),
        hoppings: (0..=model.range())
            .map(|j| (format!("A{j}"), matrix_to_doc(model.hopping(j))))
            .collect(),
        symmetry: model.symmetry().map(|s| SymmetryDoc {
            kind: s.kind,
            matrix: matrix_to_doc(&s.matrix),
        }),
    };
    serde_json::to_string_pretty(&doc).expect("model document serialization")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains;
    use crate::linalg::{max_abs_diff, mat_from_rows, ONE, ZERO};
    use proptest::prelude::*;

    #[test]
    fn ssh_fiber_at_zero_is_pauli_x() {
        let model = chains::ssh_model(0.0);
        let f = model.fiber(0.0);
        let expect = mat_from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]);
        assert!(max_abs_diff(&f.h, &expect) < 1e-15);
    }

    #[test]
    fn fiber_is_exactly_periodic() {
        let model = chains::kitaev_model(0.7, -0.3);
        for &k in &[0.0, 1.234, 4.5, -2.2] {
            let a = model.fiber(k);
            let b = model.fiber(k + TAU);
            assert_eq!(a.h, b.h, "H(k) and H(k+2pi) must share the same floats");
            assert_eq!(a.dh, b.dh);
        }
    }

    #[test]
    fn kitaev_fiber_entry_at_quarter_turn() {
        // (1+delta) e^{-ik} + mu + (1-delta) e^{ik} at mu=1, delta=1/2,
        // k=pi/2 evaluates to 1 - i (checked by hand).
        let model = chains::kitaev_model(1.0, 0.5);
        let f = model.fiber(std::f64::consts::FRAC_PI_2);
        assert!((f.h[(0, 1)] - Complex64::new(1.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn derivative_matches_central_difference_with_quadratic_ratio() {
        let model = chains::kitaev_model(0.9, 0.4);
        let k = 1.1;
        let err = |h: f64| {
            let plus = model.fiber(k + h).h;
            let minus = model.fiber(k - h).h;
            let fd = (plus - minus).map(|z| z / Complex64::new(2.0 * h, 0.0));
            linalg::fro_norm(&(fd - &model.fiber(k).dh))
        };
        let e3 = err(1e-3);
        let e4 = err(1e-4);
        let ratio = e3 / e4;
        assert!(
            (80.0..=120.0).contains(&ratio),
            "O(h^2) ratio expected ~100, got {ratio}"
        );
    }

    #[test]
    fn ssh_symmetry_residual_is_zero_and_grid_independent() {
        let model = chains::ssh_model(0.5);
        let r16 = model.validate_symmetry(16).unwrap();
        let r64 = model.validate_symmetry(64).unwrap();
        assert!(r16.pass && r64.pass);
        assert!(r16.max_residual < 1e-14);
        assert!(r64.max_residual < 1e-14);
    }

    #[test]
    fn kitaev_symmetry_residual_is_zero() {
        let model = chains::kitaev_model(1.0, 0.5);
        let r = model.validate_symmetry(32).unwrap();
        assert!(r.pass, "residual {}", r.max_residual);
    }

    #[test]
    fn wrong_symmetry_matrix_fails_loudly() {
        // S = identity anticommutes with nothing: residual = 2 max ||H||.
        let hoppings = vec![
            mat_from_rows(&[vec![ZERO, Complex64::new(0.5, 0.0)], vec![
                Complex64::new(0.5, 0.0),
                ZERO,
            ]]),
            mat_from_rows(&[vec![ZERO, ZERO], vec![ONE, ZERO]]),
        ];
        let sym = SymmetryDescriptor::new(SymmetryKind::Chiral, CMat::identity(2, 2)).unwrap();
        let model = TightBindingModel::new(hoppings, Some(sym)).unwrap();
        let r = model.validate_symmetry(64).unwrap();
        assert!(!r.pass);
        // max ||S H + H S||_F = 2 max ||H||_F; at delta=0.5 the largest fiber
        // norm is sqrt(2) * 1.5.
        let expect = 2.0 * 2.0f64.sqrt() * 1.5;
        assert!((r.max_residual - expect).abs() < 1e-6);
    }

    #[test]
    fn parse_round_trips_builtin_models() {
        let model = chains::ssh_model(0.5);
        let doc = model_to_document(&model);
        let parsed = parse_model(&doc).unwrap();
        assert_eq!(parsed.dim(), 2);
        assert_eq!(parsed.range(), 1);
        assert!(max_abs_diff(parsed.hopping(1), model.hopping(1)) == 0.0);
        // A1 = [[0,0],[1,0]] per the SSH convention.
        assert_eq!(parsed.hopping(1)[(1, 0)], ONE);
        assert_eq!(parsed.hopping(1)[(0, 1)], ZERO);
    }

    #[test]
    fn parse_rejects_bad_documents() {
        // Missing hoppings entirely.
        let err = parse_model(r#"{"N": 2, "R": 0, "hoppings": {}, "symmetry": null}"#);
        assert!(matches!(err, Err(Error::Schema(_))));

        // Non-Hermitian A0 slightly above tolerance.
        let doc = r#"{
            "N": 2, "R": 0,
            "hoppings": {"A0": [[[0.0,0.0],[0.5,1e-6]],[[0.5,0.0],[0.0,0.0]]]},
            "symmetry": null
        }"#;
        assert!(matches!(parse_model(doc), Err(Error::NonHermitianA0 { .. })));

        // Odd dimension with a symmetry present.
        let doc = r#"{
            "N": 1, "R": 0,
            "hoppings": {"A0": [[[1.0,0.0]]]},
            "symmetry": {"kind": "chiral", "matrix": [[[1.0,0.0]]]}
        }"#;
        assert!(matches!(
            parse_model(doc),
            Err(Error::OddDimensionWithSymmetry { .. })
        ));

        // Non-unitary symmetry matrix.
        let doc = r#"{
            "N": 2, "R": 0,
            "hoppings": {"A0": [[[0.0,0.0],[0.5,0.0]],[[0.5,0.0],[0.0,0.0]]]},
            "symmetry": {"kind": "chiral",
                         "matrix": [[[2.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]}
        }"#;
        assert!(matches!(
            parse_model(doc),
            Err(Error::NonUnitarySymmetry { .. })
        ));
    }

    proptest! {
        /// Every validated model has Hermitian fibers at every k.
        #[test]
        fn fibers_are_hermitian(seed in 0u64..50, k in 0.0..TAU) {
            use rand::prelude::*;
            use rand_chacha::ChaCha8Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 2 + (seed as usize % 3);
            let a0g = CMat::from_fn(n, n, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let a0 = (&a0g + a0g.adjoint()).map(|z| z * 0.5);
            let a1 = CMat::from_fn(n, n, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let model = TightBindingModel::new(vec![a0, a1], None).unwrap();
            let f = model.fiber(k);
            prop_assert!(linalg::hermiticity_residual(&f.h) < 1e-12);
            // dH must be Hermitian as well: it is the derivative of a
            // Hermitian family.
            prop_assert!(linalg::hermiticity_residual(&f.dh) < 1e-12);
        }
    }
}
