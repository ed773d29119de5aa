//! Validated transforms: the invertible matrix that defines a tube product,
//! its row structure, and canonical representatives of each isomorphism
//! class.

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, RMatrix};

/// Default relative validation tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative threshold for detecting that the transform is a scalar multiple
/// of a unitary matrix. Gates the closed-form truncation error formulas.
const UNITARY_DETECT_TOL: f64 = 1e-8;

static NEXT_SPEC_ID: AtomicU64 = AtomicU64::new(1);

/// How one row of the transform keeps real tubes real: it is either real
/// itself, or the entrywise conjugate of exactly one other row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowClass {
    Real(usize),
    /// Indices of a conjugate pair, lower index first.
    ConjPair(usize, usize),
}

/// A validated invertible transform together with everything the ring
/// operations need: the cached inverse, the row classification, the realness
/// count, and an optional scaled-unitary factor.
///
/// Immutable after construction; operations taking `&TransformSpec` are pure
/// and safe to call from many threads.
#[derive(Clone, Debug)]
pub struct TransformSpec {
    id: u64,
    n: usize,
    matrix: CMatrix,
    inverse: CMatrix,
    row_classes: Vec<RowClass>,
    realness: usize,
    unitary_scale: Option<f64>,
    tol: f64,
    /// Row order placing real rows first and conjugate pairs adjacent; used
    /// by the canonical isomorphism. Public operations do not depend on it.
    canonical_order: Vec<usize>,
}

/// Check invertibility and the real/conjugate-pair row structure of `m`,
/// returning a spec ready for ring and tensor operations.
pub fn validate_transform(matrix: CMatrix, tol: f64) -> Result<TransformSpec> {
    assert!(tol > 0.0, "tolerance must be positive");
    if matrix.rows() != matrix.cols() || matrix.rows() == 0 {
        return Err(Error::BadDimension(format!(
            "transform must be square and nonempty, got {}x{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    let n = matrix.rows();
    let inverse = matrix.inverse()?;
    let id_residue = matrix.matmul(&inverse).sub(&CMatrix::eye(n)).max_abs();
    if id_residue > tol {
        return Err(Error::Singular);
    }

    let row_classes = classify_rows(&matrix, tol)?;
    let realness = row_classes
        .iter()
        .filter(|c| matches!(c, RowClass::Real(_)))
        .count();

    // M^{-1} conj(M) must be real; with a valid row structure this can only
    // fail through ill conditioning.
    let witness = inverse.matmul(&matrix.conj());
    let residue = witness.max_imag();
    let threshold = tol * (1.0 + witness.max_abs());
    if residue > threshold {
        return Err(Error::ResidualImaginary { residue, threshold });
    }

    let unitary_scale = detect_unitary_scale(&matrix);
    let canonical_order = canonical_row_order(&row_classes, n);

    Ok(TransformSpec {
        id: NEXT_SPEC_ID.fetch_add(1, Ordering::Relaxed),
        n,
        matrix,
        inverse,
        row_classes,
        realness,
        unitary_scale,
        tol,
        canonical_order,
    })
}

fn classify_rows(m: &CMatrix, tol: f64) -> Result<Vec<RowClass>> {
    let n = m.rows();
    let scale = m.max_abs();
    let threshold = tol * scale;
    let row_is_real =
        |j: usize| m.row(j).iter().map(|z| z.im.abs()).fold(0.0, f64::max) <= threshold;
    let conj_distance = |j: usize, k: usize| {
        m.row(j)
            .iter()
            .zip(m.row(k))
            .map(|(a, b)| (a - b.conj()).norm())
            .fold(0.0, f64::max)
    };

    let mut classes = Vec::new();
    let mut assigned = vec![false; n];
    for j in 0..n {
        if assigned[j] {
            continue;
        }
        if row_is_real(j) {
            classes.push(RowClass::Real(j));
            assigned[j] = true;
            continue;
        }
        let candidates: Vec<usize> = (0..n)
            .filter(|&k| k != j && !assigned[k] && conj_distance(j, k) <= threshold)
            .collect();
        match candidates.as_slice() {
            [k] => {
                classes.push(RowClass::ConjPair(j, *k));
                assigned[j] = true;
                assigned[*k] = true;
            }
            // no partner, or ambiguous pairing: the product would leave R^n
            _ => return Err(Error::InvalidRowStructure { row: j }),
        }
    }
    Ok(classes)
}

fn detect_unitary_scale(m: &CMatrix) -> Option<f64> {
    let n = m.rows();
    let c_sq = m.data().iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
    if c_sq == 0.0 {
        return None;
    }
    let gram = m.conj_transpose().matmul(m);
    let residue = gram.sub(&CMatrix::eye(n).scale(c_sq.into())).max_abs();
    if residue <= UNITARY_DETECT_TOL * c_sq {
        Some(c_sq.sqrt())
    } else {
        None
    }
}

fn canonical_row_order(classes: &[RowClass], n: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(n);
    for class in classes {
        if let RowClass::Real(j) = class {
            order.push(*j);
        }
    }
    for class in classes {
        if let RowClass::ConjPair(j, k) = class {
            order.push(*j);
            order.push(*k);
        }
    }
    order
}

impl TransformSpec {
    /// Identity distinguishing transform domains produced by different specs.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn inverse_matrix(&self) -> &CMatrix {
        &self.inverse
    }

    pub fn row_classes(&self) -> &[RowClass] {
        &self.row_classes
    }

    /// Number of real rows; classifies the ring up to isomorphism.
    pub fn realness(&self) -> usize {
        self.realness
    }

    /// `Some(|c|)` when the transform is `c` times a unitary matrix.
    pub fn unitary_scale(&self) -> Option<f64> {
        self.unitary_scale
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub(crate) fn canonical_order(&self) -> &[usize] {
        &self.canonical_order
    }
}

/// The canonical transform with `m` leading identity rows followed by
/// (n-m)/2 fixed conjugate-pair blocks; the representative of the
/// isomorphism class with realness `m`.
pub fn canonical_transform(n: usize, m: usize) -> Result<TransformSpec> {
    if m > n || (n - m) % 2 != 0 {
        return Err(Error::ParityMismatch { n, m });
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut mat = CMatrix::zeros(n, n);
    for i in 0..m {
        mat.set(i, i, Complex64::ONE);
    }
    let mut i = m;
    while i < n {
        mat.set(i, i, Complex64::new(inv_sqrt2, 0.0));
        mat.set(i, i + 1, Complex64::new(0.0, -inv_sqrt2));
        mat.set(i + 1, i, Complex64::new(inv_sqrt2, 0.0));
        mat.set(i + 1, i + 1, Complex64::new(0.0, inv_sqrt2));
        i += 2;
    }
    validate_transform(mat, DEFAULT_TOL)
}

/// The real matrix `M'` of the ring isomorphism onto the canonical ring of
/// the same realness: `T(x) = M' x` maps this spec's product and conjugation
/// onto the canonical ones.
pub fn isomorphism_to_canonical(spec: &TransformSpec) -> Result<RMatrix> {
    let n = spec.n();
    let canonical = canonical_transform(n, spec.realness())?;
    let order = spec.canonical_order();
    let permuted = CMatrix::from_fn(n, n, |i, j| spec.matrix().get(order[i], j));
    let mapped = canonical.inverse_matrix().matmul(&permuted);
    let residue = mapped.max_imag();
    let threshold = spec.tol() * (1.0 + mapped.max_abs());
    if residue > threshold {
        return Err(Error::ResidualImaginary { residue, threshold });
    }
    Ok(mapped.real_part())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dft(n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |j, k| {
            Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64)
        })
    }

    #[test]
    fn identity_is_fully_real_unitary() {
        let spec = validate_transform(CMatrix::eye(3), DEFAULT_TOL).unwrap();
        assert_eq!(spec.realness(), 3);
        assert_eq!(spec.unitary_scale(), Some(1.0));
        assert_eq!(spec.row_classes().len(), 3);
    }

    #[test]
    fn dft3_has_one_real_row_and_scale_sqrt3() {
        let spec = validate_transform(dft(3), DEFAULT_TOL).unwrap();
        assert_eq!(spec.realness(), 1);
        assert_eq!(spec.row_classes().len(), 2);
        assert!(spec
            .row_classes()
            .iter()
            .any(|c| *c == RowClass::ConjPair(1, 2)));
        let c = spec.unitary_scale().unwrap();
        assert!((c - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn unpaired_complex_rows_rejected() {
        let m = CMatrix::from_rows(&[
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)],
        ]);
        assert!(matches!(
            validate_transform(m, DEFAULT_TOL),
            Err(Error::InvalidRowStructure { .. })
        ));
    }

    #[test]
    fn ambiguous_pairing_rejected() {
        // two identical candidate partners within tolerance
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::ONE;
        let m = CMatrix::from_rows(&[
            vec![one + i, one, one],
            vec![one - i, one, one],
            vec![one - i, one, one + Complex64::new(1e-12, 0.0)],
        ]);
        assert!(matches!(
            validate_transform(m, 1e-6),
            Err(Error::InvalidRowStructure { .. })
        ));
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = CMatrix::from_fn(2, 2, |_, j| Complex64::new(j as f64, 0.0));
        assert!(matches!(
            validate_transform(m, DEFAULT_TOL),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn canonical_shapes() {
        let spec = canonical_transform(4, 4).unwrap();
        assert_eq!(spec.matrix(), &CMatrix::eye(4));

        let spec = canonical_transform(2, 0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((spec.matrix().get(0, 0) - Complex64::new(s, 0.0)).norm() < 1e-15);
        assert!((spec.matrix().get(0, 1) - Complex64::new(0.0, -s)).norm() < 1e-15);
        assert!((spec.matrix().get(1, 1) - Complex64::new(0.0, s)).norm() < 1e-15);
        assert_eq!(spec.realness(), 0);
        assert_eq!(spec.unitary_scale(), Some(1.0));

        assert_eq!(canonical_transform(5, 1).unwrap().realness(), 1);
        assert!(matches!(
            canonical_transform(5, 2),
            Err(Error::ParityMismatch { .. })
        ));
    }

    #[test]
    fn inverse_columns_mirror_row_structure() {
        let spec = validate_transform(dft(5), DEFAULT_TOL).unwrap();
        let inv = spec.inverse_matrix();
        for class in spec.row_classes() {
            match *class {
                RowClass::Real(j) => {
                    for i in 0..5 {
                        assert!(inv.get(i, j).im.abs() < 1e-12);
                    }
                }
                RowClass::ConjPair(j, k) => {
                    for i in 0..5 {
                        assert!((inv.get(i, j) - inv.get(i, k).conj()).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_spec_maps_to_identity() {
        let spec = canonical_transform(4, 2).unwrap();
        let iso = isomorphism_to_canonical(&spec).unwrap();
        let err = iso.sub(&RMatrix::eye(4)).max_abs();
        assert!(err < 1e-12, "err {err}");
    }
}
