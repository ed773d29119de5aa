//! Recovering the defining transform of a black-box tubal product, and
//! classifying arbitrary binary operations on R^n as tubal or not.
//!
//! The engine probes the operation against standard basis vectors to build
//! representation matrices, diagonalizes the representation of one random
//! element, reads the transform off the basis representations in that
//! eigenbasis, and then certifies the result against the operation on
//! random pairs. A `Tubal` verdict is residual-checked; `NotTubal` verdicts
//! are best-effort evidence, since a failed diagonalization is only
//! guaranteed for product structures with defective representations.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::BlackBoxOp;
use crate::error::{Error, Result};
use crate::linalg::{condition_number, eig_general, CMatrix, RMatrix};
use crate::transform::{validate_transform, TransformSpec};
use crate::tube::{random_tube, Tube};

/// Matrix of the left-multiplication map `x -> op(a, x)`.
#[derive(Clone, Debug)]
pub struct RepMatrix {
    pub base: Tube,
    pub matrix: RMatrix,
}

/// Columns are probes against the standard basis.
pub fn representation_matrix(op: &BlackBoxOp, a: &Tube) -> RepMatrix {
    let n = op.n();
    let mut matrix = RMatrix::zeros(n, n);
    for i in 0..n {
        let col = op.eval(a, &Tube::basis(n, i));
        for r in 0..n {
            matrix.set(r, i, col[r]);
        }
    }
    RepMatrix {
        base: a.clone(),
        matrix,
    }
}

#[derive(Clone, Debug)]
pub struct DiscoveryConfig {
    pub max_retries: usize,
    /// Eigenvector-matrix condition number above which a draw counts as a
    /// failed diagonalization.
    pub cond_cap: f64,
    /// Relative product residual a recovered transform must meet.
    pub residual_tol: f64,
    /// Row-structure tolerance used to validate the recovered matrix.
    pub validate_tol: f64,
    /// Random pairs in the certification check.
    pub check_pairs: usize,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        Self {
            max_retries: 5,
            cond_cap: 1e8,
            residual_tol: 1e-8,
            validate_tol: 1e-6,
            check_pairs: 100,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NotTubalReason {
    NotDiagonalizable,
    ResidualTooLarge,
    NotCommutative,
    NotAssociative,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Tubal(TransformSpec),
    NotTubal(NotTubalReason),
}

#[derive(Clone, Debug)]
pub struct Diagnostics {
    /// Best eigenvector-matrix condition number over the draws.
    pub eigenbasis_condition: f64,
    /// Max relative product residual of the recovered transform (infinite
    /// when no candidate survived validation).
    pub max_residual: f64,
    /// Realness of the recovered transform, when one was accepted.
    pub realness: Option<usize>,
    /// Random draws consumed.
    pub trials: usize,
}

#[derive(Clone, Debug)]
pub struct DiscoveryReport {
    pub verdict: Verdict,
    pub diagnostics: Diagnostics,
}

/// Recover a transform reproducing `op`, drawing up to `max_retries` random
/// elements for the diagonalization step.
pub fn find_transform(op: &BlackBoxOp, seed: u64, max_retries: usize) -> Result<TransformSpec> {
    let cfg = DiscoveryConfig {
        max_retries,
        ..DiscoveryConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run_discovery(op, &mut rng, &cfg).0
}

fn run_discovery(
    op: &BlackBoxOp,
    rng: &mut ChaCha8Rng,
    cfg: &DiscoveryConfig,
) -> (Result<TransformSpec>, Diagnostics) {
    let n = op.n();
    let basis_reps: Vec<CMatrix> = (0..n)
        .map(|i| representation_matrix(op, &Tube::basis(n, i)).matrix.to_complex())
        .collect();

    let mut best_cond = f64::INFINITY;
    let mut best_residual = f64::INFINITY;
    let mut structure_failures = 0usize;
    let mut trials = 0usize;

    for _ in 0..cfg.max_retries {
        trials += 1;
        let x = random_tube(rng, n);
        let rx = representation_matrix(op, &x);
        let eig = match eig_general(&rx.matrix) {
            Ok(e) => e,
            Err(_) => continue,
        };
        let cond = condition_number(&eig.vectors).unwrap_or(f64::INFINITY);
        best_cond = best_cond.min(cond);
        // NaN or infinite condition numbers count as failed draws too
        if cond.partial_cmp(&cfg.cond_cap) != Some(std::cmp::Ordering::Less) {
            continue;
        }
        let s = eig.vectors;
        let s_inv = match s.inverse() {
            Ok(inv) => inv,
            Err(_) => continue,
        };
        let y = s.matvec(&vec![Complex64::ONE; n]);

        // Column i of the candidate transform: S^{-1} R_{e_i} y. Any
        // rescaling of the eigenvectors cancels here, so for a genuine
        // tubal product the candidate is a row permutation of the defining
        // matrix. Rows are NOT rescaled: the star product is not invariant
        // under row scaling (diag(2,1) times the identity already changes
        // it), so normalization would break the certification check.
        let mut candidate = CMatrix::zeros(n, n);
        for (i, rep) in basis_reps.iter().enumerate() {
            let col = s_inv.matvec(&rep.matvec(&y));
            for r in 0..n {
                candidate.set(r, i, col[r]);
            }
        }

        let spec = match validate_transform(candidate, cfg.validate_tol) {
            Ok(spec) => spec,
            Err(_) => {
                structure_failures += 1;
                continue;
            }
        };

        let residual = product_residual(op, &spec, rng, cfg.check_pairs);
        best_residual = best_residual.min(residual);
        if residual <= cfg.residual_tol {
            let diagnostics = Diagnostics {
                eigenbasis_condition: cond,
                max_residual: residual,
                realness: Some(spec.realness()),
                trials,
            };
            return (Ok(spec), diagnostics);
        }
    }

    let diagnostics = Diagnostics {
        eigenbasis_condition: best_cond,
        max_residual: best_residual,
        realness: None,
        trials,
    };
    let err = if best_residual.is_finite() || structure_failures > 0 {
        Error::ResidualTooLarge(best_residual)
    } else {
        Error::NotDiagonalizable(trials)
    };
    (Err(err), diagnostics)
}

fn product_residual(
    op: &BlackBoxOp,
    spec: &TransformSpec,
    rng: &mut ChaCha8Rng,
    pairs: usize,
) -> f64 {
    let n = op.n();
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let a = random_tube(rng, n);
        let b = random_tube(rng, n);
        let want = op.eval(&a, &b);
        let got = match spec.star(&a, &b) {
            Ok(t) => t,
            Err(_) => return f64::INFINITY,
        };
        worst = worst.max(want.max_abs_diff(&got) / (1.0 + want.max_abs()));
    }
    worst
}

/// Probabilistic prechecks (commutativity, associativity, bilinearity on
/// random samples) followed by transform recovery.
pub fn classify_ring(op: &BlackBoxOp, seed: u64, trials: usize) -> DiscoveryReport {
    let cfg = DiscoveryConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = op.n();
    let samples = trials.max(1);

    let mut worst_comm: f64 = 0.0;
    let mut worst_assoc: f64 = 0.0;
    let mut worst_bilin: f64 = 0.0;
    for _ in 0..samples {
        let a = random_tube(&mut rng, n);
        let b = random_tube(&mut rng, n);
        let c = random_tube(&mut rng, n);
        let ab = op.eval(&a, &b);
        let ba = op.eval(&b, &a);
        worst_comm = worst_comm.max(ab.max_abs_diff(&ba) / (1.0 + ab.max_abs()));

        let left = op.eval(&ab, &c);
        let right = op.eval(&a, &op.eval(&b, &c));
        worst_assoc = worst_assoc.max(left.max_abs_diff(&right) / (1.0 + left.max_abs()));

        let alpha: f64 = rng.random_range(-1.0..1.0);
        let beta: f64 = rng.random_range(-1.0..1.0);
        let combo = op.eval(&a.scale(alpha).add(&b.scale(beta)), &c);
        let split = op.eval(&a, &c).scale(alpha).add(&op.eval(&b, &c).scale(beta));
        worst_bilin = worst_bilin.max(combo.max_abs_diff(&split) / (1.0 + combo.max_abs()));
        let combo = op.eval(&c, &a.scale(alpha).add(&b.scale(beta)));
        let split = op.eval(&c, &a).scale(alpha).add(&op.eval(&c, &b).scale(beta));
        worst_bilin = worst_bilin.max(combo.max_abs_diff(&split) / (1.0 + combo.max_abs()));
    }

    let precheck_fail = |reason, residual| DiscoveryReport {
        verdict: Verdict::NotTubal(reason),
        diagnostics: Diagnostics {
            eigenbasis_condition: f64::INFINITY,
            max_residual: residual,
            realness: None,
            trials: samples,
        },
    };
    if worst_comm > cfg.residual_tol {
        return precheck_fail(NotTubalReason::NotCommutative, worst_comm);
    }
    if worst_assoc > cfg.residual_tol {
        return precheck_fail(NotTubalReason::NotAssociative, worst_assoc);
    }
    if worst_bilin > cfg.residual_tol {
        // not linear in one argument: no transform can reproduce it
        return precheck_fail(NotTubalReason::ResidualTooLarge, worst_bilin);
    }

    let (result, diagnostics) = run_discovery(op, &mut rng, &cfg);
    let verdict = match result {
        Ok(spec) => Verdict::Tubal(spec),
        Err(Error::NotDiagonalizable(_)) => Verdict::NotTubal(NotTubalReason::NotDiagonalizable),
        Err(_) => Verdict::NotTubal(NotTubalReason::ResidualTooLarge),
    };
    DiscoveryReport {
        verdict,
        diagnostics,
    }
}

/// True when `m2 = D P m1` for some permutation P and invertible diagonal D,
/// up to `tol` on rows normalized to unit leading entry.
pub fn equivalent_transforms(m1: &CMatrix, m2: &CMatrix, tol: f64) -> bool {
    if m1.rows() != m2.rows() || m1.cols() != m2.cols() {
        return false;
    }
    let n = m1.rows();
    let norm1 = normalized_rows(m1);
    let norm2 = normalized_rows(m2);
    let mut used = vec![false; n];
    for row2 in &norm2 {
        let mut best: Option<(usize, f64)> = None;
        for (j, row1) in norm1.iter().enumerate() {
            if used[j] {
                continue;
            }
            let dist = row_distance(row2, row1);
            if best.map_or(true, |(_, d)| dist < d) {
                best = Some((j, dist));
            }
        }
        match best {
            Some((j, dist)) if dist <= tol => used[j] = true,
            _ => return false,
        }
    }
    true
}

fn normalized_rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            // Normalize by the first near-maximal entry rather than the
            // strict argmax: rows of constant modulus (Fourier rows) would
            // otherwise pick tie-broken indices that differ between two
            // numerically perturbed copies of the same row.
            let max_mod = row.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let lead = row
                .iter()
                .position(|v| v.norm() >= max_mod * (1.0 - 1e-6))
                .unwrap_or(0);
            let q = row[lead];
            if q.norm() == 0.0 {
                row.to_vec()
            } else {
                row.iter().map(|v| v / q).collect()
            }
        })
        .collect()
}

fn row_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// The idempotent `a * weak_inverse(a)`: the ring unit when `a` is
/// invertible, zero at zero, non-trivial otherwise.
pub fn idempotent_of(spec: &TransformSpec, a: &Tube) -> Result<Tube> {
    spec.star(a, &spec.weak_inverse(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_transform, oracle_op, OracleKind, TransformKind};

    #[test]
    fn representation_of_ring_product() {
        let spec = make_transform(TransformKind::Dft, 3).unwrap();
        let op = oracle_op(OracleKind::FromTransform(spec.clone()), 3).unwrap();
        let a = Tube::new(vec![0.3, -1.0, 2.0]);
        let rep = representation_matrix(&op, &a);

        // M^{-1} diag(M a) M
        let ah = spec.apply(&a);
        let mut diag = CMatrix::zeros(3, 3);
        for (i, v) in ah.iter().enumerate() {
            diag.set(i, i, *v);
        }
        let want = spec.inverse_matrix().matmul(&diag).matmul(spec.matrix());
        let got = rep.matrix.to_complex();
        assert!(want.sub(&got).max_abs() < 1e-12);

        let zero = representation_matrix(&op, &Tube::zeros(3));
        assert!(zero.matrix.max_abs() < 1e-15);
        let unit = representation_matrix(&op, &spec.unit());
        assert!(unit.matrix.sub(&RMatrix::eye(3)).max_abs() < 1e-12);
    }

    #[test]
    fn recovers_circulant_structure() {
        let op = oracle_op(OracleKind::CircConv, 4).unwrap();
        let spec = find_transform(&op, 0, 5).unwrap();
        let dft = make_transform(TransformKind::Dft, 4).unwrap();
        assert!(equivalent_transforms(spec.matrix(), dft.matrix(), 1e-6));
        assert_eq!(spec.realness(), dft.realness());
    }

    #[test]
    fn recovers_split_complex() {
        let op = oracle_op(OracleKind::SplitComplex, 2).unwrap();
        let spec = find_transform(&op, 0, 5).unwrap();
        let known = make_transform(TransformKind::SplitComplex, 2).unwrap();
        assert!(equivalent_transforms(spec.matrix(), known.matrix(), 1e-6));
        assert_eq!(spec.realness(), 2);
    }

    #[test]
    fn dual_numbers_fail_diagonalization() {
        let op = oracle_op(OracleKind::DualNumbers, 2).unwrap();
        assert!(matches!(
            find_transform(&op, 0, 5),
            Err(Error::NotDiagonalizable(_))
        ));
        let report = classify_ring(&op, 0, 20);
        assert!(matches!(
            report.verdict,
            Verdict::NotTubal(NotTubalReason::NotDiagonalizable)
        ));
    }

    #[test]
    fn left_projection_is_not_commutative() {
        let op = BlackBoxOp::new(3, "left-projection", |a, _| a.to_vec());
        let report = classify_ring(&op, 0, 20);
        assert!(matches!(
            report.verdict,
            Verdict::NotTubal(NotTubalReason::NotCommutative)
        ));
    }

    #[test]
    fn elementwise_max_is_not_bilinear() {
        // commutative and associative, but not linear in either argument;
        // no transform can reproduce it
        let op = BlackBoxOp::new(3, "elementwise-max", |a, b| {
            a.iter().zip(b).map(|(x, y)| x.max(*y)).collect()
        });
        let report = classify_ring(&op, 0, 20);
        assert!(matches!(
            report.verdict,
            Verdict::NotTubal(NotTubalReason::ResidualTooLarge)
        ));
    }

    #[test]
    fn shifted_product_is_not_associative() {
        // op(a, b) = a * b + ones under the identity transform: commutative
        // and bilinear-looking at first glance but fails associativity
        let op = BlackBoxOp::new(2, "shifted-product", |a, b| {
            a.iter().zip(b).map(|(x, y)| x * y + 1.0).collect()
        });
        let report = classify_ring(&op, 0, 20);
        assert!(matches!(
            report.verdict,
            Verdict::NotTubal(NotTubalReason::NotAssociative)
        ));
    }

    #[test]
    fn equivalence_cases() {
        let dft2 = make_transform(TransformKind::Dft, 2).unwrap();
        let cf = make_transform(TransformKind::ComplexField, 2).unwrap();
        assert!(equivalent_transforms(dft2.matrix(), dft2.matrix(), 1e-10));
        assert!(!equivalent_transforms(dft2.matrix(), cf.matrix(), 1e-6));

        // permuted, rescaled rows stay equivalent
        let m = dft2.matrix();
        let scrambled = CMatrix::from_rows(&[
            m.row(1).iter().map(|v| v * Complex64::new(0.0, 2.0)).collect(),
            m.row(0).iter().map(|v| v * Complex64::new(-3.0, 1.0)).collect(),
        ]);
        assert!(equivalent_transforms(m, &scrambled, 1e-10));
    }

    #[test]
    fn idempotents() {
        let spec = make_transform(TransformKind::SplitComplex, 2).unwrap();
        let e = spec.unit();

        // invertible element: idempotent is the unit
        let p = idempotent_of(&spec, &Tube::new(vec![3.0, 1.0])).unwrap();
        assert!(p.max_abs_diff(&e) < 1e-12);

        // zero: idempotent is zero
        let p = idempotent_of(&spec, &Tube::zeros(2)).unwrap();
        assert!(p.max_abs() < 1e-15);

        // non-invertible element: a non-trivial idempotent
        let p = idempotent_of(&spec, &Tube::new(vec![1.0, 1.0])).unwrap();
        assert!(p.max_abs_diff(&Tube::new(vec![0.5, 0.5])) < 1e-12);
        let pp = spec.star(&p, &p).unwrap();
        assert!(pp.max_abs_diff(&p) < 1e-12);
        assert!(p.max_abs_diff(&e) > 0.4);
    }
}
