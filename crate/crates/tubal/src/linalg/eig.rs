//! Dense general eigendecomposition: complex Hessenberg reduction followed
//! by Wilkinson-shifted QR, with eigenvectors recovered by triangular
//! back-substitution. Defective inputs still produce a basis, but one whose
//! condition number blows up; callers judge diagonalizability from that.

use num_complex::Complex64;

use super::cmatrix::{CMatrix, RMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Eig {
    /// Eigenvalues in Schur order.
    pub values: Vec<Complex64>,
    /// Matching eigenvectors as columns, each 2-norm one with its
    /// largest-modulus entry made real positive.
    pub vectors: CMatrix,
}

pub fn eig_general(a: &RMatrix) -> Result<Eig> {
    assert_eq!(a.rows(), a.cols(), "eigendecomposition of a non-square matrix");
    let n = a.rows();
    if n == 0 {
        return Ok(Eig {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let mut h = a.to_complex();
    let mut z = CMatrix::eye(n);
    hessenberg(&mut h, &mut z);
    schur(&mut h, &mut z)?;
    Ok(eigenvectors_from_schur(&h, &z))
}

/// Householder reduction to upper Hessenberg form, accumulating the
/// transform into `z` so that `a_original = z * h * z^H`.
fn hessenberg(h: &mut CMatrix, z: &mut CMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let mut norm_sq = 0.0;
        for i in k + 1..n {
            norm_sq += h.get(i, k).norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h.get(k + 1, k);
        let phase = if x0.norm() == 0.0 {
            Complex64::ONE
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        // v = x - alpha*e1, normalized
        let mut v = vec![Complex64::ZERO; n];
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = h.get(i, k);
        }
        let vnorm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for c in v.iter_mut() {
            *c /= vnorm;
        }
        // H <- (I - 2vv^H) H (I - 2vv^H), Z <- Z (I - 2vv^H)
        for j in 0..n {
            let dot: Complex64 = (k + 1..n).map(|i| v[i].conj() * h.get(i, j)).sum();
            for i in k + 1..n {
                let val = h.get(i, j) - 2.0 * v[i] * dot;
                h.set(i, j, val);
            }
        }
        for i in 0..n {
            let dot: Complex64 = (k + 1..n).map(|j| h.get(i, j) * v[j]).sum();
            for j in k + 1..n {
                let val = h.get(i, j) - 2.0 * dot * v[j].conj();
                h.set(i, j, val);
            }
        }
        for i in 0..n {
            let dot: Complex64 = (k + 1..n).map(|j| z.get(i, j) * v[j]).sum();
            for j in k + 1..n {
                let val = z.get(i, j) - 2.0 * dot * v[j].conj();
                z.set(i, j, val);
            }
        }
    }
}

/// Shifted QR iteration on a Hessenberg matrix; on return `h` is upper
/// triangular (the Schur form) and `z` accumulates the unitary similarity.
fn schur(h: &mut CMatrix, z: &mut CMatrix) -> Result<()> {
    let n = h.rows();
    let hnorm = h.max_abs().max(f64::MIN_POSITIVE);
    let mut total_steps = 0usize;
    let max_steps = 40 * n + 100;
    let mut en = n - 1;
    loop {
        // deflate trailing 1x1 blocks
        while en > 0 && subdiag_negligible(h, en, hnorm) {
            h.set(en, en - 1, Complex64::ZERO);
            en -= 1;
        }
        if en == 0 {
            break;
        }
        // active block start
        let mut lo = en;
        while lo > 0 && !subdiag_negligible(h, lo, hnorm) {
            lo -= 1;
        }
        if lo > 0 {
            h.set(lo, lo - 1, Complex64::ZERO);
        }
        if total_steps >= max_steps {
            return Err(Error::EigNoConvergence);
        }
        total_steps += 1;
        let mu = if total_steps % 16 == 0 {
            // exceptional shift to break stagnation cycles
            h.get(en, en) + Complex64::new(0.75 * h.get(en, en - 1).norm(), 0.0)
        } else {
            wilkinson_shift(h, en)
        };
        qr_step(h, z, lo, en, mu);
    }
    // clear rounding debris below the diagonal
    for i in 1..n {
        for j in 0..i {
            h.set(i, j, Complex64::ZERO);
        }
    }
    Ok(())
}

fn subdiag_negligible(h: &CMatrix, i: usize, hnorm: f64) -> bool {
    let s = h.get(i - 1, i - 1).norm() + h.get(i, i).norm();
    let s = if s == 0.0 { hnorm } else { s };
    h.get(i, i - 1).norm() <= f64::EPSILON * s
}

/// Eigenvalue of the trailing 2x2 closest to the corner entry.
fn wilkinson_shift(h: &CMatrix, en: usize) -> Complex64 {
    let a = h.get(en - 1, en - 1);
    let b = h.get(en - 1, en);
    let c = h.get(en, en - 1);
    let d = h.get(en, en);
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR step restricted to rows/columns `lo..=en`.
fn qr_step(h: &mut CMatrix, z: &mut CMatrix, lo: usize, en: usize, mu: Complex64) {
    let n = h.rows();
    for i in lo..=en {
        let v = h.get(i, i) - mu;
        h.set(i, i, v);
    }
    let mut rots = Vec::with_capacity(en - lo);
    for i in lo..en {
        let (c, s) = givens(h.get(i, i), h.get(i + 1, i));
        rots.push((c, s));
        for j in i..n {
            let x = h.get(i, j);
            let y = h.get(i + 1, j);
            h.set(i, j, c * x + s * y);
            h.set(i + 1, j, -s.conj() * x + c * y);
        }
    }
    for (offset, &(c, s)) in rots.iter().enumerate() {
        let i = lo + offset;
        for r in 0..=(i + 1) {
            let x = h.get(r, i);
            let y = h.get(r, i + 1);
            h.set(r, i, c * x + s.conj() * y);
            h.set(r, i + 1, -s * x + c * y);
        }
        for r in 0..n {
            let x = z.get(r, i);
            let y = z.get(r, i + 1);
            z.set(r, i, c * x + s.conj() * y);
            z.set(r, i + 1, -s * x + c * y);
        }
    }
    for i in lo..=en {
        let v = h.get(i, i) + mu;
        h.set(i, i, v);
    }
}

/// Rotation [[c, s], [-conj(s), c]] (c real) sending (f, g) to (r, 0).
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    if g.norm() == 0.0 {
        (1.0, Complex64::ZERO)
    } else if f.norm() == 0.0 {
        (0.0, g.conj() / g.norm())
    } else {
        let fa = f.norm();
        let r = f64::hypot(fa, g.norm());
        (fa / r, (f / fa) * g.conj() / r)
    }
}

/// Back-substitute eigenvectors of the triangular factor, then rotate them
/// back through `z`. Near-defective eigenvalues hit the small-divisor guard
/// and come out nearly parallel, which is what the caller's condition-number
/// check is for.
fn eigenvectors_from_schur(t: &CMatrix, z: &CMatrix) -> Eig {
    let n = t.rows();
    let tnorm = t.max_abs();
    let floor = f64::EPSILON * if tnorm > 0.0 { tnorm } else { 1.0 };
    let mut vectors = CMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t.get(k, k);
        values.push(lambda);
        let mut y = vec![Complex64::ZERO; n];
        y[k] = Complex64::ONE;
        for i in (0..k).rev() {
            let sum: Complex64 = (i + 1..=k).map(|j| t.get(i, j) * y[j]).sum();
            let mut den = t.get(i, i) - lambda;
            if den.norm() < floor {
                den = Complex64::new(floor, 0.0);
            }
            y[i] = -sum / den;
        }
        let mut x = z.matvec(&y);
        let norm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for c in x.iter_mut() {
                *c /= norm;
            }
        }
        let lead = (0..n)
            .max_by(|&i, &j| x[i].norm().total_cmp(&x[j].norm()))
            .unwrap();
        if x[lead].norm() > 0.0 {
            let alpha = x[lead].conj() / x[lead].norm();
            for c in x.iter_mut() {
                *c *= alpha;
            }
        }
        for i in 0..n {
            vectors.set(i, k, x[i]);
        }
    }
    Eig { values, vectors }
}
