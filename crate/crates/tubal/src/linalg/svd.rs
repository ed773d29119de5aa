//! One-sided Jacobi SVD for dense complex matrices.
//!
//! Deterministic given input bits, and equivariant under entrywise
//! conjugation of the input: conj(A) yields conj(U), S, conj(V). Tensor
//! assembly relies on that equivariance to keep inverse transforms real.

use num_complex::Complex64;

use super::cmatrix::CMatrix;
use crate::error::{Error, Result};

/// Full SVD `A = U * diag(s) * V^H` with `U` m-by-m, `V` p-by-p unitary and
/// `s` the min(m,p) singular values in descending order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

/// Sweep cap per matrix dimension; Jacobi normally converges in well under
/// twenty sweeps.
const SWEEPS_PER_DIM: usize = 100;

pub fn jacobi_svd(a: &CMatrix) -> Result<Svd> {
    if a.rows() >= a.cols() {
        let mut svd = jacobi_svd_tall(a)?;
        phase_normalize(&mut svd);
        Ok(svd)
    } else {
        // A = (A^H)^H: swap the roles of U and V.
        let t = jacobi_svd_tall(&a.conj_transpose())?;
        let mut svd = Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
        phase_normalize(&mut svd);
        Ok(svd)
    }
}

/// One-sided Jacobi on an m-by-p matrix with m >= p: rotate column pairs of a
/// working copy until all pairs are numerically orthogonal.
fn jacobi_svd_tall(a: &CMatrix) -> Result<Svd> {
    let (m, p) = (a.rows(), a.cols());
    debug_assert!(m >= p);
    let mut b = a.clone();
    let mut v = CMatrix::eye(p);

    let max_sweeps = SWEEPS_PER_DIM * m.max(1);
    let mut converged = p < 2;
    let mut sweeps = 0;
    while !converged {
        if sweeps >= max_sweeps {
            return Err(Error::SvdNoConvergence(max_sweeps));
        }
        sweeps += 1;
        converged = true;
        for i in 0..p - 1 {
            for j in i + 1..p {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::ZERO;
                for k in 0..m {
                    let x = b.get(k, i);
                    let y = b.get(k, j);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let limit = f64::EPSILON * (alpha * beta).sqrt();
                if gamma.norm() <= limit || gamma.norm() == 0.0 {
                    continue;
                }
                converged = false;
                // Unitary 2x2 that diagonalizes the pair's Gram matrix:
                // a phase that makes the coupling real, then a real Jacobi
                // rotation.
                let g = gamma.norm();
                let phi = gamma.conj() / g;
                let tau = (beta - alpha) / (2.0 * g);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                rotate_pair(&mut b, i, j, cs, sn, phi);
                rotate_pair(&mut v, i, j, cs, sn, phi);
            }
        }
    }

    // Singular values are the column norms of the rotated copy.
    let norms: Vec<f64> = (0..p)
        .map(|j| {
            (0..m)
                .map(|k| b.get(k, j).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let null_tol = f64::EPSILON * sigma_max * m.max(p) as f64;

    // Columns with null-level singular values carry no information about
    // the operator; give both U and V deterministic completions there
    // instead of noise-normalized directions, so factors stay equivariant
    // under conjugation of the input.
    let mut u = CMatrix::zeros(m, m);
    let mut filled_u = vec![false; m];
    let mut v_sorted = CMatrix::zeros(p, p);
    let mut filled_v = vec![false; p];
    for (dst, &src) in order.iter().enumerate() {
        if norms[src] > null_tol && norms[src] > 0.0 {
            let inv = 1.0 / norms[src];
            for k in 0..m {
                u.set(k, dst, b.get(k, src) * inv);
            }
            for k in 0..p {
                v_sorted.set(k, dst, v.get(k, src));
            }
            filled_u[dst] = true;
            filled_v[dst] = true;
        }
    }
    complete_basis(&mut u, &mut filled_u);
    complete_basis(&mut v_sorted, &mut filled_v);

    Ok(Svd { u, s, v: v_sorted })
}

/// Right-multiply columns (i, j) by [[cs, sn], [-phi*sn, phi*cs]].
fn rotate_pair(m: &mut CMatrix, i: usize, j: usize, cs: f64, sn: f64, phi: Complex64) {
    for k in 0..m.rows() {
        let x = m.get(k, i);
        let y = m.get(k, j);
        m.set(k, i, cs * x - phi * sn * y);
        m.set(k, j, sn * x + phi * cs * y);
    }
}

/// Fill unfilled columns with an orthonormal completion. Candidates are
/// consumed in a fixed order (standard basis first, then a fixed
/// pseudo-random real stream) with a low acceptance threshold, never by
/// comparing candidates against each other: structured inputs routinely
/// produce exactly tied residuals, and an argmax over ties picks different
/// vectors for a matrix and its entrywise conjugate, which would break the
/// realness of assembled tensor factors. The zero matrix completes to the
/// identity.
fn complete_basis(u: &mut CMatrix, filled: &mut [bool]) {
    let m = u.rows();
    let mut empty: Vec<usize> = (0..m).filter(|&i| !filled[i]).collect();
    empty.reverse();
    if empty.is_empty() {
        return;
    }
    let mut lcg: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut real_stream = move || {
        lcg = lcg
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((lcg >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
    };
    let max_candidates = m + 100 * m.max(1);
    for cand_idx in 0..max_candidates {
        let Some(&next) = empty.last() else { return };
        let mut vec: Vec<Complex64> = if cand_idx < m {
            let mut v = vec![Complex64::ZERO; m];
            v[cand_idx] = Complex64::ONE;
            v
        } else {
            (0..m).map(|_| Complex64::new(real_stream(), 0.0)).collect()
        };
        let start_norm = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // two rounds of orthogonalization for stability
        for _ in 0..2 {
            for col in 0..m {
                if !filled[col] {
                    continue;
                }
                let proj: Complex64 = (0..m).map(|k| u.get(k, col).conj() * vec[k]).sum();
                for k in 0..m {
                    vec[k] -= proj * u.get(k, col);
                }
            }
        }
        let norm = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-2 * start_norm {
            continue;
        }
        for k in 0..m {
            u.set(k, next, vec[k] / norm);
        }
        filled[next] = true;
        empty.pop();
    }
    panic!("orthonormal completion exhausted its candidate budget");
}

/// Make the largest-modulus entry of each left singular vector real positive,
/// carrying the phase onto the matching right vector so U*S*V^H is unchanged.
fn phase_normalize(svd: &mut Svd) {
    let m = svd.u.rows();
    let p = svd.v.rows();
    for col in 0..m {
        let lead = (0..m)
            .max_by(|&i, &j| {
                svd.u
                    .get(i, col)
                    .norm()
                    .total_cmp(&svd.u.get(j, col).norm())
            })
            .unwrap();
        let entry = svd.u.get(lead, col);
        if entry.norm() == 0.0 {
            continue;
        }
        let alpha = entry.conj() / entry.norm();
        for k in 0..m {
            let v = svd.u.get(k, col) * alpha;
            svd.u.set(k, col, v);
        }
        if col < p {
            for k in 0..p {
                let v = svd.v.get(k, col) * alpha;
                svd.v.set(k, col, v);
            }
        }
    }
}

/// Moore-Penrose pseudoinverse with the usual `max(m,p)*eps*sigma_max` cutoff.
pub fn pseudo_inverse(a: &CMatrix) -> Result<CMatrix> {
    let svd = jacobi_svd(a)?;
    let (m, p) = (a.rows(), a.cols());
    let cutoff = f64::EPSILON * svd.s.first().copied().unwrap_or(0.0) * m.max(p) as f64;
    let mut out = CMatrix::zeros(p, m);
    for (i, &sigma) in svd.s.iter().enumerate() {
        if sigma <= cutoff {
            continue;
        }
        let inv = 1.0 / sigma;
        for r in 0..p {
            let vr = svd.v.get(r, i);
            for c in 0..m {
                let v = out.get(r, c) + vr * inv * svd.u.get(c, i).conj();
                out.set(r, c, v);
            }
        }
    }
    Ok(out)
}

/// 2-norm condition number; infinite when the smallest singular value
/// underflows to zero.
pub fn condition_number(a: &CMatrix) -> Result<f64> {
    let svd = jacobi_svd(a)?;
    let max = svd.s.first().copied().unwrap_or(0.0);
    let min = svd.s.last().copied().unwrap_or(0.0);
    if min == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(max / min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(svd: &Svd, m: usize, p: usize) -> CMatrix {
        let mut s = CMatrix::zeros(m, p);
        for (i, &val) in svd.s.iter().enumerate() {
            s.set(i, i, Complex64::new(val, 0.0));
        }
        svd.u.matmul(&s).matmul(&svd.v.conj_transpose())
    }

    fn check(a: &CMatrix) {
        let svd = jacobi_svd(a).unwrap();
        let err = reconstruct(&svd, a.rows(), a.cols()).sub(a).max_abs();
        let scale = a.max_abs().max(1.0);
        assert!(err < 1e-12 * scale, "reconstruction err {err}");
        let ue = svd
            .u
            .conj_transpose()
            .matmul(&svd.u)
            .sub(&CMatrix::eye(a.rows()))
            .max_abs();
        assert!(ue < 1e-12, "U not unitary: {ue}");
        let ve = svd
            .v
            .conj_transpose()
            .matmul(&svd.v)
            .sub(&CMatrix::eye(a.cols()))
            .max_abs();
        assert!(ve < 1e-12, "V not unitary: {ve}");
        for w in svd.s.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn tall_wide_and_square() {
        let a = CMatrix::from_fn(4, 3, |i, j| {
            Complex64::new((i + 2 * j) as f64, (i as f64 - j as f64) * 0.5)
        });
        check(&a);
        check(&a.conj_transpose());
        let sq = CMatrix::from_fn(3, 3, |i, j| Complex64::new((i * j) as f64 + 1.0, j as f64));
        check(&sq);
    }

    #[test]
    fn zero_matrix_gets_identity_factors() {
        let svd = jacobi_svd(&CMatrix::zeros(3, 2)).unwrap();
        assert_eq!(svd.u, CMatrix::eye(3));
        assert_eq!(svd.v, CMatrix::eye(2));
        assert_eq!(svd.s, vec![0.0, 0.0]);
    }

    #[test]
    fn conjugation_equivariance() {
        let a = CMatrix::from_fn(4, 4, |i, j| {
            Complex64::new((i * 7 % 5) as f64 - 1.5, (j * 3 % 4) as f64 * 0.25 - 0.3)
        });
        let s1 = jacobi_svd(&a).unwrap();
        let s2 = jacobi_svd(&a.conj()).unwrap();
        assert_eq!(s1.u.conj(), s2.u);
        assert_eq!(s1.v.conj(), s2.v);
        assert_eq!(s1.s, s2.s);
    }

    #[test]
    fn pseudo_inverse_of_invertible_is_inverse() {
        let a = CMatrix::from_fn(3, 3, |i, j| {
            Complex64::new(if i == j { 4.0 } else { 1.0 }, i as f64 - j as f64)
        });
        let pinv = pseudo_inverse(&a).unwrap();
        let err = a.matmul(&pinv).sub(&CMatrix::eye(3)).max_abs();
        assert!(err < 1e-12, "err {err}");
    }

    #[test]
    fn rank_one_singular_values() {
        // outer product has one nonzero singular value = |x||y|
        let x = [1.0, 2.0, 2.0];
        let y = [3.0, 4.0];
        let a = CMatrix::from_fn(3, 2, |i, j| Complex64::new(x[i] * y[j], 0.0));
        let svd = jacobi_svd(&a).unwrap();
        assert!((svd.s[0] - 15.0).abs() < 1e-12);
        assert!(svd.s[1].abs() < 1e-12);
    }
}
