//! Tensor SVD over the tube ring, singular tubes, ranks, and optimal
//! truncations.
//!
//! Each transform-domain slice gets an independent complex SVD; factors are
//! assembled slice by slice and carried back. The inverse transform asserts
//! the imaginary residue instead of exploiting conjugate slice symmetry, so
//! a broken assembly surfaces as an error rather than silent garbage.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::linalg::{jacobi_svd, CMatrix};
use crate::tensor::{from_transform, to_transform, Tensor3, TransformedTensor};
use crate::transform::TransformSpec;
use crate::tube::Tube;

/// Per-slice ranks in the transform domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiRank(pub Vec<usize>);

impl MultiRank {
    pub fn constant(r: usize, n: usize) -> Self {
        Self(vec![r; n])
    }

    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

/// Factors of `A = U * S * V^H` over the tube ring, with the transform-domain
/// slices of U and V and the per-slice singular values cached for truncation.
#[derive(Clone, Debug)]
pub struct TsvdFactors {
    spec_id: u64,
    m: usize,
    p: usize,
    n: usize,
    u: Tensor3,
    s: Tensor3,
    v: Tensor3,
    sigma: Vec<Tube>,
    /// sigma_hat[i][j]: i-th singular value of transform slice j.
    sigma_hat: Vec<Vec<f64>>,
    u_hat: TransformedTensor,
    v_hat: TransformedTensor,
}

impl TsvdFactors {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.m, self.p, self.n)
    }

    pub fn spec_id(&self) -> u64 {
        self.spec_id
    }

    pub fn u(&self) -> &Tensor3 {
        &self.u
    }

    /// f-diagonal tensor of singular tubes.
    pub fn s(&self) -> &Tensor3 {
        &self.s
    }

    pub fn v(&self) -> &Tensor3 {
        &self.v
    }

    /// Singular tubes, outermost first.
    pub fn sigma(&self) -> &[Tube] {
        &self.sigma
    }

    /// Per-slice singular values, `sigma_hat()[i][j]` for index i, slice j.
    pub fn sigma_hat(&self) -> &[Vec<f64>] {
        &self.sigma_hat
    }

    fn sigma_hat_max(&self) -> f64 {
        self.sigma_hat
            .iter()
            .flatten()
            .copied()
            .fold(0.0, f64::max)
    }

    fn default_rank_tol(&self) -> f64 {
        self.m.max(self.p) as f64 * f64::EPSILON
    }
}

pub fn tsvd(spec: &TransformSpec, a: &Tensor3) -> Result<TsvdFactors> {
    let (m, p, n) = a.dims();
    assert_eq!(n, spec.n(), "tube length does not match transform");
    let ah = to_transform(spec, a);
    let slices = exec::map_collect(n, |k| {
        jacobi_svd(&CMatrix::from_fn(m, p, |i, j| ah.get(i, j, k)))
    });

    let q = m.min(p);
    let mut u_hat = TransformedTensor::empty(m, m, n, spec.id());
    let mut s_hat = TransformedTensor::empty(m, p, n, spec.id());
    let mut v_hat = TransformedTensor::empty(p, p, n, spec.id());
    let mut sigma_hat = vec![vec![0.0; n]; q];
    for (k, res) in slices.into_iter().enumerate() {
        let svd = res?;
        for i in 0..m {
            for j in 0..m {
                u_hat.set(i, j, k, svd.u.get(i, j));
            }
        }
        for i in 0..p {
            for j in 0..p {
                v_hat.set(i, j, k, svd.v.get(i, j));
            }
        }
        for (i, &val) in svd.s.iter().enumerate() {
            s_hat.set(i, i, k, Complex64::new(val, 0.0));
            sigma_hat[i][k] = val;
        }
    }

    let u = from_transform(spec, &u_hat)?;
    let s = from_transform(spec, &s_hat)?;
    let v = from_transform(spec, &v_hat)?;
    let sigma = (0..q).map(|i| s.tube_at(i, i)).collect();
    Ok(TsvdFactors {
        spec_id: spec.id(),
        m,
        p,
        n,
        u,
        s,
        v,
        sigma,
        sigma_hat,
        u_hat,
        v_hat,
    })
}

/// Largest index whose singular tube is nonzero at the relative threshold;
/// equals the maximal transform-slice rank at the same threshold.
/// `rank_tol` defaults to `max(m,p) * eps`.
pub fn m_rank(f: &TsvdFactors, rank_tol: Option<f64>) -> usize {
    let threshold = rank_tol.unwrap_or_else(|| f.default_rank_tol()) * f.sigma_hat_max();
    for i in (0..f.sigma_hat.len()).rev() {
        if f.sigma_hat[i].iter().any(|&s| s > threshold) {
            return i + 1;
        }
    }
    0
}

/// Per-slice numerical ranks at the same threshold as [`m_rank`].
pub fn multirank(f: &TsvdFactors, rank_tol: Option<f64>) -> MultiRank {
    let threshold = rank_tol.unwrap_or_else(|| f.default_rank_tol()) * f.sigma_hat_max();
    let ranks = (0..f.n)
        .map(|j| f.sigma_hat.iter().filter(|row| row[j] > threshold).count())
        .collect();
    MultiRank(ranks)
}

/// Keep the leading `k` singular triplets of every slice.
pub fn truncate_rank(spec: &TransformSpec, f: &TsvdFactors, k: usize) -> Result<Tensor3> {
    let max = f.m.min(f.p);
    if k > max {
        return Err(Error::RankOutOfRange { k, max });
    }
    truncated_from_ranks(spec, f, &vec![k; f.n])
}

/// Keep the leading `r_j` singular triplets of slice j.
///
/// Slices paired by conjugate rows of the transform carry equal singular
/// values, and a real result exists only when such slices get equal ranks;
/// a pairing-breaking multirank fails the inverse transform's imaginary
/// residue check.
pub fn truncate_multirank(spec: &TransformSpec, f: &TsvdFactors, r: &MultiRank) -> Result<Tensor3> {
    if r.0.len() != f.n {
        return Err(Error::ShapeMismatch(format!(
            "multirank has {} entries for {} slices",
            r.0.len(),
            f.n
        )));
    }
    let max = f.m.min(f.p);
    if let Some(&k) = r.0.iter().find(|&&k| k > max) {
        return Err(Error::RankOutOfRange { k, max });
    }
    truncated_from_ranks(spec, f, &r.0)
}

fn truncated_from_ranks(spec: &TransformSpec, f: &TsvdFactors, ranks: &[usize]) -> Result<Tensor3> {
    if f.spec_id != spec.id() {
        return Err(Error::SpecMismatch);
    }
    let (m, p) = (f.m, f.p);
    let mut out = TransformedTensor::empty(m, p, f.n, spec.id());
    exec::for_each_chunk_mut(out.data_mut(), m * p, |k, chunk| {
        let r = ranks[k];
        for t in 0..r {
            let sv = f.sigma_hat[t][k];
            if sv == 0.0 {
                continue;
            }
            for i in 0..m {
                let usv = f.u_hat.get(i, t, k) * sv;
                for j in 0..p {
                    chunk[i * p + j] += usv * f.v_hat.get(j, t, k).conj();
                }
            }
        }
    });
    from_transform(spec, &out)
}

/// Closed-form `||A - A_k||_F` from the singular tubes, without forming the
/// truncation. Only proven (and only checked) for scaled-unitary transforms.
pub fn tail_error_rank(spec: &TransformSpec, f: &TsvdFactors, k: usize) -> Result<f64> {
    if f.spec_id != spec.id() {
        return Err(Error::SpecMismatch);
    }
    if spec.unitary_scale().is_none() {
        return Err(Error::NotScaledUnitary);
    }
    let max = f.m.min(f.p);
    if k > max {
        return Err(Error::RankOutOfRange { k, max });
    }
    let sum: f64 = f.sigma[k..].iter().map(|t| t.norm().powi(2)).sum();
    Ok(sum.sqrt())
}

/// Multirank analogue of [`tail_error_rank`]: the transform-domain tail,
/// scaled back by the inverse square of the unitary factor.
pub fn tail_error_multirank(spec: &TransformSpec, f: &TsvdFactors, r: &MultiRank) -> Result<f64> {
    if f.spec_id != spec.id() {
        return Err(Error::SpecMismatch);
    }
    let c = spec.unitary_scale().ok_or(Error::NotScaledUnitary)?;
    if r.0.len() != f.n {
        return Err(Error::ShapeMismatch(format!(
            "multirank has {} entries for {} slices",
            r.0.len(),
            f.n
        )));
    }
    let max = f.m.min(f.p);
    if let Some(&k) = r.0.iter().find(|&&k| k > max) {
        return Err(Error::RankOutOfRange { k, max });
    }
    let mut sum = 0.0;
    for (j, &rj) in r.0.iter().enumerate() {
        for row in &f.sigma_hat[rj..] {
            sum += row[j] * row[j];
        }
    }
    Ok((sum / (c * c)).sqrt())
}
