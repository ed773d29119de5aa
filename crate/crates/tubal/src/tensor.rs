//! Third-order tensors as matrices of tubes: twist/squeeze, the transform
//! domain, facewise and ring tensor products, Hermitian transpose, and the
//! tube-valued dot product on oriented matrices.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::linalg::RMatrix;
use crate::transform::TransformSpec;
use crate::tube::Tube;

/// Real m-by-p-by-n tensor, viewed as an m-by-p matrix of length-n tubes.
/// Stored slice-major (tube index k outer), row-major within a slice.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    m: usize,
    p: usize,
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(m: usize, p: usize, n: usize) -> Self {
        assert!(m >= 1 && p >= 1 && n >= 1, "tensor dimensions must be positive");
        Self {
            m,
            p,
            n,
            data: vec![0.0; m * p * n],
        }
    }

    pub fn from_fn(m: usize, p: usize, n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(m, p, n);
        for k in 0..n {
            for i in 0..m {
                for j in 0..p {
                    t.set(i, j, k, f(i, j, k));
                }
            }
        }
        t
    }

    /// Construct from the raw slice-major payload.
    pub fn from_data(m: usize, p: usize, n: usize, data: Vec<f64>) -> Self {
        assert!(m >= 1 && p >= 1 && n >= 1, "tensor dimensions must be positive");
        assert_eq!(data.len(), m * p * n, "payload length mismatch");
        Self { m, p, n, data }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.m, self.p, self.n)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(k * self.m + i) * self.p + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.data[(k * self.m + i) * self.p + j] = v;
    }

    /// Frontal slice k as a row-major m-by-p block.
    pub fn slice(&self, k: usize) -> &[f64] {
        &self.data[k * self.m * self.p..(k + 1) * self.m * self.p]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn tube_at(&self, i: usize, j: usize) -> Tube {
        Tube::new((0..self.n).map(|k| self.get(i, j, k)).collect())
    }

    pub fn set_tube(&mut self, i: usize, j: usize, tube: &Tube) {
        assert_eq!(tube.len(), self.n);
        for k in 0..self.n {
            self.set(i, j, k, tube[k]);
        }
    }

    pub fn add(&self, other: &Tensor3) -> Tensor3 {
        assert_eq!(self.dims(), other.dims());
        Tensor3 {
            m: self.m,
            p: self.p,
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Tensor3) -> Tensor3 {
        assert_eq!(self.dims(), other.dims());
        Tensor3 {
            m: self.m,
            p: self.p,
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Tensor3 {
        Tensor3 {
            m: self.m,
            p: self.p,
            n: self.n,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// A tensor carried into the transform domain, tagged with the spec that
/// produced it so domains cannot be mixed.
#[derive(Clone, Debug)]
pub struct TransformedTensor {
    m: usize,
    p: usize,
    n: usize,
    spec_id: u64,
    data: Vec<Complex64>,
}

impl TransformedTensor {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.m, self.p, self.n)
    }

    pub fn spec_id(&self) -> u64 {
        self.spec_id
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.data[(k * self.m + i) * self.p + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Complex64) {
        self.data[(k * self.m + i) * self.p + j] = v;
    }

    pub fn slice(&self, k: usize) -> &[Complex64] {
        &self.data[k * self.m * self.p..(k + 1) * self.m * self.p]
    }

    pub(crate) fn empty(m: usize, p: usize, n: usize, spec_id: u64) -> Self {
        Self {
            m,
            p,
            n,
            spec_id,
            data: vec![Complex64::ZERO; m * p * n],
        }
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }
}

/// Oriented matrix: an m-by-1-by-n tensor, i.e. a column of m tubes.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedMatrix(Tensor3);

impl OrientedMatrix {
    pub fn new(t: Tensor3) -> Self {
        assert_eq!(t.dims().1, 1, "oriented matrices have a single column");
        Self(t)
    }

    pub fn from_tubes(tubes: &[Tube]) -> Self {
        let m = tubes.len();
        assert!(m >= 1);
        let n = tubes[0].len();
        let mut t = Tensor3::zeros(m, 1, n);
        for (i, tube) in tubes.iter().enumerate() {
            t.set_tube(i, 0, tube);
        }
        Self(t)
    }

    pub fn rows(&self) -> usize {
        self.0.dims().0
    }

    pub fn tube(&self, i: usize) -> Tube {
        self.0.tube_at(i, 0)
    }

    pub fn tensor(&self) -> &Tensor3 {
        &self.0
    }

    pub fn into_tensor(self) -> Tensor3 {
        self.0
    }
}

/// Twist the rows of a real m-by-n matrix into a column of m tubes.
pub fn twist(x: &RMatrix) -> OrientedMatrix {
    let (m, n) = (x.rows(), x.cols());
    OrientedMatrix::new(Tensor3::from_fn(m, 1, n, |i, _, k| x.get(i, k)))
}

/// Inverse of [`twist`].
pub fn squeeze(u: &OrientedMatrix) -> RMatrix {
    let (m, _, n) = u.tensor().dims();
    RMatrix::from_fn(m, n, |i, k| u.tensor().get(i, 0, k))
}

/// Mode-3 product with the transform matrix: slice k of the result is the
/// M[k,:]-weighted combination of the input slices.
pub fn to_transform(spec: &TransformSpec, a: &Tensor3) -> TransformedTensor {
    let (m, p, n) = a.dims();
    assert_eq!(n, spec.n(), "tube length does not match transform");
    let mut out = TransformedTensor::empty(m, p, n, spec.id());
    let matrix = spec.matrix();
    let slice_len = m * p;
    exec::for_each_chunk_mut(out.data_mut(), slice_len, |k, chunk| {
        for l in 0..n {
            let w = matrix.get(k, l);
            if w == Complex64::ZERO {
                continue;
            }
            for (c, &v) in chunk.iter_mut().zip(a.slice(l)) {
                *c += w * v;
            }
        }
    });
    out
}

/// Inverse mode-3 product; checks the imaginary residue against the spec
/// tolerance and strips it.
pub fn from_transform(spec: &TransformSpec, a: &TransformedTensor) -> Result<Tensor3> {
    if a.spec_id() != spec.id() {
        return Err(Error::SpecMismatch);
    }
    let (m, p, n) = a.dims();
    let inv = spec.inverse_matrix();
    let slice_len = m * p;
    let mut tmp = vec![Complex64::ZERO; m * p * n];
    exec::for_each_chunk_mut(&mut tmp, slice_len, |k, chunk| {
        for l in 0..n {
            let w = inv.get(k, l);
            if w == Complex64::ZERO {
                continue;
            }
            for (c, &v) in chunk.iter_mut().zip(a.slice(l)) {
                *c += w * v;
            }
        }
    });
    let scale = 1.0 + tmp.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let residue = tmp.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let threshold = spec.tol() * scale;
    if residue > threshold {
        return Err(Error::ResidualImaginary { residue, threshold });
    }
    Ok(Tensor3::from_data(
        m,
        p,
        n,
        tmp.into_iter().map(|z| z.re).collect(),
    ))
}

/// Slice-by-slice matrix product of two transformed tensors.
pub fn facewise_product(a: &TransformedTensor, b: &TransformedTensor) -> Result<TransformedTensor> {
    if a.spec_id() != b.spec_id() {
        return Err(Error::SpecMismatch);
    }
    let (m, p, n) = a.dims();
    let (bp, l, bn) = b.dims();
    if p != bp || n != bn {
        return Err(Error::ShapeMismatch(format!(
            "facewise product of {m}x{p}x{n} and {bp}x{l}x{bn}"
        )));
    }
    let mut out = TransformedTensor::empty(m, l, n, a.spec_id());
    exec::for_each_chunk_mut(out.data_mut(), m * l, |k, chunk| {
        let ak = a.slice(k);
        let bk = b.slice(k);
        for i in 0..m {
            for t in 0..p {
                let av = ak[i * p + t];
                if av == Complex64::ZERO {
                    continue;
                }
                for j in 0..l {
                    chunk[i * l + j] += av * bk[t * l + j];
                }
            }
        }
    });
    Ok(out)
}

/// The tensor product over the tube ring: transform, facewise multiply,
/// transform back. Equals the direct sum-of-tube-products definition.
pub fn tensor_star(spec: &TransformSpec, a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    let ah = to_transform(spec, a);
    let bh = to_transform(spec, b);
    from_transform(spec, &facewise_product(&ah, &bh)?)
}

/// Hermitian transpose: tube (i, j) of the result is the ring conjugate of
/// tube (j, i). Computed facewise in the transform domain.
pub fn herm_transpose(spec: &TransformSpec, a: &Tensor3) -> Result<Tensor3> {
    let (m, p, n) = a.dims();
    let ah = to_transform(spec, a);
    let mut out = TransformedTensor::empty(p, m, n, spec.id());
    exec::for_each_chunk_mut(out.data_mut(), p * m, |k, chunk| {
        let ak = ah.slice(k);
        for i in 0..p {
            for j in 0..m {
                chunk[i * m + j] = ak[j * p + i].conj();
            }
        }
    });
    from_transform(spec, &out)
}

/// Identity tensor: unit tubes on the diagonal, so every transform slice is
/// the identity matrix.
pub fn identity_tensor(spec: &TransformSpec, m: usize) -> Tensor3 {
    let e = spec.unit();
    let mut t = Tensor3::zeros(m, m, spec.n());
    for i in 0..m {
        t.set_tube(i, i, &e);
    }
    t
}

/// Module scalar multiplication: tube `r` times every tube of `a`.
pub fn tube_scale(spec: &TransformSpec, r: &Tube, a: &Tensor3) -> Result<Tensor3> {
    let rh = spec.apply(r);
    let ah = to_transform(spec, a);
    let (m, p, n) = a.dims();
    let mut out = TransformedTensor::empty(m, p, n, spec.id());
    exec::for_each_chunk_mut(out.data_mut(), m * p, |k, chunk| {
        for (c, &v) in chunk.iter_mut().zip(ah.slice(k)) {
            *c = rh[k] * v;
        }
    });
    from_transform(spec, &out)
}

/// Tube-valued dot product of two oriented matrices:
/// the sum of conj(u_i) * v_i over rows.
pub fn mdot(spec: &TransformSpec, u: &OrientedMatrix, v: &OrientedMatrix) -> Result<Tube> {
    if u.rows() != v.rows() || u.tensor().dims().2 != v.tensor().dims().2 {
        return Err(Error::ShapeMismatch(format!(
            "dot product of {} and {} tubes",
            u.rows(),
            v.rows()
        )));
    }
    let n = spec.n();
    let mut acc = vec![Complex64::ZERO; n];
    for i in 0..u.rows() {
        let uh = spec.apply(&u.tube(i));
        let vh = spec.apply(&v.tube(i));
        for k in 0..n {
            acc[k] += uh[k].conj() * vh[k];
        }
    }
    spec.apply_inverse(&acc)
}

/// Euclidean inner product of the raw entries.
pub fn frobenius_inner(a: &Tensor3, b: &Tensor3) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::ShapeMismatch(format!(
            "inner product of {:?} and {:?}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum())
}

pub fn frobenius_norm(a: &Tensor3) -> f64 {
    a.data().iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Frobenius norm of a transformed tensor.
pub fn frobenius_norm_transformed(a: &TransformedTensor) -> f64 {
    a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Uniform random tensor with entries in [-1, 1).
pub fn random_tensor<R: Rng + ?Sized>(rng: &mut R, m: usize, p: usize, n: usize) -> Tensor3 {
    let data = (0..m * p * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    Tensor3::from_data(m, p, n, data)
}
