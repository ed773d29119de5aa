//! Named transforms and independent brute-force product oracles.
//!
//! The oracles are computed with direct O(n^2) sums and never touch a
//! transform matrix, so they can serve as independent witnesses for the
//! corresponding ring products.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::transform::{canonical_transform, validate_transform, TransformSpec, DEFAULT_TOL};
use crate::tube::{random_tube, Tube};

/// Constructors for the catalog of named transforms.
#[derive(Clone, Debug)]
pub enum TransformKind {
    Dft,
    SkewDft,
    WalshHadamard,
    SplitComplex,
    ComplexField,
    Identity,
    Canonical { m: usize },
    Vandermonde(Vec<Complex64>),
}

pub fn make_transform(kind: TransformKind, n: usize) -> Result<TransformSpec> {
    if n == 0 {
        return Err(Error::BadDimension("dimension must be at least 1".into()));
    }
    let matrix = match kind {
        TransformKind::Dft => dft_matrix(n),
        TransformKind::SkewDft => {
            // DFT times diag(1, e^{i pi/n}, ..., e^{i (n-1) pi/n}): the
            // Vandermonde matrix at the roots of X^n + 1.
            let f = dft_matrix(n);
            CMatrix::from_fn(n, n, |j, k| {
                f.get(j, k) * Complex64::from_polar(1.0, PI * k as f64 / n as f64)
            })
        }
        TransformKind::WalshHadamard => {
            if !n.is_power_of_two() {
                return Err(Error::BadDimension(format!(
                    "Walsh-Hadamard needs a power-of-two size, got {n}"
                )));
            }
            walsh_hadamard_matrix(n)
        }
        TransformKind::SplitComplex => {
            if n != 2 {
                return Err(Error::BadDimension("split-complex needs n = 2".into()));
            }
            CMatrix::from_rows(&[
                vec![Complex64::ONE, Complex64::ONE],
                vec![Complex64::ONE, -Complex64::ONE],
            ])
        }
        TransformKind::ComplexField => {
            if n != 2 {
                return Err(Error::BadDimension("complex-field needs n = 2".into()));
            }
            let i = Complex64::new(0.0, 1.0);
            CMatrix::from_rows(&[vec![Complex64::ONE, i], vec![Complex64::ONE, -i]])
        }
        TransformKind::Identity => CMatrix::eye(n),
        TransformKind::Canonical { m } => return canonical_transform(n, m),
        TransformKind::Vandermonde(roots) => {
            if roots.len() != n {
                return Err(Error::BadDimension(format!(
                    "expected {n} roots, got {}",
                    roots.len()
                )));
            }
            let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
            for i in 0..n {
                for j in i + 1..n {
                    if (roots[i] - roots[j]).norm() <= 1e-12 * scale {
                        return Err(Error::DuplicateRoots);
                    }
                }
            }
            CMatrix::from_fn(n, n, |j, k| roots[j].powu(k as u32))
        }
    };
    validate_transform(matrix, DEFAULT_TOL)
}

fn dft_matrix(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |j, k| {
        Complex64::from_polar(1.0, -2.0 * PI * ((j * k) % n) as f64 / n as f64)
    })
}

/// Unnormalized +-1 Sylvester construction; index <-> group element by
/// binary expansion.
fn walsh_hadamard_matrix(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        if (i & j).count_ones() % 2 == 0 {
            Complex64::ONE
        } else {
            -Complex64::ONE
        }
    })
}

/// A pure deterministic binary operation on tubes, as the discovery engine
/// sees it: nothing but evaluations.
#[derive(Clone)]
pub struct BlackBoxOp {
    n: usize,
    name: String,
    eval: Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>,
}

impl BlackBoxOp {
    pub fn new(
        n: usize,
        name: impl Into<String>,
        eval: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            n,
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, a: &Tube, b: &Tube) -> Tube {
        assert_eq!(a.len(), self.n);
        assert_eq!(b.len(), self.n);
        Tube::new((self.eval)(a.as_slice(), b.as_slice()))
    }
}

impl std::fmt::Debug for BlackBoxOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlackBoxOp")
            .field("n", &self.n)
            .field("name", &self.name)
            .finish()
    }
}

/// Brute-force oracle products.
#[derive(Clone, Debug)]
pub enum OracleKind {
    /// Circulant matrix-vector product `circ(a) * b`.
    CircConv,
    /// Coefficient product of polynomials modulo X^n + 1.
    NegacyclicConv,
    /// Convolution over the group of bit vectors: `c_i = sum_j a_j b_{i xor j}`.
    XorConv,
    /// `[a1 b1, a1 b2 + a2 b1]`; has no weak inverses, so not a tubal ring.
    DualNumbers,
    /// `[a1 b1 + a2 b2, a1 b2 + a2 b1]`.
    SplitComplex,
    /// Multiplication in the complex plane, `[a1 b1 - a2 b2, a1 b2 + a2 b1]`.
    ComplexField,
    /// The ring product of an existing spec, wrapped as a black box.
    FromTransform(TransformSpec),
}

pub fn oracle_op(kind: OracleKind, n: usize) -> Result<BlackBoxOp> {
    if n == 0 {
        return Err(Error::BadDimension("dimension must be at least 1".into()));
    }
    let op = match kind {
        OracleKind::CircConv => BlackBoxOp::new(n, format!("circ-conv-{n}"), move |a, b| {
            let mut c = vec![0.0; n];
            for (i, ci) in c.iter_mut().enumerate() {
                for (j, aj) in a.iter().enumerate() {
                    *ci += aj * b[(i + n - j) % n];
                }
            }
            c
        }),
        OracleKind::NegacyclicConv => {
            BlackBoxOp::new(n, format!("negacyclic-conv-{n}"), move |a, b| {
                let mut c = vec![0.0; n];
                for (i, ai) in a.iter().enumerate() {
                    for (j, bj) in b.iter().enumerate() {
                        if i + j < n {
                            c[i + j] += ai * bj;
                        } else {
                            c[i + j - n] -= ai * bj;
                        }
                    }
                }
                c
            })
        }
        OracleKind::XorConv => {
            if !n.is_power_of_two() {
                return Err(Error::BadDimension(format!(
                    "xor convolution needs a power-of-two size, got {n}"
                )));
            }
            BlackBoxOp::new(n, format!("xor-conv-{n}"), move |a, b| {
                let mut c = vec![0.0; n];
                for (i, ci) in c.iter_mut().enumerate() {
                    for (j, aj) in a.iter().enumerate() {
                        *ci += aj * b[i ^ j];
                    }
                }
                c
            })
        }
        OracleKind::DualNumbers => {
            if n != 2 {
                return Err(Error::BadDimension("dual numbers need n = 2".into()));
            }
            BlackBoxOp::new(2, "dual-numbers", |a, b| {
                vec![a[0] * b[0], a[0] * b[1] + a[1] * b[0]]
            })
        }
        OracleKind::SplitComplex => {
            if n != 2 {
                return Err(Error::BadDimension("split-complex needs n = 2".into()));
            }
            BlackBoxOp::new(2, "split-complex", |a, b| {
                vec![a[0] * b[0] + a[1] * b[1], a[0] * b[1] + a[1] * b[0]]
            })
        }
        OracleKind::ComplexField => {
            if n != 2 {
                return Err(Error::BadDimension("complex-field needs n = 2".into()));
            }
            BlackBoxOp::new(2, "complex-field", |a, b| {
                vec![a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]]
            })
        }
        OracleKind::FromTransform(spec) => {
            if spec.n() != n {
                return Err(Error::BadDimension(format!(
                    "spec has dimension {}, expected {n}",
                    spec.n()
                )));
            }
            BlackBoxOp::new(n, format!("star-n{n}-spec{}", spec.id()), move |a, b| {
                spec.star(&Tube::from(a), &Tube::from(b))
                    .expect("validated spec keeps real tubes real")
                    .as_slice()
                    .to_vec()
            })
        }
    };
    Ok(op)
}

/// Max residual over `trials` random pairs between the xor-convolution
/// oracle and the Walsh-Hadamard ring product at size 2^k.
pub fn group_ring_wht_equivalence_check(k: u32, trials: usize) -> f64 {
    let n = 1usize << k;
    let spec = make_transform(TransformKind::WalshHadamard, n).expect("valid size");
    let op = oracle_op(OracleKind::XorConv, n).expect("valid size");
    let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let a = random_tube(&mut rng, n);
        let b = random_tube(&mut rng, n);
        let via_oracle = op.eval(&a, &b);
        let via_ring = spec.star(&a, &b).expect("valid spec");
        worst = worst.max(via_oracle.max_abs_diff(&via_ring));
    }
    worst
}

/// Every named transform up to dimension `max_n`, for test sweeps.
pub fn catalog_specs(max_n: usize) -> Vec<(String, TransformSpec)> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.push((
            format!("dft-{n}"),
            make_transform(TransformKind::Dft, n).unwrap(),
        ));
        out.push((
            format!("skew-dft-{n}"),
            make_transform(TransformKind::SkewDft, n).unwrap(),
        ));
        out.push((
            format!("identity-{n}"),
            make_transform(TransformKind::Identity, n).unwrap(),
        ));
        if n.is_power_of_two() {
            out.push((
                format!("wht-{n}"),
                make_transform(TransformKind::WalshHadamard, n).unwrap(),
            ));
        }
        let mut m = n % 2;
        while m <= n {
            out.push((
                format!("canonical-{n}-{m}"),
                make_transform(TransformKind::Canonical { m }, n).unwrap(),
            ));
            m += 2;
        }
    }
    if max_n >= 2 {
        out.push((
            "split-complex".into(),
            make_transform(TransformKind::SplitComplex, 2).unwrap(),
        ));
        out.push((
            "complex-field".into(),
            make_transform(TransformKind::ComplexField, 2).unwrap(),
        ));
    }
    out
}
