//! The commutative ring of tubes defined by a validated transform: product,
//! unit, conjugation, weak inverse, and the entrywise partial order in the
//! transform domain.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::transform::TransformSpec;
use crate::tube::Tube;

impl TransformSpec {
    /// Forward transform of a tube.
    pub fn apply(&self, a: &Tube) -> Vec<Complex64> {
        assert_eq!(a.len(), self.n(), "tube length does not match transform");
        self.matrix()
            .matvec(&to_complex(a.as_slice()))
    }

    /// Inverse transform with the imaginary residue checked and stripped.
    pub fn apply_inverse(&self, v: &[Complex64]) -> Result<Tube> {
        assert_eq!(v.len(), self.n(), "length does not match transform");
        self.strip_real(self.inverse_matrix().matvec(v))
    }

    fn strip_real(&self, v: Vec<Complex64>) -> Result<Tube> {
        let scale = 1.0 + v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let residue = v.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let threshold = self.tol() * scale;
        if residue > threshold {
            return Err(Error::ResidualImaginary { residue, threshold });
        }
        Ok(Tube::new(v.into_iter().map(|z| z.re).collect()))
    }

    /// The tube product: inverse transform of the entrywise product of the
    /// transformed operands.
    pub fn star(&self, a: &Tube, b: &Tube) -> Result<Tube> {
        let ah = self.apply(a);
        let bh = self.apply(b);
        let prod: Vec<Complex64> = ah.iter().zip(&bh).map(|(x, y)| x * y).collect();
        self.strip_real(self.inverse_matrix().matvec(&prod))
    }

    /// Multiplicative unit of the ring: the inverse transform of all-ones.
    pub fn unit(&self) -> Tube {
        let ones = vec![Complex64::ONE; self.n()];
        self.apply_inverse(&ones)
            .expect("unit of a validated transform is real")
    }

    /// Ring conjugation `a* = M^{-1} conj(M a)`; an involution that
    /// distributes over the product.
    pub fn conjugate(&self, a: &Tube) -> Result<Tube> {
        let ah = self.apply(a);
        let conj: Vec<Complex64> = ah.iter().map(|z| z.conj()).collect();
        self.strip_real(self.inverse_matrix().matvec(&conj))
    }

    /// Weak inverse: entrywise pseudoinversion in the transform domain.
    /// Total; zero tubes map to zero. Entries below
    /// `n * eps * max|M a|` are treated as zero.
    pub fn weak_inverse(&self, a: &Tube) -> Tube {
        let ah = self.apply(a);
        let zero_tol = self.n() as f64
            * f64::EPSILON
            * ah.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pinv: Vec<Complex64> = ah
            .iter()
            .map(|z| {
                if z.norm() > zero_tol && z.norm() > 0.0 {
                    Complex64::ONE / z
                } else {
                    Complex64::ZERO
                }
            })
            .collect();
        self.apply_inverse(&pinv)
            .expect("weak inverse of a real tube is real for a valid row structure")
    }

    /// Partial order: `a <= b` when `M (b - a)` is real and entrywise
    /// non-negative, both up to the spec tolerance.
    pub fn leq(&self, a: &Tube, b: &Tube) -> bool {
        let d = self.apply(&b.sub(a));
        let scale = 1.0 + d.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let max_imag = d.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let min_real = d.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        max_imag <= self.tol() * scale && min_real >= -self.tol() * scale
    }
}

fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{canonical_transform, validate_transform, DEFAULT_TOL};
    use crate::linalg::CMatrix;

    fn dft(n: usize) -> TransformSpec {
        let m = CMatrix::from_fn(n, n, |j, k| {
            Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64)
        });
        validate_transform(m, DEFAULT_TOL).unwrap()
    }

    fn split_complex() -> TransformSpec {
        let m = CMatrix::from_rows(&[
            vec![Complex64::ONE, Complex64::ONE],
            vec![Complex64::ONE, -Complex64::ONE],
        ]);
        validate_transform(m, DEFAULT_TOL).unwrap()
    }

    fn complex_field() -> TransformSpec {
        let i = Complex64::new(0.0, 1.0);
        let m = CMatrix::from_rows(&[vec![Complex64::ONE, i], vec![Complex64::ONE, -i]]);
        validate_transform(m, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn star_matches_known_products() {
        // circulant product under the 3-point Fourier transform
        let c = dft(3)
            .star(&Tube::new(vec![1.0, 2.0, 3.0]), &Tube::new(vec![4.0, 5.0, 6.0]))
            .unwrap();
        assert!(c.max_abs_diff(&Tube::new(vec![31.0, 31.0, 28.0])) < 1e-12);

        let c = split_complex()
            .star(&Tube::new(vec![1.0, 2.0]), &Tube::new(vec![3.0, 4.0]))
            .unwrap();
        assert!(c.max_abs_diff(&Tube::new(vec![11.0, 10.0])) < 1e-12);

        let c = complex_field()
            .star(&Tube::new(vec![1.0, 2.0]), &Tube::new(vec![3.0, 4.0]))
            .unwrap();
        assert!(c.max_abs_diff(&Tube::new(vec![-5.0, 10.0])) < 1e-12);
    }

    #[test]
    fn unit_element() {
        let e = dft(4).unit();
        assert!(e.max_abs_diff(&Tube::basis(4, 0)) < 1e-12);

        let spec = validate_transform(CMatrix::eye(3), DEFAULT_TOL).unwrap();
        assert!(e_is_ones(&spec.unit()));

        let e = split_complex().unit();
        assert!(e.max_abs_diff(&Tube::new(vec![1.0, 0.0])) < 1e-12);

        // unit law on a few random-ish tubes
        let spec = dft(5);
        let e = spec.unit();
        let b = Tube::new(vec![0.3, -1.2, 4.0, 0.0, 2.5]);
        assert!(spec.star(&e, &b).unwrap().max_abs_diff(&b) < 1e-12);
    }

    fn e_is_ones(t: &Tube) -> bool {
        t.as_slice().iter().all(|&x| (x - 1.0).abs() < 1e-12)
    }

    #[test]
    fn conjugation() {
        // fully real transform: conjugation is the identity
        let spec = canonical_transform(3, 3).unwrap();
        let a = Tube::new(vec![1.0, -2.0, 0.5]);
        assert!(spec.conjugate(&a).unwrap().max_abs_diff(&a) < 1e-12);

        let c = complex_field().conjugate(&Tube::new(vec![1.0, 2.0])).unwrap();
        assert!(c.max_abs_diff(&Tube::new(vec![1.0, -2.0])) < 1e-12);

        let c = dft(3).conjugate(&Tube::new(vec![0.0, 1.0, 0.0])).unwrap();
        assert!(c.max_abs_diff(&Tube::new(vec![0.0, 0.0, 1.0])) < 1e-12);
    }

    #[test]
    fn weak_inverse_closed_forms() {
        let spec = split_complex();
        let w = spec.weak_inverse(&Tube::new(vec![3.0, 1.0]));
        assert!(w.max_abs_diff(&Tube::new(vec![3.0 / 8.0, -1.0 / 8.0])) < 1e-12);
        let w = spec.weak_inverse(&Tube::new(vec![2.0, 2.0]));
        assert!(w.max_abs_diff(&Tube::new(vec![1.0 / 8.0, 1.0 / 8.0])) < 1e-12);
        let w = spec.weak_inverse(&Tube::zeros(2));
        assert_eq!(w, Tube::zeros(2));
    }

    #[test]
    fn partial_order() {
        let spec = split_complex(); // the 2-point Fourier transform
        let zero = Tube::zeros(2);
        assert!(spec.leq(&zero, &Tube::new(vec![1.0, 0.0])));
        assert!(!spec.leq(&zero, &Tube::new(vec![0.0, 1.0])));
        let a = Tube::new(vec![0.7, -0.2]);
        assert!(spec.leq(&a, &a));
    }
}
