//! Tubes: real length-n vectors, the scalars of the algebra.

use rand::Rng;

/// A real length-n vector. Addition is entrywise; the ring product depends on
/// a [`crate::transform::TransformSpec`] and lives there.
#[derive(Clone, Debug, PartialEq)]
pub struct Tube {
    data: Vec<f64>,
}

impl Tube {
    pub fn new(data: Vec<f64>) -> Self {
        assert!(data.iter().all(|v| v.is_finite()), "tube entries must be finite");
        Self { data }
    }

    pub fn zeros(n: usize) -> Self {
        Self { data: vec![0.0; n] }
    }

    /// Standard basis tube e_i.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut data = vec![0.0; n];
        data[i] = 1.0;
        Self { data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn add(&self, other: &Tube) -> Tube {
        assert_eq!(self.len(), other.len());
        Tube {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Tube) -> Tube {
        assert_eq!(self.len(), other.len());
        Tube {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Tube {
        Tube {
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Tube) -> f64 {
        assert_eq!(self.len(), other.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl From<Vec<f64>> for Tube {
    fn from(data: Vec<f64>) -> Self {
        Tube::new(data)
    }
}

impl From<&[f64]> for Tube {
    fn from(data: &[f64]) -> Self {
        Tube::new(data.to_vec())
    }
}

impl std::ops::Index<usize> for Tube {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

/// Uniform entries in [-1, 1).
pub fn random_tube<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Tube {
    Tube::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = Tube::new(vec![1.0, 2.0]);
        let b = Tube::new(vec![3.0, -1.0]);
        assert_eq!(a.add(&b).as_slice(), &[4.0, 1.0]);
        assert_eq!(a.sub(&b).as_slice(), &[-2.0, 3.0]);
        assert_eq!(a.scale(2.0).as_slice(), &[2.0, 4.0]);
        assert_eq!(Tube::basis(3, 1).as_slice(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    #[should_panic(expected = "finite")]
    fn rejects_nan() {
        let _ = Tube::new(vec![f64::NAN]);
    }
}
