//! Small hand-differentiated neural toolkit: dense layers, activations,
//! softmax cross-entropy, Adam, finite-difference gradient checking and
//! JSON checkpoints. Everything runs in f64.

mod adam;
mod checkpoint;
mod gradcheck;
mod layers;
mod loss;

use ndarray::Array2;
use rand::Rng;

pub use adam::Adam;
pub use checkpoint::{Checkpoint, NamedArray, CHECKPOINT_VERSION};
pub use gradcheck::gradient_check;
pub use layers::{Activation, Affine};
pub use loss::{softmax, softmax_cross_entropy, softmax_cross_entropy_rows};

/// A trainable array and its accumulated gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct Parameter {
    pub value: Array2<f64>,
    pub grad: Array2<f64>,
}

impl Parameter {
    pub fn new(value: Array2<f64>) -> Self {
        let grad = Array2::zeros(value.raw_dim());
        Parameter { value, grad }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(Array2::zeros((rows, cols)))
    }

    /// Glorot-uniform initialization in ±√(6/(fan_in+fan_out)).
    pub fn glorot(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        let limit = (6.0 / (rows + cols) as f64).sqrt();
        Self::new(Array2::from_shape_simple_fn((rows, cols), || {
            rng.random_range(-limit..=limit)
        }))
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(0.0);
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }
}

/// Anything exposing its parameters in a fixed order.
pub trait Model {
    fn params_mut(&mut self) -> Vec<&mut Parameter>;

    fn zero_grad(&mut self) {
        for p in self.params_mut() {
            p.zero_grad();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glorot_is_seeded_and_bounded() {
        let a = Parameter::glorot(10, 6, &mut crate::rng::stream(1));
        let b = Parameter::glorot(10, 6, &mut crate::rng::stream(1));
        assert_eq!(a, b);
        let lim = (6.0f64 / 16.0).sqrt();
        assert!(a.value.iter().all(|v| v.abs() <= lim));
    }
}
