use ndarray::Array2;

use crate::error::{Error, Result};

use super::Parameter;

/// y = x·W + b over a batch of row vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine {
    pub weight: Parameter,
    pub bias: Parameter,
}

impl Affine {
    pub fn new(weight: Parameter, bias: Parameter) -> Self {
        Affine { weight, bias }
    }

    pub fn glorot(inputs: usize, outputs: usize, rng: &mut impl rand::Rng) -> Self {
        Affine {
            weight: Parameter::glorot(inputs, outputs, rng),
            bias: Parameter::zeros(1, outputs),
        }
    }

    pub fn inputs(&self) -> usize {
        self.weight.value.nrows()
    }

    pub fn outputs(&self) -> usize {
        self.weight.value.ncols()
    }

    pub fn forward(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.inputs() {
            return Err(Error::Shape(format!(
                "input width {} for a {}x{} layer",
                x.ncols(),
                self.inputs(),
                self.outputs()
            )));
        }
        Ok(x.dot(&self.weight.value) + &self.bias.value)
    }

    /// Accumulates weight and bias gradients and returns dL/dx.
    pub fn backward(&mut self, x: &Array2<f64>, grad_out: &Array2<f64>) -> Result<Array2<f64>> {
        if grad_out.ncols() != self.outputs() || grad_out.nrows() != x.nrows() {
            return Err(Error::Shape(format!(
                "output gradient {:?} for input {:?}",
                grad_out.dim(),
                x.dim()
            )));
        }
        self.weight.grad += &x.t().dot(grad_out);
        self.bias.grad += &grad_out.sum_axis(ndarray::Axis(0)).insert_axis(ndarray::Axis(0));
        Ok(grad_out.dot(&self.weight.value.t()))
    }

    pub fn params_mut(&mut self) -> [&mut Parameter; 2] {
        [&mut self.weight, &mut self.bias]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Relu,
}

impl Activation {
    pub fn forward(self, x: &Array2<f64>) -> Array2<f64> {
        match self {
            Activation::Tanh => x.mapv(f64::tanh),
            Activation::Relu => x.mapv(|v| v.max(0.0)),
        }
    }

    /// Gradient from the stored forward output `y`.
    pub fn backward(self, y: &Array2<f64>, grad_out: &Array2<f64>) -> Array2<f64> {
        match self {
            Activation::Tanh => grad_out * &y.mapv(|v| 1.0 - v * v),
            Activation::Relu => {
                let mut g = grad_out.clone();
                g.zip_mut_with(y, |g, &y| {
                    if y <= 0.0 {
                        *g = 0.0
                    }
                });
                g
            }
        }
    }
}
