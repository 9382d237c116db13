use ndarray::Array2;

use super::Parameter;

/// Adam with bias correction. State is matched to parameters by position.
#[derive(Clone, Debug)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: i32,
    moments: Vec<(Array2<f64>, Array2<f64>)>,
}

impl Adam {
    pub fn new(learning_rate: f64) -> Self {
        Adam {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            moments: Vec::new(),
        }
    }

    pub fn step(&mut self, params: &mut [&mut Parameter]) {
        if self.moments.len() != params.len() {
            self.moments = params
                .iter()
                .map(|p| (Array2::zeros(p.value.raw_dim()), Array2::zeros(p.value.raw_dim())))
                .collect();
        }
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.learning_rate, self.epsilon);
        for (p, (m, v)) in params.iter_mut().zip(self.moments.iter_mut()) {
            ndarray::Zip::from(&mut p.value)
                .and(&p.grad)
                .and(m)
                .and(v)
                .for_each(|w, &g, m, v| {
                    *m = b1 * *m + (1.0 - b1) * g;
                    *v = b2 * *v + (1.0 - b2) * g * g;
                    *w -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
                });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut p = Parameter::new(array![[1.5, -2.0]]);
        let mut opt = Adam::new(0.1);
        opt.step(&mut [&mut p]);
        assert_eq!(p.value, array![[1.5, -2.0]]);
    }

    #[test]
    fn one_step_descends_on_square() {
        let mut p = Parameter::new(array![[1.0]]);
        p.grad = &p.value * 2.0;
        Adam::new(0.1).step(&mut [&mut p]);
        assert!(p.value[[0, 0]] < 1.0);
    }

    #[test]
    fn converges_on_convex_quadratic() {
        // f(w) = (w0 - 1)^2 + 4 (w1 + 2)^2, minimum 0 at (1, -2)
        let f = |w: &Array2<f64>| (w[[0, 0]] - 1.0).powi(2) + 4.0 * (w[[0, 1]] + 2.0).powi(2);
        let mut p = Parameter::new(array![[0.0, 0.0]]);
        let mut opt = Adam::new(0.1);
        for _ in 0..200 {
            p.grad = array![[2.0 * (p.value[[0, 0]] - 1.0), 8.0 * (p.value[[0, 1]] + 2.0)]];
            opt.step(&mut [&mut p]);
        }
        assert!(f(&p.value) < 1e-3, "f = {}", f(&p.value));
    }
}
