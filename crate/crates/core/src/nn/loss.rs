use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};

/// Max-shifted softmax.
pub fn softmax(logits: ArrayView1<f64>) -> Array1<f64> {
    let max = logits.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let e = logits.mapv(|v| (v - max).exp());
    let s = e.sum();
    e / s
}

/// Cross-entropy of one logit row against `target`; gradient is p − onehot.
pub fn softmax_cross_entropy(logits: ArrayView1<f64>, target: usize) -> Result<(f64, Array1<f64>)> {
    if target >= logits.len() {
        return Err(Error::OutOfRange {
            index: target,
            len: logits.len(),
        });
    }
    let max = logits.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let lse = max + logits.mapv(|v| (v - max).exp()).sum().ln();
    let mut grad = logits.mapv(|v| (v - lse).exp());
    grad[target] -= 1.0;
    Ok((lse - logits[target], grad))
}

/// Mean cross-entropy over rows; the gradient is scaled by 1/rows.
pub fn softmax_cross_entropy_rows(logits: &Array2<f64>, targets: &[usize]) -> Result<(f64, Array2<f64>)> {
    if logits.nrows() != targets.len() {
        return Err(Error::Shape(format!(
            "{} logit rows for {} targets",
            logits.nrows(),
            targets.len()
        )));
    }
    let n = targets.len().max(1) as f64;
    let mut grad = Array2::zeros(logits.raw_dim());
    let mut total = 0.0;
    for (i, &t) in targets.iter().enumerate() {
        let (l, g) = softmax_cross_entropy(logits.row(i), t)?;
        total += l;
        grad.row_mut(i).assign(&(g / n));
    }
    Ok((total / n, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn uniform_logits_give_log_v() {
        let z = Array1::from_elem(7, 0.3);
        let (l, _) = softmax_cross_entropy(z.view(), 2).unwrap();
        assert!((l - 7f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let z = array![1000.0, -3.0, 2.5, 999.0];
        assert!((softmax(z.view()).sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_target() {
        assert!(softmax_cross_entropy(array![1.0, 2.0].view(), 2).is_err());
    }

    #[test]
    fn gradient_matches_central_differences() {
        let z = array![0.2, -1.3, 0.7, 2.1, -0.4];
        let (_, g) = softmax_cross_entropy(z.view(), 3).unwrap();
        let h = 1e-4;
        for i in 0..z.len() {
            let mut zp = z.clone();
            zp[i] += h;
            let mut zm = z.clone();
            zm[i] -= h;
            let fd = (softmax_cross_entropy(zp.view(), 3).unwrap().0 - softmax_cross_entropy(zm.view(), 3).unwrap().0)
                / (2.0 * h);
            assert!((fd - g[i]).abs() / g[i].abs().max(1e-6) < 1e-5, "coord {i}");
        }
    }
}
