use rand::seq::index;

use crate::rng;

use super::Model;

/// Largest relative error between analytic and central-difference gradients.
///
/// `loss(model, backward)` must return the loss and, when `backward` is true,
/// accumulate gradients into the (already zeroed) parameters. Up to `samples`
/// coordinates are drawn at random; all of them when the model is smaller.
/// Relative error is `|a − n| / max(|a|, |n|, 1e-6)`.
pub fn gradient_check<M: Model>(
    model: &mut M,
    mut loss: impl FnMut(&mut M, bool) -> f64,
    eps: f64,
    samples: usize,
    seed: u64,
) -> f64 {
    model.zero_grad();
    loss(model, true);
    let sizes: Vec<usize> = model.params_mut().iter().map(|p| p.len()).collect();
    let analytic: Vec<Vec<f64>> = model
        .params_mut()
        .iter()
        .map(|p| p.grad.iter().copied().collect())
        .collect();
    let total: usize = sizes.iter().sum();
    let picks: Vec<usize> = if total <= samples {
        (0..total).collect()
    } else {
        let mut v = index::sample(&mut rng::stream(seed), total, samples).into_vec();
        v.sort_unstable();
        v
    };
    let mut worst = 0.0f64;
    for flat in picks {
        let (mut pi, mut off) = (0, flat);
        while off >= sizes[pi] {
            off -= sizes[pi];
            pi += 1;
        }
        let original = {
            let mut ps = model.params_mut();
            let slot = ps[pi].value.iter_mut().nth(off).unwrap();
            let o = *slot;
            *slot = o + eps;
            o
        };
        let plus = loss(model, false);
        set(model, pi, off, original - eps);
        let minus = loss(model, false);
        set(model, pi, off, original);
        let numeric = (plus - minus) / (2.0 * eps);
        let a = analytic[pi][off];
        let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
        worst = worst.max(err);
    }
    worst
}

fn set<M: Model>(model: &mut M, pi: usize, off: usize, v: f64) {
    let mut ps = model.params_mut();
    *ps[pi].value.iter_mut().nth(off).unwrap() = v;
}
