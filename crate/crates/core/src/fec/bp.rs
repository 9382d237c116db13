//! Sum-product belief propagation in the LLR domain (positive LLR favours 0).

use crate::bits::BitVector;
use crate::error::{Error, Result};

use super::ldpc::LdpcCode;

pub const DEFAULT_MAX_ITERS: usize = 50;

const MSG_CLAMP: f64 = 60.0;
const TANH_CLAMP: f64 = 1.0 - 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub struct BpOutput {
    /// Systematic part of the hard decision.
    pub info: BitVector,
    pub codeword: BitVector,
    /// The hard decision satisfies every check.
    pub converged: bool,
    pub iterations: usize,
}

fn hard(total: &[f64]) -> BitVector {
    total.iter().map(|&l| l < 0.0).collect()
}

/// Decodes `llrs` (length n). Zero iterations are reported when the channel
/// hard decision is already a codeword.
pub fn decode_bp(llrs: &[f64], code: &LdpcCode, max_iters: usize) -> Result<BpOutput> {
    if llrs.len() != code.n() {
        return Err(Error::Size(format!(
            "{} llrs for a length-{} code",
            llrs.len(),
            code.n()
        )));
    }
    let checks = code.checks();
    let n = code.n();
    // edge storage in check-major order
    let mut offsets = Vec::with_capacity(checks.len() + 1);
    offsets.push(0);
    for r in checks {
        offsets.push(offsets.last().unwrap() + r.len());
    }
    let edge_var: Vec<usize> = checks.iter().flatten().copied().collect();
    let mut var_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &v) in edge_var.iter().enumerate() {
        var_edges[v].push(e);
    }
    let channel: Vec<f64> = llrs.iter().map(|l| l.clamp(-MSG_CLAMP, MSG_CLAMP)).collect();
    let mut v2c: Vec<f64> = edge_var.iter().map(|&v| channel[v]).collect();
    let mut c2v = vec![0.0; edge_var.len()];
    let mut total = channel.clone();
    let mut word = hard(&total);
    let mut converged = code.is_codeword(&word);
    let mut iterations = 0;
    let mut t = Vec::new();
    let mut prefix = Vec::new();
    while !converged && iterations < max_iters {
        iterations += 1;
        for r in 0..checks.len() {
            let (a, b) = (offsets[r], offsets[r + 1]);
            t.clear();
            t.extend(v2c[a..b].iter().map(|&m| (0.5 * m).tanh()));
            prefix.clear();
            let mut acc = 1.0;
            for &x in &t {
                prefix.push(acc);
                acc *= x;
            }
            let mut suffix = 1.0;
            for i in (0..t.len()).rev() {
                let p = (prefix[i] * suffix).clamp(-TANH_CLAMP, TANH_CLAMP);
                c2v[a + i] = 2.0 * p.atanh();
                suffix *= t[i];
            }
        }
        for v in 0..n {
            let sum: f64 = channel[v] + var_edges[v].iter().map(|&e| c2v[e]).sum::<f64>();
            total[v] = sum;
            for &e in &var_edges[v] {
                v2c[e] = (sum - c2v[e]).clamp(-MSG_CLAMP, MSG_CLAMP);
            }
        }
        word = hard(&total);
        converged = code.is_codeword(&word);
    }
    let info = word.slice(0, code.k())?;
    Ok(BpOutput {
        info,
        codeword: word,
        converged,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn clean_llrs(cw: &BitVector, mag: f64) -> Vec<f64> {
        cw.iter().map(|b| if b { -mag } else { mag }).collect()
    }

    #[test]
    fn noiseless_codeword_needs_no_iterations() {
        let code = LdpcCode::construct_with(200, 70, 3, 1).unwrap();
        let mut rng = crate::rng::stream(3);
        let info: BitVector = (0..70).map(|_| rng.random_bool(0.5)).collect();
        let cw = code.encode(&info).unwrap();
        let out = decode_bp(&clean_llrs(&cw, 8.0), &code, 50).unwrap();
        assert!(out.converged);
        assert!(out.iterations <= 1);
        assert_eq!(out.info, info);
    }

    #[test]
    fn wrong_length_is_rejected() {
        let code = LdpcCode::construct_with(200, 70, 3, 1).unwrap();
        assert!(decode_bp(&[0.0; 10], &code, 5).is_err());
    }

    #[test]
    fn all_zero_llrs_decide_the_zero_codeword() {
        let code = LdpcCode::construct_with(200, 70, 3, 1).unwrap();
        let out = decode_bp(&[0.0; 200], &code, 5).unwrap();
        // zero llrs decide all-zero, which is a codeword
        assert!(out.converged);
        assert_eq!(out.codeword.count_ones(), 0);
    }
}
