use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use semlink::fec::{assemble_llrs, decode_bp, select_bits, LdpcCode, PunctureSchedule, DEFAULT_K, DEFAULT_N};
use semlink::{rng, BitVector};

fn random_info(len: usize, r: &mut impl Rng) -> BitVector {
    (0..len).map(|_| r.random_bool(0.5)).collect()
}

/// Shortest cycle in the Tanner graph by breadth-first search from every
/// variable node.
fn tanner_girth(code: &LdpcCode) -> usize {
    let n = code.n();
    let m = code.m();
    // nodes 0..n are variables, n..n+m are checks
    let adj = |u: usize| -> Vec<usize> {
        if u < n {
            code.vars()[u].iter().map(|&c| n + c).collect()
        } else {
            code.checks()[u - n].clone()
        }
    };
    let mut best = usize::MAX;
    for root in 0..n {
        let mut dist = vec![usize::MAX; n + m];
        let mut parent = vec![usize::MAX; n + m];
        dist[root] = 0;
        let mut q = VecDeque::from([root]);
        while let Some(u) = q.pop_front() {
            if 2 * dist[u] >= best {
                break;
            }
            for w in adj(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    q.push_back(w);
                } else if parent[u] != w {
                    best = best.min(dist[u] + dist[w] + 1);
                }
            }
        }
    }
    best
}

#[test]
fn default_code_shape_and_determinism() {
    let a = LdpcCode::construct(1).unwrap();
    let b = LdpcCode::construct(1).unwrap();
    assert_eq!(a, b);
    assert_eq!((a.n(), a.k()), (DEFAULT_N, DEFAULT_K));
    assert_eq!(a.k() * 16, a.n() * 5);
    assert!(a.vars().iter().all(|c| c.len() == 3));
    let g = tanner_girth(&a);
    assert!(g >= 6, "girth {g}");
}

#[test]
fn random_encodings_have_zero_syndrome() {
    let code = LdpcCode::construct(1).unwrap();
    let mut r = rng::stream(77);
    for _ in 0..10_000 {
        let len = if r.random_bool(0.2) {
            r.random_range(1..=DEFAULT_K)
        } else {
            DEFAULT_K
        };
        let cw = code.encode(&random_info(len, &mut r)).unwrap();
        assert!(code.is_codeword(&cw));
    }
}

#[test]
fn single_sign_flip_is_corrected() {
    let code = LdpcCode::construct(1).unwrap();
    let mut r = rng::stream(5);
    for trial in 0..50 {
        let info = random_info(DEFAULT_K, &mut r);
        let cw = code.encode(&info).unwrap();
        let mut llrs: Vec<f64> = cw.iter().map(|b| if b { -4.0 } else { 4.0 }).collect();
        let pos = r.random_range(0..DEFAULT_N);
        llrs[pos] = -llrs[pos];
        let out = decode_bp(&llrs, &code, 50).unwrap();
        assert!(out.converged, "trial {trial}");
        assert_eq!(out.info, info);
    }
}

fn hamming() -> LdpcCode {
    LdpcCode::from_parity_check(7, &[vec![0, 1, 3, 4], vec![0, 2, 3, 5], vec![1, 2, 3, 6]]).unwrap()
}

#[test]
fn toy_code_bp_matches_brute_force_ml() {
    let code = hamming();
    let codewords: Vec<BitVector> = (0..16u32)
        .map(|v| {
            let info: BitVector = (0..4).map(|k| (v >> (3 - k)) & 1 == 1).collect();
            code.encode(&info).unwrap()
        })
        .collect();
    let mut r = rng::stream(2024);
    // BPSK, Es/N0 = 7 dB
    let sigma2 = 10f64.powf(-0.7) / 2.0;
    let trials = 10_000;
    let mut agree = 0;
    for _ in 0..trials {
        let tx = &codewords[r.random_range(0..16)];
        let llrs: Vec<f64> = tx
            .iter()
            .map(|b| {
                let s = if b { -1.0 } else { 1.0 };
                let n: f64 = StandardNormal.sample(&mut r);
                2.0 * (s + sigma2.sqrt() * n) / sigma2
            })
            .collect();
        let ml = codewords
            .iter()
            .max_by(|a, b| {
                let score =
                    |c: &BitVector| -> f64 { c.iter().zip(&llrs).map(|(bit, l)| if bit { -l } else { *l }).sum() };
                score(a).partial_cmp(&score(b)).unwrap()
            })
            .unwrap();
        let bp = decode_bp(&llrs, &code, 50).unwrap();
        if &bp.codeword == ml {
            agree += 1;
        }
    }
    let rate = agree as f64 / trials as f64;
    assert!(rate >= 0.99, "BP/ML agreement {rate}");
}

#[test]
fn schedule_partitions_the_codeword() {
    let code = LdpcCode::construct(1).unwrap();
    let s = PunctureSchedule::default_for(&code).unwrap();
    assert_eq!(s.cumulative(), &[736, 1104, 1472]);
    let cw = code.encode(&BitVector::zeros(DEFAULT_K)).unwrap();
    let r1 = select_bits(&cw, &s, 1, &[]).unwrap();
    assert_eq!(r1.bits.len(), 736);
    assert_eq!(DEFAULT_K as f64 / r1.bits.len() as f64, 5.0 / 8.0);
    let r3 = select_bits(&cw, &s, 3, &[]).unwrap();
    assert_eq!(r3.bits.len(), 368);
    let mut seen = vec![0; DEFAULT_N];
    for round in 1..=3 {
        for p in select_bits(&cw, &s, round, &[]).unwrap().positions {
            seen[p] += 1;
        }
    }
    assert!(seen.iter().all(|&c| c == 1));
    assert!(select_bits(&cw, &s, 0, &[]).is_err());
    assert!(select_bits(&cw, &s, 4, &[]).is_err());
    assert!(PunctureSchedule::new(vec![400, 1472], &code).is_err());
    assert!(PunctureSchedule::new(vec![736, 736, 1472], &code).is_err());
}

#[test]
fn shortened_bits_are_not_sent_and_decode_to_zero() {
    let code = LdpcCode::construct(1).unwrap();
    let s = PunctureSchedule::default_for(&code).unwrap();
    let mut r = rng::stream(8);
    let info = random_info(300, &mut r);
    let cw = code.encode(&info).unwrap();
    let short = code.shortened(300);
    let r1 = select_bits(&cw, &s, 1, &short).unwrap();
    assert_eq!(r1.bits.len(), 736 - 160);
    assert!(r1.positions.iter().all(|p| !short.contains(p)));
    // all-erased channel apart from round 1, with sent bits given clean llrs
    let llr1: Vec<f64> = r1.bits.iter().map(|b| if b { -6.0 } else { 6.0 }).collect();
    let llrs = assemble_llrs(&[(1, llr1)], &code, &s, &short).unwrap();
    assert!(llrs[736..].iter().all(|&l| l == 0.0));
    assert!(short.iter().all(|&p| llrs[p] == 40.0));
    let out = decode_bp(&llrs, &code, 50).unwrap();
    assert!(out.converged);
    assert_eq!(out.info.slice(0, 300).unwrap(), info);
    assert!(short.iter().all(|&p| !out.codeword.get(p).unwrap()));
}

#[test]
fn all_rounds_leave_no_erasures() {
    let code = LdpcCode::construct(1).unwrap();
    let s = PunctureSchedule::default_for(&code).unwrap();
    let cw = code.encode(&BitVector::zeros(DEFAULT_K)).unwrap();
    let received: Vec<(usize, Vec<f64>)> = (1..=3)
        .map(|round| {
            let sel = select_bits(&cw, &s, round, &[]).unwrap();
            (round, vec![1.0; sel.bits.len()])
        })
        .collect();
    let llrs = assemble_llrs(&received, &code, &s, &[]).unwrap();
    assert!(llrs.iter().all(|&l| l != 0.0));
    assert!(assemble_llrs(&[(1, vec![1.0; 3])], &code, &s, &[]).is_err());
}

/// BPSK over AWGN at Es/N0 = 0 dB: rate 5/8 is above capacity, 5/16 below.
#[test]
fn more_rounds_never_hurt() {
    let code = LdpcCode::construct(1).unwrap();
    let s = PunctureSchedule::default_for(&code).unwrap();
    let mut r = rng::stream(31);
    let sigma2: f64 = 1.0;
    let blocks = 1000;
    let mut ok = [0usize; 3];
    for _ in 0..blocks {
        let info = random_info(DEFAULT_K, &mut r);
        let cw = code.encode(&info).unwrap();
        let rx: Vec<f64> = cw
            .iter()
            .map(|b| {
                let x = if b { -1.0 } else { 1.0 };
                let n: f64 = StandardNormal.sample(&mut r);
                2.0 * (x + sigma2.sqrt() * n) / sigma2
            })
            .collect();
        for rounds in 1..=3 {
            let received: Vec<(usize, Vec<f64>)> = (1..=rounds)
                .map(|round| {
                    let pos = s.positions(round, &[]).unwrap();
                    (round, pos.iter().map(|&p| rx[p]).collect())
                })
                .collect();
            let llrs = assemble_llrs(&received, &code, &s, &[]).unwrap();
            let out = decode_bp(&llrs, &code, 50).unwrap();
            if out.converged && out.info == info {
                ok[rounds - 1] += 1;
            }
        }
    }
    assert!(ok[0] <= ok[1] && ok[1] <= ok[2], "successes per round count {ok:?}");
    assert!(ok[2] > ok[0], "{ok:?}");
}

#[test]
fn decoder_is_deterministic() {
    let code = LdpcCode::construct(1).unwrap();
    let mut r = rng::stream(4);
    let llrs: Vec<f64> = (0..DEFAULT_N).map(|_| r.random_range(-2.0..3.0)).collect();
    assert_eq!(
        decode_bp(&llrs, &code, 50).unwrap(),
        decode_bp(&llrs, &code, 50).unwrap()
    );
}
