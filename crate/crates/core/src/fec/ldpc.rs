//! Regular column-weight-3 LDPC code built by progressive edge growth (PEG),
//! made systematic by a column permutation.

use std::collections::VecDeque;

use rand::seq::IndexedRandom;

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_N: usize = 1472;
pub const DEFAULT_K: usize = 460;
pub const COLUMN_WEIGHT: usize = 3;
const MAX_ATTEMPTS: usize = 10;

/// Binary linear code with parity-check matrix stored sparsely.
///
/// Column order is systematic: positions `0..k` carry information bits and
/// `k..n` carry parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdpcCode {
    n: usize,
    k: usize,
    seed: u64,
    /// Variable indices per check row, ascending.
    checks: Vec<Vec<usize>>,
    /// Check indices per variable column, ascending.
    vars: Vec<Vec<usize>>,
    /// For each info bit, the parity bits it toggles, packed 64 per word.
    generator: Vec<Vec<u64>>,
}

type DenseRow = Vec<u64>;

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

fn bit(row: &DenseRow, c: usize) -> bool {
    (row[c / 64] >> (c % 64)) & 1 == 1
}

fn xor_into(dst: &mut DenseRow, src: &DenseRow) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// PEG construction of an m×n check matrix with the given column weight.
fn peg(n: usize, m: usize, col_weight: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = rng::stream(seed);
    let mut var_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut chk_adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut reached = vec![false; m];
    let mut var_seen = vec![false; n];
    for v in 0..n {
        for e in 0..col_weight.min(m) {
            let candidates: Vec<usize> = if e == 0 {
                (0..m).collect()
            } else {
                reached.iter_mut().for_each(|r| *r = false);
                var_seen.iter_mut().for_each(|s| *s = false);
                let mut count = 0;
                let mut frontier = VecDeque::from([v]);
                var_seen[v] = true;
                loop {
                    let mut fresh = Vec::new();
                    for &u in &frontier {
                        for &c in &var_adj[u] {
                            if !reached[c] {
                                reached[c] = true;
                                fresh.push(c);
                            }
                        }
                    }
                    if fresh.is_empty() {
                        break (0..m).filter(|&c| !reached[c]).collect();
                    }
                    if count + fresh.len() == m {
                        break fresh;
                    }
                    count += fresh.len();
                    let mut next = VecDeque::new();
                    for &c in &fresh {
                        for &u in &chk_adj[c] {
                            if !var_seen[u] {
                                var_seen[u] = true;
                                next.push_back(u);
                            }
                        }
                    }
                    frontier = next;
                }
            };
            let mut candidates: Vec<usize> = candidates.into_iter().filter(|c| !var_adj[v].contains(c)).collect();
            if candidates.is_empty() {
                candidates = (0..m).filter(|c| !var_adj[v].contains(c)).collect();
            }
            let min_deg = candidates.iter().map(|&c| chk_adj[c].len()).min().unwrap_or(0);
            let lightest: Vec<usize> = candidates
                .into_iter()
                .filter(|&c| chk_adj[c].len() == min_deg)
                .collect();
            let &c = lightest.choose(&mut rng).expect("PEG candidate set is never empty");
            var_adj[v].push(c);
            chk_adj[c].push(v);
        }
    }
    chk_adj
}

impl LdpcCode {
    /// The default (1472, 460) code.
    pub fn construct(seed: u64) -> Result<LdpcCode> {
        Self::construct_with(DEFAULT_N, DEFAULT_K, COLUMN_WEIGHT, seed)
    }

    /// PEG code of the given size. Retries with derived seeds when the check
    /// matrix is rank deficient.
    pub fn construct_with(n: usize, k: usize, col_weight: usize, seed: u64) -> Result<LdpcCode> {
        if k >= n {
            return Err(Error::InvalidArgument(format!("k = {k} must be below n = {n}")));
        }
        for attempt in 0..MAX_ATTEMPTS {
            let s = if attempt == 0 {
                seed
            } else {
                rng::derive_seed(seed, &[attempt as u64])
            };
            let rows = peg(n, n - k, col_weight, s);
            if let Ok(mut code) = Self::from_parity_check(n, &rows) {
                code.seed = seed;
                return Ok(code);
            }
        }
        Err(Error::Construction { attempts: MAX_ATTEMPTS })
    }

    /// Builds a systematic code from check rows (variable indices per row).
    ///
    /// Gaussian elimination runs from the last column backwards; the pivot
    /// columns become the parity positions and the permutation keeps both
    /// groups in ascending original order. A full-rank matrix whose trailing
    /// columns are already invertible is left unpermuted.
    pub fn from_parity_check(n: usize, rows: &[Vec<usize>]) -> Result<LdpcCode> {
        let m = rows.len();
        if m == 0 || m >= n {
            return Err(Error::InvalidArgument(format!("{m} checks for {n} variables")));
        }
        let w = words(n);
        let mut dense: Vec<DenseRow> = rows
            .iter()
            .map(|r| {
                let mut d = vec![0u64; w];
                for &c in r {
                    d[c / 64] ^= 1 << (c % 64);
                }
                d
            })
            .collect();
        if rows.iter().flatten().any(|&c| c >= n) {
            return Err(Error::InvalidArgument("column index out of range".into()));
        }
        let mut pivot_col = Vec::with_capacity(m);
        let mut rank = 0;
        for c in (0..n).rev() {
            if rank == m {
                break;
            }
            let Some(p) = (rank..m).find(|&r| bit(&dense[r], c)) else {
                continue;
            };
            dense.swap(rank, p);
            let pivot = dense[rank].clone();
            for (r, row) in dense.iter_mut().enumerate() {
                if r != rank && bit(row, c) {
                    xor_into(row, &pivot);
                }
            }
            pivot_col.push(c);
            rank += 1;
        }
        if rank < m {
            return Err(Error::Construction { attempts: 1 });
        }
        let mut is_pivot = vec![false; n];
        for &c in &pivot_col {
            is_pivot[c] = true;
        }
        let info_cols: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let parity_cols: Vec<usize> = (0..n).filter(|&c| is_pivot[c]).collect();
        let k = info_cols.len();
        // new position of each original column
        let mut new_pos = vec![0; n];
        for (i, &c) in info_cols.iter().chain(parity_cols.iter()).enumerate() {
            new_pos[c] = i;
        }
        let mw = words(m);
        let mut generator = vec![vec![0u64; mw]; k];
        for (r, &pc) in pivot_col.iter().enumerate() {
            let parity_index = new_pos[pc] - k;
            for (i, &ic) in info_cols.iter().enumerate() {
                if bit(&dense[r], ic) {
                    generator[i][parity_index / 64] ^= 1 << (parity_index % 64);
                }
            }
        }
        let checks: Vec<Vec<usize>> = rows
            .iter()
            .map(|r| {
                let mut v: Vec<usize> = r.iter().map(|&c| new_pos[c]).collect();
                v.sort_unstable();
                v
            })
            .collect();
        let mut vars = vec![Vec::new(); n];
        for (i, r) in checks.iter().enumerate() {
            for &v in r {
                vars[v].push(i);
            }
        }
        Ok(LdpcCode {
            n,
            k,
            seed: 0,
            checks,
            vars,
            generator,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.n - self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn checks(&self) -> &[Vec<usize>] {
        &self.checks
    }

    pub fn vars(&self) -> &[Vec<usize>] {
        &self.vars
    }

    pub fn edge_count(&self) -> usize {
        self.checks.iter().map(Vec::len).sum()
    }

    /// Systematic codeword `[info | zero pad | parity]`; inputs shorter than
    /// `k` are zero padded (shortened).
    pub fn encode(&self, info: &BitVector) -> Result<BitVector> {
        if info.len() > self.k {
            return Err(Error::Size(format!(
                "{} info bits exceed block capacity {}",
                info.len(),
                self.k
            )));
        }
        let m = self.m();
        let mut parity = vec![0u64; words(m)];
        for (i, b) in info.iter().enumerate() {
            if b {
                xor_into(&mut parity, &self.generator[i]);
            }
        }
        let mut out = info.clone();
        for _ in info.len()..self.k {
            out.push(false);
        }
        for j in 0..m {
            out.push((parity[j / 64] >> (j % 64)) & 1 == 1);
        }
        Ok(out)
    }

    /// Positions of the known-zero pad for an `info_len`-bit input.
    pub fn shortened(&self, info_len: usize) -> Vec<usize> {
        (info_len.min(self.k)..self.k).collect()
    }

    /// Per-check parity of `word`; all zero for a codeword.
    pub fn syndrome(&self, word: &BitVector) -> Vec<bool> {
        let w = word.as_slice();
        self.checks
            .iter()
            .map(|r| r.iter().fold(0u8, |acc, &v| acc ^ w[v]) == 1)
            .collect()
    }

    pub fn is_codeword(&self, word: &BitVector) -> bool {
        word.len() == self.n && !self.syndrome(word).into_iter().any(|s| s)
    }

    /// Header `n k seed`, then one `row col` pair per nonzero entry.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.k, self.seed);
        for (r, cols) in self.checks.iter().enumerate() {
            for c in cols {
                out.push_str(&format!("{r} {c}\n"));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<LdpcCode> {
        let mut lines = text.lines();
        let header: Vec<u64> = lines
            .next()
            .ok_or_else(|| Error::Format("empty code file".into()))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Format(format!("bad header token '{t}'"))))
            .collect::<Result<_>>()?;
        let [n, k, seed] = header[..] else {
            return Err(Error::Format("header must be 'n k seed'".into()));
        };
        let (n, k) = (n as usize, k as usize);
        let mut rows = vec![Vec::new(); n.saturating_sub(k)];
        for l in lines.filter(|l| !l.trim().is_empty()) {
            let mut it = l.split_whitespace().map(|t| t.parse::<usize>());
            match (it.next(), it.next()) {
                (Some(Ok(r)), Some(Ok(c))) if r < rows.len() => rows[r].push(c),
                _ => return Err(Error::Format(format!("bad entry '{l}'"))),
            }
        }
        let mut code = Self::from_parity_check(n, &rows)?;
        if code.k != k {
            return Err(Error::Format(format!("matrix has dimension {} not {k}", code.k)));
        }
        code.seed = seed;
        Ok(code)
    }
}
