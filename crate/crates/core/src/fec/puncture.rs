use crate::bits::BitVector;
use crate::error::{Error, Result};

use super::ldpc::LdpcCode;

/// LLR pinned on shortened (known zero) positions.
pub const SHORTENED_LLR: f64 = 40.0;

/// Cumulative transmitted-bit counts per round. Bits go out in codeword
/// order: systematic first, then parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PunctureSchedule {
    cumulative: Vec<usize>,
}

impl PunctureSchedule {
    pub fn new(cumulative: Vec<usize>, code: &LdpcCode) -> Result<Self> {
        let ok = !cumulative.is_empty()
            && cumulative.windows(2).all(|w| w[0] < w[1])
            && cumulative[0] >= code.k()
            && *cumulative.last().unwrap() == code.n();
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "schedule {cumulative:?} must increase strictly from >= {} to {}",
                code.k(),
                code.n()
            )));
        }
        Ok(PunctureSchedule { cumulative })
    }

    /// Rates 5/8, 5/12, 5/16 on the (1472, 460) code.
    pub fn default_for(code: &LdpcCode) -> Result<Self> {
        let n = code.n();
        Self::new(vec![n / 2, 3 * n / 4, n], code)
    }

    pub fn rounds(&self) -> usize {
        self.cumulative.len()
    }

    pub fn cumulative(&self) -> &[usize] {
        &self.cumulative
    }

    /// Codeword positions sent in `round` (1-based), skipping shortened ones.
    pub fn positions(&self, round: usize, shortened: &[usize]) -> Result<Vec<usize>> {
        if round == 0 || round > self.rounds() {
            return Err(Error::OutOfRange {
                index: round,
                len: self.rounds(),
            });
        }
        let start = if round == 1 { 0 } else { self.cumulative[round - 2] };
        let end = self.cumulative[round - 1];
        Ok((start..end).filter(|p| !shortened.contains(p)).collect())
    }
}

/// Bits selected for one round together with their codeword positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub bits: BitVector,
    pub positions: Vec<usize>,
}

pub fn select_bits(
    codeword: &BitVector,
    schedule: &PunctureSchedule,
    round: usize,
    shortened: &[usize],
) -> Result<Selection> {
    let positions = schedule.positions(round, shortened)?;
    let bits = positions
        .iter()
        .map(|&p| codeword.get(p))
        .collect::<Result<BitVector>>()?;
    Ok(Selection { bits, positions })
}

/// Places per-round LLRs at their codeword positions. Positions never sent
/// stay at zero, repeated positions add, shortened positions get
/// [`SHORTENED_LLR`].
pub fn assemble_llrs(
    received: &[(usize, Vec<f64>)],
    code: &LdpcCode,
    schedule: &PunctureSchedule,
    shortened: &[usize],
) -> Result<Vec<f64>> {
    let mut llrs = vec![0.0; code.n()];
    for (round, values) in received {
        let positions = schedule.positions(*round, shortened)?;
        if positions.len() != values.len() {
            return Err(Error::Size(format!(
                "round {round} carries {} llrs for {} positions",
                values.len(),
                positions.len()
            )));
        }
        for (&p, &l) in positions.iter().zip(values) {
            llrs[p] += l;
        }
    }
    for &p in shortened {
        llrs[p] = SHORTENED_LLR;
    }
    Ok(llrs)
}
