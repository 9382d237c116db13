//! Rate-compatible LDPC coding with CRC for the conventional IR-HARQ baseline.

mod bp;
mod crc;
mod ldpc;
mod puncture;

pub use bp::{decode_bp, BpOutput, DEFAULT_MAX_ITERS};
pub use crc::{crc16, crc_append, crc_check, CRC_WIDTH};
pub use ldpc::{LdpcCode, COLUMN_WEIGHT, DEFAULT_K, DEFAULT_N};
pub use puncture::{assemble_llrs, select_bits, PunctureSchedule, Selection, SHORTENED_LLR};

/// Payload bits per LDPC block once the CRC is accounted for.
pub const PAYLOAD_PER_BLOCK: usize = DEFAULT_K - CRC_WIDTH;
