//! CRC-16-CCITT (poly 0x1021, init 0xFFFF, MSB first, no final xor) over bit strings.

use crate::bits::BitVector;

pub const CRC_WIDTH: usize = 16;
pub const CRC_POLY: u16 = 0x1021;
pub const CRC_INIT: u16 = 0xFFFF;

pub fn crc16(bits: impl IntoIterator<Item = bool>) -> u16 {
    let mut reg = CRC_INIT;
    for b in bits {
        let top = (reg >> 15) & 1 == 1;
        reg <<= 1;
        if top ^ b {
            reg ^= CRC_POLY;
        }
    }
    reg
}

/// `msg` followed by its 16 CRC bits, most significant first.
pub fn crc_append(msg: &BitVector) -> BitVector {
    let crc = crc16(msg.iter());
    let mut out = msg.clone();
    for k in (0..CRC_WIDTH).rev() {
        out.push((crc >> k) & 1 == 1);
    }
    out
}

pub fn crc_check(msg_with_crc: &BitVector) -> bool {
    let n = msg_with_crc.len();
    if n < CRC_WIDTH {
        return false;
    }
    let body = msg_with_crc.as_slice()[..n - CRC_WIDTH].iter().map(|&b| b == 1);
    let crc = crc16(body);
    msg_with_crc.as_slice()[n - CRC_WIDTH..]
        .iter()
        .enumerate()
        .all(|(i, &b)| ((crc >> (CRC_WIDTH - 1 - i)) & 1) as u8 == b)
}
