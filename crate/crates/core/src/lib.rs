pub mod bits;
pub mod codec;
pub mod corpus;
pub mod error;
pub mod experiment;
pub mod fec;
pub mod harq;
pub mod huffman;
pub mod modulation;
pub mod nn;
pub mod phy;
pub mod rng;
pub mod similarity;

pub use bits::BitVector;
pub use error::{Error, Result};
