//! LDPC stack: degree distributions, PEG/ACE construction, systematic
//! encoding, serial sum-product decoding, absorbing-set scanning, and alist
//! serialization.

pub mod absorbing;
pub mod alist;
pub mod code;
pub mod decode;
pub mod degree;

pub use absorbing::{scan_absorbing_sets, AbsorbingSet, AbsorbingSetReport};
pub use alist::{load_code, read_alist, save_code, write_alist};
pub use code::{construct_peg_ace, CodeMetadata, LdpcCode};
pub use decode::{decode_bp, DecodeResult, Decoder};
pub use degree::DegreeDistribution;
