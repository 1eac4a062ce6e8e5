//! Spatially-coupled LDPC codes `(d_l, d_r, L)` and their modified variant
//! with accumulator termination.
//!
//! * [`protograph`]: band base matrices, design rates, bit accounting.
//! * [`lifted`]: permutation lifting, the accumulator patch, rank repair of
//!   the original termination block, JSON and alist I/O.
//! * [`encoder`]: sequential encoding plus dense-solve or accumulator
//!   termination.
//! * [`decoder`]: erasure channel, peeling decoder and Monte Carlo runs.
//! * [`de`]: protograph density evolution and BP thresholds.

pub mod alist;
pub mod bitio;
pub mod de;
pub mod decoder;
pub mod encoder;
pub mod error;
pub mod gf2;
pub mod lifted;
pub mod protograph;
pub mod table;
pub mod termbench;

pub use de::{bp_threshold, trajectory, DeOptions, DeState, ThresholdResult};
pub use decoder::{decode, run_monte_carlo, transmit, DecodeResult, DecodeStatus, ReceivedWord, SimReport};
pub use encoder::{encode, verify_codeword, Codeword, Encoder, EncoderState, OpCounter};
pub use error::{Error, Result};
pub use gf2::{BitVector, DenseGf2Matrix, PermutationMap};
pub use lifted::{Block, LiftedCode, PatchKind, RankStatus, SparseParity, TermPatch};
pub use protograph::{bit_accounting, design_rate, BaseMatrix, BitAccounting, CodeParams, Rate};
