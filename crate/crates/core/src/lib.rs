//! Dynamic resource theory of coherence.
//!
//! Channels are handled through normalised Choi matrices, superchannels through
//! their action on Choi matrices, and the coherence monotones are evaluated as
//! semidefinite programs solved by the in-crate conic solver.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conic;
pub mod matcore;
pub mod measures;
pub mod protocols;
pub mod qobj;
pub mod random;
pub mod reproduce;
pub mod spec;
pub mod supermap;

pub use matcore::{Complex64, ComplexMatrix, LinalgError};
pub use qobj::{ChannelClass, ChannelClassVerdict, QuantumChannel, QuantumState};

pub use supermap::{Superchannel, SuperchannelVerdict};
