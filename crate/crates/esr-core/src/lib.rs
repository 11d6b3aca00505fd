#![no_std]
//! Ergodic secrecy rate of optimal (OS) and sub-optimal (SS) transmitter and
//! destination pair selection over Gamma-distributed (Nakagami-m) SNRs.

extern crate alloc;

pub mod channel;
pub mod error;
pub mod index;
pub mod engine;
pub mod partial_fractions;
pub mod quadrature;
pub mod simulation;
pub mod real;
pub mod special;

pub use error::{EsrError, Result};
