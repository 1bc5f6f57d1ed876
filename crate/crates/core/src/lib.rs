//! Nested perfect toroidal arrays over the two-symbol alphabet.
//!
//! A toroidal array is *(s,t,p,q)-perfect* when every `s × t` binary pattern
//! occurs exactly once in each residue class of positions modulo `(p,q)`, and
//! *nested* when the property holds recursively on every aligned subarray of a
//! prescribed subdivision ladder. This crate builds the full affine family of
//! nested perfect arrays from column-rotated Pascal-triangle matrices modulo 2,
//! verifies perfectness and nestedness by exhaustive bit-packed counting, and
//! decodes pattern positions directly by solving GF(2) linear systems instead
//! of scanning.
//!
//! Modules:
//!
//! - [`gf2`]: word-packed dense linear algebra over GF(2);
//! - [`pascal`]: the Pascal matrix `M_d`, its column-rotated variants, borders
//!   and the `τ` permutation, and the invertible-submatrix selectors;
//! - [`tiles`]: the integer ↔ `n × n` matrix enumeration and the even/odd bit
//!   split that drives tile placement;
//! - [`torus`]: toroidal arrays with wrap-around windows, aligned subdivision,
//!   and the Pascal/affine array builders;
//! - [`verify`]: perfectness and nestedness checking, the linear-system
//!   pattern decoder, and the affine family census;
//! - [`io`]: text-grid and PBM (P1) array files plus report serialization;
//! - [`samples`]: small reference arrays used throughout the tests.
//!
//! With the default `parallel` feature the verifier distributes row bands,
//! aligned parts and census members over a rayon pool; without it every
//! operation runs on the calling thread with identical results.

pub mod error;
pub mod gf2;
pub mod io;
pub mod pascal;
pub mod samples;
pub mod tiles;
pub mod torus;
pub mod verify;

pub use error::{Error, Result};
