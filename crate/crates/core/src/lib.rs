//! Class field theory toolkit for quartic CM fields.
//!
//! The crate computes ray class groups of quadratic and quartic number
//! fields, the Shimura class group `C_K(m)` attached to a CM field, the
//! three maps out of `Cl_{K^r}(m)` whose kernels decide the containment
//! of the Hilbert class field in the field generated by the ray class
//! field of the reflex, and the genus 2 theta machinery used to produce
//! Igusa invariants from period matrices.
//!
//! Everything here is `no_std` with `alloc`. Exact arithmetic uses
//! `num-bigint`; numerics use the fixed point type in [`mp`].

#![no_std]
#![allow(clippy::needless_range_loop)]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod arith;
pub mod cm;
pub mod fgab;
pub mod ideals;
pub mod lattice;
pub mod mp;
pub mod nfield;
pub mod shimura;
pub mod star;

mod error;
mod fp;
pub use error::{Error, Result};

/// Seed and resource settings threaded through the randomized parts
/// (prime splitting, relation search, smoothing).
#[derive(Clone, Copy, Debug)]
pub struct Config {
    pub seed: u64,
    /// Upper bound on `|(O/m)^×|` handled by enumeration.
    pub max_residue_group: u64,
    /// Upper bound on the Minkowski bound accepted by the class group.
    pub max_class_bound: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0x5eed_c0de,
            max_residue_group: 1 << 20,
            max_class_bound: 100_000,
        }
    }
}
