//! Numerical toolkit for 3-point interpolation from the unit disc into the
//! symmetrised bidisc Γ = {(z+w, zw) : |z| ≤ 1, |w| ≤ 1}.
//!
//! The pipeline goes: test the pencil condition over low-degree Blaschke
//! parameters, locate an auxiliary extremal `m`, extract the associated
//! Blaschke product `q`, pose the mixed interior/boundary Pick problem for
//! `p`, build `s = 2(mp - q)/(1 - mq)` with explicit cancellation of the
//! boundary factors, and certify the result as a Γ-inner interpolant.
//!
//! Modules mirror those stages: [`rational`] is the polynomial / Blaschke
//! substrate, [`nevpick`] the scalar Nevanlinna-Pick machinery, [`gamma`]
//! the geometry of Γ, [`cpick`] the pencil search, [`diamond`] the mixed
//! interpolation problem, and [`pipeline`] the end-to-end solver.

pub mod config;
pub(crate) mod linalg;
pub(crate) mod optim;
pub mod rational;

pub mod cpick;
pub mod diamond;
pub mod families;
pub mod gamma;
pub mod nevpick;
pub mod pipeline;

pub use config::{GridConfig, Tolerances};

use num_complex::Complex64;

/// Convenience constructor used throughout.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Serde helpers: complex scalars as `[re, im]`, vectors as `[[re, im], ...]`.
pub mod serde_complex {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
            let raw = Vec::<[f64; 2]>::deserialize(d)?;
            Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
        }
    }
}
