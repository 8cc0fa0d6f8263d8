pub mod error;
pub mod io;
pub mod models;
pub mod partition;
pub mod policy;
pub mod random;
pub mod separability;
pub mod spectral;
pub mod sweep;
pub mod tensor;
pub mod thermal;
pub mod witness;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/separability.md")]
    mod separability {}
    #[doc = include_str!("../../../book/src/witnesses.md")]
    mod witnesses {}
    #[doc = include_str!("../../../book/src/thermal.md")]
    mod thermal {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
}
