pub mod error;
pub mod fit;
pub mod geom;
pub mod inequalities;
pub mod intgeo;
pub mod linalg;
pub mod poly;
pub mod quadrature;
pub mod random;
pub mod report;
pub mod valuation;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/polytopes.md")]
    mod polytopes {}
    #[doc = include_str!("../../../book/src/valuations.md")]
    mod valuations {}
    #[doc = include_str!("../../../book/src/steiner.md")]
    mod steiner {}
    #[doc = include_str!("../../../book/src/translation.md")]
    mod translation {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/integral-geometry.md")]
    mod integral_geometry {}
    #[doc = include_str!("../../../book/src/inequalities.md")]
    mod inequalities {}
}
