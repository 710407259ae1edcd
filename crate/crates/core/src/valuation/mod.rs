//! The valuation families, their parallel-body expansions, and their
//! behaviour under translations.

mod descriptor;
pub mod parallel;
mod steiner;
mod translation;

pub use descriptor::{evaluate, magnitude, Descriptor};
pub use parallel::{parallel_polynomial, parallel_value, ArcMode, Kernel};
pub use steiner::{
    evaluate_on_parallel_body, kernel_expansion, quermassintegrals, steiner_by_fit, steiner_coefficients,
    EpsilonPolynomial, SteinerFit,
};
pub use translation::{
    derivative_translation_polynomial, fit_translation, leading_form_pairing, measure_kappa,
    translation_polynomial, TranslationPolynomial, TRANSLATION_RESIDUAL,
};
