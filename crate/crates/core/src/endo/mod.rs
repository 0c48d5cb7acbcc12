//! Endomorphisms of the graded word space, convolution, the antipode
//! family, the expectation map and the endomorphism inner product.

mod graded;
pub mod identities;
mod inner;
mod timepoly;

pub use graded::{antipode_word, GradeSel, GradedEndo, Series};
pub use inner::{expect_product, expectation, inner_product, norm_sq, GramSpec};
pub use timepoly::TimePoly;
