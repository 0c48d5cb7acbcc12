//! Letters, words, rational word polynomials and the quasi-shuffle product.

mod alphabet;
mod letter;
mod poly;
mod product;

pub use alphabet::{Alphabet, JumpLaw};
pub use letter::{Grading, Letter, Word};
pub use poly::{split_terms, WordPoly};
pub use product::{deconcatenate, shuffle, Product};
