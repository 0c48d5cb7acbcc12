//! Scheme tables: per operator word, a product-of-integrals expression.

mod cache;
mod expr;
mod table;

pub use cache::{generate, SchemeCache};
pub use expr::IntegralExpr;
pub use table::{asri_direct, asri_modified, reduce_repeated, taylor_ms, taylor_wl, SchemeKind, SchemeTable};
