//! Exact and statistical oracles: minimum approximate degree over F2 by
//! exhaustive search, agreement and approximate-majority certification,
//! and the distance bookkeeping behind the approximate-degree corollary.

mod agree;
mod degree;
mod triangle;

pub use agree::{
    agreement, agreement_on, am_certificate, certify_approx_majority, disagreement_of, exact_agreements,
    exact_block_count, mc_agreements, mc_block_count, AgreementMode, AmCertificate, BoolFn, InputDist, Majority,
    MAX_EXACT_VARS,
};
pub use degree::{
    min_approx_degree, min_approx_degree_with, scan_span, smolensky_table, span_basis, DegreeCertificate, SmolenskyRow,
    SpanBest, MAX_DEGREE_VARS, MAX_SPAN_MONOMIALS,
};
pub use triangle::{triangle_corollary_check, TriangleReport};
