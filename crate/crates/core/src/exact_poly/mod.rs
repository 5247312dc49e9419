//! Exact rational polynomials and nonnegativity certificates for the
//! inequalities behind the truncated-cone estimate.

mod certify;
mod lemmas;
mod poly;

pub use certify::{
    certify_nonneg_on_ray, identity_certificate, roots_above, shift_expansion, sturm_certificate, sturm_sequence,
    Certificate, Method, NamedCheck, NamedValue, Status, Witness,
};
pub use lemmas::{
    build_fg, build_p1, chain_p2_p3_p4, lemma1_chain, lemma1_direct, lemma1_polys, n2_identity, p1_chain_certificate,
    p1_factor_identity, p3_closed_forms, p4_closed_form, verify_lemma2, verify_lemma2_with, Chain, Lemma1Polys,
    Route,
};
pub use poly::{rat, ratio, RationalPoly};
