//! Computational toolkit for cyclic inverse monoids.
//!
//! The crate builds, as concrete partial-permutation monoids, the monoid of
//! all restrictions of powers of the full cycle on `{1, …, n}` and its
//! order-preserving submonoid. On top of that it provides:
//!
//! - exact enumeration with Cayley tables and shortlex witness words,
//! - minimal-generating-set (rank) searches with certified refutations,
//! - four finite presentations with relation-count formulas, satisfaction
//!   checking, and quotient enumeration,
//! - Tietze transformations deriving the two-generator and minimal-alphabet
//!   presentations from the idempotent-ladder ones.
//!
//! Every closed-form count the crate exposes is cross-checked by independent
//! enumeration in the test suite.

pub mod error;
pub mod families;
pub mod fp;
pub mod monoid;
pub mod perm;
pub mod presentation;
pub mod tietze;
pub mod word;

pub use error::Error;
pub use families::{
    canonical_word_ci, canonical_word_oci, ci_size, e_gen, generators, is_in_ci, is_in_oci,
    oci_generating_family, oci_size, oci_size_variant, standard_assignment, unique_extension,
    x_gen, y_gen, Family, FamilyGenerators,
};
pub use fp::{defines, defines_with_caps, enumerate_fp, DefinesReport, FpCaps, FpMonoid};
pub use monoid::{MonoidTable, RankCertificate, RankOptions};
pub use perm::PartialPerm;
pub use presentation::{
    build_q, build_r, build_u, build_v, relation_count_q, relation_count_r, relation_count_u,
    relation_count_v, GeneratorAssignment, Presentation, Relation, RelationFailure,
    SatisfactionReport,
};
pub use tietze::{
    derive_q, derive_q_presentations, derive_v, reduce_runs, AnnotatedRelation, DerivationReport,
    DroppedRelation, EquivalenceReport, SubstitutionPlan, TietzeResult,
};
pub use word::{AlphabetOrder, Letter, Word};
