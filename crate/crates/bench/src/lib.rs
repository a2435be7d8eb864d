//! Shared input builders for the benchmark suite.

use cim_core::{generators, oci_generating_family, Family, PartialPerm};

/// Generators of the full restricted-cycle-power monoid on `{1..n}`.
pub fn ci_generators(n: u32) -> Vec<PartialPerm> {
    generators(Family::CiMin, n)
        .expect("benchmark sizes are valid")
        .perms()
}

/// Generators of its order-preserving submonoid.
pub fn oci_generators(n: u32) -> Vec<PartialPerm> {
    oci_generating_family(n)
        .expect("benchmark sizes are valid")
        .perms()
}
