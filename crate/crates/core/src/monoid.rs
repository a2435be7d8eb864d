use std::collections::HashMap;

use crate::error::Error;
use crate::perm::PartialPerm;

const DEFAULT_ELEMENT_CAP: usize = 1_000_000;
const PRODUCT_TABLE_CAP: usize = 25_000_000;

/// A fully enumerated finite monoid of partial permutations.
///
/// Elements are discovered breadth-first from the identity by right
/// multiplication, so indices follow shortlex witness-word order with the
/// generator order as given; index 0 is the identity. Both Cayley tables are
/// stored densely.
#[derive(Clone, Debug)]
pub struct MonoidTable {
    n: u32,
    gens: Vec<PartialPerm>,
    elements: Vec<PartialPerm>,
    index: HashMap<PartialPerm, usize>,
    /// `right[i][k]` is the index of `elements[i] · gens[k]`.
    right: Vec<Vec<u32>>,
    /// `left[i][k]` is the index of `gens[k] · elements[i]`.
    left: Vec<Vec<u32>>,
    /// Shortlex-first witness word for each element, as generator indices.
    witness: Vec<Vec<u16>>,
}

impl MonoidTable {
    /// Enumerates the monoid generated by `gens` (identity adjoined) with the
    /// default element cap.
    pub fn enumerate(gens: &[PartialPerm]) -> Result<Self, Error> {
        Self::enumerate_capped(gens, DEFAULT_ELEMENT_CAP)
    }

    pub fn enumerate_capped(gens: &[PartialPerm], cap: usize) -> Result<Self, Error> {
        let first = gens
            .first()
            .ok_or_else(|| Error::Unsupported("at least one generator is required".into()))?;
        let n = first.n();
        for gen in gens {
            if gen.n() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: gen.n(),
                });
            }
        }
        if gens.len() > u16::MAX as usize {
            return Err(Error::Unsupported("too many generators".into()));
        }

        let identity = PartialPerm::identity(n)?;
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::new();
        index.insert(identity, 0usize);
        let mut witness: Vec<Vec<u16>> = vec![Vec::new()];
        let mut right: Vec<Vec<u32>> = Vec::new();

        let mut i = 0;
        while i < elements.len() {
            let mut row = Vec::with_capacity(gens.len());
            for (k, gen) in gens.iter().enumerate() {
                let product = elements[i].compose(gen)?;
                let idx = match index.get(&product) {
                    Some(&idx) => idx,
                    None => {
                        if elements.len() >= cap {
                            return Err(Error::CapExceeded { cap });
                        }
                        let idx = elements.len();
                        index.insert(product.clone(), idx);
                        elements.push(product);
                        let mut word = witness[i].clone();
                        word.push(k as u16);
                        witness.push(word);
                        idx
                    }
                };
                row.push(idx as u32);
            }
            right.push(row);
            i += 1;
        }

        // Left table in a second pass. Every left product lands inside the
        // enumerated set because the right closure of a monoid containing the
        // identity is already two-sided.
        let mut left = Vec::with_capacity(elements.len());
        for element in &elements {
            let mut row = Vec::with_capacity(gens.len());
            for gen in gens {
                let product = gen.compose(element)?;
                let idx = *index
                    .get(&product)
                    .expect("left product stays inside the right closure");
                row.push(idx as u32);
            }
            left.push(row);
        }

        Ok(MonoidTable {
            n,
            gens: gens.to_vec(),
            elements,
            index,
            right,
            left,
            witness,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn gens(&self) -> &[PartialPerm] {
        &self.gens
    }

    pub fn element(&self, i: usize) -> &PartialPerm {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[PartialPerm] {
        &self.elements
    }

    pub fn index_of(&self, p: &PartialPerm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &PartialPerm) -> bool {
        self.index.contains_key(p)
    }

    /// Right Cayley step `elements[i] · gens[k]`.
    pub fn right_step(&self, i: usize, k: usize) -> usize {
        self.right[i][k] as usize
    }

    /// Left Cayley step `gens[k] · elements[i]`.
    pub fn left_step(&self, i: usize, k: usize) -> usize {
        self.left[i][k] as usize
    }

    /// Shortlex-first witness word for `elements[i]`, as generator indices.
    pub fn witness_word(&self, i: usize) -> &[u16] {
        &self.witness[i]
    }

    /// Index of the product `elements[i] · elements[j]`, computed by walking
    /// the witness word of `j` through the right Cayley table.
    pub fn product(&self, i: usize, j: usize) -> usize {
        let mut q = i;
        for &k in &self.witness[j] {
            q = self.right[q][k as usize] as usize;
        }
        q
    }

    pub fn idempotent_count(&self) -> usize {
        (0..self.size()).filter(|&i| self.product(i, i) == i).count()
    }

    /// Whether the given elements generate the whole monoid (with the
    /// identity adjoined). Every member must belong to the monoid.
    pub fn is_generating(&self, subset: &[PartialPerm]) -> Result<bool, Error> {
        let mut idxs = Vec::with_capacity(subset.len());
        for p in subset {
            let idx = self.index_of(p).ok_or_else(|| Error::NotAnElement {
                element: p.to_string(),
            })?;
            idxs.push(idx);
        }
        Ok(self.closure_size(&idxs) == self.size())
    }

    /// Size of the submonoid generated by the elements at `idxs`.
    fn closure_size(&self, idxs: &[usize]) -> usize {
        let mut seen = vec![false; self.size()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(q) = stack.pop() {
            for &s in idxs {
                let r = self.product(q, s);
                if !seen[r] {
                    seen[r] = true;
                    count += 1;
                    stack.push(r);
                }
            }
        }
        count
    }

    /// Exhaustive minimal-generating-set search.
    ///
    /// Subset sizes are tried in ascending order and, within a size, subsets
    /// in lexicographic element-index order; the first success is returned,
    /// so the answer is deterministic. With `prune_image_size = Some(n − 1)`
    /// the candidate space shrinks to subsets containing, for every image of
    /// size `n − 1` realized in the monoid, at least one element with that
    /// image. The pruning argument needs a trivial group of units, which is
    /// checked; pruned answers are re-validated against the unpruned search
    /// space at small ground sets.
    pub fn rank(&self, opts: &RankOptions) -> Result<RankCertificate, Error> {
        let m = self.size();
        let class_of: Option<Vec<Option<u32>>> = match opts.prune_image_size {
            None => None,
            Some(s) => {
                if s + 1 != self.n {
                    return Err(Error::Unsupported(format!(
                        "image pruning is justified only for images of size n - 1 = {}; got {s}",
                        self.n - 1
                    )));
                }
                let units = self
                    .elements
                    .iter()
                    .filter(|p| p.rank_size() == self.n as usize)
                    .count();
                if units > 1 {
                    return Err(Error::Unsupported(
                        "image pruning needs a trivial group of units".into(),
                    ));
                }
                let mut images: Vec<Vec<u32>> = Vec::new();
                let mut classes = Vec::with_capacity(m);
                for p in &self.elements {
                    if p.rank_size() == s as usize {
                        let image = p.image();
                        let class = match images.iter().position(|im| *im == image) {
                            Some(c) => c,
                            None => {
                                images.push(image);
                                images.len() - 1
                            }
                        };
                        classes.push(Some(class as u32));
                    } else {
                        classes.push(None);
                    }
                }
                Some(classes)
            }
        };
        let num_classes = class_of
            .as_ref()
            .map(|c| {
                c.iter()
                    .filter_map(|x| *x)
                    .max()
                    .map(|max| max as usize + 1)
                    .unwrap_or(0)
            })
            .unwrap_or(0);

        if m.saturating_mul(m) > PRODUCT_TABLE_CAP {
            return Err(Error::SearchCapExceeded {
                lower: 1,
                upper: self.gens.len(),
            });
        }
        let table = self.full_product_table();

        let mut search = SubsetSearch {
            monoid: self,
            table: &table,
            class_of: class_of.as_deref(),
            num_classes,
            seen: vec![0u32; m],
            stamp: 0,
            tested: 0,
            cap: opts.max_subsets,
        };

        for k in 0..=m {
            match search.find_first(k) {
                Ok(Some(witness)) => {
                    let mut cross_validated = false;
                    if class_of.is_some() && self.n <= 4 && k > 0 {
                        // Re-run the refutation at size k − 1 without pruning.
                        let mut unpruned = SubsetSearch {
                            monoid: self,
                            table: &table,
                            class_of: None,
                            num_classes: 0,
                            seen: vec![0u32; m],
                            stamp: 0,
                            tested: 0,
                            cap: opts.max_subsets,
                        };
                        let refuted = unpruned.find_first(k - 1)?;
                        assert!(
                            refuted.is_none(),
                            "pruned search missed a smaller generating set"
                        );
                        cross_validated = true;
                    }
                    return Ok(RankCertificate {
                        rank: k,
                        witness,
                        refuted_below: k,
                        pruned: class_of.is_some(),
                        cross_validated,
                        subsets_tested: search.tested,
                    });
                }
                Ok(None) => continue,
                Err(e) => {
                    return Err(match e {
                        Error::SearchCapExceeded { .. } => Error::SearchCapExceeded {
                            lower: k,
                            upper: self.gens.len(),
                        },
                        other => other,
                    })
                }
            }
        }
        unreachable!("the whole element list generates the monoid");
    }

    fn full_product_table(&self) -> Vec<u32> {
        let m = self.size();
        let mut table = vec![0u32; m * m];
        for i in 0..m {
            for j in 0..m {
                table[i * m + j] = self.product(i, j) as u32;
            }
        }
        table
    }
}

/// Options for [`MonoidTable::rank`].
#[derive(Clone, Debug)]
pub struct RankOptions {
    /// When set, restrict candidates using image classes of this size.
    pub prune_image_size: Option<u32>,
    /// Cap on the number of candidate subsets tested before giving up.
    pub max_subsets: u64,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            prune_image_size: None,
            max_subsets: 10_000_000,
        }
    }
}

/// A rank answer together with what the search exhausted on the way.
#[derive(Clone, Debug)]
pub struct RankCertificate {
    pub rank: usize,
    /// Element indices of the first generating subset found, ascending.
    pub witness: Vec<usize>,
    /// Every subset size strictly below this was refuted exhaustively
    /// (within the candidate space when pruning).
    pub refuted_below: usize,
    pub pruned: bool,
    /// Set when a pruned answer was re-checked against the unpruned space.
    pub cross_validated: bool,
    pub subsets_tested: u64,
}

struct SubsetSearch<'a> {
    monoid: &'a MonoidTable,
    table: &'a [u32],
    class_of: Option<&'a [Option<u32>]>,
    num_classes: usize,
    seen: Vec<u32>,
    stamp: u32,
    tested: u64,
    cap: u64,
}

impl SubsetSearch<'_> {
    /// First generating subset of the given size in lexicographic order, or
    /// `None` when the size is exhausted.
    fn find_first(&mut self, k: usize) -> Result<Option<Vec<usize>>, Error> {
        let mut chosen = Vec::with_capacity(k);
        let mut covered = vec![false; self.num_classes];
        self.descend(k, 0, &mut chosen, &mut covered, 0)
    }

    fn descend(
        &mut self,
        k: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        covered: &mut [bool],
        covered_count: usize,
    ) -> Result<Option<Vec<usize>>, Error> {
        if chosen.len() == k {
            if self.num_classes > 0 && covered_count < self.num_classes {
                return Ok(None);
            }
            self.tested += 1;
            if self.tested > self.cap {
                return Err(Error::SearchCapExceeded { lower: 0, upper: 0 });
            }
            if self.generates(chosen) {
                return Ok(Some(chosen.clone()));
            }
            return Ok(None);
        }
        let remaining = k - chosen.len();
        if self.num_classes > 0 && self.num_classes - covered_count > remaining {
            return Ok(None);
        }
        let m = self.monoid.size();
        for i in start..m {
            let class = self.class_of.and_then(|c| c[i]);
            let newly_covered = match class {
                Some(c) if !covered[c as usize] => {
                    covered[c as usize] = true;
                    true
                }
                _ => false,
            };
            chosen.push(i);
            let count = covered_count + usize::from(newly_covered);
            let found = self.descend(k, i + 1, chosen, covered, count)?;
            chosen.pop();
            if newly_covered {
                covered[class.unwrap() as usize] = false;
            }
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    fn generates(&mut self, subset: &[usize]) -> bool {
        let m = self.monoid.size();
        self.stamp += 1;
        let stamp = self.stamp;
        let mut stack = vec![0usize];
        self.seen[0] = stamp;
        let mut count = 1;
        while let Some(q) = stack.pop() {
            for &s in subset {
                let r = self.table[q * m + s] as usize;
                if self.seen[r] != stamp {
                    self.seen[r] = stamp;
                    count += 1;
                    stack.push(r);
                }
            }
        }
        count == m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::testutil::all_ci;
    use crate::families::{e_gen, generators, oci_generating_family, x_gen, y_gen, Family};

    fn ci_table(n: u32) -> MonoidTable {
        MonoidTable::enumerate(&generators(Family::CiMin, n).unwrap().perms()).unwrap()
    }

    fn oci_table(n: u32) -> MonoidTable {
        MonoidTable::enumerate(&oci_generating_family(n).unwrap().perms()).unwrap()
    }

    #[test]
    fn cyclic_group_enumeration() {
        let m = MonoidTable::enumerate(&[PartialPerm::cycle(5).unwrap()]).unwrap();
        assert_eq!(m.size(), 5);
        assert_eq!(m.idempotent_count(), 1);
    }

    #[test]
    fn restriction_monoid_matches_the_brute_force_set() {
        for n in 1..=6u32 {
            let m = ci_table(n);
            let oracle = all_ci(n);
            assert_eq!(m.size(), oracle.len(), "n={n}");
            assert!(m.elements().iter().all(|p| oracle.contains(p)));
        }
    }

    #[test]
    fn both_generating_families_enumerate_the_same_set() {
        for n in 1..=8u32 {
            let full = MonoidTable::enumerate(&generators(Family::CiFull, n).unwrap().perms())
                .unwrap();
            let min = ci_table(n);
            assert_eq!(full.size(), min.size(), "n={n}");
            assert!(full.elements().iter().all(|p| min.contains(p)));
        }
    }

    #[test]
    fn order_preserving_submonoid_enumeration() {
        let m = MonoidTable::enumerate(&[
            x_gen(3).unwrap(),
            y_gen(3).unwrap(),
            e_gen(3, 2).unwrap(),
        ])
        .unwrap();
        assert_eq!(m.size(), 16);
        for n in 1..=6u32 {
            let m = oci_table(n);
            let expected = all_ci(n)
                .into_iter()
                .filter(|p| p.is_order_preserving())
                .count();
            assert_eq!(m.size(), expected, "n={n}");
        }
    }

    #[test]
    fn witness_words_evaluate_to_their_elements() {
        let m = ci_table(3);
        for i in 0..m.size() {
            let mut acc = PartialPerm::identity(3).unwrap();
            for &k in m.witness_word(i) {
                acc = acc.compose(&m.gens()[k as usize]).unwrap();
            }
            assert_eq!(&acc, m.element(i));
        }
    }

    #[test]
    fn cayley_tables_agree_with_direct_composition() {
        let m = oci_table(3);
        for i in 0..m.size() {
            for (k, gen) in m.gens().iter().enumerate() {
                let right = m.element(i).compose(gen).unwrap();
                assert_eq!(m.element(m.right_step(i, k)), &right);
                let left = gen.compose(m.element(i)).unwrap();
                assert_eq!(m.element(m.left_step(i, k)), &left);
            }
        }
        for i in 0..m.size() {
            for j in 0..m.size() {
                let direct = m.element(i).compose(m.element(j)).unwrap();
                assert_eq!(m.element(m.product(i, j)), &direct);
            }
        }
    }

    #[test]
    fn idempotent_counts() {
        assert_eq!(ci_table(3).idempotent_count(), 8);
        assert_eq!(oci_table(3).idempotent_count(), 8);
        for n in 1..=6u32 {
            assert_eq!(ci_table(n).idempotent_count() as u64, 1u64 << n, "n={n}");
        }
    }

    #[test]
    fn is_generating_examples() {
        let m = ci_table(4);
        let gens = generators(Family::CiMin, 4).unwrap().perms();
        assert!(m.is_generating(&gens).unwrap());
        assert!(!m.is_generating(&[]).unwrap());
        assert!(!m.is_generating(&[e_gen(4, 1).unwrap()]).unwrap());
        let foreign = PartialPerm::new(4, [(1, 1), (2, 3)]).unwrap();
        assert!(matches!(
            m.is_generating(&[foreign]),
            Err(Error::NotAnElement { .. })
        ));
    }

    #[test]
    fn rank_of_restriction_monoids_is_two() {
        for n in 2..=5u32 {
            let m = ci_table(n);
            let cert = m.rank(&RankOptions::default()).unwrap();
            assert_eq!(cert.rank, 2, "n={n}");
            assert_eq!(cert.refuted_below, 2);
            assert!(!cert.pruned);
            // The first witness in index order is the generating pair itself.
            let witness: Vec<&PartialPerm> =
                cert.witness.iter().map(|&i| m.element(i)).collect();
            assert_eq!(witness[0], &PartialPerm::cycle(n).unwrap());
            assert_eq!(witness[1], &e_gen(n, 1).unwrap());
        }
    }

    #[test]
    fn rank_of_degenerate_monoids() {
        let m = ci_table(1);
        assert_eq!(m.rank(&RankOptions::default()).unwrap().rank, 1);
        let c5 = MonoidTable::enumerate(&[PartialPerm::cycle(5).unwrap()]).unwrap();
        assert_eq!(c5.rank(&RankOptions::default()).unwrap().rank, 1);
    }

    #[test]
    fn pruned_rank_of_order_preserving_monoids() {
        for n in 1..=4u32 {
            let m = oci_table(n);
            let opts = RankOptions {
                prune_image_size: Some(n - 1),
                ..RankOptions::default()
            };
            let cert = m.rank(&opts).unwrap();
            assert_eq!(cert.rank as u32, n, "n={n}");
            assert!(cert.pruned);
            assert!(cert.cross_validated, "n={n}");
        }
        // The witness at n = 3 is the minimal family itself.
        let m = oci_table(3);
        let opts = RankOptions {
            prune_image_size: Some(2),
            ..RankOptions::default()
        };
        let cert = m.rank(&opts).unwrap();
        let witness: Vec<&PartialPerm> = cert.witness.iter().map(|&i| m.element(i)).collect();
        assert_eq!(witness[0], &x_gen(3).unwrap());
        assert_eq!(witness[1], &y_gen(3).unwrap());
        assert_eq!(witness[2], &e_gen(3, 2).unwrap());
    }

    #[test]
    fn pruning_rejects_unsound_uses() {
        let m = ci_table(3);
        let opts = RankOptions {
            prune_image_size: Some(2),
            ..RankOptions::default()
        };
        // The cycle group is a nontrivial unit group.
        assert!(matches!(m.rank(&opts), Err(Error::Unsupported(_))));

        let m = oci_table(3);
        let opts = RankOptions {
            prune_image_size: Some(1),
            ..RankOptions::default()
        };
        assert!(matches!(m.rank(&opts), Err(Error::Unsupported(_))));
    }

    #[test]
    fn caps_are_reported() {
        let gens = generators(Family::CiMin, 5).unwrap().perms();
        assert!(matches!(
            MonoidTable::enumerate_capped(&gens, 10),
            Err(Error::CapExceeded { cap: 10 })
        ));
        let m = ci_table(3);
        let opts = RankOptions {
            prune_image_size: None,
            max_subsets: 5,
        };
        match m.rank(&opts) {
            Err(Error::SearchCapExceeded { lower, upper }) => {
                assert!(lower <= 2);
                assert_eq!(upper, 2);
            }
            other => panic!("expected a search cap error, got {other:?}"),
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a = ci_table(4);
        let b = ci_table(4);
        assert_eq!(a.elements(), b.elements());
        assert_eq!(a.witness, b.witness);
    }
}
