use std::fmt;

use crate::error::Error;
use crate::perm::PartialPerm;
use crate::presentation::GeneratorAssignment;
use crate::word::{Letter, Word};

/// The named generator families on the ground set `{1, …, n}`.
///
/// `Cn` is the cyclic group generated by the full cycle; `CiFull`/`CiMin`
/// generate the monoid of all restrictions of cycle powers; `OciFull`/
/// `OciMin` generate its order-preserving submonoid.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    Cn,
    CiFull,
    CiMin,
    OciFull,
    OciMin,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Cn => "cn",
            Family::CiFull => "ci-full",
            Family::CiMin => "ci-min",
            Family::OciFull => "oci-full",
            Family::OciMin => "oci-min",
        };
        f.write_str(s)
    }
}

/// A generator family instantiated at a concrete ground-set size: an ordered
/// list of letters with their values.
#[derive(Clone, Debug)]
pub struct FamilyGenerators {
    family: Family,
    n: u32,
    pairs: Vec<(Letter, PartialPerm)>,
}

impl FamilyGenerators {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn pairs(&self) -> &[(Letter, PartialPerm)] {
        &self.pairs
    }

    pub fn letters(&self) -> Vec<Letter> {
        self.pairs.iter().map(|(l, _)| l.clone()).collect()
    }

    pub fn perms(&self) -> Vec<PartialPerm> {
        self.pairs.iter().map(|(_, p)| p.clone()).collect()
    }

    pub fn get(&self, letter: &Letter) -> Option<&PartialPerm> {
        self.pairs.iter().find(|(l, _)| l == letter).map(|(_, p)| p)
    }

    pub fn assignment(&self) -> Result<GeneratorAssignment, Error> {
        GeneratorAssignment::new(self.pairs.clone())
    }
}

/// The shift `x = g e_1`, mapping `i ↦ i + 1` on `{1, …, n−1}`.
pub fn x_gen(n: u32) -> Result<PartialPerm, Error> {
    PartialPerm::new(n, (1..n).map(|i| (i, i + 1)))
}

/// The inverse shift `y = x⁻¹`, mapping `i ↦ i − 1` on `{2, …, n}`.
pub fn y_gen(n: u32) -> Result<PartialPerm, Error> {
    Ok(x_gen(n)?.inverse())
}

/// The partial identity `e_i`, defined everywhere except at `i`.
pub fn e_gen(n: u32, i: u32) -> Result<PartialPerm, Error> {
    if i < 1 || i > n {
        return Err(Error::OutOfRange { point: i, n });
    }
    let domain: Vec<u32> = (1..=n).filter(|&j| j != i).collect();
    PartialPerm::partial_identity(n, &domain)
}

/// Instantiates a generator family. The minimal order-preserving family
/// requires `n ≥ 3`; see [`oci_generating_family`] for the documented
/// fallback below that.
pub fn generators(family: Family, n: u32) -> Result<FamilyGenerators, Error> {
    if n == 0 {
        return Err(Error::ZeroSize);
    }
    let g = PartialPerm::cycle(n)?;
    let pairs: Vec<(Letter, PartialPerm)> = match family {
        Family::Cn => vec![(Letter::g(), g)],
        Family::CiMin => vec![(Letter::g(), g), (Letter::e(1), e_gen(n, 1)?)],
        Family::CiFull => {
            let mut pairs = vec![(Letter::g(), g)];
            for i in 1..=n {
                pairs.push((Letter::e(i), e_gen(n, i)?));
            }
            pairs
        }
        Family::OciFull => {
            let mut pairs = vec![(Letter::x(), x_gen(n)?), (Letter::y(), y_gen(n)?)];
            for i in 1..=n {
                pairs.push((Letter::e(i), e_gen(n, i)?));
            }
            pairs
        }
        Family::OciMin => {
            if n < 3 {
                return Err(Error::Unsupported(format!(
                    "the minimal order-preserving family requires n >= 3; got n = {n} \
                     (use the full family below that)"
                )));
            }
            let mut pairs = vec![(Letter::x(), x_gen(n)?), (Letter::y(), y_gen(n)?)];
            for i in 2..n {
                pairs.push((Letter::e(i), e_gen(n, i)?));
            }
            pairs
        }
    };
    Ok(FamilyGenerators { family, n, pairs })
}

/// The preferred generating family for the order-preserving monoid: minimal
/// for `n ≥ 3`, full for `n ∈ {1, 2}` where the minimal alphabet is empty of
/// inner idempotents and does not generate.
pub fn oci_generating_family(n: u32) -> Result<FamilyGenerators, Error> {
    if n >= 3 {
        generators(Family::OciMin, n)
    } else {
        generators(Family::OciFull, n)
    }
}

/// Closed form `n·2ⁿ − n + 1` for the number of restrictions of cycle powers.
pub fn ci_size(n: u32) -> u64 {
    assert!((1..=62).contains(&n), "size formula needs 1 <= n <= 62");
    let n = n as u64;
    n * (1u64 << n) - n + 1
}

/// Closed form `3·2ⁿ − 2n − 2` for the number of order-preserving
/// restrictions of cycle powers.
pub fn oci_size(n: u32) -> u64 {
    assert!((1..=62).contains(&n), "size formula needs 1 <= n <= 62");
    let n = n as u64;
    3 * (1u64 << n) - 2 * n - 2
}

/// An off-by-one variant of [`oci_size`] that circulates alongside the exact
/// formula. It disagrees with enumeration at every n, and size reports flag
/// it as inconsistent rather than dropping it silently.
pub fn oci_size_variant(n: u32) -> u64 {
    oci_size(n) + 1
}

/// The unique exponent `k` with `a = g^k` restricted to the domain of `a`.
///
/// Errors on the empty map (every exponent works) and on maps that are not
/// restrictions of any cycle power.
pub fn unique_extension(a: &PartialPerm) -> Result<u32, Error> {
    let n = a.n();
    let &(i0, j0) = match a.pairs().first() {
        Some(pair) => pair,
        None => return Err(Error::AmbiguousExtension),
    };
    let k = if j0 >= i0 { j0 - i0 } else { n + j0 - i0 };
    for &(i, j) in a.pairs() {
        let expected = if i <= n - k { i + k } else { i + k - n };
        if j != expected {
            return Err(Error::NotARestriction {
                element: a.to_string(),
            });
        }
    }
    Ok(k)
}

/// Membership in the monoid of restrictions of cycle powers.
pub fn is_in_ci(a: &PartialPerm) -> bool {
    a.is_empty_map() || unique_extension(a).is_ok()
}

/// Membership in the order-preserving submonoid.
pub fn is_in_oci(a: &PartialPerm) -> bool {
    is_in_ci(a) && a.is_order_preserving()
}

/// Canonical word over `{g, e_1, …, e_n}` for an element: `g^k` followed by
/// the ascending product of the idempotents killing the complement of the
/// image. The empty map takes `k = 0`, so its word is the full idempotent
/// product.
pub fn canonical_word_ci(a: &PartialPerm) -> Result<Word, Error> {
    if !is_in_ci(a) {
        return Err(Error::NotARestriction {
            element: a.to_string(),
        });
    }
    let n = a.n();
    let k = if a.is_empty_map() { 0 } else { unique_extension(a)? };
    let image = a.image();
    let mut word = Word::power(&Letter::g(), k);
    for j in 1..=n {
        if !image.contains(&j) {
            word.push(Letter::e(j));
        }
    }
    Ok(word)
}

/// Canonical word over `{x, y, e_1, …, e_n}` for an order-preserving element.
///
/// A nonempty element with extension exponent `k ≥ 1` lives entirely on one
/// side of the wrap: its domain is contained either in `{1, …, n−k}` (shift
/// up, spelled with `x`) or in `{n−k+1, …, n}` (shift down, spelled with
/// `y`). Pure restrictions of the identity are spelled as ascending
/// idempotent products, and the empty map as the full product.
pub fn canonical_word_oci(a: &PartialPerm) -> Result<Word, Error> {
    if !is_in_ci(a) {
        return Err(Error::NotARestriction {
            element: a.to_string(),
        });
    }
    if !a.is_order_preserving() {
        return Err(Error::NotOrderPreserving {
            element: a.to_string(),
        });
    }
    let n = a.n();
    if a.is_empty_map() {
        return Ok(Word::from_letters((1..=n).map(Letter::e)));
    }
    let k = unique_extension(a)?;
    let image = a.image();
    if k == 0 {
        return Ok(Word::from_letters(
            (1..=n).filter(|j| !image.contains(j)).map(Letter::e),
        ));
    }
    let domain = a.domain();
    if domain.iter().all(|&i| i <= n - k) {
        // Shift up: x^k has image {k+1, …, n}; absorb the missing points.
        let mut word = Word::power(&Letter::x(), k);
        for j in (k + 1)..=n {
            if !image.contains(&j) {
                word.push(Letter::e(j));
            }
        }
        Ok(word)
    } else {
        // Shift down: y^(n−k) has image {1, …, k}; absorb the missing points.
        let r = n - k;
        let mut word = Word::power(&Letter::y(), r);
        for j in 1..=k {
            if !image.contains(&j) {
                word.push(Letter::e(j));
            }
        }
        Ok(word)
    }
}

/// Interprets an alphabet over the standard values: `g` as the cycle, `x`
/// and `y` as the shift pair, `e` as `e_1`, and `e<i>` as the corresponding
/// partial identity.
pub fn standard_assignment(alphabet: &[Letter], n: u32) -> Result<GeneratorAssignment, Error> {
    let mut pairs = Vec::new();
    for letter in alphabet {
        let value = match letter.label() {
            "g" => PartialPerm::cycle(n)?,
            "x" => x_gen(n)?,
            "y" => y_gen(n)?,
            "e" => e_gen(n, 1)?,
            _ => {
                let i = letter.e_index().ok_or_else(|| {
                    Error::Unsupported(format!("no standard value for letter {letter}"))
                })?;
                e_gen(n, i).map_err(|_| {
                    Error::Unsupported(format!("letter {letter} has no value on 1..={n}"))
                })?
            }
        };
        pairs.push((letter.clone(), value));
    }
    GeneratorAssignment::new(pairs)
}


#[cfg(test)]
mod tests {
    use super::testutil::all_ci;
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn size_formulas_match_brute_force() {
        for n in 1..=8u32 {
            let ci = all_ci(n);
            assert_eq!(ci.len() as u64, ci_size(n), "ci n={n}");
            let oci = ci.iter().filter(|p| p.is_order_preserving()).count();
            assert_eq!(oci as u64, oci_size(n), "oci n={n}");
        }
    }

    #[test]
    fn the_variant_formula_disagrees_at_every_n() {
        for n in 1..=10u32 {
            assert_ne!(oci_size_variant(n), oci_size(n));
        }
    }

    #[test]
    fn generator_values_are_the_expected_maps() {
        assert_eq!(
            x_gen(4).unwrap(),
            PartialPerm::new(4, [(1, 2), (2, 3), (3, 4)]).unwrap()
        );
        assert_eq!(
            y_gen(4).unwrap(),
            PartialPerm::new(4, [(2, 1), (3, 2), (4, 3)]).unwrap()
        );
        assert_eq!(
            e_gen(3, 2).unwrap(),
            PartialPerm::partial_identity(3, &[1, 3]).unwrap()
        );
        // x is the cycle with the image point 1 removed.
        for n in 1..=6u32 {
            let g = PartialPerm::cycle(n).unwrap();
            let e1 = e_gen(n, 1).unwrap();
            assert_eq!(g.compose(&e1).unwrap(), x_gen(n).unwrap());
            assert_eq!(y_gen(n).unwrap(), x_gen(n).unwrap().inverse());
        }
    }

    #[test]
    fn family_rosters() {
        let f = generators(Family::OciMin, 4).unwrap();
        assert_eq!(
            f.letters(),
            vec![Letter::x(), Letter::y(), Letter::e(2), Letter::e(3)]
        );
        let f = generators(Family::CiMin, 1).unwrap();
        assert!(f.get(&Letter::g()).unwrap().is_identity());
        assert!(f.get(&Letter::e(1)).unwrap().is_empty_map());
        assert!(matches!(
            generators(Family::OciMin, 2),
            Err(Error::Unsupported(_))
        ));
        assert_eq!(oci_generating_family(2).unwrap().family(), Family::OciFull);
        assert_eq!(oci_generating_family(3).unwrap().family(), Family::OciMin);
    }

    #[test]
    fn unique_extension_examples_and_oracle() {
        let a = PartialPerm::new(4, [(2, 4)]).unwrap();
        assert_eq!(unique_extension(&a).unwrap(), 2);
        let b = PartialPerm::new(4, [(3, 1), (4, 2)]).unwrap();
        assert_eq!(unique_extension(&b).unwrap(), 2);
        assert_eq!(unique_extension(&PartialPerm::identity(5).unwrap()).unwrap(), 0);
        assert!(matches!(
            unique_extension(&PartialPerm::empty(3).unwrap()),
            Err(Error::AmbiguousExtension)
        ));
        let not_restriction = PartialPerm::new(3, [(1, 1), (2, 3)]).unwrap();
        assert!(matches!(
            unique_extension(&not_restriction),
            Err(Error::NotARestriction { .. })
        ));

        // Oracle: for every nonempty element, exactly one exponent matches.
        for n in 1..=5u32 {
            let g = PartialPerm::cycle(n).unwrap();
            for a in all_ci(n) {
                if a.is_empty_map() {
                    continue;
                }
                let matching: Vec<u32> = (0..n)
                    .filter(|&k| {
                        let gk = g.pow(k);
                        a.pairs().iter().all(|&(i, j)| gk.apply(i) == Some(j))
                    })
                    .collect();
                assert_eq!(matching.len(), 1, "{a}");
                assert_eq!(matching[0], unique_extension(&a).unwrap());
            }
        }
    }

    #[test]
    fn canonical_ci_words() {
        let a = PartialPerm::new(4, [(3, 1), (4, 2)]).unwrap();
        assert_eq!(canonical_word_ci(&a).unwrap().to_string(), "g^2 e3 e4");
        let id = PartialPerm::identity(3).unwrap();
        assert_eq!(canonical_word_ci(&id).unwrap(), Word::empty());
        let zero = PartialPerm::empty(3).unwrap();
        assert_eq!(canonical_word_ci(&zero).unwrap().to_string(), "e1 e2 e3");
        let bad = PartialPerm::new(3, [(1, 1), (2, 3)]).unwrap();
        assert!(matches!(
            canonical_word_ci(&bad),
            Err(Error::NotARestriction { .. })
        ));
    }

    #[test]
    fn canonical_oci_words() {
        let x = x_gen(3).unwrap();
        assert_eq!(canonical_word_oci(&x).unwrap().to_string(), "x");
        let e1 = e_gen(3, 1).unwrap();
        assert_eq!(canonical_word_oci(&e1).unwrap().to_string(), "e1");
        let down = PartialPerm::new(3, [(3, 1)]).unwrap();
        assert_eq!(canonical_word_oci(&down).unwrap().to_string(), "y^2");
        let up = PartialPerm::new(4, [(1, 3)]).unwrap();
        assert_eq!(canonical_word_oci(&up).unwrap().to_string(), "x^2 e4");
        let g = PartialPerm::cycle(3).unwrap();
        assert!(matches!(
            canonical_word_oci(&g),
            Err(Error::NotOrderPreserving { .. })
        ));
    }

    #[test]
    fn canonical_words_round_trip_and_are_distinct() {
        for n in 1..=5u32 {
            let ci_alphabet: Vec<Letter> =
                std::iter::once(Letter::g()).chain((1..=n).map(Letter::e)).collect();
            let oci_alphabet: Vec<Letter> = [Letter::x(), Letter::y()]
                .into_iter()
                .chain((1..=n).map(Letter::e))
                .collect();
            let phi_ci = standard_assignment(&ci_alphabet, n).unwrap();
            let phi_oci = standard_assignment(&oci_alphabet, n).unwrap();

            let mut ci_words = HashSet::new();
            let mut oci_words = HashSet::new();
            for a in all_ci(n) {
                let w = canonical_word_ci(&a).unwrap();
                assert_eq!(phi_ci.evaluate(&w).unwrap(), a, "ci word {w}");
                ci_words.insert(w);
                if a.is_order_preserving() {
                    let w = canonical_word_oci(&a).unwrap();
                    assert_eq!(phi_oci.evaluate(&w).unwrap(), a, "oci word {w}");
                    oci_words.insert(w);
                }
            }
            assert_eq!(ci_words.len() as u64, ci_size(n));
            assert_eq!(oci_words.len() as u64, oci_size(n));
        }
    }

    #[test]
    fn shift_power_identities() {
        // x^k = g^k e_1 … e_k and y^k = g^(n−k) e_(n−k+1) … e_n.
        for n in 1..=6u32 {
            let g = PartialPerm::cycle(n).unwrap();
            let x = x_gen(n).unwrap();
            let y = y_gen(n).unwrap();
            for k in 1..=n {
                let mut up = g.pow(k);
                for i in 1..=k {
                    up = up.compose(&e_gen(n, i).unwrap()).unwrap();
                }
                assert_eq!(x.pow(k), up, "x^{k} at n={n}");
                let mut down = g.pow(n - k);
                for i in (n - k + 1)..=n {
                    down = down.compose(&e_gen(n, i).unwrap()).unwrap();
                }
                assert_eq!(y.pow(k), down, "y^{k} at n={n}");
            }
            // The two products xy and yx are the outer partial identities.
            assert_eq!(x.compose(&y).unwrap(), e_gen(n, n).unwrap());
            assert_eq!(y.compose(&x).unwrap(), e_gen(n, 1).unwrap());
        }
    }

    #[test]
    fn conjugation_moves_the_first_idempotent() {
        // e_i = g^(n−i+1) e_1 g^(i−1).
        for n in 1..=6u32 {
            let g = PartialPerm::cycle(n).unwrap();
            let e1 = e_gen(n, 1).unwrap();
            for i in 1..=n {
                let conj = g
                    .pow(n - i + 1)
                    .compose(&e1)
                    .unwrap()
                    .compose(&g.pow(i - 1))
                    .unwrap();
                assert_eq!(conj, e_gen(n, i).unwrap(), "e_{i} at n={n}");
            }
        }
    }

    #[test]
    fn idempotent_products_are_complement_identities() {
        // The product of e_i over i ∈ X is the partial identity off X.
        for n in 1..=6u32 {
            for mask in 0..(1u32 << n) {
                let xs: Vec<u32> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                let mut prod = PartialPerm::identity(n).unwrap();
                for &i in &xs {
                    prod = prod.compose(&e_gen(n, i).unwrap()).unwrap();
                }
                let complement: Vec<u32> = (1..=n).filter(|i| !xs.contains(i)).collect();
                assert_eq!(
                    prod,
                    PartialPerm::partial_identity(n, &complement).unwrap()
                );
            }
        }
    }

    #[test]
    fn standard_assignment_rejects_letters_with_no_value() {
        let letters = [Letter::g(), Letter::e(5)];
        assert!(matches!(
            standard_assignment(&letters, 3),
            Err(Error::Unsupported(_))
        ));
    }
}
