use serde_json::{json, Value};

use crate::error::Error;
use crate::perm::PartialPerm;
use crate::word::{AlphabetOrder, Letter, Word};

/// A defining relation `lhs = rhs`, tagged with its family label and
/// parameter bindings (for example `R3[i=1,j=2]`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    pub tag: String,
    pub lhs: Word,
    pub rhs: Word,
}

impl Relation {
    pub fn new(tag: impl Into<String>, lhs: Word, rhs: Word) -> Self {
        Relation {
            tag: tag.into(),
            lhs,
            rhs,
        }
    }

    /// True when both relations assert the same unordered pair of words.
    pub fn same_pair(&self, other: &Relation) -> bool {
        (self.lhs == other.lhs && self.rhs == other.rhs)
            || (self.lhs == other.rhs && self.rhs == other.lhs)
    }

    /// True when both sides are literally the same word.
    pub fn is_trivial(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tag": self.tag,
            "lhs": self.lhs.to_string(),
            "rhs": self.rhs.to_string(),
        })
    }
}

/// A finite monoid presentation: an ordered alphabet and an ordered list of
/// tagged relations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Presentation {
    name: String,
    alphabet: Vec<Letter>,
    relations: Vec<Relation>,
}

impl Presentation {
    /// Validates that letters are distinct, every relation only uses alphabet
    /// letters, and relation tags are distinct.
    pub fn new(
        name: impl Into<String>,
        alphabet: Vec<Letter>,
        relations: Vec<Relation>,
    ) -> Result<Self, Error> {
        if alphabet.is_empty() {
            return Err(Error::InvalidPresentation("empty alphabet".into()));
        }
        for (k, letter) in alphabet.iter().enumerate() {
            if alphabet[..k].contains(letter) {
                return Err(Error::InvalidPresentation(format!(
                    "duplicate letter {letter}"
                )));
            }
        }
        for (k, rel) in relations.iter().enumerate() {
            if relations[..k].iter().any(|r| r.tag == rel.tag) {
                return Err(Error::InvalidPresentation(format!(
                    "duplicate relation tag {}",
                    rel.tag
                )));
            }
            for side in [&rel.lhs, &rel.rhs] {
                for letter in side.letters() {
                    if !alphabet.contains(letter) {
                        return Err(Error::ForeignLetter {
                            letter: letter.to_string(),
                        });
                    }
                }
            }
        }
        Ok(Presentation {
            name: name.into(),
            alphabet,
            relations,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn order(&self) -> AlphabetOrder {
        AlphabetOrder::new(&self.alphabet)
    }

    pub fn relation(&self, tag: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.tag == tag)
    }

    /// A copy with the named relation removed; errors when the tag is absent.
    pub fn without_relation(&self, tag: &str) -> Result<Presentation, Error> {
        if self.relation(tag).is_none() {
            return Err(Error::InvalidPresentation(format!("no relation {tag}")));
        }
        let relations = self
            .relations
            .iter()
            .filter(|r| r.tag != tag)
            .cloned()
            .collect();
        Presentation::new(format!("{} minus {tag}", self.name), self.alphabet.clone(), relations)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "alphabet": self.alphabet.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "relations": self.relations.iter().map(Relation::to_json).collect::<Vec<_>>(),
        })
    }
}

/// An interpretation of letters as concrete partial permutations on a common
/// ground set. Values may coincide; only the letters must be distinct.
#[derive(Clone, Debug)]
pub struct GeneratorAssignment {
    n: u32,
    pairs: Vec<(Letter, PartialPerm)>,
}

impl GeneratorAssignment {
    pub fn new(pairs: Vec<(Letter, PartialPerm)>) -> Result<Self, Error> {
        let n = match pairs.first() {
            Some((_, p)) => p.n(),
            None => return Err(Error::InvalidPresentation("empty assignment".into())),
        };
        for (k, (letter, perm)) in pairs.iter().enumerate() {
            if perm.n() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: perm.n(),
                });
            }
            if pairs[..k].iter().any(|(prev, _)| prev == letter) {
                return Err(Error::InvalidPresentation(format!(
                    "letter {letter} assigned twice"
                )));
            }
        }
        Ok(GeneratorAssignment { n, pairs })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn get(&self, letter: &Letter) -> Option<&PartialPerm> {
        self.pairs
            .iter()
            .find(|(l, _)| l == letter)
            .map(|(_, p)| p)
    }

    pub fn pairs(&self) -> &[(Letter, PartialPerm)] {
        &self.pairs
    }

    pub fn images(&self) -> Vec<PartialPerm> {
        self.pairs.iter().map(|(_, p)| p.clone()).collect()
    }

    /// Evaluates a word left to right; the empty word is the identity map.
    pub fn evaluate(&self, word: &Word) -> Result<PartialPerm, Error> {
        let mut acc = PartialPerm::identity(self.n)?;
        for letter in word.letters() {
            let image = self.get(letter).ok_or_else(|| Error::UnassignedLetter {
                letter: letter.to_string(),
            })?;
            acc = acc.compose(image)?;
        }
        Ok(acc)
    }

    /// Checks every relation in listed order and stops at the first failure.
    pub fn satisfies(&self, p: &Presentation) -> Result<SatisfactionReport, Error> {
        for (k, rel) in p.relations().iter().enumerate() {
            let lhs_value = self.evaluate(&rel.lhs)?;
            let rhs_value = self.evaluate(&rel.rhs)?;
            if lhs_value != rhs_value {
                return Ok(SatisfactionReport {
                    ok: false,
                    checked: k + 1,
                    failure: Some(RelationFailure {
                        tag: rel.tag.clone(),
                        lhs: rel.lhs.clone(),
                        rhs: rel.rhs.clone(),
                        lhs_value,
                        rhs_value,
                    }),
                });
            }
        }
        Ok(SatisfactionReport {
            ok: true,
            checked: p.relations().len(),
            failure: None,
        })
    }
}

/// Outcome of checking an assignment against a presentation.
#[derive(Clone, Debug)]
pub struct SatisfactionReport {
    pub ok: bool,
    /// Number of relations evaluated before stopping.
    pub checked: usize,
    pub failure: Option<RelationFailure>,
}

/// The first relation that failed, with both sides evaluated.
#[derive(Clone, Debug)]
pub struct RelationFailure {
    pub tag: String,
    pub lhs: Word,
    pub rhs: Word,
    pub lhs_value: PartialPerm,
    pub rhs_value: PartialPerm,
}

impl SatisfactionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "ok": self.ok,
            "checked": self.checked,
            "failure": self.failure.as_ref().map(|f| json!({
                "tag": f.tag,
                "lhs": f.lhs.to_string(),
                "rhs": f.rhs.to_string(),
                "lhs_value": f.lhs_value.to_string(),
                "rhs_value": f.rhs_value.to_string(),
            })),
        })
    }
}

pub(crate) fn word_of(letters: impl IntoIterator<Item = Letter>) -> Word {
    Word::from_letters(letters)
}

/// The ascending product `e_lo e_(lo+1) … e_hi`; empty when `lo > hi`.
pub(crate) fn e_range(lo: u32, hi: u32) -> Word {
    word_of((lo..=hi).map(Letter::e))
}

/// Presentation on `{g, e_1, …, e_n}`: cycle order, idempotency and
/// commutation of the `e_i`, the conjugation ladder moving `g` across the
/// `e_i`, and the absorption relation for the full idempotent product.
///
/// Relation count: `(n² + 3n + 4) / 2`.
pub fn build_r(n: u32) -> Result<Presentation, Error> {
    if n == 0 {
        return Err(Error::ZeroSize);
    }
    let g = Letter::g();
    let mut alphabet = vec![g.clone()];
    alphabet.extend((1..=n).map(Letter::e));

    let mut relations = vec![Relation::new("R1", Word::power(&g, n), Word::empty())];
    for i in 1..=n {
        relations.push(Relation::new(
            format!("R2[i={i}]"),
            word_of([Letter::e(i), Letter::e(i)]),
            word_of([Letter::e(i)]),
        ));
    }
    for i in 1..=n {
        for j in (i + 1)..=n {
            relations.push(Relation::new(
                format!("R3[i={i},j={j}]"),
                word_of([Letter::e(i), Letter::e(j)]),
                word_of([Letter::e(j), Letter::e(i)]),
            ));
        }
    }
    relations.push(Relation::new(
        "R4[wrap]",
        word_of([g.clone(), Letter::e(1)]),
        word_of([Letter::e(n), g.clone()]),
    ));
    for i in 1..n {
        relations.push(Relation::new(
            format!("R4[i={i}]"),
            word_of([g.clone(), Letter::e(i + 1)]),
            word_of([Letter::e(i), g.clone()]),
        ));
    }
    relations.push(Relation::new(
        "R5",
        word_of([g.clone()]).concat(&e_range(1, n)),
        e_range(1, n),
    ));
    Presentation::new(format!("R[n={n}]"), alphabet, relations)
}

/// Two-generator presentation on `{g, e}` obtained from `R` by eliminating
/// `e_2, …, e_n`: cycle order, one idempotent, conjugate commutations, and
/// one absorption relation.
///
/// Relation count: `(n² − n + 6) / 2`.
pub fn build_q(n: u32) -> Result<Presentation, Error> {
    if n == 0 {
        return Err(Error::ZeroSize);
    }
    let g = Letter::g();
    let e = Letter::e_plain();
    let alphabet = vec![g.clone(), e.clone()];

    let mut relations = vec![
        Relation::new("Q1", Word::power(&g, n), Word::empty()),
        Relation::new("Q2", word_of([e.clone(), e.clone()]), word_of([e.clone()])),
    ];
    for i in 1..=n {
        for j in (i + 1)..=n {
            let a = Word::power(&g, n - j + i);
            let b = Word::power(&g, n - i + j);
            let conj = a.concat(&word_of([e.clone()])).concat(&b);
            relations.push(Relation::new(
                format!("Q3[i={i},j={j}]"),
                word_of([e.clone()]).concat(&conj),
                conj.concat(&word_of([e.clone()])),
            ));
        }
    }
    let block = word_of([e.clone()]).concat(&Word::power(&g, n - 1));
    let mut absorbed = Word::empty();
    for _ in 0..n {
        absorbed = absorbed.concat(&block);
    }
    relations.push(Relation::new(
        "Q4",
        word_of([g.clone()]).concat(&absorbed),
        absorbed,
    ));
    Presentation::new(format!("Q[n={n}]"), alphabet, relations)
}

/// Presentation on `{x, y, e_1, …, e_n}` for the order-preserving submonoid:
/// idempotency and commutation, the mutual-inverse relations for the shift
/// pair, absorption of `e_1` at the ends, the shift ladder, and one
/// absorption relation for the full idempotent product.
///
/// Relation count: `(n² + 3n + 8) / 2`.
pub fn build_u(n: u32) -> Result<Presentation, Error> {
    if n == 0 {
        return Err(Error::ZeroSize);
    }
    let x = Letter::x();
    let y = Letter::y();
    let mut alphabet = vec![x.clone(), y.clone()];
    alphabet.extend((1..=n).map(Letter::e));

    let mut relations = Vec::new();
    for i in 1..=n {
        relations.push(Relation::new(
            format!("U1[i={i}]"),
            word_of([Letter::e(i), Letter::e(i)]),
            word_of([Letter::e(i)]),
        ));
    }
    relations.push(Relation::new(
        "U2[xy]",
        word_of([x.clone(), y.clone()]),
        word_of([Letter::e(n)]),
    ));
    relations.push(Relation::new(
        "U2[yx]",
        word_of([y.clone(), x.clone()]),
        word_of([Letter::e(1)]),
    ));
    relations.push(Relation::new(
        "U3[xe1]",
        word_of([x.clone(), Letter::e(1)]),
        word_of([x.clone()]),
    ));
    relations.push(Relation::new(
        "U3[e1y]",
        word_of([Letter::e(1), y.clone()]),
        word_of([y.clone()]),
    ));
    for i in 1..=n {
        for j in (i + 1)..=n {
            relations.push(Relation::new(
                format!("U4[i={i},j={j}]"),
                word_of([Letter::e(i), Letter::e(j)]),
                word_of([Letter::e(j), Letter::e(i)]),
            ));
        }
    }
    for i in 1..n {
        relations.push(Relation::new(
            format!("U5[i={i}]"),
            word_of([x.clone(), Letter::e(i + 1)]),
            word_of([Letter::e(i), x.clone()]),
        ));
    }
    relations.push(Relation::new(
        "U6",
        word_of([x.clone()]).concat(&e_range(2, n)),
        e_range(1, n),
    ));
    Presentation::new(format!("U[n={n}]"), alphabet, relations)
}

/// Presentation on the minimal alphabet `{x, y, e_2, …, e_(n−1)}` obtained
/// from `U` by eliminating `e_1 = yx` and `e_n = xy`. Requires `n ≥ 3`.
///
/// Relation count: `(n² + 3n) / 2`.
pub fn build_v(n: u32) -> Result<Presentation, Error> {
    if n < 3 {
        return Err(Error::Unsupported(format!(
            "V requires n >= 3 so that e(n-1) names a letter; got n = {n}"
        )));
    }
    let x = Letter::x();
    let y = Letter::y();
    let mut alphabet = vec![x.clone(), y.clone()];
    alphabet.extend((2..n).map(Letter::e));

    let mut relations = Vec::new();
    for i in 2..n {
        relations.push(Relation::new(
            format!("V1[i={i}]"),
            word_of([Letter::e(i), Letter::e(i)]),
            word_of([Letter::e(i)]),
        ));
    }
    relations.push(Relation::new(
        "V2[xyx]",
        word_of([x.clone(), y.clone(), x.clone()]),
        word_of([x.clone()]),
    ));
    relations.push(Relation::new(
        "V2[yxy]",
        word_of([y.clone(), x.clone(), y.clone()]),
        word_of([y.clone()]),
    ));
    relations.push(Relation::new(
        "V3",
        word_of([y.clone(), x.clone(), x.clone(), y.clone()]),
        word_of([x.clone(), y.clone(), y.clone(), x.clone()]),
    ));
    for i in 2..n {
        for j in (i + 1)..n {
            relations.push(Relation::new(
                format!("V4[i={i},j={j}]"),
                word_of([Letter::e(i), Letter::e(j)]),
                word_of([Letter::e(j), Letter::e(i)]),
            ));
        }
    }
    for i in 2..n {
        relations.push(Relation::new(
            format!("V5[xy,i={i}]"),
            word_of([x.clone(), y.clone(), Letter::e(i)]),
            word_of([Letter::e(i), x.clone(), y.clone()]),
        ));
    }
    for i in 2..n {
        relations.push(Relation::new(
            format!("V5[yx,i={i}]"),
            word_of([y.clone(), x.clone(), Letter::e(i)]),
            word_of([Letter::e(i), y.clone(), x.clone()]),
        ));
    }
    for i in 2..=n.saturating_sub(2) {
        relations.push(Relation::new(
            format!("V6[i={i}]"),
            word_of([x.clone(), Letter::e(i + 1)]),
            word_of([Letter::e(i), x.clone()]),
        ));
    }
    relations.push(Relation::new(
        "V7[xxy]",
        word_of([x.clone(), x.clone(), y.clone()]),
        word_of([Letter::e(n - 1), x.clone()]),
    ));
    relations.push(Relation::new(
        "V7[yxx]",
        word_of([y.clone(), x.clone(), x.clone()]),
        word_of([x.clone(), Letter::e(2)]),
    ));
    let mid = e_range(2, n - 1);
    relations.push(Relation::new(
        "V8",
        word_of([y.clone(), x.clone()])
            .concat(&mid)
            .concat(&word_of([x.clone(), y.clone()])),
        word_of([x.clone()])
            .concat(&mid)
            .concat(&word_of([x.clone(), y.clone()])),
    ));
    Presentation::new(format!("V[n={n}]"), alphabet, relations)
}

/// Closed-form relation counts for the four builders.
pub fn relation_count_r(n: u64) -> u64 {
    (n * n + 3 * n + 4) / 2
}

pub fn relation_count_q(n: u64) -> u64 {
    (n * n - n + 6) / 2
}

pub fn relation_count_u(n: u64) -> u64 {
    (n * n + 3 * n + 8) / 2
}

pub fn relation_count_v(n: u64) -> u64 {
    (n * n + 3 * n) / 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::standard_assignment;

    #[test]
    fn relation_counts_match_the_closed_forms() {
        for n in 3..=12u32 {
            let m = n as u64;
            assert_eq!(build_r(n).unwrap().relations().len() as u64, relation_count_r(m));
            assert_eq!(build_q(n).unwrap().relations().len() as u64, relation_count_q(m));
            assert_eq!(build_u(n).unwrap().relations().len() as u64, relation_count_u(m));
            assert_eq!(build_v(n).unwrap().relations().len() as u64, relation_count_v(m));
        }
    }

    #[test]
    fn relation_counts_match_family_size_sums() {
        // Independent tally: sum the family sizes one family at a time.
        for n in 1..=12u64 {
            assert_eq!(relation_count_r(n), 1 + n + n * (n - 1) / 2 + n + 1);
            assert_eq!(relation_count_q(n), 1 + 1 + n * (n - 1) / 2 + 1);
            assert_eq!(relation_count_u(n), n + 2 + 2 + n * (n - 1) / 2 + (n - 1) + 1);
        }
        for n in 3..=12u64 {
            assert_eq!(
                relation_count_v(n),
                (n - 2) + 2 + 1 + (n - 2) * (n - 3) / 2 + 2 * (n - 2) + (n - 3) + 2 + 1
            );
        }
    }

    #[test]
    fn spot_check_individual_relations() {
        let r3 = build_r(3).unwrap();
        assert_eq!(r3.relation("R1").unwrap().lhs.to_string(), "g^3");
        assert_eq!(r3.relation("R1").unwrap().rhs.to_string(), "1");
        assert_eq!(r3.relation("R5").unwrap().lhs.to_string(), "g e1 e2 e3");
        assert_eq!(r3.relation("R4[wrap]").unwrap().rhs.to_string(), "e3 g");

        let q3 = build_q(3).unwrap();
        assert_eq!(q3.relation("Q3[i=1,j=2]").unwrap().lhs.to_string(), "e g^2 e g^4");
        assert_eq!(q3.relation("Q4").unwrap().lhs.to_string(), "g e g^2 e g^2 e g^2");

        let u3 = build_u(3).unwrap();
        assert_eq!(u3.relation("U2[xy]").unwrap().rhs.to_string(), "e3");
        assert_eq!(u3.relation("U3[xe1]").unwrap().rhs.to_string(), "x");
        assert_eq!(u3.relation("U6").unwrap().lhs.to_string(), "x e2 e3");
        assert_eq!(u3.relation("U6").unwrap().rhs.to_string(), "e1 e2 e3");

        let v3 = build_v(3).unwrap();
        assert_eq!(v3.relations().len(), 9);
        assert_eq!(v3.relation("V3").unwrap().lhs.to_string(), "y x^2 y");
        assert_eq!(v3.relation("V7[xxy]").unwrap().rhs.to_string(), "e2 x");
        assert_eq!(v3.relation("V8").unwrap().lhs.to_string(), "y x e2 x y");
        assert_eq!(v3.relation("V8").unwrap().rhs.to_string(), "x e2 x y");
    }

    #[test]
    fn v_rejects_small_ground_sets() {
        assert!(matches!(build_v(2), Err(Error::Unsupported(_))));
        assert!(matches!(build_v(1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn validation_rejects_foreign_letters_and_duplicate_tags() {
        let g = Letter::g();
        let bad = Presentation::new(
            "test",
            vec![g.clone()],
            vec![Relation::new("A", Word::from_letters([Letter::x()]), Word::empty())],
        );
        assert!(matches!(bad, Err(Error::ForeignLetter { .. })));

        let dup = Presentation::new(
            "test",
            vec![g.clone()],
            vec![
                Relation::new("A", Word::power(&g, 2), Word::empty()),
                Relation::new("A", Word::power(&g, 3), Word::empty()),
            ],
        );
        assert!(matches!(dup, Err(Error::InvalidPresentation(_))));
    }

    #[test]
    fn standard_assignments_satisfy_their_presentations() {
        for n in 2..=8u32 {
            for p in [build_r(n).unwrap(), build_q(n).unwrap(), build_u(n).unwrap()] {
                let phi = standard_assignment(p.alphabet(), n).unwrap();
                let report = phi.satisfies(&p).unwrap();
                assert!(report.ok, "{} fails at {:?}", p.name(), report.failure);
            }
        }
        for n in 3..=8u32 {
            let p = build_v(n).unwrap();
            let phi = standard_assignment(p.alphabet(), n).unwrap();
            assert!(phi.satisfies(&p).unwrap().ok);
        }
    }

    #[test]
    fn corrupting_the_assignment_is_reported_with_the_failing_family() {
        // Reassign e1 to the value of e2 and keep everything else standard.
        let p = build_r(3).unwrap();
        let n = 3;
        let std = standard_assignment(p.alphabet(), n).unwrap();
        let e2_value = std.get(&Letter::e(2)).unwrap().clone();
        let pairs: Vec<(Letter, PartialPerm)> = std
            .pairs()
            .iter()
            .map(|(l, v)| {
                let value = if *l == Letter::e(1) { e2_value.clone() } else { v.clone() };
                (l.clone(), value)
            })
            .collect();
        let phi = GeneratorAssignment::new(pairs).unwrap();
        let report = phi.satisfies(&p).unwrap();
        assert!(!report.ok);
        let tag = report.failure.unwrap().tag;
        assert!(tag.starts_with("R4"), "first failure was {tag}");
    }

    #[test]
    fn every_relation_is_mutation_sensitive_or_zero_valued() {
        // Appending a letter to the right side must be able to break each
        // relation, except when both sides evaluate to the empty map, which
        // absorbs everything. Exactly the four full-product absorption
        // relations are immune in that way.
        for n in [3u32, 4u32] {
            for builder in [build_r, build_q, build_u, build_v] {
                let p = builder(n).unwrap();
                let phi = standard_assignment(p.alphabet(), n).unwrap();
                let zero = PartialPerm::empty(n).unwrap();
                let mut immune = Vec::new();
                for rel in p.relations() {
                    let breakable = p.alphabet().iter().any(|l| {
                        let mut rhs = rel.rhs.clone();
                        rhs.push(l.clone());
                        phi.evaluate(&rel.lhs).unwrap() != phi.evaluate(&rhs).unwrap()
                    });
                    if !breakable {
                        assert_eq!(phi.evaluate(&rel.lhs).unwrap(), zero, "{}", rel.tag);
                        assert_eq!(phi.evaluate(&rel.rhs).unwrap(), zero, "{}", rel.tag);
                        immune.push(rel.tag.clone());
                    }
                }
                let family = &p.name()[..1];
                let expected = match family {
                    "R" => vec!["R5".to_string()],
                    "Q" => vec!["Q4".to_string()],
                    "U" => vec!["U6".to_string()],
                    "V" => vec!["V8".to_string()],
                    _ => unreachable!(),
                };
                assert_eq!(immune, expected, "{}", p.name());
            }
        }
    }

    #[test]
    fn evaluate_follows_words_left_to_right() {
        let p = build_r(4).unwrap();
        let phi = standard_assignment(p.alphabet(), 4).unwrap();
        let w: Word = "g^2 e3 e4".parse().unwrap();
        assert_eq!(
            phi.evaluate(&w).unwrap(),
            PartialPerm::new(4, [(3, 1), (4, 2)]).unwrap()
        );
        assert!(phi.evaluate(&Word::empty()).unwrap().is_identity());
        let kill_all: Word = "e1 e2 e3 e4".parse().unwrap();
        assert!(phi.evaluate(&kill_all).unwrap().is_empty_map());
        let foreign: Word = "x".parse().unwrap();
        assert!(matches!(
            phi.evaluate(&foreign),
            Err(Error::UnassignedLetter { .. })
        ));
    }

    #[test]
    fn without_relation_removes_exactly_one_tag() {
        let p = build_r(3).unwrap();
        let q = p.without_relation("R5").unwrap();
        assert_eq!(q.relations().len(), p.relations().len() - 1);
        assert!(q.relation("R5").is_none());
        assert!(p.without_relation("R9").is_err());
    }

    #[test]
    fn presentation_json_is_stable() {
        let p = build_q(2).unwrap();
        let expected = serde_json::json!({
            "name": "Q[n=2]",
            "alphabet": ["g", "e"],
            "relations": [
                {"tag": "Q1", "lhs": "g^2", "rhs": "1"},
                {"tag": "Q2", "lhs": "e^2", "rhs": "e"},
                {"tag": "Q3[i=1,j=2]", "lhs": "e g e g^3", "rhs": "g e g^3 e"},
                {"tag": "Q4", "lhs": "g e g e g", "rhs": "e g e g"},
            ],
        });
        assert_eq!(p.to_json(), expected);
    }
}
