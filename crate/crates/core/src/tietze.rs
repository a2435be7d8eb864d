use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::error::Error;
use crate::families::{ci_size, oci_size, standard_assignment};
use crate::fp::{enumerate_fp, FpCaps};
use crate::presentation::{build_q, build_r, build_u, build_v, word_of, Presentation, Relation};
use crate::word::{AlphabetOrder, Letter, Word};

/// Generator eliminations to perform in one pass: each letter is replaced by
/// its defining word everywhere and removed from the alphabet.
#[derive(Clone, Debug)]
pub struct SubstitutionPlan {
    eliminated: Vec<(Letter, Word)>,
}

impl SubstitutionPlan {
    /// The defining words must not mention any eliminated letter, so the
    /// substitution terminates in one pass.
    pub fn new(eliminated: Vec<(Letter, Word)>) -> Result<Self, Error> {
        for (k, (letter, _)) in eliminated.iter().enumerate() {
            if eliminated[..k].iter().any(|(other, _)| other == letter) {
                return Err(Error::InvalidPresentation(format!(
                    "letter {letter} eliminated twice"
                )));
            }
        }
        for (_, word) in &eliminated {
            for letter in word.letters() {
                if eliminated.iter().any(|(gone, _)| gone == letter) {
                    return Err(Error::CyclicSubstitution {
                        letter: letter.to_string(),
                    });
                }
            }
        }
        Ok(SubstitutionPlan { eliminated })
    }

    pub fn eliminated(&self) -> &[(Letter, Word)] {
        &self.eliminated
    }
}

/// A relation surviving a chain of transformations, with the audit trail of
/// what was done to it.
#[derive(Clone, Debug)]
pub struct AnnotatedRelation {
    pub relation: Relation,
    pub trail: Vec<String>,
}

/// A relation removed by a transformation, with the removal's justification.
#[derive(Clone, Debug)]
pub struct DroppedRelation {
    pub tag: String,
    pub lhs: Word,
    pub rhs: Word,
    pub reason: String,
}

/// A presentation mid-transformation: surviving relations keep their
/// original tags and carry trails; removed relations are retained for the
/// report rather than silently discarded.
#[derive(Clone, Debug)]
pub struct TietzeResult {
    name: String,
    alphabet: Vec<Letter>,
    relations: Vec<AnnotatedRelation>,
    dropped: Vec<DroppedRelation>,
}

impl TietzeResult {
    pub fn seed(p: &Presentation) -> Self {
        TietzeResult {
            name: p.name().to_string(),
            alphabet: p.alphabet().to_vec(),
            relations: p
                .relations()
                .iter()
                .map(|r| AnnotatedRelation {
                    relation: r.clone(),
                    trail: Vec::new(),
                })
                .collect(),
            dropped: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn relations(&self) -> &[AnnotatedRelation] {
        &self.relations
    }

    pub fn dropped(&self) -> &[DroppedRelation] {
        &self.dropped
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The surviving relations as a validated presentation.
    pub fn presentation(&self) -> Result<Presentation, Error> {
        Presentation::new(
            self.name.clone(),
            self.alphabet.clone(),
            self.relations.iter().map(|a| a.relation.clone()).collect(),
        )
    }

    /// Replaces each planned letter by its defining word in every relation
    /// and removes it from the alphabet.
    pub fn eliminate(&self, plan: &SubstitutionPlan) -> Result<TietzeResult, Error> {
        for (letter, _) in plan.eliminated() {
            if !self.alphabet.contains(letter) {
                return Err(Error::ForeignLetter {
                    letter: letter.to_string(),
                });
            }
        }
        let survivors: Vec<Letter> = self
            .alphabet
            .iter()
            .filter(|l| plan.eliminated().iter().all(|(gone, _)| gone != *l))
            .cloned()
            .collect();
        for (_, word) in plan.eliminated() {
            for letter in word.letters() {
                if !survivors.contains(letter) {
                    return Err(Error::ForeignLetter {
                        letter: letter.to_string(),
                    });
                }
            }
        }
        let substitute = |w: &Word| {
            let mut out = Word::empty();
            for letter in w.letters() {
                match plan.eliminated().iter().find(|(gone, _)| gone == letter) {
                    Some((_, def)) => out = out.concat(def),
                    None => out.push(letter.clone()),
                }
            }
            out
        };
        let relations = self
            .relations
            .iter()
            .map(|a| {
                let mut trail = a.trail.clone();
                for (letter, def) in plan.eliminated() {
                    if a.relation.lhs.letters().contains(letter)
                        || a.relation.rhs.letters().contains(letter)
                    {
                        trail.push(format!("substituted {letter} -> {def}"));
                    }
                }
                AnnotatedRelation {
                    relation: Relation::new(
                        a.relation.tag.clone(),
                        substitute(&a.relation.lhs),
                        substitute(&a.relation.rhs),
                    ),
                    trail,
                }
            })
            .collect();
        Ok(TietzeResult {
            name: self.name.clone(),
            alphabet: survivors,
            relations,
            dropped: self.dropped.clone(),
        })
    }

    /// Rewrites every relation to a fixpoint using the group relation
    /// `letter^order = 1`: maximal runs of the letter are reduced mod the
    /// order, and a common prefix (or suffix) run of the letter is cancelled
    /// from both sides when the two runs have equal length — sound because
    /// the letter is invertible in the quotient. Relations whose sides become
    /// identical are removed, as is every later repetition of an unordered
    /// pair. The group relation itself is left untouched: it is the premise
    /// the arithmetic rests on.
    pub fn simplify(&self, group_letter: &Letter, order: u32) -> TietzeResult {
        let group_relation = Relation::new("", Word::power(group_letter, order), Word::empty());
        let mut relations: Vec<AnnotatedRelation> = Vec::new();
        let mut dropped = self.dropped.clone();
        for a in &self.relations {
            let mut lhs = a.relation.lhs.clone();
            let mut rhs = a.relation.rhs.clone();
            let mut trail = a.trail.clone();
            if !a.relation.same_pair(&group_relation) {
                loop {
                    let mut changed = false;
                    let reduced = reduce_runs(&lhs, group_letter, order);
                    if reduced != lhs {
                        lhs = reduced;
                        changed = true;
                        trail.push(format!("reduced {group_letter}-runs mod {order}"));
                    }
                    let reduced = reduce_runs(&rhs, group_letter, order);
                    if reduced != rhs {
                        rhs = reduced;
                        changed = true;
                        trail.push(format!("reduced {group_letter}-runs mod {order}"));
                    }
                    let head = edge_run(&lhs, group_letter, true);
                    if head > 0 && head == edge_run(&rhs, group_letter, true) {
                        lhs = strip(&lhs, head, true);
                        rhs = strip(&rhs, head, true);
                        changed = true;
                        trail.push(format!("cancelled the common prefix {group_letter}^{head}"));
                    }
                    let tail = edge_run(&lhs, group_letter, false);
                    if tail > 0 && tail == edge_run(&rhs, group_letter, false) {
                        lhs = strip(&lhs, tail, false);
                        rhs = strip(&rhs, tail, false);
                        changed = true;
                        trail.push(format!("cancelled the common suffix {group_letter}^{tail}"));
                    }
                    if !changed {
                        break;
                    }
                }
            }
            if lhs == rhs {
                dropped.push(DroppedRelation {
                    tag: a.relation.tag.clone(),
                    lhs,
                    rhs,
                    reason: "trivial after simplification".into(),
                });
                continue;
            }
            let candidate = Relation::new(a.relation.tag.clone(), lhs, rhs);
            if let Some(kept) = relations
                .iter()
                .find(|b| b.relation.same_pair(&candidate))
            {
                dropped.push(DroppedRelation {
                    tag: candidate.tag,
                    lhs: candidate.lhs,
                    rhs: candidate.rhs,
                    reason: format!("duplicate of {}", kept.relation.tag),
                });
                continue;
            }
            relations.push(AnnotatedRelation {
                relation: candidate,
                trail,
            });
        }
        TietzeResult {
            name: self.name.clone(),
            alphabet: self.alphabet.clone(),
            relations,
            dropped,
        }
    }

    /// Removes the relations whose two sides are literally equal.
    pub fn drop_trivial(&self) -> TietzeResult {
        let mut out = self.clone();
        let (trivial, kept): (Vec<_>, Vec<_>) = out
            .relations
            .into_iter()
            .partition(|a| a.relation.is_trivial());
        out.relations = kept;
        for a in trivial {
            out.dropped.push(DroppedRelation {
                tag: a.relation.tag,
                lhs: a.relation.lhs,
                rhs: a.relation.rhs,
                reason: "trivial".into(),
            });
        }
        out
    }

    /// Removes the relations matching the given unordered pair exactly,
    /// recording the stated justification. At least one relation must match.
    pub fn drop_exact(&self, lhs: &Word, rhs: &Word, reason: &str) -> Result<TietzeResult, Error> {
        let pattern = Relation::new("", lhs.clone(), rhs.clone());
        let mut out = self.clone();
        let (matching, kept): (Vec<_>, Vec<_>) = out
            .relations
            .into_iter()
            .partition(|a| a.relation.same_pair(&pattern));
        if matching.is_empty() {
            return Err(Error::InvalidPresentation(format!(
                "no relation matches {lhs} = {rhs}"
            )));
        }
        out.relations = kept;
        for a in matching {
            out.dropped.push(DroppedRelation {
                tag: a.relation.tag,
                lhs: a.relation.lhs,
                rhs: a.relation.rhs,
                reason: reason.into(),
            });
        }
        Ok(out)
    }

    /// Renames an alphabet letter everywhere.
    pub fn rename_letter(&self, from: &Letter, to: &Letter) -> Result<TietzeResult, Error> {
        if !self.alphabet.contains(from) {
            return Err(Error::ForeignLetter {
                letter: from.to_string(),
            });
        }
        if self.alphabet.contains(to) {
            return Err(Error::InvalidPresentation(format!(
                "letter {to} already names a generator"
            )));
        }
        let rename_word = |w: &Word| {
            Word::from_letters(w.letters().iter().map(|l| {
                if l == from {
                    to.clone()
                } else {
                    l.clone()
                }
            }))
        };
        Ok(TietzeResult {
            name: self.name.clone(),
            alphabet: self
                .alphabet
                .iter()
                .map(|l| if l == from { to.clone() } else { l.clone() })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|a| {
                    let mut trail = a.trail.clone();
                    if a.relation.lhs.letters().contains(from)
                        || a.relation.rhs.letters().contains(from)
                    {
                        trail.push(format!("renamed {from} -> {to}"));
                    }
                    AnnotatedRelation {
                        relation: Relation::new(
                            a.relation.tag.clone(),
                            rename_word(&a.relation.lhs),
                            rename_word(&a.relation.rhs),
                        ),
                        trail,
                    }
                })
                .collect(),
            dropped: self.dropped.clone(),
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "alphabet": self.alphabet.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "relations": self.relations.iter().map(|a| json!({
                "tag": a.relation.tag,
                "lhs": a.relation.lhs.to_string(),
                "rhs": a.relation.rhs.to_string(),
                "trail": a.trail,
            })).collect::<Vec<_>>(),
            "dropped": self.dropped.iter().map(|d| json!({
                "tag": d.tag,
                "lhs": d.lhs.to_string(),
                "rhs": d.rhs.to_string(),
                "reason": d.reason,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Merges maximal runs of `letter` and reduces their lengths mod `order`,
/// deleting runs that reduce to zero.
pub fn reduce_runs(w: &Word, letter: &Letter, order: u32) -> Word {
    let mut out = Word::empty();
    for (l, k) in w.runs() {
        if &l == letter {
            let k = k % order;
            for _ in 0..k {
                out.push(l.clone());
            }
        } else {
            for _ in 0..k {
                out.push(l.clone());
            }
        }
    }
    // Deleting a zero run can make two runs of `letter` adjacent.
    if out.runs().iter().filter(|(l, _)| l == letter).any(|(_, k)| *k >= order) {
        return reduce_runs(&out, letter, order);
    }
    out
}

fn edge_run(w: &Word, letter: &Letter, front: bool) -> u32 {
    let letters = w.letters();
    let iter: Box<dyn Iterator<Item = &Letter>> = if front {
        Box::new(letters.iter())
    } else {
        Box::new(letters.iter().rev())
    };
    iter.take_while(|l| *l == letter).count() as u32
}

fn strip(w: &Word, k: u32, front: bool) -> Word {
    let letters = w.letters();
    let k = k as usize;
    if front {
        Word::from_letters(letters[k..].iter().cloned())
    } else {
        Word::from_letters(letters[..letters.len() - k].iter().cloned())
    }
}

/// Canonical form of a relation for set comparison: among all pairs
/// reachable by swapping the sides and (when a group letter is supplied)
/// multiplying both sides on the left and right by the same power of that
/// letter with runs reduced mod its order, the shortlex-least pair. The
/// group relation itself is compared verbatim.
fn canonical_pair(
    lhs: &Word,
    rhs: &Word,
    group: Option<(&Letter, u32)>,
    order_cmp: &AlphabetOrder,
) -> (Word, Word) {
    let orient = |u: Word, v: Word| -> (Word, Word) {
        if order_cmp.shortlex(&v, &u) == std::cmp::Ordering::Less {
            (v, u)
        } else {
            (u, v)
        }
    };
    let Some((g, n)) = group else {
        return orient(lhs.clone(), rhs.clone());
    };
    let group_relation = Relation::new("", Word::power(g, n), Word::empty());
    if Relation::new("", lhs.clone(), rhs.clone()).same_pair(&group_relation) {
        return (Word::empty(), Word::power(g, n));
    }
    let mut best: Option<(Word, Word)> = None;
    for a in 0..n {
        for b in 0..n {
            let wrap = |w: &Word| {
                let padded = Word::power(g, a).concat(w).concat(&Word::power(g, b));
                reduce_runs(&padded, g, n)
            };
            let candidate = orient(wrap(lhs), wrap(rhs));
            best = Some(match best {
                None => candidate,
                Some(current) => {
                    let less = match order_cmp.shortlex(&candidate.0, &current.0) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Greater => false,
                        std::cmp::Ordering::Equal => {
                            order_cmp.shortlex(&candidate.1, &current.1)
                                == std::cmp::Ordering::Less
                        }
                    };
                    if less {
                        candidate
                    } else {
                        current
                    }
                }
            });
        }
    }
    best.expect("the orbit is nonempty")
}

/// Outcome of comparing a derived presentation against the reference one.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub derived_satisfied: bool,
    pub reference_satisfied: bool,
    pub derived_fp_size: usize,
    pub reference_fp_size: usize,
    pub expected_size: u64,
    /// Both presentations are satisfied by the standard assignment and both
    /// quotients have the expected size — the binding criterion.
    pub semantic_ok: bool,
    /// Canonicalized relation sets coincide — diagnostic only.
    pub syntactic_match: bool,
    pub only_in_derived: Vec<String>,
    pub only_in_reference: Vec<String>,
}

impl EquivalenceReport {
    pub fn to_json(&self) -> Value {
        json!({
            "derived_satisfied": self.derived_satisfied,
            "reference_satisfied": self.reference_satisfied,
            "derived_fp_size": self.derived_fp_size,
            "reference_fp_size": self.reference_fp_size,
            "expected_size": self.expected_size,
            "semantic_ok": self.semantic_ok,
            "syntactic_match": self.syntactic_match,
            "only_in_derived": self.only_in_derived,
            "only_in_reference": self.only_in_reference,
        })
    }
}

/// A completed derivation: the seed presentation, the transformed result
/// with trails and dropped relations, the reference it targets, and the
/// equivalence verdicts.
#[derive(Clone, Debug)]
pub struct DerivationReport {
    pub input: Presentation,
    pub output: TietzeResult,
    pub reference: Presentation,
    pub equivalence: EquivalenceReport,
}

impl DerivationReport {
    pub fn to_json(&self) -> Value {
        json!({
            "input": self.input.to_json(),
            "derived": self.output.to_json(),
            "reference": self.reference.to_json(),
            "equivalence": self.equivalence.to_json(),
        })
    }
}

fn compare(
    derived: &Presentation,
    reference: &Presentation,
    group: Option<(&Letter, u32)>,
    expected: u64,
    n: u32,
) -> Result<EquivalenceReport, Error> {
    let derived_satisfied = standard_assignment(derived.alphabet(), n)?
        .satisfies(derived)?
        .ok;
    let reference_satisfied = standard_assignment(reference.alphabet(), n)?
        .satisfies(reference)?
        .ok;
    let caps = FpCaps::for_expected(expected as usize);
    let derived_fp_size = enumerate_fp(derived, caps)?.size();
    let reference_fp_size = enumerate_fp(reference, caps)?.size();
    let semantic_ok = derived_satisfied
        && reference_satisfied
        && derived_fp_size as u64 == expected
        && reference_fp_size as u64 == expected;

    let order_cmp = AlphabetOrder::new(reference.alphabet());
    let canon = |p: &Presentation| -> BTreeSet<(Word, Word)> {
        p.relations()
            .iter()
            .map(|r| canonical_pair(&r.lhs, &r.rhs, group, &order_cmp))
            .collect()
    };
    let derived_set = canon(derived);
    let reference_set = canon(reference);
    let render = |set: &BTreeSet<(Word, Word)>, other: &BTreeSet<(Word, Word)>| {
        set.difference(other)
            .map(|(u, v)| format!("{u} = {v}"))
            .collect::<Vec<_>>()
    };
    let only_in_derived = render(&derived_set, &reference_set);
    let only_in_reference = render(&reference_set, &derived_set);
    let syntactic_match = only_in_derived.is_empty() && only_in_reference.is_empty();
    Ok(EquivalenceReport {
        derived_satisfied,
        reference_satisfied,
        derived_fp_size,
        reference_fp_size,
        expected_size: expected,
        semantic_ok,
        syntactic_match,
        only_in_derived,
        only_in_reference,
    })
}

/// Derives the two-generator presentation from the idempotent-ladder one by
/// eliminating `e_2, …, e_n` via `e_i = g^(n-i+1) e_1 g^(i-1)`, simplifying
/// with the group relation, and renaming `e1` to `e`; then compares the
/// result with the reference two-generator presentation.
pub fn derive_q(n: u32) -> Result<DerivationReport, Error> {
    let (output, input) = derive_q_presentations(n)?;
    let reference = build_q(n)?;
    let equivalence = compare(
        &output.presentation()?,
        &reference,
        Some((&Letter::g(), n)),
        ci_size(n),
        n,
    )?;
    Ok(DerivationReport {
        input,
        output,
        reference,
        equivalence,
    })
}

/// The transformation half of [`derive_q`], without the equivalence legs.
pub fn derive_q_presentations(n: u32) -> Result<(TietzeResult, Presentation), Error> {
    if n < 2 {
        return Err(Error::Unsupported(format!(
            "deriving the two-generator presentation needs n >= 2; got n = {n}"
        )));
    }
    let input = build_r(n)?;
    let g = Letter::g();
    let e1 = Letter::e(1);
    let plan = SubstitutionPlan::new(
        (2..=n)
            .map(|i| {
                let def = Word::power(&g, n - i + 1)
                    .concat(&word_of([e1.clone()]))
                    .concat(&Word::power(&g, i - 1));
                (Letter::e(i), def)
            })
            .collect(),
    )?;
    let output = TietzeResult::seed(&input)
        .eliminate(&plan)?
        .simplify(&g, n)
        .rename_letter(&e1, &Letter::e_plain())?
        .with_name(format!("Q-from-R[n={n}]"));
    Ok((output, input))
}

/// Derives the minimal-alphabet presentation from the one with the full
/// idempotent ladder by eliminating `e_1 = y x` and `e_n = x y`, dropping
/// the relations the substitution makes trivial, and dropping the two
/// documented consequences of `x y x = x`; then compares the result with
/// the reference presentation.
pub fn derive_v(n: u32) -> Result<DerivationReport, Error> {
    if n < 3 {
        return Err(Error::Unsupported(format!(
            "deriving the minimal-alphabet presentation needs n >= 3; got n = {n}"
        )));
    }
    let input = build_u(n)?;
    let x = Letter::x();
    let y = Letter::y();
    let plan = SubstitutionPlan::new(vec![
        (Letter::e(1), word_of([y.clone(), x.clone()])),
        (Letter::e(n), word_of([x.clone(), y.clone()])),
    ])?;
    let consequence = "consequence of x y x = x";
    let output = TietzeResult::seed(&input)
        .eliminate(&plan)?
        .drop_trivial()
        .drop_exact(
            &word_of([y.clone(), x.clone(), y.clone(), x.clone()]),
            &word_of([y.clone(), x.clone()]),
            consequence,
        )?
        .drop_exact(
            &word_of([x.clone(), y.clone(), x.clone(), y.clone()]),
            &word_of([x.clone(), y.clone()]),
            consequence,
        )?
        .with_name(format!("V-from-U[n={n}]"));
    let reference = build_v(n)?;
    let equivalence = compare(&output.presentation()?, &reference, None, oci_size(n), n)?;
    Ok(DerivationReport {
        input,
        output,
        reference,
        equivalence,
    })
}
