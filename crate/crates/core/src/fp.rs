use std::collections::VecDeque;

use serde_json::{json, Value};

use crate::error::Error;
use crate::monoid::MonoidTable;
use crate::presentation::{Presentation, RelationFailure, SatisfactionReport};
use crate::word::{Letter, Word};
use crate::presentation::GeneratorAssignment;

/// Budget for [`enumerate_fp`]: live-state and step caps. A step is one
/// transition lookup while tracing a relation.
#[derive(Clone, Copy, Debug)]
pub struct FpCaps {
    pub max_states: usize,
    pub max_steps: u64,
}

impl Default for FpCaps {
    fn default() -> Self {
        FpCaps {
            max_states: 1_000_000,
            max_steps: 100_000_000,
        }
    }
}

impl FpCaps {
    /// Caps sized for a quotient expected to have `expected` elements.
    pub fn for_expected(expected: usize) -> Self {
        FpCaps {
            max_states: expected.saturating_mul(64).max(64),
            max_steps: 100_000_000,
        }
    }
}

/// The right-congruence closure of a finite presentation, enumerated to
/// completion: a total transition table on the quotient's elements, with the
/// class of the empty word at state 0 and shortlex normal forms throughout.
#[derive(Clone, Debug)]
pub struct FpMonoid {
    presentation: Presentation,
    size: usize,
    /// `transitions[q][k]` is the state reached from `q` by alphabet letter `k`.
    transitions: Vec<Vec<u32>>,
    /// Shortlex-least word reaching each state.
    normal_forms: Vec<Word>,
}

impl FpMonoid {
    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn transitions(&self) -> &[Vec<u32>] {
        &self.transitions
    }

    pub fn normal_forms(&self) -> &[Word] {
        &self.normal_forms
    }

    pub fn letter_index(&self, letter: &Letter) -> Result<usize, Error> {
        self.presentation
            .alphabet()
            .iter()
            .position(|l| l == letter)
            .ok_or_else(|| Error::ForeignLetter {
                letter: letter.to_string(),
            })
    }

    /// Single transition step.
    pub fn step(&self, state: u32, letter: &Letter) -> Result<u32, Error> {
        Ok(self.transitions[state as usize][self.letter_index(letter)?])
    }

    /// The state reached from the empty-word class by a word.
    pub fn state_of_word(&self, word: &Word) -> Result<u32, Error> {
        let mut q = 0u32;
        for letter in word.letters() {
            q = self.step(q, letter)?;
        }
        Ok(q)
    }

    /// Shortlex normal form of a word in the presented monoid.
    pub fn normal_form(&self, word: &Word) -> Result<Word, Error> {
        Ok(self.normal_forms[self.state_of_word(word)? as usize].clone())
    }

    /// Re-traces every relation from every state through the final table,
    /// independently of the bookkeeping used during construction.
    pub fn audit_relations(&self) -> bool {
        self.presentation.relations().iter().all(|rel| {
            (0..self.size as u32).all(|q| {
                let a = self.trace_from(q, &rel.lhs);
                let b = self.trace_from(q, &rel.rhs);
                a == b
            })
        })
    }

    /// Checks that normal forms are pairwise distinct and that each one
    /// traces from state 0 back to its own state.
    pub fn audit_normal_forms(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.normal_forms.iter().enumerate().all(|(q, w)| {
            seen.insert(w.clone()) && self.state_of_word(w) == Ok(q as u32)
        })
    }

    fn trace_from(&self, mut q: u32, word: &Word) -> u32 {
        for letter in word.letters() {
            let k = self
                .letter_index(letter)
                .expect("relation letters live in the alphabet");
            q = self.transitions[q as usize][k];
        }
        q
    }

    /// States reachable from `from` using only the given letters, in
    /// ascending state order. The start state is included.
    pub fn reachable_via(&self, from: u32, letters: &[Letter]) -> Result<Vec<u32>, Error> {
        let mut idxs = Vec::with_capacity(letters.len());
        for letter in letters {
            idxs.push(self.letter_index(letter)?);
        }
        let mut seen = vec![false; self.size];
        seen[from as usize] = true;
        let mut stack = vec![from];
        while let Some(q) = stack.pop() {
            for &k in &idxs {
                let r = self.transitions[q as usize][k];
                if !seen[r as usize] {
                    seen[r as usize] = true;
                    stack.push(r);
                }
            }
        }
        Ok((0..self.size as u32).filter(|&q| seen[q as usize]).collect())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "presentation": self.presentation.to_json(),
            "size": self.size,
            "transitions": self.transitions,
            "normal_forms": self.normal_forms.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Enumerates the monoid presented by `p`, failing with an
/// incomplete-enumeration error when a cap is hit.
///
/// The procedure alternates two phases until the table is total and stable:
/// trace every relation from every live state, merging end states whenever
/// both sides of a relation trace to completion (incomplete traces make no
/// deductions), processing coincidences to a fixpoint; then define the
/// missing transition with the smallest (state, letter) pair. States are
/// merged toward the smaller index, so the surviving representatives follow
/// discovery order and the result is deterministic.
pub fn enumerate_fp(p: &Presentation, caps: FpCaps) -> Result<FpMonoid, Error> {
    let nletters = p.alphabet().len();
    let rels: Vec<(Vec<u16>, Vec<u16>)> = p
        .relations()
        .iter()
        .map(|rel| {
            let side = |w: &Word| {
                w.letters()
                    .iter()
                    .map(|l| {
                        p.alphabet()
                            .iter()
                            .position(|a| a == l)
                            .expect("validated presentation") as u16
                    })
                    .collect::<Vec<u16>>()
            };
            (side(&rel.lhs), side(&rel.rhs))
        })
        .collect();

    let mut ws = Workspace {
        nletters,
        rels,
        table: vec![vec![None; nletters]],
        parent: vec![0],
        closed: vec![Vec::new()],
        live: 1,
        steps: 0,
        caps,
    };
    ws.closed[0] = vec![false; ws.rels.len()];

    loop {
        ws.scan_to_fixpoint()?;
        match ws.first_missing() {
            Some((q, k)) => ws.define(q, k)?,
            None => break,
        }
    }

    Ok(ws.finish(p))
}

struct Workspace {
    nletters: usize,
    rels: Vec<(Vec<u16>, Vec<u16>)>,
    table: Vec<Vec<Option<u32>>>,
    parent: Vec<u32>,
    /// `closed[q][r]`: relation r already traced to completion from q and
    /// found closed. Monotone: merges never reopen a closed trace.
    closed: Vec<Vec<bool>>,
    live: usize,
    steps: u64,
    caps: FpCaps,
}

impl Workspace {
    fn find(&mut self, mut q: u32) -> u32 {
        while self.parent[q as usize] != q {
            let grandparent = self.parent[self.parent[q as usize] as usize];
            self.parent[q as usize] = grandparent;
            q = grandparent;
        }
        q
    }

    fn incomplete(&self) -> Error {
        Error::IncompleteEnumeration {
            live_states: self.live,
            steps: self.steps,
            max_states: self.caps.max_states,
            max_steps: self.caps.max_steps,
        }
    }

    /// Traces a word from a state; `None` when a transition is missing.
    fn trace(&mut self, start: u32, word: &[u16]) -> Option<u32> {
        let mut q = self.find(start);
        for &k in word {
            q = match self.table[q as usize][k as usize] {
                Some(t) => self.find(t),
                None => return None,
            };
            self.steps += 1;
        }
        Some(q)
    }

    /// Merges two states and processes the coincidence queue to a fixpoint,
    /// folding transition rows together as classes collapse.
    fn merge(&mut self, a: u32, b: u32) {
        let mut queue = VecDeque::new();
        queue.push_back((a, b));
        while let Some((a, b)) = queue.pop_front() {
            let ra = self.find(a);
            let rb = self.find(b);
            if ra == rb {
                continue;
            }
            let keep = ra.min(rb);
            let dead = ra.max(rb);
            self.parent[dead as usize] = keep;
            self.live -= 1;
            for k in 0..self.nletters {
                if let Some(t) = self.table[dead as usize][k].take() {
                    match self.table[keep as usize][k] {
                        Some(u) => queue.push_back((t, u)),
                        None => self.table[keep as usize][k] = Some(t),
                    }
                }
            }
            // Closed traces from the dead state may cover pairs the survivor
            // has not verified; keep only the survivor's own bookkeeping.
        }
    }

    /// Scans every relation from every live state until no trace merges
    /// anything. Only relations whose both sides trace to completion make a
    /// deduction.
    fn scan_to_fixpoint(&mut self) -> Result<(), Error> {
        loop {
            let mut changed = false;
            for q in 0..self.table.len() as u32 {
                if self.find(q) != q {
                    continue;
                }
                for r in 0..self.rels.len() {
                    if self.closed[q as usize][r] {
                        continue;
                    }
                    if self.steps > self.caps.max_steps {
                        return Err(self.incomplete());
                    }
                    let (lhs, rhs) = {
                        let (l, r) = &self.rels[r];
                        (l.clone(), r.clone())
                    };
                    let a = self.trace(q, &lhs);
                    let b = self.trace(q, &rhs);
                    if let (Some(a), Some(b)) = (a, b) {
                        if a != b {
                            self.merge(a, b);
                            changed = true;
                        }
                        if self.find(q) == q {
                            self.closed[q as usize][r] = true;
                        }
                    }
                    if self.find(q) != q {
                        break;
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    /// Smallest missing (state, letter) over live states in discovery order.
    fn first_missing(&mut self) -> Option<(u32, usize)> {
        for q in 0..self.table.len() as u32 {
            if self.find(q) != q {
                continue;
            }
            for k in 0..self.nletters {
                if self.table[q as usize][k].is_none() {
                    return Some((q, k));
                }
            }
        }
        None
    }

    fn define(&mut self, q: u32, k: usize) -> Result<(), Error> {
        if self.live >= self.caps.max_states {
            return Err(self.incomplete());
        }
        let new = self.table.len() as u32;
        self.table.push(vec![None; self.nletters]);
        self.parent.push(new);
        self.closed.push(vec![false; self.rels.len()]);
        self.table[q as usize][k] = Some(new);
        self.live += 1;
        self.steps += 1;
        Ok(())
    }

    /// Renumbers the live states breadth-first from the empty-word class,
    /// yielding shortlex normal forms, and builds the dense table.
    fn finish(mut self, p: &Presentation) -> FpMonoid {
        let root = self.find(0);
        let mut new_id: Vec<Option<u32>> = vec![None; self.table.len()];
        new_id[root as usize] = Some(0);
        let mut order = vec![root];
        let mut normal_forms = vec![Word::empty()];
        let mut head = 0;
        while head < order.len() {
            let q = order[head];
            for k in 0..self.nletters {
                let t = self.table[q as usize][k].expect("total table");
                let t = self.find(t);
                if new_id[t as usize].is_none() {
                    new_id[t as usize] = Some(order.len() as u32);
                    order.push(t);
                    let mut w = normal_forms[head].clone();
                    w.push(p.alphabet()[k].clone());
                    normal_forms.push(w);
                }
            }
            head += 1;
        }
        assert_eq!(order.len(), self.live, "every live state is reachable");
        let transitions: Vec<Vec<u32>> = order
            .iter()
            .map(|&q| {
                (0..self.nletters)
                    .map(|k| {
                        let t = self.table[q as usize][k].expect("total table");
                        let t = self.find(t);
                        new_id[t as usize].expect("live states are numbered")
                    })
                    .collect()
            })
            .collect();
        FpMonoid {
            presentation: p.clone(),
            size: order.len(),
            transitions,
            normal_forms,
        }
    }
}

/// Whether a presentation, via an assignment of its letters, presents the
/// given concrete monoid.
#[derive(Clone, Debug)]
pub struct DefinesReport {
    /// Satisfaction leg: the assignment satisfies every relation.
    pub satisfied: bool,
    pub satisfaction_failure: Option<RelationFailure>,
    /// Size of the presented quotient, when the enumeration leg ran.
    pub quotient_size: Option<usize>,
    pub target_size: usize,
    /// Both legs passed and the sizes agree.
    pub holds: bool,
    /// The finite argument the verdict rests on.
    pub justification: String,
}

impl DefinesReport {
    pub fn to_json(&self) -> Value {
        json!({
            "satisfied": self.satisfied,
            "satisfaction_failure": self.satisfaction_failure.as_ref().map(|f| json!({
                "tag": f.tag,
                "lhs": f.lhs.to_string(),
                "rhs": f.rhs.to_string(),
                "lhs_value": f.lhs_value.to_string(),
                "rhs_value": f.rhs_value.to_string(),
            })),
            "quotient_size": self.quotient_size,
            "target_size": self.target_size,
            "holds": self.holds,
            "justification": self.justification,
        })
    }
}

/// Decides whether `p` presents the concrete monoid `m` under `phi`, using
/// caps sized for `m`.
///
/// The images of `phi` must generate `m`. Satisfaction of the relations
/// yields a surjection from the presented quotient onto `m`; the verdict
/// then compares cardinalities, since a surjection between finite sets of
/// equal size is a bijection.
pub fn defines(
    p: &Presentation,
    phi: &GeneratorAssignment,
    m: &MonoidTable,
) -> Result<DefinesReport, Error> {
    defines_with_caps(p, phi, m, FpCaps::for_expected(m.size()))
}

pub fn defines_with_caps(
    p: &Presentation,
    phi: &GeneratorAssignment,
    m: &MonoidTable,
    caps: FpCaps,
) -> Result<DefinesReport, Error> {
    if !m.is_generating(&phi.images())? {
        return Err(Error::NotGenerating);
    }
    let report: SatisfactionReport = phi.satisfies(p)?;
    if !report.ok {
        return Ok(DefinesReport {
            satisfied: false,
            satisfaction_failure: report.failure,
            quotient_size: None,
            target_size: m.size(),
            holds: false,
            justification: "a failed relation already rules the presentation out".into(),
        });
    }
    let fp = enumerate_fp(p, caps)?;
    let holds = fp.size() == m.size();
    Ok(DefinesReport {
        satisfied: true,
        satisfaction_failure: None,
        quotient_size: Some(fp.size()),
        target_size: m.size(),
        holds,
        justification: if holds {
            "the relations hold in the target, giving a surjection from the presented \
             quotient onto it; equal finite sizes make that surjection a bijection"
                .into()
        } else {
            "the presented quotient and the target have different sizes".into()
        },
    })
}
