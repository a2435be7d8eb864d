use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A generator symbol.
///
/// Valid labels are `g`, `x`, `y`, the bare idempotent symbol `e`, and the
/// indexed idempotent symbols `e1`, `e2`, …; this is exactly the token set of
/// the word text syntax.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter(String);

impl Letter {
    pub fn new(label: impl Into<String>) -> Result<Self, Error> {
        let label = label.into();
        let valid = match label.as_str() {
            "g" | "x" | "y" | "e" => true,
            s => {
                s.len() > 1
                    && s.starts_with('e')
                    && s[1..].chars().all(|c| c.is_ascii_digit())
                    && !s[1..].starts_with('0')
            }
        };
        if valid {
            Ok(Letter(label))
        } else {
            Err(Error::Parse(format!("invalid letter {label:?}")))
        }
    }

    pub fn g() -> Self {
        Letter("g".into())
    }

    pub fn x() -> Self {
        Letter("x".into())
    }

    pub fn y() -> Self {
        Letter("y".into())
    }

    /// The indexed idempotent symbol `e<i>`.
    pub fn e(i: u32) -> Self {
        Letter(format!("e{i}"))
    }

    /// The bare idempotent symbol `e`.
    pub fn e_plain() -> Self {
        Letter("e".into())
    }

    pub fn label(&self) -> &str {
        &self.0
    }

    /// The index of an `e<i>` letter, if this is one.
    pub fn e_index(&self) -> Option<u32> {
        self.0.strip_prefix('e').and_then(|s| s.parse().ok())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finite word over [`Letter`]s. The empty word is the monoid identity and
/// is written `1` in text form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        Word(letters.into_iter().collect())
    }

    /// The word `l^k` (k copies of a single letter).
    pub fn power(letter: &Letter, k: u32) -> Self {
        Word(std::iter::repeat(letter.clone()).take(k as usize).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut letters = self.0.clone();
        letters.extend(other.0.iter().cloned());
        Word(letters)
    }

    /// The word as run-length pairs `(letter, multiplicity)`.
    pub fn runs(&self) -> Vec<(Letter, u32)> {
        let mut out: Vec<(Letter, u32)> = Vec::new();
        for letter in &self.0 {
            match out.last_mut() {
                Some((l, k)) if l == letter => *k += 1,
                _ => out.push((letter.clone(), 1)),
            }
        }
        out
    }
}

impl fmt::Display for Word {
    /// Canonical text form: run-length compressed tokens, `1` when empty.
    /// Example: `g g e3 e4` prints as `g^2 e3 e4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let tokens: Vec<String> = self
            .runs()
            .into_iter()
            .map(|(letter, k)| {
                if k == 1 {
                    letter.to_string()
                } else {
                    format!("{letter}^{k}")
                }
            })
            .collect();
        f.write_str(&tokens.join(" "))
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses whitespace-separated tokens `<letter>[^<power>]`; the single
    /// token `1` denotes the empty word.
    fn from_str(s: &str) -> Result<Self, Error> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        if tokens == ["1"] {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for token in tokens {
            let (name, power) = match token.split_once('^') {
                Some((name, power)) => {
                    let power: u32 = power
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad power in {token:?}")))?;
                    (name, power)
                }
                None => (token, 1),
            };
            let letter = Letter::new(name)?;
            for _ in 0..power {
                letters.push(letter.clone());
            }
        }
        Ok(Word(letters))
    }
}

/// A total order on letters, induced by an alphabet listing. Words compare
/// shortlex: first by length, then letter-by-letter in alphabet order.
#[derive(Clone, Debug)]
pub struct AlphabetOrder {
    alphabet: Vec<Letter>,
}

impl AlphabetOrder {
    pub fn new(alphabet: &[Letter]) -> Self {
        AlphabetOrder {
            alphabet: alphabet.to_vec(),
        }
    }

    pub fn index(&self, letter: &Letter) -> Option<usize> {
        self.alphabet.iter().position(|l| l == letter)
    }

    /// Shortlex comparison. Letters outside the alphabet sort last.
    pub fn shortlex(&self, a: &Word, b: &Word) -> Ordering {
        a.len().cmp(&b.len()).then_with(|| {
            for (la, lb) in a.letters().iter().zip(b.letters()) {
                let ia = self.index(la).unwrap_or(usize::MAX);
                let ib = self.index(lb).unwrap_or(usize::MAX);
                match ia.cmp(&ib) {
                    Ordering::Equal => continue,
                    other => return other,
                }
            }
            Ordering::Equal
        })
    }
}
