use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// An injective partial self-map of the ground set `{1, …, n}`.
///
/// The graph is stored as a pair list sorted by first coordinate, so equality
/// and hashing are structural. Values are immutable once constructed.
///
/// Composition is argument-on-the-left: `compose(a, b)` applies `a` first,
/// i.e. `i · (a b) = (i · a) · b`. Every higher-level module relies on this
/// convention.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PartialPerm {
    n: u32,
    pairs: Vec<(u32, u32)>,
}

impl PartialPerm {
    /// Builds a partial permutation on `{1, …, n}` from its graph.
    ///
    /// Rejects `n = 0`, points outside the ground set, repeated domain
    /// points, and repeated image points.
    pub fn new(n: u32, pairs: impl IntoIterator<Item = (u32, u32)>) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::ZeroSize);
        }
        let mut pairs: Vec<(u32, u32)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        for &(i, j) in &pairs {
            for point in [i, j] {
                if point < 1 || point > n {
                    return Err(Error::OutOfRange { point, n });
                }
            }
        }
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::NotInjective {
                    detail: format!("domain point {} is mapped twice", w[0].0),
                });
            }
        }
        let mut images: Vec<u32> = pairs.iter().map(|&(_, j)| j).collect();
        images.sort_unstable();
        for w in images.windows(2) {
            if w[0] == w[1] {
                return Err(Error::NotInjective {
                    detail: format!("image point {} is hit twice", w[0]),
                });
            }
        }
        Ok(PartialPerm { n, pairs })
    }

    /// The map with empty domain.
    pub fn empty(n: u32) -> Result<Self, Error> {
        Self::new(n, [])
    }

    /// The identity map on the full ground set.
    pub fn identity(n: u32) -> Result<Self, Error> {
        Self::new(n, (1..=n).map(|i| (i, i)))
    }

    /// The identity restricted to `domain`, i.e. the partial identity fixing
    /// exactly the given points.
    pub fn partial_identity(n: u32, domain: &[u32]) -> Result<Self, Error> {
        Self::new(n, domain.iter().map(|&i| (i, i)))
    }

    /// The full cycle `1 ↦ 2 ↦ … ↦ n ↦ 1`.
    pub fn cycle(n: u32) -> Result<Self, Error> {
        Self::new(n, (1..=n).map(|i| (i, if i == n { 1 } else { i + 1 })))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of points in the domain.
    pub fn rank_size(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty_map(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.len() == self.n as usize && self.pairs.iter().all(|&(i, j)| i == j)
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    /// Domain points in increasing order.
    pub fn domain(&self) -> Vec<u32> {
        self.pairs.iter().map(|&(i, _)| i).collect()
    }

    /// Image points in increasing order.
    pub fn image(&self) -> Vec<u32> {
        let mut im: Vec<u32> = self.pairs.iter().map(|&(_, j)| j).collect();
        im.sort_unstable();
        im
    }

    /// The image of a single point, if defined.
    pub fn apply(&self, i: u32) -> Option<u32> {
        self.pairs
            .binary_search_by_key(&i, |&(d, _)| d)
            .ok()
            .map(|k| self.pairs[k].1)
    }

    /// Left-to-right composition: `self` first, then `other`.
    pub fn compose(&self, other: &PartialPerm) -> Result<Self, Error> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let pairs = self
            .pairs
            .iter()
            .filter_map(|&(i, j)| other.apply(j).map(|k| (i, k)));
        Self::new(self.n, pairs)
    }

    /// The inverse map (graph with coordinates swapped).
    pub fn inverse(&self) -> Self {
        let pairs: Vec<(u32, u32)> = self.pairs.iter().map(|&(i, j)| (j, i)).collect();
        PartialPerm::new(self.n, pairs).expect("swapping an injective graph stays injective")
    }

    /// Restriction of the map to `points ∩ domain`.
    pub fn restrict(&self, points: &[u32]) -> Result<Self, Error> {
        for &point in points {
            if point < 1 || point > self.n {
                return Err(Error::OutOfRange { point, n: self.n });
            }
        }
        let pairs = self
            .pairs
            .iter()
            .copied()
            .filter(|&(i, _)| points.contains(&i));
        Self::new(self.n, pairs)
    }

    /// `k`-fold composition of the map with itself; `pow(0)` is the identity.
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = PartialPerm::identity(self.n).expect("n >= 1 by construction");
        for _ in 0..k {
            acc = acc.compose(self).expect("equal ground sets");
        }
        acc
    }

    /// True when the map preserves the linear order on the ground set:
    /// `i < j` implies `i·a < j·a` for all domain points.
    pub fn is_order_preserving(&self) -> bool {
        self.pairs.windows(2).all(|w| w[0].1 < w[1].1)
    }

    /// True when the map preserves the cyclic orientation `1 < 2 < … < n < 1`:
    /// reading the images along the sorted domain gives a cyclic sequence with
    /// at most one descent.
    pub fn is_orientation_preserving(&self) -> bool {
        let m = self.pairs.len();
        if m <= 2 {
            return true;
        }
        let mut descents = 0;
        for k in 0..m {
            let a = self.pairs[k].1;
            let b = self.pairs[(k + 1) % m].1;
            if a > b {
                descents += 1;
            }
        }
        descents <= 1
    }

    /// The graph as text, without the ground-set prefix: `[1>2 2>3]`, `[]`.
    pub fn map_text(&self) -> String {
        let body: Vec<String> = self
            .pairs
            .iter()
            .map(|&(i, j)| format!("{}>{}", i, j))
            .collect();
        format!("[{}]", body.join(" "))
    }

    /// Parses the bracketed graph form with the ground-set size supplied by
    /// the caller: `[3>1 4>2]`, `[]`.
    pub fn parse_map(text: &str, n: u32) -> Result<Self, Error> {
        let t = text.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected [i>j …], got {t:?}")))?;
        let mut pairs = Vec::new();
        for token in inner.split_whitespace() {
            let (i, j) = token
                .split_once('>')
                .ok_or_else(|| Error::Parse(format!("expected i>j, got {token:?}")))?;
            let i: u32 = i
                .parse()
                .map_err(|_| Error::Parse(format!("bad point {i:?}")))?;
            let j: u32 = j
                .parse()
                .map_err(|_| Error::Parse(format!("bad point {j:?}")))?;
            pairs.push((i, j));
        }
        Self::new(n, pairs)
    }
}

impl fmt::Display for PartialPerm {
    /// Canonical text form: `n=4 [1>2 2>3 3>4]`, with pairs sorted by domain.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} {}", self.n, self.map_text())
    }
}

impl FromStr for PartialPerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        let rest = t
            .strip_prefix("n=")
            .ok_or_else(|| Error::Parse(format!("expected n=<size> [..], got {t:?}")))?;
        let (num, body) = rest
            .split_once(' ')
            .ok_or_else(|| Error::Parse("missing graph after ground-set size".into()))?;
        let n: u32 = num
            .parse()
            .map_err(|_| Error::Parse(format!("bad ground-set size {num:?}")))?;
        Self::parse_map(body, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pp(n: u32, pairs: &[(u32, u32)]) -> PartialPerm {
        PartialPerm::new(n, pairs.iter().copied()).unwrap()
    }

    /// All partial permutations of `{1..n}`, by brute force.
    fn all_partial_perms(n: u32) -> Vec<PartialPerm> {
        let mut out = vec![PartialPerm::empty(n).unwrap()];
        // Grow graphs point by point over domain 1..=n.
        for i in 1..=n {
            let mut next = Vec::new();
            for p in &out {
                next.push(p.clone());
                let used = p.image();
                for j in 1..=n {
                    if !used.contains(&j) {
                        let mut pairs = p.pairs().to_vec();
                        pairs.push((i, j));
                        next.push(PartialPerm::new(n, pairs).unwrap());
                    }
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn construction_rejects_bad_graphs() {
        assert!(matches!(PartialPerm::new(0, []), Err(Error::ZeroSize)));
        assert!(matches!(
            PartialPerm::new(3, [(1, 4)]),
            Err(Error::OutOfRange { point: 4, n: 3 })
        ));
        assert!(matches!(
            PartialPerm::new(3, [(0, 1)]),
            Err(Error::OutOfRange { point: 0, n: 3 })
        ));
        assert!(matches!(
            PartialPerm::new(3, [(1, 2), (1, 3)]),
            Err(Error::NotInjective { .. })
        ));
        assert!(matches!(
            PartialPerm::new(3, [(1, 2), (3, 2)]),
            Err(Error::NotInjective { .. })
        ));
    }

    #[test]
    fn compose_applies_left_argument_first() {
        // Cycle then partial identity: the image point 1 is killed.
        let g = PartialPerm::cycle(4).unwrap();
        let e1 = PartialPerm::partial_identity(4, &[2, 3, 4]).unwrap();
        assert_eq!(g.compose(&e1).unwrap(), pp(4, &[(1, 2), (2, 3), (3, 4)]));
        // Composing in the other order kills the domain point 1 instead.
        assert_eq!(e1.compose(&g).unwrap(), pp(4, &[(2, 3), (3, 4), (4, 1)]));
    }

    #[test]
    fn compose_with_empty_absorbs() {
        let g = PartialPerm::cycle(3).unwrap();
        let zero = PartialPerm::empty(3).unwrap();
        assert_eq!(g.compose(&zero).unwrap(), zero);
        assert_eq!(zero.compose(&g).unwrap(), zero);
    }

    #[test]
    fn compose_rejects_mixed_ground_sets() {
        let a = PartialPerm::cycle(3).unwrap();
        let b = PartialPerm::cycle(4).unwrap();
        assert!(matches!(
            a.compose(&b),
            Err(Error::SizeMismatch { left: 3, right: 4 })
        ));
    }

    #[test]
    fn cycle_powers_follow_the_shift_formula() {
        // i · g^k = i + k when i <= n − k, and i + k − n otherwise.
        for n in 1..=8u32 {
            let g = PartialPerm::cycle(n).unwrap();
            for k in 0..=n {
                let gk = g.pow(k);
                for i in 1..=n {
                    let expected = if i <= n - k { i + k } else { i + k - n };
                    assert_eq!(gk.apply(i), Some(expected), "n={n} k={k} i={i}");
                }
            }
            assert!(g.pow(n).is_identity());
        }
    }

    #[test]
    fn inverse_swaps_the_graph() {
        let x = pp(4, &[(1, 2), (2, 3), (3, 4)]);
        assert_eq!(x.inverse(), pp(4, &[(2, 1), (3, 2), (4, 3)]));
        let zero = PartialPerm::empty(3).unwrap();
        assert_eq!(zero.inverse(), zero);
        let e = PartialPerm::partial_identity(5, &[2, 4]).unwrap();
        assert_eq!(e.inverse(), e);
    }

    #[test]
    fn restrict_keeps_only_the_given_points() {
        let g = PartialPerm::cycle(4).unwrap();
        assert_eq!(g.restrict(&[3, 4]).unwrap(), pp(4, &[(3, 4), (4, 1)]));
        assert_eq!(
            g.restrict(&[1, 2, 3, 4]).unwrap(),
            PartialPerm::cycle(4).unwrap()
        );
        assert!(matches!(
            g.restrict(&[5]),
            Err(Error::OutOfRange { point: 5, n: 4 })
        ));
    }

    #[test]
    fn partial_identities_multiply_by_intersecting_domains() {
        let e1 = PartialPerm::partial_identity(3, &[2, 3]).unwrap();
        let e2 = PartialPerm::partial_identity(3, &[1, 3]).unwrap();
        let e3 = PartialPerm::partial_identity(3, &[1, 2]).unwrap();
        let prod = e1.compose(&e2).unwrap().compose(&e3).unwrap();
        assert!(prod.is_empty_map());
    }

    #[test]
    fn order_preserving_examples() {
        assert!(pp(4, &[(1, 2), (2, 3), (3, 4)]).is_order_preserving());
        assert!(!PartialPerm::cycle(3).unwrap().is_order_preserving());
        assert!(PartialPerm::empty(3).unwrap().is_order_preserving());
        assert!(PartialPerm::identity(5).unwrap().is_order_preserving());
    }

    /// Independent descent-count oracle for the orientation predicate.
    fn orientation_oracle(p: &PartialPerm) -> bool {
        let images: Vec<u32> = p.pairs().iter().map(|&(_, j)| j).collect();
        let m = images.len();
        if m == 0 {
            return true;
        }
        let descents = (0..m)
            .filter(|&k| images[k] > images[(k + 1) % m])
            .count();
        descents <= 1
    }

    #[test]
    fn orientation_examples() {
        assert!(PartialPerm::cycle(4).unwrap().is_orientation_preserving());
        assert!(PartialPerm::empty(3).unwrap().is_orientation_preserving());
        assert!(!pp(3, &[(1, 2), (2, 1), (3, 3)]).is_orientation_preserving());
    }

    #[test]
    fn orientation_matches_descent_oracle_exhaustively() {
        for n in 1..=4u32 {
            for p in all_partial_perms(n) {
                assert_eq!(
                    p.is_orientation_preserving(),
                    orientation_oracle(&p),
                    "{p}"
                );
            }
        }
    }

    #[test]
    fn compose_is_associative_exhaustively_for_small_n() {
        for n in 1..=3u32 {
            let all = all_partial_perms(n);
            for a in &all {
                for b in &all {
                    let ab = a.compose(b).unwrap();
                    for c in &all {
                        let bc = b.compose(c).unwrap();
                        assert_eq!(ab.compose(c).unwrap(), a.compose(&bc).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_axioms_hold_exhaustively_for_small_n() {
        // a a⁻¹ a = a and a⁻¹ a a⁻¹ = a⁻¹.
        for n in 1..=3u32 {
            for a in all_partial_perms(n) {
                let ai = a.inverse();
                let a_ai_a = a.compose(&ai).unwrap().compose(&a).unwrap();
                assert_eq!(a_ai_a, a);
                let ai_a_ai = ai.compose(&a).unwrap().compose(&ai).unwrap();
                assert_eq!(ai_a_ai, ai);
            }
        }
    }

    #[test]
    fn restrictions_of_cycle_powers_stay_orientation_preserving() {
        for n in 1..=6u32 {
            let g = PartialPerm::cycle(n).unwrap();
            for k in 0..n {
                let gk = g.pow(k);
                for mask in 0..(1u32 << n) {
                    let points: Vec<u32> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                    assert!(gk.restrict(&points).unwrap().is_orientation_preserving());
                }
            }
        }
    }

    #[test]
    fn text_form_round_trips() {
        let x = pp(4, &[(1, 2), (2, 3), (3, 4)]);
        assert_eq!(x.to_string(), "n=4 [1>2 2>3 3>4]");
        assert_eq!("n=4 [1>2 2>3 3>4]".parse::<PartialPerm>().unwrap(), x);
        let zero = PartialPerm::empty(2).unwrap();
        assert_eq!(zero.to_string(), "n=2 []");
        assert_eq!("n=2 []".parse::<PartialPerm>().unwrap(), zero);
        assert!("n=3 [1>".parse::<PartialPerm>().is_err());
        assert!("[1>2]".parse::<PartialPerm>().is_err());
        assert!(PartialPerm::parse_map("[1>2 1>3]", 3).is_err());
    }

    /// Strategy for an arbitrary partial permutation on a fixed ground set.
    fn arb_partial_perm_on(n: u32) -> impl Strategy<Value = PartialPerm> {
        let points: Vec<u32> = (1..=n).collect();
        proptest::sample::subsequence(points.clone(), 0..=n as usize)
            .prop_flat_map(move |dom| {
                let k = dom.len();
                (
                    Just(dom),
                    proptest::sample::subsequence(points.clone(), k).prop_shuffle(),
                )
            })
            .prop_map(move |(dom, img)| PartialPerm::new(n, dom.into_iter().zip(img)).unwrap())
    }

    /// Strategy for an arbitrary partial permutation with 1 ≤ n ≤ 8.
    fn arb_partial_perm() -> impl Strategy<Value = PartialPerm> {
        (1u32..=8).prop_flat_map(arb_partial_perm_on)
    }

    /// Strategy for a pair of partial permutations on a shared ground set.
    fn arb_partial_perm_pair() -> impl Strategy<Value = (PartialPerm, PartialPerm)> {
        (1u32..=8).prop_flat_map(|n| (arb_partial_perm_on(n), arb_partial_perm_on(n)))
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(p in arb_partial_perm()) {
            let text = p.to_string();
            prop_assert_eq!(text.parse::<PartialPerm>().unwrap(), p);
        }

        #[test]
        fn inverse_is_an_involution(p in arb_partial_perm()) {
            prop_assert_eq!(p.inverse().inverse(), p.clone());
            // The forward-then-back composite fixes the domain pointwise.
            let idem = p.compose(&p.inverse()).unwrap();
            prop_assert_eq!(idem, PartialPerm::partial_identity(p.n(), &p.domain()).unwrap());
        }

        #[test]
        fn composition_domain_is_contained_in_left_domain(
            (p, q) in arb_partial_perm_pair(),
        ) {
            let pq = p.compose(&q).unwrap();
            let dom = p.domain();
            prop_assert!(pq.domain().iter().all(|i| dom.contains(i)));
        }
    }
}
