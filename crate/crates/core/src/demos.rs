//! Two bounded-search demonstrations: a target-string variant of the
//! Post correspondence problem, and root enumeration for integer
//! polynomials.
//!
//! Both follow the same shape as the Skolem-function machinery: a
//! decision procedure for the bounded question, then enumeration of a
//! canonical order to extract the first concrete answer. The
//! correspondence oracle is complete for its bounded question; the
//! polynomial search is one-sided (`Found` is proof, `Unknown` is not).

use std::collections::{BTreeMap, VecDeque};

use num::{BigInt, One, Zero};
use thiserror::Error;

use crate::par::find_first_index;
use crate::theories::enumerate::diagonal_tuple;

/// Errors from parsing or validating demo problem files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DemoError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("an instance needs at least one tile")]
    EmptyInstance,
    #[error("tile strings must be over the alphabet {{0, 1}}")]
    BadAlphabet,
    #[error("a polynomial needs at least one monomial")]
    EmptyPolynomial,
    #[error("a polynomial needs at least one unknown besides the parameter")]
    NoUnknowns,
    #[error("monomials disagree on the number of unknowns (expected {0})")]
    InconsistentArity(usize),
}

fn line_error(line: usize, message: impl Into<String>) -> DemoError {
    DemoError::Line {
        line,
        message: message.into(),
    }
}

/// A correspondence instance: tiles of paired binary strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcpInstance {
    tiles: Vec<(String, String)>,
}

impl PcpInstance {
    pub fn new(tiles: Vec<(String, String)>) -> Result<Self, DemoError> {
        if tiles.is_empty() {
            return Err(DemoError::EmptyInstance);
        }
        for (alpha, beta) in &tiles {
            if alpha.chars().chain(beta.chars()).any(|c| c != '0' && c != '1') {
                return Err(DemoError::BadAlphabet);
            }
        }
        Ok(PcpInstance { tiles })
    }

    /// Convenience constructor from string literals.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self, DemoError> {
        Self::new(
            pairs
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        )
    }

    pub fn tiles(&self) -> &[(String, String)] {
        &self.tiles
    }
}

/// Parse a correspondence instance: one `alpha,beta` tile per line,
/// blank lines ignored. Either side may be empty.
pub fn parse_pcp(src: &str) -> Result<PcpInstance, DemoError> {
    let mut tiles = vec![];
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let n = i + 1;
        let mut parts = line.split(',');
        let (Some(alpha), Some(beta), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(line_error(n, format!("expected `alpha,beta`, got `{line}`")));
        };
        for side in [alpha, beta] {
            if side.chars().any(|c| c != '0' && c != '1') {
                return Err(line_error(n, format!("`{side}` is not a binary string")));
            }
        }
        tiles.push((alpha.to_string(), beta.to_string()));
    }
    PcpInstance::new(tiles)
}

/// Tiles that still consume characters, tagged with 1-based indices.
fn consuming_tiles(instance: &PcpInstance) -> Vec<(usize, &str, &str)> {
    instance
        .tiles
        .iter()
        .enumerate()
        .filter(|(_, (a, b))| !a.is_empty() || !b.is_empty())
        .map(|(i, (a, b))| (i + 1, a.as_str(), b.as_str()))
        .collect()
}

fn first_empty_tile(instance: &PcpInstance) -> Option<usize> {
    instance
        .tiles
        .iter()
        .position(|(a, b)| a.is_empty() && b.is_empty())
        .map(|i| i + 1)
}

/// Breadth-first search for the shortest, lexicographically least
/// nonempty tile sequence whose two concatenations both equal `u`.
///
/// States are pairs of matched prefix lengths. A fully empty tile never
/// appears in a minimal witness for nonempty `u`, so those are
/// discarded up front; every remaining tile lengthens at least one
/// side, which caps minimal witnesses at `2 * u.len()` tiles. When
/// `max_tiles` is given, exploration stops at that depth.
fn bounded_witness(
    instance: &PcpInstance,
    u: &str,
    max_tiles: Option<usize>,
) -> Option<Vec<usize>> {
    if u.is_empty() {
        // Only a fully empty tile can produce the empty string with at
        // least one tile application.
        return first_empty_tile(instance).map(|i| vec![i]);
    }
    let tiles = consuming_tiles(instance);
    let target = u.as_bytes();
    let goal = (target.len(), target.len());
    let extends = |from: usize, side: &str| -> Option<usize> {
        let to = from + side.len();
        (to <= target.len() && &target[from..to] == side.as_bytes()).then_some(to)
    };

    // parents[state] = (previous state, 1-based tile index); the start
    // state maps to itself so membership doubles as the visited set.
    let start = (0usize, 0usize);
    let mut parents: BTreeMap<(usize, usize), ((usize, usize), usize)> = BTreeMap::new();
    parents.insert(start, (start, 0));
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((state, depth)) = queue.pop_front() {
        if max_tiles.is_some_and(|bound| depth >= bound) {
            continue;
        }
        for &(idx, alpha, beta) in &tiles {
            let (Some(la), Some(lb)) = (extends(state.0, alpha), extends(state.1, beta)) else {
                continue;
            };
            let next = (la, lb);
            if parents.contains_key(&next) {
                continue;
            }
            parents.insert(next, (state, idx));
            if next == goal {
                let mut seq = vec![];
                let mut at = next;
                while at != start {
                    let (prev, tile) = parents[&at];
                    seq.push(tile);
                    at = prev;
                }
                seq.reverse();
                return Some(seq);
            }
            queue.push_back((next, depth + 1));
        }
    }
    None
}

/// The least witness for `u`, if the tiles can spell it at all:
/// shortest first, lexicographically least among equally short.
pub fn pcp_witness(instance: &PcpInstance, u: &str) -> Option<Vec<usize>> {
    bounded_witness(instance, u, None)
}

/// Can a nonempty tile sequence spell `u` on both sides?
pub fn pcp_oracle(instance: &PcpInstance, u: &str) -> bool {
    pcp_witness(instance, u).is_some()
}

/// The oracle restricted to witnesses of at most `max_tiles` tiles.
/// Raising the bound past twice the target length never changes the
/// answer.
pub fn pcp_oracle_with_bound(instance: &PcpInstance, u: &str, max_tiles: usize) -> bool {
    bounded_witness(instance, u, Some(max_tiles)).is_some()
}

/// The binary string of length `len` whose bits spell `index`,
/// most-significant first, so ascending indices are ascending strings.
fn candidate_string(len: usize, index: usize) -> String {
    (0..len)
        .rev()
        .map(|b| if index >> b & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn pcp_search_impl(
    instance: &PcpInstance,
    max_len: usize,
    parallel: bool,
) -> Option<(String, Vec<usize>)> {
    for len in 0..=max_len {
        let count = 1usize
            .checked_shl(len as u32)
            .expect("candidate space must fit in usize");
        let hit = find_first_index(count, parallel, |index| {
            pcp_oracle(instance, &candidate_string(len, index))
        });
        if let Some(index) = hit {
            let u = candidate_string(len, index);
            let witness = pcp_witness(instance, &u).expect("oracle just affirmed");
            return Some((u, witness));
        }
    }
    None
}

/// Sweep all binary strings up to `max_len`, shortest first and in
/// ascending order within a length, and return the first target the
/// tiles can spell, together with its least witness.
pub fn pcp_search(instance: &PcpInstance, max_len: usize) -> Option<(String, Vec<usize>)> {
    pcp_search_impl(instance, max_len, true)
}

/// Sequential variant of [`pcp_search`], for comparison benchmarks.
pub fn pcp_search_seq(instance: &PcpInstance, max_len: usize) -> Option<(String, Vec<usize>)> {
    pcp_search_impl(instance, max_len, false)
}

/// An integer polynomial in one parameter `x` and `k ≥ 1` unknowns,
/// stored as monomials `(coefficient, [e_x, e_1, …, e_k])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialSpec {
    monomials: Vec<(BigInt, Vec<u32>)>,
}

impl PolynomialSpec {
    pub fn new(monomials: Vec<(BigInt, Vec<u32>)>) -> Result<Self, DemoError> {
        let Some(first) = monomials.first() else {
            return Err(DemoError::EmptyPolynomial);
        };
        let width = first.1.len();
        if width < 2 {
            return Err(DemoError::NoUnknowns);
        }
        if let Some(bad) = monomials.iter().find(|(_, exps)| exps.len() != width) {
            let _ = bad;
            return Err(DemoError::InconsistentArity(width - 1));
        }
        Ok(PolynomialSpec { monomials })
    }

    /// Number of unknowns (not counting the parameter).
    pub fn unknowns(&self) -> usize {
        self.monomials[0].1.len() - 1
    }

    pub fn monomials(&self) -> &[(BigInt, Vec<u32>)] {
        &self.monomials
    }

    /// Exact evaluation at the parameter and one unknown tuple.
    pub fn eval(&self, x: u64, ys: &[u64]) -> BigInt {
        assert_eq!(ys.len(), self.unknowns(), "wrong number of unknowns");
        let mut total = BigInt::zero();
        for (coeff, exps) in &self.monomials {
            let mut term = coeff.clone();
            term *= int_pow(&BigInt::from(x), exps[0]);
            for (y, e) in ys.iter().zip(&exps[1..]) {
                term *= int_pow(&BigInt::from(*y), *e);
            }
            total += term;
        }
        total
    }
}

fn int_pow(base: &BigInt, exponent: u32) -> BigInt {
    let mut out = BigInt::one();
    for _ in 0..exponent {
        out *= base;
    }
    out
}

/// Parse a polynomial: one monomial per line as whitespace-separated
/// integers `coefficient e_x e_1 … e_k`, blank lines ignored.
pub fn parse_poly(src: &str) -> Result<PolynomialSpec, DemoError> {
    let mut monomials: Vec<(BigInt, Vec<u32>)> = vec![];
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let n = i + 1;
        let mut fields = line.split_whitespace();
        let coeff_text = fields.next().expect("trimmed nonempty line has a field");
        let coeff: BigInt = coeff_text
            .parse()
            .map_err(|_| line_error(n, format!("`{coeff_text}` is not an integer")))?;
        let exps = fields
            .map(|f| {
                f.parse::<u32>()
                    .map_err(|_| line_error(n, format!("`{f}` is not an exponent")))
            })
            .collect::<Result<Vec<u32>, DemoError>>()?;
        if exps.len() < 2 {
            return Err(line_error(
                n,
                "a monomial needs the parameter exponent and at least one unknown",
            ));
        }
        if let Some((_, first)) = monomials.first() {
            if exps.len() != first.len() {
                return Err(line_error(
                    n,
                    format!(
                        "expected {} exponent(s), got {}",
                        first.len(),
                        exps.len()
                    ),
                ));
            }
        }
        monomials.push((coeff, exps));
    }
    PolynomialSpec::new(monomials)
}

/// Result of a fuel-bounded root search: a verified root, or no verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiophOutcome {
    Found(Vec<u64>),
    Unknown,
}

/// Enumerate unknown tuples in the canonical diagonal order and return
/// the first root of `p(x, ·)`, spending at most `fuel` tuples. The
/// search is one-sided: `Unknown` never means "no root".
pub fn dioph_search(p: &PolynomialSpec, x: u64, fuel: usize) -> DiophOutcome {
    let k = p.unknowns();
    for t in 0..fuel {
        let ys: Vec<u64> = diagonal_tuple(k, t).iter().map(|&i| i as u64).collect();
        if p.eval(x, &ys).is_zero() {
            debug_assert!(p.eval(x, &ys).is_zero());
            return DiophOutcome::Found(ys);
        }
    }
    DiophOutcome::Unknown
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn classic() -> PcpInstance {
        PcpInstance::from_pairs(&[("1", "101"), ("10", "00"), ("011", "11")]).unwrap()
    }

    /// All nonempty tile sequences up to `max_tiles`, checked directly.
    fn naive_oracle(instance: &PcpInstance, u: &str, max_tiles: usize) -> bool {
        fn go(instance: &PcpInstance, u: &str, alpha: &str, beta: &str, left: usize) -> bool {
            if alpha == u && beta == u {
                return true;
            }
            if left == 0 || !u.starts_with(alpha) || !u.starts_with(beta) {
                return false;
            }
            instance.tiles().iter().any(|(a, b)| {
                go(
                    instance,
                    u,
                    &format!("{alpha}{a}"),
                    &format!("{beta}{b}"),
                    left - 1,
                )
            })
        }
        instance
            .tiles()
            .iter()
            .any(|(a, b)| go(instance, u, a, b, max_tiles.saturating_sub(1)))
    }

    #[test]
    fn classic_target_has_witness() {
        let inst = classic();
        let witness = pcp_witness(&inst, "101110011").unwrap();
        assert_eq!(witness, vec![1, 3, 2, 3]);
        assert!(pcp_oracle(&inst, "101110011"));

        // Replay the witness and confirm both concatenations.
        let tiles = inst.tiles();
        let alpha: String = witness.iter().map(|&i| tiles[i - 1].0.as_str()).collect();
        let beta: String = witness.iter().map(|&i| tiles[i - 1].1.as_str()).collect();
        assert_eq!(alpha, "101110011");
        assert_eq!(beta, "101110011");
    }

    #[test]
    fn mismatched_tile_never_spells_its_own_side() {
        let inst = PcpInstance::from_pairs(&[("0", "1")]).unwrap();
        assert!(!pcp_oracle(&inst, "0"));
        assert!(!pcp_oracle(&inst, "1"));
        assert_eq!(pcp_search(&inst, 4), None);
    }

    #[test]
    fn empty_target_needs_an_empty_tile() {
        let with = PcpInstance::from_pairs(&[("0", "0"), ("", "")]).unwrap();
        assert!(pcp_oracle(&with, ""));
        assert_eq!(pcp_witness(&with, ""), Some(vec![2]));
        let without = PcpInstance::from_pairs(&[("0", "0")]).unwrap();
        assert!(!pcp_oracle(&without, ""));
    }

    #[test]
    fn search_finds_shortest_then_least_target() {
        assert_eq!(
            pcp_search(&classic(), 10),
            Some(("101110011".to_string(), vec![1, 3, 2, 3]))
        );
        let single = PcpInstance::from_pairs(&[("01", "01")]).unwrap();
        assert_eq!(pcp_search(&single, 4), Some(("01".to_string(), vec![1])));
    }

    #[test]
    fn search_agrees_with_sequential_search() {
        assert_eq!(pcp_search(&classic(), 10), pcp_search_seq(&classic(), 10));
        let single = PcpInstance::from_pairs(&[("01", "01")]).unwrap();
        assert_eq!(pcp_search(&single, 4), pcp_search_seq(&single, 4));
    }

    #[test]
    fn witnesses_prefer_shorter_then_lexicographically_least() {
        // Both tiles spell "0"; the least single-tile witness wins.
        let inst = PcpInstance::from_pairs(&[("0", "0"), ("0", "0")]).unwrap();
        assert_eq!(pcp_witness(&inst, "0"), Some(vec![1]));
        assert_eq!(pcp_witness(&inst, "00"), Some(vec![1, 1]));
    }

    #[test]
    fn bound_at_twice_target_length_suffices() {
        let inst = classic();
        let u = "101110011";
        assert!(pcp_oracle_with_bound(&inst, u, 2 * u.len()));
        assert_eq!(
            pcp_oracle_with_bound(&inst, u, 2 * u.len()),
            pcp_oracle_with_bound(&inst, u, 3 * u.len())
        );
        // A bound below the witness length hides it.
        assert!(!pcp_oracle_with_bound(&inst, u, 3));
    }

    #[test]
    fn pcp_parsing_round_trips_and_reports_lines() {
        let inst = parse_pcp("1,101\n10,00\n\n011,11\n").unwrap();
        assert_eq!(inst, classic());
        let empties = parse_pcp(",\n0,").unwrap();
        let expected = [
            (String::new(), String::new()),
            ("0".to_string(), String::new()),
        ];
        assert_eq!(empties.tiles(), expected);

        assert!(matches!(
            parse_pcp("1,0,1"),
            Err(DemoError::Line { line: 1, .. })
        ));
        assert!(matches!(
            parse_pcp("1,1\n2,0"),
            Err(DemoError::Line { line: 2, .. })
        ));
        assert!(matches!(
            parse_pcp("10 00"),
            Err(DemoError::Line { line: 1, .. })
        ));
        assert_eq!(parse_pcp("\n\n"), Err(DemoError::EmptyInstance));
    }

    #[test]
    fn instance_validation() {
        assert_eq!(PcpInstance::new(vec![]), Err(DemoError::EmptyInstance));
        assert_eq!(
            PcpInstance::from_pairs(&[("01", "2")]),
            Err(DemoError::BadAlphabet)
        );
    }

    #[test]
    fn square_gap_polynomial() {
        // x − y²: a root exists exactly when x is a perfect square.
        let p = parse_poly("1 1 0\n-1 0 2").unwrap();
        assert_eq!(p.unknowns(), 1);
        assert_eq!(dioph_search(&p, 9, 100), DiophOutcome::Found(vec![3]));
        assert_eq!(dioph_search(&p, 7, 1000), DiophOutcome::Unknown);
        assert_eq!(dioph_search(&p, 0, 10), DiophOutcome::Found(vec![0]));
    }

    #[test]
    fn identically_zero_polynomial_roots_immediately() {
        let p = parse_poly("1 0 1\n-1 0 1").unwrap();
        assert_eq!(dioph_search(&p, 42, 1), DiophOutcome::Found(vec![0]));
    }

    #[test]
    fn two_unknown_polynomial() {
        // x − y₁ − y₂ at x = 3: the diagonal order reaches (0, 3) first.
        let p = parse_poly("1 1 0 0\n-1 0 1 0\n-1 0 0 1").unwrap();
        assert_eq!(p.unknowns(), 2);
        let DiophOutcome::Found(ys) = dioph_search(&p, 3, 100) else {
            panic!("expected a root");
        };
        assert_eq!(ys.iter().sum::<u64>(), 3);
        assert!(p.eval(3, &ys).is_zero());
        assert_eq!(ys, vec![0, 3]);
    }

    #[test]
    fn poly_parsing_reports_lines() {
        assert!(matches!(
            parse_poly("x 1 1"),
            Err(DemoError::Line { line: 1, .. })
        ));
        assert!(matches!(
            parse_poly("1 1 0\n1 0"),
            Err(DemoError::Line { line: 2, .. })
        ));
        assert!(matches!(
            parse_poly("1 1"),
            Err(DemoError::Line { line: 1, .. })
        ));
        assert_eq!(parse_poly(""), Err(DemoError::EmptyPolynomial));
        assert_eq!(
            PolynomialSpec::new(vec![(BigInt::from(1), vec![1])]),
            Err(DemoError::NoUnknowns)
        );
        assert_eq!(
            PolynomialSpec::new(vec![
                (BigInt::from(1), vec![1, 0]),
                (BigInt::from(1), vec![1, 0, 0]),
            ]),
            Err(DemoError::InconsistentArity(1))
        );
    }

    fn arb_binary(max_len: usize) -> impl Strategy<Value = String> {
        prop::collection::vec(prop::bool::ANY, 0..=max_len)
            .prop_map(|bits| bits.iter().map(|&b| if b { '1' } else { '0' }).collect())
    }

    fn arb_instance() -> impl Strategy<Value = PcpInstance> {
        prop::collection::vec((arb_binary(2), arb_binary(2)), 1..=3)
            .prop_map(|tiles| PcpInstance::new(tiles).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn oracle_matches_naive_enumeration(
            inst in arb_instance(),
            u in arb_binary(3),
        ) {
            let bound = (2 * u.len()).max(1);
            prop_assert_eq!(pcp_oracle(&inst, &u), naive_oracle(&inst, &u, bound));
        }

        #[test]
        fn larger_bound_never_changes_the_answer(
            inst in arb_instance(),
            u in arb_binary(3),
        ) {
            prop_assert_eq!(
                pcp_oracle_with_bound(&inst, &u, 2 * u.len()),
                pcp_oracle_with_bound(&inst, &u, 3 * u.len())
            );
            prop_assert_eq!(
                pcp_oracle_with_bound(&inst, &u, 2 * u.len()),
                pcp_oracle(&inst, &u)
            );
        }

        #[test]
        fn witnesses_replay_to_the_target(
            inst in arb_instance(),
            u in arb_binary(3),
        ) {
            if let Some(witness) = pcp_witness(&inst, &u) {
                prop_assert!(!witness.is_empty());
                let alpha: String = witness
                    .iter()
                    .map(|&i| inst.tiles()[i - 1].0.as_str())
                    .collect();
                let beta: String = witness
                    .iter()
                    .map(|&i| inst.tiles()[i - 1].1.as_str())
                    .collect();
                prop_assert_eq!(&alpha, &u);
                prop_assert_eq!(&beta, &u);
            }
        }

        #[test]
        fn found_tuples_are_genuine_roots(
            coeffs in prop::collection::vec((-3i64..=3, 0u32..=2, 0u32..=2), 1..=3),
            x in 0u64..10,
        ) {
            let monomials: Vec<(BigInt, Vec<u32>)> = coeffs
                .iter()
                .map(|&(c, ex, ey)| (BigInt::from(c), vec![ex, ey]))
                .collect();
            let p = PolynomialSpec::new(monomials).unwrap();
            if let DiophOutcome::Found(ys) = dioph_search(&p, x, 50) {
                prop_assert!(p.eval(x, &ys).is_zero());
            }
        }
    }
}
