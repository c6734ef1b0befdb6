//! Fixed recursive enumerations of the supported domains, and the
//! diagonal enumeration of tuples used for deterministic sampling.
//!
//! Every enumeration here is a pure function of its index, so any
//! consumer sees the same order on every run.

use num::{BigRational, BigUint};

use crate::logic::DomainElement;

/// The k-th natural number — the identity enumeration of ℕ.
pub fn enum_nat(k: usize) -> DomainElement {
    DomainElement::Nat(BigUint::from(k))
}

/// `(fusc(n), fusc(n+1))` where fusc is Stern's diatomic sequence.
///
/// Computed by consuming the bits of `n` most significant first: the
/// state after a prefix `p` is `(fusc(p), fusc(p+1))`, and appending a
/// bit updates it in O(1).
fn fusc_pair(n: u64) -> (u64, u64) {
    let (mut a, mut b) = (0u64, 1u64);
    if n == 0 {
        return (a, b);
    }
    let bits = 64 - n.leading_zeros();
    for i in (0..bits).rev() {
        if (n >> i) & 1 == 0 {
            b += a;
        } else {
            a += b;
        }
    }
    (a, b)
}

/// The k-th positive rational in Calkin–Wilf order, as a (numerator,
/// denominator) pair, already in lowest terms. 1-based: `cw(1) = 1/1`.
fn calkin_wilf(k: u64) -> (u64, u64) {
    debug_assert!(k >= 1);
    fusc_pair(k)
}

/// The k-th rational in the fixed enumeration of ℚ:
/// index 0 ↦ 0, index 2k−1 ↦ q_k, index 2k ↦ −q_k, with q_k the k-th
/// Calkin–Wilf positive rational. The sequence starts
/// 0, 1, −1, 1/2, −1/2, 2, −2, 1/3, −1/3, 3/2, ….
pub fn enum_rat(k: usize) -> DomainElement {
    if k == 0 {
        return DomainElement::Rat(BigRational::from_integer(0.into()));
    }
    let m = (k as u64 + 1) / 2;
    let (p, q) = calkin_wilf(m);
    let mut value = BigRational::new(p.into(), q.into());
    if k % 2 == 0 {
        value = -value;
    }
    DomainElement::Rat(value)
}

/// The k-th element of a finite universe of the given size, or `None`
/// past the end.
pub fn enum_fin(universe_size: usize, k: usize) -> Option<DomainElement> {
    (k < universe_size).then_some(DomainElement::Fin(k))
}

/// Binomial coefficient, saturating at `usize::MAX` (indices that large
/// are never reached in practice).
fn binom(n: usize, r: usize) -> usize {
    let r = r.min(n - r.min(n));
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// The k-th tuple in the diagonal enumeration of ℕ^m: tuples are ordered
/// by total sum, then lexicographically. Every tuple appears at exactly
/// one index, and growing an index budget only appends tuples.
pub fn diagonal_tuple(m: usize, k: usize) -> Vec<usize> {
    if m == 0 {
        debug_assert_eq!(k, 0, "ℕ^0 has a single element");
        return Vec::new();
    }
    // Find the diagonal (total sum) the index lands on.
    let mut k = k;
    let mut sum = 0usize;
    loop {
        let count = binom(sum + m - 1, m - 1);
        if k < count {
            break;
        }
        k -= count;
        sum += 1;
    }
    // Then walk components lexicographically within that diagonal.
    let mut tuple = Vec::with_capacity(m);
    let mut remaining = sum;
    for position in 0..m {
        if position + 1 == m {
            tuple.push(remaining);
            break;
        }
        let slots_after = m - position - 1;
        let mut component = 0usize;
        loop {
            // Tuples with this component fixed: distribute the rest.
            let count = binom(remaining - component + slots_after - 1, slots_after - 1);
            if k < count {
                break;
            }
            k -= count;
            component += 1;
        }
        tuple.push(component);
        remaining -= component;
    }
    tuple
}
