//! Linear expressions over exact coefficients — the shared working
//! representation of the arithmetic quantifier-elimination procedures.
//!
//! An expression is Σ cᵢ·vᵢ + c with no zero coefficients stored.
//! Surface atoms are rebuilt from expressions with nonnegative entries
//! split across the two sides, so printed formulas never need a
//! subtraction operator.

use std::collections::BTreeMap;
use std::ops::{Mul, Neg, Sub};

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::logic::{Formula, Symbol, Term};

use super::TheoryError;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct LinExpr<C> {
    coeffs: BTreeMap<Symbol, C>,
    constant: C,
}

pub(crate) type RatLin = LinExpr<BigRational>;
pub(crate) type IntLin = LinExpr<BigInt>;

impl<C> LinExpr<C>
where
    C: Clone + Zero + Neg<Output = C> + Sub<Output = C> + Mul<Output = C> + PartialEq,
{
    pub fn constant(c: C) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: Symbol) -> Self
    where
        C: One,
    {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v, C::one());
        LinExpr {
            coeffs,
            constant: C::zero(),
        }
    }

    pub fn coeff(&self, v: &Symbol) -> C {
        self.coeffs.get(v).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_part(&self) -> &C {
        &self.constant
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Symbol, &C)> {
        self.coeffs.iter()
    }

    pub fn contains(&self, v: &Symbol) -> bool {
        self.coeffs.contains_key(v)
    }

    /// `Some(constant)` when no variables remain.
    pub fn as_constant(&self) -> Option<&C> {
        self.coeffs.is_empty().then_some(&self.constant)
    }

    fn normalized(mut self) -> Self {
        self.coeffs.retain(|_, c| !c.is_zero());
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (v, c) in &other.coeffs {
            let entry = coeffs.entry(v.clone()).or_insert_with(C::zero);
            *entry = entry.clone() + c.clone();
        }
        LinExpr {
            coeffs,
            constant: self.constant.clone() + other.constant.clone(),
        }
        .normalized()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LinExpr {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (v.clone(), -c.clone()))
                .collect(),
            constant: -self.constant.clone(),
        }
    }

    pub fn scale(&self, k: &C) -> Self {
        LinExpr {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (v.clone(), c.clone() * k.clone()))
                .collect(),
            constant: self.constant.clone() * k.clone(),
        }
        .normalized()
    }

    /// The expression with `v`'s term removed.
    pub fn without(&self, v: &Symbol) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.remove(v);
        LinExpr {
            coeffs,
            constant: self.constant.clone(),
        }
    }

    /// Replace `v` by the expression `t`.
    pub fn substitute(&self, v: &Symbol, t: &Self) -> Self {
        let c = self.coeff(v);
        if c.is_zero() {
            return self.clone();
        }
        self.without(v).add(&t.scale(&c))
    }
}

/// Interpret a term as a linear expression over ℚ.
///
/// `+` is binary addition; `*` needs one constant factor (products of
/// two variable expressions are rejected as nonlinear).
pub(crate) fn term_to_linear(t: &Term) -> Result<RatLin, TheoryError> {
    match t {
        Term::Var(v) => Ok(LinExpr::var(v.clone())),
        Term::Num(q) => Ok(LinExpr::constant(q.clone())),
        Term::Apply(f, args) => match f.name.as_str() {
            "+" => {
                if args.len() != 2 {
                    return Err(TheoryError::BadArity("+".into()));
                }
                Ok(term_to_linear(&args[0])?.add(&term_to_linear(&args[1])?))
            }
            "*" => {
                if args.len() != 2 {
                    return Err(TheoryError::BadArity("*".into()));
                }
                let a = term_to_linear(&args[0])?;
                let b = term_to_linear(&args[1])?;
                if let Some(k) = a.as_constant() {
                    Ok(b.scale(k))
                } else if let Some(k) = b.as_constant() {
                    Ok(a.scale(k))
                } else {
                    Err(TheoryError::NonLinear)
                }
            }
            other => Err(TheoryError::UnsupportedSymbol(other.to_string())),
        },
    }
}

/// Clear denominators: the smallest positive multiple of `e` with
/// integer entries.
pub(crate) fn to_int_lin(e: &RatLin) -> IntLin {
    let mut lcm = BigInt::one();
    for (_, c) in e.entries() {
        lcm = lcm.lcm(c.denom());
    }
    lcm = lcm.lcm(e.constant_part().denom());
    let scaled = e.scale(&BigRational::from_integer(lcm));
    IntLin {
        coeffs: scaled
            .coeffs
            .into_iter()
            .map(|(v, c)| {
                debug_assert!(c.is_integer());
                (v, c.to_integer())
            })
            .collect(),
        constant: scaled.constant.to_integer(),
    }
}

/// Divide through by the gcd of all entries, keeping the sign. Used to
/// canonicalize rebuilt atoms (`x/2 < y/2` comes back as `x < y`).
pub(crate) fn reduce_gcd(e: &IntLin) -> IntLin {
    let mut g = e.constant.abs();
    for (_, c) in e.entries() {
        g = g.gcd(c);
    }
    if g.is_zero() || g.is_one() {
        return e.clone();
    }
    IntLin {
        coeffs: e
            .coeffs
            .iter()
            .map(|(v, c)| (v.clone(), c / &g))
            .collect(),
        constant: &e.constant / &g,
    }
}

fn plus(sym_plus: &Symbol, acc: Option<Term>, next: Term) -> Option<Term> {
    Some(match acc {
        None => next,
        Some(prev) => Term::Apply(sym_plus.clone(), vec![prev, next]),
    })
}

fn monomial(v: &Symbol, c: &BigInt) -> Term {
    if c.is_one() {
        Term::Var(v.clone())
    } else {
        Term::Apply(
            Symbol::function("*", 2),
            vec![
                Term::Num(BigRational::from_integer(c.clone())),
                Term::Var(v.clone()),
            ],
        )
    }
}

/// Render `e ⋈ 0` as a `(lhs, rhs)` term pair with only nonnegative
/// entries: positive parts go left, negated negative parts go right.
pub(crate) fn split_sides(e: &IntLin) -> (Term, Term) {
    let sym_plus = Symbol::function("+", 2);
    let mut lhs: Option<Term> = None;
    let mut rhs: Option<Term> = None;
    for (v, c) in e.entries() {
        if c.is_positive() {
            lhs = plus(&sym_plus, lhs, monomial(v, c));
        } else {
            rhs = plus(&sym_plus, rhs, monomial(v, &-c));
        }
    }
    if e.constant.is_positive() {
        lhs = plus(
            &sym_plus,
            lhs,
            Term::Num(BigRational::from_integer(e.constant.clone())),
        );
    } else if e.constant.is_negative() {
        rhs = plus(
            &sym_plus,
            rhs,
            Term::Num(BigRational::from_integer(-e.constant.clone())),
        );
    }
    let zero = || Term::int(0);
    (lhs.unwrap_or_else(zero), rhs.unwrap_or_else(zero))
}

/// Render a nonnegative-entry expression as a single term.
fn nonneg_term(e: &IntLin) -> Term {
    let sym_plus = Symbol::function("+", 2);
    let mut out: Option<Term> = None;
    for (v, c) in e.entries() {
        debug_assert!(c.is_positive());
        out = plus(&sym_plus, out, monomial(v, c));
    }
    if !e.constant.is_zero() || out.is_none() {
        debug_assert!(!e.constant.is_negative());
        out = plus(
            &sym_plus,
            out,
            Term::Num(BigRational::from_integer(e.constant.clone())),
        );
    }
    out.expect("some summand")
}

/// Surface formula for `e < 0`, folding the ground case.
pub(crate) fn lt_formula(e: &IntLin) -> Formula {
    if let Some(c) = e.as_constant() {
        return if c.is_negative() {
            Formula::True
        } else {
            Formula::False
        };
    }
    let (lhs, rhs) = split_sides(e);
    Formula::Atom(Symbol::predicate("<", 2), vec![lhs, rhs])
}

/// Surface formula for `e = 0`, folding the ground case.
pub(crate) fn eq_formula(e: &IntLin) -> Formula {
    if let Some(c) = e.as_constant() {
        return if c.is_zero() {
            Formula::True
        } else {
            Formula::False
        };
    }
    let (lhs, rhs) = split_sides(e);
    Formula::Atom(Symbol::predicate("=", 2), vec![lhs, rhs])
}

/// Surface formula for `d | e`. Entries are reduced modulo `d` into
/// `[0, d)` first, which both folds trivial cases and keeps the rendered
/// term free of negative coefficients.
pub(crate) fn divides_formula(d: &BigInt, e: &IntLin) -> Formula {
    debug_assert!(d.is_positive());
    if d.is_one() {
        return Formula::True;
    }
    let reduced = IntLin {
        coeffs: e
            .coeffs
            .iter()
            .filter_map(|(v, c)| {
                let m = c.mod_floor(d);
                (!m.is_zero()).then(|| (v.clone(), m))
            })
            .collect(),
        constant: e.constant.mod_floor(d),
    };
    if let Some(c) = reduced.as_constant() {
        return if c.is_zero() {
            Formula::True
        } else {
            Formula::False
        };
    }
    Formula::Atom(
        Symbol::predicate("divides", 2),
        vec![
            Term::Num(BigRational::from_integer(d.clone())),
            nonneg_term(&reduced),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::print_formula;

    fn x() -> Symbol {
        Symbol::variable("x")
    }

    fn y() -> Symbol {
        Symbol::variable("y")
    }

    fn int(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn intlin(pairs: &[(&Symbol, i64)], constant: i64) -> IntLin {
        let mut e = LinExpr::constant(int(constant));
        for (v, c) in pairs {
            e = e.add(&LinExpr::var((*v).clone()).scale(&int(*c)));
        }
        e
    }

    #[test]
    fn term_parsing_collects_coefficients() {
        // 2x + x + 3 → 3x + 3
        let t = Term::apply(
            Symbol::function("+", 2),
            vec![
                Term::apply(
                    Symbol::function("*", 2),
                    vec![Term::int(2), Term::var("x")],
                ),
                Term::apply(
                    Symbol::function("+", 2),
                    vec![Term::var("x"), Term::int(3)],
                ),
            ],
        );
        let e = term_to_linear(&t).unwrap();
        assert_eq!(e.coeff(&x()), BigRational::from_integer(3.into()));
        assert_eq!(
            e.constant_part(),
            &BigRational::from_integer(3.into())
        );
    }

    #[test]
    fn variable_product_rejected() {
        let t = Term::apply(
            Symbol::function("*", 2),
            vec![Term::var("x"), Term::var("y")],
        );
        assert_eq!(term_to_linear(&t), Err(TheoryError::NonLinear));
    }

    #[test]
    fn substitution_composes() {
        // (2x + y + 1)[x := y + 3] = 3y + 7
        let e = intlin(&[(&x(), 2), (&y(), 1)], 1);
        let t = intlin(&[(&y(), 1)], 3);
        let got = e.substitute(&x(), &t);
        assert_eq!(got, intlin(&[(&y(), 3)], 7));
    }

    #[test]
    fn split_sides_moves_negatives() {
        // x − 2y − 3 < 0 → x < 2y + 3
        let e = intlin(&[(&x(), 1), (&y(), -2)], -3);
        assert_eq!(print_formula(&lt_formula(&e)), "(< x (+ (* 2 y) 3))");
    }

    #[test]
    fn ground_comparisons_fold() {
        assert_eq!(lt_formula(&intlin(&[], -1)), Formula::True);
        assert_eq!(lt_formula(&intlin(&[], 0)), Formula::False);
        assert_eq!(eq_formula(&intlin(&[], 0)), Formula::True);
        assert_eq!(eq_formula(&intlin(&[], 2)), Formula::False);
    }

    #[test]
    fn divides_reduces_entries_mod_modulus() {
        // 2 | (x − 1)  →  (divides 2 (+ x 1))
        let e = intlin(&[(&x(), 1)], -1);
        assert_eq!(
            print_formula(&divides_formula(&int(2), &e)),
            "(divides 2 (+ x 1))"
        );
        // 3 | (6x + 3) → always true
        let e = intlin(&[(&x(), 6)], 3);
        assert_eq!(divides_formula(&int(3), &e), Formula::True);
        // 1 | anything → true
        assert_eq!(divides_formula(&int(1), &intlin(&[(&x(), 5)], 2)), Formula::True);
    }

    #[test]
    fn gcd_reduction_canonicalizes() {
        // 2x − 2y → x − y
        let e = intlin(&[(&x(), 2), (&y(), -2)], 0);
        assert_eq!(reduce_gcd(&e), intlin(&[(&x(), 1), (&y(), -1)], 0));
        assert_eq!(print_formula(&lt_formula(&reduce_gcd(&e))), "(< x y)");
    }

    #[test]
    fn int_lin_clears_denominators() {
        // x/2 − y/3 → 3x − 2y
        let e = RatLin::var(x())
            .scale(&BigRational::new(1.into(), 2.into()))
            .add(&RatLin::var(y()).scale(&BigRational::new((-1).into(), 3.into())));
        assert_eq!(to_int_lin(&e), intlin(&[(&x(), 3), (&y(), -2)], 0));
    }
}
