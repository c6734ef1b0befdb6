//! Linear arithmetic over the rationals.
//!
//! The language has `<` and `=` over linear terms with rational
//! literals. Elimination works innermost-first: normalize each atom
//! that mentions the bound variable into `x < t`, `t < x`, or `x = t`,
//! then disjoin the formula's limits at ±∞ with its value at the
//! midpoint of every pair of boundary terms — density of the order
//! guarantees a satisfying point is of one of those shapes.

use num::{BigRational, Signed, Zero};

use crate::logic::{DomainElement, Formula, Symbol, Term};
use crate::transform::to_nnf;

use super::linexpr::{eq_formula, lt_formula, reduce_gcd, term_to_linear, to_int_lin, RatLin};
use super::{
    decide_ground, enumerate::enum_rat, fold_ground_atoms, positivize_order,
    rational_ground_atom, require_sentence, simplify_bools, QeStep, QeTrace, Theory, TheoryError,
};

/// Linear rational arithmetic.
pub struct LraTheory;

fn check_language_lra(f: &Formula) -> Result<(), TheoryError> {
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Atom(p, args) => match p.name.as_str() {
            "<" | "=" if args.len() == 2 => {
                for t in args {
                    term_to_linear(t)?;
                }
                Ok(())
            }
            "<" | "=" => Err(TheoryError::BadArity(p.name.clone())),
            other => Err(TheoryError::UnsupportedSymbol(other.to_string())),
        },
        Formula::Not(g) => check_language_lra(g),
        Formula::And(a, b)
        | Formula::Or(a, b)
        | Formula::Implies(a, b)
        | Formula::Iff(a, b) => {
            check_language_lra(a)?;
            check_language_lra(b)
        }
        Formula::Exists(_, body) | Formula::Forall(_, body) => check_language_lra(body),
    }
}

/// Working form of a quantifier-free body during one elimination: every
/// atom that mentions the bound variable is solved for it.
#[derive(Debug, Clone)]
enum FrTree {
    True,
    False,
    /// An atom without the bound variable, kept as written.
    Leaf(Formula),
    /// x < t
    Below(RatLin),
    /// t < x
    Above(RatLin),
    /// x = t
    Equal(RatLin),
    And(Box<FrTree>, Box<FrTree>),
    Or(Box<FrTree>, Box<FrTree>),
}

impl FrTree {
    fn and(a: FrTree, b: FrTree) -> FrTree {
        FrTree::And(Box::new(a), Box::new(b))
    }

    fn or(a: FrTree, b: FrTree) -> FrTree {
        FrTree::Or(Box::new(a), Box::new(b))
    }
}

/// Translate a positivized quantifier-free formula, solving each atom
/// for `x`.
fn build(f: &Formula, x: &Symbol) -> Result<FrTree, TheoryError> {
    match f {
        Formula::True => Ok(FrTree::True),
        Formula::False => Ok(FrTree::False),
        Formula::Atom(p, args) => {
            let e = term_to_linear(&args[0])?.sub(&term_to_linear(&args[1])?);
            let c = e.coeff(x);
            if c.is_zero() {
                // Rebuild from the linear form rather than keeping the
                // original syntax: `x` may still occur in the atom with
                // a cancelled coefficient, and it must not survive the
                // elimination.
                let rest = e.without(x);
                return Ok(FrTree::Leaf(match p.name.as_str() {
                    "=" => eq_from(&rest),
                    "<" => lt_from(&rest),
                    other => return Err(TheoryError::UnsupportedSymbol(other.to_string())),
                }));
            }
            // atom ⟺ c·x + r ⋈ 0 ⟺ x ⋈ −r/c (direction flips with c's sign)
            let t = e.without(x).scale(&-c.recip());
            match p.name.as_str() {
                "=" => Ok(FrTree::Equal(t)),
                "<" if c.is_positive() => Ok(FrTree::Below(t)),
                "<" => Ok(FrTree::Above(t)),
                other => Err(TheoryError::UnsupportedSymbol(other.to_string())),
            }
        }
        Formula::And(a, b) => Ok(FrTree::and(build(a, x)?, build(b, x)?)),
        Formula::Or(a, b) => Ok(FrTree::or(build(a, x)?, build(b, x)?)),
        other => unreachable!("not positivized: {other}"),
    }
}

/// Boundary terms in first-occurrence order, deduplicated.
fn boundaries(t: &FrTree, out: &mut Vec<RatLin>) {
    match t {
        FrTree::Below(b) | FrTree::Above(b) | FrTree::Equal(b) => {
            if !out.contains(b) {
                out.push(b.clone());
            }
        }
        FrTree::And(a, b) | FrTree::Or(a, b) => {
            boundaries(a, out);
            boundaries(b, out);
        }
        _ => {}
    }
}

fn at_minus_inf(t: &FrTree) -> Formula {
    match t {
        FrTree::True => Formula::True,
        FrTree::False => Formula::False,
        FrTree::Leaf(f) => f.clone(),
        FrTree::Below(_) => Formula::True,
        FrTree::Above(_) | FrTree::Equal(_) => Formula::False,
        FrTree::And(a, b) => Formula::and(at_minus_inf(a), at_minus_inf(b)),
        FrTree::Or(a, b) => Formula::or(at_minus_inf(a), at_minus_inf(b)),
    }
}

fn at_plus_inf(t: &FrTree) -> Formula {
    match t {
        FrTree::True => Formula::True,
        FrTree::False => Formula::False,
        FrTree::Leaf(f) => f.clone(),
        FrTree::Above(_) => Formula::True,
        FrTree::Below(_) | FrTree::Equal(_) => Formula::False,
        FrTree::And(a, b) => Formula::and(at_plus_inf(a), at_plus_inf(b)),
        FrTree::Or(a, b) => Formula::or(at_plus_inf(a), at_plus_inf(b)),
    }
}

/// Rebuild `e < 0` (resp. `e = 0`) as a canonical surface atom.
fn lt_from(e: &RatLin) -> Formula {
    lt_formula(&reduce_gcd(&to_int_lin(e)))
}

fn eq_from(e: &RatLin) -> Formula {
    eq_formula(&reduce_gcd(&to_int_lin(e)))
}

/// The formula at the sample point `x = s`.
fn at_point(t: &FrTree, s: &RatLin) -> Formula {
    match t {
        FrTree::True => Formula::True,
        FrTree::False => Formula::False,
        FrTree::Leaf(f) => f.clone(),
        FrTree::Below(b) => lt_from(&s.sub(b)),
        FrTree::Above(b) => lt_from(&b.sub(s)),
        FrTree::Equal(b) => eq_from(&s.sub(b)),
        FrTree::And(a, b) => Formula::and(at_point(a, s), at_point(b, s)),
        FrTree::Or(a, b) => Formula::or(at_point(a, s), at_point(b, s)),
    }
}

/// Eliminate one existential over a quantifier-free body.
fn eliminate_exists(x: &Symbol, body: &Formula) -> Result<Formula, TheoryError> {
    let tree = build(&positivize_order(&to_nnf(body)), x)?;
    let mut ts = vec![];
    boundaries(&tree, &mut ts);

    let mut disjuncts = vec![at_minus_inf(&tree), at_plus_inf(&tree)];
    let half = BigRational::new(1.into(), 2.into());
    // Pair midpoints; i = j samples the boundary itself, which is what
    // satisfies the equality atoms.
    for i in 0..ts.len() {
        for j in i..ts.len() {
            let mid = ts[i].add(&ts[j]).scale(&half);
            disjuncts.push(at_point(&tree, &mid));
        }
    }
    let joined = disjuncts
        .into_iter()
        .reduce(Formula::or)
        .unwrap_or(Formula::False);
    Ok(simplify_bools(&joined))
}

/// Replace the leftmost innermost quantifier; `None` when none remain.
fn step(f: &Formula) -> Result<Option<(Symbol, Formula)>, TheoryError> {
    Ok(match f {
        Formula::True | Formula::False | Formula::Atom(..) => None,
        Formula::Not(g) => step(g)?.map(|(v, g)| (v, Formula::not(g))),
        Formula::And(a, b) => match step(a)? {
            Some((v, a)) => Some((v, Formula::and(a, b.as_ref().clone()))),
            None => step(b)?.map(|(v, b)| (v, Formula::and(a.as_ref().clone(), b))),
        },
        Formula::Or(a, b) => match step(a)? {
            Some((v, a)) => Some((v, Formula::or(a, b.as_ref().clone()))),
            None => step(b)?.map(|(v, b)| (v, Formula::or(a.as_ref().clone(), b))),
        },
        Formula::Implies(a, b) => match step(a)? {
            Some((v, a)) => Some((v, Formula::implies(a, b.as_ref().clone()))),
            None => step(b)?.map(|(v, b)| (v, Formula::implies(a.as_ref().clone(), b))),
        },
        Formula::Iff(a, b) => match step(a)? {
            Some((v, a)) => Some((v, Formula::iff(a, b.as_ref().clone()))),
            None => step(b)?.map(|(v, b)| (v, Formula::iff(a.as_ref().clone(), b))),
        },
        Formula::Exists(v, body) => match step(body)? {
            Some((inner, body)) => Some((inner, Formula::exists(v.clone(), body))),
            None => Some((v.clone(), eliminate_exists(v, body)?)),
        },
        Formula::Forall(v, body) => match step(body)? {
            Some((inner, body)) => Some((inner, Formula::forall(v.clone(), body))),
            None => {
                let negated = eliminate_exists(v, &Formula::not(body.as_ref().clone()))?;
                Some((v.clone(), simplify_bools(&Formula::not(negated))))
            }
        },
    })
}

/// Quantifier elimination for linear rational arithmetic.
pub fn fr_qe(f: &Formula) -> Result<QeTrace, TheoryError> {
    check_language_lra(f)?;
    let mut cur = f.clone();
    let mut steps = vec![];
    while let Some((variable, next)) = step(&cur)? {
        let next = simplify_bools(&next);
        steps.push(QeStep {
            variable,
            method: "ferrante-rackoff",
            size_after: next.size(),
        });
        cur = next;
    }
    let output = simplify_bools(&fold_ground_atoms(&cur, &rational_ground_atom));
    Ok(QeTrace {
        input: f.clone(),
        output,
        steps,
    })
}

/// Decide a sentence of linear rational arithmetic.
pub fn lra_decide(sentence: &Formula) -> Result<bool, TheoryError> {
    require_sentence(sentence)?;
    let trace = fr_qe(sentence)?;
    decide_ground(&trace.output, &rational_ground_atom)
}

impl Theory for LraTheory {
    fn name(&self) -> &'static str {
        "lra"
    }

    fn check_language(&self, f: &Formula) -> Result<(), TheoryError> {
        check_language_lra(f)
    }

    fn decide(&self, sentence: &Formula) -> Result<bool, TheoryError> {
        lra_decide(sentence)
    }

    fn enum_domain(&self, k: usize) -> Option<DomainElement> {
        Some(enum_rat(k))
    }

    fn eval_ground_atom(&self, p: &Symbol, args: &[Term]) -> Result<bool, TheoryError> {
        rational_ground_atom(p, args)
    }
}
