//! Linear arithmetic over the natural numbers.
//!
//! The language has `<`, `=`, and `divides` (with a positive integer
//! literal modulus) over terms built from variables, natural-number
//! literals, `+`, and multiplication by a constant. Quantifiers are
//! first relativized to the nonnegative half-line, then eliminated one
//! innermost existential at a time: scale the bound variable's
//! coefficients to a common magnitude and substitute it by a fresh
//! unit-coefficient variable constrained by a divisibility condition,
//! take the least common multiple δ of all divisibility moduli, and
//! disjoin the formula's value near minus infinity over one δ-period
//! with its value at each lower-bound term shifted by 1..δ.

use num::{BigInt, Integer, One, Signed, Zero};

use crate::logic::{DomainElement, Formula, Symbol, Term};
use crate::transform::to_nnf;

use super::linexpr::{divides_formula, eq_formula, lt_formula, term_to_linear, to_int_lin, IntLin};
use super::{
    decide_ground, divides_ground, enumerate::enum_nat, fold_ground_atoms, modulus_value,
    rational_ground_atom, require_sentence, simplify_bools, QeStep, QeTrace, Theory, TheoryError,
};

/// Natural-number linear arithmetic.
pub struct PresburgerTheory;

fn check_nat_literals(t: &Term) -> Result<(), TheoryError> {
    match t {
        Term::Var(_) => Ok(()),
        Term::Num(q) => {
            if q.is_integer() && !q.is_negative() {
                Ok(())
            } else {
                Err(TheoryError::NotANatural(q.to_string()))
            }
        }
        Term::Apply(_, args) => args.iter().try_for_each(check_nat_literals),
    }
}

fn check_linear_nat_term(t: &Term) -> Result<(), TheoryError> {
    term_to_linear(t)?;
    check_nat_literals(t)
}

fn check_language_presburger(f: &Formula) -> Result<(), TheoryError> {
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Atom(p, args) => match p.name.as_str() {
            "<" | "=" if args.len() == 2 => args.iter().try_for_each(check_linear_nat_term),
            "divides" if args.len() == 2 => {
                modulus_value(&args[0])?;
                check_linear_nat_term(&args[1])
            }
            "<" | "=" | "divides" => Err(TheoryError::BadArity(p.name.clone())),
            other => Err(TheoryError::UnsupportedSymbol(other.to_string())),
        },
        Formula::Not(g) => check_language_presburger(g),
        Formula::And(a, b)
        | Formula::Or(a, b)
        | Formula::Implies(a, b)
        | Formula::Iff(a, b) => {
            check_language_presburger(a)?;
            check_language_presburger(b)
        }
        Formula::Exists(_, body) | Formula::Forall(_, body) => check_language_presburger(body),
    }
}

fn nonneg_guard(v: &Symbol) -> Formula {
    Formula::not(Formula::atom(
        Symbol::predicate("<", 2),
        vec![Term::Var(v.clone()), Term::int(0)],
    ))
}

/// Restrict every quantifier to the nonnegative integers, leaving only
/// existentials: `forall x. φ` becomes `not exists x. (x ≥ 0 and not φ)`.
fn relativize(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(..) => f.clone(),
        Formula::Not(g) => Formula::not(relativize(g)),
        Formula::And(a, b) => Formula::and(relativize(a), relativize(b)),
        Formula::Or(a, b) => Formula::or(relativize(a), relativize(b)),
        Formula::Implies(a, b) => Formula::implies(relativize(a), relativize(b)),
        Formula::Iff(a, b) => Formula::iff(relativize(a), relativize(b)),
        Formula::Exists(v, body) => Formula::exists(
            v.clone(),
            Formula::and(nonneg_guard(v), relativize(body)),
        ),
        Formula::Forall(v, body) => Formula::not(Formula::exists(
            v.clone(),
            Formula::and(nonneg_guard(v), Formula::not(relativize(body))),
        )),
    }
}

/// Working form of a quantifier-free body during one elimination: atoms
/// that mention the bound variable are held as linear constraints
/// (`e < 0`, `d | e`), everything else stays an opaque leaf.
#[derive(Debug, Clone)]
enum QfTree {
    True,
    False,
    Leaf(Formula),
    Lt(IntLin),
    Div(BigInt, IntLin),
    NotDiv(BigInt, IntLin),
    And(Box<QfTree>, Box<QfTree>),
    Or(Box<QfTree>, Box<QfTree>),
}

impl QfTree {
    fn and(a: QfTree, b: QfTree) -> QfTree {
        QfTree::And(Box::new(a), Box::new(b))
    }

    fn or(a: QfTree, b: QfTree) -> QfTree {
        QfTree::Or(Box::new(a), Box::new(b))
    }
}

fn diff(a: &Term, b: &Term) -> Result<IntLin, TheoryError> {
    Ok(to_int_lin(&term_to_linear(a)?.sub(&term_to_linear(b)?)))
}

fn atom_tree(f: &Formula, x: &Symbol, negated: bool) -> Result<QfTree, TheoryError> {
    let Formula::Atom(p, args) = f else {
        unreachable!("atom_tree on non-atom")
    };
    // Atoms whose bound-variable coefficient cancels to zero are
    // rebuilt from the linear form rather than kept verbatim: the
    // variable may still occur syntactically with a cancelled
    // coefficient, and it must not survive the elimination.
    let one = IntLin::constant(BigInt::one());
    match p.name.as_str() {
        "<" => {
            let e = diff(&args[0], &args[1])?;
            let e = if negated {
                // not(a < b) over ℤ is b − a − 1 < 0.
                e.neg().sub(&one)
            } else {
                e
            };
            if !e.contains(x) {
                return Ok(QfTree::Leaf(lt_formula(&e)));
            }
            Ok(QfTree::Lt(e))
        }
        "=" => {
            let e = diff(&args[0], &args[1])?;
            if !e.contains(x) {
                let eq = eq_formula(&e);
                return Ok(QfTree::Leaf(if negated { Formula::not(eq) } else { eq }));
            }
            if negated {
                Ok(QfTree::or(QfTree::Lt(e.clone()), QfTree::Lt(e.neg())))
            } else {
                // e = 0 over ℤ is e < 1 and −e < 1.
                Ok(QfTree::and(
                    QfTree::Lt(e.sub(&one)),
                    QfTree::Lt(e.neg().sub(&one)),
                ))
            }
        }
        "divides" => {
            let d = modulus_value(&args[0])?;
            let e = to_int_lin(&term_to_linear(&args[1])?);
            if !e.contains(x) {
                let div = divides_formula(&d, &e);
                return Ok(QfTree::Leaf(if negated { Formula::not(div) } else { div }));
            }
            Ok(if negated {
                QfTree::NotDiv(d, e)
            } else {
                QfTree::Div(d, e)
            })
        }
        other => Err(TheoryError::UnsupportedSymbol(other.to_string())),
    }
}

/// Translate an NNF quantifier-free formula into the working form.
fn build(f: &Formula, x: &Symbol) -> Result<QfTree, TheoryError> {
    match f {
        Formula::True => Ok(QfTree::True),
        Formula::False => Ok(QfTree::False),
        Formula::Atom(..) => atom_tree(f, x, false),
        Formula::Not(g) => match g.as_ref() {
            Formula::Atom(..) => atom_tree(g, x, true),
            Formula::True => Ok(QfTree::False),
            Formula::False => Ok(QfTree::True),
            other => unreachable!("negation left on non-atom after NNF: {other}"),
        },
        Formula::And(a, b) => Ok(QfTree::and(build(a, x)?, build(b, x)?)),
        Formula::Or(a, b) => Ok(QfTree::or(build(a, x)?, build(b, x)?)),
        other => unreachable!("not in NNF: {other}"),
    }
}

fn collect_abs_coeffs(t: &QfTree, x: &Symbol, out: &mut Vec<BigInt>) {
    match t {
        QfTree::Lt(e) | QfTree::Div(_, e) | QfTree::NotDiv(_, e) => {
            let c = e.coeff(x);
            if !c.is_zero() {
                out.push(c.abs());
            }
        }
        QfTree::And(a, b) | QfTree::Or(a, b) => {
            collect_abs_coeffs(a, x, out);
            collect_abs_coeffs(b, x, out);
        }
        _ => {}
    }
}

/// Scale every constraint so the bound variable's coefficient has
/// magnitude `m`, then read it as a fresh unit-coefficient variable
/// (the caller conjoins the matching `m | x` constraint).
fn unitize(t: &QfTree, x: &Symbol, m: &BigInt) -> QfTree {
    let reunit = |e: &IntLin| {
        let c = e.coeff(x);
        debug_assert!(!c.is_zero());
        let k = m / c.abs();
        let sign = if c.is_positive() {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        let scaled = e.scale(&k);
        (
            k,
            scaled
                .without(x)
                .add(&IntLin::var(x.clone()).scale(&sign)),
        )
    };
    match t {
        QfTree::Lt(e) => {
            let (_, e) = reunit(e);
            QfTree::Lt(e)
        }
        QfTree::Div(d, e) => {
            let (k, e) = reunit(e);
            QfTree::Div(d * k, e)
        }
        QfTree::NotDiv(d, e) => {
            let (k, e) = reunit(e);
            QfTree::NotDiv(d * k, e)
        }
        QfTree::And(a, b) => QfTree::and(unitize(a, x, m), unitize(b, x, m)),
        QfTree::Or(a, b) => QfTree::or(unitize(a, x, m), unitize(b, x, m)),
        leaf => leaf.clone(),
    }
}

fn divisors_lcm(t: &QfTree) -> BigInt {
    match t {
        QfTree::Div(d, _) | QfTree::NotDiv(d, _) => d.clone(),
        QfTree::And(a, b) | QfTree::Or(a, b) => divisors_lcm(a).lcm(&divisors_lcm(b)),
        _ => BigInt::one(),
    }
}

/// The formula's limit as the bound variable goes to minus infinity:
/// upper-bound constraints become true, lower bounds become false, and
/// only the δ-periodic divisibility constraints keep the variable.
fn minus_infinity(t: &QfTree, x: &Symbol) -> QfTree {
    match t {
        QfTree::Lt(e) => {
            if e.coeff(x).is_positive() {
                QfTree::True
            } else {
                QfTree::False
            }
        }
        QfTree::And(a, b) => QfTree::and(minus_infinity(a, x), minus_infinity(b, x)),
        QfTree::Or(a, b) => QfTree::or(minus_infinity(a, x), minus_infinity(b, x)),
        other => other.clone(),
    }
}

fn collect_lowers(t: &QfTree, x: &Symbol, out: &mut std::collections::BTreeSet<IntLin>) {
    match t {
        QfTree::Lt(e) => {
            // −x + r < 0 is the lower bound x > r.
            if e.coeff(x) == -BigInt::one() {
                out.insert(e.without(x));
            }
        }
        QfTree::And(a, b) | QfTree::Or(a, b) => {
            collect_lowers(a, x, out);
            collect_lowers(b, x, out);
        }
        _ => {}
    }
}

fn subst_tree(t: &QfTree, x: &Symbol, s: &IntLin) -> QfTree {
    match t {
        QfTree::Lt(e) => QfTree::Lt(e.substitute(x, s)),
        QfTree::Div(d, e) => QfTree::Div(d.clone(), e.substitute(x, s)),
        QfTree::NotDiv(d, e) => QfTree::NotDiv(d.clone(), e.substitute(x, s)),
        QfTree::And(a, b) => QfTree::and(subst_tree(a, x, s), subst_tree(b, x, s)),
        QfTree::Or(a, b) => QfTree::or(subst_tree(a, x, s), subst_tree(b, x, s)),
        leaf => leaf.clone(),
    }
}

fn tree_to_formula(t: &QfTree) -> Formula {
    match t {
        QfTree::True => Formula::True,
        QfTree::False => Formula::False,
        QfTree::Leaf(f) => f.clone(),
        QfTree::Lt(e) => lt_formula(e),
        QfTree::Div(d, e) => divides_formula(d, e),
        QfTree::NotDiv(d, e) => Formula::not(divides_formula(d, e)),
        QfTree::And(a, b) => Formula::and(tree_to_formula(a), tree_to_formula(b)),
        QfTree::Or(a, b) => Formula::or(tree_to_formula(a), tree_to_formula(b)),
    }
}

/// Eliminate one existential over a quantifier-free body.
fn eliminate_exists(x: &Symbol, body: &Formula) -> Result<Formula, TheoryError> {
    let tree = build(&to_nnf(body), x)?;

    let mut cs = vec![];
    collect_abs_coeffs(&tree, x, &mut cs);
    let m = cs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c));
    let mut tree = unitize(&tree, x, &m);
    if !m.is_one() {
        tree = QfTree::and(tree, QfTree::Div(m, IntLin::var(x.clone())));
    }

    let delta: u64 = u64::try_from(&divisors_lcm(&tree))
        .map_err(|_| TheoryError::BadArguments("divisibility period too large".into()))?;
    let minf = minus_infinity(&tree, x);
    let mut lowers = std::collections::BTreeSet::new();
    collect_lowers(&tree, x, &mut lowers);

    let mut disjuncts = vec![];
    for j in 1..=delta {
        let s = IntLin::constant(BigInt::from(j));
        disjuncts.push(tree_to_formula(&subst_tree(&minf, x, &s)));
    }
    for b in &lowers {
        for j in 1..=delta {
            let s = b.add(&IntLin::constant(BigInt::from(j)));
            disjuncts.push(tree_to_formula(&subst_tree(&tree, x, &s)));
        }
    }
    let joined = disjuncts
        .into_iter()
        .reduce(Formula::or)
        .unwrap_or(Formula::False);
    Ok(simplify_bools(&joined))
}

/// Replace the leftmost innermost existential; `None` when the formula
/// is quantifier-free. Universals are gone by relativization.
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
        Formula::Forall(..) => unreachable!("universal after relativization"),
    })
}

/// Ground atom semantics over the naturals.
fn presburger_atom(p: &Symbol, args: &[Term]) -> Result<bool, TheoryError> {
    if p.name == "divides" {
        if args.len() != 2 {
            return Err(TheoryError::BadArity("divides".into()));
        }
        divides_ground(&args[0], &args[1])
    } else {
        rational_ground_atom(p, args)
    }
}

/// Quantifier elimination for natural-number linear arithmetic.
pub fn cooper_qe(f: &Formula) -> Result<QeTrace, TheoryError> {
    check_language_presburger(f)?;
    let mut cur = relativize(f);
    let mut steps = vec![];
    while let Some((variable, next)) = step(&cur)? {
        let next = simplify_bools(&next);
        steps.push(QeStep {
            variable,
            method: "cooper",
            size_after: next.size(),
        });
        cur = next;
    }
    let output = simplify_bools(&fold_ground_atoms(&cur, &presburger_atom));
    Ok(QeTrace {
        input: f.clone(),
        output,
        steps,
    })
}

/// Decide a sentence of natural-number linear arithmetic.
pub fn presburger_decide(sentence: &Formula) -> Result<bool, TheoryError> {
    require_sentence(sentence)?;
    let trace = cooper_qe(sentence)?;
    decide_ground(&trace.output, &presburger_atom)
}

impl Theory for PresburgerTheory {
    fn name(&self) -> &'static str {
        "presburger"
    }

    fn check_language(&self, f: &Formula) -> Result<(), TheoryError> {
        check_language_presburger(f)
    }

    fn decide(&self, sentence: &Formula) -> Result<bool, TheoryError> {
        presburger_decide(sentence)
    }

    fn enum_domain(&self, k: usize) -> Option<DomainElement> {
        Some(enum_nat(k))
    }

    fn eval_ground_atom(&self, p: &Symbol, args: &[Term]) -> Result<bool, TheoryError> {
        presburger_atom(p, args)
    }
}
