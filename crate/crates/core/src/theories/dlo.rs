//! Dense linear orders without endpoints.
//!
//! The language has `<` and `=` only, with rational literals admitted as
//! element names of the canonical model. Quantifier elimination works on
//! one innermost quantifier at a time: normalize the body so negation
//! only appears as the order-theoretic complements `not(a<b) = (b<a or
//! a=b)` and `not(a=b) = (a<b or b<a)`, spread into disjunctive normal
//! form, and replace each conjunct's constraints on the bound variable
//! by the lower-bound/upper-bound pairs they induce (density and the
//! absence of endpoints make that equivalent).

use crate::logic::{substitute, DomainElement, Formula, Symbol, Term};
use crate::transform::to_nnf;

use super::{
    decide_ground, enumerate::enum_rat, fold_atoms, positivize_order, rational_ground_atom,
    require_sentence, simplify_bools, QeStep, QeTrace, Theory, TheoryError,
};

/// The theory of dense linear orders without endpoints; its canonical
/// model is the rationals.
pub struct DloTheory;

fn check_term(t: &Term) -> Result<(), TheoryError> {
    match t {
        Term::Var(_) | Term::Num(_) => Ok(()),
        Term::Apply(f, _) => Err(TheoryError::UnsupportedSymbol(f.name.clone())),
    }
}

fn check_language_dlo(f: &Formula) -> Result<(), TheoryError> {
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Atom(p, args) => {
            if p.name != "<" && p.name != "=" {
                return Err(TheoryError::UnsupportedSymbol(p.name.clone()));
            }
            if args.len() != 2 {
                return Err(TheoryError::BadArity(p.name.clone()));
            }
            args.iter().try_for_each(check_term)
        }
        Formula::Not(g) => check_language_dlo(g),
        Formula::And(a, b)
        | Formula::Or(a, b)
        | Formula::Implies(a, b)
        | Formula::Iff(a, b) => {
            check_language_dlo(a)?;
            check_language_dlo(b)
        }
        Formula::Exists(_, body) | Formula::Forall(_, body) => check_language_dlo(body),
    }
}

/// Fold order atoms that are decided by syntax or by ground literals:
/// `t < t` is false, `t = t` is true, and comparisons between two
/// rational literals evaluate outright.
fn dlo_fold(f: &Formula) -> Formula {
    let folded = fold_atoms(f, &|p, args| {
        if args.len() != 2 {
            return None;
        }
        if args[0] == args[1] {
            return match p.name.as_str() {
                "<" => Some(Formula::False),
                "=" => Some(Formula::True),
                _ => None,
            };
        }
        if let (Term::Num(a), Term::Num(b)) = (&args[0], &args[1]) {
            return match p.name.as_str() {
                "<" => Some(if a < b { Formula::True } else { Formula::False }),
                "=" => Some(if a == b { Formula::True } else { Formula::False }),
                _ => None,
            };
        }
        None
    });
    simplify_bools(&folded)
}

/// Disjunctive normal form of a negation-free formula, as a list of
/// conjuncts (each a list of atoms). `True` is the empty conjunct;
/// `False` contributes nothing.
fn dnf_conjuncts(f: &Formula) -> Vec<Vec<Formula>> {
    match f {
        Formula::True => vec![vec![]],
        Formula::False => vec![],
        Formula::Atom(..) => vec![vec![f.clone()]],
        Formula::Or(a, b) => {
            let mut out = dnf_conjuncts(a);
            out.extend(dnf_conjuncts(b));
            out
        }
        Formula::And(a, b) => {
            let left = dnf_conjuncts(a);
            let right = dnf_conjuncts(b);
            let mut out = Vec::with_capacity(left.len() * right.len());
            for l in &left {
                for r in &right {
                    let mut conj = l.clone();
                    conj.extend(r.iter().cloned());
                    out.push(conj);
                }
            }
            out
        }
        other => unreachable!("not negation-free: {other}"),
    }
}

fn is_var(t: &Term, x: &Symbol) -> bool {
    matches!(t, Term::Var(v) if v == x)
}

fn conjoin(atoms: Vec<Formula>) -> Formula {
    atoms.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
}

/// Eliminate `x` from one conjunct of atoms; `None` means the conjunct
/// is unsatisfiable.
fn eliminate_from_conjunct(x: &Symbol, atoms: Vec<Formula>) -> Option<Formula> {
    // Trivial atoms first: t < t kills the conjunct, t = t drops out.
    let mut live = Vec::with_capacity(atoms.len());
    for atom in atoms {
        let Formula::Atom(p, args) = &atom else {
            unreachable!("conjunct entry is not an atom")
        };
        if args[0] == args[1] {
            match p.name.as_str() {
                "<" => return None,
                "=" => continue,
                _ => {}
            }
        }
        live.push(atom);
    }

    // An equality pins x to a term without x; substitute it away.
    for (i, atom) in live.iter().enumerate() {
        let Formula::Atom(p, args) = atom else { unreachable!() };
        if p.name != "=" {
            continue;
        }
        let pinned = if is_var(&args[0], x) {
            Some(args[1].clone())
        } else if is_var(&args[1], x) {
            Some(args[0].clone())
        } else {
            None
        };
        if let Some(t) = pinned {
            let rest: Vec<Formula> = live
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, a)| substitute(a, x, &t))
                .collect();
            return Some(conjoin(rest));
        }
    }

    // Otherwise split into lower bounds, upper bounds, and x-free residue.
    let mut lowers: Vec<Term> = vec![];
    let mut uppers: Vec<Term> = vec![];
    let mut residue: Vec<Formula> = vec![];
    for atom in live {
        let Formula::Atom(p, args) = &atom else { unreachable!() };
        if p.name == "<" && is_var(&args[1], x) {
            lowers.push(args[0].clone());
        } else if p.name == "<" && is_var(&args[0], x) {
            uppers.push(args[1].clone());
        } else {
            debug_assert!(!atom_mentions(&atom, x), "unhandled atom with {x}");
            residue.push(atom);
        }
    }
    // Density and the lack of endpoints reduce x's constraints to the
    // induced pairs; an empty side imposes nothing.
    let lt = Symbol::predicate("<", 2);
    for a in &lowers {
        for b in &uppers {
            residue.push(Formula::atom(lt.clone(), vec![a.clone(), b.clone()]));
        }
    }
    Some(conjoin(residue))
}

fn atom_mentions(f: &Formula, x: &Symbol) -> bool {
    crate::logic::free_vars(f).contains(x)
}

/// Eliminate one existential over a quantifier-free body.
fn eliminate_one(x: &Symbol, body: &Formula) -> Formula {
    let pos = positivize_order(&to_nnf(body));
    let disjuncts: Vec<Formula> = dnf_conjuncts(&pos)
        .into_iter()
        .filter_map(|conj| eliminate_from_conjunct(x, conj))
        .collect();
    let joined = disjuncts
        .into_iter()
        .reduce(Formula::or)
        .unwrap_or(Formula::False);
    dlo_fold(&joined)
}

/// Replace the leftmost innermost quantifier; `None` when none remain.
fn step(f: &Formula) -> Option<(Symbol, Formula)> {
    match f {
        Formula::True | Formula::False | Formula::Atom(..) => None,
        Formula::Not(g) => step(g).map(|(v, g)| (v, Formula::not(g))),
        Formula::And(a, b) => combine(a, b, Formula::and),
        Formula::Or(a, b) => combine(a, b, Formula::or),
        Formula::Implies(a, b) => combine(a, b, Formula::implies),
        Formula::Iff(a, b) => combine(a, b, Formula::iff),
        Formula::Exists(v, body) => match step(body) {
            Some((inner, body)) => Some((inner, Formula::exists(v.clone(), body))),
            None => Some((v.clone(), eliminate_one(v, body))),
        },
        Formula::Forall(v, body) => match step(body) {
            Some((inner, body)) => Some((inner, Formula::forall(v.clone(), body))),
            None => {
                let negated = eliminate_one(v, &Formula::not(body.as_ref().clone()));
                Some((v.clone(), dlo_fold(&Formula::not(negated))))
            }
        },
    }
}

fn combine(
    a: &Formula,
    b: &Formula,
    join: impl Fn(Formula, Formula) -> Formula,
) -> Option<(Symbol, Formula)> {
    if let Some((v, a)) = step(a) {
        return Some((v, join(a, b.clone())));
    }
    step(b).map(|(v, b)| (v, join(a.clone(), b)))
}

/// Quantifier elimination for dense linear orders without endpoints.
pub fn dlo_qe(f: &Formula) -> Result<QeTrace, TheoryError> {
    check_language_dlo(f)?;
    let mut cur = f.clone();
    let mut steps = vec![];
    while let Some((variable, next)) = step(&cur) {
        steps.push(QeStep {
            variable,
            method: "dlo-bound-pairs",
            size_after: next.size(),
        });
        cur = next;
    }
    Ok(QeTrace {
        input: f.clone(),
        output: dlo_fold(&cur),
        steps,
    })
}

/// Decide a sentence of the order language.
pub fn dlo_decide(sentence: &Formula) -> Result<bool, TheoryError> {
    require_sentence(sentence)?;
    let trace = dlo_qe(sentence)?;
    decide_ground(&trace.output, &rational_ground_atom)
}

impl Theory for DloTheory {
    fn name(&self) -> &'static str {
        "dlo"
    }

    fn check_language(&self, f: &Formula) -> Result<(), TheoryError> {
        check_language_dlo(f)
    }

    fn decide(&self, sentence: &Formula) -> Result<bool, TheoryError> {
        dlo_decide(sentence)
    }

    fn enum_domain(&self, k: usize) -> Option<DomainElement> {
        Some(enum_rat(k))
    }

    fn eval_ground_atom(&self, p: &Symbol, args: &[Term]) -> Result<bool, TheoryError> {
        rational_ground_atom(p, args)
    }
}
