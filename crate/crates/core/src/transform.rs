//! Normal-form pipeline: rectification, negation normal form, prenex
//! normal form, and CNF of a quantifier-free matrix.

use std::collections::{BTreeMap, BTreeSet};

use crate::logic::{free_vars, Formula, PrenexFormula, Quantifier, Symbol, Term};

/// Deterministic fresh-name generator. A base name is used as-is when
/// still unused, otherwise suffixed `_1`, `_2`, … in order.
#[derive(Debug, Clone, Default)]
pub struct FreshNameSource {
    used: BTreeSet<String>,
}

impl FreshNameSource {
    pub fn new(reserved: impl IntoIterator<Item = String>) -> Self {
        FreshNameSource {
            used: reserved.into_iter().collect(),
        }
    }

    /// Mark a name as in use.
    pub fn reserve(&mut self, name: impl Into<String>) {
        self.used.insert(name.into());
    }

    /// Pick and reserve the first free name derived from `base`.
    pub fn fresh(&mut self, base: &str) -> String {
        if self.used.insert(base.to_string()) {
            return base.to_string();
        }
        for k in 1usize.. {
            let candidate = format!("{base}_{k}");
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
        unreachable!()
    }
}

/// Rename bound variables so every quantifier binds a distinct variable,
/// distinct from all free variables. Renaming is deterministic: binders
/// are visited left to right and collide into `_k` suffixes.
pub fn rectify(f: &Formula) -> Formula {
    let mut names = FreshNameSource::new(free_vars(f).into_iter().map(|v| v.name));
    rectify_inner(f, &mut names, &BTreeMap::new())
}

fn rectify_inner(
    f: &Formula,
    names: &mut FreshNameSource,
    env: &BTreeMap<String, String>,
) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(p, args) => Formula::Atom(
            p.clone(),
            args.iter().map(|t| rename_term(t, env)).collect(),
        ),
        Formula::Not(g) => Formula::not(rectify_inner(g, names, env)),
        Formula::And(a, b) => Formula::and(
            rectify_inner(a, names, env),
            rectify_inner(b, names, env),
        ),
        Formula::Or(a, b) => Formula::or(
            rectify_inner(a, names, env),
            rectify_inner(b, names, env),
        ),
        Formula::Implies(a, b) => Formula::implies(
            rectify_inner(a, names, env),
            rectify_inner(b, names, env),
        ),
        Formula::Iff(a, b) => Formula::iff(
            rectify_inner(a, names, env),
            rectify_inner(b, names, env),
        ),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let fresh = names.fresh(&v.name);
            let mut inner_env = env.clone();
            inner_env.insert(v.name.clone(), fresh.clone());
            let body = rectify_inner(body, names, &inner_env);
            let bound = Symbol::variable(fresh);
            match f {
                Formula::Exists(..) => Formula::exists(bound, body),
                _ => Formula::forall(bound, body),
            }
        }
    }
}

fn rename_term(t: &Term, env: &BTreeMap<String, String>) -> Term {
    match t {
        Term::Var(v) => match env.get(&v.name) {
            Some(new_name) => Term::Var(Symbol::variable(new_name.clone())),
            None => t.clone(),
        },
        Term::Num(_) => t.clone(),
        Term::Apply(f, args) => Term::Apply(
            f.clone(),
            args.iter().map(|a| rename_term(a, env)).collect(),
        ),
    }
}

/// Negation normal form: negations pushed onto atoms, `implies`/`iff`
/// eliminated, quantifiers dualized under negation.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf_pos(f)
}

fn nnf_pos(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(..) => f.clone(),
        Formula::Not(g) => nnf_neg(g),
        Formula::And(a, b) => Formula::and(nnf_pos(a), nnf_pos(b)),
        Formula::Or(a, b) => Formula::or(nnf_pos(a), nnf_pos(b)),
        Formula::Implies(a, b) => Formula::or(nnf_neg(a), nnf_pos(b)),
        Formula::Iff(a, b) => Formula::and(
            Formula::or(nnf_neg(a), nnf_pos(b)),
            Formula::or(nnf_neg(b), nnf_pos(a)),
        ),
        Formula::Exists(v, body) => Formula::exists(v.clone(), nnf_pos(body)),
        Formula::Forall(v, body) => Formula::forall(v.clone(), nnf_pos(body)),
    }
}

/// Negation normal form of `¬f`.
fn nnf_neg(f: &Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Atom(..) => Formula::not(f.clone()),
        Formula::Not(g) => nnf_pos(g),
        Formula::And(a, b) => Formula::or(nnf_neg(a), nnf_neg(b)),
        Formula::Or(a, b) => Formula::and(nnf_neg(a), nnf_neg(b)),
        Formula::Implies(a, b) => Formula::and(nnf_pos(a), nnf_neg(b)),
        Formula::Iff(a, b) => Formula::and(
            Formula::or(nnf_pos(a), nnf_pos(b)),
            Formula::or(nnf_neg(a), nnf_neg(b)),
        ),
        Formula::Exists(v, body) => Formula::forall(v.clone(), nnf_neg(body)),
        Formula::Forall(v, body) => Formula::exists(v.clone(), nnf_neg(body)),
    }
}

/// Prenex normal form: rectify, convert to NNF, then hoist quantifiers
/// left to right. The result is one canonical prefix among the legal
/// prenex forms, fixed so downstream dependency sets are reproducible.
///
/// `iff` is expanded into two implications by the NNF step, which copies
/// any quantifier under it into both arms; the copies are re-rectified
/// before hoisting, so prefixes stay well formed at the cost of a larger
/// prefix than the source had.
pub fn to_prenex(f: &Formula) -> PrenexFormula {
    let original_free = free_vars(f);
    let rectified = rectify(f);
    let nnf = to_nnf(&rectified);
    // NNF may have duplicated binders (iff expansion); restore uniqueness.
    let nnf = rectify(&nnf);
    let mut prefix = Vec::new();
    let matrix = hoist(&nnf, &mut prefix);
    PrenexFormula {
        prefix,
        matrix,
        free_vars: original_free,
    }
}

fn hoist(f: &Formula, prefix: &mut Vec<(Quantifier, Symbol)>) -> Formula {
    match f {
        Formula::Exists(v, body) => {
            prefix.push((Quantifier::Exists, v.clone()));
            hoist(body, prefix)
        }
        Formula::Forall(v, body) => {
            prefix.push((Quantifier::Forall, v.clone()));
            hoist(body, prefix)
        }
        Formula::And(a, b) => {
            let a = hoist(a, prefix);
            let b = hoist(b, prefix);
            Formula::and(a, b)
        }
        Formula::Or(a, b) => {
            let a = hoist(a, prefix);
            let b = hoist(b, prefix);
            Formula::or(a, b)
        }
        // NNF leaves: atoms, constants, negated atoms.
        _ => f.clone(),
    }
}

/// Conjunctive normal form of a quantifier-free formula, by distribution.
/// No auxiliary variables are introduced, so the result is equivalent
/// (not merely equisatisfiable); the price is worst-case exponential size.
///
/// Panics if `m` contains quantifiers.
pub fn to_cnf_matrix(m: &Formula) -> Formula {
    assert!(m.is_quantifier_free(), "CNF is defined on matrices only");
    cnf(to_nnf(m))
}

fn cnf(f: Formula) -> Formula {
    match f {
        Formula::And(a, b) => Formula::and(cnf(*a), cnf(*b)),
        Formula::Or(a, b) => distribute(cnf(*a), cnf(*b)),
        leaf => leaf,
    }
}

fn distribute(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::And(a1, a2), b) => {
            Formula::and(distribute(*a1, b.clone()), distribute(*a2, b))
        }
        (a, Formula::And(b1, b2)) => {
            Formula::and(distribute(a.clone(), *b1), distribute(a, *b2))
        }
        (a, b) => Formula::or(a, b),
    }
}
