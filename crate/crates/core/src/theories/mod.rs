//! The theory contract and its four instances.
//!
//! A [`Theory`] bundles what the synthesis engine needs: a total decision
//! procedure for sentences of the theory's language (extended with
//! domain-element literals), a fixed recursive enumeration of the domain,
//! and computable interpretations of the predicate symbols. Instances:
//! dense linear orders without endpoints (`dlo`), natural-number linear
//! arithmetic (`presburger`), linear rational arithmetic (`lra`), and
//! explicitly tabled finite structures (`finite`).

pub mod dlo;
pub mod enumerate;
pub mod finite;
mod linexpr;
pub mod lra;
pub mod presburger;

use std::fmt;

use num::{BigRational, Signed, Zero};
use thiserror::Error;

use crate::logic::{free_vars, DomainElement, EvalError, FiniteStructure, Formula, Symbol, Term};

pub use dlo::DloTheory;
pub use finite::FiniteTheory;
pub use lra::LraTheory;
pub use presburger::PresburgerTheory;

/// Errors from decision procedures, quantifier elimination, and ground
/// evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("unknown theory `{0}` (expected finite, dlo, presburger, or lra)")]
    UnknownTheory(String),
    #[error("the finite theory needs a structure file")]
    MissingStructure,
    #[error("symbol `{0}` is not in the theory's language")]
    UnsupportedSymbol(String),
    #[error("`{0}` used with the wrong number of arguments")]
    BadArity(String),
    #[error("nonlinear term: product of two non-constant expressions")]
    NonLinear,
    #[error("expected a sentence, but these variables are free: {0}")]
    NotASentence(String),
    #[error("literal `{0}` is not a natural number")]
    NotANatural(String),
    #[error("`{0}` is not an integer")]
    NotAnInteger(String),
    #[error("divides needs a positive integer modulus, got `{0}`")]
    BadModulus(String),
    #[error("`{0}` is not ground")]
    NotGround(String),
    #[error("no Skolem function named `{0}`")]
    UnknownSkolemFunction(String),
    #[error("{0}")]
    BadArguments(String),
    #[error("quantifier elimination is not available for the {0} theory; use decide")]
    NoQuantifierElimination(&'static str),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// One quantifier-elimination step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QeStep {
    /// The variable that was eliminated.
    pub variable: Symbol,
    /// The elimination method applied.
    pub method: &'static str,
    /// Node count of the whole formula after this step.
    pub size_after: usize,
}

impl fmt::Display for QeStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "eliminate {} [{}] -> size {}",
            self.variable, self.method, self.size_after
        )
    }
}

/// Input, quantifier-free output, and the per-variable steps in between.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QeTrace {
    pub input: Formula,
    pub output: Formula,
    pub steps: Vec<QeStep>,
}

/// A decidable theory with a recursively enumerable domain and
/// computable interpretations.
pub trait Theory: Send + Sync {
    /// `finite`, `dlo`, `presburger`, or `lra`.
    fn name(&self) -> &'static str;

    /// Reject formulas outside the theory's language; domain-element
    /// literals are part of the language.
    fn check_language(&self, f: &Formula) -> Result<(), TheoryError>;

    /// Total decision procedure for sentences of the language.
    fn decide(&self, sentence: &Formula) -> Result<bool, TheoryError>;

    /// The fixed enumeration of the domain; `None` only past the end of
    /// a finite universe.
    fn enum_domain(&self, k: usize) -> Option<DomainElement>;

    /// Universe size for finite domains, `None` for infinite ones.
    fn domain_size(&self) -> Option<usize> {
        None
    }

    /// Evaluate one atom whose arguments are all ground.
    fn eval_ground_atom(&self, p: &Symbol, args: &[Term]) -> Result<bool, TheoryError>;
}

/// Look up a theory by name; `finite` requires its structure.
pub fn theory_by_name(
    name: &str,
    structure: Option<FiniteStructure>,
) -> Result<Box<dyn Theory>, TheoryError> {
    match name {
        "dlo" => Ok(Box::new(DloTheory)),
        "presburger" => Ok(Box::new(PresburgerTheory)),
        "lra" => Ok(Box::new(LraTheory)),
        "finite" => match structure {
            Some(s) => Ok(Box::new(FiniteTheory::new(s))),
            None => Err(TheoryError::MissingStructure),
        },
        other => Err(TheoryError::UnknownTheory(other.to_string())),
    }
}

/// Quantifier elimination for the theory named `name`.
pub fn qe_for(name: &str, f: &Formula) -> Result<QeTrace, TheoryError> {
    let trace = match name {
        "dlo" => dlo::dlo_qe(f),
        "presburger" => presburger::cooper_qe(f),
        "lra" => lra::fr_qe(f),
        "finite" => Err(TheoryError::NoQuantifierElimination("finite")),
        other => Err(TheoryError::UnknownTheory(other.to_string())),
    }?;
    log::debug!(
        "qe[{name}]: {} step(s), result size {}",
        trace.steps.len(),
        trace.output.size()
    );
    Ok(trace)
}

/// Guard shared by every `decide`: the input must be a sentence.
pub(crate) fn require_sentence(f: &Formula) -> Result<(), TheoryError> {
    let fv = free_vars(f);
    if fv.is_empty() {
        return Ok(());
    }
    let names: Vec<String> = fv.into_iter().map(|v| v.name).collect();
    Err(TheoryError::NotASentence(names.join(", ")))
}

/// Exact value of a ground arithmetic term.
pub(crate) fn ground_value(t: &Term) -> Result<BigRational, TheoryError> {
    match t {
        Term::Num(q) => Ok(q.clone()),
        Term::Var(v) => Err(TheoryError::NotGround(v.name.clone())),
        Term::Apply(f, args) => match f.name.as_str() {
            "+" if args.len() == 2 => {
                Ok(ground_value(&args[0])? + ground_value(&args[1])?)
            }
            "*" if args.len() == 2 => {
                Ok(ground_value(&args[0])? * ground_value(&args[1])?)
            }
            "+" | "*" => Err(TheoryError::BadArity(f.name.clone())),
            other => Err(TheoryError::UnsupportedSymbol(other.to_string())),
        },
    }
}

/// Ground `<` and `=` over exact rationals — the interpretations shared
/// by the order and arithmetic theories.
pub(crate) fn rational_ground_atom(
    p: &Symbol,
    args: &[Term],
) -> Result<bool, TheoryError> {
    match p.name.as_str() {
        "<" if args.len() == 2 => {
            Ok(ground_value(&args[0])? < ground_value(&args[1])?)
        }
        "=" if args.len() == 2 => {
            Ok(ground_value(&args[0])? == ground_value(&args[1])?)
        }
        "<" | "=" => Err(TheoryError::BadArity(p.name.clone())),
        other => Err(TheoryError::UnsupportedSymbol(other.to_string())),
    }
}

/// Truth of a variable-free formula, given an evaluator for its atoms.
pub(crate) fn decide_ground(
    f: &Formula,
    eval: &impl Fn(&Symbol, &[Term]) -> Result<bool, TheoryError>,
) -> Result<bool, TheoryError> {
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Atom(p, args) => eval(p, args),
        Formula::Not(g) => Ok(!decide_ground(g, eval)?),
        Formula::And(a, b) => Ok(decide_ground(a, eval)? && decide_ground(b, eval)?),
        Formula::Or(a, b) => Ok(decide_ground(a, eval)? || decide_ground(b, eval)?),
        Formula::Implies(a, b) => Ok(!decide_ground(a, eval)? || decide_ground(b, eval)?),
        Formula::Iff(a, b) => Ok(decide_ground(a, eval)? == decide_ground(b, eval)?),
        Formula::Exists(..) | Formula::Forall(..) => {
            Err(TheoryError::NotGround("quantified subformula".into()))
        }
    }
}

/// Fold boolean constants bottom-up. Quantifiers over `true`/`false`
/// collapse too, which is sound because every supported domain is
/// nonempty.
pub(crate) fn simplify_bools(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(..) => f.clone(),
        Formula::Not(g) => match simplify_bools(g) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            g => Formula::not(g),
        },
        Formula::And(a, b) => match (simplify_bools(a), simplify_bools(b)) {
            (Formula::False, _) | (_, Formula::False) => Formula::False,
            (Formula::True, g) | (g, Formula::True) => g,
            (a, b) if a == b => a,
            (a, b) => Formula::and(a, b),
        },
        Formula::Or(a, b) => match (simplify_bools(a), simplify_bools(b)) {
            (Formula::True, _) | (_, Formula::True) => Formula::True,
            (Formula::False, g) | (g, Formula::False) => g,
            (a, b) if a == b => a,
            (a, b) => Formula::or(a, b),
        },
        Formula::Implies(a, b) => match (simplify_bools(a), simplify_bools(b)) {
            (Formula::False, _) | (_, Formula::True) => Formula::True,
            (Formula::True, g) => g,
            (g, Formula::False) => Formula::not(g),
            (a, b) if a == b => Formula::True,
            (a, b) => Formula::implies(a, b),
        },
        Formula::Iff(a, b) => match (simplify_bools(a), simplify_bools(b)) {
            (Formula::True, g) | (g, Formula::True) => g,
            (Formula::False, g) | (g, Formula::False) => simplify_bools(&Formula::not(g)),
            (a, b) if a == b => Formula::True,
            (a, b) => Formula::iff(a, b),
        },
        Formula::Exists(v, body) => match simplify_bools(body) {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            g => Formula::exists(v.clone(), g),
        },
        Formula::Forall(v, body) => match simplify_bools(body) {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            g => Formula::forall(v.clone(), g),
        },
    }
}

/// Rewrite a quantifier-free NNF formula over a total order so no
/// negations remain: `not(a < b)` becomes `(b < a or a = b)` and
/// `not(a = b)` becomes `(a < b or b < a)`.
pub(crate) fn positivize_order(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(..) => f.clone(),
        Formula::Not(g) => match g.as_ref() {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(p, args) if p.name == "<" => Formula::or(
                Formula::atom(p.clone(), vec![args[1].clone(), args[0].clone()]),
                Formula::atom(
                    Symbol::predicate("=", 2),
                    vec![args[0].clone(), args[1].clone()],
                ),
            ),
            Formula::Atom(p, args) if p.name == "=" => Formula::or(
                Formula::atom(
                    Symbol::predicate("<", 2),
                    vec![args[0].clone(), args[1].clone()],
                ),
                Formula::atom(
                    Symbol::predicate("<", 2),
                    vec![args[1].clone(), args[0].clone()],
                ),
            ),
            other => unreachable!("negation left on non-atom after NNF: {other}"),
        },
        Formula::And(a, b) => Formula::and(positivize_order(a), positivize_order(b)),
        Formula::Or(a, b) => Formula::or(positivize_order(a), positivize_order(b)),
        other => unreachable!("connective not in NNF: {other}"),
    }
}

/// Rewrite atoms bottom-up: `rw` returns `Some(replacement)` to rewrite
/// an atom, `None` to keep it.
pub(crate) fn fold_atoms(
    f: &Formula,
    rw: &impl Fn(&Symbol, &[Term]) -> Option<Formula>,
) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(p, args) => rw(p, args).unwrap_or_else(|| f.clone()),
        Formula::Not(g) => Formula::not(fold_atoms(g, rw)),
        Formula::And(a, b) => Formula::and(fold_atoms(a, rw), fold_atoms(b, rw)),
        Formula::Or(a, b) => Formula::or(fold_atoms(a, rw), fold_atoms(b, rw)),
        Formula::Implies(a, b) => Formula::implies(fold_atoms(a, rw), fold_atoms(b, rw)),
        Formula::Iff(a, b) => Formula::iff(fold_atoms(a, rw), fold_atoms(b, rw)),
        Formula::Exists(v, body) => Formula::exists(v.clone(), fold_atoms(body, rw)),
        Formula::Forall(v, body) => Formula::forall(v.clone(), fold_atoms(body, rw)),
    }
}

fn term_is_ground(t: &Term) -> bool {
    match t {
        Term::Num(_) => true,
        Term::Var(_) => false,
        Term::Apply(_, args) => args.iter().all(term_is_ground),
    }
}

/// Replace every variable-free atom with its truth value under `eval`;
/// atoms `eval` cannot interpret are kept as written.
pub(crate) fn fold_ground_atoms(
    f: &Formula,
    eval: &impl Fn(&Symbol, &[Term]) -> Result<bool, TheoryError>,
) -> Formula {
    fold_atoms(f, &|p, args| {
        if !args.iter().all(term_is_ground) {
            return None;
        }
        match eval(p, args) {
            Ok(true) => Some(Formula::True),
            Ok(false) => Some(Formula::False),
            Err(_) => None,
        }
    })
}

/// Positive-integer check for `divides` moduli.
pub(crate) fn modulus_value(t: &Term) -> Result<num::BigInt, TheoryError> {
    match t {
        Term::Num(q) if q.is_integer() && q.is_positive() => Ok(q.to_integer()),
        other => Err(TheoryError::BadModulus(other.to_string())),
    }
}

/// Integer check for `divides` dividends.
pub(crate) fn integer_value(q: &BigRational) -> Result<num::BigInt, TheoryError> {
    if q.is_integer() {
        Ok(q.to_integer())
    } else {
        Err(TheoryError::NotAnInteger(q.to_string()))
    }
}

/// Shared `divides` interpretation: `d | t` over the integers.
pub(crate) fn divides_ground(d: &Term, t: &Term) -> Result<bool, TheoryError> {
    let d = modulus_value(d)?;
    let t = integer_value(&ground_value(t)?)?;
    Ok((t % d).is_zero())
}
