//! Skolem functions you can run.
//!
//! This crate Skolemizes first-order formulas and then actually
//! computes the resulting Skolem functions, one argument tuple at a
//! time, over decidable theories with enumerable domains: finite
//! structures, dense linear orders without endpoints, natural-number
//! linear arithmetic, and rational linear arithmetic. The recipe is
//! always decide-then-enumerate — ask the theory's decision procedure
//! whether a witness exists, then walk a fixed enumeration of the
//! domain to the first value that works, falling back to a fixed
//! default when nothing does.
//!
//! The pieces:
//!
//! - [`syntax`]: an s-expression reader and printer for formulas,
//!   terms, and finite structures.
//! - [`logic`]: formulas, prenex normal form, valuations, finite
//!   structures, and evaluation over them.
//! - [`transform`]: rectification, negation normal form, prenexing,
//!   and a CNF matrix converter.
//! - [`skolemize`]: the syntactic transformation itself, producing a
//!   declaration per existential plus the rewritten matrix.
//! - [`theories`]: the four theories behind one [`theories::Theory`]
//!   trait — decision procedures (model checking, bound-pair
//!   elimination, Cooper's method, Ferrante–Rackoff) and domain
//!   enumerations.
//! - [`synthesis`]: the pointwise Skolem-function evaluator and a
//!   sampling checker for the substitution guarantee.
//! - [`demos`]: two smaller searches in the same style — a
//!   target-string correspondence problem and bounded root search for
//!   integer polynomials.
//!
//! ```
//! use std::sync::Arc;
//!
//! use skolem_forge::logic::DomainElement;
//! use skolem_forge::syntax::{parse_formula, SourceText};
//! use skolem_forge::synthesis::synthesize;
//! use skolem_forge::theories::theory_by_name;
//!
//! let f = parse_formula(&SourceText::inline(
//!     "(forall (x y) (exists (z) (implies (< x y) (and (< x z) (< z y)))))",
//! ))?;
//! let evaluator = synthesize(Arc::from(theory_by_name("dlo", None)?), &f)?;
//! let z = evaluator.skolem_eval(
//!     "F_z",
//!     &[DomainElement::rat(0, 1), DomainElement::rat(1, 1)],
//! )?;
//! assert_eq!(z, DomainElement::rat(1, 2));
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod demos;
pub mod logic;
mod par;
pub mod skolemize;
pub mod synthesis;
pub mod syntax;
pub mod theories;
pub mod transform;

pub use logic::{DomainElement, Formula, PrenexFormula, Symbol, Term, Valuation};
pub use skolemize::{skolemize, SkolemDecl, SkolemSystem};
pub use synthesis::{synthesize, CheckReport, SkolemEvaluator, WitnessOutcome};
pub use syntax::{parse_formula, parse_structure, print_formula, SourceText};
pub use theories::{theory_by_name, Theory, TheoryError};
pub use transform::to_prenex;
