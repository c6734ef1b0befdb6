//! Finite structures as a decidable theory: the decision procedure is
//! plain model checking over an explicitly tabled universe.

use crate::logic::{FiniteStructure, Formula, Symbol, Term, Valuation};

use super::{enumerate::enum_fin, require_sentence, Theory, TheoryError};
use crate::logic::DomainElement;

/// A decidable theory whose models are one fixed finite structure.
pub struct FiniteTheory {
    structure: FiniteStructure,
}

impl FiniteTheory {
    pub fn new(structure: FiniteStructure) -> Self {
        FiniteTheory { structure }
    }

    pub fn structure(&self) -> &FiniteStructure {
        &self.structure
    }
}

/// Decide a sentence by exhaustive evaluation in `structure`.
pub fn finite_decide(
    structure: &FiniteStructure,
    sentence: &Formula,
) -> Result<bool, TheoryError> {
    require_sentence(sentence)?;
    Ok(crate::logic::finite_eval(
        structure,
        &Valuation::new(),
        sentence,
    )?)
}

impl Theory for FiniteTheory {
    fn name(&self) -> &'static str {
        "finite"
    }

    fn check_language(&self, f: &Formula) -> Result<(), TheoryError> {
        for sym in f.signature_symbols() {
            if sym.name == "=" {
                continue;
            }
            if !self.structure.has_symbol(&sym.name) {
                return Err(TheoryError::UnsupportedSymbol(sym.name));
            }
        }
        Ok(())
    }

    fn decide(&self, sentence: &Formula) -> Result<bool, TheoryError> {
        finite_decide(&self.structure, sentence)
    }

    fn enum_domain(&self, k: usize) -> Option<DomainElement> {
        enum_fin(self.structure.universe_size(), k)
    }

    fn domain_size(&self) -> Option<usize> {
        Some(self.structure.universe_size())
    }

    fn eval_ground_atom(&self, p: &Symbol, args: &[Term]) -> Result<bool, TheoryError> {
        let atom = Formula::Atom(p.clone(), args.to_vec());
        Ok(crate::logic::eval_qf(
            &self.structure,
            &Valuation::new(),
            &atom,
        )?)
    }
}
