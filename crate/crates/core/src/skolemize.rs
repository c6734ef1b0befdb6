//! Skolemization of prenex formulas: each existential variable `a` is
//! replaced by a fresh function symbol applied to the free variables and
//! the universals quantified to its left; existential quantifiers are
//! then dropped, leaving an all-universal prefix.

use crate::logic::{free_vars, substitute, PrenexFormula, Quantifier, Symbol, Term};
use crate::transform::{to_cnf_matrix, FreshNameSource};

/// One eliminated existential and the symbol that replaced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkolemDecl {
    /// The fresh function symbol (a constant when `deps` is empty).
    pub symbol: Symbol,
    /// The existential variable it replaced.
    pub target_var: Symbol,
    /// Arguments of the symbol: free variables first, then the universal
    /// variables quantified left of the target, in prefix order.
    pub deps: Vec<Symbol>,
    /// Existential variables quantified left of the target, in prefix
    /// order; evaluation of this symbol must fix their values first.
    pub left_existentials: Vec<Symbol>,
}

impl SkolemDecl {
    /// `true` when the symbol is a Skolem constant.
    pub fn is_constant(&self) -> bool {
        self.deps.is_empty()
    }
}

/// Result of Skolemizing a prenex formula: the introduced declarations in
/// prefix order, and the residual all-universal formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkolemSystem {
    pub decls: Vec<SkolemDecl>,
    pub skolemized: PrenexFormula,
}

/// Eliminate the existential quantifiers of `p`.
///
/// `p` must be rectified (pairwise distinct bound names, disjoint from the
/// free variables) — `to_prenex` output always is. Fresh symbols are named
/// `F_<var>` (`C_<var>` for constants), suffixed `_k` on collision with
/// anything already in the formula.
pub fn skolemize(p: &PrenexFormula) -> SkolemSystem {
    let mut reserved: Vec<String> = p
        .matrix
        .signature_symbols()
        .into_iter()
        .map(|s| s.name)
        .collect();
    reserved.extend(p.free_vars.iter().map(|v| v.name.clone()));
    reserved.extend(p.prefix.iter().map(|(_, v)| v.name.clone()));
    let mut names = FreshNameSource::new(reserved);

    let mut decls = Vec::new();
    let mut matrix = p.matrix.clone();
    let mut universals: Vec<Symbol> = Vec::new();
    let mut left_existentials: Vec<Symbol> = Vec::new();

    for (q, var) in &p.prefix {
        match q {
            Quantifier::Forall => universals.push(var.clone()),
            Quantifier::Exists => {
                let deps: Vec<Symbol> = p
                    .free_vars
                    .iter()
                    .chain(universals.iter())
                    .cloned()
                    .collect();
                let base = if deps.is_empty() {
                    format!("C_{}", var.name)
                } else {
                    format!("F_{}", var.name)
                };
                let symbol = Symbol::function(names.fresh(&base), deps.len());
                let replacement = Term::Apply(
                    symbol.clone(),
                    deps.iter().map(|d| Term::Var(d.clone())).collect(),
                );
                matrix = substitute(&matrix, var, &replacement);
                decls.push(SkolemDecl {
                    symbol,
                    target_var: var.clone(),
                    deps,
                    left_existentials: left_existentials.clone(),
                });
                left_existentials.push(var.clone());
            }
        }
    }

    SkolemSystem {
        decls,
        skolemized: PrenexFormula {
            prefix: universals
                .into_iter()
                .map(|v| (Quantifier::Forall, v))
                .collect(),
            matrix,
            free_vars: p.free_vars.clone(),
        },
    }
}

/// Convert the system's matrix to CNF; declarations are untouched.
pub fn to_skolem_normal_form(s: &SkolemSystem) -> SkolemSystem {
    SkolemSystem {
        decls: s.decls.clone(),
        skolemized: PrenexFormula {
            prefix: s.skolemized.prefix.clone(),
            matrix: to_cnf_matrix(&s.skolemized.matrix),
            free_vars: s.skolemized.free_vars.clone(),
        },
    }
}

/// Sanity check used by tests and the CLI: no eliminated variable remains
/// free in the matrix.
pub fn targets_eliminated(s: &SkolemSystem) -> bool {
    let remaining = free_vars(&s.skolemized.matrix);
    s.decls
        .iter()
        .all(|d| !remaining.contains(&d.target_var))
}
