//! Pointwise computation of Skolem functions, and the checker for the
//! Skolemization guarantee.
//!
//! For a decidable theory with an enumerable domain, every Skolem
//! function of a formula is computable one argument tuple at a time:
//! ground the formula at the arguments, ask the decision procedure
//! whether a witness exists at all, and if so walk the domain
//! enumeration until the first witness appears; if not, return the
//! first enumerated element as a fixed default. [`check_equiv`] then
//! samples argument tuples and verifies that plugging the computed
//! values in preserves truth exactly.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::logic::{
    free_vars, substitute, DomainElement, Formula, PrenexFormula, Quantifier, Symbol, Valuation,
};
use crate::par::map_indexed;
use crate::skolemize::{skolemize, SkolemDecl, SkolemSystem};
use crate::theories::enumerate::diagonal_tuple;
use crate::theories::{Theory, TheoryError};
use crate::transform::to_prenex;

/// The value of one Skolem function application, with the flag that
/// distinguishes a genuine witness from the no-witness default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessOutcome {
    pub value: DomainElement,
    /// False only when no witness exists and the first enumerated
    /// element was returned as the default.
    pub witnessed: bool,
}

/// One sample where the existential truth and the computed-value truth
/// disagreed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckFailure {
    pub valuation: Valuation,
    pub lhs: bool,
    pub rhs: bool,
}

/// Outcome of sampling the Skolemization guarantee.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub samples_checked: usize,
    pub failures: Vec<CheckFailure>,
    /// True when the sample space was the whole (finite) domain.
    pub exhaustive: bool,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Evaluates the Skolem functions of one formula over one theory.
///
/// Immutable after construction; evaluation is deterministic, so
/// concurrent use is safe.
pub struct SkolemEvaluator {
    theory: Arc<dyn Theory>,
    prenex: PrenexFormula,
    system: SkolemSystem,
    /// Index of each decl's target variable in the prenex prefix.
    positions: Vec<usize>,
    sabotage: bool,
}

/// Build an evaluator: check the language, normalize to prenex form,
/// and Skolemize.
pub fn synthesize(
    theory: Arc<dyn Theory>,
    f: &Formula,
) -> Result<SkolemEvaluator, TheoryError> {
    theory.check_language(f)?;
    let prenex = to_prenex(f);
    let system = skolemize(&prenex);
    let positions = system
        .decls
        .iter()
        .map(|d| {
            prenex
                .prefix
                .iter()
                .position(|(_, v)| v == &d.target_var)
                .expect("decl target is in the prefix")
        })
        .collect();
    Ok(SkolemEvaluator {
        theory,
        prenex,
        system,
        positions,
        sabotage: false,
    })
}

impl SkolemEvaluator {
    pub fn theory(&self) -> &dyn Theory {
        self.theory.as_ref()
    }

    pub fn prenex(&self) -> &PrenexFormula {
        &self.prenex
    }

    pub fn system(&self) -> &SkolemSystem {
        &self.system
    }

    pub fn decls(&self) -> &[SkolemDecl] {
        &self.system.decls
    }

    pub fn decl(&self, name: &str) -> Option<&SkolemDecl> {
        self.system.decls.iter().find(|d| d.symbol.name == name)
    }

    /// Deliberately return wrong values (the no-witness default for
    /// every call) so tests can confirm the checker catches lies.
    pub fn set_sabotage(&mut self, on: bool) {
        self.sabotage = on;
    }

    fn first_element(&self) -> DomainElement {
        self.theory.enum_domain(0).expect("domains are nonempty")
    }

    fn validate_arg(&self, name: &str, v: &DomainElement) -> Result<(), TheoryError> {
        let sample = self.first_element();
        if std::mem::discriminant(v) != std::mem::discriminant(&sample) {
            return Err(TheoryError::BadArguments(format!(
                "`{name}`: value {v} is not an element of the {} domain",
                self.theory.name()
            )));
        }
        if let (DomainElement::Fin(i), Some(size)) = (v, self.theory.domain_size()) {
            if *i >= size {
                return Err(TheoryError::BadArguments(format!(
                    "`{name}`: element #{i} is outside the universe of size {size}"
                )));
            }
        }
        Ok(())
    }

    /// The residual formula for the decl at `idx`: quantifiers strictly
    /// right of its target are kept, everything bound earlier is
    /// replaced by its value in `nu`. Only the target stays free.
    fn residual(&self, idx: usize, nu: &Valuation) -> Formula {
        let pos = self.positions[idx];
        let mut f = self.prenex.matrix.clone();
        for (q, v) in self.prenex.prefix[pos + 1..].iter().rev() {
            f = match q {
                Quantifier::Forall => Formula::forall(v.clone(), f),
                Quantifier::Exists => Formula::exists(v.clone(), f),
            };
        }
        for (v, value) in nu.iter() {
            f = substitute(&f, v, &value.to_term());
        }
        f
    }

    /// Decide-then-enumerate for one decl, given values for its deps
    /// and for every existential left of it.
    fn eval_one(&self, idx: usize, nu: &Valuation) -> Result<WitnessOutcome, TheoryError> {
        if self.sabotage {
            return Ok(WitnessOutcome {
                value: self.first_element(),
                witnessed: true,
            });
        }
        let target = &self.system.decls[idx].target_var;
        let residual = self.residual(idx, nu);
        debug_assert!(
            free_vars(&residual).iter().all(|v| v == target),
            "residual must only have the target free"
        );

        // Step A: is there any witness at all?
        let feasible = self
            .theory
            .decide(&Formula::exists(target.clone(), residual.clone()))?;
        if !feasible {
            // Step C: fixed default.
            log::debug!("{target}: no witness, returning the default element");
            return Ok(WitnessOutcome {
                value: self.first_element(),
                witnessed: false,
            });
        }
        // Step B: first witness in enumeration order. Termination is
        // guaranteed: the enumeration covers the domain and step A
        // affirmed a witness exists.
        for k in 0.. {
            let Some(candidate) = self.theory.enum_domain(k) else {
                unreachable!("enumeration exhausted after a positive feasibility decision")
            };
            let grounded = substitute(&residual, target, &candidate.to_term());
            if self.theory.decide(&grounded)? {
                log::debug!("{target}: witness {candidate} at enumeration index {k}");
                return Ok(WitnessOutcome {
                    value: candidate,
                    witnessed: true,
                });
            }
        }
        unreachable!()
    }

    /// Evaluate the chain of decls left of `t` (prefix closure), then
    /// the decl itself.
    fn eval_chain(&self, t: usize, base: &Valuation) -> Result<WitnessOutcome, TheoryError> {
        let mut nu = base.clone();
        for i in 0..t {
            let w = self.eval_one(i, &nu)?;
            nu.insert(self.system.decls[i].target_var.clone(), w.value);
        }
        self.eval_one(t, &nu)
    }

    /// Compute one Skolem function at one argument tuple, reporting
    /// whether the result is a genuine witness.
    pub fn eval_detailed(
        &self,
        name: &str,
        args: &[DomainElement],
    ) -> Result<WitnessOutcome, TheoryError> {
        let Some(t) = self
            .system
            .decls
            .iter()
            .position(|d| d.symbol.name == name)
        else {
            return Err(TheoryError::UnknownSkolemFunction(name.to_string()));
        };
        let decl = &self.system.decls[t];
        if args.len() != decl.deps.len() {
            return Err(TheoryError::BadArguments(format!(
                "`{name}` takes {} argument(s), got {}",
                decl.deps.len(),
                args.len()
            )));
        }
        for v in args {
            self.validate_arg(name, v)?;
        }
        let base: Valuation = decl.deps.iter().cloned().zip(args.iter().cloned()).collect();
        self.eval_chain(t, &base)
    }

    /// Compute one Skolem function at one argument tuple.
    pub fn skolem_eval(
        &self,
        name: &str,
        args: &[DomainElement],
    ) -> Result<DomainElement, TheoryError> {
        Ok(self.eval_detailed(name, args)?.value)
    }

    /// The sampling dimensions of the guarantee check: free variables,
    /// then every universal in prefix order.
    fn check_dims(&self) -> Vec<Symbol> {
        let mut dims = self.prenex.free_vars.clone();
        for (q, v) in &self.prenex.prefix {
            if *q == Quantifier::Forall {
                dims.push(v.clone());
            }
        }
        dims
    }

    fn sample_valuation(&self, dims: &[Symbol], k: usize) -> Valuation {
        match self.theory.domain_size() {
            Some(size) => {
                // Mixed-radix decode of k over the finite universe.
                let mut nu = Valuation::new();
                let mut rest = k;
                for v in dims {
                    let element = self
                        .theory
                        .enum_domain(rest % size)
                        .expect("index below universe size");
                    nu.insert(v.clone(), element);
                    rest /= size;
                }
                nu
            }
            None => {
                let indices = diagonal_tuple(dims.len(), k);
                dims.iter()
                    .zip(indices)
                    .map(|(v, i)| {
                        (
                            v.clone(),
                            self.theory.enum_domain(i).expect("infinite domain"),
                        )
                    })
                    .collect()
            }
        }
    }

    /// Check one sampled valuation; `Some` is a disagreement.
    fn check_sample(&self, sigma: Valuation) -> Result<Option<CheckFailure>, TheoryError> {
        let Some(t) = self.system.decls.len().checked_sub(1) else {
            // No existentials: both sides are the same ground matrix.
            let mut g = self.prenex.matrix.clone();
            for (v, value) in sigma.iter() {
                g = substitute(&g, v, &value.to_term());
            }
            self.theory.decide(&g)?;
            return Ok(None);
        };

        // Values for every existential left of the last one.
        let mut nu = sigma.clone();
        for i in 0..t {
            let w = self.eval_one(i, &nu)?;
            nu.insert(self.system.decls[i].target_var.clone(), w.value);
        }

        let target = self.system.decls[t].target_var.clone();
        let residual = self.residual(t, &nu);
        let lhs = self
            .theory
            .decide(&Formula::exists(target.clone(), residual.clone()))?;
        let computed = self.eval_one(t, &nu)?;
        let rhs = self
            .theory
            .decide(&substitute(&residual, &target, &computed.value.to_term()))?;
        if lhs == rhs {
            Ok(None)
        } else {
            Ok(Some(CheckFailure {
                valuation: sigma,
                lhs,
                rhs,
            }))
        }
    }

    fn check_equiv_impl(
        &self,
        budget: usize,
        parallel: bool,
    ) -> Result<CheckReport, TheoryError> {
        let dims = self.check_dims();
        let (total, exhaustive) = match self.theory.domain_size() {
            Some(size) => {
                let total = size.checked_pow(dims.len() as u32).ok_or_else(|| {
                    TheoryError::BadArguments(
                        "exhaustive sample space is too large".to_string(),
                    )
                })?;
                (total, true)
            }
            None if dims.is_empty() => (1, false),
            None => (budget.max(1), false),
        };
        let outcomes = map_indexed(total, parallel, |k| {
            self.check_sample(self.sample_valuation(&dims, k))
        });
        let mut failures = vec![];
        for outcome in outcomes {
            if let Some(failure) = outcome? {
                failures.push(failure);
            }
        }
        Ok(CheckReport {
            samples_checked: total,
            failures,
            exhaustive,
        })
    }

    /// Sample the guarantee that substituting computed Skolem values
    /// preserves truth: exhaustive over finite domains, the first
    /// `budget` diagonal tuples otherwise.
    pub fn check_equiv(&self, budget: usize) -> Result<CheckReport, TheoryError> {
        self.check_equiv_impl(budget, true)
    }

    /// Sequential variant of [`check_equiv`](Self::check_equiv), for
    /// comparison benchmarks.
    pub fn check_equiv_seq(&self, budget: usize) -> Result<CheckReport, TheoryError> {
        self.check_equiv_impl(budget, false)
    }

    /// Indices below the witness all fail — the minimality property of
    /// the enumeration scan, re-derived for tests and audits.
    pub fn witness_index(
        &self,
        name: &str,
        args: &[DomainElement],
    ) -> Result<Option<usize>, TheoryError> {
        let outcome = self.eval_detailed(name, args)?;
        if !outcome.witnessed {
            return Ok(None);
        }
        for k in 0.. {
            match self.theory.enum_domain(k) {
                Some(e) if e == outcome.value => return Ok(Some(k)),
                Some(_) => continue,
                None => return Ok(None),
            }
        }
        unreachable!()
    }
}

/// Names of the Skolem symbols, useful for quick displays.
pub fn decl_names(system: &SkolemSystem) -> BTreeSet<String> {
    system
        .decls
        .iter()
        .map(|d| d.symbol.name.clone())
        .collect()
}
