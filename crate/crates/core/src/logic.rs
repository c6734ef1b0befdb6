//! Abstract syntax for many-sorted first-order logic, plus valuations,
//! finite structures and capture-avoiding substitution.
//!
//! Everything here is immutable after construction and safe to share
//! across threads.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use num::{BigRational, BigUint, One, Signed};
use thiserror::Error;

/// What role a symbol plays in the signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Predicate,
    Function,
    Variable,
}

/// A named symbol with a fixed kind and arity.
///
/// Variables always have arity 0; constants are functions of arity 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
    pub arity: usize,
}

impl Symbol {
    pub fn variable(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "symbol name must be nonempty");
        Symbol {
            name,
            kind: SymbolKind::Variable,
            arity: 0,
        }
    }

    pub fn predicate(name: impl Into<String>, arity: usize) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "symbol name must be nonempty");
        Symbol {
            name,
            kind: SymbolKind::Predicate,
            arity,
        }
    }

    pub fn function(name: impl Into<String>, arity: usize) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "symbol name must be nonempty");
        Symbol {
            name,
            kind: SymbolKind::Function,
            arity,
        }
    }

    pub fn is_variable(&self) -> bool {
        self.kind == SymbolKind::Variable
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// First-order terms: variables, exact numeric literals, and function
/// applications. Numeric literals embed domain elements into formulas
/// so that decision procedures can be run on instantiated matrices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Symbol),
    Num(BigRational),
    Apply(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(Symbol::variable(name))
    }

    pub fn int(n: i64) -> Self {
        Term::Num(BigRational::from_integer(n.into()))
    }

    pub fn rational(numer: i64, denom: i64) -> Self {
        Term::Num(BigRational::new(numer.into(), denom.into()))
    }

    pub fn apply(sym: Symbol, args: Vec<Term>) -> Self {
        assert_eq!(sym.arity, args.len(), "argument count must match arity");
        Term::Apply(sym, args)
    }

    /// Variables occurring in the term, in first-occurrence order.
    pub fn vars(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Symbol>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Num(_) => {}
            Term::Apply(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Num(_) => 1,
            Term::Apply(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }
}

/// First-order formulas over [`Term`]s.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Symbol, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Symbol, Box<Formula>),
    Forall(Symbol, Box<Formula>),
}

impl Formula {
    pub fn atom(sym: Symbol, args: Vec<Term>) -> Self {
        assert_eq!(sym.arity, args.len(), "argument count must match arity");
        Formula::Atom(sym, args)
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(v: Symbol, body: Formula) -> Self {
        assert!(v.is_variable(), "only variables can be bound");
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Symbol, body: Formula) -> Self {
        assert!(v.is_variable(), "only variables can be bound");
        Formula::Forall(v, Box::new(body))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(..) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Node count over the formula tree and all embedded terms.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False => 1,
            Formula::Atom(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.size(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Number of quantifier nodes in the tree.
    pub fn quantifier_count(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(..) => 0,
            Formula::Not(f) => f.quantifier_count(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.quantifier_count() + b.quantifier_count(),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_count(),
        }
    }

    /// Predicate and function symbols occurring in the formula.
    pub fn signature_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_signature(&mut out);
        out
    }

    fn collect_signature(&self, out: &mut BTreeSet<Symbol>) {
        fn term_syms(t: &Term, out: &mut BTreeSet<Symbol>) {
            match t {
                Term::Var(_) | Term::Num(_) => {}
                Term::Apply(f, args) => {
                    out.insert(f.clone());
                    for a in args {
                        term_syms(a, out);
                    }
                }
            }
        }
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(p, args) => {
                out.insert(p.clone());
                for a in args {
                    term_syms(a, out);
                }
            }
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => {
                f.collect_signature(out)
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_signature(out);
                b.collect_signature(out);
            }
        }
    }
}

/// Universal or existential quantifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantifier::Forall => f.write_str("forall"),
            Quantifier::Exists => f.write_str("exists"),
        }
    }
}

/// A formula split into a quantifier prefix and a quantifier-free matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrenexFormula {
    /// Ordered quantifier-variable pairs, outermost first.
    pub prefix: Vec<(Quantifier, Symbol)>,
    /// Quantifier-free body.
    pub matrix: Formula,
    /// Free variables of the original formula, in first-occurrence order.
    pub free_vars: Vec<Symbol>,
}

impl PrenexFormula {
    /// Rebuild the ordinary formula by re-nesting the prefix.
    pub fn to_formula(&self) -> Formula {
        let mut f = self.matrix.clone();
        for (q, v) in self.prefix.iter().rev() {
            f = match q {
                Quantifier::Forall => Formula::forall(v.clone(), f),
                Quantifier::Exists => Formula::exists(v.clone(), f),
            };
        }
        f
    }
}

/// A value of one of the three supported domains.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DomainElement {
    /// A natural number.
    Nat(BigUint),
    /// A rational, always in lowest terms with positive denominator.
    Rat(BigRational),
    /// An index into a finite universe.
    Fin(usize),
}

impl DomainElement {
    pub fn nat(n: u64) -> Self {
        DomainElement::Nat(BigUint::from(n))
    }

    pub fn rat(numer: i64, denom: i64) -> Self {
        DomainElement::Rat(BigRational::new(numer.into(), denom.into()))
    }

    /// The numeric literal that stands for this element inside a formula.
    pub fn to_term(&self) -> Term {
        match self {
            DomainElement::Nat(n) => {
                Term::Num(BigRational::from_integer(n.clone().into()))
            }
            DomainElement::Rat(q) => Term::Num(q.clone()),
            DomainElement::Fin(i) => Term::Num(BigRational::from_integer((*i).into())),
        }
    }
}

impl fmt::Display for DomainElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainElement::Nat(n) => write!(f, "{n}"),
            DomainElement::Rat(q) => write!(f, "{q}"),
            DomainElement::Fin(i) => write!(f, "#{i}"),
        }
    }
}

/// A finite map from variables to domain elements.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    bindings: BTreeMap<Symbol, DomainElement>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bind a variable, shadowing any earlier binding of the same name.
    pub fn insert(&mut self, var: Symbol, value: DomainElement) {
        self.bindings.insert(var, value);
    }

    /// A copy of this valuation with one extra binding.
    pub fn with(&self, var: Symbol, value: DomainElement) -> Self {
        let mut next = self.clone();
        next.insert(var, value);
        next
    }

    pub fn get(&self, var: &Symbol) -> Option<&DomainElement> {
        self.bindings.get(var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &DomainElement)> {
        self.bindings.iter()
    }
}

impl FromIterator<(Symbol, DomainElement)> for Valuation {
    fn from_iter<T: IntoIterator<Item = (Symbol, DomainElement)>>(iter: T) -> Self {
        Valuation {
            bindings: iter.into_iter().collect(),
        }
    }
}

/// Errors from structure construction and validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("universe size must be positive")]
    ZeroUniverse,
    #[error("tuple component out of range for symbol `{0}`")]
    TupleOutOfRange(String),
    #[error("partial function table for symbol `{0}`")]
    PartialFunctionTable(String),
    #[error("inconsistent arity for symbol `{0}`")]
    InconsistentArity(String),
    #[error("duplicate declaration of symbol `{0}`")]
    DuplicateSymbol(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct PredicateTable {
    /// None when the predicate was declared empty, so its arity is unknown.
    arity: Option<usize>,
    rows: BTreeSet<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct FunctionTable {
    arity: usize,
    rows: BTreeMap<Vec<usize>, usize>,
}

/// A finite model: universe `{0, …, n-1}` with explicit predicate and
/// function tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    universe_size: usize,
    predicates: BTreeMap<String, PredicateTable>,
    functions: BTreeMap<String, FunctionTable>,
}

impl FiniteStructure {
    pub fn new(universe_size: usize) -> Result<Self, StructureError> {
        if universe_size == 0 {
            return Err(StructureError::ZeroUniverse);
        }
        Ok(FiniteStructure {
            universe_size,
            predicates: BTreeMap::new(),
            functions: BTreeMap::new(),
        })
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    /// Declare a predicate by its satisfying tuples. An empty row set is
    /// allowed and matches any arity.
    pub fn add_predicate(
        &mut self,
        name: impl Into<String>,
        rows: Vec<Vec<usize>>,
    ) -> Result<(), StructureError> {
        let name = name.into();
        if self.predicates.contains_key(&name) || self.functions.contains_key(&name) {
            return Err(StructureError::DuplicateSymbol(name));
        }
        let mut arity = None;
        let mut set = BTreeSet::new();
        for row in rows {
            match arity {
                None => arity = Some(row.len()),
                Some(a) if a != row.len() => {
                    return Err(StructureError::InconsistentArity(name));
                }
                _ => {}
            }
            if row.iter().any(|&i| i >= self.universe_size) {
                return Err(StructureError::TupleOutOfRange(name));
            }
            set.insert(row);
        }
        self.predicates
            .insert(name, PredicateTable { arity, rows: set });
        Ok(())
    }

    /// Declare a function by a total table from argument tuples to values.
    pub fn add_function(
        &mut self,
        name: impl Into<String>,
        entries: Vec<(Vec<usize>, usize)>,
    ) -> Result<(), StructureError> {
        let name = name.into();
        if self.predicates.contains_key(&name) || self.functions.contains_key(&name) {
            return Err(StructureError::DuplicateSymbol(name));
        }
        let arity = match entries.first() {
            Some((args, _)) => args.len(),
            None => return Err(StructureError::PartialFunctionTable(name)),
        };
        let mut rows = BTreeMap::new();
        for (args, value) in entries {
            if args.len() != arity {
                return Err(StructureError::InconsistentArity(name));
            }
            if args.iter().any(|&i| i >= self.universe_size) || value >= self.universe_size {
                return Err(StructureError::TupleOutOfRange(name));
            }
            rows.insert(args, value);
        }
        let expected = self.universe_size.checked_pow(arity as u32);
        if expected != Some(rows.len()) {
            return Err(StructureError::PartialFunctionTable(name));
        }
        self.functions.insert(name, FunctionTable { arity, rows });
        Ok(())
    }

    pub fn predicate_names(&self) -> impl Iterator<Item = (&str, Option<usize>)> {
        self.predicates
            .iter()
            .map(|(n, t)| (n.as_str(), t.arity))
    }

    pub fn function_names(&self) -> impl Iterator<Item = (&str, usize)> {
        self.functions.iter().map(|(n, t)| (n.as_str(), t.arity))
    }

    pub fn predicate_rows(&self, name: &str) -> Option<impl Iterator<Item = &Vec<usize>>> {
        self.predicates.get(name).map(|t| t.rows.iter())
    }

    pub fn function_rows(
        &self,
        name: &str,
    ) -> Option<impl Iterator<Item = (&Vec<usize>, &usize)>> {
        self.functions.get(name).map(|t| t.rows.iter())
    }

    pub fn has_symbol(&self, name: &str) -> bool {
        self.predicates.contains_key(name) || self.functions.contains_key(name)
    }

    fn pred_holds(&self, sym: &Symbol, tuple: &[usize]) -> Result<bool, EvalError> {
        let table = self
            .predicates
            .get(&sym.name)
            .ok_or_else(|| EvalError::UnknownSymbol(sym.name.clone()))?;
        if let Some(a) = table.arity {
            if a != tuple.len() {
                return Err(EvalError::ArityMismatch {
                    symbol: sym.name.clone(),
                    expected: a,
                    actual: tuple.len(),
                });
            }
        }
        Ok(table.rows.contains(tuple))
    }

    fn func_apply(&self, sym: &Symbol, tuple: &[usize]) -> Result<usize, EvalError> {
        let table = self
            .functions
            .get(&sym.name)
            .ok_or_else(|| EvalError::MissingTable(sym.name.clone()))?;
        if table.arity != tuple.len() {
            return Err(EvalError::ArityMismatch {
                symbol: sym.name.clone(),
                expected: table.arity,
                actual: tuple.len(),
            });
        }
        table
            .rows
            .get(tuple)
            .copied()
            .ok_or_else(|| EvalError::MissingTable(sym.name.clone()))
    }

    /// Interpret a numeric literal as a universe index.
    fn element_from_literal(&self, q: &BigRational) -> Result<usize, EvalError> {
        if !q.denom().is_one() || q.is_negative() {
            return Err(EvalError::NotAnElement(q.to_string()));
        }
        let idx: usize = q
            .numer()
            .try_into()
            .map_err(|_| EvalError::NotAnElement(q.to_string()))?;
        if idx >= self.universe_size {
            return Err(EvalError::NotAnElement(q.to_string()));
        }
        Ok(idx)
    }
}

/// Errors raised while evaluating terms or formulas in a finite structure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("missing function table for `{0}`")]
    MissingTable(String),
    #[error("arity mismatch for `{symbol}`: expected {expected}, got {actual}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        actual: usize,
    },
    #[error("literal `{0}` does not denote a universe element")]
    NotAnElement(String),
    #[error("element is not a finite-universe index")]
    NotFinite,
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
}

/// Free variables of a formula, in first-occurrence order.
pub fn free_vars(f: &Formula) -> Vec<Symbol> {
    let mut out = Vec::new();
    let mut bound = Vec::new();
    collect_free(f, &mut bound, &mut out);
    out
}

fn collect_free(f: &Formula, bound: &mut Vec<Symbol>, out: &mut Vec<Symbol>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Atom(_, args) => {
            for t in args {
                collect_free_term(t, bound, out);
            }
        }
        Formula::Not(g) => collect_free(g, bound, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            bound.push(v.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
    }
}

fn collect_free_term(t: &Term, bound: &[Symbol], out: &mut Vec<Symbol>) {
    match t {
        Term::Var(v) => {
            if !bound.contains(v) && !out.contains(v) {
                out.push(v.clone());
            }
        }
        Term::Num(_) => {}
        Term::Apply(_, args) => {
            for a in args {
                collect_free_term(a, bound, out);
            }
        }
    }
}

/// Replace every free occurrence of `v` in `f` by `t`, renaming bound
/// variables wherever a variable of `t` would be captured.
pub fn substitute(f: &Formula, v: &Symbol, t: &Term) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(p, args) => Formula::Atom(
            p.clone(),
            args.iter().map(|a| substitute_term(a, v, t)).collect(),
        ),
        Formula::Not(g) => Formula::not(substitute(g, v, t)),
        Formula::And(a, b) => Formula::and(substitute(a, v, t), substitute(b, v, t)),
        Formula::Or(a, b) => Formula::or(substitute(a, v, t), substitute(b, v, t)),
        Formula::Implies(a, b) => Formula::implies(substitute(a, v, t), substitute(b, v, t)),
        Formula::Iff(a, b) => Formula::iff(substitute(a, v, t), substitute(b, v, t)),
        Formula::Exists(x, body) => {
            let (x, body) = substitute_under_binder(x, body, v, t);
            Formula::Exists(x, Box::new(body))
        }
        Formula::Forall(x, body) => {
            let (x, body) = substitute_under_binder(x, body, v, t);
            Formula::Forall(x, Box::new(body))
        }
    }
}

fn substitute_under_binder(x: &Symbol, body: &Formula, v: &Symbol, t: &Term) -> (Symbol, Formula) {
    if x == v {
        // v is bound here; nothing below is a free occurrence.
        return (x.clone(), body.clone());
    }
    let body_free = free_vars(body);
    if !body_free.contains(v) {
        return (x.clone(), body.clone());
    }
    if t.vars().contains(x) {
        // Capture: rename the binder before substituting.
        let mut avoid: BTreeSet<String> = body_free.iter().map(|s| s.name.clone()).collect();
        for s in t.vars() {
            avoid.insert(s.name);
        }
        avoid.insert(v.name.clone());
        let fresh = fresh_variable(&x.name, &avoid);
        let renamed = substitute(body, x, &Term::Var(fresh.clone()));
        (fresh, substitute(&renamed, v, t))
    } else {
        (x.clone(), substitute(body, v, t))
    }
}

fn substitute_term(term: &Term, v: &Symbol, t: &Term) -> Term {
    match term {
        Term::Var(x) if x == v => t.clone(),
        Term::Var(_) | Term::Num(_) => term.clone(),
        Term::Apply(f, args) => Term::Apply(
            f.clone(),
            args.iter().map(|a| substitute_term(a, v, t)).collect(),
        ),
    }
}

/// First variable named `base_k` (k = 1, 2, …) whose name avoids `avoid`.
pub fn fresh_variable(base: &str, avoid: &BTreeSet<String>) -> Symbol {
    for k in 1.. {
        let candidate = format!("{base}_{k}");
        if !avoid.contains(&candidate) {
            return Symbol::variable(candidate);
        }
    }
    unreachable!()
}

/// Evaluate a term bottom-up against a structure's function tables.
pub fn eval_term(
    s: &FiniteStructure,
    nu: &Valuation,
    t: &Term,
) -> Result<DomainElement, EvalError> {
    match t {
        Term::Var(v) => nu
            .get(v)
            .cloned()
            .ok_or_else(|| EvalError::UnboundVariable(v.name.clone())),
        Term::Num(q) => Ok(DomainElement::Fin(s.element_from_literal(q)?)),
        Term::Apply(f, args) => {
            let mut tuple = Vec::with_capacity(args.len());
            for a in args {
                tuple.push(as_index(s, &eval_term(s, nu, a)?)?);
            }
            Ok(DomainElement::Fin(s.func_apply(f, &tuple)?))
        }
    }
}

fn as_index(s: &FiniteStructure, e: &DomainElement) -> Result<usize, EvalError> {
    match e {
        DomainElement::Fin(i) if *i < s.universe_size() => Ok(*i),
        DomainElement::Fin(_) => Err(EvalError::NotAnElement(e.to_string())),
        _ => Err(EvalError::NotFinite),
    }
}

/// Truth of a quantifier-free formula in a finite structure.
pub fn eval_qf(s: &FiniteStructure, nu: &Valuation, f: &Formula) -> Result<bool, EvalError> {
    if !f.is_quantifier_free() {
        return Err(EvalError::NotQuantifierFree);
    }
    finite_eval(s, nu, f)
}

/// Truth of an arbitrary formula in a finite structure, expanding
/// quantifiers over the whole universe.
pub fn finite_eval(s: &FiniteStructure, nu: &Valuation, f: &Formula) -> Result<bool, EvalError> {
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Atom(p, args) => {
            if p.name == "=" && args.len() == 2 {
                let a = eval_term(s, nu, &args[0])?;
                let b = eval_term(s, nu, &args[1])?;
                return Ok(a == b);
            }
            let mut tuple = Vec::with_capacity(args.len());
            for a in args {
                tuple.push(as_index(s, &eval_term(s, nu, a)?)?);
            }
            s.pred_holds(p, &tuple)
        }
        Formula::Not(g) => Ok(!finite_eval(s, nu, g)?),
        Formula::And(a, b) => Ok(finite_eval(s, nu, a)? && finite_eval(s, nu, b)?),
        Formula::Or(a, b) => Ok(finite_eval(s, nu, a)? || finite_eval(s, nu, b)?),
        Formula::Implies(a, b) => Ok(!finite_eval(s, nu, a)? || finite_eval(s, nu, b)?),
        Formula::Iff(a, b) => Ok(finite_eval(s, nu, a)? == finite_eval(s, nu, b)?),
        Formula::Exists(v, body) => {
            for i in 0..s.universe_size() {
                if finite_eval(s, &nu.with(v.clone(), DomainElement::Fin(i)), body)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Forall(v, body) => {
            for i in 0..s.universe_size() {
                if !finite_eval(s, &nu.with(v.clone(), DomainElement::Fin(i)), body)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(args: Vec<Term>) -> Formula {
        Formula::atom(Symbol::predicate("P", args.len()), args)
    }

    fn lt(a: Term, b: Term) -> Formula {
        Formula::atom(Symbol::predicate("<", 2), vec![a, b])
    }

    #[test]
    fn free_vars_sentence_is_empty() {
        let f = Formula::exists(Symbol::variable("y"), p(vec![Term::var("y")]));
        assert!(free_vars(&f).is_empty());
    }

    #[test]
    fn free_vars_quantifier_free() {
        let f = lt(Term::var("x"), Term::var("y"));
        assert_eq!(
            free_vars(&f),
            vec![Symbol::variable("x"), Symbol::variable("y")]
        );
    }

    #[test]
    fn free_vars_skips_bound() {
        let f = Formula::forall(
            Symbol::variable("x"),
            lt(Term::var("x"), Term::var("y")),
        );
        assert_eq!(free_vars(&f), vec![Symbol::variable("y")]);
    }

    #[test]
    fn substitute_replaces_free_occurrence() {
        // P(a)[a := F_a(x)] = P(F_a(x))
        let f = p(vec![Term::var("a")]);
        let t = Term::apply(Symbol::function("F_a", 1), vec![Term::var("x")]);
        let got = substitute(&f, &Symbol::variable("a"), &t);
        assert_eq!(got, p(vec![t]));
    }

    #[test]
    fn substitute_avoids_capture() {
        // (forall x. x < y)[y := x] must rename the binder.
        let f = Formula::forall(
            Symbol::variable("x"),
            lt(Term::var("x"), Term::var("y")),
        );
        let got = substitute(&f, &Symbol::variable("y"), &Term::var("x"));
        match got {
            Formula::Forall(b, body) => {
                assert_ne!(b.name, "x");
                assert_eq!(
                    *body,
                    lt(Term::Var(b.clone()), Term::var("x")),
                    "bound occurrences renamed, substituted variable free"
                );
            }
            other => panic!("expected forall, got {other:?}"),
        }
    }

    #[test]
    fn substitute_identity_when_not_free() {
        let f = p(vec![Term::var("b")]);
        let got = substitute(&f, &Symbol::variable("a"), &Term::var("t"));
        assert_eq!(got, f);
    }

    #[test]
    fn substitute_self_is_identity() {
        let f = Formula::exists(
            Symbol::variable("z"),
            Formula::and(
                p(vec![Term::var("x")]),
                lt(Term::var("z"), Term::var("x")),
            ),
        );
        let got = substitute(&f, &Symbol::variable("x"), &Term::var("x"));
        assert_eq!(got, f);
    }

    #[test]
    fn fresh_free_vars_preserved() {
        // For v not free in f: free_vars(substitute(f, v, t)) = free_vars(f).
        let f = Formula::and(p(vec![Term::var("x")]), p(vec![Term::var("y")]));
        let got = substitute(&f, &Symbol::variable("w"), &Term::var("z"));
        assert_eq!(free_vars(&got), free_vars(&f));
    }

    fn two_element_structure() -> FiniteStructure {
        let mut s = FiniteStructure::new(2).unwrap();
        s.add_predicate("P", vec![vec![1]]).unwrap();
        s.add_function("g", vec![(vec![0], 1), (vec![1], 0)])
            .unwrap();
        s
    }

    #[test]
    fn eval_term_variable_lookup() {
        let s = FiniteStructure::new(3).unwrap();
        let mut nu = Valuation::new();
        nu.insert(Symbol::variable("x"), DomainElement::Fin(2));
        let got = eval_term(&s, &nu, &Term::var("x")).unwrap();
        assert_eq!(got, DomainElement::Fin(2));
    }

    #[test]
    fn eval_term_single_table_lookup() {
        let mut s = FiniteStructure::new(3).unwrap();
        s.add_function("g", vec![(vec![0], 1), (vec![1], 0), (vec![2], 0)])
            .unwrap();
        let mut nu = Valuation::new();
        nu.insert(Symbol::variable("x"), DomainElement::Fin(2));
        let g = Symbol::function("g", 1);
        let got = eval_term(&s, &nu, &Term::apply(g, vec![Term::var("x")])).unwrap();
        assert_eq!(got, DomainElement::Fin(0));
    }

    #[test]
    fn eval_term_composed_lookups() {
        // g: 0 -> 1, 1 -> 0, 2 -> 0; g(g(2)) = g(0) = 1.
        let mut s = FiniteStructure::new(3).unwrap();
        s.add_function("g", vec![(vec![0], 1), (vec![1], 0), (vec![2], 0)])
            .unwrap();
        let mut nu = Valuation::new();
        nu.insert(Symbol::variable("x"), DomainElement::Fin(2));
        let g = Symbol::function("g", 1);
        let t = Term::apply(g.clone(), vec![Term::apply(g, vec![Term::var("x")])]);
        assert_eq!(eval_term(&s, &nu, &t).unwrap(), DomainElement::Fin(1));
    }

    #[test]
    fn eval_term_errors_are_distinct() {
        let s = two_element_structure();
        let nu = Valuation::new();
        assert!(matches!(
            eval_term(&s, &nu, &Term::var("x")),
            Err(EvalError::UnboundVariable(_))
        ));
        let mut nu = Valuation::new();
        nu.insert(Symbol::variable("x"), DomainElement::Fin(0));
        let h = Symbol::function("h", 1);
        assert!(matches!(
            eval_term(&s, &nu, &Term::apply(h, vec![Term::var("x")])),
            Err(EvalError::MissingTable(_))
        ));
    }

    #[test]
    fn eval_qf_true_const() {
        let s = two_element_structure();
        assert!(eval_qf(&s, &Valuation::new(), &Formula::True).unwrap());
    }

    #[test]
    fn eval_qf_absent_tuple() {
        let s = two_element_structure();
        let mut nu = Valuation::new();
        nu.insert(Symbol::variable("x"), DomainElement::Fin(0));
        let f = p(vec![Term::var("x")]);
        assert!(!eval_qf(&s, &nu, &f).unwrap());
    }

    #[test]
    fn eval_qf_tautology() {
        let s = two_element_structure();
        for i in 0..2 {
            let mut nu = Valuation::new();
            nu.insert(Symbol::variable("x"), DomainElement::Fin(i));
            let f = Formula::or(
                p(vec![Term::var("x")]),
                Formula::not(p(vec![Term::var("x")])),
            );
            assert!(eval_qf(&s, &nu, &f).unwrap());
        }
    }

    #[test]
    fn eval_qf_rejects_quantifiers() {
        let s = two_element_structure();
        let f = Formula::exists(Symbol::variable("x"), p(vec![Term::var("x")]));
        assert_eq!(
            eval_qf(&s, &Valuation::new(), &f),
            Err(EvalError::NotQuantifierFree)
        );
    }

    #[test]
    fn structure_rejects_partial_function() {
        let mut s = FiniteStructure::new(2).unwrap();
        let err = s.add_function("g", vec![(vec![0], 0)]).unwrap_err();
        assert_eq!(err, StructureError::PartialFunctionTable("g".into()));
    }

    #[test]
    fn structure_rejects_out_of_range() {
        let mut s = FiniteStructure::new(2).unwrap();
        let err = s.add_predicate("P", vec![vec![2]]).unwrap_err();
        assert_eq!(err, StructureError::TupleOutOfRange("P".into()));
    }
}
