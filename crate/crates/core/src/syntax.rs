//! Text syntax for formulas and finite structures.
//!
//! Formulas are s-expressions:
//!
//! ```text
//! formula := true | false
//!          | (not f) | (and f f) | (or f f) | (implies f f) | (iff f f)
//!          | (exists (v …) f) | (forall (v …) f)
//!          | (p term …)
//! term    := variable | numeral | (f term …)
//! numeral := integer | integer/positive-integer      e.g.  -3   1/2
//! ```
//!
//! Multi-variable binders desugar to nested single binders left to right.
//! `;` starts a line comment. Whitespace is insignificant. Predicate and
//! function names are ordinary identifiers (`<`, `=`, `+`, `*`, `divides`
//! included); the parser only enforces that each name is used with one
//! kind and one arity throughout a file.
//!
//! Structures are written as
//! `(structure (size n) (pred P (t …) …) (fun g ((args …) val) …))`.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, Zero};
use thiserror::Error;

use crate::logic::{FiniteStructure, Formula, Symbol, SymbolKind, Term};

/// A piece of input text together with where it came from, for error
/// messages.
#[derive(Debug, Clone)]
pub struct SourceText {
    pub content: String,
    pub origin: String,
}

impl SourceText {
    pub fn new(content: impl Into<String>, origin: impl Into<String>) -> Self {
        SourceText {
            content: content.into(),
            origin: origin.into(),
        }
    }

    /// Text with no file behind it.
    pub fn inline(content: impl Into<String>) -> Self {
        SourceText::new(content, "<string>")
    }
}

/// A parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{origin}:{line}:{col}: {message}")]
pub struct ParseError {
    pub origin: String,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }
}

fn err_at(origin: &str, pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError {
        origin: origin.to_string(),
        line: pos.line,
        col: pos.col,
        message: message.into(),
    }
}

fn read_sexprs(src: &SourceText) -> Result<Vec<SExpr>, ParseError> {
    let mut roots = Vec::new();
    let mut frames: Vec<(Pos, Vec<SExpr>)> = Vec::new();
    let mut chars = src.content.chars().peekable();
    let mut line = 1usize;
    let mut col = 0usize;

    fn emit(e: SExpr, frames: &mut Vec<(Pos, Vec<SExpr>)>, roots: &mut Vec<SExpr>) {
        match frames.last_mut() {
            Some((_, items)) => items.push(e),
            None => roots.push(e),
        }
    }

    while let Some(c) = chars.next() {
        col += 1;
        match c {
            '\n' => {
                line += 1;
                col = 0;
            }
            c if c.is_whitespace() => {}
            ';' => {
                while let Some(&c2) = chars.peek() {
                    if c2 == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => frames.push((Pos { line, col }, Vec::new())),
            ')' => match frames.pop() {
                Some((pos, items)) => emit(SExpr::List(items, pos), &mut frames, &mut roots),
                None => {
                    return Err(err_at(&src.origin, Pos { line, col }, "unmatched `)`"));
                }
            },
            c => {
                let pos = Pos { line, col };
                let mut atom = String::new();
                atom.push(c);
                while let Some(&c2) = chars.peek() {
                    if c2.is_whitespace() || c2 == '(' || c2 == ')' || c2 == ';' {
                        break;
                    }
                    atom.push(c2);
                    chars.next();
                    col += 1;
                }
                emit(SExpr::Atom(atom, pos), &mut frames, &mut roots);
            }
        }
    }
    if let Some((pos, _)) = frames.pop() {
        return Err(err_at(&src.origin, pos, "unclosed `(`"));
    }
    Ok(roots)
}

const KEYWORDS: &[&str] = &[
    "true", "false", "not", "and", "or", "implies", "iff", "exists", "forall",
];

/// Tracks each name's kind and arity so a file cannot use one symbol
/// inconsistently.
struct SigCtx<'a> {
    origin: &'a str,
    kinds: BTreeMap<String, (SymbolKind, usize)>,
}

impl<'a> SigCtx<'a> {
    fn new(origin: &'a str) -> Self {
        SigCtx {
            origin,
            kinds: BTreeMap::new(),
        }
    }

    fn record(
        &mut self,
        name: &str,
        kind: SymbolKind,
        arity: usize,
        pos: Pos,
    ) -> Result<Symbol, ParseError> {
        if KEYWORDS.contains(&name) {
            return Err(err_at(
                self.origin,
                pos,
                format!("reserved word `{name}` cannot name a symbol"),
            ));
        }
        match self.kinds.get(name) {
            None => {
                self.kinds.insert(name.to_string(), (kind, arity));
            }
            Some(&(k, a)) => {
                if k != kind {
                    return Err(err_at(
                        self.origin,
                        pos,
                        format!("symbol `{name}` used with conflicting kinds"),
                    ));
                }
                if a != arity {
                    return Err(err_at(
                        self.origin,
                        pos,
                        format!("arity mismatch for `{name}`: previously {a}, here {arity}"),
                    ));
                }
            }
        }
        Ok(Symbol {
            name: name.to_string(),
            kind,
            arity,
        })
    }
}

fn is_numeral(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    body.chars().next().is_some_and(|c| c.is_ascii_digit())
}

fn parse_numeral(s: &str, origin: &str, pos: Pos) -> Result<BigRational, ParseError> {
    let malformed = || err_at(origin, pos, format!("malformed numeral `{s}`"));
    let (numer_text, denom_text) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let check_digits = |t: &str| {
        let body = t.strip_prefix('-').unwrap_or(t);
        !body.is_empty() && body.chars().all(|c| c.is_ascii_digit())
    };
    if !check_digits(numer_text) {
        return Err(malformed());
    }
    let numer: BigInt = numer_text.parse().map_err(|_| malformed())?;
    let denom: BigInt = match denom_text {
        None => BigInt::from(1),
        Some(d) => {
            if !check_digits(d) || d.starts_with('-') {
                return Err(malformed());
            }
            d.parse().map_err(|_| malformed())?
        }
    };
    if denom.is_zero() {
        return Err(err_at(origin, pos, format!("zero denominator in `{s}`")));
    }
    Ok(BigRational::new(numer, denom))
}

/// Parse a standalone integer or `p/q` numeral (no surrounding formula).
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let src = SourceText::inline(s);
    if !is_numeral(s.trim()) {
        return Err(format!("malformed numeral `{s}`"));
    }
    parse_numeral(s.trim(), &src.origin, Pos { line: 1, col: 1 }).map_err(|e| e.message)
}

fn formula(e: &SExpr, ctx: &mut SigCtx<'_>) -> Result<Formula, ParseError> {
    match e {
        SExpr::Atom(s, pos) => match s.as_str() {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::False),
            other => Err(err_at(
                ctx.origin,
                *pos,
                format!("expected a formula, found `{other}`"),
            )),
        },
        SExpr::List(items, pos) => {
            let head = match items.first() {
                Some(SExpr::Atom(s, _)) => s.as_str(),
                Some(other) => {
                    return Err(err_at(
                        ctx.origin,
                        other.pos(),
                        "expected an operator or predicate name",
                    ));
                }
                None => return Err(err_at(ctx.origin, *pos, "empty list is not a formula")),
            };
            let args = &items[1..];
            match head {
                "true" | "false" => Err(err_at(
                    ctx.origin,
                    *pos,
                    format!("`{head}` takes no arguments"),
                )),
                "not" => {
                    expect_args(head, args, 1, ctx.origin, *pos)?;
                    Ok(Formula::not(formula(&args[0], ctx)?))
                }
                "and" | "or" | "implies" | "iff" => {
                    expect_args(head, args, 2, ctx.origin, *pos)?;
                    let a = formula(&args[0], ctx)?;
                    let b = formula(&args[1], ctx)?;
                    Ok(match head {
                        "and" => Formula::and(a, b),
                        "or" => Formula::or(a, b),
                        "implies" => Formula::implies(a, b),
                        _ => Formula::iff(a, b),
                    })
                }
                "exists" | "forall" => {
                    expect_args(head, args, 2, ctx.origin, *pos)?;
                    let vars = binder_list(&args[0], ctx)?;
                    let mut f = formula(&args[1], ctx)?;
                    for v in vars.into_iter().rev() {
                        f = if head == "exists" {
                            Formula::exists(v, f)
                        } else {
                            Formula::forall(v, f)
                        };
                    }
                    Ok(f)
                }
                name => {
                    if is_numeral(name) {
                        return Err(err_at(
                            ctx.origin,
                            *pos,
                            format!("numeral `{name}` cannot head a formula"),
                        ));
                    }
                    let mut terms = Vec::with_capacity(args.len());
                    for a in args {
                        terms.push(term(a, ctx)?);
                    }
                    let sym = ctx.record(name, SymbolKind::Predicate, terms.len(), *pos)?;
                    Ok(Formula::Atom(sym, terms))
                }
            }
        }
    }
}

fn expect_args(
    head: &str,
    args: &[SExpr],
    n: usize,
    origin: &str,
    pos: Pos,
) -> Result<(), ParseError> {
    if args.len() != n {
        return Err(err_at(
            origin,
            pos,
            format!("`{head}` expects {n} argument(s), got {}", args.len()),
        ));
    }
    Ok(())
}

fn binder_list(e: &SExpr, ctx: &mut SigCtx<'_>) -> Result<Vec<Symbol>, ParseError> {
    let items = match e {
        SExpr::List(items, _) if !items.is_empty() => items,
        _ => {
            return Err(err_at(
                ctx.origin,
                e.pos(),
                "binder expects a nonempty variable list like (x y)",
            ));
        }
    };
    let mut vars = Vec::with_capacity(items.len());
    for item in items {
        match item {
            SExpr::Atom(s, pos) if !is_numeral(s) => {
                vars.push(ctx.record(s, SymbolKind::Variable, 0, *pos)?);
            }
            other => {
                return Err(err_at(ctx.origin, other.pos(), "expected a variable name"));
            }
        }
    }
    Ok(vars)
}

fn term(e: &SExpr, ctx: &mut SigCtx<'_>) -> Result<Term, ParseError> {
    match e {
        SExpr::Atom(s, pos) => {
            if is_numeral(s) {
                Ok(Term::Num(parse_numeral(s, ctx.origin, *pos)?))
            } else {
                Ok(Term::Var(ctx.record(s, SymbolKind::Variable, 0, *pos)?))
            }
        }
        SExpr::List(items, pos) => {
            let head = match items.first() {
                Some(SExpr::Atom(s, _)) if !is_numeral(s) => s.as_str(),
                _ => {
                    return Err(err_at(ctx.origin, *pos, "expected a function name"));
                }
            };
            let mut args = Vec::with_capacity(items.len() - 1);
            for a in &items[1..] {
                args.push(term(a, ctx)?);
            }
            let sym = ctx.record(head, SymbolKind::Function, args.len(), *pos)?;
            Ok(Term::Apply(sym, args))
        }
    }
}

/// Parse a single formula from source text.
pub fn parse_formula(src: &SourceText) -> Result<Formula, ParseError> {
    let exprs = read_sexprs(src)?;
    let mut iter = exprs.into_iter();
    let first = iter.next().ok_or_else(|| {
        err_at(&src.origin, Pos { line: 1, col: 1 }, "expected a formula")
    })?;
    if let Some(extra) = iter.next() {
        return Err(err_at(
            &src.origin,
            extra.pos(),
            "expected exactly one formula",
        ));
    }
    let mut ctx = SigCtx::new(&src.origin);
    formula(&first, &mut ctx)
}

/// Canonical text for a formula; `parse_formula` inverts this exactly.
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

/// Canonical text for a term.
pub fn print_term(t: &Term) -> String {
    t.to_string()
}

impl fmt::Display for Term {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => out.write_str(&v.name),
            Term::Num(q) => write!(out, "{q}"),
            Term::Apply(f, args) => {
                // Nullary applications print as bare symbols, the way
                // constants are written in source text.
                if args.is_empty() {
                    return out.write_str(&f.name);
                }
                write!(out, "({}", f.name)?;
                for a in args {
                    write!(out, " {a}")?;
                }
                out.write_str(")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => out.write_str("true"),
            Formula::False => out.write_str("false"),
            Formula::Atom(p, args) => {
                write!(out, "({}", p.name)?;
                for a in args {
                    write!(out, " {a}")?;
                }
                out.write_str(")")
            }
            Formula::Not(f) => write!(out, "(not {f})"),
            Formula::And(a, b) => write!(out, "(and {a} {b})"),
            Formula::Or(a, b) => write!(out, "(or {a} {b})"),
            Formula::Implies(a, b) => write!(out, "(implies {a} {b})"),
            Formula::Iff(a, b) => write!(out, "(iff {a} {b})"),
            Formula::Exists(v, f) => write!(out, "(exists ({}) {f})", v.name),
            Formula::Forall(v, f) => write!(out, "(forall ({}) {f})", v.name),
        }
    }
}

fn parse_index(e: &SExpr, origin: &str) -> Result<usize, ParseError> {
    match e {
        SExpr::Atom(s, pos) => s
            .parse::<usize>()
            .map_err(|_| err_at(origin, *pos, format!("expected a nonnegative integer, found `{s}`"))),
        SExpr::List(_, pos) => Err(err_at(origin, *pos, "expected a nonnegative integer")),
    }
}

fn clause_name<'a>(e: &'a SExpr, origin: &str) -> Result<(&'a str, &'a [SExpr], Pos), ParseError> {
    match e {
        SExpr::List(items, pos) => match items.first() {
            Some(SExpr::Atom(s, _)) => Ok((s.as_str(), &items[1..], *pos)),
            _ => Err(err_at(origin, *pos, "expected a named clause")),
        },
        SExpr::Atom(_, pos) => Err(err_at(origin, *pos, "expected a parenthesized clause")),
    }
}

fn symbol_name<'a>(e: &'a SExpr, origin: &str) -> Result<&'a str, ParseError> {
    match e {
        SExpr::Atom(s, _) if !is_numeral(s) && !KEYWORDS.contains(&s.as_str()) => Ok(s),
        other => Err(err_at(origin, other.pos(), "expected a symbol name")),
    }
}

/// Parse a finite structure:
/// `(structure (size n) (pred P (t …) …) (fun g ((args …) val) …))`.
pub fn parse_structure(src: &SourceText) -> Result<FiniteStructure, ParseError> {
    let exprs = read_sexprs(src)?;
    let mut iter = exprs.into_iter();
    let first = iter.next().ok_or_else(|| {
        err_at(&src.origin, Pos { line: 1, col: 1 }, "expected a structure")
    })?;
    if let Some(extra) = iter.next() {
        return Err(err_at(
            &src.origin,
            extra.pos(),
            "expected exactly one structure",
        ));
    }
    let (head, clauses, pos) = clause_name(&first, &src.origin)?;
    if head != "structure" {
        return Err(err_at(&src.origin, pos, "expected `(structure …)`"));
    }
    let (size_head, size_args, size_pos) = match clauses.first() {
        Some(c) => clause_name(c, &src.origin)?,
        None => return Err(err_at(&src.origin, pos, "missing `(size n)` clause")),
    };
    if size_head != "size" || size_args.len() != 1 {
        return Err(err_at(&src.origin, size_pos, "expected `(size n)` first"));
    }
    let size = parse_index(&size_args[0], &src.origin)?;
    let mut s = FiniteStructure::new(size)
        .map_err(|e| err_at(&src.origin, size_pos, e.to_string()))?;

    for clause in &clauses[1..] {
        let (kind, body, cpos) = clause_name(clause, &src.origin)?;
        match kind {
            "pred" => {
                let name = match body.first() {
                    Some(e) => symbol_name(e, &src.origin)?,
                    None => return Err(err_at(&src.origin, cpos, "missing predicate name")),
                };
                let mut rows = Vec::new();
                for row in &body[1..] {
                    match row {
                        SExpr::List(items, _) => {
                            let mut tuple = Vec::with_capacity(items.len());
                            for item in items {
                                tuple.push(parse_index(item, &src.origin)?);
                            }
                            rows.push(tuple);
                        }
                        SExpr::Atom(_, p) => {
                            return Err(err_at(&src.origin, *p, "expected a tuple like (0 1)"));
                        }
                    }
                }
                s.add_predicate(name, rows)
                    .map_err(|e| err_at(&src.origin, cpos, e.to_string()))?;
            }
            "fun" => {
                let name = match body.first() {
                    Some(e) => symbol_name(e, &src.origin)?,
                    None => return Err(err_at(&src.origin, cpos, "missing function name")),
                };
                let mut entries = Vec::new();
                for row in &body[1..] {
                    let items = match row {
                        SExpr::List(items, _) if items.len() == 2 => items,
                        other => {
                            return Err(err_at(
                                &src.origin,
                                other.pos(),
                                "expected a table row like ((0 1) 2)",
                            ));
                        }
                    };
                    let args = match &items[0] {
                        SExpr::List(xs, _) => {
                            let mut tuple = Vec::with_capacity(xs.len());
                            for x in xs {
                                tuple.push(parse_index(x, &src.origin)?);
                            }
                            tuple
                        }
                        SExpr::Atom(_, p) => {
                            return Err(err_at(&src.origin, *p, "expected an argument tuple"));
                        }
                    };
                    let value = parse_index(&items[1], &src.origin)?;
                    entries.push((args, value));
                }
                s.add_function(name, entries)
                    .map_err(|e| err_at(&src.origin, cpos, e.to_string()))?;
            }
            other => {
                return Err(err_at(
                    &src.origin,
                    cpos,
                    format!("expected `pred` or `fun`, found `{other}`"),
                ));
            }
        }
    }
    Ok(s)
}
