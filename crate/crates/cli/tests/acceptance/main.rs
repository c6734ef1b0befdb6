//! Acceptance suite: one test per release criterion. Each test prints a
//! single `criterion N: PASS` line (visible with `--nocapture`) and
//! enforces its own runtime bound; a failed assertion is the FAIL line.
//!
//! Every CLI invocation goes through [`cli`], which runs the command
//! twice and insists on byte-identical output, so determinism is
//! exercised by the whole suite and not just by criterion 9.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skolem_forge::logic::{finite_eval, free_vars, substitute, FiniteStructure};
use skolem_forge::skolemize::SkolemDecl;
use skolem_forge::theories::enumerate::diagonal_tuple;
use skolem_forge::theories::{dlo::dlo_decide, lra::lra_decide, presburger::presburger_decide};
use skolem_forge::theories::{qe_for, theory_by_name, Theory};
use skolem_forge::{parse_formula, skolemize, to_prenex, Formula, SourceText, Symbol, Term, Valuation};

// ---------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------

struct Run {
    stdout: String,
    stderr: String,
    code: Option<i32>,
}

/// Run the CLI twice and require byte-identical output both times.
fn cli(args: &[&str]) -> Run {
    let invoke = || {
        Command::new(env!("CARGO_BIN_EXE_skolem-forge"))
            .env_remove("SKOLEM_FORGE_LOG")
            .args(args)
            .output()
            .expect("binary runs")
    };
    let a = invoke();
    let b = invoke();
    assert_eq!(a.stdout, b.stdout, "stdout not deterministic for {args:?}");
    assert_eq!(a.stderr, b.stderr, "stderr not deterministic for {args:?}");
    assert_eq!(a.status.code(), b.status.code(), "exit code not deterministic for {args:?}");
    Run {
        stdout: String::from_utf8(a.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(a.stderr).expect("utf-8 stderr"),
        code: a.status.code(),
    }
}

fn workspace_root() -> PathBuf {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.pop();
    p.pop();
    p
}

fn corpus(rel: &str) -> String {
    workspace_root().join("corpus").join(rel).display().to_string()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

/// Sorted formula files under one corpus theory directory.
fn corpus_files(theory: &str) -> Vec<PathBuf> {
    let dir = workspace_root().join("corpus").join(theory);
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| entry.expect("readable dir entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "sexp"))
        .collect();
    files.sort();
    files
}

fn load(path: &PathBuf) -> Formula {
    let content = std::fs::read_to_string(path).expect("readable corpus file");
    parse_formula(&SourceText::new(content, path.display().to_string()))
        .unwrap_or_else(|e| panic!("{e}"))
}

fn pass(n: usize, what: &str, t: Instant) {
    println!("criterion {n}: PASS — {what} ({:.2?})", t.elapsed());
}

// ---------------------------------------------------------------------
// Criterion 1: the five-quantifier golden output
// ---------------------------------------------------------------------

#[test]
fn criterion_1_skolemize_golden() {
    let t = Instant::now();
    let run = cli(&["skolemize", "--input", &fixture("example1.sexp")]);
    assert_eq!(run.code, Some(0));
    assert_eq!(
        run.stdout,
        "\
prefix: forall x forall u
matrix: (phi x C_y (F_z x) u (F_v x u))
decls:
  C_y  replaces y
  F_z(x)  replaces z
  F_v(x,u)  replaces v
"
    );
    assert!(t.elapsed() < Duration::from_secs(1), "took {:?}", t.elapsed());
    pass(1, "skolemize golden output for the five-quantifier example", t);
}

// ---------------------------------------------------------------------
// Criterion 2: Skolemization preserves satisfiability on finite models
// ---------------------------------------------------------------------

fn var(name: &str) -> Symbol {
    Symbol::variable(name)
}

fn atom_pool(vars: &[Symbol]) -> Vec<Formula> {
    let p = Symbol::predicate("P", 1);
    let q = Symbol::predicate("Q", 2);
    let eq = Symbol::predicate("=", 2);
    let v = |i: usize| Term::Var(vars[i].clone());
    let mut pool = vec![
        Formula::atom(p.clone(), vec![v(0)]),
        Formula::atom(q.clone(), vec![v(0), v(0)]),
    ];
    if vars.len() > 1 {
        pool.extend([
            Formula::atom(p, vec![v(1)]),
            Formula::atom(q.clone(), vec![v(0), v(1)]),
            Formula::atom(q, vec![v(1), v(0)]),
            Formula::atom(eq, vec![v(0), v(1)]),
        ]);
    }
    pool
}

fn random_matrix(rng: &mut ChaCha8Rng, vars: &[Symbol]) -> Formula {
    let pool = atom_pool(vars);
    let pick = |rng: &mut ChaCha8Rng| {
        let a = pool[rng.gen_range(0..pool.len())].clone();
        if rng.gen_bool(0.3) {
            Formula::not(a)
        } else {
            a
        }
    };
    let mut out = pick(rng);
    for _ in 0..rng.gen_range(1..3) {
        let next = pick(rng);
        out = match rng.gen_range(0..3) {
            0 => Formula::and(out, next),
            1 => Formula::or(out, next),
            _ => Formula::implies(out, next),
        };
    }
    out
}

/// A random sentence with at most two quantifiers over {P/1, Q/2, =}.
fn random_sentence(rng: &mut ChaCha8Rng) -> Formula {
    let x = var("x");
    let y = var("y");
    match rng.gen_range(0..6) {
        0 => Formula::exists(x.clone(), random_matrix(rng, &[x])),
        1 => Formula::forall(x.clone(), random_matrix(rng, &[x])),
        2 => {
            let m = random_matrix(rng, &[x.clone(), y.clone()]);
            Formula::exists(x, Formula::exists(y, m))
        }
        3 => {
            let m = random_matrix(rng, &[x.clone(), y.clone()]);
            Formula::forall(x, Formula::forall(y, m))
        }
        4 => {
            let m = random_matrix(rng, &[x.clone(), y.clone()]);
            Formula::forall(x, Formula::exists(y, m))
        }
        _ => {
            let m = random_matrix(rng, &[x.clone(), y.clone()]);
            Formula::exists(x, Formula::forall(y, m))
        }
    }
}

/// Every structure of the given size over {P/1, Q/2}.
fn structures_of_size(size: usize) -> Vec<FiniteStructure> {
    let mut out = vec![];
    for p_mask in 0u32..(1 << size) {
        for q_mask in 0u32..(1 << (size * size)) {
            let mut s = FiniteStructure::new(size).expect("positive size");
            let p_rows: Vec<Vec<usize>> =
                (0..size).filter(|i| p_mask & (1 << i) != 0).map(|i| vec![i]).collect();
            let q_rows: Vec<Vec<usize>> = (0..size * size)
                .filter(|b| q_mask & (1 << b) != 0)
                .map(|b| vec![b / size, b % size])
                .collect();
            s.add_predicate("P", p_rows).expect("fresh P");
            s.add_predicate("Q", q_rows).expect("fresh Q");
            out.push(s);
        }
    }
    out
}

/// Every total function table of the given arity over a universe.
fn all_tables(size: usize, arity: usize) -> Vec<Vec<(Vec<usize>, usize)>> {
    let rows = size.pow(arity as u32);
    let mut inputs = Vec::with_capacity(rows);
    for mut r in 0..rows {
        let mut tuple = vec![0usize; arity];
        for slot in tuple.iter_mut().rev() {
            *slot = r % size;
            r /= size;
        }
        inputs.push(tuple);
    }
    let count = size.pow(rows as u32);
    let mut tables = Vec::with_capacity(count);
    for mut t in 0..count {
        let mut table = Vec::with_capacity(rows);
        for input in &inputs {
            table.push((input.clone(), t % size));
            t /= size;
        }
        tables.push(table);
    }
    tables
}

/// Does any choice of interpretation for the Skolem symbols make the
/// skolemized sentence true in this structure?
fn some_tables_satisfy(s: &FiniteStructure, decls: &[SkolemDecl], skolemized: &Formula) -> bool {
    match decls.first() {
        None => finite_eval(s, &Valuation::new(), skolemized).expect("evaluates"),
        Some(d) => all_tables(s.universe_size(), d.deps.len()).into_iter().any(|table| {
            let mut extended = s.clone();
            extended
                .add_function(d.symbol.name.clone(), table)
                .expect("fresh Skolem symbol");
            some_tables_satisfy(&extended, &decls[1..], skolemized)
        }),
    }
}

#[test]
fn criterion_2_equisatisfiability_oracle() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5346_0001);
    let structures: Vec<FiniteStructure> =
        (1..=3).flat_map(structures_of_size).collect();
    assert_eq!(structures.len(), 4 + 64 + 4096);

    let mut checked = 0usize;
    for i in 0..500 {
        let sentence = random_sentence(&mut rng);
        let system = skolemize(&to_prenex(&sentence));
        let skolemized = system.skolemized.to_formula();
        for s in &structures {
            let truth = finite_eval(s, &Valuation::new(), &sentence).expect("evaluates");
            let satisfiable = some_tables_satisfy(s, &system.decls, &skolemized);
            assert_eq!(
                truth, satisfiable,
                "discrepancy on sentence #{i} `{sentence}` over a size-{} structure",
                s.universe_size()
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 500 * 4164);
    assert!(t.elapsed() < Duration::from_secs(300), "took {:?}", t.elapsed());
    pass(2, "equisatisfiability on 500 random sentences x 4164 structures", t);
}

// ---------------------------------------------------------------------
// Criterion 3: the dense-linear-order axioms
// ---------------------------------------------------------------------

#[test]
fn criterion_3_dlo_axioms() {
    let t = Instant::now();
    let mut axioms = 0;
    let mut negations = 0;
    for file in corpus_files("dlo") {
        let name = file.file_name().unwrap().to_str().unwrap();
        let expected = if name.starts_with("neg_axiom_") {
            negations += 1;
            "FALSE\n"
        } else if name.starts_with("axiom_") {
            axioms += 1;
            "TRUE\n"
        } else {
            continue;
        };
        let run = cli(&["decide", "--theory", "dlo", "--input", &file.display().to_string()]);
        assert_eq!(run.code, Some(0), "{name}: {}", run.stderr);
        assert_eq!(run.stdout, expected, "wrong verdict for {name}");
    }
    assert_eq!((axioms, negations), (6, 6));
    assert!(t.elapsed() < Duration::from_secs(1), "took {:?}", t.elapsed());
    pass(3, "six order axioms TRUE and their negations FALSE", t);
}

// ---------------------------------------------------------------------
// Criterion 4: the substitution check across the whole corpus
// ---------------------------------------------------------------------

#[test]
fn criterion_4_corpus_check() {
    let t = Instant::now();
    for theory in ["dlo", "presburger", "lra"] {
        let files = corpus_files(theory);
        assert!(files.len() >= 20, "{theory} corpus has {} formulas", files.len());
        for file in files {
            let run = cli(&[
                "check",
                "--theory",
                theory,
                "--input",
                &file.display().to_string(),
                "--budget",
                "200",
            ]);
            assert_eq!(run.code, Some(0), "{}: {}", file.display(), run.stderr);
            let first = run.stdout.lines().next().unwrap_or("");
            assert!(
                first.ends_with(" 0 failures") || first.contains("0 failures ("),
                "{}: {first}",
                file.display()
            );
        }
    }
    let structures = ["s1.structure", "s2_path.structure", "s3_cycle.structure", "s3_line.structure"];
    for file in corpus_files("finite") {
        for structure in structures {
            let run = cli(&[
                "check",
                "--theory",
                "finite",
                "--structure",
                &corpus(&format!("finite/{structure}")),
                "--input",
                &file.display().to_string(),
            ]);
            assert_eq!(run.code, Some(0), "{} on {structure}: {}", file.display(), run.stderr);
            assert!(
                run.stdout.starts_with("exhaustive, 0 failures"),
                "{} on {structure}: {}",
                file.display(),
                run.stdout
            );
        }
    }
    assert!(t.elapsed() < Duration::from_secs(120), "took {:?}", t.elapsed());
    pass(4, "check reports zero failures across the corpus", t);
}

// ---------------------------------------------------------------------
// Criterion 5: exact witnesses and the defaulting case
// ---------------------------------------------------------------------

#[test]
fn criterion_5_exact_witnesses() {
    let t = Instant::now();
    let between = corpus("dlo/betweenness.sexp");
    let ordered = cli(&["eval", "--theory", "dlo", "--input", &between, "--fn", "F_z", "--args", "0,1"]);
    assert_eq!(ordered.code, Some(0));
    assert_eq!(ordered.stdout, "1/2\n");
    assert_eq!(ordered.stderr, "");

    let reversed = cli(&["eval", "--theory", "dlo", "--input", &between, "--fn", "F_z", "--args", "1,0"]);
    assert_eq!(reversed.code, Some(0));
    assert_eq!(reversed.stdout, "0\n");

    let halving = corpus("presburger/halving_strict.sexp");
    let odd = cli(&["eval", "--theory", "presburger", "--input", &halving, "--fn", "F_y", "--args", "3"]);
    assert_eq!(odd.code, Some(0));
    assert_eq!(odd.stdout, "0\n");
    assert!(odd.stderr.contains("no witness exists"), "missing warning: {}", odd.stderr);
    pass(5, "exact witness values and the no-witness default", t);
}

// ---------------------------------------------------------------------
// Criterion 6: quantifier elimination agrees with its input on samples
// ---------------------------------------------------------------------

#[test]
fn criterion_6_qe_sampling() {
    let t = Instant::now();
    for name in ["dlo", "presburger", "lra"] {
        let theory: Arc<dyn Theory> = Arc::from(theory_by_name(name, None).expect("known theory"));
        for file in corpus_files(name) {
            let input = load(&file);
            let trace = qe_for(name, &input).unwrap_or_else(|e| panic!("{}: {e}", file.display()));
            let output = &trace.output;

            let dims: Vec<Symbol> = free_vars(&input);
            let out_frees: BTreeSet<Symbol> = free_vars(output).into_iter().collect();
            assert!(
                out_frees.is_subset(&dims.iter().cloned().collect()),
                "{}: new free variables after elimination",
                file.display()
            );

            let samples = if dims.is_empty() { 1 } else { 1000 };
            for k in 0..samples {
                let indices = diagonal_tuple(dims.len(), k);
                let mut lhs = input.clone();
                let mut rhs = output.clone();
                for (v, idx) in dims.iter().zip(indices) {
                    let value = theory.enum_domain(idx).expect("infinite domain").to_term();
                    lhs = substitute(&lhs, v, &value);
                    rhs = substitute(&rhs, v, &value);
                }
                let expect = theory.decide(&lhs).unwrap_or_else(|e| panic!("{}: {e}", file.display()));
                let got = theory.decide(&rhs).unwrap_or_else(|e| panic!("{}: {e}", file.display()));
                assert_eq!(expect, got, "{} disagrees at sample {k}", file.display());
            }
        }
    }
    assert!(t.elapsed() < Duration::from_secs(120), "took {:?}", t.elapsed());
    pass(6, "eliminated forms agree with inputs on 1000 samples each", t);
}

// ---------------------------------------------------------------------
// Criterion 7: independent procedures agree
// ---------------------------------------------------------------------

fn quantifier_free(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Atom(..) => true,
        Formula::Not(g) => quantifier_free(g),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            quantifier_free(a) && quantifier_free(b)
        }
        Formula::Exists(..) | Formula::Forall(..) => false,
    }
}

/// Split a purely existential sentence into its variables and matrix.
fn exists_only(f: &Formula) -> Option<(Vec<Symbol>, &Formula)> {
    let mut vars = vec![];
    let mut cur = f;
    while let Formula::Exists(v, body) = cur {
        vars.push(v.clone());
        cur = body;
    }
    (!vars.is_empty() && quantifier_free(cur)).then_some((vars, cur))
}

#[test]
fn criterion_7_cross_procedure_agreement() {
    let t = Instant::now();

    // Order sentences mean the same thing over (Q, <) and over linear
    // rational arithmetic.
    let mut shared = 0;
    for file in corpus_files("dlo") {
        let f = load(&file);
        if !free_vars(&f).is_empty() {
            continue;
        }
        let via_dlo = dlo_decide(&f).unwrap_or_else(|e| panic!("{}: {e}", file.display()));
        let via_lra = lra_decide(&f).unwrap_or_else(|e| panic!("{}: {e}", file.display()));
        assert_eq!(via_dlo, via_lra, "{} splits the procedures", file.display());
        shared += 1;
    }
    assert!(shared >= 10, "only {shared} shared sentences");

    // Purely existential arithmetic sentences are settled by searching
    // all tuples up to a bound that covers every witness in the corpus.
    const BOUND: u64 = 60;
    let mut existentials = 0;
    for file in corpus_files("presburger") {
        let f = load(&file);
        let Some((vars, matrix)) = exists_only(&f) else {
            continue;
        };
        if !free_vars(&f).is_empty() {
            continue;
        }
        let mut found = false;
        let mut tuple = vec![0u64; vars.len()];
        'search: loop {
            let mut ground = matrix.clone();
            for (v, value) in vars.iter().zip(&tuple) {
                ground = substitute(&ground, v, &Term::int(*value as i64));
            }
            if presburger_decide(&ground).unwrap_or_else(|e| panic!("{}: {e}", file.display())) {
                found = true;
                break;
            }
            for slot in tuple.iter_mut().rev() {
                *slot += 1;
                if *slot <= BOUND {
                    continue 'search;
                }
                *slot = 0;
            }
            break;
        }
        let decided = presburger_decide(&f).unwrap_or_else(|e| panic!("{}: {e}", file.display()));
        assert_eq!(decided, found, "{} disagrees with brute force", file.display());
        existentials += 1;
    }
    assert!(existentials >= 5, "only {existentials} existential sentences");
    pass(7, "order procedures and bounded search agree with the deciders", t);
}

// ---------------------------------------------------------------------
// Criterion 8: the demo searches
// ---------------------------------------------------------------------

#[test]
fn criterion_8_demos() {
    let t = Instant::now();
    let pcp = cli(&["pcp", "--input", &corpus("demos/classic.pcp"), "--max-len", "10"]);
    assert_eq!(pcp.code, Some(0));
    assert_eq!(pcp.stdout, "101110011 [1,3,2,3]\n");

    let found = cli(&["dioph", "--input", &corpus("demos/square.poly"), "--args", "9"]);
    assert_eq!(found.code, Some(0));
    assert_eq!(found.stdout, "FOUND y=3\n");

    let unknown = cli(&[
        "dioph",
        "--input",
        &corpus("demos/square.poly"),
        "--args",
        "7",
        "--fuel",
        "1000",
    ]);
    assert_eq!(unknown.code, Some(0));
    assert_eq!(unknown.stdout, "UNKNOWN (fuel exhausted)\n");
    assert!(t.elapsed() < Duration::from_secs(10), "took {:?}", t.elapsed());
    pass(8, "tile search and root search return the exact demo answers", t);
}

// ---------------------------------------------------------------------
// Criterion 9: rerunning any command changes nothing
// ---------------------------------------------------------------------

#[test]
fn criterion_9_determinism() {
    let t = Instant::now();
    // One representative invocation per command; cli() runs each twice
    // and fails on any byte difference, here and in every other test.
    let example = fixture("example1.sexp");
    let cases: Vec<Vec<&str>> = vec![
        vec!["skolemize", "--input", &example, "--cnf"],
        vec!["decide", "--theory", "presburger", "--input"],
        vec!["qe", "--theory", "lra", "--trace", "--input"],
        vec!["synth", "--theory", "dlo", "--input"],
        vec!["eval", "--theory", "dlo", "--fn", "F_z", "--args", "0,1", "--input"],
        vec!["check", "--theory", "presburger", "--budget", "50", "--input"],
        vec!["pcp", "--max-len", "10", "--input"],
        vec!["dioph", "--args", "9", "--input"],
    ];
    let inputs = [
        None,
        Some(corpus("presburger/even_or_next.sexp")),
        Some(corpus("lra/band_scaled.sexp")),
        Some(corpus("dlo/cutoff_transfer.sexp")),
        Some(corpus("dlo/betweenness.sexp")),
        Some(corpus("presburger/halving_floor.sexp")),
        Some(corpus("demos/classic.pcp")),
        Some(corpus("demos/square.poly")),
    ];
    for (args, input) in cases.iter().zip(&inputs) {
        let mut full = args.clone();
        if let Some(input) = input {
            full.push(input);
        }
        let run = cli(&full);
        assert_eq!(run.code, Some(0), "{full:?}: {}", run.stderr);
        // And once more in JSON, which must be just as stable.
        let mut json = full.clone();
        json.extend(["--format", "json"]);
        let run = cli(&json);
        assert_eq!(run.code, Some(0));
        assert!(run.stdout.starts_with('{'), "not json: {}", run.stdout);
    }
    pass(9, "every command is byte-identical across reruns", t);
}
