use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use agl_core::classical::{check_translation, translate, ClassicalError};
use agl_core::model_theory::{
    bounded_ediag, generated_subgroup, is_exhaustive, search_embeddings, separating_sentence, GeneratedSubgroup,
    ModelTheoryError,
};
use agl_core::random::{random_sentence, random_signature, random_structure, rng, SentenceShape};
use agl_core::semantics::{
    check_similarity, check_ultrametric, eval, failing_sentences, models_theory, satisfies, Assignment,
};
use agl_core::solver::{find_model, remark_lab, ModelSearch, SizeStats, SolverError, SolverOptions};
use agl_core::syntax::{expand_derived, parse, parse_infer, parse_theory, parse_theory_infer};
use agl_core::{Backend, Formula, Signature, Structure, FORMAT_VERSION};
use clap::{Parser, Subcommand};
use rand::Rng;

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (format 1)");

#[derive(Parser)]
#[command(name = "agl", version = VERSION, about = "Additive Goedel logic toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print it back.
    Parse {
        formula: String,
        #[arg(long)]
        sig: Option<PathBuf>,
        /// Print the expansion into core connectives.
        #[arg(long)]
        expand: bool,
    },
    /// Evaluate a formula in a structure.
    Eval {
        formula: String,
        #[arg(long)]
        structure: PathBuf,
        /// Free variable assignments `x=a`.
        #[arg(long = "assign", value_name = "VAR=ELEM")]
        assign: Vec<String>,
    },
    /// Check every sentence of a theory in a structure.
    CheckModel {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        structure: PathBuf,
    },
    /// Entailment relative to a finite pool of structures.
    Entails {
        chi: String,
        #[arg(long)]
        theory: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        pool: Vec<PathBuf>,
    },
    /// Search for a finite model of a theory.
    Solve {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_domain: usize,
        #[arg(long, default_value = "rat")]
        backend: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum number of live case branches.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        sig: Option<PathBuf>,
    },
    /// Print the classical translation of a formula.
    Translate {
        formula: String,
        #[arg(long)]
        sig: Option<PathBuf>,
        /// Also compare both sides of the translation in this structure.
        #[arg(long, value_name = "STRUCTURE")]
        check: Option<PathBuf>,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Compare a sentence with its translation, or run a seeded random batch.
    CheckTranslation {
        formula: Option<String>,
        #[arg(long, required_unless_present = "random")]
        structure: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["formula", "structure"])]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Check the similarity axioms for the equality predicate.
    Similarity {
        #[arg(long)]
        structure: PathBuf,
    },
    /// Check that `d = e^-1` is an ultrametric.
    Ultrametric {
        #[arg(long)]
        structure: PathBuf,
    },
    /// Search for embeddings preserving formulas up to a depth.
    Embed {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Bounded elementary equivalence.
    Equiv {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Bounded elementary diagram.
    Ediag {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Standard models of finite fragments and the lexicographic model.
    RemarkLab {
        #[arg(long, default_value_t = 100)]
        n: u32,
    },
    /// Compare the generated subgroup with a given group.
    Exhaustive {
        #[arg(long)]
        structure: PathBuf,
        /// Generators, e.g. `2, 3`. Without it the generated subgroup is printed.
        #[arg(long)]
        group: Option<String>,
    },
}

enum Failure {
    Usage(String),
    Resource(String),
}

impl Failure {
    fn usage(e: impl Display) -> Failure {
        Failure::Usage(e.to_string())
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Resource(_) => Failure::Resource(e.to_string()),
            other => Failure::usage(other),
        }
    }
}

impl From<ModelTheoryError> for Failure {
    fn from(e: ModelTheoryError) -> Self {
        match e {
            ModelTheoryError::Resource(_) => Failure::Resource(e.to_string()),
            other => Failure::usage(other),
        }
    }
}

impl From<ClassicalError> for Failure {
    fn from(e: ClassicalError) -> Self {
        match e {
            ClassicalError::ClosureExhausted { .. } => Failure::Resource(e.to_string()),
            other => Failure::usage(other),
        }
    }
}

type Outcome = Result<bool, Failure>;

macro_rules! outln {
    ($out:expr, $($arg:tt)*) => {{
        use std::fmt::Write as _;
        writeln!($out, $($arg)*).expect("write to string")
    }};
}

macro_rules! outw {
    ($out:expr, $($arg:tt)*) => {{
        use std::fmt::Write as _;
        write!($out, $($arg)*).expect("write to string")
    }};
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<Structure, Failure> {
    Structure::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_sig(path: &Path) -> Result<Signature, Failure> {
    Signature::parse_decls(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_theory(path: &Path, sig: &Signature) -> Result<Vec<Formula>, Failure> {
    parse_theory(&read(path)?, sig).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn formula_with(text: &str, sig: Option<&Path>) -> Result<(Formula, Signature), Failure> {
    match sig {
        Some(p) => {
            let s = load_sig(p)?;
            Ok((parse(text, &s).map_err(Failure::usage)?, s))
        }
        None => {
            let mut s = Signature::new();
            Ok((parse_infer(text, &mut s).map_err(Failure::usage)?, s))
        }
    }
}

fn print_stats(out: &mut String, stats: &[SizeStats]) {
    for s in stats {
        outln!(out, 
            "# size {}: groundings {}, atoms {}, branches {}, pruned {}, solved {}",
            s.size, s.groundings, s.atoms, s.branches, s.pruned, s.solved
        );
    }
}

fn run(cli: Cli, out: &mut String) -> Outcome {
    match cli.command {
        Command::Parse { formula, sig, expand } => {
            let (f, _) = formula_with(&formula, sig.as_deref())?;
            outln!(out, "{f}");
            if expand {
                outln!(out, "{}", expand_derived(&f));
            }
            Ok(true)
        }
        Command::Eval { formula, structure, assign } => {
            let m = load_structure(&structure)?;
            let f = parse(&formula, m.signature()).map_err(Failure::usage)?;
            let mut v = Assignment::new();
            for pair in &assign {
                let (x, a) = pair.split_once('=').ok_or_else(|| Failure::Usage(format!("bad assignment `{pair}`")))?;
                let idx = m.element(a.trim()).ok_or_else(|| Failure::Usage(format!("unknown element `{a}`")))?;
                v.set(x.trim(), idx);
            }
            outln!(out, "{}", eval(&f, &m, &v).map_err(Failure::usage)?);
            Ok(true)
        }
        Command::CheckModel { theory, structure } => {
            let m = load_structure(&structure)?;
            let t = load_theory(&theory, m.signature())?;
            let failing = failing_sentences(&m, &t).map_err(Failure::usage)?;
            for (i, phi) in t.iter().enumerate() {
                let verdict = if failing.contains(&i) { "FAIL" } else { "ok" };
                outln!(out, "{verdict}\t{phi}");
            }
            if !failing.is_empty() {
                for &i in &failing {
                    eprintln!("not satisfied: {}", t[i]);
                }
            }
            Ok(failing.is_empty())
        }
        Command::Entails { chi, theory, pool } => {
            let structures = pool.iter().map(|p| load_structure(p)).collect::<Result<Vec<_>, _>>()?;
            let text = read(&theory)?;
            let mut counterexample = None;
            let mut models = 0;
            for (path, m) in pool.iter().zip(&structures) {
                let t = parse_theory(&text, m.signature()).map_err(Failure::usage)?;
                let c = parse(&chi, m.signature()).map_err(Failure::usage)?;
                if models_theory(m, &t).map_err(Failure::usage)? {
                    models += 1;
                    if counterexample.is_none() && !satisfies(m, &c).map_err(Failure::usage)? {
                        counterexample = Some(path.clone());
                    }
                }
            }
            match counterexample {
                None => {
                    outln!(out, "entailed over pool ({models} of {} structures model the theory)", pool.len());
                    Ok(true)
                }
                Some(p) => {
                    outln!(out, "not entailed: counterexample {}", p.display());
                    Ok(false)
                }
            }
        }
        Command::Solve { theory, max_domain, backend, seed: _, budget, sig } => {
            if max_domain == 0 {
                return Err(Failure::Usage("--max-domain must be positive".into()));
            }
            let backend: Backend = backend.parse().map_err(Failure::usage)?;
            let text = read(&theory)?;
            let (t, s) = match sig {
                Some(p) => {
                    let s = load_sig(&p)?;
                    (parse_theory(&text, &s).map_err(Failure::usage)?, s)
                }
                None => {
                    let mut s = Signature::new();
                    (parse_theory_infer(&text, &mut s).map_err(Failure::usage)?, s)
                }
            };
            let mut options = SolverOptions { backend, ..SolverOptions::default() };
            if let Some(b) = budget {
                options.branch_budget = b;
            }
            match find_model(&t, &s, max_domain, &options)? {
                ModelSearch::Found(model) => {
                    outw!(out, "{}", model.structure);
                    print_stats(out, &model.stats);
                    Ok(true)
                }
                ModelSearch::NoneUpTo { n_max, stats } => {
                    outln!(out, "UNSAT-up-to({n_max})");
                    print_stats(out, &stats);
                    Ok(false)
                }
            }
        }
        Command::Translate { formula, sig, check, bound } => {
            let (f, _) = match &check {
                Some(p) => {
                    let m = load_structure(p)?;
                    let f = parse(&formula, m.signature()).map_err(Failure::usage)?;
                    (f, m.signature().clone())
                }
                None => formula_with(&formula, sig.as_deref())?,
            };
            let t = translate(&expand_derived(&f))?;
            outln!(out, "{}", t.formula);
            match check {
                None => Ok(true),
                Some(p) => {
                    let m = load_structure(&p)?;
                    let r = check_translation(&f, &m, bound)?;
                    outln!(out, "# value variable {}", t.value_var);
                    outln!(out, 
                        "# source {}, classical {}, bound {}, value sort {}",
                        r.source, r.classical, r.bound, r.value_sort_size
                    );
                    Ok(r.agrees())
                }
            }
        }
        Command::CheckTranslation { formula, structure, random, seed, bound } => match random {
            Some(count) => {
                let mut r = rng(seed);
                let mut agree = 0;
                for i in 0..count {
                    let sig = random_signature(&mut r, 2, 2);
                    let size = r.gen_range(1..=3);
                    let m = random_structure(&mut r, &sig, size, Backend::Rat);
                    let shape = SentenceShape { depth: 4, quantifier_depth: 2, derived: false };
                    let phi = random_sentence(&mut r, &sig, shape);
                    let c = check_translation(&phi, &m, bound)?;
                    if c.agrees() {
                        agree += 1;
                    } else {
                        eprintln!("sample {i}: disagreement on {phi}\n{m}");
                    }
                }
                outln!(out, "{agree}/{count} agree");
                Ok(agree == count)
            }
            None => {
                let Some(formula) = formula else {
                    return Err(Failure::Usage("a formula is required without --random".into()));
                };
                let m = load_structure(structure.as_deref().expect("required by clap"))?;
                let f = parse(&formula, m.signature()).map_err(Failure::usage)?;
                let c = check_translation(&f, &m, bound)?;
                outln!(out, 
                    "{}: source {}, classical {}, bound {}, value sort {}",
                    if c.agrees() { "agree" } else { "disagree" },
                    c.source,
                    c.classical,
                    c.bound,
                    c.value_sort_size
                );
                Ok(c.agrees())
            }
        },
        Command::Similarity { structure } => {
            let m = load_structure(&structure)?;
            let ok = check_similarity(&m).map_err(Failure::usage)?;
            outln!(out, "similarity {ok}");
            Ok(ok)
        }
        Command::Ultrametric { structure } => {
            let m = load_structure(&structure)?;
            let report = check_ultrametric(&m).map_err(Failure::usage)?;
            for v in &report.violations {
                outln!(out, "violation: {v}");
            }
            outln!(out, "pseudo-ultrametric {}", report.is_pseudo_ultrametric());
            outln!(out, "ultrametric {}", report.is_ultrametric());
            Ok(report.is_ultrametric())
        }
        Command::Embed { from, to, depth } => {
            let (m, n) = (load_structure(&from)?, load_structure(&to)?);
            let found = search_embeddings(&m, &n, depth)?;
            for c in &found {
                outln!(out, "{}", c.describe(&m, &n));
            }
            if found.is_empty() {
                outln!(out, "no embedding at depth {depth}");
            }
            Ok(!found.is_empty())
        }
        Command::Equiv { left, right, depth } => {
            let (m, n) = (load_structure(&left)?, load_structure(&right)?);
            match separating_sentence(&m, &n, depth)? {
                None => {
                    outln!(out, "equivalent at depth {depth}");
                    Ok(true)
                }
                Some(phi) => {
                    outln!(out, "separated by: {phi}");
                    Ok(false)
                }
            }
        }
        Command::Ediag { structure, depth } => {
            let m = load_structure(&structure)?;
            for phi in bounded_ediag(&m, depth)? {
                outln!(out, "{phi}");
            }
            Ok(true)
        }
        Command::RemarkLab { n } => {
            if n == 0 {
                return Err(Failure::Usage("--n must be positive".into()));
            }
            let report = remark_lab(n)?;
            outln!(out, "fragment n = {}", report.n);
            outln!(out, "standard model valid {}:", report.standard_valid);
            outw!(out, "{}", report.standard);
            outln!(out, "lexicographic model valid {} ({} axioms checked):", report.lex_valid, report.lex_checked);
            outw!(out, "{}", report.lex);
            Ok(report.ok())
        }
        Command::Exhaustive { structure, group } => {
            let m = load_structure(&structure)?;
            let gr = generated_subgroup(&m)?;
            let gens: Vec<String> = gr.generators().iter().map(|g| g.to_string()).collect();
            outln!(out, "Gr(M) = <{}> rank {}", gens.join(", "), gr.rank());
            match group {
                None => Ok(true),
                Some(text) => {
                    let ambient = GeneratedSubgroup::parse(&text)?;
                    let ok = is_exhaustive(&m, &ambient)?;
                    outln!(out, "exhaustive {ok}");
                    Ok(ok)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    debug_assert!(VERSION.ends_with(&format!("(format {FORMAT_VERSION})")));
    let cli = Cli::parse();
    let mut out = String::new();
    let outcome = run(cli, &mut out);
    if let Err(e) = std::io::stdout().write_all(out.as_bytes()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn version_names_format() {
        assert!(VERSION.ends_with(&format!("(format {FORMAT_VERSION})")));
    }
}
