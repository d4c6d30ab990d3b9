//! The `atomiso` command line.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::algebra::{definable_subsets, least_support, orbit_decomposition, set_equal, DEFAULT_SUBSET_BUDGET};
use crate::atom::{parse_atom_list, Atom};
use crate::error::{Error, Result};
use crate::expr::{parse_for, Expr};
use crate::iso::{decide_definable_iso_within, eliminate_parameters, Certificate, Mode, Side, Verdict};
use crate::structure::{is_isomorphism, load_function, Structure};
use crate::theory::Backend;
use crate::fixtures;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;
pub const EXIT_INCOMPLETE: i32 = 4;
pub const EXIT_BUDGET: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "atomiso", version, about = "Definable sets with atoms and definable isomorphism")]
pub struct Cli {
    /// Atom structure: equality, dlo or cyclic. Structure files carry their own.
    #[arg(long, global = true)]
    pub backend: Option<String>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Bound on enumerated subsets or orbit graphs.
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    /// Worker threads for the isomorphism search.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether two expressions denote the same object.
    CheckEq { e1: String, e2: String },
    /// List the orbits of a set under automorphisms fixing its parameters and LIST.
    Orbits {
        #[arg(long, default_value = "")]
        fix: String,
        expr: String,
    },
    /// Print the least support of an expression.
    Support { expr: String },
    /// List the subsets of a set definable over its parameters and LIST.
    Subsets {
        #[arg(long, default_value = "")]
        params: String,
        expr: String,
    },
    /// Number of orbits of n-tuples of atoms.
    Rn { n: usize },
    /// Search for a definable isomorphism between two structures.
    Iso {
        a: PathBuf,
        b: PathBuf,
        /// Parameters allowed in addition to those of the structures.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value = "iso")]
        mode: String,
    },
    /// Turn an isomorphism with parameters into one over LIST.
    Eliminate {
        #[arg(long)]
        map: PathBuf,
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "")]
        params: String,
    },
    /// Write a bundled example into a directory.
    Fixture {
        name: String,
        #[arg(long)]
        emit: PathBuf,
    },
}

/// Result of a command: exit code and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget { .. } => EXIT_BUDGET,
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

pub fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Found => EXIT_OK,
        Verdict::NotFound => EXIT_NEGATIVE,
        Verdict::NotFoundIncomplete => EXIT_INCOMPLETE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok((code, stdout)) => Outcome { code, stdout, stderr: String::new() },
        Err(e) => Outcome { code: exit_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn atoms(list: &str, backend: Backend) -> Result<BTreeSet<Atom>> {
    let out: BTreeSet<Atom> = parse_atom_list(list)?.into_iter().collect();
    for a in &out {
        backend.check_atom(a)?;
    }
    Ok(out)
}

fn joined(atoms: &BTreeSet<Atom>) -> String {
    atoms.iter().map(Atom::to_string).collect::<Vec<_>>().join(" ")
}

fn strings(atoms: &BTreeSet<Atom>) -> Vec<String> {
    atoms.iter().map(Atom::to_string).collect()
}

fn lines<I: IntoIterator<Item = String>>(items: I) -> String {
    items.into_iter().map(|l| l + "\n").collect()
}

fn pretty(v: serde_json::Value) -> String {
    serde_json::to_string_pretty(&v).expect("json value serializes") + "\n"
}

impl Cli {
    fn backend(&self) -> Result<Backend> {
        self.backend.as_deref().map_or(Ok(Backend::Equality), str::parse)
    }

    fn expr(&self, text: &str) -> Result<Expr> {
        parse_for(self.backend()?, text)
    }

    fn load(&self, path: &Path) -> Result<Structure> {
        let s = Structure::load(path)?;
        if let Some(name) = &self.backend {
            let b: Backend = name.parse()?;
            if b != s.backend {
                return Err(Error::BackendMismatch(b.to_string(), s.backend.to_string()));
            }
        }
        Ok(s)
    }
}

fn execute(cli: &Cli) -> Result<(i32, String)> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Input("--threads must be positive".into()));
        }
        // fails only if a pool already exists, which then keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::CheckEq { e1, e2 } => {
            let (x, y) = (cli.expr(e1)?, cli.expr(e2)?);
            let eq = set_equal(cli.backend()?, &x, &y)?;
            let out = if cli.json { pretty(json!({ "equal": eq })) } else { lines([if eq { "equal" } else { "unequal" }.to_string()]) };
            Ok((if eq { EXIT_OK } else { EXIT_NEGATIVE }, out))
        }
        Command::Orbits { fix, expr } => {
            let backend = cli.backend()?;
            let x = cli.expr(expr)?;
            let mut s = atoms(fix, backend)?;
            s.extend(x.params());
            let orbits = orbit_decomposition(backend, &x, &s)?;
            if let Some(b) = cli.budget {
                if orbits.len() as u128 > b {
                    return Err(Error::Budget { what: "orbits", count: orbits.len() as u128, limit: b });
                }
            }
            let out = if cli.json {
                pretty(json!({
                    "fixed": strings(&s),
                    "orbits": orbits.iter().map(|o| json!({
                        "orbit": o.expr().canonical().to_string(),
                        "representative": o.element().to_string(),
                    })).collect::<Vec<_>>(),
                }))
            } else {
                lines(orbits.iter().map(|o| o.expr().canonical().to_string()))
            };
            Ok((EXIT_OK, out))
        }
        Command::Support { expr } => {
            let backend = cli.backend()?;
            let s = least_support(backend, &cli.expr(expr)?)?;
            let out = if cli.json {
                pretty(json!({ "support": strings(&s.atoms), "dimension": s.dimension() }))
            } else {
                lines([joined(&s.atoms)])
            };
            Ok((EXIT_OK, out))
        }
        Command::Subsets { params, expr } => {
            let backend = cli.backend()?;
            let x = cli.expr(expr)?;
            let mut t = atoms(params, backend)?;
            t.extend(x.params());
            let subs = definable_subsets(backend, &x, &t, cli.budget.unwrap_or(DEFAULT_SUBSET_BUDGET))?;
            let out = if cli.json {
                pretty(json!({ "params": strings(&t), "subsets": subs.iter().map(|e| e.canonical().to_string()).collect::<Vec<_>>() }))
            } else {
                lines(subs.iter().map(|e| e.canonical().to_string()))
            };
            Ok((EXIT_OK, out))
        }
        Command::Rn { n } => {
            if *n > 8 {
                return Err(Error::Input(format!("rn is limited to n <= 8, got {n}")));
            }
            let count = cli.backend()?.rn_count(*n);
            let out = if cli.json { pretty(json!({ "n": n, "count": count })) } else { lines([count.to_string()]) };
            Ok((EXIT_OK, out))
        }
        Command::Iso { a, b, params, mode } => {
            let (sa, sb) = (cli.load(a)?, cli.load(b)?);
            let extra = atoms(params, sa.backend)?;
            let mode: Mode = mode.parse()?;
            let budget = cli.budget.unwrap_or(crate::iso::ORBIT_BUDGET);
            let cert = decide_definable_iso_within(&sa, &sb, &extra, mode, budget)?;
            let out = if cli.json { cert.to_json() + "\n" } else { certificate_text(&cert) };
            Ok((verdict_code(cert.verdict), out))
        }
        Command::Eliminate { map, a, b, params } => {
            let (sa, sb) = (cli.load(a)?, cli.load(b)?);
            let f = load_function(map)?;
            let mut t = atoms(params, sa.backend)?;
            t.extend(sa.params());
            t.extend(sb.params());
            let (h, state) = eliminate_parameters(&f, &sa, &sb, &t)?;
            if !is_isomorphism(&h, &sa, &sb)? {
                return Err(Error::Internal("eliminated map is not an isomorphism".into()));
            }
            let witness = h.graph.simplify().canonical();
            let out = if cli.json {
                pretty(json!({
                    "verdict": Verdict::Found,
                    "witness": witness.to_string(),
                    "params": strings(&t),
                    "eliminated": strings(&state.s.difference(&t).copied().collect()),
                    "steps": state.steps.iter().map(|s| json!({
                        "side": if s.side == Side::A { "A" } else { "B" },
                        "orbit": s.orbit,
                        "target_orbit": s.target_orbit,
                        "dimension": s.dimension,
                        "length": s.length,
                        "piece": s.piece.to_string(),
                    })).collect::<Vec<_>>(),
                }))
            } else {
                let mut text = format!("verdict: FOUND\nwitness: {witness}\nparams: {}\n", joined(&t));
                for s in &state.steps {
                    text += &format!(
                        "step {}: {} orbit {} -> orbit {}, dimension {}, cycle length {}\n",
                        s.order,
                        if s.side == Side::A { "A" } else { "B" },
                        s.orbit,
                        s.target_orbit,
                        s.dimension,
                        s.length + 1
                    );
                }
                text
            };
            Ok((EXIT_OK, out))
        }
        Command::Fixture { name, emit } => {
            let paths = fixtures::emit(name, emit)?;
            let out = if cli.json {
                pretty(json!({ "files": paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>() }))
            } else {
                lines(paths.iter().map(|p| p.display().to_string()))
            };
            Ok((EXIT_OK, out))
        }
    }
}

fn certificate_text(c: &Certificate) -> String {
    let mut out = format!("verdict: {}\n", c.verdict);
    if let Some(w) = &c.witness {
        out += &format!("witness: {w}\n");
    }
    out += &format!("params: {}\n", joined(&c.params));
    out += &format!(
        "orbits: A={} B={} candidates={}\n",
        c.stats.orbits_a, c.stats.orbits_b, c.stats.candidates
    );
    if let Some(cav) = &c.caveat {
        out += &format!("caveat: {cav}\n");
    }
    out
}
