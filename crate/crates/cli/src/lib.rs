//! Command-line front end for `tpncover`.
//!
//! [`run`] takes the argument vector and output streams and returns the
//! process exit code, so the whole interface can be tested in-process.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use tpncover::circuit::{circuit_to_tpn, BitVec, Circuit, INITIAL_PLACE, TARGET_TRANSITION};
use tpncover::coverset::{
    compute_coverset_from, exists_cover, exists_cover_streaming, pair_bound, CoverQuery,
    CoverVerdict, DEFAULT_STREAMING_BUDGET,
};
use tpncover::document::{parse_document, print_document, NetDocument};
use tpncover::model::{cmax, is_nonconsuming, Net};
use tpncover::oracle::{
    concrete_bfs, crosscheck, render_concrete_trace, render_word_trace, word_bfs, Budgets,
    OracleVerdict, Outcome, Trace,
};
use tpncover::reduce::make_nonconsuming;
use tpncover::Error;

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "tpncover",
    version,
    about = "Existential coverability for 1-clock timed-arc Petri nets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct QueryArgs {
    /// Net document (JSON).
    net: PathBuf,
    /// Initial place; defaults to the document's query.
    #[arg(long)]
    initial: Option<String>,
    /// Target transition; defaults to the document's query.
    #[arg(long)]
    target: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the target transition is coverable.
    Check {
        #[command(flatten)]
        query: QueryArgs,
        /// Keep only the current round in memory.
        #[arg(long)]
        streaming: bool,
        /// Run the streaming search even when its round cap exceeds the budget.
        #[arg(long, requires = "streaming")]
        force: bool,
        /// Largest 3·B(2) the streaming search accepts without --force.
        #[arg(long, default_value_t = DEFAULT_STREAMING_BUDGET)]
        budget: u64,
    },
    /// Print every recorded expression of the cover set.
    Coverset {
        net: PathBuf,
        #[arg(long)]
        initial: Option<String>,
    },
    /// Print the non-consuming reduction of a net.
    Reduce { net: PathBuf },
    /// Run a brute-force oracle.
    Oracle {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, default_value_t = 30)]
        depth: usize,
        #[arg(long, default_value_t = 5000)]
        states: usize,
        /// Simulate the original net on rational ages instead of region words.
        #[arg(long)]
        concrete: bool,
        /// Number of initial tokens for the concrete search.
        #[arg(long, default_value_t = 3)]
        m: u32,
        /// Time steps are multiples of 1/denom.
        #[arg(long, default_value_t = 8)]
        denom: u64,
    },
    /// Compare the decision procedure with both oracles.
    Crosscheck {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, default_value_t = 30)]
        depth: usize,
        #[arg(long, default_value_t = 5000)]
        states: usize,
        #[arg(long, default_value_t = 3)]
        m: u32,
        #[arg(long, default_value_t = 8)]
        concrete_depth: usize,
        #[arg(long, default_value_t = 8)]
        denom: u64,
        #[arg(long, default_value_t = 20000)]
        concrete_states: usize,
    },
    /// Encode an iterated monotone circuit as a coverability query.
    GenCircuit {
        circuit: PathBuf,
        /// Initial bit vector, bit 0 first.
        #[arg(long)]
        vector: String,
    },
    /// Print net statistics and the round bounds.
    Info { net: PathBuf },
}

struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> CliResult<(NetDocument, Net)> {
    let doc =
        parse_document(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let net = doc
        .to_net()
        .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    Ok((doc, net))
}

/// Original net and the query on its non-consuming form.
struct Loaded {
    original: Net,
    query: CoverQuery,
}

fn resolve(args: &QueryArgs) -> CliResult<Loaded> {
    let (doc, net) = load(&args.net)?;
    let from_doc = doc.query.as_ref();
    let initial = args
        .initial
        .clone()
        .or_else(|| from_doc.map(|q| q.initial.clone()))
        .ok_or_else(|| Failure("missing --initial (and no query in the document)".into()))?;
    let target = args
        .target
        .clone()
        .or_else(|| from_doc.map(|q| q.target.clone()))
        .ok_or_else(|| Failure("missing --target (and no query in the document)".into()))?;
    let reduced = if is_nonconsuming(&net) {
        net.clone()
    } else {
        make_nonconsuming(&net)
    };
    let query = CoverQuery::by_name(reduced, &initial, &target)?;
    Ok(Loaded {
        original: net,
        query,
    })
}

fn write_out(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure(format!("write failed: {e}")))
}

fn print_verdict(out: &mut dyn Write, v: &OracleVerdict, trace: String) -> CliResult<()> {
    write_out(
        out,
        &format!(
            "{}\nstates explored: {}\n{trace}",
            v.label(),
            v.states_explored
        ),
    )
}

fn execute(cli: Cli, out: &mut dyn Write) -> CliResult<i32> {
    match cli.command {
        Command::Check {
            query,
            streaming,
            force,
            budget,
        } => {
            let loaded = resolve(&query)?;
            let q = &loaded.query;
            if streaming {
                let yes = exists_cover_streaming(q, budget, force)?;
                write_out(out, if yes { "YES\n" } else { "NO\n" })?;
                return Ok(if yes { EXIT_YES } else { EXIT_NO });
            }
            let alphabet = q.saturator().alphabet().clone();
            match exists_cover(q)? {
                CoverVerdict::Yes {
                    witness,
                    round,
                    index,
                } => {
                    write_out(
                        out,
                        &format!(
                            "YES\nwitness: {}\nround: {round}\nexpression: {}\n",
                            alphabet.render_expr(&witness),
                            index + 1
                        ),
                    )?;
                    Ok(EXIT_YES)
                }
                CoverVerdict::No { coverset } => {
                    write_out(
                        out,
                        &format!(
                            "NO\nexpressions: {}\nrounds: {}\n",
                            coverset.expressions.len(),
                            coverset.rounds
                        ),
                    )?;
                    Ok(EXIT_NO)
                }
            }
        }
        Command::Coverset { net, initial } => {
            let (doc, net) = load(&net)?;
            let initial = initial
                .or_else(|| doc.query.map(|q| q.initial))
                .ok_or_else(|| {
                    Failure("missing --initial (and no query in the document)".into())
                })?;
            let net = if is_nonconsuming(&net) {
                net
            } else {
                make_nonconsuming(&net)
            };
            let p = net
                .place_id(&initial)
                .ok_or_else(|| Failure(format!("unknown place '{initial}'")))?;
            let cs = compute_coverset_from(&net, p)?;
            let alphabet = tpncover::regions::Alphabet::for_net(&net, cmax(&net));
            let mut text: String = cs
                .expressions
                .iter()
                .map(|e| format!("{}\n", alphabet.render_expr(e)))
                .collect();
            text.push_str(&format!("rounds: {}\n", cs.rounds));
            write_out(out, &text)?;
            Ok(EXIT_YES)
        }
        Command::Reduce { net } => {
            let (doc, net) = load(&net)?;
            let mut reduced = NetDocument::from_net(&make_nonconsuming(&net));
            reduced.query = doc.query;
            write_out(out, &print_document(&reduced))?;
            Ok(EXIT_YES)
        }
        Command::Oracle {
            query,
            depth,
            states,
            concrete,
            m,
            denom,
        } => {
            let loaded = resolve(&query)?;
            let q = &loaded.query;
            let v = if concrete {
                concrete_bfs(
                    &loaded.original,
                    q.initial(),
                    q.target(),
                    m,
                    depth,
                    denom,
                    states,
                )
            } else {
                word_bfs(q, depth, states)
            };
            let alphabet = q.saturator().alphabet().clone();
            let trace = match &v.outcome {
                Outcome::Found(Trace::Words(steps)) => render_word_trace(&alphabet, steps),
                Outcome::Found(Trace::Concrete(steps)) => {
                    render_concrete_trace(&loaded.original, steps)
                }
                _ => String::new(),
            };
            print_verdict(out, &v, trace)?;
            Ok(EXIT_YES)
        }
        Command::Crosscheck {
            query,
            depth,
            states,
            m,
            concrete_depth,
            denom,
            concrete_states,
        } => {
            let loaded = resolve(&query)?;
            let budgets = Budgets {
                word_depth: depth,
                word_states: states,
                concrete_tokens: m,
                concrete_depth,
                denominator: denom,
                concrete_states,
            };
            let q = &loaded.query;
            let r = crosscheck(&loaded.original, q.initial(), q.target(), &budgets)?;
            let mut text = format!(
                "cover set: {}\nword search: {} ({} words)\nconcrete search: {} ({} markings, m={m})\n",
                if r.cover { "YES" } else { "NO" },
                r.word.label(),
                r.word.states_explored,
                r.concrete.label(),
                r.concrete.states_explored,
            );
            if r.agrees() {
                text.push_str("agreement: ok\n");
            } else {
                text.push_str("agreement: DIVERGENCE\n");
                for d in &r.divergences {
                    text.push_str(d);
                    if !d.ends_with('\n') {
                        text.push('\n');
                    }
                }
            }
            write_out(out, &text)?;
            Ok(if r.agrees() {
                EXIT_YES
            } else {
                EXIT_DIVERGENCE
            })
        }
        Command::GenCircuit { circuit, vector } => {
            let c = Circuit::parse(&read(&circuit)?)
                .map_err(|e| Failure(format!("{}: {e}", circuit.display())))?;
            let v: BitVec = vector
                .parse()
                .map_err(|e: Error| Failure(format!("--vector: {e}")))?;
            let q = circuit_to_tpn(&c, &v)?;
            let doc = NetDocument::from_net(q.net()).with_query(INITIAL_PLACE, TARGET_TRANSITION);
            write_out(out, &print_document(&doc))?;
            Ok(EXIT_YES)
        }
        Command::Info { net } => {
            let (_, net) = load(&net)?;
            let reduced = make_nonconsuming(&net);
            let b2 = pair_bound(&reduced);
            let text = format!(
                "places: {}\ntransitions: {}\ncmax: {}\nnon-consuming: {}\nB(2): {}\n3*B(2): {}\n",
                net.places().len(),
                net.transitions().len(),
                cmax(&reduced),
                if is_nonconsuming(&net) { "yes" } else { "no" },
                b2,
                b2.clone() * 3u32,
            );
            write_out(out, &text)?;
            Ok(EXIT_YES)
        }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit code. Errors go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_ERROR
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_YES
            };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}
