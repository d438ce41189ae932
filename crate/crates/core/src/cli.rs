//! Command-line surface. Every report is JSON (CSV for the flat scans);
//! exit codes are 0 on pass, 1 on a failed check, 2 on usage or
//! configuration errors.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::decomp::{check_axiom_a, check_axiom_b, measure_r, triangle, Scheme};
use crate::error::{Error, Result};
use crate::qm::{defect, Quasimorphism};
use crate::rational::fmt_rational;
use crate::report::{run_matrix, run_primitive};
use crate::words::{
    count_occurrences, enumerate_reduced, max_sms_split, parse_word, parse_word_strict, print_word, CountMode,
    GroupCtx, Word,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "freeqm", version, about = "Quasimorphisms, Δ-decompositions and cup-product primitives on free groups")]
pub struct Cli {
    /// Rank of the free group.
    #[arg(long, global = true, env = "FREEQM_RANK", default_value_t = 2)]
    pub rank: usize,
    /// Worker threads for the exhaustive scans (default: all cores).
    #[arg(long, global = true, env = "FREEQM_THREADS")]
    pub threads: Option<usize>,
    /// Report format for commands with flat output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Reject word literals that are not already reduced.
    #[arg(long, global = true)]
    pub strict_parse: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Word arithmetic and enumeration.
    #[command(subcommand)]
    Words(WordsCmd),
    /// Decompositions, triangles and the scheme axioms.
    #[command(subcommand)]
    Decomp(DecompCmd),
    /// Quasimorphism values and defects.
    #[command(subcommand)]
    Qm(QmCmd),
    /// Primitive verification.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Debug, Subcommand)]
pub enum WordsCmd {
    /// Freely reduce a word.
    Reduce { word: String },
    /// Signed occurrence count of a pattern.
    Count {
        #[arg(long)]
        w: String,
        #[arg(long, default_value = "big")]
        mode: String,
        word: String,
    },
    /// Split a selfoverlapping word as s m s.
    SmsSplit { word: String },
    /// List reduced words up to a length.
    Enumerate {
        #[arg(long)]
        max_len: usize,
    },
}

#[derive(Debug, Args)]
pub struct SchemeArg {
    /// `brooks:w=<word>`, `rolli`, `sms:w=<word>` or `letters`.
    #[arg(long)]
    pub scheme: String,
}

#[derive(Debug, Subcommand)]
pub enum DecompCmd {
    /// Decomposition of a word.
    Show {
        #[command(flatten)]
        scheme: SchemeArg,
        word: String,
    },
    /// Single-word axioms on all words up to a length.
    CheckA {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, alias = "budget")]
        max_len: usize,
    },
    /// The (g, h)-triangle.
    Triangle {
        #[command(flatten)]
        scheme: SchemeArg,
        g: String,
        h: String,
    },
    /// Largest r-part over pairs with |g| + |h| <= budget, per budget.
    MeasureR {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, num_args = 1.., required = true)]
        budget: Vec<usize>,
    },
    /// Bounded r-parts with a given R.
    CheckB {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        budget: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum QmCmd {
    /// Value of a quasimorphism.
    Eval {
        #[arg(long)]
        qm: String,
        word: String,
    },
    /// Largest |δφ(g, h)| over pairs with |g| + |h| <= budget, per budget.
    Defect {
        #[arg(long)]
        qm: String,
        #[arg(long, num_args = 1.., required = true)]
        budget: Vec<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// Build β for (qm, ω) and check δβ = δφ∪ω, the reduced form and the bound.
    Primitive {
        #[arg(long)]
        qm: String,
        #[arg(long)]
        omega: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        budget: usize,
        /// Seed for cobound specs that omit one.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include wall-clock runtimes (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Run the standard (qm, ω, k) matrix.
    Matrix {
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        timing: bool,
    },
}

struct Env {
    ctx: GroupCtx,
    format: Format,
    strict: bool,
}

impl Env {
    fn word(&self, text: &str) -> Result<Word> {
        if self.strict {
            parse_word_strict(text, self.ctx)
        } else {
            parse_word(text, self.ctx)
        }
    }

    fn scheme(&self, descriptor: &str) -> Result<Scheme> {
        Scheme::parse(descriptor, self.ctx)
    }
}

/// What a command produced: text to print and whether its checks passed.
struct Outcome {
    text: String,
    pass: bool,
}

impl Outcome {
    fn text(text: impl Into<String>) -> Self {
        Outcome {
            text: text.into(),
            pass: true,
        }
    }

    fn json<T: Serialize>(value: &T, pass: bool) -> Result<Self> {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
        Ok(Outcome { text, pass })
    }
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut out = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    out.write_record(header).map_err(io)?;
    for row in rows {
        out.write_record(&row).map_err(io)?;
    }
    let bytes = out.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8").trim_end().to_string())
}

fn witness_cols(w: &Option<(String, String)>) -> [String; 2] {
    match w {
        Some((g, h)) => [g.clone(), h.clone()],
        None => [String::new(), String::new()],
    }
}

fn words_cmd(env: &Env, cmd: &WordsCmd) -> Result<Outcome> {
    match cmd {
        WordsCmd::Reduce { word } => Ok(Outcome::text(print_word(&env.word(word)?))),
        WordsCmd::Count { w, mode, word } => {
            let mode: CountMode = mode.parse()?;
            let n = count_occurrences(&env.word(w)?, &env.word(word)?, mode)?;
            Ok(Outcome::text(n.to_string()))
        }
        WordsCmd::SmsSplit { word } => Ok(Outcome::text(match max_sms_split(&env.word(word)?) {
            Some((s, m)) => format!("s={} m={}", print_word(&s), print_word(&m)),
            None => "none".to_string(),
        })),
        WordsCmd::Enumerate { max_len } => {
            let words: Vec<String> = enumerate_reduced(env.ctx, *max_len).map(|g| print_word(&g)).collect();
            Ok(Outcome::text(words.join("\n")))
        }
    }
}

#[derive(Serialize)]
struct TriangleOut {
    g: String,
    h: String,
    dg: Vec<String>,
    dh: Vec<String>,
    dgh: Vec<String>,
    c1: Vec<String>,
    c2: Vec<String>,
    c3: Vec<String>,
    r1: Vec<String>,
    r2: Vec<String>,
    r3: Vec<String>,
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "K_prime")]
    k_prime: usize,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "L_prime")]
    l_prime: usize,
    #[serde(rename = "M")]
    m: usize,
}

fn decomp_cmd(env: &Env, cmd: &DecompCmd) -> Result<Outcome> {
    match cmd {
        DecompCmd::Show { scheme, word } => {
            let seq = env.scheme(&scheme.scheme)?.decompose(&env.word(word)?);
            Outcome::json(&seq.to_strings(), true).map(|mut o| {
                o.text = serde_json::to_string(&seq.to_strings()).expect("strings serialize");
                o
            })
        }
        DecompCmd::CheckA { scheme, max_len } => {
            let s = env.scheme(&scheme.scheme)?;
            let report = check_axiom_a(&s, &s.descriptor(), env.ctx, *max_len);
            Outcome::json(&report, report.pass)
        }
        DecompCmd::Triangle { scheme, g, h } => {
            let s = env.scheme(&scheme.scheme)?;
            let (g, h) = (env.word(g)?, env.word(h)?);
            let t = triangle(&s, &g, &h)?;
            let out = TriangleOut {
                g: print_word(&g),
                h: print_word(&h),
                dg: t.dg.to_strings(),
                dh: t.dh.to_strings(),
                dgh: t.dgh.to_strings(),
                c1: t.c1.to_strings(),
                c2: t.c2.to_strings(),
                c3: t.c3.to_strings(),
                r1: t.r1.to_strings(),
                r2: t.r2.to_strings(),
                r3: t.r3.to_strings(),
                k: t.k(),
                k_prime: t.k_prime(),
                l: t.l(),
                l_prime: t.l_prime(),
                m: t.m(),
            };
            Outcome::json(&out, true)
        }
        DecompCmd::MeasureR { scheme, budget } => {
            let s = env.scheme(&scheme.scheme)?;
            let reports: Vec<_> = budget
                .iter()
                .map(|&b| measure_r(&s, &s.descriptor(), env.ctx, b))
                .collect();
            match env.format {
                Format::Json => Outcome::json(&reports, true),
                Format::Csv => {
                    let rows = reports
                        .iter()
                        .map(|r| {
                            let [g, h] = witness_cols(&r.witness);
                            vec![
                                r.scheme.clone(),
                                r.budget.to_string(),
                                r.pairs_checked.to_string(),
                                r.r_hat.to_string(),
                                g,
                                h,
                            ]
                        })
                        .collect();
                    let header = ["scheme", "budget", "pairs_checked", "r_hat", "witness_g", "witness_h"];
                    Ok(Outcome::text(csv_table(&header, rows)?))
                }
            }
        }
        DecompCmd::CheckB { scheme, r, budget } => {
            let s = env.scheme(&scheme.scheme)?;
            let report = check_axiom_b(&s, &s.descriptor(), env.ctx, *budget, *r);
            Outcome::json(&report, report.pass)
        }
    }
}

fn qm_cmd(env: &Env, cmd: &QmCmd) -> Result<Outcome> {
    match cmd {
        QmCmd::Eval { qm, word } => {
            let phi = Quasimorphism::parse(qm, env.ctx)?;
            Ok(Outcome::text(fmt_rational(&phi.eval(&env.word(word)?))))
        }
        QmCmd::Defect { qm, budget } => {
            let phi = Quasimorphism::parse(qm, env.ctx)?;
            let reports: Vec<_> = budget.iter().map(|&b| defect(&phi, env.ctx, b)).collect();
            match env.format {
                Format::Json => Outcome::json(&reports, true),
                Format::Csv => {
                    let rows = reports
                        .iter()
                        .map(|r| {
                            let [g, h] = witness_cols(&r.witness);
                            vec![
                                r.qm.clone(),
                                r.budget.to_string(),
                                r.pairs_checked.to_string(),
                                fmt_rational(&r.d_hat),
                                g,
                                h,
                            ]
                        })
                        .collect();
                    let header = ["qm", "budget", "pairs_checked", "d_hat", "witness_g", "witness_h"];
                    Ok(Outcome::text(csv_table(&header, rows)?))
                }
            }
        }
    }
}

fn verify_cmd(env: &Env, cmd: &VerifyCmd) -> Result<Outcome> {
    match cmd {
        VerifyCmd::Primitive {
            qm,
            omega,
            k,
            budget,
            seed,
            timing,
        } => {
            let run = run_primitive(env.ctx, qm, omega, *k, *budget, *seed, *timing)?;
            if !run.omega_cocycle.holds {
                eprintln!("warning: ω = {omega} is not a cocycle on the budget; the identity is not expected to hold");
            }
            Outcome::json(&run, run.pass)
        }
        VerifyCmd::Matrix { budget, seed, timing } => {
            let report = run_matrix(env.ctx, *budget, *seed, *timing)?;
            Outcome::json(&report, report.pass)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Consistency(_) => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}

/// Runs a parsed command line, writing the report to `out`. Returns the
/// process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = GroupCtx::new(cli.rank).and_then(|ctx| {
        let env = Env {
            ctx,
            format: cli.format,
            strict: cli.strict_parse,
        };
        match &cli.command {
            Command::Words(c) => words_cmd(&env, c),
            Command::Decomp(c) => decomp_cmd(&env, c),
            Command::Qm(c) => qm_cmd(&env, c),
            Command::Verify(c) => verify_cmd(&env, c),
        }
    });
    match result {
        Ok(outcome) => {
            let _ = writeln!(out, "{}", outcome.text);
            if outcome.pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point of the `freeqm` binary.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not configure {n} threads: {e}");
        }
    }
    run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut argv = vec!["freeqm"];
        argv.extend_from_slice(args);
        let cli = Cli::try_parse_from(argv).unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&cli, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap().trim_end().to_string(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn words_examples() {
        assert_eq!(call(&["words", "sms-split", "aba"]).1, "s=a m=b");
        assert_eq!(call(&["words", "count", "--w", "aba", "--mode", "big", "ababa"]).1, "2");
        assert_eq!(call(&["words", "reduce", "abB"]).1, "a");
        assert_eq!(call(&["words", "reduce", "aA"]).1, "1");
        assert_eq!(call(&["words", "sms-split", "ab"]).1, "none");
        let (code, _, err) = call(&["--strict-parse", "words", "reduce", "abB"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("not reduced"));
        assert_eq!(call(&["words", "reduce", "abc"]).0, EXIT_USAGE);
        assert_eq!(call(&["--rank", "3", "words", "reduce", "abc"]).1, "abc");
    }

    #[test]
    fn decomp_examples() {
        assert_eq!(call(&["decomp", "show", "--scheme", "rolli", "aabbb"]).1, r#"["aa","bbb"]"#);
        let (code, out, _) = call(&["decomp", "check-a", "--scheme", "brooks:w=ab", "--max-len", "6"]);
        assert_eq!(code, EXIT_PASS);
        assert!(out.contains("\"pass\": true"));
        let (code, _, err) = call(&["decomp", "show", "--scheme", "sms:w=abab", "ab"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("configuration"));
        let (code, out, _) = call(&["decomp", "triangle", "--scheme", "brooks:w=ab", "aab", "Bab"]);
        assert_eq!(code, EXIT_PASS);
        assert!(out.contains("\"K_prime\""));
    }

    #[test]
    fn csv_tables() {
        let (code, out, _) = call(&["--format", "csv", "qm", "defect", "--qm", "hom:a=1,b=1", "--budget", "2", "3"]);
        assert_eq!(code, EXIT_PASS);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "qm,budget,pairs_checked,d_hat,witness_g,witness_h");
        assert!(lines[1].starts_with("\"hom:a=1/1,b=1/1\",2,"));
        assert_eq!(lines.len(), 3);
        let (_, out, _) = call(&["--format", "csv", "decomp", "measure-r", "--scheme", "rolli", "--budget", "4"]);
        assert!(out.lines().nth(1).unwrap().starts_with("rolli,4,"));
    }

    #[test]
    fn verify_examples() {
        let (code, out, _) = call(&[
            "verify", "primitive", "--qm", "brooks:w=ab", "--omega", "qmcobound:w=ba", "--k", "2", "--budget", "5",
        ]);
        assert_eq!(code, EXIT_PASS);
        assert!(out.contains("\"max_residual\": \"0/1\""));
        assert!(out.contains("\"runtime_ms\": null"));
        let again = call(&[
            "verify", "primitive", "--qm", "brooks:w=ab", "--omega", "qmcobound:w=ba", "--k", "2", "--budget", "5",
        ]);
        assert_eq!(out, again.1);
        let (code, _, _) = call(&["verify", "primitive", "--qm", "zero", "--omega", "zero:k=2", "--k", "2", "--budget", "4"]);
        assert_eq!(code, EXIT_PASS);
        let (code, _, err) = call(&["verify", "primitive", "--qm", "zero", "--omega", "zero:k=2", "--k", "3", "--budget", "4"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("degree"));
    }
}
