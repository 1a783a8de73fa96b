//! Command dispatch: configuration, the subcommands and their JSON output.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value as Json};

use bosonext::aqn::{DualPbw, GupTable, ReducedWord};
use bosonext::cartan::CartanDatum;
use bosonext::globalbasis::GlobalBasis;
use bosonext::uqneg::Algebra;
use bosonext::verify;

use crate::cache;
use crate::eval::eval;
use crate::parse::parse;
use crate::render;
use crate::CliError;

#[derive(Parser)]
#[command(
    name = "bosonext",
    about = "Exact computations in the bosonic extension of a quantum unipotent coordinate ring",
    version
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: CommonOpts,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Args)]
pub struct CommonOpts {
    /// Finite-type preset, e.g. A2, B3, G2.
    #[arg(long = "type", global = true)]
    pub cartan_type: Option<String>,
    /// Cartan datum file: first line n, then n matrix rows, then one
    /// symmetrizer row.
    #[arg(long, global = true)]
    pub cartan_file: Option<PathBuf>,
    /// Reduced word for the longest element, comma-separated 1-based indices
    /// (default: the lexicographically smallest one).
    #[arg(long, global = true)]
    pub rw: Option<String>,
    /// Height bound for weight-space computations.
    #[arg(long, global = true, default_value_t = 6)]
    pub max_height: usize,
    /// Number of series coefficients used by membership and orthonormality
    /// checks.
    #[arg(long, global = true, default_value_t = 8)]
    pub series_depth: usize,
    /// Cache file for global-basis tables (env BOSONEXT_CACHE also works).
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Trial count for randomized suites.
    #[arg(long, global = true, default_value_t = 25)]
    pub trials: u64,
    /// JSON output (the default).
    #[arg(long, global = true)]
    pub json: bool,
    /// Plain-text output.
    #[arg(long, global = true)]
    pub text: bool,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Normal form of an expression.
    Normalize { expr: String },
    /// The bilinear form (x, y).
    Form { x: String, y: String },
    /// The normalized bilinear form <<x, y>> (homogeneous arguments).
    Pair { x: String, y: String },
    /// Basis and Gram matrix of one weight space of U_q^-.
    Gram {
        /// Weight coordinates over the simple roots, e.g. 1,1.
        #[arg(long)]
        weight: String,
    },
    /// Global-basis table over a level window (finite type).
    GbTable {
        /// Level window a,b.
        #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
        levels: String,
        /// Total strong-height bound.
        #[arg(long, default_value_t = 2)]
        max_sh: usize,
    },
    /// Run a verification suite: relations, serial, closed-forms, forms,
    /// gram, boson, gup, gb, integrality, standard, or all.
    Verify {
        #[arg(long)]
        suite: String,
    },
}

fn parse_csv_i32(text: &str) -> Result<Vec<i32>, CliError> {
    text.split(',')
        .map(|t| t.trim().parse::<i32>().map_err(|_| CliError::usage(format!("bad integer '{t}'"))))
        .collect()
}

fn cartan_from_opts(opts: &CommonOpts) -> Result<CartanDatum, CliError> {
    match (&opts.cartan_type, &opts.cartan_file) {
        (Some(t), None) => CartanDatum::preset(t).map_err(|e| CliError::usage(e.to_string())),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            CartanDatum::from_text(&text).map_err(|e| CliError::usage(e.to_string()))
        }
        (Some(_), Some(_)) => Err(CliError::usage("give either --type or --cartan-file, not both")),
        (None, None) => Err(CliError::usage("a Cartan datum is required: --type or --cartan-file")),
    }
}

fn reduced_word_from_opts(opts: &CommonOpts, alg: &Algebra) -> Result<ReducedWord, CliError> {
    match &opts.rw {
        Some(text) => {
            let word: Result<Vec<usize>, CliError> = text
                .split(',')
                .map(|t| {
                    let v: usize = t
                        .trim()
                        .parse()
                        .map_err(|_| CliError::usage(format!("bad index '{t}' in --rw")))?;
                    if v == 0 {
                        return Err(CliError::usage("--rw indices are 1-based"));
                    }
                    Ok(v - 1)
                })
                .collect();
            Ok(ReducedWord::new(alg, word?)?)
        }
        None => Ok(ReducedWord::lex_smallest(alg)?),
    }
}

fn cache_path(opts: &CommonOpts) -> Option<PathBuf> {
    opts.cache
        .clone()
        .or_else(|| std::env::var_os("BOSONEXT_CACHE").map(PathBuf::from))
}

fn emit(opts: &CommonOpts, json_value: Json, text_value: String) {
    if opts.text && !opts.json {
        println!("{text_value}");
    } else {
        println!("{json_value}");
    }
}

fn report_json(rep: &verify::SuiteReport) -> Json {
    json!({
        "suite": rep.suite,
        "passed": rep.passed,
        "seed": rep.seed,
        "trials": rep.trials,
        "checks": rep.checks.len(),
        "failures": rep.failures().iter().map(|f| json!({
            "name": f.name,
            "detail": f.detail,
        })).collect::<Vec<_>>(),
    })
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let opts = &cli.opts;
    let cartan = cartan_from_opts(opts)?;
    let alg = Arc::new(
        Algebra::new(cartan.clone())
            .with_max_height(opts.max_height)
            .with_series_depth(opts.series_depth),
    );
    match &cli.cmd {
        Cmd::Normalize { expr } => {
            let parsed = parse(expr)?;
            let value = eval(&alg, &parsed)?.into_elem();
            emit(
                opts,
                json!({ "expr": expr, "terms": render::elem_json(&value) }),
                render::elem_text(&value),
            );
        }
        Cmd::Form { x, y } => {
            let a = eval(&alg, &parse(x)?)?.into_elem();
            let b = eval(&alg, &parse(y)?)?.into_elem();
            let v = alg.hform(&a, &b)?;
            emit(opts, json!({ "value": v.to_string() }), v.to_string());
        }
        Cmd::Pair { x, y } => {
            let a = eval(&alg, &parse(x)?)?.into_elem();
            let b = eval(&alg, &parse(y)?)?.into_elem();
            let v = alg.pairform(&a, &b)?;
            emit(opts, json!({ "value": v.to_string() }), v.to_string());
        }
        Cmd::Gram { weight } => {
            let coords = parse_csv_i32(weight)?;
            if coords.len() != alg.rank() || coords.iter().any(|&a| a < 0) {
                return Err(CliError::usage(format!(
                    "--weight needs {} nonnegative coordinates",
                    alg.rank()
                )));
            }
            let depth: Vec<usize> = coords.iter().map(|&a| a as usize).collect();
            let basis = alg.weight_basis(&depth)?;
            let words: Vec<Vec<usize>> = basis
                .words
                .iter()
                .map(|w| w.iter().map(|&i| i + 1).collect())
                .collect();
            let gram: Vec<Vec<String>> = basis
                .gram
                .iter()
                .map(|row| row.iter().map(|c| c.to_string()).collect())
                .collect();
            let text = words
                .iter()
                .zip(&gram)
                .map(|(w, row)| format!("{w:?}: {}", row.join(", ")))
                .collect::<Vec<_>>()
                .join("\n");
            emit(opts, json!({ "weight": coords, "basis": words, "gram": gram }), text);
        }
        Cmd::GbTable { levels, max_sh } => {
            let window = parse_csv_i32(levels)?;
            if window.len() != 2 || window[0] > window[1] {
                return Err(CliError::usage("--levels needs a,b with a <= b"));
            }
            let rw = reduced_word_from_opts(opts, &alg)?;
            let word = rw.word.clone();
            let pbw = DualPbw::new(&alg, rw)?;
            let gb = GlobalBasis::new(Arc::new(GupTable::new(alg.clone(), pbw)));
            let path = cache_path(opts);
            if let Some(p) = &path {
                cache::load(p, &cartan, &word, &gb)?;
            }
            let mut rows = Vec::new();
            let mut text_rows = Vec::new();
            for b in gb.indices_in_window((window[0], window[1]), *max_sh)? {
                let entry = gb.g_elem(&b)?;
                let gt = gb.g_tilde(&b)?;
                let self_pairing = alg.hform(&gt, &gt)?;
                let prefix: Vec<String> = self_pairing
                    .series_at_zero_rational(opts.series_depth)?
                    .iter()
                    .map(|c| c.to_string())
                    .collect();
                let index: Vec<(i32, Vec<usize>)> = b
                    .entries
                    .iter()
                    .map(|(k, v)| (*k, v.to_vec()))
                    .collect();
                text_rows.push(format!("{index:?} -> {}", render::elem_text(&entry.element)));
                rows.push(json!({
                    "index": index,
                    "weight": entry.weight.0,
                    "element": render::elem_json(&entry.element),
                    "self_pairing_prefix": prefix,
                }));
            }
            if let Some(p) = &path {
                cache::save(p, &cartan, &word, &gb)?;
            }
            emit(opts, json!({ "rows": rows }), text_rows.join("\n"));
        }
        Cmd::Verify { suite } => {
            let run_one = |name: &str| -> Result<verify::SuiteReport, CliError> {
                let rw = opts
                    .rw
                    .as_ref()
                    .map(|_| reduced_word_from_opts(opts, &alg).map(|r| r.word))
                    .transpose()?;
                let rep = match name {
                    "relations" => verify::suite_relations(&cartan, opts.seed, opts.trials)?,
                    "serial" => verify::suite_serial(&cartan, opts.seed, opts.trials)?,
                    "closed-forms" => verify::suite_closed_forms(&cartan)?,
                    "forms" => verify::suite_forms(&cartan, opts.seed, opts.trials)?,
                    "gram" => verify::suite_gram(&cartan, 2)?,
                    "boson" => verify::suite_boson(&cartan, opts.seed, opts.trials)?,
                    "gup" => verify::suite_gup(&cartan, rw, 4, opts.series_depth)?,
                    "gb" => verify::suite_gb(&cartan, rw, (0, 1), 3, opts.series_depth)?,
                    "integrality" => {
                        verify::suite_integrality(&cartan, opts.seed, opts.trials)?
                    }
                    "standard" => verify::suite_standard(&cartan, rw, (0, 1), 3)?,
                    other => {
                        return Err(CliError::usage(format!("unknown suite '{other}'")));
                    }
                };
                Ok(rep)
            };
            if suite == "all" {
                let names = [
                    "relations",
                    "serial",
                    "closed-forms",
                    "forms",
                    "gram",
                    "boson",
                    "integrality",
                ];
                let mut reports = Vec::new();
                let mut all = true;
                for name in names {
                    let rep = run_one(name)?;
                    all &= rep.passed;
                    reports.push(report_json(&rep));
                }
                // finite-type-only suites
                if cartan.is_finite_type() {
                    for name in ["gup", "gb", "standard"] {
                        let rep = run_one(name)?;
                        all &= rep.passed;
                        reports.push(report_json(&rep));
                    }
                }
                emit(
                    opts,
                    json!({ "passed": all, "suites": reports }),
                    format!("all suites passed: {all}"),
                );
            } else {
                let rep = run_one(suite)?;
                emit(
                    opts,
                    report_json(&rep),
                    format!("suite {}: passed={}", rep.suite, rep.passed),
                );
            }
        }
    }
    Ok(())
}
