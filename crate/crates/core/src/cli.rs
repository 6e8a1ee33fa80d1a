//! Command line front end.
//!
//! Automorphism files contain either one `x -> word` line per
//! generator, optionally followed by an `inverse:` block of the same shape,
//! or a single `moves:` line:
//!
//! ```text
//! # the standard Nielsen move
//! a -> ab
//! b -> b
//!
//! moves: N(a,b); N(b,A); I(a); P(abc)
//! ```
//!
//! `N(x,y)` sends `x` to `xy`, `I(x)` inverts `x`, and `P(abc)` is the
//! cycle `a -> b -> c -> a`. A move word `m1; m2; ...` denotes `m1∘m2∘...`.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::automorphism::{
    format_moves, nielsen_count, nielsen_decompose, Automorphism, ElementaryMove, GeneratorMap,
};
use crate::cylinders::{
    boundary_prefixes, cylinder_image_raw, dual_apply_general, formula_constants,
    reduce_prefix_set, reduce_prefix_set_randomized, sets_equivalent, PrefixSet,
};
use crate::dual::{build_collection, dual_apply_fast, table_for, SuffixTable};
use crate::error::{Error, Result};
use crate::growth::{build_transition_matrix, empirical_growth, letter_order};
use crate::oracle::{boundary_image_prefixes, OracleConfig};
use crate::sample;
use crate::words::{Basis, ReducedWord};

const DEFAULT_ENUMERATION_BUDGET: u64 = 2_000_000;
const DEFAULT_STATE_BUDGET: u64 = 1_000_000;
const DEFAULT_LETTER_BUDGET: u64 = 5_000_000;
const DEFAULT_ORACLE_BUDGET: u64 = 10_000_000;

#[derive(Parser, Debug, Clone)]
#[command(name = "freedual", version, about = "Dual automorphisms of free groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Rank of the free group; inferred from the automorphism when omitted.
    #[arg(long, global = true)]
    pub rank: Option<usize>,
    /// Automorphism as a move word, e.g. "N(a,b); N(b,a)".
    #[arg(long, global = true, conflicts_with = "auto")]
    pub moves: Option<String>,
    /// Automorphism file.
    #[arg(long, global = true, value_name = "FILE")]
    pub auto: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomised checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Extension depth for `image`; prefix length for `oracle-check`.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Work cap: enumerated words (`image`), formula states (`dual`,
    /// `verify`), letters (`growth`) or evaluations (`oracle-check`).
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Number of dual iterates for `growth`.
    #[arg(long, global = true, default_value_t = 10)]
    pub kmax: usize,
    /// Eigenvalue tolerance for `growth`.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Raw general-formula set for a cylinder, and its reduced form.
    Image { word: String },
    /// The dual image of a word through the suffix table, checked against
    /// the general formula.
    Dual { word: String },
    /// The suffix table U(x) for every letter.
    Collection,
    /// Transition matrix, eigenvalue and empirical growth of the dual.
    Growth,
    /// Randomised invariant suite.
    Verify {
        /// Number of random automorphisms.
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Nielsen decomposition of the automorphism.
    Decompose,
    /// Compares the dual image against the brute-force boundary oracle.
    OracleCheck { word: String },
}

/// Rendered result of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_cli<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(text)
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    execute(cli).unwrap_or_else(|e| Outcome {
        code: e.exit_code(),
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    })
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let o = &cli.opts;
    match &cli.command {
        Command::Image { word } => image(o, word),
        Command::Dual { word } => dual(o, word),
        Command::Collection => collection(o),
        Command::Growth => growth(o),
        Command::Verify { count } => verify(o, *count),
        Command::Decompose => decompose(o),
        Command::OracleCheck { word } => oracle_check(o, word),
    }
}

// ---- automorphism files ----

/// An automorphism together with the basis its file was written in.
#[derive(Clone, Debug)]
pub struct ParsedAutomorphism {
    pub basis: Basis,
    pub automorphism: Automorphism,
}

/// Parses an automorphism file. `rank`, when given, must match the number of
/// generator lines, and bounds the letters a move word may use.
pub fn parse_automorphism_file(text: &str, rank: Option<usize>) -> Result<ParsedAutomorphism> {
    let mut forward: Vec<ImageLine> = Vec::new();
    let mut inverse: Vec<ImageLine> = Vec::new();
    let mut moves: Option<(usize, usize, &str)> = None;
    let mut in_inverse = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if trimmed == "inverse:" {
            if in_inverse || forward.is_empty() {
                return Err(Error::parse(line, indent + 1, "unexpected `inverse:`"));
            }
            in_inverse = true;
        } else if let Some(rest) = trimmed.strip_prefix("moves:") {
            if moves.is_some() || !forward.is_empty() {
                return Err(Error::parse(
                    line,
                    indent + 1,
                    "`moves:` must be the only automorphism description",
                ));
            }
            moves = Some((line, indent + "moves:".len(), rest));
        } else {
            if moves.is_some() {
                return Err(Error::parse(
                    line,
                    indent + 1,
                    "`moves:` must be the only automorphism description",
                ));
            }
            let parsed = image_line(line, content)?;
            if in_inverse {
                inverse.push(parsed);
            } else {
                forward.push(parsed);
            }
        }
    }

    if let Some((line, offset, rest)) = moves {
        let (basis, moves) = parse_move_word_at(rest, rank, line, offset)?;
        let automorphism = Automorphism::from_moves(basis.rank(), &moves)?;
        return Ok(ParsedAutomorphism {
            basis,
            automorphism,
        });
    }
    if forward.is_empty() {
        return Err(Error::parse(1, 1, "no generator images or `moves:` line"));
    }

    let mut names: Vec<char> = forward.iter().map(|l| l.name).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        let dup = forward.iter().filter(|l| l.name == w[0]).nth(1).expect("duplicate");
        return Err(Error::parse(dup.line, dup.name_column, format!("{:?} given twice", w[0])));
    }
    if let Some(r) = rank {
        if r != names.len() {
            return Err(Error::Usage(format!(
                "file defines {} generators but rank {r} was requested",
                names.len()
            )));
        }
    }
    let basis = Basis::new(names)?;
    let forward_map = image_map(&basis, &forward)?;
    let automorphism = if inverse.is_empty() {
        Automorphism::from_forward(forward_map)?
    } else {
        let inverse_map = image_map(&basis, &inverse)?;
        Automorphism::from_pair(forward_map, inverse_map)?
    };
    Ok(ParsedAutomorphism {
        basis,
        automorphism,
    })
}

struct ImageLine {
    line: usize,
    name: char,
    name_column: usize,
    word: String,
    word_column: usize,
}

fn image_line(line: usize, content: &str) -> Result<ImageLine> {
    let Some(arrow) = content.find("->") else {
        let col = content.len() - content.trim_start().len() + 1;
        return Err(Error::parse(line, col, "expected `x -> word`"));
    };
    let lhs = &content[..arrow];
    let name_column = lhs.len() - lhs.trim_start().len() + 1;
    let mut chars = lhs.trim().chars();
    let name = match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => c,
        _ => {
            return Err(Error::parse(
                line,
                name_column,
                "left side must be a single lowercase generator",
            ))
        }
    };
    let rhs = &content[arrow + 2..];
    let word_column = arrow + 3 + (rhs.len() - rhs.trim_start().len());
    Ok(ImageLine {
        line,
        name,
        name_column,
        word: rhs.trim().to_string(),
        word_column,
    })
}

fn image_map(basis: &Basis, lines: &[ImageLine]) -> Result<GeneratorMap> {
    let mut images: Vec<Option<ReducedWord>> = vec![None; basis.rank()];
    for l in lines {
        let Some(g) = basis.names().iter().position(|&c| c == l.name) else {
            return Err(Error::parse(
                l.line,
                l.name_column,
                format!("{:?} is not a generator of the forward map", l.name),
            ));
        };
        if images[g].is_some() {
            return Err(Error::parse(l.line, l.name_column, format!("{:?} given twice", l.name)));
        }
        images[g] = Some(parse_word_at(basis, &l.word, l.line, l.word_column)?);
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(g, w)| {
            w.ok_or_else(|| Error::Usage(format!("no image given for {:?}", basis.names()[g])))
        })
        .collect::<Result<Vec<_>>>()?;
    GeneratorMap::new(images)
}

/// Parses a word, reporting errors at `line` with columns shifted so that
/// the word starts at `column`.
pub fn parse_word_at(basis: &Basis, text: &str, line: usize, column: usize) -> Result<ReducedWord> {
    basis.parse_word(text).map_err(|e| match e {
        Error::Parse {
            column: c, message, ..
        } => Error::parse(line, column + c - 1, message),
        other => other,
    })
}

/// Parses `N(a,b); I(a); P(ab)`. The rank is `rank` if given, otherwise
/// the number of generators up to the last letter used (at least 2).
pub fn parse_move_word(text: &str, rank: Option<usize>) -> Result<(Basis, Vec<ElementaryMove>)> {
    parse_move_word_at(text, rank, 1, 0)
}

fn parse_move_word_at(
    text: &str,
    rank: Option<usize>,
    line: usize,
    offset: usize,
) -> Result<(Basis, Vec<ElementaryMove>)> {
    let mut tokens: Vec<(usize, char, Vec<char>)> = Vec::new();
    let mut start = 0;
    for piece in text.split(';') {
        let lead = piece.len() - piece.trim_start().len();
        let column = offset + start + lead + 1;
        start += piece.len() + 1;
        let token = piece.trim();
        if token.is_empty() {
            continue;
        }
        let bad = || Error::parse(line, column, format!("malformed move {token:?}"));
        let (head, rest) = token.split_at(1);
        let kind = head.chars().next().ok_or_else(bad)?;
        let inner = rest
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let args: Vec<char> = inner.chars().filter(|c| !c.is_whitespace() && *c != ',').collect();
        if args.iter().any(|c| !c.is_ascii_alphabetic()) {
            return Err(bad());
        }
        tokens.push((column, kind, args));
    }

    let needed = tokens
        .iter()
        .flat_map(|(_, _, a)| a.iter())
        .map(|c| (c.to_ascii_lowercase() as u8 - b'a') as usize + 1)
        .max()
        .unwrap_or(0);
    let rank = match rank {
        Some(r) => r,
        None => needed.max(2),
    };
    let basis = Basis::standard(rank)?;

    let mut moves = Vec::with_capacity(tokens.len());
    for (column, kind, args) in tokens {
        let err = |msg: String| Error::parse(line, column, msg);
        let letters = args
            .iter()
            .map(|&c| {
                basis
                    .letter_from_char(c)
                    .ok_or_else(|| err(format!("{c:?} is outside rank {rank}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let m = match (kind, letters.as_slice()) {
            ('N', [x, y]) if !x.is_inverse() => ElementaryMove::nielsen(x.generator(), *y),
            ('I', [x]) if !x.is_inverse() => ElementaryMove::Inversion(x.generator()),
            ('P', cycle) if cycle.len() >= 2 && cycle.iter().all(|x| !x.is_inverse()) => {
                let mut p: Vec<usize> = (0..rank).collect();
                for (i, x) in cycle.iter().enumerate() {
                    p[x.generator()] = cycle[(i + 1) % cycle.len()].generator();
                }
                ElementaryMove::Permutation(p)
            }
            _ => return Err(err(format!("malformed move starting with {kind:?}"))),
        };
        m.validate(rank).map_err(|e| err(e.to_string()))?;
        moves.push(m);
    }
    Ok((basis, moves))
}

fn load(o: &Options) -> Result<ParsedAutomorphism> {
    match (&o.moves, &o.auto) {
        (Some(m), _) => {
            let (basis, moves) = parse_move_word(m, o.rank)?;
            let automorphism = Automorphism::from_moves(basis.rank(), &moves)?;
            Ok(ParsedAutomorphism {
                basis,
                automorphism,
            })
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
            parse_automorphism_file(&text, o.rank)
        }
        (None, None) => Err(Error::Usage("an automorphism is required: pass --moves or --auto".into())),
    }
}

// ---- rendering helpers ----

fn words_json(basis: &Basis, set: &PrefixSet) -> Value {
    Value::from(set.to_strings(basis))
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn word_set_text(basis: &Basis, words: &BTreeSet<ReducedWord>) -> String {
    let items: Vec<String> = words.iter().map(|w| basis.format_word(w)).collect();
    format!("{{{}}}", items.join(", "))
}

// ---- commands ----

fn image(o: &Options, word: &str) -> Result<Outcome> {
    let p = load(o)?;
    let (basis, phi) = (&p.basis, &p.automorphism);
    let u = parse_word_at(basis, word, 1, 1)?;
    let (t, k) = formula_constants(phi);
    let depth = o.depth.unwrap_or(k);
    let budget = o.budget.unwrap_or(DEFAULT_ENUMERATION_BUDGET) as u128;
    let raw = cylinder_image_raw(phi, basis, &u, depth, t, budget).map_err(|e| match e {
        Error::Resource(msg) => Error::Resource(format!(
            "{msg}; the formula's depth here is {k}, pass a smaller --depth for a partial view"
        )),
        other => other,
    })?;
    let reduced = reduce_prefix_set(&raw, basis.rank());
    let stdout = if o.json {
        render_json(&json!({
            "word": basis.format_word(&u),
            "depth": depth,
            "full_depth": k,
            "truncation": t,
            "raw": words_json(basis, &raw),
            "reduced": words_json(basis, &reduced),
        }))
    } else {
        let note = if depth < k { " (below the full depth)" } else { "" };
        format!(
            "depth {depth} of {k}{note}, truncation {t}\nraw: {}\nreduced: {}\n",
            raw.format(basis),
            reduced.format(basis)
        )
    };
    Ok(Outcome::ok(stdout))
}

fn dual(o: &Options, word: &str) -> Result<Outcome> {
    let p = load(o)?;
    let (basis, phi) = (&p.basis, &p.automorphism);
    let w = parse_word_at(basis, word, 1, 1)?;
    let table = table_for(phi)?;
    let fast = dual_apply_fast(&table, &w);
    let budget = o.budget.unwrap_or(DEFAULT_STATE_BUDGET) as usize;
    let general = match dual_apply_general(phi, basis, &w, budget) {
        Ok(s) => Some(s),
        Err(Error::Resource(_)) => None,
        Err(e) => return Err(e),
    };
    let agree = general.as_ref().map(|g| g == &fast);
    let stdout = if o.json {
        render_json(&json!({
            "word": basis.format_word(&w),
            "fast": words_json(basis, &fast),
            "general": general.as_ref().map(|g| words_json(basis, g)),
            "agree": agree,
        }))
    } else {
        let mut s = format!("{}\n", fast.format(basis));
        if agree == Some(false) {
            s += &format!("general formula: {}\n", general.as_ref().unwrap().format(basis));
        }
        s
    };
    let stderr = match agree {
        Some(true) => String::new(),
        Some(false) => "error: the suffix table and the general formula disagree\n".into(),
        None => format!("note: general formula skipped, it exceeds {budget} states\n"),
    };
    Ok(Outcome {
        code: if agree == Some(false) { 2 } else { 0 },
        stdout,
        stderr,
    })
}

fn collection(o: &Options) -> Result<Outcome> {
    let p = load(o)?;
    let basis = &p.basis;
    let table = table_for(&p.automorphism)?;
    let t = table.nielsen_count();
    let bound = 1u128.checked_shl(t as u32);
    let stdout = if o.json {
        let entries: serde_json::Map<String, Value> = table
            .entries()
            .map(|(x, s)| (basis.letter_char(x).to_string(), words_json(basis, s)))
            .collect();
        render_json(&json!({
            "table": entries,
            "t": t,
            "bound": bound.map(|b| b.to_string()),
            "max_card": table.max_card(),
        }))
    } else {
        let mut s = String::new();
        for (x, set) in table.entries() {
            s += &format!("U({}) = {}\n", basis.letter_char(x), set.format(basis));
        }
        s += &format!("t = {t}, max card = {}\n", table.max_card());
        s
    };
    Ok(Outcome::ok(stdout))
}

fn growth(o: &Options) -> Result<Outcome> {
    let p = load(o)?;
    let basis = &p.basis;
    let table = table_for(&p.automorphism)?;
    let budget = o.budget.unwrap_or(DEFAULT_LETTER_BUDGET) as usize;
    let est = empirical_growth(&table, o.kmax, budget, o.tol)?;
    let matrix = build_transition_matrix(&table);
    let stdout = if o.json {
        render_json(&json!({
            "lambda": est.lambda_matrix,
            "matrix": matrix.rows(),
            "letter_order": letter_order(basis),
            "empirical": est.empirical,
            "tail_limsup": est.tail_limsup,
            "partial": est.partial,
            "t": table.nielsen_count(),
        }))
    } else {
        let mut s = format!("lambda = {}\n", est.lambda_matrix);
        s += &format!("letters: {}\n", letter_order(basis).join(" "));
        for row in matrix.rows() {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            s += &format!("  {}\n", cells.join(" "));
        }
        for pt in &est.empirical {
            s += &format!("k = {:>3}  card = {:>8}  card^(1/k) = {:.6}\n", pt.k, pt.card, pt.ratio);
        }
        s += &format!("tail max of card^(1/k): {:.6}\n", est.tail_limsup);
        if est.partial {
            s += &format!("partial: stopped by the {budget}-letter budget\n");
        }
        s
    };
    Ok(Outcome::ok(stdout))
}

fn decompose(o: &Options) -> Result<Outcome> {
    let p = load(o)?;
    let moves = nielsen_decompose(p.automorphism.forward())?;
    let text = format_moves(&p.basis, &moves);
    let stdout = if o.json {
        render_json(&json!({
            "moves": text,
            "length": moves.len(),
            "nielsen": nielsen_count(&moves),
        }))
    } else {
        format!("{text}\n")
    };
    Ok(Outcome::ok(stdout))
}

fn oracle_check(o: &Options, word: &str) -> Result<Outcome> {
    let p = load(o)?;
    let (basis, phi) = (&p.basis, &p.automorphism);
    let u = parse_word_at(basis, word, 1, 1)?;
    let table = table_for(phi)?;
    let set = dual_apply_fast(&table, &u);
    let m = o.depth.unwrap_or_else(|| set.max_len().max(1));
    let cfg = OracleConfig {
        budget: o.budget.unwrap_or(DEFAULT_ORACLE_BUDGET),
        ..OracleConfig::new(m)
    };
    let oracle = boundary_image_prefixes(phi, basis, &u, &cfg)?;
    let expected = boundary_prefixes(&set, basis, m);
    let only_oracle: BTreeSet<ReducedWord> = oracle.prefixes.difference(&expected).cloned().collect();
    let only_table: BTreeSet<ReducedWord> = expected.difference(&oracle.prefixes).cloned().collect();
    let agree = only_oracle.is_empty() && only_table.is_empty();
    let stdout = if o.json {
        let list = |s: &BTreeSet<ReducedWord>| -> Vec<String> {
            s.iter().map(|w| basis.format_word(w)).collect()
        };
        render_json(&json!({
            "word": basis.format_word(&u),
            "dual": words_json(basis, &set),
            "out_depth": m,
            "probe_depth": oracle.depth,
            "evaluations": oracle.evaluations,
            "agree": agree,
            "only_oracle": list(&only_oracle),
            "only_dual": list(&only_table),
        }))
    } else if agree {
        format!(
            "agree: {} (prefixes of length {m}, stable from extension length {})\n",
            set.format(basis),
            oracle.depth
        )
    } else {
        format!(
            "disagree at prefix length {m}\nonly in oracle: {}\nonly in dual: {}\n",
            word_set_text(basis, &only_oracle),
            word_set_text(basis, &only_table)
        )
    };
    Ok(Outcome {
        code: if agree { 0 } else { 2 },
        stdout,
        stderr: String::new(),
    })
}

// ---- verify ----

#[derive(Default)]
struct Tally {
    passed: usize,
    failed: usize,
    skipped: usize,
    witness: Option<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    fn json(&self) -> Value {
        json!({
            "passed": self.passed,
            "failed": self.failed,
            "skipped": self.skipped,
            "witness": self.witness,
        })
    }
}

fn verify(o: &Options, count: usize) -> Result<Outcome> {
    let fixed = match (&o.moves, &o.auto) {
        (None, None) => None,
        _ => Some(load(o)?),
    };
    let state_budget = o.budget.unwrap_or(DEFAULT_STATE_BUDGET) as usize;
    let mut rng = sample::rng(o.seed);
    let names = ["decomposition", "fast_vs_general", "reduction", "oracle"];
    let mut tallies: Vec<Tally> = names.iter().map(|_| Tally::default()).collect();

    for i in 0..count {
        let (basis, phi, moves) = match &fixed {
            Some(p) => {
                let moves = p.automorphism.moves()?;
                (p.basis.clone(), p.automorphism.clone(), moves)
            }
            None => {
                let rank = 2 + i % 2;
                let len = 1 + i % 4;
                let moves = sample::random_moves(rank, len, &mut rng);
                let phi = Automorphism::from_moves(rank, &moves)?;
                (Basis::standard(rank)?, phi, moves)
            }
        };
        let rank = basis.rank();
        let show = || format_moves(&basis, &moves);

        let recomposed = nielsen_decompose(phi.forward())
            .and_then(|m| Automorphism::from_moves(rank, &m))
            .map(|a| a.forward() == phi.forward());
        tallies[0].record(recomposed.unwrap_or(false), show);

        let table: SuffixTable = build_collection(&moves, rank)?;
        for _ in 0..5 {
            let w = sample::random_word(rank, 6, &mut rng);
            match dual_apply_general(&phi, &basis, &w, state_budget) {
                Ok(g) => {
                    let f = dual_apply_fast(&table, &w);
                    tallies[1].record(f == g, || format!("{} at {}", show(), basis.format_word(&w)));
                }
                Err(Error::Resource(_)) => tallies[1].skipped += 1,
                Err(e) => return Err(e),
            }
        }

        for _ in 0..5 {
            let s = sample::random_prefix_set(rank, 12, 6, &mut rng);
            let r = reduce_prefix_set(&s, rank);
            let ok = reduce_prefix_set(&r, rank) == r
                && reduce_prefix_set_randomized(&s, rank, &mut rng) == r
                && sets_equivalent(&s, &r, rank)
                && boundary_prefixes(&s, &basis, 7) == boundary_prefixes(&r, &basis, 7);
            tallies[2].record(ok, || s.format(&basis));
        }

        let w = sample::random_word(rank, 4, &mut rng);
        let set = dual_apply_fast(&table, &w);
        let cfg = OracleConfig {
            budget: 2_000_000,
            ..OracleConfig::new(3)
        };
        match boundary_image_prefixes(&phi, &basis, &w, &cfg) {
            Ok(img) => {
                let ok = img.prefixes == boundary_prefixes(&set, &basis, 3);
                tallies[3].record(ok, || format!("{} at {}", show(), basis.format_word(&w)));
            }
            Err(Error::Inconclusive(_)) => tallies[3].skipped += 1,
            Err(e) => return Err(e),
        }
    }

    let failed = tallies.iter().any(|t| t.failed > 0);
    let stdout = if o.json {
        let checks: serde_json::Map<String, Value> = names
            .iter()
            .zip(&tallies)
            .map(|(n, t)| (n.to_string(), t.json()))
            .collect();
        render_json(&json!({
            "seed": o.seed,
            "count": count,
            "checks": checks,
            "ok": !failed,
        }))
    } else {
        let mut s = format!("seed {}\n", o.seed);
        for (n, t) in names.iter().zip(&tallies) {
            s += &format!(
                "{n:<16} passed {:>4}  failed {:>3}  skipped {:>3}\n",
                t.passed, t.failed, t.skipped
            );
            if let Some(w) = &t.witness {
                s += &format!("  first failure: {w}\n");
            }
        }
        s
    };
    Ok(Outcome {
        code: if failed { 2 } else { 0 },
        stdout,
        stderr: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run_cli(std::iter::once("freedual").chain(args.iter().copied()))
    }

    #[test]
    fn file_examples() {
        let p = parse_automorphism_file("a -> ab\nb -> b", None).unwrap();
        assert_eq!(p.automorphism.forward().format(&p.basis), "a -> ab\nb -> b");
        let p = parse_automorphism_file("moves: N(a,b); N(b,a)", None).unwrap();
        assert_eq!(p.automorphism.forward().format(&p.basis), "a -> ab\nb -> bab");
        assert!(matches!(
            parse_automorphism_file("a -> ab\nb -> ab", None),
            Err(Error::NotAnAutomorphism(_))
        ));
    }

    #[test]
    fn inverse_block_and_comments() {
        let text = "# nielsen\na -> ab\nb -> b\n\ninverse:\na -> aB\nb -> b\n";
        let p = parse_automorphism_file(text, Some(2)).unwrap();
        assert_eq!(p.automorphism.inverse_map().format(&p.basis), "a -> aB\nb -> b");
        let bad = "a -> ab\nb -> b\ninverse:\na -> a\nb -> b\n";
        assert!(matches!(
            parse_automorphism_file(bad, None),
            Err(Error::NotAnAutomorphism(_))
        ));
    }

    #[test]
    fn error_positions() {
        let e = parse_automorphism_file("a -> ab\nb -> bxa", None).unwrap_err();
        assert_eq!(e, Error::parse(2, 7, "'x' is not a basis letter"));
        let e = parse_automorphism_file("a -> ab\nb -> aA", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, column: 7, .. }));
        let e = parse_automorphism_file("moves: N(a,b); Q(a)", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, column: 16, .. }));
        let e = parse_move_word("N(a,c)", Some(2)).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, column: 1, .. }));
        let e = parse_move_word("N(a,A)", None).unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
        assert!(matches!(
            parse_automorphism_file("a -> ab\nb -> b", Some(3)),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn move_tokens() {
        let (b, m) = parse_move_word("N(a,B); I(c); P(abc); ", None).unwrap();
        assert_eq!(b.rank(), 3);
        assert_eq!(
            m,
            vec![
                ElementaryMove::nielsen(0, crate::words::Letter::new(1, true)),
                ElementaryMove::Inversion(2),
                ElementaryMove::Permutation(vec![1, 2, 0]),
            ]
        );
        assert_eq!(format_moves(&b, &m), "N(a,B); I(c); P(abc)");
        let (b, m) = parse_move_word("", None).unwrap();
        assert_eq!((b.rank(), m.len()), (2, 0));
    }

    #[test]
    fn dual_command() {
        let out = run_args(&["dual", "--rank", "2", "--moves", "N(a,b)", "b"]);
        assert_eq!(out.code, 0, "{out:?}");
        assert_eq!(out.stdout, "{A, b}\n");
        let out = run_args(&["dual", "--moves", "N(a,b)", "b", "--json"]);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["fast"], json!(["A", "b"]));
        assert_eq!(v["agree"], json!(true));
    }

    #[test]
    fn growth_command() {
        let out = run_args(&["growth", "--rank", "2", "--moves", "N(a,b)", "--json"]);
        assert_eq!(out.code, 0, "{out:?}");
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["lambda"], json!(1.0));
        assert_eq!(v["letter_order"], json!(["a", "A", "b", "B"]));
        assert_eq!(v["t"], json!(1));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["dual", "b"]).code, 1);
        assert_eq!(run_args(&["dual", "--moves", "N(a,b)", "bB"]).code, 1);
        assert_eq!(run_args(&["frobnicate"]).code, 1);
        let out = run_args(&["image", "--moves", "N(a,b); N(b,a)", "b", "--budget", "1000"]);
        assert_eq!(out.code, 3, "{out:?}");
        assert_eq!(run_args(&["--help"]).code, 0);
    }

    #[test]
    fn verify_is_deterministic() {
        let a = run_args(&["verify", "--count", "4", "--seed", "3", "--json"]);
        let b = run_args(&["verify", "--count", "4", "--seed", "3", "--json"]);
        assert_eq!(a, b);
        assert_eq!(a.code, 0, "{a:?}");
    }
}
