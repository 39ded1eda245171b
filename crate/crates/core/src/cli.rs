//! Command-line front end. [`run`] takes the argument list and output sinks
//! and returns the process exit code, so the binary is a thin wrapper.
//!
//! Exit codes: 0 whenever a result was computed (including "unsolvable"),
//! 2 for malformed input or violated hypotheses, 3 for internal
//! inconsistencies.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::congruence::{find_primitive_root, index, power_residue_solve, solve_linear};
use crate::error::{Error, Result};
use crate::multinomial::{expansion_coefficient, nk_terms, NkTerm};
use crate::padic::PAdic;
use crate::representation::{
    classify_coprime, classify_p, format_j_table, j_no_solution_table, table_epsilon_set,
};
use crate::roots::{check, solve, split_exponent};

pub const DEFAULT_PRECISION: usize = 16;
pub const MAX_PRECISION: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Structured,
}

#[derive(Debug, Parser)]
#[command(
    name = "padic-roots",
    version,
    about = "Solvability and roots of x^q = a over Q_p"
)]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "plain")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ValueArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub q: u64,
    /// `n`, `n/d`, or `g;d0,d1,...`
    #[arg(long, allow_hyphen_values = true)]
    pub val: String,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    pub precision: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether x^q = a has a solution in Q_p.
    Check(ValueArgs),
    /// Print every root of x^q = a to the requested number of digits.
    Root(ValueArgs),
    /// Decompose a as ε·δ·y^q.
    Classify(ValueArgs),
    /// Digits j for which i^p ≡ i + jp (mod p^2) has no solution.
    Table {
        #[arg(long = "p-max")]
        p_max: u64,
        /// Also list {1} ∪ {i + jp : j in the row}.
        #[arg(long)]
        epsilon: bool,
    },
    /// Congruence tools.
    Congr {
        #[command(subcommand)]
        command: CongrCommand,
    },
    /// Terms of the p^k coefficient of (x_0 + x_1 p + ...)^q.
    Expand {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        /// Comma-separated digits x_0,x_1,...
        #[arg(long)]
        digits: String,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum CongrCommand {
    /// a x ≡ b (mod n).
    Linear {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long)]
        n: i64,
    },
    /// x^n ≡ a (mod m).
    PowResidue {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
    },
    /// ind_r a (mod m).
    Index {
        #[arg(long)]
        m: u64,
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
    },
    /// Smallest primitive root mod m.
    PrimitiveRoot {
        #[arg(long)]
        m: u64,
    },
}

/// Parses `args` (including the program name), runs the command, and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    match execute(&cli) {
        Ok(output) => {
            let text = match cli.format {
                Format::Structured => {
                    let mut s =
                        serde_json::to_string_pretty(&output.data).expect("report serializes");
                    s.push('\n');
                    s
                }
                Format::Plain => output.plain.unwrap_or_else(|| render_plain(&output.data)),
            };
            match out.write_all(text.as_bytes()) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    3
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Internal(_) => 3,
        _ => 2,
    }
}

struct Output {
    data: Value,
    /// Overrides the generic `key: value` rendering.
    plain: Option<String>,
}

impl Output {
    fn data(data: Value) -> Output {
        Output { data, plain: None }
    }
}

/// One `key: value` line per field. Lists are joined with `, `, absent
/// values print as `none`.
pub fn render_plain(data: &Value) -> String {
    let mut s = String::new();
    if let Value::Object(map) = data {
        for (key, value) in map {
            let text = plain_value(value);
            if text.is_empty() {
                s.push_str(&format!("{key}:\n"));
            } else {
                s.push_str(&format!("{key}: {text}\n"));
            }
        }
    }
    s
}

fn plain_value(value: &Value) -> String {
    match value {
        Value::Null => "none".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(plain_value).collect::<Vec<_>>().join(", "),
        other => other.to_string(),
    }
}

fn execute(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Root(args) => cmd_root(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Table { p_max, epsilon } => cmd_table(*p_max, *epsilon),
        Command::Congr { command } => cmd_congr(command),
        Command::Expand { p, q, digits, k } => cmd_expand(*p, *q, digits, *k),
    }
}

fn check_precision(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::ZeroPrecision);
    }
    if n > MAX_PRECISION {
        return Err(Error::InvalidArgument(format!(
            "precision {n} exceeds the limit {MAX_PRECISION}"
        )));
    }
    Ok(())
}

/// The value read with enough extra digits to lift `n`-digit roots.
fn parse_value(args: &ValueArgs) -> Result<PAdic> {
    check_precision(args.precision)?;
    if args.q < 2 {
        return Err(Error::InvalidArgument("q must be at least 2".into()));
    }
    if args.p < 2 {
        return Err(Error::NotPrime(args.p));
    }
    let (_, s) = split_exponent(args.q, args.p);
    let a = PAdic::parse(&args.val, args.p, args.precision + s as usize + 3)?;
    if !a.is_nonzero() {
        return Err(Error::ZeroInput);
    }
    Ok(a)
}

#[derive(Serialize)]
struct VerdictFields {
    solvable: bool,
    case_used: &'static str,
    failed_condition: Option<String>,
    details: String,
}

fn verdict_fields(v: &crate::roots::Verdict) -> VerdictFields {
    VerdictFields {
        solvable: v.solvable,
        case_used: v.case_used.as_str(),
        failed_condition: v.failed_condition.map(|f| f.to_string()),
        details: v.details.clone(),
    }
}

fn merge(mut base: Value, extra: impl Serialize) -> Value {
    let extra = serde_json::to_value(extra).expect("report serializes");
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn cmd_check(args: &ValueArgs) -> Result<Output> {
    let a = parse_value(args)?;
    let verdict = check(&a, args.q)?;
    let head = json!({
        "command": "check",
        "p": args.p,
        "q": args.q,
        "value": a.to_string(),
    });
    Ok(Output::data(merge(head, verdict_fields(&verdict))))
}

fn cmd_root(args: &ValueArgs) -> Result<Output> {
    let a = parse_value(args)?;
    let n = args.precision;
    let (verdict, roots) = solve(&a, args.q, n)?;
    let gamma = a.gamma().ok_or(Error::ZeroInput)?;
    let check_at = gamma + n as i64;
    let mut printed = Vec::new();
    let mut expected = None;
    if let Some(set) = &roots {
        expected = set.expected_count;
        for r in &set.roots {
            if !r.pow_nat(args.q)?.eq_mod(&a, check_at)? {
                return Err(Error::Internal(format!(
                    "root {r} fails x^{} = a mod p^{check_at}",
                    args.q
                )));
            }
            printed.push(r.to_string());
        }
    }
    let self_check = if verdict.solvable {
        format!(
            "r^{} = a mod {}^{} for every root",
            args.q, args.p, check_at
        )
    } else {
        "no roots".to_string()
    };
    let head = json!({
        "command": "root",
        "p": args.p,
        "q": args.q,
        "value": a.to_string(),
        "precision": n,
    });
    let data = merge(
        merge(head, verdict_fields(&verdict)),
        json!({
            "expected_count": expected,
            "count": printed.len(),
            "roots": printed,
            "self_check": self_check,
        }),
    );
    Ok(Output::data(data))
}

fn cmd_classify(args: &ValueArgs) -> Result<Output> {
    let x = parse_value(args)?;
    let d = if args.q == args.p {
        classify_p(&x)?
    } else {
        classify_coprime(&x, args.q)?
    };
    let recomposed = d.recompose()?;
    let k = recomposed
        .abs_precision()
        .ok_or_else(|| Error::Internal("recomposition lost all precision".into()))?;
    if !recomposed.eq_mod(&x, k)? {
        return Err(Error::Internal(format!(
            "ε·δ·y^q differs from {x} mod p^{k}"
        )));
    }
    let data = json!({
        "command": "classify",
        "p": args.p,
        "q": args.q,
        "value": x.to_string(),
        "form": d.form.as_str(),
        "epsilon": d.epsilon_value,
        "delta": format!("{}^{}", args.p, d.delta_exponent),
        "delta_exponent": d.delta_exponent,
        "eta": d.eta,
        "eta_exponent": d.eta_exponent,
        "y": d.y.to_string(),
        "recomposition": format!("ε·δ·y^{} = value mod {}^{}", args.q, args.p, k),
    });
    Ok(Output::data(data))
}

fn cmd_table(p_max: u64, epsilon: bool) -> Result<Output> {
    let table = j_no_solution_table(p_max)?;
    let mut plain = format_j_table(&table);
    let mut rows = serde_json::Map::new();
    let mut eps = serde_json::Map::new();
    for (p, js) in &table {
        rows.insert(p.to_string(), json!(js));
        if epsilon {
            eps.insert(p.to_string(), json!(table_epsilon_set(*p)?));
        }
    }
    let mut data = json!({ "command": "table", "p_max": p_max, "rows": rows });
    if epsilon {
        for (p, set) in &eps {
            plain.push_str(&format!("epsilon p={p}: {}\n", plain_value(set)));
        }
        data["epsilon_sets"] = Value::Object(eps);
    }
    Ok(Output {
        data,
        plain: Some(plain),
    })
}

fn cmd_congr(command: &CongrCommand) -> Result<Output> {
    let data = match command {
        CongrCommand::Linear { a, b, n } => {
            let sol = solve_linear(*a, *b, *n)?;
            json!({
                "command": "congr linear",
                "a": a,
                "b": b,
                "n": n,
                "solvable": sol.is_solvable(),
                "modulus": sol.modulus,
                "count": sol.count(),
                "solutions": sol.representatives,
            })
        }
        CongrCommand::PowResidue { m, n, a } => {
            let sol = power_residue_solve(*n, *a, *m)?;
            json!({
                "command": "congr pow-residue",
                "m": m,
                "n": n,
                "a": a,
                "solvable": sol.is_solvable(),
                "modulus": sol.modulus,
                "count": sol.count(),
                "solutions": sol.representatives,
            })
        }
        CongrCommand::Index { m, r, a } => {
            let ind = index(*r, *a, *m)?;
            json!({
                "command": "congr index",
                "m": m,
                "r": ind.base_r,
                "a": a,
                "index": ind.value,
                "modulus_phi": ind.modulus_phi,
            })
        }
        CongrCommand::PrimitiveRoot { m } => {
            if *m < 2 {
                return Err(Error::InvalidArgument("m must be at least 2".into()));
            }
            json!({
                "command": "congr primitive-root",
                "m": m,
                "primitive_root": find_primitive_root(*m),
            })
        }
    };
    Ok(Output::data(data))
}

fn parse_digits(text: &str, p: u64) -> Result<Vec<u64>> {
    text.split(',')
        .map(|t| {
            let d: u64 = t.trim().parse().map_err(|_| Error::Parse {
                input: text.to_string(),
                reason: format!("`{t}` is not a digit"),
            })?;
            if d >= p {
                return Err(Error::Parse {
                    input: text.to_string(),
                    reason: format!("digit {d} is not below {p}"),
                });
            }
            Ok(d)
        })
        .collect()
}

fn term_label(term: &NkTerm) -> String {
    let mut parts = vec![term.coefficient.to_string()];
    for (i, &m) in term.exponents.iter().enumerate() {
        match m {
            0 => {}
            1 => parts.push(format!("x{i}")),
            _ => parts.push(format!("x{i}^{m}")),
        }
    }
    parts.join("·")
}

fn cmd_expand(p: u64, q: u64, digits: &str, k: usize) -> Result<Output> {
    if !crate::congruence::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if q == 0 || k == 0 {
        return Err(Error::InvalidArgument("q and k must be positive".into()));
    }
    let x = parse_digits(digits, p)?;
    if x.len() < k {
        return Err(Error::InsufficientPrecision {
            needed: k,
            available: x.len(),
        });
    }
    let terms = nk_terms(q, k);
    let listing: Vec<String> = terms
        .iter()
        .map(|t| format!("{} = {}", term_label(t), t.evaluate(&x)))
        .collect();
    let nk: num_bigint::BigUint = terms.iter().map(|t| t.evaluate(&x)).sum();
    let total = expansion_coefficient(q, &x, k)?;
    let linear = &total - &nk;
    let data = json!({
        "command": "expand",
        "p": p,
        "q": q,
        "digits": x,
        "k": k,
        "terms": listing,
        "n_k": nk.to_string(),
        "linear_term": linear.to_string(),
        "coefficient": total.to_string(),
    });
    Ok(Output::data(data))
}
