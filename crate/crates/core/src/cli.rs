//! `quadlat` command-line front end.
//!
//! Exit status: 0 when every requested check passes, 1 when a check fails,
//! 2 on bad input.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bochner::BochnerData;
use crate::checks::{members_for_size, run_checks, CheckContext, CheckKind, CheckReport};
use crate::error::{Error, Result};
use crate::families::{load_custom, CustomInput, RacahParams};
use crate::family::{jacobi_from_family, PolyFamily, RecurrenceCoeffs};
use crate::identities::{run_product_rules, IdentityConfig};
use crate::lattice::LatticeParams;
use crate::rational::{self, Rational};
use crate::theta::theta_to_mu;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

fn rat(s: &str) -> std::result::Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "quadlat", version, about = "Classical orthogonal polynomials on quadratic lattices")]
struct Cli {
    /// Output format; defaults to `table` on a terminal and `json` otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Append k-digit decimal approximations (marked with `~`).
    #[arg(long, global = true, value_name = "K")]
    decimal: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Recurrence coefficients beta_n, gamma_n and eigenvalues lambda_n.
    Ttrr {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
    },
    /// Coefficients of P_n in the theta basis and in powers of mu.
    Expand {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        n: usize,
    },
    /// Matrix characterization checks.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated kinds or groups: geronimus, tricomi, aux, all.
        #[arg(long, default_value = "all")]
        checks: String,
        #[arg(long, default_value_t = 12)]
        size: usize,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
    },
    /// Racah closed forms vs solver vs hypergeometric oracle.
    RacahCheck {
        #[arg(long, value_parser = rat, allow_hyphen_values = true)]
        alpha: Rational,
        #[arg(long, value_parser = rat, allow_hyphen_values = true)]
        beta: Rational,
        #[arg(long, value_parser = rat, allow_hyphen_values = true)]
        gamma: Rational,
        #[arg(long, value_parser = rat, allow_hyphen_values = true)]
        delta: Rational,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
    },
    /// Randomized product-rule checks for D and S.
    Identities {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 10)]
        lattices: usize,
        #[arg(long, default_value_t = 6)]
        max_degree: usize,
        /// Defaults to $QUADLAT_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// JSON document with `lattice` plus `bochner` or `family`, or `racah`.
    #[arg(long, conflicts_with_all = ["c2", "c3", "a0", "a1", "a2", "b0", "b1"])]
    config: Option<PathBuf>,
    #[arg(long, value_parser = rat, allow_hyphen_values = true)]
    c2: Option<Rational>,
    #[arg(long, value_parser = rat, allow_hyphen_values = true)]
    c3: Option<Rational>,
    #[arg(long, value_parser = rat, allow_hyphen_values = true)]
    a0: Option<Rational>,
    #[arg(long, value_parser = rat, allow_hyphen_values = true)]
    a1: Option<Rational>,
    #[arg(long, value_parser = rat, allow_hyphen_values = true)]
    a2: Option<Rational>,
    #[arg(long, value_parser = rat, allow_hyphen_values = true)]
    b0: Option<Rational>,
    #[arg(long, value_parser = rat, allow_hyphen_values = true)]
    b1: Option<Rational>,
}

impl InputArgs {
    fn load(&self, admissible_up_to: Option<usize>) -> Result<CustomInput> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            return load_custom(&text, admissible_up_to);
        }
        let get = |v: &Option<Rational>, name: &str| {
            v.clone().ok_or_else(|| Error::Parse(format!("missing --{name} (or give --config)")))
        };
        let params = LatticeParams::new(
            self.c2.clone().unwrap_or_default(),
            self.c3.clone().unwrap_or_default(),
        );
        let data = BochnerData::new(
            params,
            get(&self.a0, "a0")?,
            get(&self.a1, "a1")?,
            get(&self.a2, "a2")?,
            get(&self.b0, "b0")?,
            get(&self.b1, "b1")?,
        );
        if let Some(n) = admissible_up_to {
            data.check_admissible(n)?;
        }
        Ok(CustomInput::Bochner(data))
    }
}

struct Output {
    format: Format,
    decimal: Option<usize>,
}

impl Output {
    fn cell(&self, r: &Rational) -> String {
        match self.decimal {
            Some(k) => format!("{} {}", rational::format(r), rational::approx(r, k)),
            None => rational::format(r),
        }
    }

    fn approx_vec(&self, v: &[Rational]) -> Option<Vec<String>> {
        self.decimal.map(|k| v.iter().map(|r| rational::approx(r, k)).collect())
    }

    fn table(&self, out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> std::io::Result<()> {
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in rows {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let line = |cells: Vec<&str>| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(out, "{}", line(header.to_vec()))?;
        for row in rows {
            writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }

    fn json(&self, out: &mut dyn Write, v: &Value) -> std::io::Result<()> {
        writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json values serialize"))
    }
}

/// Failure modes of a subcommand, mapped onto exit codes.
enum Failure {
    Input(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = std::result::Result<bool, Failure>;

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write, is_tty: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let to_out = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let text = e.render().to_string();
            if to_out {
                let _ = write!(out, "{text}");
                return EXIT_OK;
            }
            let _ = write!(err, "{text}");
            return EXIT_INPUT;
        }
    };
    let format = cli.format.unwrap_or(if is_tty { Format::Table } else { Format::Json });
    let o = Output { format, decimal: cli.decimal };
    if format == Format::Csv && !matches!(cli.command, Command::Ttrr { .. }) {
        let _ = writeln!(err, "error: --format csv is only available for `ttrr`");
        return EXIT_INPUT;
    }
    let result = match &cli.command {
        Command::Ttrr { input, nmax } => cmd_ttrr(&o, out, input, *nmax),
        Command::Expand { input, n } => cmd_expand(&o, out, input, *n),
        Command::Verify { input, checks, size, nmax } => cmd_verify(&o, out, err, input, checks, *size, *nmax),
        Command::RacahCheck { alpha, beta, gamma, delta, nmax } => {
            let rp = RacahParams::new(alpha.clone(), beta.clone(), gamma.clone(), delta.clone());
            cmd_racah(&o, out, &rp, *nmax)
        }
        Command::Identities { trials, lattices, max_degree, seed } => {
            let seed = match seed.map(Ok).unwrap_or_else(env_seed) {
                Ok(s) => s,
                Err(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                    return EXIT_INPUT;
                }
            };
            let cfg = IdentityConfig { trials: *trials, lattices: *lattices, max_degree: *max_degree, seed };
            cmd_identities(&o, out, &cfg)
        }
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn env_seed() -> std::result::Result<u64, String> {
    match std::env::var("QUADLAT_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| format!("QUADLAT_SEED={s:?} is not an unsigned integer")),
        Err(_) => Ok(0),
    }
}

fn strs(v: &[Rational]) -> Vec<String> {
    rational::format_vec(v)
}

fn bochner_json(d: &BochnerData) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    for (k, v) in [
        ("c2", &d.params.c2),
        ("c3", &d.params.c3),
        ("a0", &d.a0),
        ("a1", &d.a1),
        ("a2", &d.a2),
        ("b0", &d.b0),
        ("b1", &d.b1),
    ] {
        m.insert(k.into(), Value::String(rational::format(v)));
    }
    m
}

/// `gamma_0 = 0`, then `gamma_1..`, aligned with `beta`.
fn gamma_aligned(rec: &RecurrenceCoeffs) -> Vec<Rational> {
    std::iter::once(Rational::default()).chain(rec.gamma.iter().cloned()).collect()
}

fn require_bochner(input: CustomInput, what: &str) -> std::result::Result<BochnerData, Failure> {
    match input {
        CustomInput::Bochner(d) => Ok(d),
        CustomInput::Family(_) => Err(Failure::Input(format!("{what} needs Bochner data, not an explicit family"))),
    }
}

fn cmd_ttrr(o: &Output, out: &mut dyn Write, input: &InputArgs, nmax: usize) -> CmdResult {
    let data = require_bochner(input.load(None)?, "ttrr")?;
    let rec = data.ttrr_coeffs(nmax + 1)?;
    let gamma = gamma_aligned(&rec);
    let lambda = data.lambdas(nmax + 1);
    match o.format {
        Format::Json => {
            let mut m = bochner_json(&data);
            m.insert("nmax".into(), json!(nmax));
            m.insert("beta".into(), json!(strs(&rec.beta)));
            m.insert("gamma".into(), json!(strs(&gamma)));
            m.insert("lambda".into(), json!(strs(&lambda)));
            if let (Some(b), Some(g), Some(l)) =
                (o.approx_vec(&rec.beta), o.approx_vec(&gamma), o.approx_vec(&lambda))
            {
                m.insert("approx".into(), json!({ "beta": b, "gamma": g, "lambda": l }));
            }
            o.json(out, &Value::Object(m))?;
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = (0..=nmax)
                .map(|n| vec![n.to_string(), o.cell(&rec.beta[n]), o.cell(&gamma[n]), o.cell(&lambda[n])])
                .collect();
            o.table(out, &["n", "beta_n", "gamma_n", "lambda_n"], &rows)?;
        }
        Format::Csv => {
            let approx = o.decimal.is_some();
            write!(out, "n,beta,gamma,lambda")?;
            if approx {
                write!(out, ",beta_approx,gamma_approx,lambda_approx")?;
            }
            writeln!(out)?;
            for n in 0..=nmax {
                let vals = [&rec.beta[n], &gamma[n], &lambda[n]];
                let exact: Vec<String> = vals.iter().map(|r| rational::format(r)).collect();
                write!(out, "{n},{}", exact.join(","))?;
                if let Some(k) = o.decimal {
                    let ap: Vec<String> = vals.iter().map(|r| rational::approx(r, k)).collect();
                    write!(out, ",{}", ap.join(","))?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(true)
}

fn cmd_expand(o: &Output, out: &mut dyn Write, input: &InputArgs, n: usize) -> CmdResult {
    let p = match input.load(None)? {
        CustomInput::Bochner(d) => d.solve_pn(n)?,
        CustomInput::Family(f) => {
            if n >= f.len() {
                return Err(Error::FamilyTooShort { needed: n + 1, have: f.len() }.into());
            }
            f.member(n).clone()
        }
    };
    let theta = p.coeffs().to_vec();
    let mu = theta_to_mu(&p).coeffs().to_vec();
    match o.format {
        Format::Json => {
            let mut v = json!({
                "c2": rational::format(&p.params.c2),
                "c3": rational::format(&p.params.c3),
                "n": n,
                "theta": strs(&theta),
                "mu": strs(&mu),
            });
            if let (Some(t), Some(m)) = (o.approx_vec(&theta), o.approx_vec(&mu)) {
                v["approx"] = json!({ "theta": t, "mu": m });
            }
            o.json(out, &v)?;
        }
        _ => {
            let zero = Rational::default();
            let rows: Vec<Vec<String>> = (0..=n)
                .map(|k| {
                    let t = theta.get(k).unwrap_or(&zero);
                    let m = mu.get(k).unwrap_or(&zero);
                    vec![k.to_string(), o.cell(t), o.cell(m)]
                })
                .collect();
            o.table(out, &["k", "theta_k", "mu^k"], &rows)?;
        }
    }
    Ok(true)
}

fn cmd_verify(
    o: &Output,
    out: &mut dyn Write,
    err: &mut dyn Write,
    input: &InputArgs,
    checks: &str,
    size: usize,
    nmax: usize,
) -> CmdResult {
    if nmax < 1 {
        return Err(Failure::Input("--nmax must be at least 1".into()));
    }
    if size < nmax + 4 {
        return Err(Failure::Input(format!(
            "--size {size} is too small for --nmax {nmax}; need at least {}",
            nmax + 4
        )));
    }
    let kinds = CheckKind::parse_selection(checks)?;
    let ctx = match input.load(Some(members_for_size(size)))? {
        CustomInput::Bochner(d) => CheckContext::from_bochner(d, size)?,
        CustomInput::Family(f) => {
            if f.len() < members_for_size(size) {
                writeln!(
                    err,
                    "note: family has {} members; rows beyond its reach are excluded from comparison",
                    f.len()
                )?;
            }
            CheckContext::from_family(f, size)
        }
    };
    let reports: Vec<CheckReport> = run_checks(&kinds, &ctx).into_iter().collect::<Result<_>>()?;
    let all_pass = reports.iter().all(|r| r.pass);
    match o.format {
        Format::Json => {
            o.json(out, &json!({ "size": size, "nmax": nmax, "pass": all_pass, "checks": reports }))?;
        }
        _ => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.kind.clone(),
                        if r.pass { "pass" } else { "FAIL" }.into(),
                        r.valid_rows.to_string(),
                        o.cell(&r.residual_max),
                        r.witness.map(|(i, j)| format!("({i},{j})")).unwrap_or_else(|| "-".into()),
                    ]
                })
                .collect();
            o.table(out, &["check", "result", "rows", "residual", "witness"], &rows)?;
        }
    }
    Ok(all_pass)
}

/// Recurrence coefficients of `rp` for `n <= nmax` along three routes.
pub struct RacahRoutes {
    pub closed: RecurrenceCoeffs,
    pub solver: RecurrenceCoeffs,
    pub oracle: RecurrenceCoeffs,
}

fn truncate(rec: RecurrenceCoeffs, count: usize) -> RecurrenceCoeffs {
    RecurrenceCoeffs {
        beta: rec.beta.into_iter().take(count).collect(),
        gamma: rec.gamma.into_iter().take(count.saturating_sub(1)).collect(),
    }
}

pub fn racah_routes(rp: &RacahParams, nmax: usize) -> Result<RacahRoutes> {
    let data = rp.bochner();
    let count = nmax + 1;
    let closed = data.ttrr_coeffs(count)?;
    let solved: PolyFamily = data.solve_family(count + 1)?;
    let solver = truncate(jacobi_from_family(&solved)?, count);
    let oracle = truncate(jacobi_from_family(&rp.oracle_family(count + 1)?)?, count);
    Ok(RacahRoutes { closed, solver, oracle })
}

fn cmd_racah(o: &Output, out: &mut dyn Write, rp: &RacahParams, nmax: usize) -> CmdResult {
    let routes = racah_routes(rp, nmax)?;
    let agree = routes.closed == routes.solver && routes.solver == routes.oracle;
    let gamma = gamma_aligned(&routes.closed);
    match o.format {
        Format::Json => {
            let v = json!({
                "alpha": rational::format(&rp.alpha),
                "beta_param": rational::format(&rp.beta),
                "gamma_param": rational::format(&rp.gamma),
                "delta": rational::format(&rp.delta),
                "nmax": nmax,
                "pass": agree,
                "closed_form": routes.closed,
                "solver": routes.solver,
                "oracle": routes.oracle,
            });
            o.json(out, &v)?;
        }
        _ => {
            let rows: Vec<Vec<String>> = (0..=nmax)
                .map(|n| {
                    let same = routes.closed.beta[n] == routes.solver.beta[n]
                        && routes.solver.beta[n] == routes.oracle.beta[n]
                        && (n == 0
                            || (routes.closed.gamma_at(n) == routes.solver.gamma_at(n)
                                && routes.solver.gamma_at(n) == routes.oracle.gamma_at(n)));
                    vec![
                        n.to_string(),
                        o.cell(&routes.closed.beta[n]),
                        o.cell(&gamma[n]),
                        if same { "agree" } else { "DIFFER" }.into(),
                    ]
                })
                .collect();
            o.table(out, &["n", "beta_n", "gamma_n", "routes"], &rows)?;
        }
    }
    Ok(agree)
}

fn cmd_identities(o: &Output, out: &mut dyn Write, cfg: &IdentityConfig) -> CmdResult {
    let report = run_product_rules(cfg)?;
    match o.format {
        Format::Json => o.json(out, &serde_json::to_value(&report).expect("report serializes"))?,
        _ => {
            writeln!(
                out,
                "seed {}  trials {}  lattices {}  max degree {}  points {}  failures {}",
                report.seed,
                report.trials,
                report.lattices,
                report.max_degree,
                report.points_checked,
                report.failures.len()
            )?;
            for f in &report.failures {
                writeln!(
                    out,
                    "  rule {:?} trial {} c2={} c3={} t={}",
                    f.rule,
                    f.trial,
                    rational::format(&f.c2),
                    rational::format(&f.c3),
                    rational::format(&f.t)
                )?;
            }
        }
    }
    Ok(report.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("quadlat").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err, false);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn ttrr_json_example() {
        let (code, out, _) = run_str(&[
            "ttrr", "--a0", "-1", "--a1", "0", "--a2", "0", "--b0", "-4", "--b1", "0", "--c2", "0",
            "--c3", "0", "--nmax", "3", "--format", "json",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["beta"][0], "0");
        assert_eq!(v["beta"].as_array().unwrap().len(), 4);
        assert_eq!(v["lambda"][2], "-10");
    }

    #[test]
    fn verify_size_too_small() {
        let (code, _, err) = run_str(&[
            "verify", "--a0", "-1", "--a1", "0", "--a2", "0", "--b0", "-4", "--b1", "0", "--checks",
            "newchar", "--size", "6", "--nmax", "8",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("too small"));
    }

    #[test]
    fn csv_only_for_ttrr() {
        let (code, _, _) = run_str(&["identities", "--trials", "1", "--format", "csv"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn decimal_marks_approximations() {
        let (code, out, _) = run_str(&[
            "ttrr", "--a0", "-1", "--a1", "0", "--a2", "0", "--b0", "-4", "--b1", "1", "--nmax", "1",
            "--format", "table", "--decimal", "3",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("1/4 ~0.250"), "{out}");
    }
}
