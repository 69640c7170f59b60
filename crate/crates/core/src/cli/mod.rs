//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when a statistical verdict (or an identity
//! check) fails, 2 on usage, parameter or I/O errors. Payloads go to the data
//! stream, everything else to the diagnostic stream.

mod output;
mod polyparse;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use output::{emit_histogram, emit_report, fmt_real, histogram, Format, REPORT_COLUMNS};
pub use polyparse::parse_polynomial;

use crate::ensembles::{sample_rescaled, EnsembleParams, RescalingMode};
use crate::error::{invalid, Error, Result};
use crate::experiments::{
    run_clt_with_samples, run_mdp_centering, run_moment_convergence, run_mp_sanity, ExperimentConfig, ExperimentReport,
    GammaRule, MomentRoute, Statistic,
};
use crate::moments::{exact_identity_checks, semicircle_moment, MeasureVariant, MomentSequence};
use crate::poly::Polynomial;
use crate::rates::{
    arcsine_density, ldp_rate, mdp_rate_series, semicircle_density, AcPlusAtoms, DEFAULT_MDP_TRUNCATION,
};
use crate::rng::RngState;
use crate::spectral::{eigen_spectral, moments_via_operator};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "laguerre",
    version,
    about = "Laguerre beta-ensemble sampling, rate functions and limit-theorem checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw one rescaled spectral measure (atoms and weights).
    #[command(args_override_self = true)]
    Sample(SampleArgs),
    /// Moments of one sampled measure, or a replicated convergence check with --moment.
    #[command(args_override_self = true)]
    Moments(MomentsArgs),
    /// Evaluate the large or moderate deviation rate function.
    #[command(args_override_self = true)]
    Rate(RateArgs),
    /// Central limit check for a polynomial linear statistic.
    #[command(args_override_self = true)]
    Clt(CltArgs),
    /// Moderate deviation centering check for a moment.
    #[command(args_override_self = true)]
    Mdp(MdpArgs),
    /// Marchenko-Pastur check of the uncentred matrix under gamma = n*beta'/tau.
    #[command(name = "mp-sanity", args_override_self = true)]
    MpSanity(MpArgs),
    /// Exact identities of the moment map.
    #[command(args_override_self = true)]
    Identities(IdentityArgs),
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    /// Matrix size.
    #[arg(long, allow_negative_numbers = true)]
    n: i64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    beta: f64,
    /// Fixed gamma; alternative to --gamma-rule.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "gamma_rule")]
    gamma: Option<f64>,
    /// `pow:<a>:<c>` for gamma = c*n^a, or `lin:<tau>` for gamma = n*beta/(2*tau).
    #[arg(long, value_parser = parse_gamma_rule)]
    gamma_rule: Option<GammaRule>,
    /// standard | shifted | none
    #[arg(long, default_value = "standard", value_parser = parse_mode)]
    mode: RescalingMode,
    #[arg(long)]
    seed: u64,
}

impl EnsembleArgs {
    fn n(&self) -> Result<usize> {
        if self.n < 1 {
            return Err(invalid(format!("matrix size n must be at least 1, got {}", self.n)));
        }
        Ok(self.n as usize)
    }

    fn params(&self) -> Result<EnsembleParams> {
        let n = self.n()?;
        let gamma = match (self.gamma, self.gamma_rule) {
            (Some(g), _) => g,
            (None, Some(rule)) => rule.gamma(n, self.beta),
            (None, None) => return Err(invalid("one of --gamma or --gamma-rule is required")),
        };
        EnsembleParams::new(n, self.beta, gamma, self.mode)
    }

    fn rule(&self) -> Result<GammaRule> {
        self.gamma_rule
            .ok_or_else(|| invalid("experiments need --gamma-rule (pow:<a>:<c> or lin:<tau>)"))
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// csv | json
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: Format,
    /// Write the payload here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, default_value_t = 1000)]
    replicates: usize,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// operator | eigen
    #[arg(long, default_value = "operator", value_parser = parse_route)]
    route: MomentRoute,
    #[arg(long, allow_negative_numbers = true)]
    mean_sigmas: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    var_ratio_low: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    var_ratio_high: Option<f64>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct MomentsArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Highest moment of the single-sample listing.
    #[arg(long, default_value_t = 8)]
    order: usize,
    /// Run the replicated convergence check for this moment instead.
    #[arg(long)]
    moment: Option<usize>,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct RateArgs {
    /// ldp | mdp
    #[arg(long)]
    kind: String,
    /// LDP: outliers as `x:mass,x:mass`; the bulk carries the remaining mass.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    atoms: String,
    /// LDP bulk shape: semicircle | arcsine
    #[arg(long, default_value = "semicircle")]
    bulk: String,
    /// MDP: comma-separated moments m1,m2,...
    #[arg(long, allow_hyphen_values = true)]
    moments: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    xi: f64,
    /// standard | shifted
    #[arg(long, default_value = "standard")]
    variant: String,
    /// MDP truncation order.
    #[arg(long)]
    order: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct CltArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Polynomial statistic, e.g. `x^3` or `1+2x-0.5x^2`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "moment")]
    poly: Option<String>,
    /// Shorthand for --poly x^k.
    #[arg(long)]
    moment: Option<usize>,
    /// Also write the raw fluctuations as a histogram here.
    #[arg(long)]
    histogram: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    bins: i64,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct MdpArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long)]
    moment: usize,
    #[arg(long, allow_negative_numbers = true)]
    b_n: f64,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct MpArgs {
    #[arg(long, allow_negative_numbers = true)]
    n: i64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, allow_negative_numbers = true)]
    tau: f64,
    /// Single moment; all of 1..=4 when omitted.
    #[arg(long)]
    moment: Option<usize>,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct IdentityArgs {
    #[arg(long, default_value_t = 12)]
    order: usize,
    #[command(flatten)]
    out: OutputArgs,
}

fn parse_gamma_rule(s: &str) -> std::result::Result<GammaRule, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<RescalingMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_route(s: &str) -> std::result::Result<MomentRoute, String> {
    match s {
        "operator" => Ok(MomentRoute::Operator),
        "eigen" => Ok(MomentRoute::Eigen),
        _ => Err(format!("unknown route '{s}' (operator|eigen)")),
    }
}

fn parse_variant(s: &str) -> Result<MeasureVariant> {
    match s {
        "standard" => Ok(MeasureVariant::Standard),
        "shifted" => Ok(MeasureVariant::Shifted),
        _ => Err(invalid(format!("unknown variant '{s}' (standard|shifted)"))),
    }
}

fn parse_real_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("'{t}' is not a number")))
        })
        .collect()
}

/// Reads a flat TOML table and turns each `key = value` into `--key value`.
fn config_args(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| Error::InvalidInput(format!("config {}: {e}", path.display())))?;
    let mut args = Vec::new();
    for (key, value) in table {
        let v = match value {
            toml::Value::String(s) => s,
            toml::Value::Integer(i) => i.to_string(),
            toml::Value::Float(f) => f.to_string(),
            other => {
                return Err(Error::InvalidInput(format!(
                    "config key '{key}' must be a string or number, got {}",
                    other.type_str()
                )))
            }
        };
        if key == "config" {
            return Err(Error::InvalidInput(
                "config files cannot include other config files".into(),
            ));
        }
        args.push(format!("--{key}"));
        args.push(v);
    }
    Ok(args)
}

/// Removes `--config <path>` and splices the file's flags in right after the
/// subcommand, so that explicit flags, which come later, take precedence.
fn expand_config(argv: &[String]) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut i = 0;
    while i < argv.len() {
        let a = &argv[i];
        if a == "--config" {
            let p = argv
                .get(i + 1)
                .ok_or_else(|| Error::InvalidInput("--config needs a path".into()))?;
            path = Some(PathBuf::from(p));
            i += 2;
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else {
            rest.push(a.clone());
        }
        i += 1;
    }
    let Some(path) = path else { return Ok(rest) };
    let extra = config_args(&path)?;
    let at = rest.len().min(2);
    rest.splice(at..at, extra);
    Ok(rest)
}

enum Sink<'a> {
    Stdout(&'a mut dyn Write),
    File(BufWriter<File>),
}

impl Sink<'_> {
    fn open<'a>(path: &Option<PathBuf>, stdout: &'a mut dyn Write) -> Result<Sink<'a>> {
        match path {
            None => Ok(Sink::Stdout(stdout)),
            Some(p) => File::create(p)
                .map(|f| Sink::File(BufWriter::new(f)))
                .map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        }
    }

    fn writer(&mut self) -> &mut dyn Write {
        match self {
            Sink::Stdout(w) => *w,
            Sink::File(f) => f,
        }
    }

    fn finish(self) -> Result<()> {
        let r = match self {
            Sink::Stdout(w) => w.flush(),
            Sink::File(mut f) => f.flush(),
        };
        r.map_err(|e| Error::Io(e.to_string()))
    }
}

fn with_sink(out: &OutputArgs, stdout: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let mut sink = Sink::open(&out.output, stdout)?;
    body(sink.writer())?;
    sink.finish()
}

fn experiment_config(ens: &EnsembleArgs, run: &RunArgs, statistic: Statistic) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::new(ens.n()?, ens.beta, ens.rule()?, run.replicates, ens.seed, statistic);
    c.mode = ens.mode;
    apply_run_args(&mut c, run)?;
    c.ensemble_params()?;
    Ok(c)
}

fn apply_run_args(c: &mut ExperimentConfig, run: &RunArgs) -> Result<()> {
    if run.workers == Some(0) {
        return Err(invalid("--workers must be at least 1"));
    }
    c.workers = run.workers;
    c.route = run.route;
    if let Some(v) = run.mean_sigmas {
        c.thresholds.mean_sigmas = v;
    }
    if let Some(v) = run.var_ratio_low {
        c.thresholds.variance_ratio_low = v;
    }
    if let Some(v) = run.var_ratio_high {
        c.thresholds.variance_ratio_high = v;
    }
    Ok(())
}

fn verdict_status(reports: &[ExperimentReport]) -> i32 {
    if reports.iter().all(|r| r.verdict.passed()) {
        EXIT_OK
    } else {
        EXIT_VERDICT
    }
}

fn describe(reports: &[ExperimentReport], stderr: &mut dyn Write) {
    for r in reports {
        let _ = writeln!(
            stderr,
            "{}: {} ({}; {:.2}s)",
            r.statistic,
            r.verdict.as_str(),
            r.verdict_rule,
            r.wall_time_secs
        );
        for (name, v) in &r.diagnostics {
            let _ = writeln!(stderr, "  {name} = {}", fmt_real(*v));
        }
    }
}

fn cmd_sample(a: &SampleArgs, stdout: &mut dyn Write) -> Result<i32> {
    let params = a.ensemble.params()?;
    let mut rng = RngState::from_seed(a.ensemble.seed);
    let mu = eigen_spectral(&sample_rescaled(&mut rng, &params)?)?;
    with_sink(&a.out, stdout, |w| {
        let io = |e: std::io::Error| Error::Io(e.to_string());
        match a.out.format {
            Format::Csv => {
                writeln!(w, "atom,weight").map_err(io)?;
                for (x, p) in mu.atoms().iter().zip(mu.weights()) {
                    writeln!(w, "{},{}", fmt_real(*x), fmt_real(*p)).map_err(io)?;
                }
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, &mu).map_err(|e| Error::Io(e.to_string()))?;
                writeln!(w).map_err(io)?;
            }
        }
        Ok(())
    })?;
    Ok(EXIT_OK)
}

fn cmd_moments(a: &MomentsArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    if let Some(k) = a.moment {
        let c = experiment_config(&a.ensemble, &a.run, Statistic::Moment(k))?;
        let report = run_moment_convergence(&c)?;
        describe(std::slice::from_ref(&report), stderr);
        let reports = [report];
        with_sink(&a.out, stdout, |w| emit_report(&reports, a.out.format, w))?;
        return Ok(verdict_status(&reports));
    }
    if a.order == 0 {
        return Err(invalid("--order must be at least 1"));
    }
    let params = a.ensemble.params()?;
    let mut rng = RngState::from_seed(a.ensemble.seed);
    let m = moments_via_operator(&sample_rescaled(&mut rng, &params)?, a.order);
    with_sink(&a.out, stdout, |w| write_moment_table(&m, a.out.format, w))?;
    Ok(EXIT_OK)
}

fn write_moment_table(m: &MomentSequence, format: Format, w: &mut dyn Write) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    match format {
        Format::Csv => {
            writeln!(w, "k,sampled,semicircle").map_err(io)?;
            for k in 1..=m.len() {
                writeln!(w, "{k},{},{}", fmt_real(m.get(k)), fmt_real(semicircle_moment(k))).map_err(io)?;
            }
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = (1..=m.len())
                .map(|k| serde_json::json!({"k": k, "sampled": m.get(k), "semicircle": semicircle_moment(k)}))
                .collect();
            serde_json::to_writer_pretty(&mut *w, &rows).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(w).map_err(io)?;
        }
    }
    Ok(())
}

fn parse_atoms(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (x, w) = t
                .split_once(':')
                .ok_or_else(|| Error::InvalidInput(format!("atom '{t}' is not of the form x:mass")))?;
            let x: f64 = x
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad atom location '{x}'")))?;
            let w: f64 = w
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad atom mass '{w}'")))?;
            Ok((x, w))
        })
        .collect()
}

fn cmd_rate(a: &RateArgs, stdout: &mut dyn Write) -> Result<i32> {
    let rows: Vec<(&str, String)> = match a.kind.as_str() {
        "ldp" => {
            let atoms = parse_atoms(&a.atoms)?;
            let bulk = 1.0 - atoms.iter().map(|p| p.1).sum::<f64>();
            let mu = match a.bulk.as_str() {
                "semicircle" => AcPlusAtoms::new(move |x| bulk * semicircle_density(x), atoms)?,
                "arcsine" => AcPlusAtoms::new(move |x| bulk * arcsine_density(x), atoms)?,
                other => return Err(invalid(format!("unknown bulk '{other}' (semicircle|arcsine)"))),
            };
            let r = ldp_rate(&mu)?;
            vec![("ldp_rate", fmt_real(r.value()))]
        }
        "mdp" => {
            let m = MomentSequence::new(parse_real_list(
                a.moments
                    .as_deref()
                    .ok_or_else(|| invalid("--moments is required for mdp"))?,
            )?)?;
            let order = a.order.unwrap_or(DEFAULT_MDP_TRUNCATION.min(m.len()));
            let r = mdp_rate_series(&m, a.xi, parse_variant(&a.variant)?, order)?;
            vec![("mdp_rate", fmt_real(r.value()))]
        }
        other => return Err(invalid(format!("unknown rate kind '{other}' (ldp|mdp)"))),
    };
    with_sink(&a.out, stdout, |w| {
        let io = |e: std::io::Error| Error::Io(e.to_string());
        match a.out.format {
            Format::Csv => {
                writeln!(w, "quantity,value").map_err(io)?;
                for (k, v) in &rows {
                    writeln!(w, "{k},{v}").map_err(io)?;
                }
            }
            Format::Json => {
                let obj: serde_json::Map<String, serde_json::Value> = rows
                    .iter()
                    .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.clone())))
                    .collect();
                serde_json::to_writer_pretty(&mut *w, &obj).map_err(|e| Error::Io(e.to_string()))?;
                writeln!(w).map_err(io)?;
            }
        }
        Ok(())
    })?;
    Ok(EXIT_OK)
}

fn cmd_clt(a: &CltArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let p = match (&a.poly, a.moment) {
        (Some(s), _) => parse_polynomial(s)?,
        (None, Some(k)) => Polynomial::monomial(k),
        (None, None) => return Err(invalid("one of --poly or --moment is required")),
    };
    if a.histogram.is_some() && a.bins < 1 {
        return Err(invalid(format!("--bins must be at least 1, got {}", a.bins)));
    }
    let c = experiment_config(&a.ensemble, &a.run, Statistic::Polynomial(p))?;
    let (report, samples) = run_clt_with_samples(&c)?;
    if let Some(path) = &a.histogram {
        let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        emit_histogram(&samples, a.bins as usize, &mut w)?;
        w.flush().map_err(|e| Error::Io(e.to_string()))?;
    }
    describe(std::slice::from_ref(&report), stderr);
    let reports = [report];
    with_sink(&a.out, stdout, |w| emit_report(&reports, a.out.format, w))?;
    Ok(verdict_status(&reports))
}

fn cmd_mdp(a: &MdpArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let mut c = experiment_config(&a.ensemble, &a.run, Statistic::Moment(a.moment))?;
    c.b_n = Some(a.b_n);
    let reports = [run_mdp_centering(&c)?];
    describe(&reports, stderr);
    with_sink(&a.out, stdout, |w| emit_report(&reports, a.out.format, w))?;
    Ok(verdict_status(&reports))
}

fn cmd_mp(a: &MpArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    if a.n < 1 {
        return Err(invalid(format!("matrix size n must be at least 1, got {}", a.n)));
    }
    let rule = GammaRule::Linear { tau: a.tau };
    rule.validate()?;
    let ks: Vec<usize> = match a.moment {
        Some(k) => vec![k],
        None => (1..=4).collect(),
    };
    let mut reports = Vec::new();
    for k in ks {
        let mut c = ExperimentConfig::new(
            a.n as usize,
            a.beta,
            rule,
            a.run.replicates,
            a.seed,
            Statistic::Moment(k),
        );
        c.mode = RescalingMode::None;
        apply_run_args(&mut c, &a.run)?;
        reports.push(run_mp_sanity(&c)?);
    }
    describe(&reports, stderr);
    with_sink(&a.out, stdout, |w| emit_report(&reports, a.out.format, w))?;
    Ok(verdict_status(&reports))
}

fn cmd_identities(a: &IdentityArgs, stdout: &mut dyn Write) -> Result<i32> {
    let checks = exact_identity_checks(a.order)?;
    with_sink(&a.out, stdout, |w| {
        let io = |e: std::io::Error| Error::Io(e.to_string());
        match a.out.format {
            Format::Csv => {
                writeln!(w, "identity,order,passed,detail").map_err(io)?;
                for c in &checks {
                    writeln!(w, "{},{},{},{}", c.name, c.order, c.passed, c.detail).map_err(io)?;
                }
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, &checks).map_err(|e| Error::Io(e.to_string()))?;
                writeln!(w).map_err(io)?;
            }
        }
        Ok(())
    })?;
    Ok(if checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_VERDICT
    })
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit status.
pub fn parse_and_dispatch(argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Sample(a) => cmd_sample(a, stdout),
        Command::Moments(a) => cmd_moments(a, stdout, stderr),
        Command::Rate(a) => cmd_rate(a, stdout),
        Command::Clt(a) => cmd_clt(a, stdout, stderr),
        Command::Mdp(a) => cmd_mdp(a, stdout, stderr),
        Command::MpSanity(a) => cmd_mp(a, stdout, stderr),
        Command::Identities(a) => cmd_identities(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn gamma_rule_syntax() {
        assert_eq!(
            parse_gamma_rule("pow:2:1").unwrap(),
            GammaRule::PowerLaw {
                exponent: 2.0,
                coefficient: 1.0
            }
        );
        assert_eq!(parse_gamma_rule("lin:0.5").unwrap(), GammaRule::Linear { tau: 0.5 });
        for bad in ["pow:2", "lin:", "lin:2", "pow:0.5:1", "exp:1", ""] {
            assert!(parse_gamma_rule(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn config_is_spliced_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "n = 10\nmode = \"shifted\"\n").unwrap();
        let v = expand_config(&args(&[
            "prog",
            "sample",
            "--config",
            path.to_str().unwrap(),
            "--n",
            "3",
        ]))
        .unwrap();
        assert_eq!(
            v,
            args(&["prog", "sample", "--mode", "shifted", "--n", "10", "--n", "3"])
        );
    }

    #[test]
    fn config_rejects_tables_and_bools() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "flag = true\n").unwrap();
        assert!(config_args(&path).is_err());
    }

    #[test]
    fn atom_lists() {
        assert_eq!(parse_atoms("3:0.1, -2.5:0.2").unwrap(), vec![(3.0, 0.1), (-2.5, 0.2)]);
        assert!(parse_atoms("3").is_err());
        assert!(parse_atoms("").unwrap().is_empty());
    }
}
