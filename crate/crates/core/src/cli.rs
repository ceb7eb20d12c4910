//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for invalid input or flags, 3 when the test
//! is undefined for the sample (degenerate data or moments outside the
//! family domain).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::chisq::q_test;
use crate::error::{Error, Result};
use crate::fmt_sig;
use crate::gof::{summarize, z_test};
use crate::harness::{
    mean_for_zero_prob, standard_level_points, parse_config, parse_counts, parse_values, run_cells,
    write_csv, CellResult, CellSpec, ExperimentGrid, GridLaw, ParamPoint, DEFAULT_ALPHA,
    DEFAULT_REPS, DEFAULT_SEED,
};
use crate::models::{AltDistribution, NullFamily};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pgf-gof", version, about = "Goodness-of-fit tests for count data based on the probability of zero")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a data file against a null family.
    Test(TestArgs),
    /// Empirical significance level of both tests under the null.
    Level(LevelArgs),
    /// Empirical power against fixed alternatives.
    Power(PowerArgs),
    /// Power along shrinking-mixture or thinning alternatives.
    Contig(ContigArgs),
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// File of nonnegative integers separated by whitespace or commas; `#` starts a comment line.
    pub data: PathBuf,
    /// Null family: shifted-borel, geometric, bell1 or bell2.
    #[arg(long)]
    pub family: NullFamily,
    /// Nominal significance level.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Also run the chi-squared comparator.
    #[arg(long)]
    pub comparator: bool,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// Sample sizes, as `start:stop:step` or a comma list.
    #[arg(long, default_value = "50")]
    pub n: String,
    /// Monte Carlo replications per cell.
    #[arg(long, default_value_t = DEFAULT_REPS)]
    pub reps: usize,
    /// Master seed.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Nominal significance level.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cell config file, one `key=value` cell per line; replaces the grid flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LevelArgs {
    /// Null family.
    #[arg(long, required_unless_present = "config")]
    pub family: Option<NullFamily>,
    /// Means, as `start:stop:step` or a comma list.
    #[arg(long, conflicts_with_all = ["p0", "standard_grid"])]
    pub mu: Option<String>,
    /// Second moments paired with `--mu` (bell2 only).
    #[arg(long, requires = "mu")]
    pub mu2: Option<String>,
    /// Zero probabilities, mapped to means (one-parameter families).
    #[arg(long, conflicts_with = "standard_grid")]
    pub p0: Option<String>,
    /// Use the family's standard level grid.
    #[arg(long)]
    pub standard_grid: bool,
    #[command(flatten)]
    pub study: StudyArgs,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    /// Null families, comma separated.
    #[arg(long, value_delimiter = ',', required_unless_present = "config")]
    pub null: Vec<NullFamily>,
    /// Alternative `id:p1,p2,...`; repeat for several.
    #[arg(long)]
    pub alt: Vec<AltDistribution>,
    /// Use the full 20-row alternative table.
    #[arg(long)]
    pub table: bool,
    #[command(flatten)]
    pub study: StudyArgs,
}

#[derive(Debug, Args)]
pub struct ContigArgs {
    /// Null family of the base law.
    #[arg(long, required_unless_present = "config")]
    pub base: Option<NullFamily>,
    /// Mean of the base law.
    #[arg(long, required_unless_present = "config")]
    pub mu: Option<f64>,
    /// Second moment of the base law (bell2).
    #[arg(long)]
    pub mu2: Option<f64>,
    /// Mean-matched contaminant `id:params` for shrinking mixtures.
    #[arg(long, conflicts_with = "thinning")]
    pub contaminant: Option<AltDistribution>,
    /// Use binomial thinning instead of a mixture.
    #[arg(long)]
    pub thinning: bool,
    /// Contiguity rates, as `start:stop:step` or a comma list.
    #[arg(long, default_value = "0")]
    pub lambda: String,
    #[command(flatten)]
    pub study: StudyArgs,
}

/// Parses the data-file format, reporting the line of the first bad token.
pub fn parse_data(text: &str) -> Result<Vec<u64>> {
    let mut xs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let x = tok.parse::<u64>().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("`{tok}` is not a nonnegative integer"),
            })?;
            xs.push(x);
        }
    }
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(xs)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Degenerate(_)
        | Error::Domain(_)
        | Error::MomentDomain(_)
        | Error::NonPositiveDf { .. }
        | Error::SampleTooSmall { .. } => EXIT_DEGENERATE,
        _ => EXIT_INPUT,
    }
}

fn cmd_test(a: &TestArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(Error::InvalidSpec(format!("--alpha must lie in (0, 1), got {}", a.alpha)));
    }
    let text = std::fs::read_to_string(&a.data)
        .map_err(|e| Error::Io(format!("{}: {e}", a.data.display())))?;
    let xs = parse_data(&text)?;
    let s = summarize(&xs)?;
    writeln!(out, "family    {}", a.family)?;
    writeln!(out, "n         {}", s.n)?;
    writeln!(out, "mu_hat    {}", fmt_sig(s.mu_hat))?;
    writeln!(out, "mu2_hat   {}", fmt_sig(s.mu2_hat))?;
    writeln!(out, "P0_hat    {}", fmt_sig(s.p0_hat))?;
    let z = match z_test(a.family, &xs, a.alpha) {
        Ok(z) => z,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(exit_code(&e));
        }
    };
    writeln!(out, "T0        {}", fmt_sig(z.raw_numerator))?;
    writeln!(out, "sigma_hat {}", fmt_sig(z.sigma_hat))?;
    writeln!(out, "Z_n       {}", fmt_sig(z.statistic))?;
    writeln!(out, "p-value   {}", fmt_sig(z.p_value))?;
    writeln!(out, "decision  {}", decision(z.reject, a.alpha))?;
    for d in &z.diagnostics {
        writeln!(out, "note      {d}")?;
    }
    if a.comparator {
        match q_test(a.family, &xs, a.alpha) {
            Ok(q) => {
                writeln!(out, "Q_n       {}", fmt_sig(q.statistic))?;
                writeln!(out, "Q p-value {}", fmt_sig(q.p_value))?;
                writeln!(out, "Q decision {}", decision(q.reject, a.alpha))?;
                for d in &q.diagnostics {
                    writeln!(out, "note      {d}")?;
                }
            }
            Err(e) => writeln!(out, "Q_n       unavailable: {e}")?,
        }
    }
    Ok(EXIT_OK)
}

fn decision(reject: bool, alpha: f64) -> String {
    if reject {
        format!("reject H0 at alpha = {}", fmt_sig(alpha))
    } else {
        format!("do not reject H0 at alpha = {}", fmt_sig(alpha))
    }
}

fn grid_base(fam: NullFamily, law: GridLaw, s: &StudyArgs) -> Result<ExperimentGrid> {
    Ok(ExperimentGrid::new(fam, law)
        .sizes(parse_counts(&s.n)?)
        .reps(s.reps)
        .alpha(s.alpha)
        .seed(s.seed))
}

fn read_config(path: &Path) -> Result<Vec<CellSpec>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

fn level_cells(a: &LevelArgs) -> Result<Vec<CellSpec>> {
    if let Some(path) = &a.study.config {
        return read_config(path);
    }
    let fam = a.family.ok_or_else(|| Error::InvalidSpec("--family is required".into()))?;
    let points = if a.standard_grid {
        standard_level_points(fam)
    } else if let Some(p0) = &a.p0 {
        let NullFamily::One(f) = fam else {
            return Err(Error::InvalidSpec("--p0 applies to one-parameter families".into()));
        };
        parse_values(p0)?
            .into_iter()
            .map(|p| mean_for_zero_prob(f, p).map(ParamPoint::Mean))
            .collect::<Result<_>>()?
    } else if let Some(mu) = &a.mu {
        let mus = parse_values(mu)?;
        match (fam, &a.mu2) {
            (NullFamily::One(_), None) => mus.into_iter().map(ParamPoint::Mean).collect(),
            (NullFamily::Two(_), Some(mu2)) => {
                let mu2s = parse_values(mu2)?;
                if mu2s.len() != mus.len() {
                    return Err(Error::InvalidSpec("--mu and --mu2 must have equal length".into()));
                }
                mus.into_iter().zip(mu2s).map(|(m, m2)| ParamPoint::Moments(m, m2)).collect()
            }
            (NullFamily::One(_), Some(_)) => {
                return Err(Error::InvalidSpec("--mu2 applies to bell2 only".into()))
            }
            (NullFamily::Two(_), None) => {
                return Err(Error::InvalidSpec("bell2 needs --mu2 alongside --mu".into()))
            }
        }
    } else {
        return Err(Error::InvalidSpec("give one of --mu, --p0 or --standard-grid".into()));
    };
    grid_base(fam, GridLaw::Null, &a.study)?.points(points).cells()
}

fn power_cells(a: &PowerArgs) -> Result<Vec<CellSpec>> {
    if let Some(path) = &a.study.config {
        return read_config(path);
    }
    let mut alts = a.alt.clone();
    if a.table {
        alts.extend(AltDistribution::power_table());
    }
    if alts.is_empty() {
        return Err(Error::InvalidSpec("give --alt or --table".into()));
    }
    if a.null.is_empty() {
        return Err(Error::InvalidSpec("--null is required".into()));
    }
    // alternative-major order, as in a power table
    let mut cells = Vec::new();
    for &d in &alts {
        for &fam in &a.null {
            cells.extend(grid_base(fam, GridLaw::Alternatives(vec![d]), &a.study)?.cells()?);
        }
    }
    Ok(cells)
}

fn contig_cells(a: &ContigArgs) -> Result<Vec<CellSpec>> {
    if let Some(path) = &a.study.config {
        return read_config(path);
    }
    let fam = a.base.ok_or_else(|| Error::InvalidSpec("--base is required".into()))?;
    let mu = a.mu.ok_or_else(|| Error::InvalidSpec("--mu is required".into()))?;
    let point = match (fam, a.mu2) {
        (NullFamily::One(_), None) => ParamPoint::Mean(mu),
        (NullFamily::Two(_), Some(mu2)) => ParamPoint::Moments(mu, mu2),
        (NullFamily::One(_), Some(_)) => {
            return Err(Error::InvalidSpec("--mu2 applies to bell2 only".into()))
        }
        (NullFamily::Two(_), None) => return Err(Error::InvalidSpec("bell2 needs --mu2".into())),
    };
    let lambdas = parse_values(&a.lambda)?;
    let law = match (a.contaminant, a.thinning) {
        (Some(contaminant), false) => GridLaw::Mixture { contaminant, lambdas },
        (None, true) => GridLaw::Thinning { lambdas },
        _ => return Err(Error::InvalidSpec("give exactly one of --contaminant or --thinning".into())),
    };
    grid_base(fam, law, &a.study)?.points(vec![point]).cells()
}

fn run_study(
    cells: Vec<CellSpec>,
    study: &StudyArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let results: Vec<CellResult> = run_cells(&cells, |i, total, r| {
        let c = &r.cell;
        let _ = writeln!(
            err,
            "[{i}/{total}] {} {} {} n={}: z={} q={}",
            c.null_family,
            c.law.label(),
            c.param_label(),
            c.n,
            fmt_sig(r.rejection_rate_z),
            fmt_sig(r.rejection_rate_q),
        );
    })?;
    let flagged = results
        .iter()
        .filter(|r| r.degenerate_count + r.domain_error_count > 0)
        .count();
    if flagged > 0 {
        writeln!(
            err,
            "note: {flagged} cell(s) had replications where Z_n was undefined; counted as non-rejections"
        )?;
    }
    match &study.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            write_csv(&results, std::io::BufWriter::new(file))?;
            writeln!(err, "wrote {} row(s) to {}", results.len(), path.display())?;
        }
        None => write_csv(&results, &mut *out)?,
    }
    Ok(EXIT_OK)
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Test(a) => cmd_test(a, out, err),
        Command::Level(a) => run_study(level_cells(a)?, &a.study, out, err),
        Command::Power(a) => run_study(power_cells(a)?, &a.study, out, err),
        Command::Contig(a) => run_study(contig_cells(a)?, &a.study, out, err),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point used by the binary.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
