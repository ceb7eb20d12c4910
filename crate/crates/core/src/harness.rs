//! Reproducible Monte Carlo studies of level and power.
//!
//! A study is a list of [`CellSpec`]s. Each cell draws `reps` samples of size
//! `n` from its data law, runs both the p.g.f. test and the chi-squared
//! comparator against the cell's null family, and records rejection rates.
//! Replication `r` of a cell reads its own RNG stream, so results do not
//! depend on how replications are scheduled across threads.
//!
//! Replications where a test cannot be computed (a degenerate sample, or
//! sample moments outside the family domain) count as non-rejections and are
//! tallied separately.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::chisq::q_test;
use crate::contiguous::{MixtureContigSpec, ThinningContigSpec};
use crate::error::{Error, Result};
use crate::fmt_sig;
use crate::gof::z_test;
use crate::models::{AltDistribution, CountLaw, InversionSampler, NullFamily, NullLaw, OneParamFamily, TwoParamFamily};
use crate::rng::CellStreams;

pub const DEFAULT_REPS: usize = 5000;
pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_SEED: u64 = 1;

/// CSV header shared by every study.
pub const CSV_HEADER: [&str; 12] = [
    "null_family",
    "alt_id",
    "param_point",
    "n",
    "reps",
    "alpha",
    "seed",
    "reject_rate_z",
    "reject_rate_q",
    "mc_se",
    "degenerate",
    "domain_errors",
];

/// A parameter point of the null family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamPoint {
    Mean(f64),
    Moments(f64, f64),
}

impl ParamPoint {
    /// The null law at this point, validated against the family domain.
    pub fn law(self, fam: NullFamily) -> Result<NullLaw> {
        match (fam, self) {
            (NullFamily::One(f), ParamPoint::Mean(mu)) => NullLaw::one(f, mu),
            (NullFamily::Two(f), ParamPoint::Moments(mu, mu2)) => NullLaw::two(f, mu, mu2),
            (NullFamily::One(f), p) => {
                Err(Error::InvalidSpec(format!("{f} takes a mean, got {p}")))
            }
            (NullFamily::Two(f), p) => {
                Err(Error::InvalidSpec(format!("{f} takes (mu, mu2), got {p}")))
            }
        }
    }
}

impl fmt::Display for ParamPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ParamPoint::Mean(mu) => write!(f, "mu={}", fmt_sig(mu)),
            ParamPoint::Moments(mu, mu2) => write!(f, "mu={};mu2={}", fmt_sig(mu), fmt_sig(mu2)),
        }
    }
}

/// How a cell's samples are generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataLaw {
    /// The null family at the cell's parameter point.
    Null,
    /// A fixed alternative; the cell's parameter point is unused.
    Alt(AltDistribution),
    /// A shrinking mixture of the null at the parameter point with `contaminant`.
    Mixture { contaminant: AltDistribution, lambda: f64 },
    /// Binomial thinning of the null at the parameter point.
    Thinning { lambda: f64 },
}

impl DataLaw {
    /// The `alt_id` column.
    pub fn label(&self) -> String {
        match self {
            DataLaw::Null => "null".to_string(),
            DataLaw::Alt(d) => d.to_string(),
            DataLaw::Mixture { contaminant, lambda } => {
                format!("mixture({contaminant};lambda={})", fmt_sig(*lambda))
            }
            DataLaw::Thinning { lambda } => format!("thinning(lambda={})", fmt_sig(*lambda)),
        }
    }
}

/// One cell of a study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSpec {
    pub null_family: NullFamily,
    /// Required unless the data law is [`DataLaw::Alt`].
    pub point: Option<ParamPoint>,
    pub law: DataLaw,
    pub n: usize,
    pub reps: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl CellSpec {
    pub fn param_label(&self) -> String {
        self.point.map(|p| p.to_string()).unwrap_or_default()
    }

    /// Stable identifier feeding the cell's RNG key.
    pub fn key(&self) -> String {
        format!("{}|{}|{}|{}", self.null_family, self.law.label(), self.param_label(), self.n)
    }

    /// Checks the cell and builds its sample generator.
    fn generator(&self) -> Result<Generator> {
        if self.reps == 0 {
            return Err(Error::InvalidSpec("reps must be at least 1".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidSpec("n must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidSpec(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        let base = || -> Result<NullLaw> {
            let point = self.point.ok_or_else(|| {
                Error::InvalidSpec(format!("{} cells need a parameter point", self.law.label()))
            })?;
            point.law(self.null_family)
        };
        Ok(match self.law {
            DataLaw::Null => Generator::Iid(base()?.sampler()),
            DataLaw::Alt(d) => Generator::Iid(d.sampler()),
            DataLaw::Mixture { contaminant, lambda } => {
                let spec = MixtureContigSpec::new(base()?, contaminant, lambda, self.n)?;
                Generator::Mixture(spec.samplers())
            }
            DataLaw::Thinning { lambda } => {
                let spec = ThinningContigSpec::new(base()?, lambda, self.n)?;
                Generator::Thinning(spec.samplers())
            }
        })
    }
}

enum Generator {
    Iid(InversionSampler),
    Mixture(crate::contiguous::MixtureSamplers),
    Thinning(crate::contiguous::ThinningSamplers),
}

impl Generator {
    fn sample(&self, n: usize, rng: &mut crate::rng::StreamRng) -> Vec<u64> {
        match self {
            Generator::Iid(s) => s.sample_n(rng, n),
            Generator::Mixture(s) => s.sample(rng),
            Generator::Thinning(s) => s.sample(rng),
        }
    }
}

/// Aggregated outcome of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub cell: CellSpec,
    pub rejection_rate_z: f64,
    pub rejection_rate_q: f64,
    /// Replications where `Zₙ` was undefined because the sample was degenerate.
    pub degenerate_count: usize,
    /// Replications where the sample moments fell outside the family domain.
    pub domain_error_count: usize,
    /// Replications where `Qₙ` could not be computed.
    pub q_error_count: usize,
    /// `√(r(1 − r)/reps)` for the `Zₙ` rate.
    pub monte_carlo_se: f64,
}

impl CellResult {
    pub fn se_q(&self) -> f64 {
        let r = self.rejection_rate_q;
        (r * (1.0 - r) / self.cell.reps as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    z: usize,
    q: usize,
    degenerate: usize,
    domain: usize,
    q_errors: usize,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            z: self.z + o.z,
            q: self.q + o.q,
            degenerate: self.degenerate + o.degenerate,
            domain: self.domain + o.domain,
            q_errors: self.q_errors + o.q_errors,
        }
    }
}

fn one_replication(cell: &CellSpec, gen: &Generator, streams: &CellStreams, rep: u64) -> Tally {
    let mut rng = streams.replication(rep);
    let xs = gen.sample(cell.n, &mut rng);
    let mut t = Tally::default();
    match z_test(cell.null_family, &xs, cell.alpha) {
        Ok(r) => t.z = usize::from(r.reject),
        Err(Error::Degenerate(_)) | Err(Error::EmptySample) | Err(Error::SampleTooSmall { .. }) => {
            t.degenerate = 1
        }
        Err(_) => t.domain = 1,
    }
    match q_test(cell.null_family, &xs, cell.alpha) {
        Ok(r) => t.q = usize::from(r.reject),
        Err(_) => t.q_errors = 1,
    }
    t
}

/// Runs one cell, with replications spread over the rayon pool.
pub fn run_cell(cell: &CellSpec) -> Result<CellResult> {
    let gen = cell.generator()?;
    let streams = CellStreams::new(cell.seed, &cell.key());
    let t = (0..cell.reps as u64)
        .into_par_iter()
        .map(|rep| one_replication(cell, &gen, &streams, rep))
        .reduce(Tally::default, Tally::merge);
    let reps = cell.reps as f64;
    let rz = t.z as f64 / reps;
    Ok(CellResult {
        cell: *cell,
        rejection_rate_z: rz,
        rejection_rate_q: t.q as f64 / reps,
        degenerate_count: t.degenerate,
        domain_error_count: t.domain,
        q_error_count: t.q_errors,
        monte_carlo_se: (rz * (1.0 - rz) / reps).sqrt(),
    })
}

/// Runs cells in order, calling `progress(i, total, result)` after each.
pub fn run_cells<F>(cells: &[CellSpec], mut progress: F) -> Result<Vec<CellResult>>
where
    F: FnMut(usize, usize, &CellResult),
{
    // validate everything before spending time on simulation
    for c in cells {
        c.generator()?;
    }
    let mut out = Vec::with_capacity(cells.len());
    for (i, c) in cells.iter().enumerate() {
        let r = run_cell(c)?;
        progress(i + 1, cells.len(), &r);
        out.push(r);
    }
    Ok(out)
}

/// Which kind of data law a grid uses.
#[derive(Debug, Clone, PartialEq)]
pub enum GridLaw {
    Null,
    Alternatives(Vec<AltDistribution>),
    Mixture { contaminant: AltDistribution, lambdas: Vec<f64> },
    Thinning { lambdas: Vec<f64> },
}

/// A rectangular study: parameter points × data laws × sample sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub null_family: NullFamily,
    /// Parameter points of the null; ignored for [`GridLaw::Alternatives`].
    pub points: Vec<ParamPoint>,
    pub law: GridLaw,
    pub sizes: Vec<usize>,
    pub reps: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl ExperimentGrid {
    pub fn new(null_family: NullFamily, law: GridLaw) -> Self {
        ExperimentGrid {
            null_family,
            points: Vec::new(),
            law,
            sizes: Vec::new(),
            reps: DEFAULT_REPS,
            alpha: DEFAULT_ALPHA,
            seed: DEFAULT_SEED,
        }
    }

    pub fn points(mut self, points: Vec<ParamPoint>) -> Self {
        self.points = points;
        self
    }

    pub fn sizes(mut self, sizes: Vec<usize>) -> Self {
        self.sizes = sizes;
        self
    }

    pub fn reps(mut self, reps: usize) -> Self {
        self.reps = reps;
        self
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Expands the grid in order: points, then laws, then sizes.
    pub fn cells(&self) -> Result<Vec<CellSpec>> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidSpec("grid has no sample sizes".into()));
        }
        let laws: Vec<DataLaw> = match &self.law {
            GridLaw::Null => vec![DataLaw::Null],
            GridLaw::Alternatives(alts) => alts.iter().map(|&d| DataLaw::Alt(d)).collect(),
            GridLaw::Mixture { contaminant, lambdas } => lambdas
                .iter()
                .map(|&lambda| DataLaw::Mixture { contaminant: *contaminant, lambda })
                .collect(),
            GridLaw::Thinning { lambdas } => {
                lambdas.iter().map(|&lambda| DataLaw::Thinning { lambda }).collect()
            }
        };
        let points: Vec<Option<ParamPoint>> = match self.law {
            GridLaw::Alternatives(_) => vec![None],
            _ => {
                if self.points.is_empty() {
                    return Err(Error::InvalidSpec("grid has no parameter points".into()));
                }
                for p in &self.points {
                    p.law(self.null_family)?;
                }
                self.points.iter().copied().map(Some).collect()
            }
        };
        let mut cells = Vec::new();
        for &point in &points {
            for &law in &laws {
                for &n in &self.sizes {
                    cells.push(CellSpec {
                        null_family: self.null_family,
                        point,
                        law,
                        n,
                        reps: self.reps,
                        alpha: self.alpha,
                        seed: self.seed,
                    });
                }
            }
        }
        Ok(cells)
    }
}

fn require_law(grid: &ExperimentGrid, ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("{what} experiment given a {:?} grid", grid.law)))
    }
}

/// Empirical significance level: data drawn from the null itself.
pub fn run_level_experiment(grid: &ExperimentGrid) -> Result<Vec<CellResult>> {
    require_law(grid, grid.law == GridLaw::Null, "level")?;
    run_cells(&grid.cells()?, |_, _, _| {})
}

/// Empirical power against fixed alternatives.
pub fn run_power_experiment(grid: &ExperimentGrid) -> Result<Vec<CellResult>> {
    require_law(grid, matches!(grid.law, GridLaw::Alternatives(_)), "power")?;
    run_cells(&grid.cells()?, |_, _, _| {})
}

/// Power curves along contiguous alternatives.
pub fn run_contig_experiment(grid: &ExperimentGrid) -> Result<Vec<CellResult>> {
    require_law(
        grid,
        matches!(grid.law, GridLaw::Mixture { .. } | GridLaw::Thinning { .. }),
        "contiguous",
    )?;
    run_cells(&grid.cells()?, |_, _, _| {})
}

/// Writes the results as CSV; numbers carry six significant digits.
pub fn write_csv<W: Write>(results: &[CellResult], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CSV_HEADER)?;
    for r in results {
        let c = &r.cell;
        wtr.write_record([
            c.null_family.id().to_string(),
            c.law.label(),
            c.param_label(),
            c.n.to_string(),
            c.reps.to_string(),
            fmt_sig(c.alpha),
            c.seed.to_string(),
            fmt_sig(r.rejection_rate_z),
            fmt_sig(r.rejection_rate_q),
            fmt_sig(r.monte_carlo_se),
            r.degenerate_count.to_string(),
            r.domain_error_count.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn emit_csv(results: &[CellResult], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(results, std::io::BufWriter::new(file))
}

/// Expands `start:stop:step` (inclusive of `stop` up to rounding) or a comma
/// list. Values are computed as `start + i·step`, so no error accumulates.
pub fn parse_values(s: &str) -> Result<Vec<f64>> {
    let bad = |t: &str| Error::InvalidSpec(format!("bad number `{t}` in `{s}`"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad(t));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [single] => single.split(',').map(num).collect(),
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || !step.is_finite() || stop < start {
                return Err(Error::InvalidSpec(format!("range `{s}` needs step > 0 and stop >= start")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(Error::InvalidSpec(format!("expected `start:stop:step` or a comma list, got `{s}`"))),
    }
}

/// Like [`parse_values`] for nonnegative integers.
pub fn parse_counts(s: &str) -> Result<Vec<usize>> {
    parse_values(s)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::InvalidSpec(format!("expected nonnegative integers, got {v} in `{s}`")))
            }
        })
        .collect()
}

/// Means from 0.5 to 15 in steps of 1.
pub fn standard_mu_grid() -> Vec<f64> {
    parse_values("0.5:15:1").expect("static range")
}

/// Zero probabilities from 0.05 to 0.95 in steps of 0.07.
pub fn standard_p0_grid() -> Vec<f64> {
    parse_values("0.05:0.95:0.07").expect("static range")
}

/// The mean at which a one-parameter family has `P(X=0) = p0`, by bisection
/// to an absolute tolerance of `1e-10` on `μ`.
pub fn mean_for_zero_prob(fam: OneParamFamily, p0: f64) -> Result<f64> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::Domain(format!("P(X=0) must lie in (0, 1), got {p0}")));
    }
    let mut hi = 1.0;
    while fam.psi0(hi)? > p0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Domain(format!("no mean gives P(X=0) = {p0}")));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        // ψ₀ decreases in μ
        if fam.psi0(mid)? > p0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The 36 two-parameter Bell points with `α, θ ∈ {0.3, 0.5, …, 1.3}`.
pub fn standard_bell2_grid() -> Vec<ParamPoint> {
    let vals = parse_values("0.3:1.3:0.2").expect("static range");
    let mut out = Vec::with_capacity(vals.len() * vals.len());
    for &a in &vals {
        for &t in &vals {
            let (mu, mu2) = TwoParamFamily::Bell.h(a, t).expect("positive parameters");
            out.push(ParamPoint::Moments(mu, mu2));
        }
    }
    out
}

/// The level-study points for a family: means for shifted Borel and
/// Geometric, zero-probability-indexed means for one-parameter Bell, and
/// the natural-parameter grid for two-parameter Bell.
pub fn standard_level_points(fam: NullFamily) -> Vec<ParamPoint> {
    match fam {
        NullFamily::One(OneParamFamily::Bell) => standard_p0_grid()
            .into_iter()
            .map(|p| ParamPoint::Mean(mean_for_zero_prob(OneParamFamily::Bell, p).expect("p0 in (0,1)")))
            .collect(),
        NullFamily::One(_) => standard_mu_grid().into_iter().map(ParamPoint::Mean).collect(),
        NullFamily::Two(_) => standard_bell2_grid(),
    }
}

/// The full power table: every catalog alternative against every
/// one-parameter family, for a single sample size.
pub fn power_table_cells(n: usize, reps: usize, seed: u64) -> Vec<CellSpec> {
    let mut cells = Vec::new();
    for d in AltDistribution::power_table() {
        for fam in OneParamFamily::ALL {
            cells.push(CellSpec {
                null_family: fam.into(),
                point: None,
                law: DataLaw::Alt(d),
                n,
                reps,
                alpha: DEFAULT_ALPHA,
                seed,
            });
        }
    }
    cells
}

/// Parses a study config: one cell per line as `key=value` tokens.
///
/// Keys: `null`, `alt` (`null`, `mixture`, `thinning` or `id:params`), `n`,
/// `reps`, `seed`, `alpha`, `mu`, `mu2`, `contaminant`, `lambda`. Blank
/// lines and lines starting with `#` are skipped.
pub fn parse_config(text: &str) -> Result<Vec<CellSpec>> {
    let mut cells = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 1;
        let err = |message: String| Error::Parse { line: lineno, message };
        cells.push(parse_config_line(line).map_err(|e| match e {
            Error::Parse { .. } => e,
            other => err(other.to_string()),
        })?);
    }
    Ok(cells)
}

fn parse_field<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>().map_err(|_| Error::InvalidSpec(format!("bad value `{v}` for `{key}`")))
}

fn parse_config_line(line: &str) -> Result<CellSpec> {
    let (mut null, mut alt, mut n) = (None, None, None);
    let (mut reps, mut seed, mut alpha) = (DEFAULT_REPS, DEFAULT_SEED, DEFAULT_ALPHA);
    let (mut mu, mut mu2, mut contaminant, mut lambda) = (None, None, None, None);
    for tok in line.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::InvalidSpec(format!("expected `key=value`, got `{tok}`")))?;
        match k {
            "null" => null = Some(v.parse::<NullFamily>()?),
            "alt" => alt = Some(v.to_string()),
            "n" => n = Some(parse_field::<usize>(k, v)?),
            "reps" => reps = parse_field(k, v)?,
            "seed" => seed = parse_field(k, v)?,
            "alpha" => alpha = parse_field(k, v)?,
            "mu" => mu = Some(parse_field::<f64>(k, v)?),
            "mu2" => mu2 = Some(parse_field::<f64>(k, v)?),
            "contaminant" => contaminant = Some(v.parse::<AltDistribution>()?),
            "lambda" => lambda = Some(parse_field::<f64>(k, v)?),
            _ => return Err(Error::InvalidSpec(format!("unknown key `{k}`"))),
        }
    }
    let null_family = null.ok_or_else(|| Error::InvalidSpec("missing `null=`".into()))?;
    let alt = alt.ok_or_else(|| Error::InvalidSpec("missing `alt=`".into()))?;
    let n = n.ok_or_else(|| Error::InvalidSpec("missing `n=`".into()))?;
    let point = match (null_family, mu, mu2) {
        (_, None, _) => None,
        (NullFamily::One(_), Some(m), None) => Some(ParamPoint::Mean(m)),
        (NullFamily::Two(_), Some(m), Some(m2)) => Some(ParamPoint::Moments(m, m2)),
        (NullFamily::One(f), Some(_), Some(_)) => {
            return Err(Error::InvalidSpec(format!("{f} takes `mu=` only")))
        }
        (NullFamily::Two(f), Some(_), None) => {
            return Err(Error::InvalidSpec(format!("{f} needs both `mu=` and `mu2=`")))
        }
    };
    let need_lambda = || lambda.ok_or_else(|| Error::InvalidSpec("missing `lambda=`".into()));
    let law = match alt.as_str() {
        "null" => DataLaw::Null,
        "mixture" => DataLaw::Mixture {
            contaminant: contaminant.ok_or_else(|| Error::InvalidSpec("missing `contaminant=`".into()))?,
            lambda: need_lambda()?,
        },
        "thinning" => DataLaw::Thinning { lambda: need_lambda()? },
        spec => DataLaw::Alt(spec.parse()?),
    };
    let cell = CellSpec { null_family, point, law, n, reps, alpha, seed };
    cell.generator()?;
    Ok(cell)
}
