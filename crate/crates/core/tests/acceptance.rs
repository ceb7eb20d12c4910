//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line for its
//! criterion, preceded by per-cell detail; run with `--nocapture` to see them.

mod common;

use pgf_gof::contiguous::{prop2_shift, MixtureContigSpec};
use pgf_gof::gof::{sigma2_one_param, summarize, t0_one_param, z_test_one_param};
use pgf_gof::harness::{
    mean_for_zero_prob, standard_bell2_grid, run_cell, run_cells, CellResult, CellSpec, DataLaw, ExperimentGrid,
    GridLaw, ParamPoint,
};
use pgf_gof::models::{AltDistribution, CountLaw, NullFamily, OneParamFamily, TwoParamFamily};
use pgf_gof::rng::stream_rng;
use pgf_gof::specfun::{bell_number_log, lambert_w0, stirling2_row, touchard_log};

type Law<N> = (N, Box<dyn Fn(u64) -> f64>, pgf_gof::models::InversionSampler);

const SEED: u64 = 1;

fn report(name: &str, details: &[String], ok: bool) {
    for d in details {
        println!("    {d}");
    }
    println!("{} {name}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "acceptance criterion failed: {name}");
}

fn level_cells(fam: NullFamily, points: Vec<ParamPoint>, n: usize, reps: usize) -> Vec<CellResult> {
    let grid = ExperimentGrid::new(fam, GridLaw::Null).points(points).sizes(vec![n]).reps(reps).seed(SEED);
    run_cells(&grid.cells().unwrap(), |_, _, _| {}).unwrap()
}

fn check_level(results: &[CellResult], tol: f64, details: &mut Vec<String>) -> bool {
    let mut ok = true;
    for r in results {
        let pass = (r.rejection_rate_z - 0.05).abs() <= tol;
        ok &= pass;
        details.push(format!(
            "{} {} n={}: level_z = {:.4} (q {:.4}, degenerate {}, domain {}) {}",
            r.cell.null_family,
            r.cell.param_label(),
            r.cell.n,
            r.rejection_rate_z,
            r.rejection_rate_q,
            r.degenerate_count,
            r.domain_error_count,
            if pass { "ok" } else { "OUT OF BAND" }
        ));
    }
    ok
}

#[test]
fn level_geometric_and_shifted_borel() {
    let mus = [0.5, 3.5, 7.5, 11.5, 15.0];
    let mut details = Vec::new();
    let mut ok = true;
    for fam in [OneParamFamily::Geometric, OneParamFamily::ShiftedBorel] {
        let res = level_cells(fam.into(), mus.iter().map(|&m| ParamPoint::Mean(m)).collect(), 50, 2000);
        ok &= check_level(&res, 0.02, &mut details);
    }
    report("level of Z_n for geometric and shifted-borel, n=50, 2000 reps, 0.05 +/- 0.02", &details, ok);
}

#[test]
fn level_bell1() {
    let points = [0.12, 0.40, 0.68]
        .iter()
        .map(|&p| ParamPoint::Mean(mean_for_zero_prob(OneParamFamily::Bell, p).unwrap()))
        .collect();
    let mut details = Vec::new();
    let res = level_cells(OneParamFamily::Bell.into(), points, 50, 2000);
    let ok = check_level(&res, 0.02, &mut details);
    report("level of Z_n for bell1 at P(X=0) in {0.12, 0.40, 0.68}, n=50, 0.05 +/- 0.02", &details, ok);
}

#[test]
fn level_bell2() {
    let fam = TwoParamFamily::Bell;
    let points: Vec<ParamPoint> = standard_bell2_grid()
        .into_iter()
        .filter(|p| match *p {
            ParamPoint::Moments(mu, mu2) => fam.psi0(mu, mu2).unwrap() < 0.7,
            ParamPoint::Mean(_) => false,
        })
        .collect();
    let mut details = vec![format!("{} of 36 grid points have P(X=0) < 0.7", points.len())];
    let res = level_cells(fam.into(), points, 200, 2000);
    let ok = check_level(&res, 0.025, &mut details);
    report("level of Z_n for bell2 with P(X=0) < 0.7, n=200, 0.05 +/- 0.025", &details, ok);
}

#[test]
fn power_spot_checks() {
    let cases: [(OneParamFamily, &str, usize, f64); 5] = [
        (OneParamFamily::ShiftedBorel, "poisson:1", 30, 0.947),
        (OneParamFamily::Geometric, "poisson:1", 50, 0.797),
        (OneParamFamily::Geometric, "dunif:3", 50, 0.855),
        (OneParamFamily::Bell, "binomial:4,0.25", 50, 0.927),
        (OneParamFamily::ShiftedBorel, "logseries:0.6", 30, 1.0),
    ];
    let mut details = Vec::new();
    let mut ok = true;
    for (fam, alt, n, target) in cases {
        let cell = CellSpec {
            null_family: fam.into(),
            point: None,
            law: DataLaw::Alt(alt.parse().unwrap()),
            n,
            reps: 5000,
            alpha: 0.05,
            seed: SEED,
        };
        let r = run_cell(&cell).unwrap();
        let pass = (r.rejection_rate_z - target).abs() <= 0.05;
        ok &= pass;
        details.push(format!(
            "{fam} vs {alt}, n={n}: power_z = {:.1}% (published {:.1}%) {}",
            100.0 * r.rejection_rate_z,
            100.0 * target,
            if pass { "ok" } else { "OUT OF BAND" }
        ));
    }
    report("power spot checks, 5000 reps, +/- 5 pp", &details, ok);
}

fn lambda_grid(n: usize) -> Vec<f64> {
    let top = (n as f64).sqrt();
    (0..).map(|i| 0.5 * i as f64).take_while(|&l| l <= top + 1e-12).collect()
}

#[test]
fn contiguous_mixtures() {
    let n = 50;
    let y: AltDistribution = "binomial:4,0.25".parse().unwrap();
    let mut details = Vec::new();
    let mut ok = true;
    for fam in OneParamFamily::ALL {
        let grid = ExperimentGrid::new(fam.into(), GridLaw::Mixture { contaminant: y, lambdas: lambda_grid(n) })
            .points(vec![ParamPoint::Mean(1.0)])
            .sizes(vec![n])
            .reps(2000)
            .seed(SEED);
        let res = run_cells(&grid.cells().unwrap(), |_, _, _| {}).unwrap();
        for (i, r) in res.iter().enumerate() {
            let lambda = match r.cell.law {
                DataLaw::Mixture { lambda, .. } => lambda,
                _ => unreachable!(),
            };
            let z_vs_q = r.rejection_rate_z >= r.rejection_rate_q - 2.0 * r.monte_carlo_se;
            let monotone = i == 0 || {
                let p = &res[i - 1];
                r.rejection_rate_z >= p.rejection_rate_z - 2.0 * r.monte_carlo_se.max(p.monte_carlo_se)
            };
            ok &= z_vs_q && monotone;
            details.push(format!(
                "{fam} lambda={lambda:.1}: z = {:.4}, q = {:.4}, se = {:.4}{}{}",
                r.rejection_rate_z,
                r.rejection_rate_q,
                r.monte_carlo_se,
                if monotone { "" } else { " NOT MONOTONE" },
                if z_vs_q { "" } else { " Z BELOW Q - 2se" },
            ));
        }
    }
    report("mixture power monotone in lambda and Z >= Q - 2 se, three bases, n=50", &details, ok);
}

#[test]
fn thinning() {
    let n = 50;
    let lambdas: Vec<f64> = (0..=13).map(|i| 0.5 * i as f64).collect();
    let run = |fam: OneParamFamily| {
        let grid = ExperimentGrid::new(fam.into(), GridLaw::Thinning { lambdas: lambdas.clone() })
            .points(vec![ParamPoint::Mean(15.0)])
            .sizes(vec![n])
            .reps(2000)
            .seed(SEED);
        run_cells(&grid.cells().unwrap(), |_, _, _| {}).unwrap()
    };
    let mut details = Vec::new();
    let geo = run(OneParamFamily::Geometric);
    let mut flat = true;
    for (r, l) in geo.iter().zip(&lambdas) {
        let pass = (0.03..=0.07).contains(&r.rejection_rate_z);
        flat &= pass;
        details.push(format!("geometric lambda={l:.1}: z = {:.4}{}", r.rejection_rate_z, if pass { "" } else { " OUT" }));
    }
    let borel = run(OneParamFamily::ShiftedBorel);
    let (first, last) = (borel[0].rejection_rate_z, borel[borel.len() - 1].rejection_rate_z);
    let rises = last - first > 0.10;
    details.push(format!("shifted-borel: z at lambda=0 {first:.4}, at lambda=6.5 {last:.4}"));
    report(
        "thinning: geometric flat in [0.03, 0.07]; shifted-borel gains > 10 pp by lambda=6.5",
        &details,
        flat && rises,
    );
}

struct Checks {
    ok: bool,
    details: Vec<String>,
}

impl Default for Checks {
    fn default() -> Self {
        Checks { ok: true, details: Vec::new() }
    }
}

impl Checks {
    fn check(&mut self, name: String, pass: bool) {
        self.ok &= pass;
        if !pass {
            self.details.push(format!("{name} FAILED"));
        }
    }

    fn note(&mut self, line: String) {
        self.details.push(line);
    }
}

/// Truncated p.m.f. sum until the tail is negligible relative to `k²`.
fn pmf_support(law: &dyn Fn(u64) -> f64, mu: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 0u64;
    loop {
        let p = law(k);
        out.push(p);
        if (k as f64) > 2.0 * mu + 10.0 && p * (k as f64) * (k as f64) < 1e-24 {
            break;
        }
        k += 1;
    }
    out
}

#[test]
fn oracle_suite() {
    let mut c = Checks::default();

    // σ² closed forms against Var[ψ₀′(μ)X − I{X=0}] by two-pass summation
    let mut worst = 0.0f64;
    for fam in OneParamFamily::ALL {
        for i in 0..30 {
            let mu = 0.5 + 0.5 * i as f64;
            let a = fam.psi0_prime(mu).unwrap();
            let probs = pmf_support(&|k| fam.pmf(k, mu).unwrap(), mu);
            let w = |k: usize| a * k as f64 - if k == 0 { 1.0 } else { 0.0 };
            let mean: f64 = probs.iter().enumerate().map(|(k, p)| p * w(k)).sum();
            let var: f64 = probs.iter().enumerate().map(|(k, p)| p * (w(k) - mean).powi(2)).sum();
            let closed = fam.sigma2_closed_form(mu).unwrap();
            let rel = ((closed - var) / var).abs();
            worst = worst.max(rel);
            c.check(format!("sigma2 {fam} mu={mu}: rel {rel:e}"), rel <= 1e-8);
            let generic = sigma2_one_param(fam, mu).unwrap();
            c.check(format!("sigma2 generic {fam} mu={mu}"), ((generic - closed) / closed).abs() <= 1e-8);
        }
    }
    c.note(format!("sigma2 closed forms: worst relative error {worst:.2e}"));

    // bell2 partials by central differences, and h round trips
    let f2 = TwoParamFamily::Bell;
    let mut worst_fd = 0.0f64;
    let mut worst_rt = 0.0f64;
    let natural = [0.3, 0.5, 0.7, 0.9, 1.1, 1.3];
    for (al, th) in natural.iter().flat_map(|&a| natural.iter().map(move |&t| (a, t))) {
        let (mu, mu2) = f2.h(al, th).unwrap();
        let h1 = 1e-5 * mu;
        let h2 = 1e-5 * mu2;
        let fd_mu = (f2.psi0(mu + h1, mu2).unwrap() - f2.psi0(mu - h1, mu2).unwrap()) / (2.0 * h1);
        let fd_mu2 = (f2.psi0(mu, mu2 + h2).unwrap() - f2.psi0(mu, mu2 - h2).unwrap()) / (2.0 * h2);
        let e1 = ((fd_mu - f2.dpsi0_dmu(mu, mu2).unwrap()) / fd_mu).abs();
        let e2 = ((fd_mu2 - f2.dpsi0_dmu2(mu, mu2).unwrap()) / fd_mu2).abs();
        worst_fd = worst_fd.max(e1).max(e2);
        c.check(format!("bell2 partials at ({al}, {th})"), e1 <= 1e-6 && e2 <= 1e-6);
        let (a2, t2) = f2.h_inverse(mu, mu2).unwrap();
        let rt = ((a2 - al) / al).abs().max(((t2 - th) / th).abs());
        worst_rt = worst_rt.max(rt);
        c.check(format!("bell2 round trip at ({al}, {th})"), rt <= 1e-9);
    }
    for i in 1..=60 {
        let mu = 0.25 * i as f64;
        let theta = OneParamFamily::Bell.h_inverse(mu).unwrap();
        let rt = ((theta * theta.exp() - mu) / mu).abs();
        worst_rt = worst_rt.max(rt);
        c.check(format!("bell1 round trip at mu={mu}"), rt <= 1e-9);
    }
    c.note(format!("bell2 partials vs finite differences: worst {worst_fd:.2e}"));
    c.note(format!("h round trips: worst {worst_rt:.2e}"));

    // special functions
    c.check("W(e) = 1".into(), (lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() <= 1e-14);
    c.check("W(0) = 0".into(), lambert_w0(0.0).unwrap() == 0.0);
    for &x in &[1e-8, 0.1, 0.5, 1.0, 10.0, 1e3, 1e6, 1e12] {
        let w = lambert_w0(x).unwrap();
        c.check(format!("W({x}) e^W = x"), ((w * w.exp() - x) / x).abs() <= 1e-12);
    }
    let bells: [u64; 11] = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975];
    for (n, &b) in bells.iter().enumerate() {
        let v = bell_number_log(n).value();
        c.check(format!("B_{n}"), ((v - b as f64) / b as f64).abs() <= 1e-12);
        let t = touchard_log(n, 1.0).unwrap().value();
        c.check(format!("T_{n}(1) = B_{n}"), ((t - b as f64) / b as f64).abs() <= 1e-12);
        let row = stirling2_row(n).unwrap();
        let sum: f64 = row.ln_values().iter().map(|l| l.exp()).sum();
        c.check(format!("row sum {n}"), ((sum - b as f64) / b as f64).abs() <= 1e-12);
    }
    for &alpha in &[0.3f64, 1.3, 4.0] {
        for n in [0usize, 3, 12, 25] {
            // Dobinski form e^{−α} Σ k^n α^k / k!
            let mut ln_terms = Vec::new();
            for k in 0..400u64 {
                let lk = if n == 0 { 0.0 } else if k == 0 { f64::NEG_INFINITY } else { n as f64 * (k as f64).ln() };
                ln_terms.push(lk + k as f64 * alpha.ln() - pgf_gof::specfun::ln_factorial(k));
            }
            let series = pgf_gof::specfun::log_sum_exp(&ln_terms) - alpha;
            let t = touchard_log(n, alpha).unwrap().ln();
            c.check(format!("Touchard series n={n} alpha={alpha}"), (t - series).abs() <= 1e-10);
        }
    }
    c.note("Lambert W, Bell, Stirling and Touchard identities checked".into());

    // samplers: chi-squared GOF at 1% with 10⁵ draws
    let mut laws: Vec<Law<String>> = Vec::new();
    for fam in OneParamFamily::ALL {
        for mu in [0.5, 1.0, 7.5, 15.0] {
            let law = fam.at(mu).unwrap();
            laws.push((format!("{fam} mu={mu}"), Box::new(move |k| law.pmf(k)), law.sampler()));
        }
    }
    for (al, th) in [(0.3, 0.3), (1.0, 1.0), (1.3, 1.3)] {
        let law = f2.at_natural(al, th).unwrap();
        laws.push((format!("bell2 ({al}, {th})"), Box::new(move |k| law.pmf(k)), law.sampler()));
    }
    for d in AltDistribution::power_table() {
        laws.push((d.to_string(), Box::new(move |k| d.pmf(k)), d.sampler()));
    }
    let mut min_p = 1.0f64;
    for (name, pmf, sampler) in &laws {
        let mut rng = stream_rng(SEED, &format!("oracle-sampler|{name}"), 0);
        let draws = sampler.sample_n(&mut rng, 100_000);
        let p = common::pmf_gof_pvalue(&draws, pmf);
        min_p = min_p.min(p);
        c.check(format!("sampler {name}: p = {p:.4}"), p >= 0.01);
    }
    c.note(format!("{} samplers tested, smallest GOF p-value {min_p:.4}", laws.len()));
    report("oracle suite", &c.details, c.ok);
}

#[test]
fn null_normality() {
    let n = 200;
    let reps = 5000;
    let mut details = Vec::new();
    let mut ok = true;
    for fam in OneParamFamily::ALL {
        let sampler = fam.at(1.0).unwrap().sampler();
        let mut zs: Vec<f64> = (0..reps)
            .filter_map(|r| {
                let mut rng = stream_rng(SEED, &format!("normality|{fam}"), r);
                let xs = sampler.sample_n(&mut rng, n);
                z_test_one_param(fam, &xs, 0.05).ok().map(|t| t.statistic)
            })
            .collect();
        zs.sort_by(|a, b| a.total_cmp(b));
        let m = zs.len() as f64;
        let phi = |z: f64| 0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2);
        let ks = zs
            .iter()
            .enumerate()
            .map(|(i, &z)| {
                let f = phi(z);
                (f - i as f64 / m).abs().max((i as f64 + 1.0) / m - f)
            })
            .fold(0.0, f64::max);
        let pass = ks < 0.025 && zs.len() == reps as usize;
        ok &= pass;
        details.push(format!("{fam} mu=1: KS distance {ks:.4} over {} statistics", zs.len()));
    }
    report("null normality: KS distance of Z_n from N(0,1) < 0.025, n=200, 5000 reps", &details, ok);
}

#[test]
fn mixture_centering_band() {
    let fam = OneParamFamily::ShiftedBorel;
    let y: AltDistribution = "binomial:4,0.25".parse().unwrap();
    let n = 10_000;
    let reps = 2000u64;
    let sigma = sigma2_one_param(fam, 1.0).unwrap().sqrt();
    let band = 3.0 * sigma / (reps as f64).sqrt();
    let mut details = Vec::new();
    let mut ok = true;
    for lambda in [1.0, 2.0] {
        let spec = MixtureContigSpec::new(fam.at(1.0).unwrap(), y, lambda, n).unwrap();
        let samplers = spec.samplers();
        let total: f64 = (0..reps)
            .map(|r| {
                let mut rng = stream_rng(SEED, &format!("centering|{lambda}"), r);
                let xs = samplers.sample(&mut rng);
                t0_one_param(fam, &summarize(&xs).unwrap()).unwrap()
            })
            .sum();
        let mean = total / reps as f64;
        let shift = prop2_shift(fam, 1.0, &y, lambda).unwrap();
        let pass = (mean - shift).abs() <= band;
        ok &= pass;
        details.push(format!("lambda={lambda}: mean T0 {mean:.4}, predicted {shift:.4}, band {band:.4}"));
    }
    report("mixture centering of T0 within 3 sigma/sqrt(2000), n=10^4", &details, ok);
}
