use oscillab::asymptotics::{
    default_engine, f32_expansion_check, lemma_csv, prefactor_expansion_check, residual_csv, theorem1_sweep, Engine,
};
use oscillab::laguerre::overlap::{OverlapTable, Provenance};
use oscillab::laguerre::poly::{hbar_for, RadialMode};
use oscillab::nodal::{finite_radius_convergence, limit_nodal_measure, nodal_measure, quasimode_window, SphericalCombo, Term};
use oscillab::perturbation::{default_order, default_window, energy_series, mu_series};
use oscillab::potentials::{taylor_truncate, PotentialSpec};
use oscillab::report::Csv;
use oscillab::row;
use oscillab::spectra::hamiltonian::Perturbation;
use oscillab::spectra::radial::{default_outer_radius, growth_fit, solve_radial};
use oscillab::spectra::{track_eigenvalue, DEFAULT_STEPS};
use oscillab::verify::{run_criterion, NAMES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{Command, ConfigError, Params};

pub enum Failure {
    Config(String),
    Numerical(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<oscillab::Error> for Failure {
    fn from(e: oscillab::Error) -> Self {
        use oscillab::Error::*;
        match e {
            MalformedSpec(_) | InvalidOrder { .. } | Domain(_) | InvalidMode(_) | UnsupportedPrecision(_)
            | TruncationWindow { .. } | DegenerateInput(_) | Unsupported(_) => Failure::Config(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

pub struct Outcome {
    pub artifacts: Vec<(String, String)>,
    pub suite_failed: bool,
    pub summary: serde_json::Value,
}

impl Outcome {
    fn files(artifacts: Vec<(String, String)>) -> Self {
        Outcome { artifacts, suite_failed: false, summary: json!(null) }
    }
}

pub struct Context<'a> {
    pub params: &'a Params,
    pub potential: Option<PotentialSpec>,
    pub seed: u64,
}

impl Context<'_> {
    fn potential(&self) -> Result<&PotentialSpec, Failure> {
        self.potential.as_ref().ok_or(Failure::Config("missing `potential`".into()))
    }

    fn d(&self) -> usize {
        self.params.d.unwrap_or(2)
    }

    fn energy(&self) -> f64 {
        self.params.energy.unwrap_or(1.0)
    }

    fn engine(&self) -> Result<Engine, Failure> {
        match self.params.engine.as_deref() {
            None => Ok(default_engine()),
            Some("series") => Ok(Engine::Series),
            Some("oracle") => Ok(Engine::Oracle),
            Some(other) => Err(Failure::Config(format!("unknown engine `{other}`"))),
        }
    }

    fn ns(&self) -> Result<Vec<usize>, Failure> {
        match (&self.params.ns, self.params.n) {
            (Some(ns), _) => Ok(ns.clone()),
            (None, Some(n)) => Ok(vec![n]),
            _ => Err(ConfigError::Missing("n").into()),
        }
    }

    fn eps_grid(&self) -> Vec<f64> {
        self.params
            .eps_grid
            .clone()
            .unwrap_or_else(|| vec![self.params.eps.unwrap_or(0.1)])
    }
}

pub fn run(cmd: Command, ctx: &Context) -> Result<Outcome, Failure> {
    match cmd {
        Command::Overlap => overlap(ctx),
        Command::Series => series(ctx),
        Command::Spectrum => spectrum(ctx),
        Command::Theorem1 => theorem1(ctx),
        Command::Lemmas => lemmas(ctx),
        Command::Nodal => nodal(ctx),
        Command::Growth => growth(ctx),
        Command::Window => window(ctx),
        Command::VerifyAll => verify_all(ctx),
    }
}

fn overlap(ctx: &Context) -> Result<Outcome, Failure> {
    let p = ctx.params;
    let n = Params::need(p.n, "n")?;
    let ell = p.ell.unwrap_or(n % 2);
    let half = p.m.unwrap_or(8);
    let source = match p.source.as_deref().unwrap_or("closed_form") {
        "closed_form" => Provenance::ClosedForm,
        "quadrature" => Provenance::Quadrature,
        "exact_rational" => Provenance::ExactRational,
        other => return Err(Failure::Config(format!("unknown overlap source `{other}`"))),
    };
    let hbar = hbar_for(ctx.energy(), n, ctx.d());
    let table = OverlapTable::build(ell, ctx.d(), hbar, (n.saturating_sub(half), n + half), p.k.unwrap_or(4), source)?;
    Ok(Outcome::files(vec![("overlap.csv".into(), table.to_csv())]))
}

fn series(ctx: &Context) -> Result<Outcome, Failure> {
    let p = ctx.params;
    let v = ctx.potential()?;
    let mut dumps = Vec::new();
    let mut csv = Csv::new("ell,n,eps,E_series,E_oracle,gap");
    for n in ctx.ns()? {
        let j = p.j.unwrap_or_else(|| default_order(n));
        let k = p.k.unwrap_or_else(|| j.min(v.k_max()).max(2));
        let ells = p.ells.clone().unwrap_or_else(|| vec![p.ell.unwrap_or(n % 2)]);
        for ell in ells {
            let mode = RadialMode::new(ctx.d(), n, ell, ctx.energy())?;
            let m = p.m.unwrap_or_else(|| default_window(n, k, j));
            dumps.push(mu_series(&mode, &taylor_truncate(v, k)?, j, m)?.to_json());
            let pert = Perturbation::Truncated(taylor_truncate(v, v.k_max().max(2))?);
            for &eps in &ctx.eps_grid() {
                let s = energy_series(&mode, v, eps, j, k)?.value;
                let o = track_eigenvalue(&mode, &pert, eps, DEFAULT_STEPS)?.value;
                csv.push(row![ell, n, eps, s, o, (s - o).abs()]);
            }
        }
    }
    Ok(Outcome::files(vec![
        ("series.json".into(), pretty(&json!(dumps))),
        ("energy_sweep.csv".into(), csv.render()),
    ]))
}

fn perturbation_of(v: &PotentialSpec) -> Result<Perturbation, Failure> {
    Ok(if v.closed_form.is_some() {
        Perturbation::Full(v.clone())
    } else {
        Perturbation::Truncated(taylor_truncate(v, v.k_max().max(2))?)
    })
}

fn spectrum(ctx: &Context) -> Result<Outcome, Failure> {
    let p = ctx.params;
    let pert = perturbation_of(ctx.potential()?)?;
    let mut csv = Csv::new("ell,n,eps,energy,residual");
    for n in ctx.ns()? {
        let ells = p.ells.clone().unwrap_or_else(|| (n % 2..=n).step_by(2).collect());
        for ell in ells {
            let mode = RadialMode::new(ctx.d(), n, ell, ctx.energy())?;
            for &eps in &ctx.eps_grid() {
                let est = track_eigenvalue(&mode, &pert, eps, DEFAULT_STEPS)?;
                csv.push(row![ell, n, eps, est.value, est.error_bar]);
            }
        }
    }
    Ok(Outcome::files(vec![("spectrum.csv".into(), csv.render())]))
}

fn theorem1(ctx: &Context) -> Result<Outcome, Failure> {
    let p = ctx.params;
    let engine = ctx.engine()?;
    let specs: Vec<PotentialSpec> = match &p.deltas {
        Some(ds) => ds
            .iter()
            .map(|&d| PotentialSpec::quadratic(0.5 * d * d, d))
            .collect::<Result<_, _>>()?,
        None => vec![ctx.potential()?.clone()],
    };
    let mut rows = Vec::new();
    for n in ctx.ns()? {
        for v in &specs {
            for &eps in &ctx.eps_grid() {
                rows.extend(theorem1_sweep(n, ctx.d(), ctx.energy(), eps, v, engine)?);
            }
        }
    }
    Ok(Outcome::files(vec![("residuals.csv".into(), residual_csv(&rows))]))
}

fn lemmas(ctx: &Context) -> Result<Outcome, Failure> {
    let p = ctx.params;
    let ns = p.ns.clone().unwrap_or_else(|| vec![100, 200, 400]);
    let betas = p.betas.clone().unwrap_or_else(|| (0..=8).collect());
    let ks = p.ks.clone().unwrap_or_else(|| (0..=8).collect());
    let d = ctx.d();
    let mut pre = Vec::new();
    let mut f32 = Vec::new();
    for &big_n in &ns {
        for ell in (big_n % 2..=big_n).step_by(2) {
            for &beta in &betas {
                pre.push(prefactor_expansion_check(beta, big_n, ell, d)?);
                for &k in ks.iter().filter(|&&k| k >= beta) {
                    f32.push(f32_expansion_check(k, beta, big_n, ell, d)?);
                }
            }
        }
    }
    Ok(Outcome::files(vec![
        ("lemma_prefactor.csv".into(), lemma_csv(&pre)),
        ("lemma_f32.csv".into(), lemma_csv(&f32)),
    ]))
}

fn generic_combo(rng: &mut ChaCha8Rng, d: usize, ells: &[usize]) -> Result<SphericalCombo, Failure> {
    let mut terms = Vec::new();
    for &ell in ells {
        let ms: Vec<i64> = if d == 2 {
            if ell == 0 { vec![0] } else { vec![0, 1] }
        } else {
            (-(ell as i64)..=ell as i64).collect()
        };
        for m in ms {
            terms.push(Term { ell, m, a: rng.sample(rand_distr::StandardNormal) });
        }
    }
    Ok(SphericalCombo::new(d, terms)?)
}

fn nodal(ctx: &Context) -> Result<Outcome, Failure> {
    let p = ctx.params;
    let refinement = p.refinement.unwrap_or(if ctx.d() == 2 { 1 } else { 5 });
    if let Some(combo) = &p.combo {
        let s = nodal_measure(combo, refinement)?;
        return Ok(Outcome::files(vec![("nodal_sample.json".into(), pretty(&json!(s)))]));
    }
    let v = ctx.potential()?;
    let engine = ctx.engine()?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut csv = Csv::new("n,eps,gamma,ell_max,measure_raw,measure_normalized,refinement");
    let mut radii = Csv::new("n,eps,gamma,log_R,measure_raw,limit_raw,gap,log_R_min");
    for n in ctx.ns()? {
        for &gamma in p.gammas.as_deref().unwrap_or(&[p.gamma.unwrap_or(0.5)]) {
            for &eps in &ctx.eps_grid() {
                let w = quasimode_window(n, ctx.d(), ctx.energy(), eps, gamma, v, engine)?;
                let ells: Vec<usize> = w.members.iter().map(|m| m.0).collect();
                let combo = generic_combo(&mut rng, ctx.d(), &ells)?;
                let lim = limit_nodal_measure(&w, &combo, v, refinement)?;
                if let Some(log_radii) = &p.log_radii {
                    let rec = finite_radius_convergence(&w, &combo, v, log_radii, refinement)?;
                    for (&(log_r, raw), gap) in rec.rows.iter().zip(rec.gaps()) {
                        radii.push(row![n, eps, gamma, log_r, raw, rec.limit.sample.measure_raw, gap, rec.log_r_min]);
                    }
                }
                csv.push(row![
                    n,
                    eps,
                    gamma,
                    w.ell_max,
                    lim.sample.measure_raw,
                    lim.sample.measure_normalized,
                    refinement
                ]);
            }
        }
    }
    let mut files = vec![("nodal.csv".into(), csv.render())];
    if p.log_radii.is_some() {
        files.push(("nodal_radius.csv".into(), radii.render()));
    }
    Ok(Outcome::files(files))
}

fn growth(ctx: &Context) -> Result<Outcome, Failure> {
    let p = ctx.params;
    let n = Params::need(p.n, "n")?;
    let mode = RadialMode::new(ctx.d(), n, p.ell.unwrap_or(n % 2), ctx.energy())?;
    let eps = p.eps.unwrap_or(0.0);
    let pert = match &ctx.potential {
        Some(v) if eps != 0.0 && v.closed_form.is_none() => {
            return Err(Failure::Config("growth needs a decaying potential with a closed form".into()))
        }
        Some(v) => perturbation_of(v)?,
        None => Perturbation::Truncated(oscillab::potentials::TruncatedPotential::zero(2)),
    };
    let energy = if eps == 0.0 { mode.energy } else { track_eigenvalue(&mode, &pert, eps, DEFAULT_STEPS)?.value };
    let r1 = default_outer_radius(&mode, energy);
    let sol = solve_radial(&mode, eps, &pert, energy, (r1 / 3.0, r1), 1e-10)?;
    let fit = growth_fit(&sol)?;
    let target = energy / mode.hbar() - 0.5 * mode.d as f64;
    let summary = json!({
        "mode": mode, "eps": eps, "energy": energy, "n_hat": fit.exponent,
        "intercept": fit.intercept, "target": target, "gap": (fit.exponent - target).abs(),
    });
    Ok(Outcome::files(vec![
        ("radial_profile.csv".into(), sol.to_csv()),
        ("growth.json".into(), pretty(&summary)),
    ]))
}

fn window(ctx: &Context) -> Result<Outcome, Failure> {
    let p = ctx.params;
    let v = ctx.potential()?;
    let engine = ctx.engine()?;
    let mut csv = Csv::new("n,eps,gamma,hbar,center,halfwidth,ell_max,members");
    let mut members = Csv::new("n,eps,gamma,ell,energy");
    for n in ctx.ns()? {
        for &gamma in p.gammas.as_deref().unwrap_or(&[p.gamma.unwrap_or(0.5)]) {
            for &eps in &ctx.eps_grid() {
                let w = quasimode_window(n, ctx.d(), ctx.energy(), eps, gamma, v, engine)?;
                csv.push(row![n, eps, gamma, w.hbar, w.center, w.halfwidth, w.ell_max, w.members.len()]);
                for &(ell, e) in &w.members {
                    members.push(row![n, eps, gamma, ell, e]);
                }
            }
        }
    }
    Ok(Outcome::files(vec![
        ("window.csv".into(), csv.render()),
        ("window_members.csv".into(), members.render()),
    ]))
}

fn verify_all(ctx: &Context) -> Result<Outcome, Failure> {
    let ids = ctx.params.criteria.clone().unwrap_or_else(|| (1..=NAMES.len()).collect());
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > NAMES.len()) {
        return Err(Failure::Config(format!("unknown criterion {bad}")));
    }
    let reports: Vec<_> = ids.iter().map(|&id| run_criterion(id, ctx.seed)).collect();
    for r in &reports {
        eprintln!("{}", r.line());
    }
    let mut csv = Csv::new("id,name,passed,summary");
    for r in &reports {
        csv.push(row![r.id, r.name, if r.passed { "pass" } else { "fail" }, r.summary.as_str()]);
    }
    let suite_failed = reports.iter().any(|r| !r.passed);
    let listing: Vec<_> = reports
        .iter()
        .map(|r| json!({ "id": r.id, "name": r.name, "passed": r.passed, "summary": r.summary, "details": r.details }))
        .collect();
    Ok(Outcome {
        artifacts: vec![("verify.csv".into(), csv.render()), ("verify.json".into(), pretty(&json!(listing)))],
        suite_failed,
        summary: json!(reports.iter().map(|r| json!({"id": r.id, "name": r.name, "passed": r.passed})).collect::<Vec<_>>()),
    })
}

pub fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}
