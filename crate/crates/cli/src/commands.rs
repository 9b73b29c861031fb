//! The six subcommands. Each writes its CSVs into the output directory.

use std::path::{Path, PathBuf};

use glassey_core::estimates::{
    decay_envelope_check, energy_ineq_check, kss_hom_check, kss_inhom_check, run_suite, summarize, BumpForcing,
    IneqSample, LemmaId,
};
use glassey_core::lifespan::{fit_exponential, fit_power, predicted_law, sweep, LawKind};
use glassey_core::norms::{e_norms, lambda_norms, norm_report};
use glassey_core::picard::{default_s_pair, picard_run, smallness_report, PicardConfig, PicardRun};
use glassey_core::problem::{weight_exponents, ProblemSpec, WeightExponents, WeightParams};
use glassey_core::report::{fit_csv, fmt_f64, ineq_csv, ineq_detail_csv, picard_csv, sweep_csv, Csv};
use glassey_core::solver::{energy, evolve, make_profile, DataProfile, EvolveOptions, InitialData, ProfileFamily};
use glassey_core::{LabError, RadialGrid};

use crate::config::RunConfig;
use crate::CliError;

type Res<T> = Result<T, CliError>;

pub fn dispatch(cfg: &RunConfig, out: &Path) -> Res<()> {
    match cfg.subcommand.as_str() {
        "solve" => solve(cfg, out),
        "ineq" => ineq(cfg, out),
        "kss" => kss(cfg, out),
        "picard" => picard(cfg, out),
        "lifespan" => lifespan(cfg, out),
        "norms" => norms(cfg, out),
        other => Err(LabError::Parse(format!("unknown subcommand '{other}'")).into()),
    }
}

fn write(out: &Path, name: &str, text: &str) -> Res<()> {
    std::fs::write(out.join(name), text).map_err(|e| LabError::from(e).into())
}

fn spec(cfg: &RunConfig) -> Res<ProblemSpec> {
    Ok(ProblemSpec::new(cfg.usize("n")?, cfg.f64("p")?, cfg.f64("a")?, cfg.f64("b")?)?)
}

fn grid(cfg: &RunConfig) -> Res<RadialGrid> {
    Ok(RadialGrid::new(cfg.f64("rmax")?, cfg.usize("cells")?)?)
}

fn options(cfg: &RunConfig) -> Res<EvolveOptions> {
    let mut opts = EvolveOptions::default().with_cfl(cfg.f64("cfl")?);
    if let Some(dt) = cfg.opt_f64("dt_sample")? {
        opts = opts.with_sample_interval(dt);
    }
    Ok(opts)
}

fn profile(cfg: &RunConfig, epsilon: f64) -> Res<DataProfile> {
    let family = match cfg.raw("profile") {
        "gaussian" => ProfileFamily::Gaussian,
        "bump" => ProfileFamily::SmoothBump,
        "file" => ProfileFamily::FromFile(PathBuf::from(cfg.raw("data_file"))),
        other => return Err(LabError::Parse(format!("unknown profile '{other}'")).into()),
    };
    Ok(DataProfile {
        family,
        epsilon,
        width: cfg.f64("width")?,
        center: cfg.f64("center")?,
        assigns: cfg.raw("assign").parse()?,
    })
}

fn data(cfg: &RunConfig, g: &RadialGrid) -> Res<InitialData> {
    Ok(make_profile(&profile(cfg, cfg.f64("eps")?)?, g)?)
}

fn s_pair(cfg: &RunConfig, spec: &ProblemSpec) -> Res<(f64, f64)> {
    let (d1, d2) = default_s_pair(spec);
    Ok((cfg.opt_f64("s1")?.unwrap_or(d1), cfg.opt_f64("s2")?.unwrap_or(d2)))
}

fn regime_weights(cfg: &RunConfig, spec: &ProblemSpec) -> Res<WeightExponents> {
    let (s1, s2) = s_pair(cfg, spec)?;
    Ok(weight_exponents(spec.regime(), spec, s1, s2)?)
}

fn weights_from(delta: f64, delta_prime: f64, horizon: f64) -> Res<WeightParams> {
    Ok(if delta_prime == delta {
        WeightParams::critical(delta, horizon)?
    } else {
        WeightParams::new(delta, delta_prime, horizon)?
    })
}

fn fail_on_violations(what: &str, samples: &[IneqSample]) -> Res<()> {
    let s = summarize(samples);
    if s.violations > 0 {
        return Err(CliError::Assertion(format!(
            "{what}: {} of {} samples violate their bound (max ratio {})",
            s.violations, s.samples, s.max_ratio
        )));
    }
    Ok(())
}

fn solve(cfg: &RunConfig, out: &Path) -> Res<()> {
    let spec = spec(cfg)?;
    let g = grid(cfg)?;
    let d = data(cfg, &g)?;
    let res = evolve(&spec, &d, &g, cfg.f64("t")?, None, cfg.bool("linear")?, &options(cfg)?)?;
    let mut csv = Csv::new("solve", &["t", "energy", "max_u", "max_v"]);
    let mut series = String::from("# t energy\n");
    for s in res.trajectory.states() {
        let e = energy(s, spec.n_dim)?;
        csv.push(vec![fmt_f64(s.time), fmt_f64(e), fmt_f64(s.u.max_abs()), fmt_f64(s.v.max_abs())]);
        series.push_str(&format!("{} {}\n", s.time, e));
    }
    write(out, "solve.csv", &csv.render())?;
    write(out, "energy.dat", &series)?;
    let mut summary = Csv::new("solve", &["status", "t_end", "t_blowup", "peak_gradient"]);
    summary.push(vec![
        res.status.as_str().to_owned(),
        fmt_f64(res.trajectory.end_time()),
        res.t_blowup.map(fmt_f64).unwrap_or_default(),
        fmt_f64(res.peak_gradient),
    ]);
    write(out, "solve_summary.csv", &summary.render())
}

fn ineq(cfg: &RunConfig, out: &Path) -> Res<()> {
    let n = cfg.usize("n")?;
    let g = grid(cfg)?;
    let lemma: LemmaId = cfg.raw("lemma").parse()?;
    let samples = match lemma {
        LemmaId::Hardy | LemmaId::Trace | LemmaId::TraceVariant => {
            run_suite(lemma, n, cfg.f64("s")?, cfg.usize("samples")?, cfg.u64("seed")?, &g)?
        }
        LemmaId::Decay => {
            let spec = ProblemSpec::linear(n);
            let traj = evolve(&spec, &data(cfg, &g)?, &g, cfg.f64("t")?, None, true, &options(cfg)?)?.trajectory;
            let (s1, s2) = match (cfg.opt_f64("s1")?, cfg.opt_f64("s2")?) {
                (Some(a), Some(b)) => (a, b),
                _ => (0.5, 1.0),
            };
            vec![decay_envelope_check(&traj, s1, s2)?]
        }
        LemmaId::EnergyIneq => {
            let spec = ProblemSpec::linear(n);
            let f = BumpForcing::unit(cfg.f64("amplitude")?);
            let res = evolve(&spec, &data(cfg, &g)?, &g, cfg.f64("t")?, Some(&f), true, &options(cfg)?)?;
            vec![energy_ineq_check(&res.trajectory, res.forcing.as_ref())?]
        }
        LemmaId::KssHom | LemmaId::KssInhom => {
            return Err(LabError::PreconditionViolation("use the kss subcommand for local-energy estimates".into()).into())
        }
    };
    write(out, "ineq.csv", &ineq_csv("ineq", &samples).render())?;
    if samples.iter().any(|s| !s.detail.is_empty()) {
        write(out, "ineq_detail.csv", &ineq_detail_csv("ineq", &samples).render())?;
    }
    fail_on_violations(lemma.as_str(), &samples)
}

fn kss(cfg: &RunConfig, out: &Path) -> Res<()> {
    let n = cfg.usize("n")?;
    let g = grid(cfg)?;
    let horizons = cfg.list_f64("horizons")?;
    let first = horizons.first().copied().unwrap_or(1.0);
    let w = weights_from(cfg.f64("delta")?, cfg.f64("delta_prime")?, first)?;
    let opts = options(cfg)?;
    let samples = match cfg.raw("mode") {
        "hom" => kss_hom_check(&data(cfg, &g)?, n, &w, &horizons, &opts)?,
        "inhom" => kss_inhom_check(&BumpForcing::unit(cfg.f64("amplitude")?), &g, n, &w, &horizons, &opts)?,
        other => return Err(LabError::Parse(format!("mode = '{other}' must be hom or inhom")).into()),
    };
    write(out, "kss.csv", &ineq_csv("kss", &samples).render())?;
    write(out, "kss_detail.csv", &ineq_detail_csv("kss", &samples).render())?;
    fail_on_violations("kss", &samples)
}

fn picard_summary(run: &PicardRun, smallness: f64, distance: Option<f64>) -> Csv {
    let mut csv = Csv::new(
        "picard",
        &["converged", "iterations", "lambda1", "smallness", "delta", "delta_prime", "max_ratio", "direct_e1_distance"],
    );
    csv.push(vec![
        run.converged.to_string(),
        run.trace.len().to_string(),
        fmt_f64(run.lambda1),
        fmt_f64(smallness),
        fmt_f64(run.weights.delta()),
        fmt_f64(run.weights.delta_prime()),
        run.ratios().into_iter().reduce(f64::max).map(fmt_f64).unwrap_or_default(),
        distance.map(fmt_f64).unwrap_or_default(),
    ]);
    csv
}

fn picard(cfg: &RunConfig, out: &Path) -> Res<()> {
    let spec = spec(cfg)?;
    let g = grid(cfg)?;
    let d = data(cfg, &g)?;
    let horizon = cfg.f64("t")?;
    let (s1, s2) = s_pair(cfg, &spec)?;
    let pc = PicardConfig {
        max_iters: cfg.usize("max_iters")?,
        tol: cfg.f64("tol")?,
        weights: regime_weights(cfg, &spec)?,
        opts: options(cfg)?,
    };
    let run = match picard_run(&spec, &d, horizon, &pc) {
        Ok(r) => r,
        Err(LabError::Divergence { iteration, rho, trace }) => {
            write(out, "picard.csv", &picard_csv(&trace).render())?;
            return Err(LabError::Divergence { iteration, rho, trace }.into());
        }
        Err(e) => return Err(e.into()),
    };
    write(out, "picard.csv", &picard_csv(&run.trace).render())?;
    let distance = if cfg.bool("compare")? {
        let direct = evolve(&spec, &d, &g, horizon, None, false, &pc.opts)?.trajectory;
        Some(e_norms(&run.final_iterate.difference(&direct)?)?.e1)
    } else {
        None
    };
    let small = smallness_report(&spec, &d, s1, s2)?.quantity;
    write(out, "picard_summary.csv", &picard_summary(&run, small, distance).render())
}

fn lifespan(cfg: &RunConfig, out: &Path) -> Res<()> {
    let spec = spec(cfg)?;
    let coarse = grid(cfg)?;
    let fine_cells = match cfg.opt_f64("cells2")? {
        Some(_) => cfg.usize("cells2")?,
        None => 2 * coarse.num_cells(),
    };
    let ladder = [coarse, RadialGrid::new(coarse.r_max(), fine_cells)?];
    let prof = profile(cfg, 1.0)?;
    let eps = cfg.list_f64("eps")?;
    let res = sweep(&spec, &prof, &eps, &ladder, cfg.f64("horizon")?, &EvolveOptions::default().with_cfl(cfg.f64("cfl")?))?;
    write(out, "sweep.csv", &sweep_csv(&res.records).render())?;
    let mut series = String::from("# epsilon t_observed\n");
    for r in &res.records {
        series.push_str(&format!("{} {}\n", r.epsilon, r.t_observed));
    }
    write(out, "lifespan.dat", &series)?;
    if let Some((e, err)) = res.failures.into_iter().next() {
        return Err(match err {
            LabError::PreconditionViolation(m) => LabError::PreconditionViolation(format!("epsilon = {e}: {m}")),
            other => other,
        }
        .into());
    }
    let fits = match predicted_law(&spec).kind {
        LawKind::Global => Vec::new(),
        LawKind::PowerLaw { exponent } => vec![fit_power(&res.records, exponent)?],
        LawKind::Exponential { .. } => vec![fit_exponential(&res.records, &spec)?],
    };
    write(out, "fit.csv", &fit_csv(&fits).render())
}

fn norms(cfg: &RunConfig, out: &Path) -> Res<()> {
    let spec = spec(cfg)?;
    let g = grid(cfg)?;
    let d = data(cfg, &g)?;
    let horizon = cfg.f64("t")?;
    let w = match (cfg.opt_f64("delta")?, cfg.opt_f64("delta_prime")?) {
        (Some(a), Some(b)) => weights_from(a, b, horizon)?,
        _ => regime_weights(cfg, &spec)?.at_horizon(horizon)?,
    };
    let res = evolve(&spec, &d, &g, horizon, None, cfg.bool("linear")?, &options(cfg)?)?;
    let mut csv = Csv::new("norms", &["name", "value"]);
    let mut row = |k: &str, v: String| csv.push(vec![k.to_owned(), v]);
    let l = lambda_norms(&d.u0, &d.u1, spec.n_dim)?;
    row("lambda1", fmt_f64(l.lambda1));
    row("lambda2", fmt_f64(l.lambda2));
    let (s1, s2) = s_pair(cfg, &spec)?;
    match smallness_report(&spec, &d, s1, s2) {
        Ok(s) => row("smallness", fmt_f64(s.quantity)),
        Err(LabError::PreconditionViolation(_)) => row("smallness", String::new()),
        Err(e) => return Err(e.into()),
    }
    row("status", res.status.as_str().to_owned());
    row("delta", fmt_f64(w.delta()));
    row("delta_prime", fmt_f64(w.delta_prime()));
    row("T", fmt_f64(horizon));
    if res.trajectory.end_time() >= horizon * (1.0 - 1e-12) {
        let r = norm_report(&res.trajectory, &w)?;
        row("e1", fmt_f64(r.e1));
        row("e2", fmt_f64(r.e2));
        row("le1", fmt_f64(r.le1));
        row("le2", fmt_f64(r.le2));
        for (k, v) in &r.components {
            row(&format!("le1_{k}"), fmt_f64(*v));
        }
        row("governing_component", r.governing_component.unwrap_or("").to_owned());
    }
    write(out, "norms.csv", &csv.render())
}
