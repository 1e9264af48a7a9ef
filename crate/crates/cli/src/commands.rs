use std::f64::consts::{FRAC_PI_2, PI};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use busemann::bodies::random::random_direction;
use busemann::bodies::{make_ball, make_lune, StarBody};
use busemann::functionals::{
    bound_constants, intersection_functional, section_volume_with, volume_with, BoundKind, CheckOptions,
    ConcaveArgument, FunctionalOptions, QuadratureConfig, RadialDensityMeasure, Sense, TheoremId,
};
use busemann::spaces::Direction;
use busemann::verify::{
    equality_bodies, extremizer_search, perturbation_sign_experiment, random_bodies, run_theorem_suite,
    sharpness_schedule, theorem_space, SearchClass, SearchSettings, DEFAULT_BETAS, DEFAULT_SCHEDULE,
};
use busemann::SpaceSpec;

use crate::output::{check_out, emit, num, Table, FORMAT_VERSION};
use crate::spec::{parse_body, parse_space};
use crate::{
    CliError, FunctionalArgs, MeasureArg, PerturbationArgs, QuadArgs, SearchArgs, SenseArg, SharpnessArgs, VerifyArgs,
};

fn quadrature(q: &QuadArgs) -> Result<QuadratureConfig, CliError> {
    if !(q.radial_tol > 0.0 && q.radial_tol < 1.0) {
        return Err(CliError::usage(format!(
            "--radial-tol {} must lie in (0, 1)",
            q.radial_tol
        )));
    }
    for (flag, d) in [("--outer-degree", q.outer_degree), ("--inner-degree", q.inner_degree)] {
        if d == Some(0) {
            return Err(CliError::usage(format!("{flag} must be at least 1")));
        }
    }
    Ok(QuadratureConfig {
        outer_degree: q.outer_degree,
        inner_degree: q.inner_degree,
        radial_tol: q.radial_tol,
    })
}

fn core(context: &str) -> impl Fn(busemann::Error) -> CliError + '_ {
    move |e| CliError::from_core(context, e)
}

fn body_json(b: &StarBody) -> Value {
    serde_json::to_value(b).expect("bodies serialize")
}

fn section_directions(n: usize, count: usize, seed: u64) -> Vec<Direction> {
    if n == 2 {
        return (0..count)
            .map(|j| {
                let a = PI * j as f64 / count as f64;
                Direction::normalized(vec![a.cos(), a.sin()]).expect("unit vector")
            })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_direction(&mut rng, n)).collect()
}

pub fn functional(a: FunctionalArgs) -> Result<bool, CliError> {
    check_out(a.out.as_deref())?;
    let q = quadrature(&a.quad)?;
    let space = a.space.as_deref().map(parse_space).transpose()?;
    let body = parse_body(&a.body, space)?;
    if let Some(p) = a.exponent {
        if !(p > 0.0 && p.is_finite()) {
            return Err(CliError::usage(format!("--exponent {p} must be positive")));
        }
    }
    let measure = match a.measure {
        MeasureArg::Uniform => None,
        MeasureArg::Gaussian => Some(RadialDensityMeasure::gaussian()),
    };
    if let Some(p) = &a.save_body {
        std::fs::write(p, body.to_json().map_err(core("--save-body"))? + "\n")
            .map_err(|e| CliError::usage(format!("--save-body {}: {e}", p.display())))?;
    }
    let n = body.dim();
    let vol = volume_with(&body, measure.as_ref(), &q).map_err(core("volume"))?;
    let mut opts = FunctionalOptions::default().quadrature(q);
    opts.exponent = a.exponent;
    if let Some(m) = &measure {
        opts = opts.with_measure(m.clone());
    }
    let f = intersection_functional(&body, &opts).map_err(core("functional"))?;
    let sections = section_directions(n, a.sections, a.seed)
        .into_iter()
        .map(|xi| {
            let s = section_volume_with(&body, &xi, measure.as_ref(), &q).map_err(core("section"))?;
            Ok((xi, s))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    println!("space       {}", body.space());
    println!("body        {}", body.profile().kind());
    println!("volume      {:.15e} ± {:.1e}", vol.value, vol.error);
    println!("functional  {:.15e} ± {:.1e}", f.value, f.error);
    if !sections.is_empty() {
        println!("\n{:<40} section", "xi");
        for (xi, s) in &sections {
            println!("{:<40} {s:.12e}", fmt_vec(xi.as_slice()));
        }
    }
    let measure_name = measure.as_ref().map_or("uniform", |m| m.name()).to_string();
    emit(
        a.out.as_deref(),
        || {
            json!({
                "format_version": FORMAT_VERSION,
                "command": "functional",
                "space": serde_json::to_value(body.space()).expect("serializable"),
                "body": body_json(&body),
                "measure": measure_name,
                "exponent": a.exponent.unwrap_or(n as f64),
                "volume": {"value": vol.value, "error": vol.error},
                "functional": {"value": f.value, "error": f.error},
                "sections": sections
                    .iter()
                    .map(|(xi, s)| json!({"xi": xi.as_slice(), "value": s}))
                    .collect::<Vec<_>>(),
            })
        },
        || {
            let mut t = Table::new(&["quantity", "value", "error", "xi"]);
            t.push(vec!["volume".into(), num(vol.value), num(vol.error), String::new()]);
            t.push(vec!["functional".into(), num(f.value), num(f.error), String::new()]);
            for (xi, s) in &sections {
                t.push(vec!["section".into(), num(*s), String::new(), fmt_vec(xi.as_slice())]);
            }
            t
        },
    )?;
    Ok(true)
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" ")
}

fn default_dim(t: TheoremId) -> usize {
    match t {
        TheoremId::MinNd | TheoremId::SphericalConcave | TheoremId::SphericalCrude => 3,
        _ => 2,
    }
}

pub fn verify(a: VerifyArgs) -> Result<bool, CliError> {
    check_out(a.out.as_deref())?;
    let q = quadrature(&a.quad)?;
    let theorem = TheoremId::from_str(&a.theorem).map_err(|_| {
        let ids: Vec<_> = TheoremId::ALL.iter().map(|t| t.id()).collect();
        CliError::usage(format!(
            "--theorem: unknown `{}` (one of {})",
            a.theorem,
            ids.join(", ")
        ))
    })?;
    if !(a.rel_tol >= 0.0 && a.rel_tol < 1.0) {
        return Err(CliError::usage(format!("--rel-tol {} must lie in [0, 1)", a.rel_tol)));
    }
    let space = match (&a.space, a.dim) {
        (Some(s), dim) => {
            let s = parse_space(s)?;
            if dim.is_some_and(|d| d != s.dim()) {
                return Err(CliError::usage(format!("--dim disagrees with --space {s}")));
            }
            theorem.check_space(&s).map_err(core("--space"))?;
            s
        }
        (None, dim) => theorem_space(theorem, dim.unwrap_or(default_dim(theorem))).map_err(core("--dim"))?,
    };

    let mut bodies: Vec<(String, StarBody)> = Vec::new();
    for spec in &a.body {
        bodies.push((spec.clone(), parse_body(spec, Some(space))?));
    }
    for &w in &a.w {
        if space.dim() != 2 || space != SpaceSpec::hemisphere(2).map_err(core("--w"))? {
            return Err(CliError::usage("--w builds lunes, which live in s+:2"));
        }
        bodies.push((
            format!("lune:w={w}"),
            make_lune(w, Direction::axis(2, 0)).map_err(core("--w"))?,
        ));
    }
    for &r in &a.r {
        bodies.push((format!("ball:r={r}"), make_ball(space, r).map_err(core("--r"))?));
    }
    if let Some(count) = a.random {
        let random = random_bodies(theorem, space, count, a.seed).map_err(core("--random"))?;
        bodies.extend(
            random
                .into_iter()
                .enumerate()
                .map(|(i, b)| (format!("random #{i} ({})", b.profile().kind()), b)),
        );
    }
    if bodies.is_empty() {
        let eq = equality_bodies(theorem, space).map_err(core("--theorem"))?;
        bodies.extend(
            eq.into_iter()
                .map(|b| (format!("equality case ({})", b.profile().kind()), b)),
        );
    }
    for (label, b) in &bodies {
        theorem.check_space(b.space()).map_err(core(label))?;
        if theorem.requires_symmetry() && !b.is_symmetric() {
            return Err(CliError::usage(format!(
                "{label}: {theorem} needs an origin-symmetric body"
            )));
        }
    }

    let opts = CheckOptions {
        quadrature: q,
        rel_tol: a.rel_tol,
        concave_argument: if a.unscaled {
            ConcaveArgument::Unscaled
        } else {
            ConcaveArgument::Scaled
        },
        ..CheckOptions::default()
    };
    let list: Vec<StarBody> = bodies.iter().map(|(_, b)| b.clone()).collect();
    let mut suite = run_theorem_suite(theorem, &list, &opts);
    if let Some(e) = suite.errors.first() {
        return Err(CliError::Numeric(format!("{}: {}", bodies[e.index].0, e.message)));
    }
    for (r, (label, _)) in suite.reports.iter_mut().zip(&bodies) {
        r.body = Some(label.clone());
    }

    println!("theorem {theorem} in {space}, {} bodies", suite.reports.len());
    println!("{:<28} {:>22} {:>22} {:>10} verdict", "body", "lhs", "rhs", "rel_gap");
    for r in &suite.reports {
        println!(
            "{:<28} {:>22.14e} {:>22.14e} {:>10.2e} {}",
            r.body.as_deref().unwrap_or(""),
            r.lhs,
            r.rhs,
            r.rel_gap,
            if r.passed() { "pass" } else { "FAIL" }
        );
        if let Some(note) = &r.note {
            println!("    {note}");
        }
    }
    let pass = suite.all_pass();
    println!("{}", if pass { "all pass" } else { "violation" });
    emit(
        a.out.as_deref(),
        || serde_json::to_value(&suite).expect("serializable"),
        || {
            let mut t = Table::new(&[
                "index",
                "theorem_id",
                "body",
                "lhs",
                "lhs_error",
                "rhs",
                "volume",
                "gap",
                "rel_gap",
                "tolerance",
                "verdict",
            ]);
            for (i, r) in suite.reports.iter().enumerate() {
                t.push(vec![
                    i.to_string(),
                    r.theorem_id.id().into(),
                    r.body.clone().unwrap_or_default(),
                    num(r.lhs),
                    num(r.lhs_error),
                    num(r.rhs),
                    num(r.volume),
                    num(r.gap),
                    num(r.rel_gap),
                    num(r.tolerance),
                    if r.passed() { "pass" } else { "fail" }.into(),
                ]);
            }
            t
        },
    )?;
    Ok(pass)
}

pub fn perturbation(a: PerturbationArgs) -> Result<bool, CliError> {
    check_out(a.out.as_deref())?;
    let q = quadrature(&a.quad)?;
    if a.dim < 3 {
        return Err(CliError::usage(format!("--dim {} must be at least 3", a.dim)));
    }
    for &r in &a.r {
        if !(r > 0.0 && r < FRAC_PI_2) {
            return Err(CliError::usage(format!("--r {r} must lie in (0, pi/2)")));
        }
    }
    let betas = if a.beta.is_empty() {
        DEFAULT_BETAS.to_vec()
    } else {
        a.beta.clone()
    };
    if let Some(b) = betas.iter().find(|b| !(**b > 0.0)) {
        return Err(CliError::usage(format!("--beta {b} must be positive")));
    }
    if a.k.is_empty() || a.r.is_empty() {
        return Err(CliError::usage("--k and --r need at least one value"));
    }

    let mut runs = Vec::new();
    for &r in &a.r {
        for &k in &a.k {
            let e = perturbation_sign_experiment(a.dim, r, k, &betas, &q).map_err(core("perturbation"))?;
            runs.push(e);
        }
    }
    let mut ok = true;
    println!(
        "{:>8} {:>3} {:>8} {:>13} {:>10} {:>5} {:>5} {:>11} {:>11}",
        "r", "k", "beta", "delta", "error", "pred", "obs", "ratio", "predicted"
    );
    for e in &runs {
        for (i, row) in e.rows.iter().enumerate() {
            println!(
                "{:>8.4} {:>3} {:>8.4} {:>+13.5e} {:>10.1e} {:>5} {:>5} {:>11.5} {:>11.5}{}",
                row.r,
                row.k,
                row.beta,
                row.difference,
                row.difference_error,
                sign(row.predicted_sign),
                if row.conclusive {
                    sign(row.difference.signum() as i8)
                } else {
                    "?"
                },
                row.ratio,
                row.predicted_ratio,
                if e.decisive == Some(i) { "  <- decisive" } else { "" }
            );
        }
        match e.sign_matches() {
            Some(true) => {}
            Some(false) => ok = false,
            None => println!("  r = {}, k = {}: no conclusive row", e.rows[0].r, e.rows[0].k),
        }
    }
    println!(
        "{}",
        if ok {
            "observed signs match the prediction"
        } else {
            "sign mismatch"
        }
    );
    emit(
        a.out.as_deref(),
        || {
            json!({
                "format_version": FORMAT_VERSION,
                "experiment": "perturbation",
                "n": a.dim,
                "experiments": runs.iter().map(|e| json!({
                    "r": e.rows[0].r,
                    "k": e.rows[0].k,
                    "decisive": e.decisive,
                    "observed_sign": e.observed_sign(),
                    "sign_matches": e.sign_matches(),
                    "ratio_deviation": e.ratio_deviation(),
                    "rows": serde_json::to_value(&e.rows).expect("serializable"),
                })).collect::<Vec<_>>(),
            })
        },
        || {
            let mut t = Table::new(&[
                "n",
                "r",
                "k",
                "beta",
                "alpha",
                "delta_norm",
                "eps_norm",
                "lhs_k",
                "lhs_b",
                "difference",
                "difference_error",
                "conclusive",
                "decisive",
                "predicted_sign",
                "observed_sign",
                "c5",
                "lambda_k",
                "ratio",
                "predicted_ratio",
            ]);
            for e in &runs {
                for (i, row) in e.rows.iter().enumerate() {
                    t.push(vec![
                        row.n.to_string(),
                        num(row.r),
                        row.k.to_string(),
                        num(row.beta),
                        num(row.alpha),
                        num(row.delta_norm),
                        num(row.eps_norm),
                        num(row.lhs_k),
                        num(row.lhs_b),
                        num(row.difference),
                        num(row.difference_error),
                        row.conclusive.to_string(),
                        (e.decisive == Some(i)).to_string(),
                        row.predicted_sign.to_string(),
                        if row.conclusive {
                            (row.difference.signum() as i8).to_string()
                        } else {
                            "0".into()
                        },
                        num(row.c5),
                        num(row.lambda_k),
                        num(row.ratio),
                        num(row.predicted_ratio),
                    ]);
                }
            }
            t
        },
    )?;
    Ok(ok)
}

fn sign(s: i8) -> &'static str {
    if s > 0 {
        "+"
    } else {
        "-"
    }
}

pub fn sharpness(a: SharpnessArgs) -> Result<bool, CliError> {
    check_out(a.out.as_deref())?;
    if a.dim < 3 {
        return Err(CliError::usage(format!("--dim {} must be at least 3", a.dim)));
    }
    if !(a.t > 0.0 && a.t < 1.0) {
        return Err(CliError::usage(format!("--t {} must lie in (0, 1)", a.t)));
    }
    let (alphas, eps): (Vec<f64>, Vec<f64>) = if a.alpha.is_empty() && a.eps.is_empty() {
        DEFAULT_SCHEDULE.iter().copied().unzip()
    } else if a.alpha.len() == a.eps.len() {
        (a.alpha.clone(), a.eps.clone())
    } else {
        return Err(CliError::usage("--alpha and --eps need the same number of values"));
    };
    if let Some(x) = alphas.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
        return Err(CliError::usage(format!("--alpha {x} must lie in (0, 1)")));
    }
    if let Some(x) = eps.iter().find(|x| !(**x > 0.0)) {
        return Err(CliError::usage(format!("--eps {x} must be positive")));
    }
    let constant = bound_constants(BoundKind::SphericalMinimum, a.dim).map_err(core("--dim"))?;
    let rows = sharpness_schedule(a.dim, a.t, &alphas, &eps).map_err(core("sharpness"))?;
    println!(
        "{:>8} {:>6} {:>7} {:>14} {:>14} {:>10}",
        "alpha", "eps", "strips", "volume", "normalized", "excess"
    );
    for r in &rows {
        println!(
            "{:>8.4} {:>6.3} {:>7} {:>14.8} {:>14.8} {:>+10.4}%",
            r.alpha,
            r.eps,
            r.strips,
            r.volume,
            r.normalized,
            100.0 * r.excess
        );
    }
    println!("constant {constant:.10}");
    let ok = rows.iter().all(|r| r.normalized >= constant * (1.0 - 1e-9));
    emit(
        a.out.as_deref(),
        || {
            json!({
                "format_version": FORMAT_VERSION,
                "experiment": "sharpness",
                "n": a.dim,
                "t": a.t,
                "constant": constant,
                "rows": serde_json::to_value(&rows).expect("serializable"),
            })
        },
        || {
            let mut t = Table::new(&[
                "n",
                "t",
                "alpha",
                "eps",
                "strips",
                "lambda",
                "volume",
                "functional",
                "functional_error",
                "normalized",
                "constant",
                "excess",
            ]);
            for r in &rows {
                t.push(vec![
                    a.dim.to_string(),
                    num(a.t),
                    num(r.alpha),
                    num(r.eps),
                    r.strips.to_string(),
                    num(r.lambda),
                    num(r.volume),
                    num(r.functional),
                    num(r.functional_error),
                    num(r.normalized),
                    num(r.constant),
                    num(r.excess),
                ]);
            }
            t
        },
    )?;
    Ok(ok)
}

pub fn search(a: SearchArgs) -> Result<bool, CliError> {
    check_out(a.out.as_deref())?;
    let space = parse_space(&a.space)?;
    let class = SearchClass::from_str(&a.class).map_err(core("--class"))?;
    let sense = match a.sense {
        SenseArg::Max => Sense::Upper,
        SenseArg::Min => Sense::Lower,
    };
    let mut settings = SearchSettings::new(space, class, a.volume, sense, a.budget, a.seed);
    settings.nodes = a.nodes;
    let trace = extremizer_search(&settings).map_err(core("search"))?;
    println!(
        "{} search in {space}, class {class}, volume {}: objective {:.10} -> {:.10} ({} of {} steps accepted, volume drift {:.1e})",
        if sense == Sense::Upper { "max" } else { "min" },
        a.volume,
        trace.initial_objective,
        trace.best_objective,
        trace.accepted(),
        trace.steps.len(),
        trace.max_drift()
    );
    emit(
        a.out.as_deref(),
        || {
            json!({
                "format_version": FORMAT_VERSION,
                "experiment": "search",
                "settings": serde_json::to_value(&trace.settings).expect("serializable"),
                "initial_objective": trace.initial_objective,
                "best_objective": trace.best_objective,
                "accepted": trace.accepted(),
                "max_drift": trace.max_drift(),
                "best": body_json(&trace.best),
                "steps": serde_json::to_value(&trace.steps).expect("serializable"),
            })
        },
        || {
            let mut t = Table::new(&["iteration", "objective", "volume_drift", "step", "accepted"]);
            for s in &trace.steps {
                t.push(vec![
                    s.iteration.to_string(),
                    num(s.objective),
                    num(s.volume_drift),
                    num(s.step),
                    s.accepted.to_string(),
                ]);
            }
            t
        },
    )?;
    Ok(true)
}
