//! Kind-specific experiment execution, report envelopes and atomic persistence.

use crate::config::ExperimentConfig;
use serde::Serialize;
use serde_json::{json, Value};
use sfuc_core::analysis::{
    check_psi_condition, extend_reflect, ghost_derivative_recovery_error, ghost_pde_residual,
    ghost_sandwich_check, hyperbola_distance, weight_bounds_check, ExtensionKind,
};
use sfuc_core::breather::{
    check_condition_a, check_fg, classify_profile, BreatherFamily, ClassifyOptions,
    ConditionAConfig, FgConfig, Lattice, Measure, Profile, RandomFieldConfig,
};
use sfuc_core::error::{Error, Result};
use sfuc_core::grid::{
    build_mask, generate_sequence, make_grid, verify_delone, BoundaryCondition, BoxRegion,
    DeloneSet, SequenceMode,
};
use sfuc_core::operator::{assemble, PotentialField};
use sfuc_core::potential_model::PotentialModel;
use sfuc_core::spectral::eigs_below;
use sfuc_core::ucp::{
    fit_exponent, lifting_check, scan_scale_free, ucp_constant_exact, LiftingParams, ScanConfig,
};
use sfuc_core::util::{fmt_g17, sha256_hex};
use sfuc_core::wegner::{
    eps_max_standard, initial_scale, kappa_effective, run_wegner, wegner_bound,
    KappaEffectiveParams, WegnerRunConfig,
};
use std::fs;
use std::path::{Path, PathBuf};

pub struct RunOutcome {
    pub pass: bool,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Envelope {
    tool: &'static str,
    version: &'static str,
    kind: String,
    config: String,
    content_hash: String,
    pass: bool,
    results: Value,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn parse_bc(cfg: &ExperimentConfig, section: &str, default: Option<BoundaryCondition>) -> Result<BoundaryCondition> {
    match cfg.get(section, "bc") {
        Some(s) => BoundaryCondition::parse(s),
        None => default.ok_or_else(|| Error::Config(format!("missing required key `bc` in [{section}]"))),
    }
}

fn parse_mode(cfg: &ExperimentConfig, section: &str) -> Result<SequenceMode> {
    SequenceMode::parse(cfg.require(section, "mode")?)
}

fn parse_profile(spec: &str) -> Result<Profile> {
    Profile::parse_description(spec)
}

/// Run one experiment; reports land in `out_dir` (created if absent).
pub fn execute(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    let kind = cfg.kind()?.to_string();
    fs::create_dir_all(out_dir)?;
    let (pass, results, csvs): (bool, Value, Vec<(&str, String)>) = match kind.as_str() {
        "ucp" => run_ucp(cfg)?,
        "fit-exponent" => run_fit_exponent(cfg)?,
        "lifting" => run_lifting(cfg)?,
        "wegner" => run_wegner_kind(cfg)?,
        "initial-scale" => run_initial_scale(cfg)?,
        "heat-obs" => run_heat(cfg)?,
        "conditions" => run_conditions(cfg)?,
        "ghost" => run_ghost(cfg)?,
        "weights" => run_weights(cfg)?,
        other => return Err(Error::Config(format!("unknown kind `{other}`"))),
    };

    let config_text = cfg.to_text();
    let results_text = serde_json::to_string(&results)
        .map_err(|e| Error::Parse(format!("result serialization: {e}")))?;
    let envelope = Envelope {
        tool: "sfuc-lab",
        version: env!("CARGO_PKG_VERSION"),
        kind: kind.clone(),
        config: config_text.clone(),
        content_hash: sha256_hex(format!("{kind}\n{config_text}\n{results_text}").as_bytes()),
        pass,
        results,
    };
    let mut files = Vec::new();
    let report_path = out_dir.join("report.json");
    let body = serde_json::to_string_pretty(&envelope)
        .map_err(|e| Error::Parse(format!("envelope serialization: {e}")))?;
    write_atomic(&report_path, body.as_bytes())?;
    files.push(report_path);
    for (name, text) in csvs {
        let p = out_dir.join(name);
        write_atomic(&p, text.as_bytes())?;
        files.push(p);
    }
    Ok(RunOutcome { pass, files })
}

type KindResult = (bool, Value, Vec<(&'static str, String)>);

fn scan_config_from(cfg: &ExperimentConfig) -> Result<ScanConfig> {
    Ok(ScanConfig {
        d: cfg.usize_of("ucp", "d")?,
        bc: parse_bc(cfg, "ucp", None)?,
        density: cfg.usize_of("ucp", "m")?,
        cell: cfg.f64_of("ucp", "G")?,
        radius: cfg.f64_of("ucp", "delta")?,
        threshold: cfg.f64_of("ucp", "b")?,
        potential: PotentialModel::parse(cfg.require("ucp", "potential")?)?,
        mode: parse_mode(cfg, "ucp")?,
        seed: cfg.seed()?,
        sides: cfg.list_f64("ucp", "L")?,
        ratio_floor: cfg.f64_opt("ucp", "ratio_floor", 0.5)?,
        diffusion: cfg.f64_opt("ucp", "t", 1.0)?,
        n_exp: cfg.f64_maybe("ucp", "N")?,
        tol: cfg.f64_opt("ucp", "tol", 1e-8)?,
    })
}

fn run_ucp(cfg: &ExperimentConfig) -> Result<KindResult> {
    let scan = scan_config_from(cfg)?;
    let rep = scan_scale_free(&scan)?;
    let value = serde_json::to_value(&rep).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((rep.pass, value, vec![("ucp.csv", rep.to_csv())]))
}

fn run_fit_exponent(cfg: &ExperimentConfig) -> Result<KindResult> {
    let sec = "fit-exponent";
    let d = cfg.usize_of(sec, "d")?;
    let bc = parse_bc(cfg, sec, None)?;
    let m = cfg.usize_of(sec, "m")?;
    let cell = cfg.f64_of(sec, "G")?;
    let b = cfg.f64_of(sec, "b")?;
    let potential = PotentialModel::parse(cfg.require(sec, "potential")?)?;
    let mode = parse_mode(cfg, sec)?;
    let side = cfg.f64_of(sec, "L")?;
    let deltas = cfg.list_f64(sec, "delta")?;
    let tol = cfg.f64_opt(sec, "tol", 1e-8)?;
    let seed = cfg.seed()?;

    let grid = make_grid(d, side, m, bc)?;
    let v = potential.sample(&grid)?;
    let op = assemble(&grid, &v, 1.0)?;
    let spec = eigs_below(&op, b, tol)?;
    let mut points = Vec::new();
    for &delta in &deltas {
        let seq = generate_sequence(cell, delta, d, side, mode, seed)?;
        let mask = build_mask(&seq, &grid)?;
        let c = ucp_constant_exact(&spec, &mask)?;
        points.push((delta, c.value));
    }
    let fit = fit_exponent(&points, b, v.sup_norm)?;
    let mut csv = String::from("delta,C_obs\n");
    for (delta, c) in &points {
        csv.push_str(&format!("{},{}\n", fmt_g17(*delta), fmt_g17(*c)));
    }
    let pass = fit.n_hat.is_finite();
    let value = json!({ "points": points, "fit": fit });
    Ok((pass, value, vec![("fit.csv", csv)]))
}

fn run_lifting(cfg: &ExperimentConfig) -> Result<KindResult> {
    let sec = "lifting";
    let d = cfg.usize_of(sec, "d")?;
    let bc = parse_bc(cfg, sec, None)?;
    let m = cfg.usize_of(sec, "m")?;
    let side = cfg.f64_of(sec, "L")?;
    let cell = cfg.f64_of(sec, "G")?;
    let delta = cfg.f64_of(sec, "delta")?;
    let mode = parse_mode(cfg, sec)?;
    let alpha = cfg.f64_of(sec, "alpha")?;
    let b = cfg.f64_of(sec, "b")?;
    let a_model = PotentialModel::parse(cfg.require(sec, "a_potential")?)?;
    let n_exp = cfg.f64_maybe(sec, "N")?;
    let tol = cfg.f64_opt(sec, "tol", 1e-9)?;

    let grid = make_grid(d, side, m, bc)?;
    let seq = generate_sequence(cell, delta, d, side, mode, cfg.seed()?)?;
    let mask = build_mask(&seq, &grid)?;
    let a_field = a_model.sample(&grid)?;
    let b_field = match cfg.get(sec, "b_kind").unwrap_or("mask_indicator") {
        "mask_indicator" => PotentialField::from_values(
            &grid,
            mask.indicator.iter().map(|&x| if x { alpha } else { 0.0 }).collect(),
        )?,
        "constant" => PotentialField::from_fn(&grid, |_| alpha)?,
        other => return Err(Error::Parse(format!("unknown b_kind `{other}`"))),
    };
    let rep = lifting_check(
        &grid,
        &a_field,
        &b_field,
        &mask,
        &LiftingParams {
            alpha,
            threshold: b,
            formula: n_exp.map(|n| (n, cell, delta)),
            tol,
        },
    )?;
    let mut csv = String::from("i,lambda_base,lambda_perturbed,gap,discrete_floor,formula_floor\n");
    for r in &rep.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.index,
            fmt_g17(r.lambda_base),
            fmt_g17(r.lambda_perturbed),
            fmt_g17(r.gap),
            fmt_g17(r.discrete_floor),
            r.formula_floor.map(fmt_g17).unwrap_or_default()
        ));
    }
    let pass = rep.hypothesis_ok && rep.pass;
    let value = serde_json::to_value(&rep).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((pass, value, vec![("lifting.csv", csv)]))
}

fn wegner_field_from(cfg: &ExperimentConfig, sec: &str) -> Result<(RandomFieldConfig, Option<Value>)> {
    let lo = cfg.f64_of(sec, "measure_lo")?;
    let hi = cfg.f64_of(sec, "measure_hi")?;
    let measure = if hi > lo { Measure::Uniform { lo, hi } } else { Measure::PointMass { value: lo } };
    let mut delone_report = None;
    let lattice = match cfg.get(sec, "lattice").unwrap_or("integer") {
        "integer" => Lattice::Integer,
        "delone" => {
            let pts_raw = cfg.require(sec, "delone_points")?;
            let points: Vec<Vec<f64>> = pts_raw
                .split(';')
                .map(|t| {
                    t.trim()
                        .split(',')
                        .map(|c| {
                            c.trim().parse::<f64>().map_err(|_| {
                                Error::Parse(format!("bad delone point coordinate `{c}`"))
                            })
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            let set = DeloneSet {
                points,
                g1: cfg.f64_of(sec, "delone_g1")?,
                g2: cfg.f64_of(sec, "delone_g2")?,
            };
            let side = cfg.f64_of(sec, "L")?;
            let d = cfg.usize_of(sec, "d")?;
            let pitch = cfg.f64_maybe(sec, "delone_pitch")?;
            let rep = verify_delone(&set, &BoxRegion::cube(d, side), pitch)?;
            if !rep.ok {
                return Err(Error::Geometry(format!("site set fails the Delone conditions: {rep:?}")));
            }
            delone_report = Some(serde_json::to_value(&rep).map_err(|e| Error::Parse(e.to_string()))?);
            Lattice::Delone(set)
        }
        other => return Err(Error::Parse(format!("unknown lattice `{other}`"))),
    };
    Ok((
        RandomFieldConfig {
            lattice,
            family: BreatherFamily::standard_ball(),
            measure,
            seed: cfg.seed()?,
        },
        delone_report,
    ))
}

fn run_wegner_kind(cfg: &ExperimentConfig) -> Result<KindResult> {
    let sec = "wegner";
    let (field, delone_report) = wegner_field_from(cfg, sec)?;
    let run = WegnerRunConfig {
        field,
        d: cfg.usize_of(sec, "d")?,
        side: cfg.f64_of(sec, "L")?,
        density: cfg.usize_of(sec, "m")?,
        energy: cfg.f64_of(sec, "E")?,
        eps_grid: cfg.list_f64(sec, "eps")?,
        trials: cfg.usize_of(sec, "trials")?,
        master_seed: cfg.seed()?,
        tol: cfg.f64_opt(sec, "tol", 1e-8)?,
    };
    let rep = run_wegner(&run)?;

    // optional closed-form rows
    let mut extras = serde_json::Map::new();
    if let (Some(c), Some(kappa)) = (cfg.f64_maybe(sec, "bound_c")?, cfg.f64_maybe(sec, "bound_kappa")?) {
        let rows: Result<Vec<f64>> = rep
            .rows
            .iter()
            .map(|r| wegner_bound(r.eps, kappa, c, run.d, run.side))
            .collect();
        extras.insert("user_bound".into(), json!(rows?));
    }
    if let (Some(e0), Some(n)) = (cfg.f64_maybe(sec, "e0")?, cfg.f64_maybe(sec, "N")?) {
        extras.insert("eps_max_standard".into(), json!(eps_max_standard(e0, n)?));
    }
    if let (Some(delta_eval), Some(n)) = (cfg.f64_maybe(sec, "delta_eval")?, cfg.f64_maybe(sec, "N")?) {
        let fam = &run.field.family;
        let params = fam.params.unwrap();
        let p = KappaEffectiveParams {
            d: run.d,
            alpha1: cfg.f64_opt(sec, "alpha1", params.alpha1)?,
            alpha2: cfg.f64_opt(sec, "alpha2", params.alpha2)?,
            beta1: cfg.f64_opt(sec, "beta1", params.beta1)?,
            beta2: cfg.f64_opt(sec, "beta2", params.beta2)?,
            g2: cfg.f64_opt(sec, "delone_g2", 1.1)?,
            g_u: fam.g_u,
            k_u: run.field.k_u(run.d),
            b: run.energy + run.eps_grid.iter().cloned().fold(0.0, f64::max),
        };
        extras.insert("kappa_effective".into(), json!(kappa_effective(&p, delta_eval, n)?));
    }
    if let Some(dr) = delone_report {
        extras.insert("delone".into(), dr);
    }

    let pass = rep.pass;
    let csv = rep.to_csv();
    let mut value = serde_json::to_value(&rep).map_err(|e| Error::Parse(e.to_string()))?;
    if let Value::Object(ref mut map) = value {
        map.insert("extras".into(), Value::Object(extras));
    }
    Ok((pass, value, vec![("wegner.csv", csv)]))
}

fn run_initial_scale(cfg: &ExperimentConfig) -> Result<KindResult> {
    let sec = "initial-scale";
    let lo = cfg.f64_of(sec, "measure_lo")?;
    let hi = cfg.f64_of(sec, "measure_hi")?;
    let field = RandomFieldConfig {
        lattice: Lattice::Integer,
        family: BreatherFamily::standard_ball(),
        measure: if hi > lo { Measure::Uniform { lo, hi } } else { Measure::PointMass { value: lo } },
        seed: cfg.seed()?,
    };
    let sides = cfg.list_f64(sec, "L")?;
    let trials = cfg.usize_of(sec, "trials")?;
    let rep = initial_scale(
        &field,
        cfg.usize_of(sec, "d")?,
        cfg.usize_of(sec, "m")?,
        &sides,
        trials,
        cfg.seed()?,
        cfg.f64_opt(sec, "tol", 1e-8)?,
    )?;
    let mut csv = String::from("L,lambda1_base,probability,ci,trials\n");
    for r in &rep.rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_g17(r.side),
            fmt_g17(r.base_lambda1),
            fmt_g17(r.probability),
            fmt_g17(r.ci_half_width),
            r.trials
        ));
    }
    let pass = (rep.failed_trials as f64) <= 0.01 * (trials * sides.len()) as f64;
    let value = serde_json::to_value(&rep).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((pass, value, vec![("initial_scale.csv", csv)]))
}

fn run_heat(cfg: &ExperimentConfig) -> Result<KindResult> {
    let sec = "heat-obs";
    let heat_cfg = sfuc_core::heat_obs::HeatObsConfig {
        d: cfg.usize_of(sec, "d")?,
        bc: parse_bc(cfg, sec, Some(BoundaryCondition::Dirichlet))?,
        density: cfg.usize_of(sec, "m")?,
        side: cfg.f64_of(sec, "L")?,
        cell: cfg.f64_of(sec, "G")?,
        radius: cfg.f64_of(sec, "delta")?,
        potential: PotentialModel::parse(cfg.require(sec, "potential")?)?,
        mode: parse_mode(cfg, sec)?,
        seed: cfg.seed()?,
        t_grid: cfg.list_f64(sec, "T")?,
        n_exp: cfg.f64_of(sec, "N")?,
        tol: cfg.f64_opt(sec, "tol", 1e-9)?,
        ridge: cfg.f64_maybe(sec, "ridge")?,
    };
    let rep = sfuc_core::heat_obs::run_heat_obs(&heat_cfg)?;

    // duality and spectral-inequality side checks on the same configuration
    let grid = make_grid(heat_cfg.d, heat_cfg.side, heat_cfg.density, heat_cfg.bc)?;
    let seq = generate_sequence(
        heat_cfg.cell,
        heat_cfg.radius,
        heat_cfg.d,
        heat_cfg.side,
        heat_cfg.mode,
        heat_cfg.seed,
    )?;
    let mask = build_mask(&seq, &grid)?;
    let v = heat_cfg.potential.sample(&grid)?;
    let op = assemble(&grid, &v, 1.0)?;
    let spec = eigs_below(&op, rep.b_trunc, heat_cfg.tol)?;
    let duality_t = cfg.f64_opt(sec, "duality_T", rep.rows[0].time)?;
    let duality = sfuc_core::heat_obs::duality_check(&spec, &mask, duality_t, heat_cfg.ridge)?;
    let lambda = cfg.f64_opt(sec, "lambda", rep.b_trunc)?;
    let spectral_ineq = sfuc_core::heat_obs::spectral_inequality_check(
        &spec,
        &mask,
        lambda,
        heat_cfg.cell,
        heat_cfg.radius,
        heat_cfg.n_exp,
    )?;

    let pass = rep.pass && duality.final_norm_rel <= 1e-6 && duality.budget_ok;
    let csv = rep.to_csv();
    let value = json!({
        "report": rep,
        "duality": duality,
        "spectral_inequality": spectral_ineq,
    });
    Ok((pass, value, vec![("heat.csv", csv)]))
}

fn run_conditions(cfg: &ExperimentConfig) -> Result<KindResult> {
    let sec = "conditions";
    let profile = parse_profile(cfg.require(sec, "profile")?)?;
    let family = match cfg.require(sec, "family")? {
        "standard" => BreatherFamily::standard_ball(),
        "dilation" => BreatherFamily::dilation(profile.clone())?,
        "alloy" => BreatherFamily::alloy(profile.clone())?,
        other => return Err(Error::Parse(format!("unknown family `{other}`"))),
    };
    let a_cfg = ConditionAConfig {
        t_grid: cfg.list_f64(sec, "t_grid")?,
        delta_grid: cfg.list_f64(sec, "delta_grid")?,
        probes_per_axis: cfg.usize_of(sec, "probes")?,
        dimension: cfg.usize_opt(sec, "dimension", 1)?,
    };
    let a_rep = check_condition_a(&family, &a_cfg)?;
    let classify = classify_profile(
        &profile,
        ClassifyOptions {
            h_rel: cfg.f64_opt(sec, "h_rel", 1e-4)?,
            jump_rel: cfg.f64_opt(sec, "jump_rel", 1e-6)?,
        },
    )?;
    let fg = check_fg(
        &profile,
        &FgConfig {
            shells: cfg.usize_opt(sec, "fg_shells", 5)?,
            probes_per_shell: cfg.usize_opt(sec, "fg_probes", 64)?,
        },
    )?;
    let mut csv = String::from("delta,floor,radius\n");
    for (delta, floor, radius) in &a_rep.per_delta {
        csv.push_str(&format!("{},{},{}\n", fmt_g17(*delta), fmt_g17(*floor), fmt_g17(*radius)));
    }
    // any positive classifier flag must come with condition (A) holding
    let implied = !(classify.b || classify.c || classify.d || classify.e) || a_rep.holds;
    let pass = a_rep.holds && implied;
    let value = json!({ "condition_a": a_rep, "classify": classify, "fg": fg });
    Ok((pass, value, vec![("conditions.csv", csv)]))
}

fn run_ghost(cfg: &ExperimentConfig) -> Result<KindResult> {
    let sec = "ghost";
    let d = cfg.usize_of(sec, "d")?;
    let bc = parse_bc(cfg, sec, None)?;
    let m = cfg.usize_of(sec, "m")?;
    let side = cfg.f64_of(sec, "L")?;
    let potential = PotentialModel::parse(cfg.require(sec, "potential")?)?;
    let b = cfg.f64_of(sec, "b")?;
    let time = cfg.f64_of(sec, "T")?;
    let vectors = cfg.usize_of(sec, "vectors")?;
    let slack = cfg.f64_opt(sec, "slack", 1.05)?;
    let h_t = cfg.f64_maybe(sec, "h_t")?;
    let factor = cfg.usize_opt(sec, "R", 3)?;
    let tol = cfg.f64_opt(sec, "tol", 1e-9)?;

    let grid = make_grid(d, side, m, bc)?;
    let v = potential.sample(&grid)?;
    let op = assemble(&grid, &v, 1.0)?;
    let spec = eigs_below(&op, b, tol)?;
    if spec.k() == 0 {
        return Err(Error::EmptySubspace("ghost check needs a nonempty truncation".into()));
    }

    let seed = cfg.seed()?;
    let mut sandwiches = Vec::new();
    let mut all_pass = true;
    for i in 0..vectors {
        let alphas =
            sfuc_core::seeding::uniform_vec(sfuc_core::seeding::mix(seed, i as u64), spec.k(), -1.0, 1.0);
        let rep = ghost_sandwich_check(&spec, &v, &alphas, time, h_t, slack)?;
        all_pass &= rep.pass;
        sandwiches.push(rep);
    }
    let alphas = sfuc_core::seeding::uniform_vec(
        sfuc_core::seeding::mix(seed, vectors as u64),
        spec.k(),
        -1.0,
        1.0,
    );
    let r1 = ghost_pde_residual(&spec, &alphas, time, time / 64.0)?;
    let r2 = ghost_pde_residual(&spec, &alphas, time, time / 128.0)?;
    let pde_order = (r1 / r2).log2();
    let e1 = ghost_derivative_recovery_error(&spec, &alphas, 1e-2)?;
    let e2 = ghost_derivative_recovery_error(&spec, &alphas, 5e-3)?;
    let recovery_order = (e1 / e2).log2();

    // reflection extension of the ground state restricts back exactly
    let ext = extend_reflect(&spec.eigenvectors[0], &grid, ExtensionKind::Eigenfunction, factor)?;
    let back = ext.restrict();
    let restriction_exact =
        back.iter().zip(&spec.eigenvectors[0]).all(|(a, b)| a.to_bits() == b.to_bits());

    let pass = all_pass && pde_order >= 1.9 && recovery_order >= 1.9 && restriction_exact;
    let value = json!({
        "sandwiches": sandwiches,
        "pde_residual_order": pde_order,
        "recovery_order": recovery_order,
        "extension_factor": factor,
        "restriction_exact": restriction_exact,
        "k": spec.k(),
    });
    Ok((pass, value, vec![]))
}

fn run_weights(cfg: &ExperimentConfig) -> Result<KindResult> {
    let sec = "weights";
    let rs = cfg.list_f64(sec, "psi_r")?;
    let d = cfg.usize_opt(sec, "psi_d", 1)?;
    let samples = cfg.usize_opt(sec, "psi_samples", 50_000)?;
    let rho = cfg.f64_opt(sec, "rho", 1.0)?;
    let bound_samples = cfg.usize_opt(sec, "bound_samples", 1000)?;
    let deltas = cfg.list_f64(sec, "hyperbola_delta")?;
    let seed = cfg.seed()?;

    let mut psi_reports = Vec::new();
    let mut pass = true;
    for &r in &rs {
        let rep = check_psi_condition(r, d, samples, seed)?;
        pass &= rep.pass;
        psi_reports.push(rep);
    }
    let bounds_ok = weight_bounds_check(rho, bound_samples)?;
    pass &= bounds_ok;
    let mut hyper = Vec::new();
    let mut csv = String::from("delta,distance,bound\n");
    for &delta in &deltas {
        let rep = hyperbola_distance(delta)?;
        csv.push_str(&format!(
            "{},{},{}\n",
            fmt_g17(delta),
            fmt_g17(rep.distance),
            fmt_g17(rep.bound)
        ));
        pass &= rep.pass;
        hyper.push(rep);
    }
    let value = json!({
        "psi_condition": psi_reports,
        "weight_bounds_ok": bounds_ok,
        "hyperbola": hyper,
    });
    Ok((pass, value, vec![("weights.csv", csv)]))
}
