//! Monte-Carlo verification of the Wegner and initial-scale estimates, and the
//! printed bound expressions.
//!
//! The estimate's constants (ε_max, κ) are astronomically conservative at desk
//! scale, so runs verify the *shape* of the estimate — polynomial decay in ε
//! with a log correction, volume growth in L^d — rather than the constants.
//! Every report carries that caveat in its header note.

use crate::breather::RandomFieldConfig;
use crate::error::{Error, Result};
use crate::fitting::line_fit;
use crate::grid::{make_grid, BoundaryCondition, GridSpec, Mask};
use crate::operator::assemble;
use crate::seeding;
use crate::spectral::eigs_below;
use crate::ucp::{c_sfuc_scaled, lifting_check, LiftingParams};
use crate::util::fmt_g17;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const SHAPE_NOTE: &str = "shape verification only: the closed-form constants (C, kappa, eps_max) \
are far outside desk scale, so this report checks polynomial decay in eps with log correction \
and volume growth in L^d, not the printed constants";

/// C·ε^{1/κ}·|ln ε|^d·L^d.
pub fn wegner_bound(eps: f64, kappa: f64, c: f64, d: usize, side: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("wegner bound needs eps in (0,1), got {eps}")));
    }
    if !(kappa > 0.0) || !(side > 0.0) || c < 0.0 {
        return Err(Error::Domain("need kappa > 0, L > 0, C >= 0".into()));
    }
    Ok(c * eps.powf(1.0 / kappa) * eps.ln().abs().powi(d as i32) * side.powi(d as i32))
}

/// ε_max = ¼·8^{−N(2+|E₀+1|^{1/2})} for the standard breather model.
pub fn eps_max_standard(e0: f64, n_exp: f64) -> Result<f64> {
    if !(n_exp > 0.0) {
        return Err(Error::Domain(format!("N must be positive, got {n_exp}")));
    }
    Ok(0.25 * 8f64.powf(-n_exp * (2.0 + (e0 + 1.0).abs().sqrt())))
}

/// Inputs for the surrogate exponent of the eigenvalue-lifting step.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KappaEffectiveParams {
    pub d: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub g2: f64,
    pub g_u: f64,
    pub k_u: f64,
    pub b: f64,
}

/// Exponent that makes δ^κ equal the lifting floor at the evaluation point:
/// κ = ln(α₁ δ^{α₂}·C_sfuc^{G₂+G_u,1}(d, β₁δ^{β₂}, b+2K_u, K_u)) / ln δ.
///
/// An evaluation-point-dependent surrogate; κ itself is only known to exist.
pub fn kappa_effective(p: &KappaEffectiveParams, delta_eval: f64, n_exp: f64) -> Result<f64> {
    if !(delta_eval > 0.0 && delta_eval < 1.0) {
        return Err(Error::Domain(format!(
            "kappa_effective needs delta_eval in (0,1), got {delta_eval}"
        )));
    }
    let cell = p.g2 + p.g_u;
    let small_delta = p.beta1 * delta_eval.powf(p.beta2);
    let c = c_sfuc_scaled(p.d, small_delta, p.b + 2.0 * p.k_u, p.k_u, cell, 1.0, n_exp)?;
    let floor = p.alpha1 * delta_eval.powf(p.alpha2) * c;
    Ok(floor.ln() / delta_eval.ln())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WegnerRunConfig {
    pub field: RandomFieldConfig,
    pub d: usize,
    pub side: f64,
    pub density: usize,
    /// Window center E.
    pub energy: f64,
    pub eps_grid: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WegnerRow {
    pub eps: f64,
    pub mean: f64,
    pub ci_half_width: f64,
    /// Calibrated-shape bound (fitted κ̂, C anchored at the largest ε).
    pub bound: Option<f64>,
    pub trials: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WegnerReport {
    pub note: String,
    pub config: WegnerRunConfig,
    /// Rows sorted by ascending ε.
    pub rows: Vec<WegnerRow>,
    pub failed_trials: usize,
    pub failure_rate_ok: bool,
    /// Means nondecreasing in ε (exact per trial by nested windows).
    pub monotone_ok: bool,
    pub inv_kappa_hat: Option<f64>,
    pub fit_residual: Option<f64>,
    /// Bound calibrated at the largest ε dominates all smaller ε.
    pub bound_direction_ok: bool,
    pub pass: bool,
}

impl WegnerReport {
    /// CSV columns `eps,mean,ci,bound,trials`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,mean,ci,bound,trials\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_g17(r.eps),
                fmt_g17(r.mean),
                fmt_g17(r.ci_half_width),
                r.bound.map(fmt_g17).unwrap_or_default(),
                r.trials
            ));
        }
        s
    }
}

fn mean_and_ci(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * (var / n as f64).sqrt())
}

/// One eigensolve per trial, counted in every (nested, half-open) window
/// [E−ε, E+ε).
pub fn run_wegner(cfg: &WegnerRunConfig) -> Result<WegnerReport> {
    if cfg.trials == 0 || cfg.eps_grid.is_empty() {
        return Err(Error::Config("wegner run needs trials >= 1 and a nonempty eps grid".into()));
    }
    cfg.field.measure.validate()?;
    let mut eps_grid = cfg.eps_grid.clone();
    eps_grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if eps_grid[0] <= 0.0 {
        return Err(Error::Config("eps values must be positive".into()));
    }
    let eps_max = *eps_grid.last().unwrap();
    // Dirichlet restriction for the random models
    let grid = make_grid(cfg.d, cfg.side, cfg.density, BoundaryCondition::Dirichlet)?;

    let per_trial: Vec<Result<Vec<f64>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = seeding::mix(cfg.master_seed, trial as u64);
            let omegas = cfg.field.draw_omegas(cfg.d, cfg.side, trial_seed);
            let v = crate::breather::assemble_random_potential(&cfg.field, &omegas, &grid)?;
            let op = assemble(&grid, &v, 1.0)?;
            let spec = eigs_below(&op, cfg.energy + eps_max, cfg.tol)?;
            Ok(eps_grid
                .iter()
                .map(|&eps| {
                    spec.eigenvalues
                        .iter()
                        .filter(|&&e| e >= cfg.energy - eps && e < cfg.energy + eps)
                        .count() as f64
                })
                .collect())
        })
        .collect();

    let mut failed = 0usize;
    let mut counts: Vec<Vec<f64>> = vec![Vec::new(); eps_grid.len()];
    for trial in per_trial {
        match trial {
            Ok(row) => {
                for (i, c) in row.into_iter().enumerate() {
                    counts[i].push(c);
                }
            }
            Err(_) => failed += 1,
        }
    }
    let failure_rate_ok = (failed as f64) <= 0.01 * cfg.trials as f64;

    let mut rows: Vec<WegnerRow> = eps_grid
        .iter()
        .zip(&counts)
        .map(|(&eps, samples)| {
            let (mean, ci) = mean_and_ci(samples);
            WegnerRow { eps, mean, ci_half_width: ci, bound: None, trials: samples.len() }
        })
        .collect();

    let monotone_ok = rows.windows(2).all(|w| w[0].mean <= w[1].mean + 1e-12);

    let fit =
        fit_wegner_exponent(&rows.iter().map(|r| (r.eps, r.mean)).collect::<Vec<_>>(), cfg.d).ok();
    let (inv_kappa_hat, fit_residual) = match &fit {
        Some(f) => (Some(f.inv_kappa), Some(f.residual)),
        None => (None, None),
    };

    // bound with the fitted exponent, C anchored at the largest ε; the
    // anchored envelope can dip below means when the largest windows saturate
    // at the count ceiling, so the flag is reported, not gating
    let mut bound_direction_ok = true;
    if let Some(f) = &fit {
        let shape = |eps: f64| {
            eps.powf(f.inv_kappa) * eps.ln().abs().powi(cfg.d as i32) * cfg.side.powi(cfg.d as i32)
        };
        let anchor = rows.last().unwrap();
        if anchor.mean > 0.0 && shape(anchor.eps) > 0.0 {
            let c_star = anchor.mean / shape(anchor.eps);
            for r in rows.iter_mut() {
                let b = c_star * shape(r.eps);
                r.bound = Some(b);
                if r.mean > b + 1e-9 {
                    bound_direction_ok = false;
                }
            }
        }
    }

    let pass = failure_rate_ok && monotone_ok;
    Ok(WegnerReport {
        note: SHAPE_NOTE.to_string(),
        config: cfg.clone(),
        rows,
        failed_trials: failed,
        failure_rate_ok,
        monotone_ok,
        inv_kappa_hat,
        fit_residual,
        bound_direction_ok,
        pass,
    })
}

/// Single-window expected trace E[Tr χ_{[E−ε,E+ε)}] with confidence half-width.
pub fn empirical_trace(
    field: &RandomFieldConfig,
    grid: &GridSpec,
    energy: f64,
    eps: f64,
    trials: usize,
    master_seed: u64,
    tol: f64,
) -> Result<(f64, f64)> {
    let cfg = WegnerRunConfig {
        field: field.clone(),
        d: grid.d,
        side: grid.side,
        density: grid.density,
        energy,
        eps_grid: vec![eps],
        trials,
        master_seed,
        tol,
    };
    let rep = run_wegner(&cfg)?;
    if !rep.failure_rate_ok {
        return Err(Error::Solver(format!("{} of {trials} trials failed", rep.failed_trials)));
    }
    Ok((rep.rows[0].mean, rep.rows[0].ci_half_width))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WegnerFit {
    /// Least-squares slope of ln(mean/|ln ε|^d) vs ln ε.
    pub inv_kappa: f64,
    pub residual: f64,
    pub used: usize,
}

pub fn fit_wegner_exponent(points: &[(f64, f64)], d: usize) -> Result<WegnerFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(eps, mean)| *eps > 0.0 && *eps < 1.0 && *mean > 0.0)
        .collect();
    if usable.len() < 4 {
        return Err(Error::Fit(format!("need >= 4 positive means, have {}", usable.len())));
    }
    let xs: Vec<f64> = usable.iter().map(|(e, _)| e.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|(e, m)| (m / e.ln().abs().powi(d as i32)).ln()).collect();
    let (slope, _, residual) = line_fit(&xs, &ys);
    Ok(WegnerFit { inv_kappa: slope, residual, used: usable.len() })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitialScaleRow {
    pub side: f64,
    pub base_lambda1: f64,
    /// Empirical P[λ₁(H_ω) − λ₁(H_0) ≥ L^{−3/2}].
    pub probability: f64,
    pub ci_half_width: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitialScaleReport {
    pub note: String,
    pub rows: Vec<InitialScaleRow>,
    pub failed_trials: usize,
}

/// Initial-scale estimate: per-L probability of the λ₁ lift beating L^{−3/2}.
/// H_{0,L} (all ω_j = 0) is solved once per L.
pub fn initial_scale(
    field: &RandomFieldConfig,
    d: usize,
    density: usize,
    sides: &[f64],
    trials: usize,
    master_seed: u64,
    tol: f64,
) -> Result<InitialScaleReport> {
    field.measure.validate()?;
    let mut rows = Vec::new();
    let mut failed_total = 0usize;
    for (li, &side) in sides.iter().enumerate() {
        let grid = make_grid(d, side, density, BoundaryCondition::Dirichlet)?;
        let zero = vec![0.0; field.sites(d, side).len()];
        let v0 = crate::breather::assemble_random_potential(field, &zero, &grid)?;
        let op0 = assemble(&grid, &v0, 1.0)?;
        let k_u = field.k_u(d);
        let cap = 4.0 * d as f64 * (std::f64::consts::PI / side).powi(2) + k_u + 1.0;
        let s0 = eigs_below(&op0, cap, tol)?;
        if s0.k() == 0 {
            return Err(Error::Solver("base operator has no eigenvalue below the search cap".into()));
        }
        let base_lambda1 = s0.eigenvalues[0];
        let b_solve = base_lambda1 + k_u + 1.0;

        let outcomes: Vec<Result<f64>> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let trial_seed = seeding::mix(seeding::mix(master_seed, li as u64), trial as u64);
                let omegas = field.draw_omegas(d, side, trial_seed);
                let v = crate::breather::assemble_random_potential(field, &omegas, &grid)?;
                let op = assemble(&grid, &v, 1.0)?;
                let spec = eigs_below(&op, b_solve, tol)?;
                if spec.k() == 0 {
                    return Err(Error::Solver("perturbed solve found no state".into()));
                }
                Ok(spec.eigenvalues[0])
            })
            .collect();

        let threshold = side.powf(-1.5);
        let mut hits = Vec::new();
        for o in outcomes {
            match o {
                Ok(l1) => hits.push(if l1 - base_lambda1 >= threshold { 1.0 } else { 0.0 }),
                Err(_) => failed_total += 1,
            }
        }
        let (probability, ci) = mean_and_ci(&hits);
        rows.push(InitialScaleRow {
            side,
            base_lambda1,
            probability,
            ci_half_width: ci,
            trials: hits.len(),
        });
    }
    Ok(InitialScaleReport { note: SHAPE_NOTE.to_string(), rows, failed_trials: failed_total })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftingMcReport {
    pub trials: usize,
    /// λ_i(ω+δ) ≥ λ_i(ω) for every compared index, every trial.
    pub all_nonnegative: bool,
    /// gap_i ≥ α·(projected-mask min eigenvalue) − 1e−8 in every trial.
    pub all_floor_ok: bool,
    pub worst_gap: f64,
    pub compared: usize,
}

/// Per-trial eigenvalue-lifting monotonicity: replace ω by ω+δ and compare
/// spectra below b, including the discrete min-max floor over the superlevel
/// set {V_{ω+δ} − V_ω ≥ α}.
pub fn lifting_monotonicity_mc(
    field: &RandomFieldConfig,
    grid: &GridSpec,
    delta: f64,
    alpha: f64,
    threshold_b: f64,
    trials: usize,
    master_seed: u64,
    tol: f64,
) -> Result<LiftingMcReport> {
    field.measure.validate()?;
    let (_, omega_plus) = field.measure.support();
    if omega_plus + delta > 1.0 + 1e-12 {
        return Err(Error::Config(format!(
            "omega_plus + delta = {} exceeds 1",
            omega_plus + delta
        )));
    }
    let reports: Vec<Result<(bool, bool, f64, usize)>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = seeding::mix(master_seed, trial as u64);
            let omegas = field.draw_omegas(grid.d, grid.side, trial_seed);
            let shifted: Vec<f64> = omegas.iter().map(|w| w + delta).collect();
            let v_base = crate::breather::assemble_random_potential(field, &omegas, grid)?;
            let v_pert = crate::breather::assemble_random_potential(field, &shifted, grid)?;
            let diff: Vec<f64> =
                v_pert.values.iter().zip(&v_base.values).map(|(a, b)| a - b).collect();
            let b_field = crate::operator::PotentialField::from_values(grid, diff)?;
            let mask = Mask {
                grid: grid.clone(),
                indicator: b_field.values.iter().map(|&v| v >= alpha - 1e-12).collect(),
            };
            let rep = lifting_check(
                grid,
                &v_base,
                &b_field,
                &mask,
                &LiftingParams { alpha, threshold: threshold_b, formula: None, tol },
            )?;
            let nonneg = rep.hypothesis_ok && rep.rows.iter().all(|r| r.nonnegative);
            let floor_ok = rep.hypothesis_ok && rep.rows.iter().all(|r| r.discrete_ok);
            let worst = rep.rows.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
            Ok((nonneg, floor_ok, worst, rep.rows.len()))
        })
        .collect();

    let mut all_nonnegative = true;
    let mut all_floor_ok = true;
    let mut worst_gap = f64::INFINITY;
    let mut compared = 0usize;
    for r in reports {
        let (nonneg, floor_ok, worst, n) = r?;
        all_nonnegative &= nonneg;
        all_floor_ok &= floor_ok;
        worst_gap = worst_gap.min(worst);
        compared += n;
    }
    Ok(LiftingMcReport { trials, all_nonnegative, all_floor_ok, worst_gap, compared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::breather::{BreatherFamily, Lattice, Measure};

    fn standard_field(measure: Measure) -> RandomFieldConfig {
        RandomFieldConfig {
            lattice: Lattice::Integer,
            family: BreatherFamily::standard_ball(),
            measure,
            seed: 0,
        }
    }

    #[test]
    fn bound_formulas_match_direct_arithmetic() {
        let v = wegner_bound(0.01, 2.0, 1.0, 1, 5.0).unwrap();
        assert!((v - 2.302585092994046).abs() < 1e-12, "{v}");
        assert_eq!(wegner_bound(0.5, 2.0, 0.0, 1, 5.0).unwrap(), 0.0);
        assert!(matches!(wegner_bound(1.0, 2.0, 1.0, 1, 5.0), Err(Error::Domain(_))));

        let e = eps_max_standard(1.0, 5.0).unwrap();
        assert!((e - 9.577002493974061e-17).abs() / e < 1e-12, "{e}");
    }

    #[test]
    fn kappa_effective_algebra() {
        // α₁=1, α₂=0, β₂=1, all norms 0, cell = 1: κ = N(1 + ln β₁ / ln δ)
        let p = KappaEffectiveParams {
            d: 1,
            alpha1: 1.0,
            alpha2: 0.0,
            beta1: 0.25,
            beta2: 1.0,
            g2: 0.6,
            g_u: 0.4,
            k_u: 0.0,
            b: 0.0,
        };
        let n = 3.0;
        let delta = 0.1;
        let kappa = kappa_effective(&p, delta, n).unwrap();
        let expect = n * (1.0 + (0.25f64).ln() / delta.ln());
        assert!((kappa - expect).abs() < 1e-12, "{kappa} vs {expect}");

        // α₂ = 1 with c_sfuc ≈ 1 gives κ ≈ 1: drive c to 1 via tiny N
        let p2 = KappaEffectiveParams { alpha2: 1.0, beta1: 0.5, ..p };
        let kappa2 = kappa_effective(&p2, 0.1, 1e-9).unwrap();
        assert!((kappa2 - 1.0).abs() < 1e-6, "{kappa2}");

        assert!(matches!(kappa_effective(&p, 1.0, 3.0), Err(Error::Domain(_))));

        // standard model parameters give a finite positive exponent
        let std_p = KappaEffectiveParams {
            d: 1,
            alpha1: 1.0,
            alpha2: 0.0,
            beta1: 0.5,
            beta2: 1.0,
            g2: 1.1,
            g_u: 2.0,
            k_u: 2.0,
            b: 2.0,
        };
        let k = kappa_effective(&std_p, 0.1, 5.0).unwrap();
        assert!(k.is_finite() && k > 0.0);
    }

    #[test]
    fn deterministic_window_counts() {
        // ω ≡ 0: deterministic spectrum; window without an eigenvalue -> mean 0, ci 0
        let field = standard_field(Measure::PointMass { value: 0.0 });
        let grid = make_grid(1, 5.0, 8, BoundaryCondition::Dirichlet).unwrap();
        let (mean, ci) = empirical_trace(&field, &grid, -5.0, 0.5, 8, 42, 1e-8).unwrap();
        assert_eq!(mean, 0.0);
        assert_eq!(ci, 0.0);

        // window containing exactly the first eigenvalue -> mean 1
        let op = assemble(&grid, &crate::operator::PotentialField::zero(&grid), 1.0).unwrap();
        let spec = eigs_below(&op, 2.0, 1e-9).unwrap();
        let e1 = spec.eigenvalues[0];
        let gap = spec.eigenvalues[1] - e1;
        let (mean, ci) =
            empirical_trace(&field, &grid, e1, (gap * 0.4).min(0.3), 8, 42, 1e-8).unwrap();
        assert_eq!(mean, 1.0);
        assert_eq!(ci, 0.0);
    }

    #[test]
    fn wegner_fit_exact_and_edges() {
        let pts: Vec<(f64, f64)> = [0.4, 0.2, 0.1, 0.05]
            .iter()
            .map(|&e: &f64| (e, 3.0 * e.sqrt() * e.ln().abs()))
            .collect();
        let fit = fit_wegner_exponent(&pts, 1).unwrap();
        assert!((fit.inv_kappa - 0.5).abs() < 1e-9, "{}", fit.inv_kappa);
        assert!(fit.residual < 1e-12);

        let flat: Vec<(f64, f64)> = [0.4, 0.2, 0.1, 0.05].iter().map(|&e| (e, 2.0)).collect();
        let f0 = fit_wegner_exponent(&flat, 0).unwrap();
        assert!(f0.inv_kappa.abs() < 1e-12);

        let degenerate = vec![(0.4, 0.0), (0.2, 1.0), (0.1, 1.0), (0.05, 1.0)];
        assert!(matches!(fit_wegner_exponent(&degenerate, 1), Err(Error::Fit(_))));
    }

    #[test]
    fn bound_direction_holds_in_scaling_regime() {
        // scaling-regime data mean = C·ε^{1/κ}|ln ε|^d: the fitted exponent
        // reproduces the shape, so the envelope anchored at the largest ε
        // dominates every smaller ε
        let d = 1usize;
        let kappa = 2.0;
        let c_true = 0.7;
        let eps: Vec<f64> = vec![0.025, 0.05, 0.1, 0.2, 0.4];
        let means: Vec<f64> = eps
            .iter()
            .map(|e| c_true * e.powf(1.0 / kappa) * e.ln().abs())
            .collect();
        let fit = fit_wegner_exponent(
            &eps.iter().copied().zip(means.iter().copied()).collect::<Vec<_>>(),
            d,
        )
        .unwrap();
        let shape = |e: f64| e.powf(fit.inv_kappa) * e.ln().abs();
        let c_star = means.last().unwrap() / shape(*eps.last().unwrap());
        for (e, m) in eps.iter().zip(&means) {
            assert!(c_star * shape(*e) >= m - 1e-9, "anchored envelope dipped at eps={e}");
        }
    }

    #[test]
    fn wegner_run_monotone_and_deterministic() {
        let field = standard_field(Measure::Uniform { lo: 0.0, hi: 0.25 });
        let cfg = WegnerRunConfig {
            field,
            d: 1,
            side: 5.0,
            density: 16,
            energy: 0.55,
            eps_grid: vec![0.4, 0.2, 0.1, 0.05],
            trials: 24,
            master_seed: 7,
            tol: 1e-8,
        };
        let a = run_wegner(&cfg).unwrap();
        let b = run_wegner(&cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv(), "same seed, identical bytes");
        assert!(a.monotone_ok);
        assert!(a.failure_rate_ok);
        assert_eq!(a.rows.len(), 4);
        assert!(a.rows[0].eps < a.rows[3].eps);
        assert!(a.note.contains("shape"));
    }

    #[test]
    fn initial_scale_point_masses() {
        // ω ≡ ω₊ > 0: deterministic positive lift
        let field = standard_field(Measure::PointMass { value: 0.24 });
        let rep = initial_scale(&field, 1, 8, &[5.0], 4, 3, 1e-8).unwrap();
        assert_eq!(rep.rows[0].probability, 1.0);

        // ω ≡ 0: the gap is exactly zero
        let field0 = standard_field(Measure::PointMass { value: 0.0 });
        let rep0 = initial_scale(&field0, 1, 8, &[5.0], 4, 3, 1e-8).unwrap();
        assert_eq!(rep0.rows[0].probability, 0.0);
    }

    #[test]
    fn lifting_monotonicity_small_run() {
        let field = standard_field(Measure::Uniform { lo: 0.0, hi: 0.25 });
        let grid = make_grid(1, 5.0, 16, BoundaryCondition::Dirichlet).unwrap();
        let rep = lifting_monotonicity_mc(&field, &grid, 0.2, 1.0, 3.0, 4, 11, 1e-8).unwrap();
        assert!(rep.all_nonnegative, "{rep:?}");
        assert!(rep.all_floor_ok, "{rep:?}");
        assert!(rep.compared > 0);

        // increments pushing omega past 1 are rejected
        assert!(matches!(
            lifting_monotonicity_mc(&field, &grid, 0.9, 1.0, 3.0, 2, 11, 1e-8),
            Err(Error::Config(_))
        ));
    }
}
