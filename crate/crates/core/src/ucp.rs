//! Exact discrete unique-continuation constants, the closed-form C_sfuc
//! expressions, scale-freeness scans, exponent fits and eigenvalue lifting.

use crate::error::{Error, Result};
use crate::fitting::line_fit;
use crate::grid::{build_mask, make_grid, BoundaryCondition, GridSpec, Mask, SequenceMode};
use crate::operator::{assemble, PotentialField};
use crate::potential_model::PotentialModel;
use crate::spectral::{eigs_below, SpectralData};
use crate::util::fmt_g17;
use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// k×k form B_{mn} = ⟨φ_m, χ_mask φ_n⟩ in the h^d inner product.
pub fn mask_form(spec: &SpectralData, mask: &Mask) -> DMatrix<f64> {
    let k = spec.k();
    let w = spec.grid.cell_volume();
    let mut b = DMatrix::zeros(k, k);
    for m in 0..k {
        for n in m..k {
            let mut s = 0.0;
            let pm = &spec.eigenvectors[m];
            let pn = &spec.eigenvectors[n];
            for (i, &inside) in mask.indicator.iter().enumerate() {
                if inside {
                    s += pm[i] * pn[i];
                }
            }
            let v = w * s;
            b[(m, n)] = v;
            b[(n, m)] = v;
        }
    }
    b
}

/// Smallest eigenvalue of a symmetric matrix with its eigenvector.
pub(crate) fn smallest_eig(sym: &DMatrix<f64>) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(sym.clone());
    let mut best = 0usize;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    (eig.eigenvalues[best], eig.eigenvectors.column(best).iter().copied().collect())
}

/// Worst-case mask mass over the spectral subspace, with the minimizing state.
#[derive(Debug, Clone)]
pub struct UcpConstant {
    /// C_obs = min_{φ in span, ‖φ‖=1} ‖φ‖²_mask / ‖φ‖².
    pub value: f64,
    /// Coefficients of the minimizer in the eigenbasis.
    pub coefficients: Vec<f64>,
    /// Minimizing state on nodes.
    pub witness: Vec<f64>,
}

/// C_obs computed exactly as the smallest eigenvalue of the k×k mask form.
pub fn ucp_constant_exact(spec: &SpectralData, mask: &Mask) -> Result<UcpConstant> {
    if spec.k() == 0 {
        return Err(Error::EmptySubspace("UCP constant needs k >= 1".into()));
    }
    if mask.grid != spec.grid {
        return Err(Error::Config("mask grid does not match spectral grid".into()));
    }
    let b = mask_form(spec, mask);
    let (value, coefficients) = smallest_eig(&b);
    let mut witness = vec![0.0; spec.grid.node_count()];
    for (c, phi) in coefficients.iter().zip(&spec.eigenvectors) {
        for (w, p) in witness.iter_mut().zip(phi) {
            *w += c * p;
        }
    }
    Ok(UcpConstant { value, coefficients, witness })
}

/// C_sfuc(d, δ, b, ‖V‖_∞) = δ^{N(1 + ‖V‖_∞^{2/3} + √b)}; √b clamps to 0 for b < 0.
pub fn c_sfuc(d: usize, delta: f64, b: f64, v_norm: f64, n_exp: f64) -> Result<f64> {
    let _ = d;
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Geometry(format!("c_sfuc needs delta in (0, 1/2), got {delta}")));
    }
    if !(n_exp > 0.0) {
        return Err(Error::Config(format!("N must be positive, got {n_exp}")));
    }
    let expo = n_exp * (1.0 + v_norm.abs().powf(2.0 / 3.0) + b.max(0.0).sqrt());
    Ok(delta.powf(expo))
}

/// Scaled variant (δ/G)^{N(1 + G^{4/3}‖V‖^{2/3}/t^{2/3} + G√(b/t))}.
pub fn c_sfuc_scaled(
    d: usize,
    delta: f64,
    b: f64,
    v_norm: f64,
    cell: f64,
    diffusion: f64,
    n_exp: f64,
) -> Result<f64> {
    let _ = d;
    if !(cell > 0.0) || !(delta > 0.0 && delta < cell / 2.0) {
        return Err(Error::Geometry(format!(
            "c_sfuc_scaled needs 0 < delta < G/2, got delta={delta}, G={cell}"
        )));
    }
    if !(diffusion > 0.0) {
        return Err(Error::Config(format!("t must be positive, got {diffusion}")));
    }
    if !(n_exp > 0.0) {
        return Err(Error::Config(format!("N must be positive, got {n_exp}")));
    }
    let expo = n_exp
        * (1.0
            + cell.powf(4.0 / 3.0) * v_norm.abs().powf(2.0 / 3.0) / diffusion.powf(2.0 / 3.0)
            + cell * (b.max(0.0) / diffusion).sqrt());
    Ok((delta / cell).powf(expo))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanConfig {
    pub d: usize,
    pub bc: BoundaryCondition,
    pub density: usize,
    /// Cell size G.
    pub cell: f64,
    /// Ball radius δ.
    pub radius: f64,
    /// Spectral threshold b.
    pub threshold: f64,
    pub potential: PotentialModel,
    pub mode: SequenceMode,
    pub seed: u64,
    pub sides: Vec<f64>,
    pub ratio_floor: f64,
    /// Diffusion coefficient t of H_{t,L} = −tΔ + V.
    pub diffusion: f64,
    /// When set, rows are also compared against c_sfuc_scaled with this N.
    pub n_exp: Option<f64>,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UcpScanRow {
    pub side: f64,
    pub k: usize,
    pub c_obs: f64,
    pub c_formula: Option<f64>,
    pub formula_ok: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UcpScanReport {
    pub config: ScanConfig,
    pub v_norm: f64,
    pub rows: Vec<UcpScanRow>,
    pub min_over_max: f64,
    pub ratio_ok: bool,
    pub pass: bool,
}

/// Per-L worst-case constants under a shared (G, δ, b, V) configuration.
///
/// Rows are computed as independent parallel jobs and merged by ascending L.
pub fn scan_scale_free(cfg: &ScanConfig) -> Result<UcpScanReport> {
    if cfg.sides.is_empty() {
        return Err(Error::Config("scan needs at least one L".into()));
    }
    let mut sides = cfg.sides.clone();
    sides.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let results: Vec<Result<(UcpScanRow, f64)>> = sides
        .par_iter()
        .map(|&side| {
            let run = || -> Result<(UcpScanRow, f64)> {
                let grid = make_grid(cfg.d, side, cfg.density, cfg.bc)?;
                let seq = crate::grid::generate_sequence(
                    cfg.cell, cfg.radius, cfg.d, side, cfg.mode, cfg.seed,
                )?;
                let mask = build_mask(&seq, &grid)?;
                let v = cfg.potential.sample(&grid)?;
                let v_norm = v.sup_norm;
                let op = assemble(&grid, &v, cfg.diffusion)?;
                let spec = eigs_below(&op, cfg.threshold, cfg.tol)?;
                let c = ucp_constant_exact(&spec, &mask)?;
                let c_formula = match cfg.n_exp {
                    Some(n) => Some(c_sfuc_scaled(
                        cfg.d,
                        cfg.radius,
                        cfg.threshold,
                        v_norm,
                        cfg.cell,
                        cfg.diffusion,
                        n,
                    )?),
                    None => None,
                };
                let formula_ok = c_formula.map(|f| c.value >= f);
                Ok((
                    UcpScanRow { side, k: spec.k(), c_obs: c.value, c_formula, formula_ok },
                    v_norm,
                ))
            };
            run().map_err(|e| Error::Config(format!("L={side}: {e}")))
        })
        .collect();

    let mut rows = Vec::with_capacity(sides.len());
    let mut v_norm = 0.0;
    for r in results {
        let (row, vn) = r?;
        v_norm = vn;
        rows.push(row);
    }
    let min = rows.iter().map(|r| r.c_obs).fold(f64::INFINITY, f64::min);
    let max = rows.iter().map(|r| r.c_obs).fold(f64::NEG_INFINITY, f64::max);
    let min_over_max = if max > 0.0 { min / max } else { 0.0 };
    let ratio_ok = min_over_max >= cfg.ratio_floor;
    let formula_all = rows.iter().all(|r| r.formula_ok.unwrap_or(true));
    Ok(UcpScanReport {
        config: cfg.clone(),
        v_norm,
        rows,
        min_over_max,
        ratio_ok,
        pass: ratio_ok && formula_all,
    })
}

impl UcpScanReport {
    /// CSV columns `L,delta,b,v_norm,k,C_obs,C_sfuc,N,pass`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("L,delta,b,v_norm,k,C_obs,C_sfuc,N,pass\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                fmt_g17(r.side),
                fmt_g17(self.config.radius),
                fmt_g17(self.config.threshold),
                fmt_g17(self.v_norm),
                r.k,
                fmt_g17(r.c_obs),
                r.c_formula.map(fmt_g17).unwrap_or_default(),
                self.config.n_exp.map(|n| fmt_g17(n)).unwrap_or_default(),
                r.formula_ok.map(|b| b.to_string()).unwrap_or_default(),
            ));
        }
        s
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExponentFit {
    /// Slope of ln C vs ln δ divided by (1 + ‖V‖^{2/3} + √max(b,0)).
    pub n_hat: f64,
    pub slope: f64,
    pub residual: f64,
    pub used: Vec<(f64, f64)>,
    pub excluded: Vec<f64>,
}

/// Least-squares exponent from (δ, C_obs) samples at fixed (d, b, V).
pub fn fit_exponent(points: &[(f64, f64)], b: f64, v_norm: f64) -> Result<ExponentFit> {
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    for &(delta, c) in points {
        if c > 0.0 && delta > 0.0 {
            used.push((delta, c));
        } else {
            excluded.push(delta);
        }
    }
    if used.len() < 4 {
        return Err(Error::Fit(format!("need >= 4 usable points, have {}", used.len())));
    }
    let xs: Vec<f64> = used.iter().map(|(d, _)| d.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|(_, c)| c.ln()).collect();
    let (slope, _, residual) = line_fit(&xs, &ys);
    let denom = 1.0 + v_norm.abs().powf(2.0 / 3.0) + b.max(0.0).sqrt();
    Ok(ExponentFit { n_hat: slope / denom, slope, residual, used, excluded })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftingRow {
    pub index: usize,
    pub lambda_base: f64,
    pub lambda_perturbed: f64,
    pub gap: f64,
    /// α·C_sfuc^{G,1}(d, δ, b, ‖A+B‖_∞) when the formula inputs are present.
    pub formula_floor: Option<f64>,
    pub formula_ok: Option<bool>,
    /// α × smallest eigenvalue of the mask form over the first i perturbed
    /// eigenvectors (discrete min-max floor).
    pub discrete_floor: f64,
    pub discrete_ok: bool,
    pub nonnegative: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftingReport {
    /// B_L ≥ α·χ_mask verified node-wise before any comparison.
    pub hypothesis_ok: bool,
    pub rows: Vec<LiftingRow>,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct LiftingParams {
    pub alpha: f64,
    /// Eigenvalues of the perturbed operator up to this threshold are compared.
    pub threshold: f64,
    /// Formula comparison (N, G, δ); skipped when absent.
    pub formula: Option<(f64, f64, f64)>,
    pub tol: f64,
}

/// Eigenvalue lifting: λ_i(−Δ+A+B) vs λ_i(−Δ+A) + α·C_sfuc floor.
pub fn lifting_check(
    grid: &GridSpec,
    a_field: &PotentialField,
    b_field: &PotentialField,
    mask: &Mask,
    params: &LiftingParams,
) -> Result<LiftingReport> {
    if a_field.grid != *grid || b_field.grid != *grid || mask.grid != *grid {
        return Err(Error::Config("lifting inputs live on different grids".into()));
    }
    // hypothesis B >= alpha on mask nodes (and B >= 0 elsewhere)
    let hypothesis_ok = b_field
        .values
        .iter()
        .zip(&mask.indicator)
        .all(|(&bv, &inside)| bv >= if inside { params.alpha } else { 0.0 });
    if !hypothesis_ok {
        return Ok(LiftingReport { hypothesis_ok: false, rows: vec![], pass: false });
    }

    let ab = a_field.add(b_field)?;
    let op_base = assemble(grid, a_field, 1.0)?;
    let op_pert = assemble(grid, &ab, 1.0)?;
    let spec_pert = eigs_below(&op_pert, params.threshold, params.tol)?;
    // λ_i(A) ≤ λ_i(A+B) ≤ b, so the base solve needs at least as many states.
    let spec_base = eigs_below(&op_base, params.threshold, params.tol)?;
    let k = spec_pert.k().min(spec_base.k());

    let formula_floor = match params.formula {
        Some((n_exp, cell, radius)) => Some(
            params.alpha
                * c_sfuc_scaled(grid.d, radius, params.threshold, ab.sup_norm, cell, 1.0, n_exp)?,
        ),
        None => None,
    };

    let full_form = mask_form(&spec_pert, mask);
    let mut rows = Vec::with_capacity(k);
    for i in 1..=k {
        let sub = full_form.view((0, 0), (i, i)).into_owned();
        let (min_eig, _) = smallest_eig(&sub);
        let lb = spec_base.eigenvalues[i - 1];
        let lp = spec_pert.eigenvalues[i - 1];
        let gap = lp - lb;
        let discrete_floor = params.alpha * min_eig;
        rows.push(LiftingRow {
            index: i,
            lambda_base: lb,
            lambda_perturbed: lp,
            gap,
            formula_floor,
            formula_ok: formula_floor.map(|f| gap >= f - 1e-12),
            discrete_floor,
            discrete_ok: gap >= discrete_floor - 1e-8,
            nonnegative: gap >= -1e-10,
        });
    }
    let pass = rows.iter().all(|r| r.nonnegative && r.discrete_ok);
    Ok(LiftingReport { hypothesis_ok: true, rows, pass })
}
