//! Spectrum below a threshold, spectral projector and heat semigroup in the
//! eigenbasis.
//!
//! Dense full diagonalization up to `dense_cap` nodes; above that a block
//! Lanczos iteration with full reorthogonalization and explicitly verified
//! residuals. Eigenvectors are orthonormal in the h^d-weighted inner product.

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::operator::DiscreteOperator;
use crate::seeding;
use crate::util::{fmt_g17, sha256_hex};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

pub const DENSE_CAP: usize = 4096;

#[derive(Debug, Clone, Copy)]
pub struct EigsOptions {
    pub dense_cap: usize,
    pub block_size: usize,
    pub max_basis: usize,
}

impl Default for EigsOptions {
    fn default() -> Self {
        EigsOptions { dense_cap: DENSE_CAP, block_size: 4, max_basis: 600 }
    }
}

/// Eigenvalues E_1 ≤ … ≤ E_k ≤ b with h^d-orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub grid: GridSpec,
    pub threshold: f64,
    pub eigenvalues: Vec<f64>,
    /// Row k is φ_k over nodes.
    pub eigenvectors: Vec<Vec<f64>>,
    pub residual_bound: f64,
}

impl SpectralData {
    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Orthonormality defect max |⟨φ_i,φ_j⟩ − δ_ij| in the h^d inner product.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.k() {
            for j in i..self.k() {
                let g = self.grid.inner(&self.eigenvectors[i], &self.eigenvectors[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// Max relative eigen-residual ‖Hφ − Eφ‖ / max(1,|E|) against `op`.
    pub fn max_residual(&self, op: &DiscreteOperator) -> Result<f64> {
        let mut worst = 0.0f64;
        for (e, phi) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let hphi = op.apply(phi)?;
            let diff: Vec<f64> = hphi.iter().zip(phi).map(|(a, b)| a - e * b).collect();
            worst = worst.max(self.grid.norm(&diff) / e.abs().max(1.0));
        }
        Ok(worst)
    }
}

/// All eigenvalues ≤ b with verified residuals; k may be zero.
pub fn eigs_below(op: &DiscreteOperator, b: f64, tol: f64) -> Result<SpectralData> {
    eigs_below_with(op, b, tol, EigsOptions::default())
}

pub fn eigs_below_with(op: &DiscreteOperator, b: f64, tol: f64, opts: EigsOptions) -> Result<SpectralData> {
    if !b.is_finite() {
        return Err(Error::Config(format!("threshold b must be finite, got {b}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let n = op.dim();
    let (evals, evecs) = if n <= opts.dense_cap {
        dense_pairs_below(op, b)
    } else {
        lanczos_pairs_below(op, b, tol, opts)?
    };

    let scale = op.grid.cell_volume().sqrt();
    let eigenvectors: Vec<Vec<f64>> =
        evecs.into_iter().map(|v| v.into_iter().map(|x| x / scale).collect()).collect();
    let data = SpectralData {
        grid: op.grid.clone(),
        threshold: b,
        eigenvalues: evals,
        eigenvectors,
        residual_bound: 0.0,
    };
    let achieved = data.max_residual(op)?;
    if achieved > tol {
        return Err(Error::Solver(format!(
            "eigen residual {achieved:.3e} above tolerance {tol:.3e}"
        )));
    }
    Ok(SpectralData { residual_bound: achieved, ..data })
}

/// Dense path: full symmetric diagonalization, Euclidean-orthonormal vectors.
fn dense_pairs_below(op: &DiscreteOperator, b: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = op.to_dense();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let mut evals = Vec::new();
    let mut evecs = Vec::new();
    for &i in &order {
        let e = eig.eigenvalues[i];
        if e <= b {
            evals.push(e);
            evecs.push(eig.eigenvectors.column(i).iter().copied().collect());
        }
    }
    (evals, evecs)
}

/// Block Lanczos with full (twice-repeated) reorthogonalization.
fn lanczos_pairs_below(
    op: &DiscreteOperator,
    b: f64,
    tol: f64,
    opts: EigsOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = op.dim();
    let p = opts.block_size.max(2).min(n);
    let max_basis = opts.max_basis.min(n);
    let mut rng = seeding::rng_from(0x5f3c_6ab1_77d2_4e09);

    // Euclidean-orthonormal basis columns.
    let mut q: Vec<DVector<f64>> = Vec::new();
    let orthonormalize = |v: &mut DVector<f64>, q: &[DVector<f64>], rng: &mut rand_chacha::ChaCha8Rng| -> bool {
        for _ in 0..2 {
            for u in q {
                let c = u.dot(v);
                v.axpy(-c, u, 1.0);
            }
        }
        let norm = v.norm();
        if norm < 1e-12 {
            // replace exhausted direction with a fresh random one
            for x in v.iter_mut() {
                *x = rng.gen_range(-1.0..1.0);
            }
            return false;
        }
        *v /= norm;
        true
    };

    // seed block
    let mut block: Vec<DVector<f64>> = (0..p)
        .map(|_| DVector::from_iterator(n, (0..n).map(|_| rng.gen_range(-1.0..1.0))))
        .collect();
    let mut best_residual = f64::INFINITY;
    let mut last_count: Option<usize> = None;

    loop {
        for v in block.iter_mut() {
            let mut tries = 0;
            while !orthonormalize(v, &q, &mut rng) {
                tries += 1;
                if tries > 5 {
                    break;
                }
            }
            if v.norm() > 0.5 {
                q.push(v.clone());
            }
            if q.len() >= max_basis {
                break;
            }
        }

        // projected problem T = Qᵀ A Q
        let m = q.len();
        let aq: Vec<DVector<f64>> = q
            .iter()
            .map(|col| {
                let y = op.apply(col.as_slice())?;
                Ok(DVector::from_vec(y))
            })
            .collect::<Result<_>>()?;
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = q[i].dot(&aq[j]);
                t[(i, j)] = v;
                t[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());

        let ritz_pair = |i: usize| -> Result<(f64, DVector<f64>, f64)> {
            let theta = eig.eigenvalues[i];
            let mut y = DVector::zeros(n);
            for (r, qc) in q.iter().enumerate() {
                y.axpy(eig.eigenvectors[(r, i)], qc, 1.0);
            }
            let ay = DVector::from_vec(op.apply(y.as_slice())?);
            let res = (&ay - theta * &y).norm() / theta.abs().max(1.0);
            Ok((theta, y, res))
        };

        // all Ritz values <= b must be converged, and the first one above b
        // must be converged too so the boundary is genuinely resolved
        let mut evals = Vec::new();
        let mut evecs: Vec<DVector<f64>> = Vec::new();
        let mut all_converged = true;
        let mut boundary_resolved = m >= n;
        for &i in &order {
            let (theta, y, res) = ritz_pair(i)?;
            best_residual = best_residual.min(res);
            if theta > b {
                boundary_resolved = boundary_resolved || res <= tol;
                break;
            }
            if res > tol {
                all_converged = false;
                break;
            }
            evals.push(theta);
            evecs.push(y);
        }
        // interlacing only undercounts, so require the count to be stable
        // across two successive restarts before accepting it
        let stable = last_count == Some(evals.len());
        last_count = if all_converged { Some(evals.len()) } else { None };
        if all_converged && boundary_resolved && (stable || m >= n) {
            let out = evecs.into_iter().map(|v| v.iter().copied().collect()).collect();
            return Ok((evals, out));
        }
        if q.len() >= max_basis {
            return Err(Error::Solver(format!(
                "Lanczos basis cap {max_basis} reached; best residual {best_residual:.3e}"
            )));
        }

        // next block: A times the newest p basis vectors
        let newest = q.len().saturating_sub(p);
        block = q[newest..].iter().map(|col| DVector::from_vec(op.apply(col.as_slice()).unwrap())).collect();
    }
}

/// Spectral projection: returns (Σ α_k φ_k, coefficients α_k).
pub fn project(spec: &SpectralData, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let alphas: Vec<f64> = spec.eigenvectors.iter().map(|phi| spec.grid.inner(phi, u)).collect();
    let mut out = vec![0.0; u.len()];
    for (a, phi) in alphas.iter().zip(&spec.eigenvectors) {
        for (o, p) in out.iter_mut().zip(phi) {
            *o += a * p;
        }
    }
    (out, alphas)
}

/// Heat semigroup e^{−tH} on the span: coefficients decay as α_k e^{−E_k T}.
pub fn heat_apply(spec: &SpectralData, u: &[f64], time: f64) -> Result<Vec<f64>> {
    if time < 0.0 {
        return Err(Error::Config(format!("heat time must be >= 0, got {time}")));
    }
    let (_, alphas) = project(spec, u);
    let mut out = vec![0.0; u.len()];
    for ((a, e), phi) in alphas.iter().zip(&spec.eigenvalues).zip(&spec.eigenvectors) {
        let c = a * (-e * time).exp();
        for (o, p) in out.iter_mut().zip(phi) {
            *o += c * p;
        }
    }
    Ok(out)
}

/// Content hash of the operator table (grid, diffusion and coefficients).
pub fn operator_hash(op: &DiscreteOperator) -> String {
    let mut s = format!(
        "d={} L={} m={} bc={} t={}\n",
        op.grid.d,
        fmt_g17(op.grid.side),
        op.grid.density,
        op.grid.bc.name(),
        fmt_g17(op.diffusion)
    );
    s.push_str(&op.export_coo());
    sha256_hex(s.as_bytes())
}

/// Text cache: eigenvalues then eigenvectors row-major, 17 significant digits,
/// with the operator hash in the header for validation.
pub fn save_cache(spec: &SpectralData, op: &DiscreteOperator) -> String {
    let mut s = String::new();
    s.push_str("sfuc spectral cache v1\n");
    s.push_str(&format!("operator {}\n", operator_hash(op)));
    s.push_str(&format!("threshold {}\n", fmt_g17(spec.threshold)));
    s.push_str(&format!("residual {}\n", fmt_g17(spec.residual_bound)));
    s.push_str(&format!("k {} n {}\n", spec.k(), spec.grid.node_count()));
    for e in &spec.eigenvalues {
        s.push_str(&fmt_g17(*e));
        s.push('\n');
    }
    for phi in &spec.eigenvectors {
        let row: Vec<String> = phi.iter().map(|&x| fmt_g17(x)).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub fn load_cache(text: &str, op: &DiscreteOperator) -> Result<SpectralData> {
    let mut lines = text.lines();
    let magic = lines.next().unwrap_or_default();
    if magic != "sfuc spectral cache v1" {
        return Err(Error::Parse(format!("bad cache magic `{magic}`")));
    }
    let hash_line = lines.next().unwrap_or_default();
    let hash = hash_line.strip_prefix("operator ").ok_or_else(|| Error::Parse("missing operator hash".into()))?;
    if hash != operator_hash(op) {
        return Err(Error::Parse("cache operator hash does not match this operator".into()));
    }
    let read_kv = |line: Option<&str>, key: &str| -> Result<f64> {
        line.and_then(|l| l.strip_prefix(key))
            .and_then(|v| v.trim().parse::<f64>().ok())
            .ok_or_else(|| Error::Parse(format!("missing `{key}` line")))
    };
    let threshold = read_kv(lines.next(), "threshold ")?;
    let residual = read_kv(lines.next(), "residual ")?;
    let kn = lines.next().unwrap_or_default();
    let parts: Vec<&str> = kn.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "k" || parts[2] != "n" {
        return Err(Error::Parse(format!("bad k/n line `{kn}`")));
    }
    let k: usize = parts[1].parse().map_err(|_| Error::Parse("bad k".into()))?;
    let n: usize = parts[3].parse().map_err(|_| Error::Parse("bad n".into()))?;
    if n != op.grid.node_count() {
        return Err(Error::Parse("cache node count does not match grid".into()));
    }
    let mut eigenvalues = Vec::with_capacity(k);
    for _ in 0..k {
        let l = lines.next().ok_or_else(|| Error::Parse("truncated eigenvalues".into()))?;
        eigenvalues.push(l.trim().parse().map_err(|_| Error::Parse("bad eigenvalue".into()))?);
    }
    let mut eigenvectors = Vec::with_capacity(k);
    for _ in 0..k {
        let l = lines.next().ok_or_else(|| Error::Parse("truncated eigenvectors".into()))?;
        let row: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| Error::Parse("bad vector entry".into())))
            .collect::<Result<_>>()?;
        if row.len() != n {
            return Err(Error::Parse("eigenvector row length mismatch".into()));
        }
        eigenvectors.push(row);
    }
    Ok(SpectralData {
        grid: op.grid.clone(),
        threshold,
        eigenvalues,
        eigenvectors,
        residual_bound: residual,
    })
}

/// Smallest eigenvalue with eigenvector (dense path or Lanczos tail).
pub fn lowest_eigenpair(op: &DiscreteOperator) -> Result<(f64, Vec<f64>)> {
    let n = op.dim();
    if n <= DENSE_CAP {
        let (evals, evecs) = dense_pairs_below(op, f64::INFINITY);
        let scale = op.grid.cell_volume().sqrt();
        return Ok((evals[0], evecs[0].iter().map(|x| x / scale).collect()));
    }
    // Iterative: raise the threshold from the Gershgorin lower bound until a pair converges.
    let lo = -op.potential_sup;
    let hi = op.gershgorin_upper();
    let mut b = lo + (hi - lo) * 1e-4;
    for _ in 0..60 {
        let data = eigs_below(op, b, 1e-8)?;
        if data.k() >= 1 {
            return Ok((data.eigenvalues[0], data.eigenvectors[0].clone()));
        }
        b = lo + (b - lo) * 2.0 + 1e-12;
        if b > hi {
            break;
        }
    }
    Err(Error::Solver("lowest eigenpair search exhausted thresholds".into()))
}
