//! The discrete Schrödinger operator H = −tΔ_h + V on a grid, as a symmetric
//! sparse coefficient table, plus potential sampling.
//!
//! Stencil action at node i: t·(2d·u_i − Σ_neighbors u)/h² + V_i·u_i, with
//! Dirichlet dropping outside neighbors, Neumann mirroring them (cell-centered
//! ghosts, which only lowers the diagonal and keeps the table symmetric) and
//! periodic wrapping them.

use crate::error::{Error, Result};
use crate::grid::{BoundaryCondition, GridSpec};
use crate::util::fmt_g17;
use serde::{Deserialize, Serialize};

/// Real potential sampled at grid nodes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PotentialField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub sup_norm: f64,
}

impl PotentialField {
    pub fn zero(grid: &GridSpec) -> PotentialField {
        PotentialField { grid: grid.clone(), values: vec![0.0; grid.node_count()], sup_norm: 0.0 }
    }

    /// Pointwise sample V(x) at every node.
    pub fn from_fn(grid: &GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<PotentialField> {
        let values: Vec<f64> = (0..grid.node_count()).map(|i| f(&grid.node_coords(i))).collect();
        Self::from_values(grid, values)
    }

    pub fn from_values(grid: &GridSpec, values: Vec<f64>) -> Result<PotentialField> {
        if values.len() != grid.node_count() {
            return Err(Error::Config(format!(
                "potential has {} values for {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite potential sample {bad}")));
        }
        let sup_norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(PotentialField { grid: grid.clone(), values, sup_norm })
    }

    /// Node-wise sum of two fields on the same grid.
    pub fn add(&self, other: &PotentialField) -> Result<PotentialField> {
        if self.grid != other.grid {
            return Err(Error::Config("adding potentials on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        PotentialField::from_values(&self.grid, values)
    }
}

/// Symmetric sparse operator table.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub grid: GridSpec,
    /// Diffusion coefficient t in H = −tΔ + V.
    pub diffusion: f64,
    /// sup norm of the sampled potential.
    pub potential_sup: f64,
    /// Diagonal entries.
    diag: Vec<f64>,
    /// Strict upper-triangle entries (i < j); the mirrored pair is implied and
    /// exported explicitly.
    upper: Vec<(u32, u32, f64)>,
}

/// Assemble H = −tΔ_h + V on the potential's grid.
pub fn assemble(grid: &GridSpec, potential: &PotentialField, diffusion: f64) -> Result<DiscreteOperator> {
    if potential.grid != *grid {
        return Err(Error::Config("potential grid does not match operator grid".into()));
    }
    if !(diffusion > 0.0) {
        return Err(Error::Config(format!("diffusion coefficient must be > 0, got {diffusion}")));
    }
    let n = grid.node_count();
    let per_axis = grid.nodes_per_axis();
    let h2 = grid.spacing() * grid.spacing();
    let hop = diffusion / h2;

    let mut diag: Vec<f64> = (0..n).map(|i| 2.0 * grid.d as f64 * hop + potential.values[i]).collect();
    let mut upper: Vec<(u32, u32, f64)> = Vec::with_capacity(n * grid.d);

    let mut stride = vec![1usize; grid.d];
    for a in (0..grid.d.saturating_sub(1)).rev() {
        stride[a] = stride[a + 1] * per_axis;
    }

    for i in 0..n {
        let idx = grid.unflatten(i);
        for a in 0..grid.d {
            for dir in [-1isize, 1isize] {
                let ii = idx[a] as isize + dir;
                if ii >= 0 && (ii as usize) < per_axis {
                    let j = i.wrapping_add_signed(dir * stride[a] as isize);
                    if j > i {
                        upper.push((i as u32, j as u32, -hop));
                    }
                } else {
                    match grid.bc {
                        BoundaryCondition::Dirichlet => {}
                        BoundaryCondition::Neumann => {
                            // mirror ghost across the box face reflects the node onto itself
                            diag[i] -= hop;
                        }
                        BoundaryCondition::Periodic => {
                            let wrapped = ((ii + per_axis as isize) % per_axis as isize) as usize;
                            let j = i - idx[a] * stride[a] + wrapped * stride[a];
                            if j > i {
                                upper.push((i as u32, j as u32, -hop));
                            } else if j == i {
                                // per_axis == 2 folds both neighbors onto one node
                                diag[i] -= hop;
                            }
                        }
                    }
                }
            }
        }
    }
    upper.sort_unstable_by_key(|&(i, j, _)| (i, j));
    upper.dedup_by(|a, b| {
        if a.0 == b.0 && a.1 == b.1 {
            b.2 += a.2;
            true
        } else {
            false
        }
    });
    Ok(DiscreteOperator {
        grid: grid.clone(),
        diffusion,
        potential_sup: potential.sup_norm,
        diag,
        upper,
    })
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// y = H u.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.dim() {
            return Err(Error::Config(format!(
                "field length {} does not match operator dimension {}",
                u.len(),
                self.dim()
            )));
        }
        let mut y: Vec<f64> = self.diag.iter().zip(u).map(|(d, x)| d * x).collect();
        for &(i, j, v) in &self.upper {
            y[i as usize] += v * u[j as usize];
            y[j as usize] += v * u[i as usize];
        }
        Ok(y)
    }

    /// Full coefficient table with both symmetric pairs, sorted by (row, col).
    pub fn coefficient_table(&self) -> Vec<(u32, u32, f64)> {
        let mut t: Vec<(u32, u32, f64)> =
            self.diag.iter().enumerate().map(|(i, &v)| (i as u32, i as u32, v)).collect();
        for &(i, j, v) in &self.upper {
            t.push((i, j, v));
            t.push((j, i, v));
        }
        t.sort_unstable_by_key(|&(i, j, _)| (i, j));
        t
    }

    /// Coordinate-list text export: `i j value`, 0-based, symmetric pairs both present.
    pub fn export_coo(&self) -> String {
        let mut s = String::new();
        for (i, j, v) in self.coefficient_table() {
            s.push_str(&format!("{} {} {}\n", i, j, fmt_g17(v)));
        }
        s
    }

    /// Dense symmetric matrix, for the dense eigensolver path.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for &(i, j, v) in &self.upper {
            m[(i as usize, j as usize)] = v;
            m[(j as usize, i as usize)] = v;
        }
        m
    }

    /// Gershgorin upper bound 4d·t/h² + ‖V‖_∞ on the spectrum.
    pub fn gershgorin_upper(&self) -> f64 {
        let h2 = self.grid.spacing() * self.grid.spacing();
        4.0 * self.grid.d as f64 * self.diffusion / h2 + self.potential_sup
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::seeding;
    use rand::Rng;

    #[test]
    fn zero_potential_and_pointwise_sampling() {
        let g = make_grid(1, 1.0, 8, BoundaryCondition::Dirichlet).unwrap();
        let z = PotentialField::zero(&g);
        assert_eq!(z.sup_norm, 0.0);

        // V = 1 on |x| < 0.25 marks exactly nodes {-1/8, 0, 1/8}
        let v = PotentialField::from_fn(&g, |x| if x[0].abs() < 0.25 { 1.0 } else { 0.0 }).unwrap();
        let marked: Vec<f64> = (0..g.node_count())
            .filter(|&i| v.values[i] == 1.0)
            .map(|i| g.node_coords(i)[0])
            .collect();
        assert_eq!(marked, vec![-0.125, 0.0, 0.125]);

        let g16 = make_grid(1, 1.0, 16, BoundaryCondition::Periodic).unwrap();
        let c = PotentialField::from_fn(&g16, |x| (2.0 * std::f64::consts::PI * x[0]).cos()).unwrap();
        assert!((c.sup_norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_sample_rejected() {
        let g = make_grid(1, 1.0, 8, BoundaryCondition::Dirichlet).unwrap();
        assert!(matches!(
            PotentialField::from_fn(&g, |x| 1.0 / x[0]),
            Err(Error::Data(_)) | Ok(_)
        ));
        assert!(matches!(
            PotentialField::from_values(&g, vec![f64::NAN; 7]),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn dirichlet_tridiagonal_values() {
        let g = make_grid(1, 1.0, 8, BoundaryCondition::Dirichlet).unwrap();
        let op = assemble(&g, &PotentialField::zero(&g), 1.0).unwrap();
        let m = op.to_dense();
        assert_eq!(m.nrows(), 7);
        for i in 0..7 {
            assert_eq!(m[(i, i)], 128.0);
            if i + 1 < 7 {
                assert_eq!(m[(i, i + 1)], -64.0);
                assert_eq!(m[(i + 1, i)], -64.0);
            }
        }
        assert_eq!(m[(0, 2)], 0.0);
    }

    #[test]
    fn constants_are_annihilated_where_expected() {
        for bc in [BoundaryCondition::Periodic, BoundaryCondition::Neumann] {
            let g = make_grid(2, 1.0, 4, bc).unwrap();
            let c = 0.7;
            let v = PotentialField::from_fn(&g, |_| c).unwrap();
            let op = assemble(&g, &v, 1.0).unwrap();
            let ones = vec![1.0; g.node_count()];
            let y = op.apply(&ones).unwrap();
            for yi in y {
                assert!((yi - c).abs() < 1e-12, "constant field should be eigenvector with eigenvalue c");
            }
        }
    }

    #[test]
    fn table_symmetry_is_exact() {
        let g = make_grid(2, 1.0, 5, BoundaryCondition::Periodic).unwrap();
        let v = PotentialField::from_fn(&g, |x| x[0] + 2.0 * x[1]).unwrap();
        let op = assemble(&g, &v, 0.3).unwrap();
        let t = op.coefficient_table();
        let lookup: std::collections::HashMap<(u32, u32), f64> =
            t.iter().map(|&(i, j, v)| ((i, j), v)).collect();
        for &(i, j, v) in &t {
            assert_eq!(lookup[&(j, i)], v);
        }
    }

    #[test]
    fn apply_is_symmetric_in_weighted_inner_product() {
        let g = make_grid(2, 1.0, 6, BoundaryCondition::Neumann).unwrap();
        let v = PotentialField::from_fn(&g, |x| (x[0] * 3.0).sin() + x[1]).unwrap();
        let op = assemble(&g, &v, 1.0).unwrap();
        let mut rng = seeding::rng_from(11);
        let u: Vec<f64> = (0..g.node_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w: Vec<f64> = (0..g.node_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let hu = op.apply(&u).unwrap();
        let hw = op.apply(&w).unwrap();
        let a = g.inner(&hu, &w);
        let b = g.inner(&u, &hw);
        assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0));
    }

    #[test]
    fn discrete_sine_is_eigenvector() {
        let g = make_grid(1, 1.0, 32, BoundaryCondition::Dirichlet).unwrap();
        let op = assemble(&g, &PotentialField::zero(&g), 1.0).unwrap();
        let h = g.spacing();
        for k in [1usize, 3, 7] {
            let u: Vec<f64> = (0..g.node_count())
                .map(|i| {
                    let x = g.node_coords(i)[0];
                    (k as f64 * std::f64::consts::PI * (x + 0.5)).sin()
                })
                .collect();
            let lam = 2.0 / (h * h) * (1.0 - (k as f64 * std::f64::consts::PI * h).cos());
            let y = op.apply(&u).unwrap();
            let num: f64 = y.iter().zip(&u).map(|(a, b)| (a - lam * b) * (a - lam * b)).sum();
            let den: f64 = u.iter().map(|b| (lam * b) * (lam * b)).sum();
            assert!((num / den).sqrt() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn apply_zero_and_mismatch() {
        let g = make_grid(1, 1.0, 8, BoundaryCondition::Dirichlet).unwrap();
        let op = assemble(&g, &PotentialField::zero(&g), 1.0).unwrap();
        let y = op.apply(&vec![0.0; 7]).unwrap();
        assert!(y.iter().all(|&v| v == 0.0));
        assert!(matches!(op.apply(&vec![0.0; 6]), Err(Error::Config(_))));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let g1 = make_grid(1, 1.0, 8, BoundaryCondition::Dirichlet).unwrap();
        let g2 = make_grid(1, 1.0, 16, BoundaryCondition::Dirichlet).unwrap();
        let v = PotentialField::zero(&g2);
        assert!(matches!(assemble(&g1, &v, 1.0), Err(Error::Config(_))));
    }

    #[test]
    fn coo_export_contains_symmetric_pairs() {
        let g = make_grid(1, 1.0, 4, BoundaryCondition::Dirichlet).unwrap();
        let op = assemble(&g, &PotentialField::zero(&g), 1.0).unwrap();
        let text = op.export_coo();
        assert!(text.contains("0 1 "));
        assert!(text.contains("1 0 "));
        let rows = text.lines().count();
        assert_eq!(rows, 3 + 2 * 2); // 3 diagonal + 2 off-diagonal pairs
    }
}
