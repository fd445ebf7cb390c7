//! Grids on the box Λ_L = (−L/2, L/2)^d, equidistributed sequences, Delone
//! sets, and sampling-set masks.
//!
//! Node layouts per boundary condition (h = 1/m):
//! - Dirichlet: vertex grid, interior nodes only, L·m − 1 per axis.
//! - Periodic: vertex grid with −L/2 identified to L/2, L·m per axis.
//! - Neumann: cell-centered grid, L·m per axis; mirror ghosts keep the
//!   assembled stencil symmetric.

use crate::error::{Error, Result};
use crate::seeding;
use crate::util::fmt_g17;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Default cap on the total node count (desk-scale eigenproblems).
pub const NODE_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    Periodic,
}

impl BoundaryCondition {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
            BoundaryCondition::Periodic => "periodic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            "neumann" => Ok(BoundaryCondition::Neumann),
            "periodic" => Ok(BoundaryCondition::Periodic),
            other => Err(Error::Parse(format!("unknown boundary condition `{other}`"))),
        }
    }
}

/// Discretization of Λ_L = (−L/2, L/2)^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    /// Side length L.
    pub side: f64,
    /// Nodes per unit length; spacing h = 1/m.
    pub density: usize,
    pub bc: BoundaryCondition,
}

/// Build a grid; validates d ∈ {1,2,3}, L·m integer ≥ 2 and the node cap.
pub fn make_grid(d: usize, side: f64, density: usize, bc: BoundaryCondition) -> Result<GridSpec> {
    if !(1..=3).contains(&d) {
        return Err(Error::Capacity(format!("dimension {d} outside 1..=3")));
    }
    if !(side > 0.0) || density == 0 {
        return Err(Error::Config(format!("need L > 0 and m > 0, got L={side}, m={density}")));
    }
    let lm = side * density as f64;
    if (lm - lm.round()).abs() > 1e-9 || lm.round() < 2.0 {
        return Err(Error::Config(format!("L*m must be an integer >= 2, got {lm}")));
    }
    let grid = GridSpec { d, side, density, bc };
    if grid.node_count() == 0 {
        return Err(Error::Config("grid has no nodes".into()));
    }
    if grid.node_count() > NODE_CAP {
        return Err(Error::Capacity(format!(
            "node count {} exceeds cap {NODE_CAP}",
            grid.node_count()
        )));
    }
    Ok(grid)
}

impl GridSpec {
    pub fn spacing(&self) -> f64 {
        1.0 / self.density as f64
    }

    /// Intervals per axis, L·m.
    pub fn intervals(&self) -> usize {
        (self.side * self.density as f64).round() as usize
    }

    /// Nodes per axis.
    pub fn nodes_per_axis(&self) -> usize {
        match self.bc {
            BoundaryCondition::Dirichlet => self.intervals() - 1,
            BoundaryCondition::Neumann | BoundaryCondition::Periodic => self.intervals(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes_per_axis().pow(self.d as u32)
    }

    /// Quadrature weight h^d of the plain node inner product.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    /// Coordinate of the i-th node along one axis.
    pub fn axis_coord(&self, i: usize) -> f64 {
        let h = self.spacing();
        match self.bc {
            BoundaryCondition::Dirichlet => -self.side / 2.0 + (i as f64 + 1.0) * h,
            BoundaryCondition::Periodic => -self.side / 2.0 + i as f64 * h,
            BoundaryCondition::Neumann => -self.side / 2.0 + (i as f64 + 0.5) * h,
        }
    }

    /// Lexicographic flat index -> per-axis indices (axis 0 slowest).
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let n = self.nodes_per_axis();
        let mut idx = vec![0usize; self.d];
        for a in (0..self.d).rev() {
            idx[a] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        let n = self.nodes_per_axis();
        idx.iter().fold(0usize, |acc, &i| acc * n + i)
    }

    pub fn node_coords(&self, flat: usize) -> Vec<f64> {
        self.unflatten(flat).iter().map(|&i| self.axis_coord(i)).collect()
    }

    /// All node coordinate vectors in flat order.
    pub fn all_coords(&self) -> Vec<Vec<f64>> {
        (0..self.node_count()).map(|i| self.node_coords(i)).collect()
    }

    /// Discrete inner product ⟨u,v⟩ = h^d Σ u_i v_i.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), v.len());
        self.cell_volume() * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        self.inner(u, u).sqrt()
    }
}

/// One point z_j per cell Λ_G + j, j ∈ (GZ)^d, with B(z_j, δ) inside the cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquidistributedSequence {
    /// Cell size G.
    pub cell: f64,
    /// Ball radius δ.
    pub radius: f64,
    pub d: usize,
    /// Box side L (L ∈ G·N).
    pub side: f64,
    /// (integer cell multi-index q, point z_j); the cell center is G·q/2.
    /// The K = L/G cells per axis tile Λ_L, so q is odd when K is even.
    pub points: Vec<(Vec<i64>, Vec<f64>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceMode {
    Centered,
    UniformRandom,
}

impl SequenceMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "centered" => Ok(SequenceMode::Centered),
            "uniform_random" => Ok(SequenceMode::UniformRandom),
            other => Err(Error::Parse(format!("unknown sequence mode `{other}`"))),
        }
    }
}

/// Per-axis cell indices q (centers G·q/2) for the K cells tiling Λ_L.
fn cell_indices(cell: f64, side: f64) -> Vec<i64> {
    let k = (side / cell).round() as i64;
    // center_i = -L/2 + G(i + 1/2) = (G/2)·(2i + 1 - K)
    (0..k).map(|i| 2 * i + 1 - k).collect()
}

/// Generate a (G, δ)-equidistributed sequence over Λ_L.
///
/// `uniform_random` draws each z_j uniformly from the admissible sub-cell
/// (half-width G/2 − δ) with a per-cell seed derived from (seed, j), so the
/// point of cell j is the same whichever box contains it.
pub fn generate_sequence(
    cell: f64,
    radius: f64,
    d: usize,
    side: f64,
    mode: SequenceMode,
    seed: u64,
) -> Result<EquidistributedSequence> {
    if !(cell > 0.0) || !(radius > 0.0) || radius >= cell / 2.0 {
        return Err(Error::Geometry(format!(
            "need 0 < delta < G/2 so every ball B(z_j, delta) fits inside its cell; got G={cell}, delta={radius}"
        )));
    }
    let ratio = side / cell;
    if (ratio - ratio.round()).abs() > 1e-9 || ratio.round() < 1.0 {
        return Err(Error::Geometry(format!("L must be a positive multiple of G, got L={side}, G={cell}")));
    }
    if !(1..=3).contains(&d) {
        return Err(Error::Capacity(format!("dimension {d} outside 1..=3")));
    }

    let margin = cell / 2.0 - radius;
    let range = cell_indices(cell, side);
    let mut cells: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for base in &cells {
            for &q in &range {
                let mut c = base.clone();
                c.push(q);
                next.push(c);
            }
        }
        cells = next;
    }

    let mut points = Vec::with_capacity(cells.len());
    for q in cells {
        let center: Vec<f64> = q.iter().map(|&qi| cell * qi as f64 / 2.0).collect();
        let z = match mode {
            SequenceMode::Centered => center,
            SequenceMode::UniformRandom => {
                let mut rng = seeding::rng_from(seeding::mix_multi(seed, &q));
                center
                    .iter()
                    .map(|&c| c + rng.gen_range(-margin..margin))
                    .collect()
            }
        };
        points.push((q, z));
    }
    Ok(EquidistributedSequence { cell, radius, d, side, points })
}

impl EquidistributedSequence {
    /// Exact Definition-2.1 containment B(z_j, δ) ⊂ Λ_G + j, coordinate-wise.
    pub fn containment_holds(&self) -> bool {
        self.points.iter().all(|(q, z)| {
            q.iter().zip(z).all(|(&qi, &zi)| {
                (zi - self.cell * qi as f64 / 2.0).abs() + self.radius <= self.cell / 2.0
            })
        })
    }

    /// Text format: header `G delta d L`, then one `j... z...` line per cell.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "{} {} {} {}\n",
            fmt_g17(self.cell),
            fmt_g17(self.radius),
            self.d,
            fmt_g17(self.side)
        ));
        for (q, z) in &self.points {
            let mut fields: Vec<String> =
                q.iter().map(|&qi| fmt_g17(self.cell * qi as f64 / 2.0)).collect();
            fields.extend(z.iter().map(|&zi| fmt_g17(zi)));
            s.push_str(&fields.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty sequence file".into()))?;
        let hf: Vec<&str> = header.split_whitespace().collect();
        if hf.len() != 4 {
            return Err(Error::Parse(format!("bad sequence header `{header}`")));
        }
        let cell: f64 = hf[0].parse().map_err(|_| Error::Parse("bad G".into()))?;
        let radius: f64 = hf[1].parse().map_err(|_| Error::Parse("bad delta".into()))?;
        let d: usize = hf[2].parse().map_err(|_| Error::Parse("bad d".into()))?;
        let side: f64 = hf[3].parse().map_err(|_| Error::Parse("bad L".into()))?;
        let mut points = Vec::new();
        for line in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 * d {
                return Err(Error::Parse(format!("expected {} fields, got {}", 2 * d, fields.len())));
            }
            let mut q = Vec::with_capacity(d);
            let mut z = Vec::with_capacity(d);
            for (i, f) in fields.iter().enumerate() {
                let v: f64 = f.parse().map_err(|_| Error::Parse(format!("bad number `{f}`")))?;
                if i < d {
                    q.push((2.0 * v / cell).round() as i64);
                } else {
                    z.push(v);
                }
            }
            points.push((q, z));
        }
        Ok(EquidistributedSequence { cell, radius, d, side, points })
    }
}

/// Node-level indicator of W_δ(L) = ∪_j B(z_j, δ) ∩ Λ_L.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mask {
    pub grid: GridSpec,
    pub indicator: Vec<bool>,
}

impl Mask {
    pub fn full(grid: &GridSpec) -> Mask {
        Mask { grid: grid.clone(), indicator: vec![true; grid.node_count()] }
    }

    pub fn empty(grid: &GridSpec) -> Mask {
        Mask { grid: grid.clone(), indicator: vec![false; grid.node_count()] }
    }

    /// Mark nodes where `pred(x)` holds.
    pub fn from_predicate(grid: &GridSpec, pred: impl Fn(&[f64]) -> bool) -> Mask {
        let indicator = (0..grid.node_count()).map(|i| pred(&grid.node_coords(i))).collect();
        Mask { grid: grid.clone(), indicator }
    }

    pub fn count(&self) -> usize {
        self.indicator.iter().filter(|&&b| b).count()
    }

    /// h^d × number of marked nodes.
    pub fn measure(&self) -> f64 {
        self.grid.cell_volume() * self.count() as f64
    }

    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.indicator.iter().zip(&other.indicator).all(|(&a, &b)| !a || b)
    }
}

/// Mark every node with |x − z_j| < δ for some j (open balls, Euclidean norm).
pub fn build_mask(seq: &EquidistributedSequence, grid: &GridSpec) -> Result<Mask> {
    if (grid.side - seq.side).abs() > 1e-9 || grid.d != seq.d {
        return Err(Error::Config(format!(
            "grid Λ_{} (d={}) does not cover the sequence box Λ_{} (d={})",
            grid.side, grid.d, seq.side, seq.d
        )));
    }
    let mut indicator = vec![false; grid.node_count()];
    let r2 = seq.radius * seq.radius;
    for i in 0..grid.node_count() {
        let x = grid.node_coords(i);
        'cells: for (_, z) in &seq.points {
            let mut s = 0.0;
            for (a, b) in x.iter().zip(z) {
                let t = a - b;
                s += t * t;
            }
            if s < r2 {
                indicator[i] = true;
                break 'cells;
            }
        }
    }
    Ok(Mask { grid: grid.clone(), indicator })
}

/// Finite point set with uniform-discreteness scale G1 and denseness scale G2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeloneSet {
    pub points: Vec<Vec<f64>>,
    pub g1: f64,
    pub g2: f64,
}

/// Axis-aligned probe region `[lo, hi]^d`-style box.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn cube(d: usize, side: f64) -> BoxRegion {
        BoxRegion { lo: vec![-side / 2.0; d], hi: vec![side / 2.0; d] }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeloneReport {
    pub ok: bool,
    pub uniformly_discrete: bool,
    pub relatively_dense: bool,
    /// Translate center with the most points when uniform discreteness fails.
    pub worst_crowded_translate: Option<(Vec<f64>, usize)>,
    /// Translate center (fully inside the region) with no points.
    pub worst_empty_translate: Option<Vec<f64>>,
}

/// Check both Delone conditions on a probe-translate lattice of pitch ≤ G1/4.
///
/// Verification is approximate up to pitch-sized blind spots; the pitch is a
/// parameter so callers can tighten it.
pub fn verify_delone(set: &DeloneSet, region: &BoxRegion, pitch: Option<f64>) -> Result<DeloneReport> {
    let d = region.lo.len();
    if set.points.iter().any(|p| p.len() != d) {
        return Err(Error::Config("point dimension does not match region".into()));
    }
    if !(set.g1 > 0.0) || set.g2 <= set.g1 {
        return Err(Error::Geometry(format!("need 0 < G1 < G2, got G1={}, G2={}", set.g1, set.g2)));
    }
    for (lo, hi) in region.lo.iter().zip(&region.hi) {
        if hi <= lo {
            return Err(Error::Geometry("empty probe region".into()));
        }
    }
    let pitch = pitch.unwrap_or(set.g1 / 4.0).min(set.g1 / 4.0);

    let count_in = |center: &[f64], half: f64| -> usize {
        set.points
            .iter()
            .filter(|p| p.iter().zip(center).all(|(x, c)| (x - c).abs() < half))
            .count()
    };

    // Probe lattices: uniform over the (inflated) region per condition.
    let axis_probes = |lo: f64, hi: f64| -> Vec<f64> {
        let n = (((hi - lo) / pitch).ceil() as usize).max(1);
        (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
    };

    let mut probes_g1: Vec<Vec<f64>> = vec![vec![]];
    let mut probes_g2: Vec<Vec<f64>> = vec![vec![]];
    for a in 0..d {
        // G1 translates may stick out of the region; G2 translates must lie inside.
        let g1_axis = axis_probes(region.lo[a] - set.g1 / 2.0, region.hi[a] + set.g1 / 2.0);
        let g2_lo = region.lo[a] + set.g2 / 2.0;
        let g2_hi = region.hi[a] - set.g2 / 2.0;
        let g2_axis = if g2_hi >= g2_lo { axis_probes(g2_lo, g2_hi) } else { Vec::new() };
        let extend = |acc: Vec<Vec<f64>>, axis: &[f64]| {
            let mut next = Vec::with_capacity(acc.len() * axis.len());
            for base in &acc {
                for &x in axis {
                    let mut c = base.clone();
                    c.push(x);
                    next.push(c);
                }
            }
            next
        };
        probes_g1 = extend(probes_g1, &g1_axis);
        probes_g2 = extend(probes_g2, &g2_axis);
    }

    let mut worst_crowded: Option<(Vec<f64>, usize)> = None;
    for c in &probes_g1 {
        let n = count_in(c, set.g1 / 2.0);
        if n > 1 && worst_crowded.as_ref().map_or(true, |(_, m)| n > *m) {
            worst_crowded = Some((c.clone(), n));
        }
    }
    let mut worst_empty: Option<Vec<f64>> = None;
    for c in &probes_g2 {
        if count_in(c, set.g2 / 2.0) == 0 {
            worst_empty = Some(c.clone());
            break;
        }
    }
    // An empty point list over a region that admits G2 translates fails denseness.
    if set.points.is_empty() && worst_empty.is_none() && !probes_g2.is_empty() {
        worst_empty = Some(probes_g2[0].clone());
    }

    let uniformly_discrete = worst_crowded.is_none();
    let relatively_dense = worst_empty.is_none();
    Ok(DeloneReport {
        ok: uniformly_discrete && relatively_dense,
        uniformly_discrete,
        relatively_dense,
        worst_crowded_translate: worst_crowded,
        worst_empty_translate: worst_empty,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_interior_nodes() {
        let g = make_grid(1, 1.0, 8, BoundaryCondition::Dirichlet).unwrap();
        assert_eq!(g.node_count(), 7);
        let xs: Vec<f64> = (0..7).map(|i| g.axis_coord(i)).collect();
        assert_eq!(xs[0], -3.0 / 8.0);
        assert_eq!(xs[6], 3.0 / 8.0);
    }

    #[test]
    fn periodic_wraps_and_drops_duplicate() {
        let g = make_grid(1, 1.0, 8, BoundaryCondition::Periodic).unwrap();
        assert_eq!(g.node_count(), 8);
        assert_eq!(g.axis_coord(0), -0.5);
        assert_eq!(g.axis_coord(7), 3.0 / 8.0);
    }

    #[test]
    fn two_d_dirichlet_node_count() {
        // Enumeration oracle: count multi-indices directly.
        let g = make_grid(2, 2.0, 4, BoundaryCondition::Dirichlet).unwrap();
        let per_axis = 2 * 4 - 1;
        let mut count = 0;
        for _ in 0..per_axis {
            for _ in 0..per_axis {
                count += 1;
            }
        }
        assert_eq!(g.node_count(), count);
        assert_eq!(g.node_count(), 49);
    }

    #[test]
    fn non_integer_lm_rejected_and_cap_enforced() {
        assert!(matches!(
            make_grid(1, 1.1, 8, BoundaryCondition::Dirichlet),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            make_grid(3, 10.0, 10, BoundaryCondition::Periodic),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn centered_sequence_hits_cell_centers() {
        let s = generate_sequence(1.0, 0.25, 1, 3.0, SequenceMode::Centered, 0).unwrap();
        let mut zs: Vec<f64> = s.points.iter().map(|(_, z)| z[0]).collect();
        zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(zs, vec![-1.0, 0.0, 1.0]);
        assert!(s.containment_holds());
    }

    #[test]
    fn random_sequence_respects_margin() {
        let s = generate_sequence(1.0, 0.49, 1, 1.0, SequenceMode::UniformRandom, 123).unwrap();
        assert_eq!(s.points.len(), 1);
        let z = s.points[0].1[0];
        assert!(z > -0.01 && z < 0.01);
        assert!(s.containment_holds());
    }

    #[test]
    fn random_sequence_containment_oracle_2d() {
        let s = generate_sequence(2.0, 0.5, 2, 4.0, SequenceMode::UniformRandom, 7).unwrap();
        assert_eq!(s.points.len(), 4);
        for (q, z) in &s.points {
            for (qi, zi) in q.iter().zip(z) {
                assert!((zi - *qi as f64).abs() + 0.5 <= 1.0);
            }
        }
    }

    #[test]
    fn sequence_generation_is_deterministic_and_cells_stable_across_l() {
        let a = generate_sequence(1.0, 0.2, 1, 5.0, SequenceMode::UniformRandom, 9).unwrap();
        let b = generate_sequence(1.0, 0.2, 1, 5.0, SequenceMode::UniformRandom, 9).unwrap();
        for ((qa, za), (qb, zb)) in a.points.iter().zip(&b.points) {
            assert_eq!(qa, qb);
            assert_eq!(za, zb);
        }
        // cell j carries the same point in the smaller box
        let small = generate_sequence(1.0, 0.2, 1, 3.0, SequenceMode::UniformRandom, 9).unwrap();
        for (qs, zs) in &small.points {
            let (_, zl) = a.points.iter().find(|(q, _)| q == qs).unwrap();
            assert_eq!(zs, zl);
        }
    }

    #[test]
    fn bad_sequence_geometry_rejected() {
        assert!(matches!(
            generate_sequence(1.0, 0.5, 1, 3.0, SequenceMode::Centered, 0),
            Err(Error::Geometry(_))
        ));
        assert!(matches!(
            generate_sequence(1.0, 0.25, 1, 2.5, SequenceMode::Centered, 0),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn mask_node_membership_oracle() {
        // d=1, G=L=1, z_0=0, delta=0.25, m=8: open ball keeps {-1/8, 0, 1/8}.
        let g = make_grid(1, 1.0, 8, BoundaryCondition::Dirichlet).unwrap();
        let s = generate_sequence(1.0, 0.25, 1, 1.0, SequenceMode::Centered, 0).unwrap();
        let m = build_mask(&s, &g).unwrap();
        let marked: Vec<f64> = (0..g.node_count())
            .filter(|&i| m.indicator[i])
            .map(|i| g.node_coords(i)[0])
            .collect();
        assert_eq!(marked, vec![-0.125, 0.0, 0.125]);
        assert!((m.measure() - 3.0 / 8.0).abs() < 1e-15);
        // node-by-node oracle
        for i in 0..g.node_count() {
            let x = g.node_coords(i)[0];
            assert_eq!(m.indicator[i], x.abs() < 0.25);
        }
    }

    #[test]
    fn tiny_radius_masks_nothing_at_offset_centers() {
        let g = make_grid(1, 1.0, 8, BoundaryCondition::Dirichlet).unwrap();
        // z_0 shifted off the lattice so a vanishing radius catches no node
        let seq = EquidistributedSequence {
            cell: 1.0,
            radius: 1e-9,
            d: 1,
            side: 1.0,
            points: vec![(vec![0], vec![0.03])],
        };
        let m = build_mask(&seq, &g).unwrap();
        assert_eq!(m.count(), 0);
    }

    #[test]
    fn mask_measure_matches_continuum_within_5_percent() {
        let g = make_grid(1, 1.0, 100, BoundaryCondition::Periodic).unwrap();
        let s = generate_sequence(1.0, 0.49, 1, 1.0, SequenceMode::Centered, 0).unwrap();
        let m = build_mask(&s, &g).unwrap();
        let continuum = 2.0 * 0.49;
        assert!((m.measure() - continuum).abs() / continuum < 0.05);
    }

    #[test]
    fn sequence_text_round_trip() {
        let s = generate_sequence(0.5, 0.2, 2, 2.0, SequenceMode::UniformRandom, 77).unwrap();
        let t = s.to_text();
        let r = EquidistributedSequence::from_text(&t).unwrap();
        assert_eq!(s.points.len(), r.points.len());
        for ((qa, za), (qb, zb)) in s.points.iter().zip(&r.points) {
            assert_eq!(qa, qb);
            for (x, y) in za.iter().zip(zb) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn delone_unit_lattice_ok() {
        let set = DeloneSet {
            points: (-5..=5).map(|j| vec![j as f64]).collect(),
            g1: 0.9,
            g2: 1.1,
        };
        let rep = verify_delone(&set, &BoxRegion { lo: vec![-5.0], hi: vec![5.0] }, None).unwrap();
        assert!(rep.ok, "{rep:?}");
    }

    #[test]
    fn delone_crowding_detected() {
        let set = DeloneSet { points: vec![vec![0.0], vec![0.1]], g1: 0.9, g2: 1.1 };
        let rep = verify_delone(&set, &BoxRegion { lo: vec![-1.0], hi: vec![1.0] }, None).unwrap();
        assert!(!rep.uniformly_discrete);
        assert!(rep.worst_crowded_translate.is_some());
    }

    #[test]
    fn delone_perturbed_lattice_ok() {
        // j + 0.2*xi_j with |xi_j| <= 1
        let mut rng = seeding::rng_from(3);
        let points: Vec<Vec<f64>> =
            (-6..=6).map(|j| vec![j as f64 + 0.2 * rng.gen_range(-1.0..1.0)]).collect();
        let set = DeloneSet { points, g1: 0.5, g2: 1.5 };
        let rep = verify_delone(&set, &BoxRegion { lo: vec![-5.0], hi: vec![5.0] }, None).unwrap();
        assert!(rep.ok, "{rep:?}");
    }

    #[test]
    fn delone_empty_set_fails_denseness() {
        let set = DeloneSet { points: vec![], g1: 0.5, g2: 1.5 };
        let rep = verify_delone(&set, &BoxRegion { lo: vec![-2.0], hi: vec![2.0] }, None).unwrap();
        assert!(!rep.relatively_dense);
        assert!(rep.worst_empty_translate.is_some());
    }
}
