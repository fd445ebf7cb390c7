//! Single-site families u_t, random potentials V_ω over lattices or Delone
//! sets, and the single-site condition checkers (A)–(G).

use crate::error::{Error, Result};
use crate::fitting::line_fit;
use crate::grid::{DeloneSet, GridSpec};
use crate::operator::PotentialField;
use crate::seeding;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Declared convexity certificate: center plus support-function samples on a
/// direction grid. Membership is the intersection of the sampled half-spaces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexCertificate {
    pub center: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
    pub support: Vec<f64>,
}

impl ConvexCertificate {
    pub fn contains(&self, x: &[f64]) -> bool {
        self.directions.iter().zip(&self.support).all(|(dir, &h)| {
            let dot: f64 = dir.iter().zip(x.iter().zip(&self.center)).map(|(d, (xi, ci))| d * (xi - ci)).sum();
            dot <= h
        })
    }
}

/// Single-site profile u (the t = 1 shape for dilation families).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum Profile {
    /// χ_{B(0, radius)} (open ball).
    BallIndicator { radius: f64 },
    /// (1 − |x|/radius)₊.
    Hat { radius: f64 },
    /// exp(1/((|x|/radius)² − 1)) on |x| < radius.
    SmoothBump { radius: f64 },
    /// |x|^{−1/2} on 0 < |x| < radius; singular at the origin.
    InverseSqrt { radius: f64 },
    /// Piecewise-linear radial table; zero beyond the last knot.
    RadialTable { radii: Vec<f64>, values: Vec<f64> },
    /// Indicator of a declared convex set.
    ConvexIndicator { certificate: ConvexCertificate },
}

impl Profile {
    pub fn is_radial(&self) -> bool {
        !matches!(self, Profile::ConvexIndicator { .. })
    }

    pub fn support_radius(&self) -> f64 {
        match self {
            Profile::BallIndicator { radius }
            | Profile::Hat { radius }
            | Profile::SmoothBump { radius }
            | Profile::InverseSqrt { radius } => *radius,
            Profile::RadialTable { radii, .. } => radii.last().copied().unwrap_or(0.0),
            Profile::ConvexIndicator { certificate } => {
                let c_norm = certificate.center.iter().map(|c| c * c).sum::<f64>().sqrt();
                c_norm + certificate.support.iter().fold(0.0f64, |m, &h| m.max(h))
            }
        }
    }

    /// Radial part r_u(s); only for radial profiles.
    pub fn radial_value(&self, s: f64) -> f64 {
        match self {
            Profile::BallIndicator { radius } => {
                if s < *radius {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Hat { radius } => (1.0 - s / radius).max(0.0),
            Profile::SmoothBump { radius } => {
                let y = s / radius;
                if y < 1.0 {
                    (1.0 / (y * y - 1.0)).exp()
                } else {
                    0.0
                }
            }
            Profile::InverseSqrt { radius } => {
                if s > 0.0 && s < *radius {
                    s.powf(-0.5)
                } else {
                    0.0
                }
            }
            Profile::RadialTable { radii, values } => {
                if radii.is_empty() || s >= *radii.last().unwrap() {
                    return 0.0;
                }
                let mut prev_r = 0.0;
                let mut prev_v = values.first().copied().unwrap_or(0.0);
                for (r, v) in radii.iter().zip(values) {
                    if s <= *r {
                        let w = if *r > prev_r { (s - prev_r) / (r - prev_r) } else { 0.0 };
                        return prev_v + w * (v - prev_v);
                    }
                    prev_r = *r;
                    prev_v = *v;
                }
                0.0
            }
            Profile::ConvexIndicator { .. } => 0.0,
        }
    }

    /// Analytic radial derivative where available; None at non-differentiable points.
    pub fn radial_d1(&self, s: f64) -> Option<f64> {
        match self {
            Profile::BallIndicator { radius } => {
                if (s - radius).abs() < 1e-12 {
                    None
                } else {
                    Some(0.0)
                }
            }
            Profile::Hat { radius } => {
                if (s - radius).abs() < 1e-12 || s < 1e-15 {
                    None
                } else if s < *radius {
                    Some(-1.0 / radius)
                } else {
                    Some(0.0)
                }
            }
            Profile::SmoothBump { radius } => {
                let y = s / radius;
                if y >= 1.0 {
                    Some(0.0)
                } else {
                    let f = (1.0 / (y * y - 1.0)).exp();
                    let g = -2.0 * y / (y * y - 1.0).powi(2);
                    Some(f * g / radius)
                }
            }
            Profile::InverseSqrt { radius } => {
                if s > 0.0 && s < *radius {
                    Some(-0.5 * s.powf(-1.5))
                } else if (s - radius).abs() < 1e-12 {
                    None
                } else {
                    Some(0.0)
                }
            }
            Profile::RadialTable { radii, .. } => {
                if radii.iter().any(|r| (s - r).abs() < 1e-12) {
                    None
                } else {
                    let h = 1e-7 * self.support_radius().max(1.0);
                    Some((self.radial_value(s + h) - self.radial_value(s - h)) / (2.0 * h))
                }
            }
            Profile::ConvexIndicator { .. } => None,
        }
    }

    pub fn radial_d2(&self, s: f64) -> Option<f64> {
        match self {
            Profile::Hat { radius } => {
                if (s - radius).abs() < 1e-12 || s < 1e-15 {
                    None
                } else {
                    Some(0.0)
                }
            }
            Profile::SmoothBump { radius } => {
                let y = s / radius;
                if y >= 1.0 {
                    Some(0.0)
                } else {
                    let f = (1.0 / (y * y - 1.0)).exp();
                    let q = y * y - 1.0;
                    let g = -2.0 * y / (q * q);
                    let gp = -2.0 / (q * q) + 8.0 * y * y / (q * q * q);
                    Some(f * (g * g + gp) / (radius * radius))
                }
            }
            Profile::InverseSqrt { radius } => {
                if s > 0.0 && s < *radius {
                    Some(0.75 * s.powf(-2.5))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Evaluate u(x).
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Profile::ConvexIndicator { certificate } => {
                if certificate.contains(x) {
                    1.0
                } else {
                    0.0
                }
            }
            _ => {
                let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                self.radial_value(s)
            }
        }
    }

    /// Parse the profile description format:
    /// `radial <expr-id> <params…>` with expr-id ∈ {hat, bump, invsqrt},
    /// `radial table r1:v1 r2:v2 …`,
    /// `indicator ball <r>`, or
    /// `indicator convex <certificate text>` where the certificate text is
    /// `center c1,…,cd; dir d1,…,dd support h; …`.
    pub fn parse_description(s: &str) -> Result<Profile> {
        let mut words = s.split_whitespace();
        let head = words.next().unwrap_or_default();
        match head {
            "radial" => {
                let id = words
                    .next()
                    .ok_or_else(|| Error::Parse("radial profile needs an expr-id".into()))?;
                let rest: Vec<&str> = words.collect();
                let one_param = |rest: &[&str]| -> Result<f64> {
                    rest.first()
                        .ok_or_else(|| Error::Parse(format!("radial {id} needs a radius parameter")))?
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad radius for radial {id}")))
                };
                match id {
                    "hat" => Ok(Profile::Hat { radius: one_param(&rest)? }),
                    "bump" => Ok(Profile::SmoothBump { radius: one_param(&rest)? }),
                    "invsqrt" => Ok(Profile::InverseSqrt { radius: one_param(&rest)? }),
                    "table" => {
                        let mut radii = Vec::new();
                        let mut values = Vec::new();
                        for entry in rest {
                            let (r, v) = entry.split_once(':').ok_or_else(|| {
                                Error::Parse(format!("table entry `{entry}` needs r:v"))
                            })?;
                            radii.push(r.parse().map_err(|_| Error::Parse("bad table radius".into()))?);
                            values.push(v.parse().map_err(|_| Error::Parse("bad table value".into()))?);
                        }
                        if radii.is_empty() {
                            return Err(Error::Parse("radial table needs at least one knot".into()));
                        }
                        Ok(Profile::RadialTable { radii, values })
                    }
                    other => Err(Error::Parse(format!("unknown radial expr-id `{other}`"))),
                }
            }
            "indicator" => match words.next() {
                Some("ball") => {
                    let r: f64 = words
                        .next()
                        .ok_or_else(|| Error::Parse("indicator ball needs a radius".into()))?
                        .parse()
                        .map_err(|_| Error::Parse("bad ball radius".into()))?;
                    Ok(Profile::BallIndicator { radius: r })
                }
                Some("convex") => {
                    let rest: String = words.collect::<Vec<_>>().join(" ");
                    Ok(Profile::ConvexIndicator { certificate: parse_certificate(&rest)? })
                }
                other => Err(Error::Parse(format!("unknown indicator kind `{other:?}`"))),
            },
            other => Err(Error::Parse(format!(
                "profile description must start with `radial` or `indicator`, got `{other}`"
            ))),
        }
    }
}

/// `center c1,…,cd; dir d1,…,dd support h; …` — half-space certificate text.
fn parse_certificate(text: &str) -> Result<ConvexCertificate> {
    let mut center = None;
    let mut directions = Vec::new();
    let mut support = Vec::new();
    for clause in text.split(';') {
        let clause = clause.trim();
        if clause.is_empty() {
            continue;
        }
        if let Some(rest) = clause.strip_prefix("center ") {
            let c: Vec<f64> = rest
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| Error::Parse("bad center coordinate".into())))
                .collect::<Result<_>>()?;
            center = Some(c);
        } else if let Some(rest) = clause.strip_prefix("dir ") {
            let (dir_part, sup_part) = rest
                .split_once(" support ")
                .ok_or_else(|| Error::Parse(format!("clause `{clause}` needs `dir … support h`")))?;
            let dir: Vec<f64> = dir_part
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| Error::Parse("bad direction coordinate".into())))
                .collect::<Result<_>>()?;
            directions.push(dir);
            support.push(
                sup_part
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse("bad support value".into()))?,
            );
        } else {
            return Err(Error::Parse(format!("unknown certificate clause `{clause}`")));
        }
    }
    let center = center.ok_or_else(|| Error::Parse("certificate needs a center clause".into()))?;
    if directions.is_empty() {
        return Err(Error::Parse("certificate needs at least one dir clause".into()));
    }
    Ok(ConvexCertificate { center, directions, support })
}

/// Parametrized single-site family {u_t} over the unit dilation interval.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// u_t = χ_{B(0,t)}.
    StandardBall,
    /// u_t(x) = u(x/t), u_0 ≡ 0.
    DilationOfProfile { profile: Profile },
    /// u_t = t·u.
    Alloy { profile: Profile },
    /// Alloy over a Delone site set.
    DeloneAlloy { profile: Profile },
}

/// Observed or declared condition-(A) constants (α₁, α₂, β₁, β₂).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConditionParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BreatherFamily {
    pub kind: FamilyKind,
    /// supp u_t ⊂ Λ_{G_u} for every t in the unit interval.
    pub g_u: f64,
    pub u_max: f64,
    pub params: Option<ConditionParams>,
}

impl BreatherFamily {
    pub fn standard_ball() -> BreatherFamily {
        BreatherFamily {
            kind: FamilyKind::StandardBall,
            g_u: 2.0,
            u_max: 1.0,
            // annulus contains B((t+δ/2)e₁, δ/2)
            params: Some(ConditionParams { alpha1: 1.0, alpha2: 0.0, beta1: 0.5, beta2: 1.0 }),
        }
    }

    pub fn dilation(profile: Profile) -> Result<BreatherFamily> {
        let r = profile.support_radius();
        let sup = probe_sup(&profile);
        if !sup.is_finite() || sup > 1e8 {
            return Err(Error::Data("dilation family needs a bounded profile".into()));
        }
        Ok(BreatherFamily {
            kind: FamilyKind::DilationOfProfile { profile },
            g_u: 2.0 * r,
            u_max: sup,
            params: None,
        })
    }

    pub fn alloy(profile: Profile) -> Result<BreatherFamily> {
        let r = profile.support_radius();
        let sup = probe_sup(&profile);
        if !sup.is_finite() || sup > 1e8 {
            return Err(Error::Data("alloy family needs a bounded profile".into()));
        }
        Ok(BreatherFamily { kind: FamilyKind::Alloy { profile }, g_u: 2.0 * r, u_max: sup, params: None })
    }

    /// u_t(x).
    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        match &self.kind {
            FamilyKind::StandardBall => {
                let s2: f64 = x.iter().map(|v| v * v).sum();
                if s2 < t * t && t > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            FamilyKind::DilationOfProfile { profile } => {
                if t <= 0.0 {
                    0.0
                } else {
                    let y: Vec<f64> = x.iter().map(|v| v / t).collect();
                    profile.eval(&y)
                }
            }
            FamilyKind::Alloy { profile } | FamilyKind::DeloneAlloy { profile } => t * profile.eval(x),
        }
    }

    /// Check supp u_t ⊂ Λ_{G_u} and ‖u_t‖_∞ ≤ u_max on probe grids.
    pub fn verify_envelope(&self, d: usize, t_probes: usize, x_probes: usize) -> bool {
        for it in 0..=t_probes {
            let t = it as f64 / t_probes as f64;
            for ix in 0..x_probes {
                // probe along the first axis; radial symmetry of the built-ins
                let r = (ix as f64 + 0.5) / x_probes as f64 * self.g_u;
                let mut x = vec![0.0; d];
                x[0] = r;
                let v = self.eval(t, &x);
                if v.abs() > self.u_max + 1e-12 {
                    return false;
                }
                if r >= self.g_u / 2.0 && v != 0.0 {
                    return false;
                }
            }
        }
        true
    }
}

fn probe_sup(profile: &Profile) -> f64 {
    let r = profile.support_radius();
    let mut sup = 0.0f64;
    for i in 0..4096 {
        let s = (i as f64 + 0.5) / 4096.0 * r;
        sup = sup.max(profile.radial_value(s).abs());
    }
    if let Profile::ConvexIndicator { .. } = profile {
        sup = 1.0;
    }
    sup
}

/// Probability measure for the i.i.d. random parameters ω_j.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "measure", rename_all = "snake_case")]
pub enum Measure {
    Uniform { lo: f64, hi: f64 },
    PointMass { value: f64 },
    /// Piecewise-constant density over [lo, hi] with a declared sup bound.
    TableDensity { lo: f64, hi: f64, weights: Vec<f64>, bound: f64 },
}

impl Measure {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.support();
        if !(0.0..1.0).contains(&lo) || !(0.0..1.0).contains(&hi) || hi < lo {
            return Err(Error::Data(format!("measure support [{lo}, {hi}] must sit inside [0,1)")));
        }
        if let Measure::TableDensity { weights, bound, .. } = self {
            if weights.is_empty() || weights.iter().any(|w| *w < 0.0) || !(*bound > 0.0) {
                return Err(Error::Data("table density needs nonnegative weights and a positive bound".into()));
            }
        }
        Ok(())
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Measure::Uniform { lo, hi } => (*lo, *hi),
            Measure::PointMass { value } => (*value, *value),
            Measure::TableDensity { lo, hi, .. } => (*lo, *hi),
        }
    }

    /// Sup bound of the density; infinite for point masses.
    pub fn density_bound(&self) -> f64 {
        match self {
            Measure::Uniform { lo, hi } => {
                if hi > lo {
                    1.0 / (hi - lo)
                } else {
                    f64::INFINITY
                }
            }
            Measure::PointMass { .. } => f64::INFINITY,
            Measure::TableDensity { bound, .. } => *bound,
        }
    }

    pub fn sample(&self, rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
        match self {
            Measure::Uniform { lo, hi } => {
                if hi > lo {
                    rng.gen_range(*lo..*hi)
                } else {
                    *lo
                }
            }
            Measure::PointMass { value } => *value,
            Measure::TableDensity { lo, hi, weights, .. } => {
                let total: f64 = weights.iter().sum();
                let mut u = rng.gen_range(0.0..total);
                let bin_w = (hi - lo) / weights.len() as f64;
                for (i, w) in weights.iter().enumerate() {
                    if u < *w {
                        let frac = if *w > 0.0 { u / w } else { 0.0 };
                        return lo + (i as f64 + frac) * bin_w;
                    }
                    u -= w;
                }
                *hi
            }
        }
    }
}

/// Site set carrying the potential bumps.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "lattice", rename_all = "snake_case")]
pub enum Lattice {
    /// Z^d sites whose bump support can meet the box.
    Integer,
    Delone(DeloneSet),
}

impl Lattice {
    /// Uniform-discreteness scale G1.
    pub fn g1(&self) -> f64 {
        match self {
            Lattice::Integer => 1.0,
            Lattice::Delone(set) => set.g1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RandomFieldConfig {
    pub lattice: Lattice,
    pub family: BreatherFamily,
    pub measure: Measure,
    pub seed: u64,
}

impl RandomFieldConfig {
    /// ‖V_ω‖_∞ ≤ K_u = u_max·⌈G_u/G1⌉^d.
    pub fn k_u(&self, d: usize) -> f64 {
        self.family.u_max * (self.family.g_u / self.lattice.g1()).ceil().powi(d as i32)
    }

    /// Sites j with supp u_t(· − j) possibly meeting Λ_L, with stable ordering.
    pub fn sites(&self, d: usize, side: f64) -> Vec<Vec<f64>> {
        let reach = (side + self.family.g_u) / 2.0;
        match &self.lattice {
            Lattice::Integer => {
                let hi = (reach - 1e-12).floor() as i64;
                let mut sites = vec![vec![]];
                for _ in 0..d {
                    let mut next = Vec::new();
                    for base in &sites {
                        for q in -hi..=hi {
                            let mut s: Vec<f64> = base.clone();
                            s.push(q as f64);
                            next.push(s);
                        }
                    }
                    sites = next;
                }
                sites
            }
            Lattice::Delone(set) => set
                .points
                .iter()
                .filter(|p| p.iter().all(|&c| c.abs() < reach))
                .cloned()
                .collect(),
        }
    }

    /// ω per site for one trial; site seeds derive from (trial seed, site).
    pub fn draw_omegas(&self, d: usize, side: f64, trial_seed: u64) -> Vec<f64> {
        self.sites(d, side)
            .iter()
            .enumerate()
            .map(|(idx, site)| {
                let key = match &self.lattice {
                    Lattice::Integer => {
                        let q: Vec<i64> = site.iter().map(|&c| c.round() as i64).collect();
                        seeding::mix_multi(trial_seed, &q)
                    }
                    Lattice::Delone(_) => seeding::mix(trial_seed, idx as u64),
                };
                self.measure.sample(&mut seeding::rng_from(key))
            })
            .collect()
    }
}

/// V_ω(x) = Σ_j u_{ω_j}(x − j) sampled at grid nodes; verifies the K_u bound.
pub fn assemble_random_potential(
    cfg: &RandomFieldConfig,
    omegas: &[f64],
    grid: &GridSpec,
) -> Result<PotentialField> {
    let sites = cfg.sites(grid.d, grid.side);
    if sites.len() != omegas.len() {
        return Err(Error::Config(format!(
            "{} omega values for {} sites",
            omegas.len(),
            sites.len()
        )));
    }
    if let Some(bad) = omegas.iter().find(|w| !(0.0..=1.0).contains(*w)) {
        return Err(Error::Data(format!("omega {bad} outside [0,1]")));
    }
    let half_supp = cfg.family.g_u / 2.0;
    let mut values = vec![0.0; grid.node_count()];
    for i in 0..grid.node_count() {
        let x = grid.node_coords(i);
        let mut total = 0.0;
        for (site, &w) in sites.iter().zip(omegas) {
            if x.iter().zip(site).all(|(xi, si)| (xi - si).abs() < half_supp) {
                let rel: Vec<f64> = x.iter().zip(site).map(|(xi, si)| xi - si).collect();
                total += cfg.family.eval(w, &rel);
            }
        }
        values[i] = total;
    }
    let field = PotentialField::from_values(grid, values)?;
    let ku = cfg.k_u(grid.d);
    if field.sup_norm > ku + 1e-9 {
        return Err(Error::Data(format!(
            "assembled potential sup {} exceeds K_u = {ku}",
            field.sup_norm
        )));
    }
    Ok(field)
}

// ---------------------------------------------------------------------------
// Condition (A)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionAConfig {
    pub t_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    /// Probe lattice points per axis over Λ_{G_u}.
    pub probes_per_axis: usize,
    pub dimension: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionAWitness {
    pub t: f64,
    pub delta: f64,
    pub center: Vec<f64>,
    pub radius: f64,
    /// Floor value of u_{t+δ} − u_t over the witness ball.
    pub floor: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionAReport {
    pub holds: bool,
    pub witnesses: Vec<ConditionAWitness>,
    /// Fitted exponents from the per-δ worst case over t.
    pub alpha2: f64,
    pub beta2: f64,
    /// Minimum observed constants (never extrapolated).
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha_fit_residual: f64,
    pub beta_fit_residual: f64,
    /// (δ, worst floor over t, worst radius over t).
    pub per_delta: Vec<(f64, f64, f64)>,
}

/// Largest robust ball for g = u_{t+δ} − u_t: maximizes radius × floor over
/// probe-point centers, then reports the achieved floor as the threshold.
fn best_ball(probe: &[(Vec<f64>, f64)], spacing: f64) -> Option<(Vec<f64>, f64, f64)> {
    let positive: Vec<usize> =
        (0..probe.len()).filter(|&i| probe[i].1 > 1e-12).collect();
    if positive.is_empty() {
        return None;
    }
    // subsample candidate centers, always keeping the max-value probe
    let stride = (positive.len() / 512).max(1);
    let mut centers: Vec<usize> = positive.iter().copied().step_by(stride).collect();
    let best_probe = *positive
        .iter()
        .max_by(|&&a, &&b| probe[a].1.partial_cmp(&probe[b].1).unwrap())
        .unwrap();
    if !centers.contains(&best_probe) {
        centers.push(best_probe);
    }

    // bucket probes by distance from the candidate center; walking the
    // buckets outward keeps the scan linear in the probe count
    let dim = probe.first().map(|(x, _)| x.len()).unwrap_or(1);
    let max_dist = spacing * (probe.len() as f64).powf(1.0 / dim as f64) * (dim as f64).sqrt() * 1.01;
    let bin_width = 0.5 * spacing;
    let n_bins = (max_dist / bin_width).ceil() as usize + 2;

    let mut best: Option<(Vec<f64>, f64, f64, f64)> = None; // center, radius, floor, objective
    let mut bin_min = vec![f64::INFINITY; n_bins];
    let mut bin_far = vec![0.0f64; n_bins];
    for &c in &centers {
        let (cx, _) = &probe[c];
        bin_min.fill(f64::INFINITY);
        bin_far.fill(0.0);
        for (x, v) in probe {
            let d2: f64 = x.iter().zip(cx).map(|(a, b)| (a - b) * (a - b)).sum();
            let dist = d2.sqrt();
            let bin = ((dist / bin_width) as usize).min(n_bins - 1);
            if *v < bin_min[bin] {
                bin_min[bin] = *v;
            }
            if dist > bin_far[bin] {
                bin_far[bin] = dist;
            }
        }
        let mut running_min = f64::INFINITY;
        for bin in 0..n_bins {
            if bin_min[bin] == f64::INFINITY {
                continue;
            }
            running_min = running_min.min(bin_min[bin]);
            if running_min <= 1e-12 {
                break;
            }
            // certified radius: the farthest probe known to satisfy the floor
            let r = bin_far[bin].max(0.5 * spacing);
            let obj = r * running_min;
            if best.as_ref().map_or(true, |b| obj > b.3) {
                best = Some((cx.clone(), r, running_min, obj));
            }
        }
    }
    best.map(|(c, r, f, _)| (c, r, f))
}

pub fn check_condition_a(family: &BreatherFamily, cfg: &ConditionAConfig) -> Result<ConditionAReport> {
    let d = cfg.dimension;
    let g_u = family.g_u;
    let p = cfg.probes_per_axis;
    if p < 4 {
        return Err(Error::Config("need at least 4 probes per axis".into()));
    }
    let spacing = g_u / p as f64;
    let delta_min = cfg.delta_grid.iter().copied().fold(f64::INFINITY, f64::min);
    if let Some(params) = &family.params {
        let needed = params.beta1 * delta_min.powf(params.beta2) / 4.0;
        if spacing > needed {
            return Err(Error::Resolution(format!(
                "probe spacing {spacing:.3e} too coarse; need <= beta1*delta_min^beta2/4 = {needed:.3e}"
            )));
        }
    }

    // probe lattice over Λ_{G_u}
    let mut points: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for base in &points {
            for i in 0..p {
                let mut x = base.clone();
                x.push(-g_u / 2.0 + (i as f64 + 0.5) * spacing);
                next.push(x);
            }
        }
        points = next;
    }

    let mut holds = true;
    let mut witnesses = Vec::new();
    let mut per_delta = Vec::new();
    for &delta in &cfg.delta_grid {
        let mut worst_floor = f64::INFINITY;
        let mut worst_radius = f64::INFINITY;
        let mut any = false;
        for &t in &cfg.t_grid {
            if t + delta > 1.0 + 1e-12 {
                continue;
            }
            any = true;
            let probe: Vec<(Vec<f64>, f64)> = points
                .iter()
                .map(|x| (x.clone(), family.eval(t + delta, x) - family.eval(t, x)))
                .collect();
            match best_ball(&probe, spacing) {
                Some((center, radius, floor)) => {
                    worst_floor = worst_floor.min(floor);
                    worst_radius = worst_radius.min(radius);
                    witnesses.push(ConditionAWitness { t, delta, center, radius, floor });
                }
                None => {
                    holds = false;
                }
            }
        }
        if any && worst_floor.is_finite() {
            per_delta.push((delta, worst_floor, worst_radius));
        }
    }
    if per_delta.is_empty() {
        holds = false;
    }

    let (alpha2, beta2, ares, bres) = if per_delta.len() >= 2 {
        let xs: Vec<f64> = per_delta.iter().map(|(d, _, _)| d.ln()).collect();
        let yf: Vec<f64> = per_delta.iter().map(|(_, f, _)| f.max(1e-300).ln()).collect();
        let yr: Vec<f64> = per_delta.iter().map(|(_, _, r)| r.max(1e-300).ln()).collect();
        let (a2, _, ar) = line_fit(&xs, &yf);
        let (b2, _, br) = line_fit(&xs, &yr);
        (a2, b2, ar, br)
    } else {
        (0.0, 0.0, 0.0, 0.0)
    };
    // floors: minimum observed constants at the fitted exponents
    let alpha1 = per_delta
        .iter()
        .map(|(d, f, _)| f / d.powf(alpha2))
        .fold(f64::INFINITY, f64::min);
    let beta1 = per_delta
        .iter()
        .map(|(d, _, r)| r / d.powf(beta2))
        .fold(f64::INFINITY, f64::min);

    Ok(ConditionAReport {
        holds,
        witnesses,
        alpha2,
        beta2,
        alpha1: if alpha1.is_finite() { alpha1 } else { 0.0 },
        beta1: if beta1.is_finite() { beta1 } else { 0.0 },
        alpha_fit_residual: ares,
        beta_fit_residual: bres,
        per_delta,
    })
}

// ---------------------------------------------------------------------------
// Profile classifiers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub b: bool,
    pub c: bool,
    pub d: bool,
    pub e: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    /// Differentiation step relative to the support radius.
    pub h_rel: f64,
    /// Jump tolerance relative to u_max.
    pub jump_rel: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { h_rel: 1e-4, jump_rel: 1e-6 }
    }
}

/// Flags for the dilation-family conditions (B)–(E).
pub fn classify_profile(profile: &Profile, opts: ClassifyOptions) -> Result<ClassifyReport> {
    let mut notes = Vec::new();
    let b = match profile {
        Profile::BallIndicator { .. } => true,
        Profile::ConvexIndicator { .. } => true,
        _ => false,
    };
    if !profile.is_radial() {
        if b {
            return Ok(ClassifyReport { b, c: false, d: false, e: false, notes });
        }
        return Err(Error::UnsupportedShape(
            "non-radial profile without a convexity certificate".into(),
        ));
    }

    let r_sup = profile.support_radius();
    let u_max = probe_sup(profile);
    let h = opts.h_rel * r_sup;
    let jump_tol = opts.jump_rel * u_max.max(1e-300);

    // locate jumps: scan consecutive probes, refine candidates by bisection
    // until the two-sided value change either persists (a jump) or vanishes
    // with the interval (a steep slope)
    let mut jumps: Vec<f64> = Vec::new();
    let step = h;
    let mut s_prev = step;
    let mut v_prev = profile.radial_value(s_prev);
    let mut s = s_prev + step;
    while s <= r_sup * 1.05 {
        let v = profile.radial_value(s);
        if (v - v_prev).abs() > jump_tol {
            let (mut a, mut bb) = (s_prev, s);
            while bb - a > 1e-12 * r_sup {
                let mid = 0.5 * (a + bb);
                let vm = profile.radial_value(mid);
                if (profile.radial_value(bb) - vm).abs() >= (vm - profile.radial_value(a)).abs() {
                    a = mid;
                } else {
                    bb = mid;
                }
            }
            let jump = (profile.radial_value(bb) - profile.radial_value(a)).abs();
            if jump > jump_tol && a > 10.0 * h {
                jumps.push(0.5 * (a + bb));
                notes.push(format!("jump of {:.3e} near s = {:.6}", jump, 0.5 * (a + bb)));
            }
        }
        s_prev = s;
        v_prev = v;
        s += step;
    }
    let d_flag = !jumps.is_empty();

    // central differences away from detected jumps
    let mut c = false;
    let mut e = false;
    let n = 2000;
    for i in 1..n {
        let s = i as f64 / n as f64 * (r_sup * 1.05);
        if s <= 2.0 * h || jumps.iter().any(|j| (s - j).abs() < 4.0 * h) {
            continue;
        }
        let d1 = (profile.radial_value(s + h) - profile.radial_value(s - h)) / (2.0 * h);
        let d1_half =
            (profile.radial_value(s + h / 2.0) - profile.radial_value(s - h / 2.0)) / h;
        // derivative estimates must agree, otherwise the point is not smooth
        if (d1 - d1_half).abs() > 0.5 * d1.abs().max(d1_half.abs()).max(1e-12) {
            continue;
        }
        let val = profile.radial_value(s);
        if val > 1e-8 * u_max && d1 < -1e-6 * u_max / r_sup {
            c = true;
        }
        if val < -1e-8 * u_max && d1 > 1e-6 * u_max / r_sup {
            e = true;
        }
    }
    Ok(ClassifyReport { b, c, d: d_flag, e, notes })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FgConfig {
    pub shells: usize,
    pub probes_per_shell: usize,
}

impl Default for FgConfig {
    fn default() -> Self {
        FgConfig { shells: 5, probes_per_shell: 64 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FgReport {
    /// Sup of |(x, Hess u x)/(x·∇u)| per shrinking shell at the support edge.
    pub f_shell_sup: Vec<f64>,
    pub f_strictly_increasing: bool,
    /// Largest ε₀ with −x·∇u − ε₀u ≥ 0 on probes (inf of the ratio).
    pub g_epsilon0: f64,
    /// Log-log slope of u near the origin (negative means singular growth).
    pub g_origin_slope: f64,
    pub skipped_probes: usize,
}

/// Negative results for the earlier conditions (F) and (G).
pub fn check_fg(profile: &Profile, cfg: &FgConfig) -> Result<FgReport> {
    if !profile.is_radial() {
        return Err(Error::UnsupportedShape("(F)/(G) probes need a radial profile".into()));
    }
    let r_sup = profile.support_radius();
    let mut skipped = 0usize;

    // (F): shells [R(1−2^{−l}), R(1−2^{−l−1})]
    let mut f_shell_sup = Vec::with_capacity(cfg.shells);
    for l in 1..=cfg.shells {
        let lo = r_sup * (1.0 - 0.5f64.powi(l as i32));
        let hi = r_sup * (1.0 - 0.5f64.powi(l as i32 + 1));
        let mut sup = 0.0f64;
        for i in 0..cfg.probes_per_shell {
            let s = lo + (hi - lo) * (i as f64 + 0.5) / cfg.probes_per_shell as f64;
            match (profile.radial_d1(s), profile.radial_d2(s)) {
                (Some(d1), Some(d2)) if d1.abs() > 1e-300 => {
                    // radial reduction: |(x,Hess x)/(x·∇u)| = |s·u''/u'|
                    sup = sup.max((s * d2 / d1).abs());
                }
                _ => skipped += 1,
            }
        }
        f_shell_sup.push(sup);
    }
    let f_strictly_increasing = f_shell_sup.windows(2).all(|w| w[1] > w[0]);

    // (G): ratio (−s·u')/u over log-spaced probes
    let mut eps0 = f64::INFINITY;
    let probes = 200;
    for i in 0..probes {
        let s = r_sup * 1e-4 * 9990f64.powf(i as f64 / (probes - 1) as f64);
        let u = profile.radial_value(s);
        if u <= 0.0 {
            continue;
        }
        match profile.radial_d1(s) {
            Some(d1) => {
                eps0 = eps0.min(-s * d1 / u);
            }
            None => skipped += 1,
        }
    }
    if !eps0.is_finite() {
        eps0 = 0.0;
    }

    // growth of u near the origin
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..24 {
        let s = r_sup * 1e-6 * (1e3f64).powf(i as f64 / 23.0);
        let u = profile.radial_value(s);
        if u > 0.0 {
            xs.push(s.ln());
            ys.push(u.ln());
        }
    }
    let g_origin_slope = if xs.len() >= 2 { line_fit(&xs, &ys).0 } else { 0.0 };

    Ok(FgReport { f_shell_sup, f_strictly_increasing, g_epsilon0: eps0, g_origin_slope, skipped_probes: skipped })
}
