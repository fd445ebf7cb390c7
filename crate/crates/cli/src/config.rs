//! Flat key-value experiment configuration with section headers.
//!
//! Grammar (line oriented):
//!   file     := line*
//!   line     := blank | comment | section | pair
//!   comment  := '#' .*
//!   section  := '[' name ']'
//!   pair     := key '=' value          (inside a section)
//!   value    := scalar | scalar (',' scalar)*
//!
//! The `[experiment]` section names the kind, master seed, worker count and
//! output directory; one further section, named after the kind, carries the
//! kind-specific parameters. Unknown keys are rejected.

use sfuc_core::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// (section, key, value) in file order.
    pub pairs: Vec<(String, String, String)>,
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub required: bool,
    pub doc: &'static str,
}

const fn req(key: &'static str, doc: &'static str) -> KeySpec {
    KeySpec { key, required: true, doc }
}
const fn opt(key: &'static str, doc: &'static str) -> KeySpec {
    KeySpec { key, required: false, doc }
}

pub const EXPERIMENT_SCHEMA: &[KeySpec] = &[
    req("kind", "experiment kind: ucp | lifting | wegner | initial-scale | heat-obs | conditions | ghost | weights | fit-exponent"),
    req("seed", "master seed; all randomness derives from it"),
    opt("workers", "worker pool size (env SFUC_LAB_WORKERS overrides)"),
    opt("output_dir", "directory for report files (default .)"),
];

pub const UCP_SCHEMA: &[KeySpec] = &[
    req("d", "dimension 1..3"),
    req("bc", "dirichlet | neumann | periodic"),
    req("m", "nodes per unit length"),
    req("G", "cell size"),
    req("delta", "ball radius"),
    req("b", "spectral threshold"),
    req("potential", "zero | constant:<v> | sin2well:<amp> | cosine:<amp>"),
    req("mode", "centered | uniform_random"),
    req("L", "comma list of box sides"),
    opt("ratio_floor", "scale-freeness floor for min/max over L (default 0.5)"),
    opt("N", "exponent for the closed-form constant comparison"),
    opt("t", "diffusion coefficient of -t*Laplace + V (default 1)"),
    opt("tol", "eigensolver tolerance (default 1e-8)"),
];

pub const FIT_EXPONENT_SCHEMA: &[KeySpec] = &[
    req("d", "dimension"),
    req("bc", "boundary condition"),
    req("m", "nodes per unit length"),
    req("G", "cell size"),
    req("b", "spectral threshold"),
    req("potential", "background potential"),
    req("mode", "sequence mode"),
    req("L", "box side (single value)"),
    req("delta", "comma list of ball radii (>= 4)"),
    opt("tol", "eigensolver tolerance"),
];

pub const LIFTING_SCHEMA: &[KeySpec] = &[
    req("d", "dimension"),
    req("bc", "boundary condition"),
    req("m", "nodes per unit length"),
    req("L", "box side"),
    req("G", "cell size"),
    req("delta", "ball radius"),
    req("mode", "sequence mode"),
    req("alpha", "bump height on the sampling set"),
    req("b", "eigenvalue comparison threshold"),
    req("a_potential", "background potential A"),
    opt("b_kind", "perturbation shape: mask_indicator | constant (default mask_indicator)"),
    opt("N", "exponent for the closed-form floor comparison"),
    opt("tol", "eigensolver tolerance"),
];

pub const WEGNER_SCHEMA: &[KeySpec] = &[
    req("d", "dimension"),
    req("L", "box side"),
    req("m", "nodes per unit length"),
    req("E", "window center"),
    req("eps", "comma list of window half-widths (>= 4 for the fit)"),
    req("trials", "Monte-Carlo trials"),
    req("measure_lo", "lower end of the uniform omega measure"),
    req("measure_hi", "upper end of the uniform omega measure"),
    opt("lattice", "integer | delone (default integer)"),
    opt("delone_points", "semicolon list of site coordinates, e.g. 0;0.9;2.1"),
    opt("delone_g1", "uniform discreteness scale for the delone lattice"),
    opt("delone_g2", "relative denseness scale for the delone lattice"),
    opt("delone_pitch", "probe pitch of the delone verification"),
    opt("bound_c", "constant C of the printed bound row"),
    opt("bound_kappa", "exponent kappa of the printed bound row"),
    opt("e0", "energy anchor of eps_max for the standard model"),
    opt("N", "exponent for eps_max and the surrogate kappa"),
    opt("delta_eval", "evaluation point of the surrogate kappa"),
    opt("alpha1", "condition-(A) constant alpha1 (default standard ball)"),
    opt("alpha2", "condition-(A) exponent alpha2"),
    opt("beta1", "condition-(A) constant beta1"),
    opt("beta2", "condition-(A) exponent beta2"),
    opt("tol", "eigensolver tolerance"),
];

pub const INITIAL_SCALE_SCHEMA: &[KeySpec] = &[
    req("d", "dimension"),
    req("m", "nodes per unit length"),
    req("L", "comma list of box sides"),
    req("trials", "Monte-Carlo trials per side"),
    req("measure_lo", "lower end of the uniform omega measure"),
    req("measure_hi", "upper end of the uniform omega measure"),
    opt("tol", "eigensolver tolerance"),
];

pub const HEAT_OBS_SCHEMA: &[KeySpec] = &[
    req("d", "dimension"),
    opt("bc", "boundary condition (default dirichlet)"),
    req("m", "nodes per unit length"),
    req("L", "box side"),
    req("G", "cell size"),
    req("delta", "ball radius"),
    req("potential", "background potential"),
    req("mode", "sequence mode"),
    req("T", "comma list of observation times"),
    req("N", "exponent of the closed-form cost bound"),
    opt("ridge", "absolute Gramian ridge (default 1e-12*trace/k)"),
    opt("lambda", "threshold of the spectral-inequality side check (default b_trunc)"),
    opt("duality_T", "observation time of the duality check (default smallest T)"),
    opt("tol", "eigensolver tolerance"),
];

pub const CONDITIONS_SCHEMA: &[KeySpec] = &[
    req("profile", "profile description: `radial <hat|bump|invsqrt|table> params` or `indicator ball <r>` or `indicator convex <certificate>`"),
    req("family", "standard | dilation | alloy"),
    req("t_grid", "comma list of dilation parameters"),
    req("delta_grid", "comma list of increments"),
    req("probes", "probe points per axis"),
    opt("dimension", "ambient dimension of the probes (default 1)"),
    opt("h_rel", "classifier differentiation step relative to the support"),
    opt("jump_rel", "classifier jump tolerance relative to u_max"),
    opt("fg_shells", "number of shrinking shells for the (F) probe"),
    opt("fg_probes", "probes per shell for the (F) probe"),
];

pub const GHOST_SCHEMA: &[KeySpec] = &[
    req("d", "dimension"),
    req("bc", "boundary condition"),
    req("m", "nodes per unit length"),
    req("L", "box side"),
    req("potential", "background potential"),
    req("b", "spectral truncation threshold"),
    req("T", "ghost-variable half-width"),
    req("vectors", "number of random coefficient vectors"),
    opt("slack", "sandwich slack factor (default 1.05)"),
    opt("h_t", "ghost-variable step (default T/128)"),
    opt("R", "odd extension factor exercised by the reflection check (default 3)"),
    opt("tol", "eigensolver tolerance"),
];

pub const WEIGHTS_SCHEMA: &[KeySpec] = &[
    req("psi_r", "comma list of half-ball radii for the weight-form check"),
    opt("psi_d", "spatial dimension of the weight-form check (default 1)"),
    opt("psi_samples", "constraint-set samples (default 50000)"),
    opt("rho", "weight scale of the bounds check (default 1)"),
    opt("bound_samples", "samples of the weight bounds check (default 1000)"),
    req("hyperbola_delta", "comma list of deltas for the hyperbola distance"),
];

pub const KINDS: &[&str] = &[
    "ucp",
    "lifting",
    "wegner",
    "initial-scale",
    "heat-obs",
    "conditions",
    "ghost",
    "weights",
    "fit-exponent",
];

/// Human-readable key listing for diagnostics.
pub fn describe_kind(kind: &str) -> Option<String> {
    let schema = kind_schema(kind)?;
    let mut s = format!("keys of [{kind}]:\n");
    for k in schema {
        let tag = if k.required { "required" } else { "optional" };
        s.push_str(&format!("  {:<16} ({tag}) {}\n", k.key, k.doc));
    }
    Some(s)
}

pub fn kind_schema(kind: &str) -> Option<&'static [KeySpec]> {
    match kind {
        "ucp" => Some(UCP_SCHEMA),
        "lifting" => Some(LIFTING_SCHEMA),
        "wegner" => Some(WEGNER_SCHEMA),
        "initial-scale" => Some(INITIAL_SCALE_SCHEMA),
        "heat-obs" => Some(HEAT_OBS_SCHEMA),
        "conditions" => Some(CONDITIONS_SCHEMA),
        "ghost" => Some(GHOST_SCHEMA),
        "weights" => Some(WEIGHTS_SCHEMA),
        "fit-exponent" => Some(FIT_EXPONENT_SCHEMA),
        _ => None,
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut pairs = Vec::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `key = value`, got `{line}`", lineno + 1))
            })?;
            if section.is_empty() {
                return Err(Error::Parse(format!(
                    "line {}: key `{}` outside any [section]",
                    lineno + 1,
                    key.trim()
                )));
            }
            pairs.push((section.clone(), key.trim().to_string(), value.trim().to_string()));
        }
        Ok(ExperimentConfig { pairs })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut sections: Vec<&str> = Vec::new();
        for (s, _, _) in &self.pairs {
            if !sections.contains(&s.as_str()) {
                sections.push(s);
            }
        }
        for section in sections {
            out.push_str(&format!("[{section}]\n"));
            for (s, k, v) in &self.pairs {
                if s == section {
                    out.push_str(&format!("{k} = {v}\n"));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(s, k, _)| s == section && k == key)
            .map(|(_, _, v)| v.as_str())
    }

    pub fn require(&self, section: &str, key: &str) -> Result<&str> {
        self.get(section, key)
            .ok_or_else(|| Error::Config(format!("missing required key `{key}` in [{section}]")))
    }

    pub fn f64_of(&self, section: &str, key: &str) -> Result<f64> {
        self.require(section, key)?
            .parse()
            .map_err(|_| Error::Parse(format!("[{section}] {key}: not a number")))
    }

    pub fn f64_opt(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        match self.get(section, key) {
            Some(v) => v.parse().map_err(|_| Error::Parse(format!("[{section}] {key}: not a number"))),
            None => Ok(default),
        }
    }

    pub fn f64_maybe(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.get(section, key) {
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Parse(format!("[{section}] {key}: not a number"))),
            None => Ok(None),
        }
    }

    pub fn usize_of(&self, section: &str, key: &str) -> Result<usize> {
        self.require(section, key)?
            .parse()
            .map_err(|_| Error::Parse(format!("[{section}] {key}: not an integer")))
    }

    pub fn usize_opt(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        match self.get(section, key) {
            Some(v) => v.parse().map_err(|_| Error::Parse(format!("[{section}] {key}: not an integer"))),
            None => Ok(default),
        }
    }

    pub fn list_f64(&self, section: &str, key: &str) -> Result<Vec<f64>> {
        self.require(section, key)?
            .split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("[{section}] {key}: bad list entry `{t}`")))
            })
            .collect()
    }

    pub fn kind(&self) -> Result<&str> {
        self.require("experiment", "kind")
    }

    pub fn seed(&self) -> Result<u64> {
        self.require("experiment", "seed")?
            .parse()
            .map_err(|_| Error::Parse("[experiment] seed: not an integer".into()))
    }

    /// Schema validation: known kind, required keys present, unknown rejected.
    pub fn validate(&self) -> Result<()> {
        let kind = self.kind()?.to_string();
        let schema = kind_schema(&kind)
            .ok_or_else(|| Error::Config(format!("unknown experiment kind `{kind}` (known: {KINDS:?})")))?;
        for spec in EXPERIMENT_SCHEMA.iter().filter(|s| s.required) {
            self.require("experiment", spec.key)?;
        }
        for spec in schema.iter().filter(|s| s.required) {
            self.require(&kind, spec.key)?;
        }
        for (section, key, _) in &self.pairs {
            let known = if section == "experiment" {
                EXPERIMENT_SCHEMA.iter().any(|s| s.key == key)
            } else if section == &kind {
                schema.iter().any(|s| s.key == key)
            } else {
                false
            };
            if !known {
                return Err(Error::Config(format!("unknown key `{key}` in [{section}]")));
            }
        }
        let _ = self.seed()?;
        Ok(())
    }
}
