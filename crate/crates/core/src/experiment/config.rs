//! Sectioned `key = value` experiment configuration.
//!
//! ```text
//! [system]
//! mass = 1
//! hbar = 1
//! tau = contraction        # or a positive number
//!
//! [model]
//! kind = contractive       # or von_neumann
//! xi = 1.4142135623730951  # or mu_re, mu_im, nu_re, nu_im
//! omega = 1
//!
//! [prior]
//! kind = tcs               # or file (path = ..., relative to the config)
//! x0 = 0
//!
//! [grid]
//! x_min = -40
//! x_max = 40
//! n = 4096
//!
//! [run]
//! trials = 0
//! seed = 1
//! readout_bins = 0
//! ```
//!
//! Comments start with `#` or `;`. Unknown sections and keys are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridState};
use crate::models::{ContractiveGLModel, MeasurementModel, VonNeumannModel};
use crate::tcs::TcsParams;

/// Waiting time between the two measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauSpec {
    Fixed(f64),
    /// The contraction time of the contractive model's posterior shape.
    ContractionTime,
}

/// Shape of a twisted coherent state, either by `ξ` along the canonical
/// family or by explicit `μ, ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeSpec {
    Xi(f64),
    MuNu(Complex64, Complex64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Contractive { shape: ShapeSpec, omega: f64 },
    VonNeumann { delta_q: f64, offset: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PriorSpec {
    Tcs { shape: ShapeSpec, x0: f64, p0: f64, omega: f64 },
    /// CSV written by [`GridState::write_csv`], sampled on the config grid.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mass: f64,
    pub hbar: f64,
    pub tau: TauSpec,
    pub model: ModelSpec,
    pub prior: PriorSpec,
    pub grid: Grid,
    /// Monte Carlo trials; 0 runs the analytic report only.
    pub trials: u64,
    pub seed: u64,
    /// Number of readout quadrature nodes; 0 uses every grid node.
    pub readout_bins: usize,
}

type Section = BTreeMap<String, (usize, String)>;

struct Raw {
    sections: BTreeMap<String, (usize, Section)>,
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("system", &["mass", "hbar", "tau"]),
    ("model", &["kind", "xi", "mu_re", "mu_im", "nu_re", "nu_im", "omega", "delta_q", "offset"]),
    ("prior", &["kind", "xi", "mu_re", "mu_im", "nu_re", "nu_im", "omega", "x0", "p0", "path"]),
    ("grid", &["x_min", "x_max", "n"]),
    ("run", &["trials", "seed", "readout_bins"]),
];

impl Raw {
    fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, (usize, Section)> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split(['#', ';']).next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .map(str::trim)
                    .ok_or_else(|| Error::parse(line, format!("malformed section header `{content}`")))?;
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(Error::parse(line, format!("unknown section [{name}]")));
                }
                if sections.contains_key(name) {
                    return Err(Error::parse(line, format!("section [{name}] appears twice")));
                }
                sections.insert(name.to_string(), (line, Section::new()));
                current = Some(name.to_string());
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::parse(line, format!("expected `key = value`, found `{content}`")))?;
            let section = current.as_ref().ok_or_else(|| Error::parse(line, "key outside of any section"))?;
            let allowed = SCHEMA.iter().find(|(s, _)| s == section).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&key) {
                return Err(Error::parse(line, format!("unknown key `{key}` in [{section}]")));
            }
            if value.is_empty() {
                return Err(Error::parse(line, format!("missing value for `{key}`")));
            }
            let entries = &mut sections.get_mut(section).expect("section registered").1;
            if entries.insert(key.to_string(), (line, value.to_string())).is_some() {
                return Err(Error::parse(line, format!("duplicate key `{key}`")));
            }
        }
        Ok(Self { sections })
    }

    fn section(&self, name: &str) -> Option<&Section> {
        self.sections.get(name).map(|(_, s)| s)
    }

    fn get(&self, section: &str, key: &str) -> Option<&(usize, String)> {
        self.section(section).and_then(|s| s.get(key))
    }

    fn number(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.get(section, key)
            .map(|(line, v)| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::parse(*line, format!("`{key}` must be a finite number, found `{v}`")))
            })
            .transpose()
    }

    fn positive(&self, section: &str, key: &str, default: Option<f64>) -> Result<f64> {
        match (self.number(section, key)?, default) {
            (Some(x), _) if x > 0.0 => Ok(x),
            (Some(_), _) => {
                let line = self.get(section, key).map_or(0, |(l, _)| *l);
                Err(Error::parse(line, format!("`{key}` must be positive")))
            }
            (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::Config(format!("missing required key `{key}` in [{section}]"))),
        }
    }

    fn integer<T: std::str::FromStr>(&self, section: &str, key: &str, default: T) -> Result<T> {
        match self.get(section, key) {
            Some((line, v)) => {
                v.parse().map_err(|_| Error::parse(*line, format!("`{key}` must be a non-negative integer, found `{v}`")))
            }
            None => Ok(default),
        }
    }

    fn shape(&self, section: &str) -> Result<ShapeSpec> {
        let xi = self.number(section, "xi")?;
        let parts = ["mu_re", "mu_im", "nu_re", "nu_im"].map(|k| self.number(section, k));
        let [mr, mi, nr, ni] = parts;
        let (mr, mi, nr, ni) = (mr?, mi?, nr?, ni?);
        let explicit = mr.is_some() || mi.is_some() || nr.is_some() || ni.is_some();
        match (xi, explicit) {
            (Some(_), true) => {
                let line = self.get(section, "xi").map_or(0, |(l, _)| *l);
                Err(Error::parse(line, format!("[{section}] sets both `xi` and explicit mu/nu")))
            }
            (Some(x), false) => Ok(ShapeSpec::Xi(x)),
            (None, true) => Ok(ShapeSpec::MuNu(
                Complex64::new(mr.unwrap_or(1.0), mi.unwrap_or(0.0)),
                Complex64::new(nr.unwrap_or(0.0), ni.unwrap_or(0.0)),
            )),
            (None, false) => Ok(ShapeSpec::MuNu(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))),
        }
    }

    fn kind(&self, section: &str, default: Option<&str>) -> Result<(usize, String)> {
        match (self.get(section, "kind"), default) {
            (Some(kv), _) => Ok(kv.clone()),
            (None, Some(d)) => Ok((0, d.to_string())),
            (None, None) => Err(Error::Config(format!("missing required key `kind` in [{section}]"))),
        }
    }
}

impl ShapeSpec {
    pub fn build(&self, omega: f64, mass: f64, hbar: f64) -> Result<TcsParams> {
        match *self {
            ShapeSpec::Xi(xi) => TcsParams::from_xi(xi, omega, mass, hbar),
            ShapeSpec::MuNu(mu, nu) => TcsParams::new(mu, nu, 0.0, 0.0, omega, mass, hbar),
        }
    }

    fn write(&self, out: &mut String) {
        match self {
            ShapeSpec::Xi(xi) => writeln!(out, "xi = {xi:?}"),
            ShapeSpec::MuNu(mu, nu) => {
                writeln!(out, "mu_re = {:?}\nmu_im = {:?}\nnu_re = {:?}\nnu_im = {:?}", mu.re, mu.im, nu.re, nu.im)
            }
        }
        .expect("writing to a String cannot fail");
    }
}

impl ExperimentConfig {
    /// Parses config text; relative prior paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let raw = Raw::parse(text)?;
        let mass = raw.positive("system", "mass", Some(1.0))?;
        let hbar = raw.positive("system", "hbar", Some(1.0))?;
        let tau = match raw.get("system", "tau") {
            Some((_, v)) if v == "contraction" => TauSpec::ContractionTime,
            Some(_) => TauSpec::Fixed(raw.positive("system", "tau", None)?),
            None => return Err(Error::Config("missing required key `tau` in [system]".into())),
        };

        let (line, kind) = raw.kind("model", None)?;
        let omega = raw.positive("model", "omega", Some(1.0))?;
        let model = match kind.as_str() {
            "contractive" => {
                for key in ["delta_q", "offset"] {
                    if let Some((l, _)) = raw.get("model", key) {
                        return Err(Error::parse(*l, format!("`{key}` does not apply to a contractive model")));
                    }
                }
                ModelSpec::Contractive { shape: raw.shape("model")?, omega }
            }
            "von_neumann" => {
                for key in ["xi", "mu_re", "mu_im", "nu_re", "nu_im"] {
                    if let Some((l, _)) = raw.get("model", key) {
                        return Err(Error::parse(*l, format!("`{key}` does not apply to a von Neumann model")));
                    }
                }
                ModelSpec::VonNeumann {
                    delta_q: raw.positive("model", "delta_q", None)?,
                    offset: raw.number("model", "offset")?.unwrap_or(0.0),
                }
            }
            other => return Err(Error::parse(line, format!("unknown model kind `{other}`"))),
        };

        let (line, kind) = raw.kind("prior", Some("tcs"))?;
        let prior = match kind.as_str() {
            "tcs" => {
                if let Some((l, _)) = raw.get("prior", "path") {
                    return Err(Error::parse(*l, "`path` only applies to kind = file"));
                }
                PriorSpec::Tcs {
                    shape: raw.shape("prior")?,
                    x0: raw.number("prior", "x0")?.unwrap_or(0.0),
                    p0: raw.number("prior", "p0")?.unwrap_or(0.0),
                    omega: raw.positive("prior", "omega", Some(1.0))?,
                }
            }
            "file" => {
                let (_, path) = raw.get("prior", "path").ok_or_else(|| Error::Config("prior kind = file needs `path`".into()))?;
                let path = PathBuf::from(path);
                PriorSpec::File(match base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path,
                })
            }
            other => return Err(Error::parse(line, format!("unknown prior kind `{other}`"))),
        };

        let grid = if raw.section("grid").is_some() {
            let std = Grid::standard();
            let x_min = raw.number("grid", "x_min")?.unwrap_or(std.x_min());
            let x_max = raw.number("grid", "x_max")?.unwrap_or(std.x_max());
            let n = raw.integer("grid", "n", std.len())?;
            Grid::new(x_min, x_max, n).map_err(|e| Error::Config(e.to_string()))?
        } else {
            Grid::standard()
        };

        let trials = raw.integer("run", "trials", 0u64)?;
        if trials > 0 && trials < 100 {
            return Err(Error::Config(format!("Monte Carlo needs at least 100 trials, got {trials}")));
        }
        let readout_bins = raw.integer("run", "readout_bins", 0usize)?;
        if readout_bins != 0 && !(readout_bins.is_power_of_two() && readout_bins <= grid.len()) {
            return Err(Error::Config(format!(
                "readout_bins must be 0 or a power of two not exceeding n = {}, got {readout_bins}",
                grid.len()
            )));
        }
        Ok(Self { mass, hbar, tau, model, prior, grid, trials, seed: raw.integer("run", "seed", 0u64)?, readout_bins })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path.parent())
    }

    /// Canonical text form; parsing it yields an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let tau = match self.tau {
            TauSpec::Fixed(t) => format!("{t:?}"),
            TauSpec::ContractionTime => "contraction".into(),
        };
        let _ = writeln!(s, "[system]\nmass = {:?}\nhbar = {:?}\ntau = {tau}\n\n[model]", self.mass, self.hbar);
        match &self.model {
            ModelSpec::Contractive { shape, omega } => {
                let _ = writeln!(s, "kind = contractive\nomega = {omega:?}");
                shape.write(&mut s);
            }
            ModelSpec::VonNeumann { delta_q, offset } => {
                let _ = writeln!(s, "kind = von_neumann\ndelta_q = {delta_q:?}\noffset = {offset:?}");
            }
        }
        s.push_str("\n[prior]\n");
        match &self.prior {
            PriorSpec::Tcs { shape, x0, p0, omega } => {
                let _ = writeln!(s, "kind = tcs\nx0 = {x0:?}\np0 = {p0:?}\nomega = {omega:?}");
                shape.write(&mut s);
            }
            PriorSpec::File(p) => {
                let _ = writeln!(s, "kind = file\npath = {}", p.display());
            }
        }
        let g = &self.grid;
        let _ = writeln!(
            s,
            "\n[grid]\nx_min = {:?}\nx_max = {:?}\nn = {}\n\n[run]\ntrials = {}\nseed = {}\nreadout_bins = {}",
            g.x_min(),
            g.x_max(),
            g.len(),
            self.trials,
            self.seed,
            self.readout_bins
        );
        s
    }

    pub fn build_model(&self) -> Result<MeasurementModel> {
        Ok(match &self.model {
            ModelSpec::Contractive { shape, omega } => {
                let params = shape.build(*omega, self.mass, self.hbar)?;
                ContractiveGLModel::from_params(params)?.into()
            }
            ModelSpec::VonNeumann { delta_q, offset } => {
                VonNeumannModel::gaussian(self.grid, *delta_q, *offset, self.mass, self.hbar)?.into()
            }
        })
    }

    pub fn build_prior(&self) -> Result<GridState> {
        match &self.prior {
            PriorSpec::Tcs { shape, x0, p0, omega } => {
                let params = shape.build(*omega, self.mass, self.hbar)?.with_center(*x0, *p0);
                GridState::discretize(&params, self.grid)
            }
            PriorSpec::File(path) => {
                let file = fs::File::open(path)
                    .map_err(|e| Error::Config(format!("cannot open prior file {}: {e}", path.display())))?;
                GridState::read_csv(BufReader::new(file), self.grid, self.mass, self.hbar)
            }
        }
    }

    /// The waiting time, resolving `contraction` against the model.
    pub fn resolved_tau(&self) -> Result<f64> {
        match (self.tau, &self.model) {
            (TauSpec::Fixed(t), _) => Ok(t),
            (TauSpec::ContractionTime, ModelSpec::Contractive { shape, omega }) => {
                shape.build(*omega, self.mass, self.hbar)?.contraction_time()
            }
            (TauSpec::ContractionTime, ModelSpec::VonNeumann { .. }) => {
                Err(Error::Config("tau = contraction needs a contractive model".into()))
            }
        }
    }
}
