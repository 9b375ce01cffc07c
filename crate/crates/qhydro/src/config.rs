//! Scenario configuration: sectioned key/value text with sections grid, physics, scenario and output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fields::Grid1D;
use crate::kernel::{Dim, Kernel};
use crate::madelung::Scheme;
use crate::params::PhysicalParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    Madelung,
    Schrodinger,
    Compare,
    Relativistic,
    NonlocalStudy,
    RetardedStudy,
}

impl FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "madelung" => ScenarioKind::Madelung,
            "schrodinger" => ScenarioKind::Schrodinger,
            "compare" => ScenarioKind::Compare,
            "relativistic" => ScenarioKind::Relativistic,
            "nonlocal-study" => ScenarioKind::NonlocalStudy,
            "retarded-study" => ScenarioKind::RetardedStudy,
            other => return Err(Error::UnknownScenario(other.to_string())),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Initial {
    /// Gaussian density with standard deviation sigma, centre x0, wavenumber k0.
    Gaussian,
    /// Harmonic ground state.
    Ground,
    /// Harmonic ground state displaced to x0.
    Coherent,
    /// Unit density with S = hbar k0 x.
    Plane,
    /// Unit background plus a Gaussian bump of the given amplitude.
    Pulse,
    Uniform,
    /// exp of a seeded random band-limited trigonometric polynomial.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialKind {
    None,
    Harmonic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub initial: Initial,
    pub sigma: f64,
    pub x0: f64,
    pub k0: f64,
    pub amplitude: f64,
    pub potential: PotentialKind,
    pub omega: f64,
    pub t_end: f64,
    pub dt: Option<f64>,
    pub scheme: Scheme,
    pub seed: u64,
    pub kernel: Kernel,
    pub kernel_scale: f64,
    /// Bohmian trajectory starting points.
    pub seeds: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub grid: Grid1D,
    pub physics: PhysicalParams,
    pub scenario: ScenarioConfig,
    pub out_dir: Option<PathBuf>,
    pub stride: usize,
    entries: BTreeMap<String, String>,
}

const KEYS: &[&str] = &[
    "grid.n",
    "grid.length",
    "physics.hbar",
    "physics.mass",
    "physics.kT",
    "physics.c",
    "physics.a",
    "physics.rho_floor",
    "scenario.name",
    "scenario.initial",
    "scenario.sigma",
    "scenario.x0",
    "scenario.k0",
    "scenario.amplitude",
    "scenario.potential",
    "scenario.omega",
    "scenario.t_end",
    "scenario.dt",
    "scenario.scheme",
    "scenario.seed",
    "scenario.kernel",
    "scenario.kernel_amp1",
    "scenario.kernel_sigma1",
    "scenario.kernel_amp2",
    "scenario.kernel_sigma2",
    "scenario.kernel_spacing",
    "scenario.kernel_samples",
    "scenario.kernel_scale",
    "scenario.seeds",
    "output.dir",
    "output.stride",
];

/// Collects typed values and the names of keys that fail to parse or validate.
struct Reader<'a> {
    entries: &'a BTreeMap<String, String>,
    bad: Vec<String>,
}

impl Reader<'_> {
    fn get<T: FromStr>(&mut self, key: &str, default: T) -> T {
        match self.entries.get(key) {
            None => default,
            Some(s) => s.trim().parse().unwrap_or_else(|_| {
                self.bad.push(key.to_string());
                default
            }),
        }
    }

    fn opt<T: FromStr>(&mut self, key: &str) -> Option<T> {
        let s = self.entries.get(key)?;
        match s.trim().parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.bad.push(key.to_string());
                None
            }
        }
    }

    fn check(&mut self, key: &str, ok: bool) {
        if !ok && !self.bad.iter().any(|b| b == key) {
            self.bad.push(key.to_string());
        }
    }

    fn list(&mut self, key: &str) -> Vec<f64> {
        let Some(s) = self.entries.get(key) else { return Vec::new() };
        let parsed: std::result::Result<Vec<f64>, _> =
            s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::parse).collect();
        parsed.unwrap_or_else(|_| {
            self.bad.push(key.to_string());
            Vec::new()
        })
    }
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut entries = BTreeMap::new();
        for (section, props) in ini.iter() {
            for (k, v) in props.iter() {
                let key = match section {
                    Some(s) => format!("{s}.{k}"),
                    None => k.to_string(),
                };
                entries.insert(key, v.to_string());
            }
        }
        Self::from_entries(entries)
    }

    /// A copy with one `section.key` replaced, re-validated.
    pub fn with_override(&self, key: &str, value: &str) -> Result<Self> {
        let mut entries = self.entries.clone();
        entries.insert(key.to_string(), value.to_string());
        Self::from_entries(entries)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// SHA-256 over the canonical key=value listing.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.entries {
            h.update(format!("{k}={}\n", v.trim()).as_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    fn from_entries(entries: BTreeMap<String, String>) -> Result<Self> {
        let mut r = Reader { entries: &entries, bad: Vec::new() };
        for k in entries.keys() {
            if !KEYS.contains(&k.as_str()) {
                r.bad.push(k.clone());
            }
        }
        let kind = match entries.get("scenario.name").map(|s| s.trim()) {
            None => {
                r.bad.push("scenario.name".into());
                ScenarioKind::Madelung
            }
            Some(name) => name.parse()?,
        };

        let n: usize = r.get("grid.n", 256);
        let length: f64 = r.get("grid.length", 40.0);
        r.check("grid.n", n >= 8 && n.is_power_of_two());
        r.check("grid.length", length.is_finite() && length > 0.0);

        let mut physics = PhysicalParams {
            hbar: r.get("physics.hbar", 1.0),
            mass: r.get("physics.mass", 1.0),
            kt: r.get("physics.kT", 0.0),
            c: r.get("physics.c", f64::INFINITY),
            a: 0.0,
            rho_floor: r.get("physics.rho_floor", 1e-12),
        };
        let thermal_a = entries.get("physics.a").map(|s| s.trim() == "thermal").unwrap_or(false);
        if !thermal_a {
            physics.a = r.get("physics.a", 0.0);
        }
        for name in physics.invalid_fields() {
            r.check(&format!("physics.{name}"), false);
        }
        if thermal_a {
            match physics.with_thermal_length() {
                Ok(p) => physics = p,
                Err(_) => r.check("physics.a", false),
            }
        }

        let initial = match entries.get("scenario.initial").map(|s| s.trim()).unwrap_or("gaussian") {
            "gaussian" => Initial::Gaussian,
            "ground" => Initial::Ground,
            "coherent" => Initial::Coherent,
            "plane" => Initial::Plane,
            "pulse" => Initial::Pulse,
            "uniform" => Initial::Uniform,
            "random" => Initial::Random,
            _ => {
                r.bad.push("scenario.initial".into());
                Initial::Gaussian
            }
        };
        let potential = match entries.get("scenario.potential").map(|s| s.trim()).unwrap_or("none") {
            "none" => PotentialKind::None,
            "harmonic" => PotentialKind::Harmonic,
            _ => {
                r.bad.push("scenario.potential".into());
                PotentialKind::None
            }
        };
        let scheme = match entries.get("scenario.scheme").map(|s| s.trim()).unwrap_or("spectral") {
            "spectral" => Scheme::Spectral,
            "log-density" => Scheme::LogDensity,
            _ => {
                r.bad.push("scenario.scheme".into());
                Scheme::Spectral
            }
        };
        let sigma: f64 = r.get("scenario.sigma", 1.0);
        r.check("scenario.sigma", sigma.is_finite() && sigma > 0.0);
        let omega: f64 = r.get("scenario.omega", 1.0);
        r.check("scenario.omega", omega.is_finite() && omega > 0.0);
        let t_end: f64 = r.get("scenario.t_end", 1.0);
        r.check("scenario.t_end", t_end.is_finite() && t_end > 0.0);
        let dt: Option<f64> = r.opt("scenario.dt");
        if let Some(dt) = dt {
            r.check("scenario.dt", dt.is_finite() && dt > 0.0);
        }
        let x0: f64 = r.get("scenario.x0", 0.0);
        let k0: f64 = r.get("scenario.k0", 0.0);
        let amplitude: f64 = r.get("scenario.amplitude", 0.1);
        r.check("scenario.x0", x0.is_finite());
        r.check("scenario.k0", k0.is_finite());
        r.check("scenario.amplitude", amplitude.is_finite() && amplitude > -1.0);
        let seed: u64 = r.get("scenario.seed", 0);
        let kernel_scale: f64 = r.get("scenario.kernel_scale", 1.0);
        r.check("scenario.kernel_scale", kernel_scale.is_finite() && kernel_scale > 0.0);
        let kernel = match entries.get("scenario.kernel").map(|s| s.trim()).unwrap_or("diff-gauss") {
            "diff-gauss" => {
                let (a1, s1) = (r.get("scenario.kernel_amp1", 2.0), r.get("scenario.kernel_sigma1", 1.0));
                let (a2, s2) = (r.get("scenario.kernel_amp2", 1.0), r.get("scenario.kernel_sigma2", 2.0));
                Kernel::diff_gauss(a1, s1, a2, s2, Dim::One).ok()
            }
            "tabulated" => {
                let spacing = r.get("scenario.kernel_spacing", 0.0);
                let samples = r.list("scenario.kernel_samples");
                Kernel::tabulated(spacing, samples, Dim::One).ok()
            }
            _ => None,
        };
        r.check("scenario.kernel", kernel.is_some());
        let seeds = r.list("scenario.seeds");
        r.check("scenario.seeds", seeds.iter().all(|s| s.abs() <= 0.5 * length));

        let stride: usize = r.get("output.stride", 10);
        r.check("output.stride", stride >= 1);
        let out_dir = entries.get("output.dir").map(|s| PathBuf::from(s.trim()));

        if matches!(initial, Initial::Ground | Initial::Coherent) {
            r.check("scenario.potential", potential == PotentialKind::Harmonic);
        }
        if kind == ScenarioKind::Relativistic {
            r.check("physics.c", physics.c.is_finite());
        }
        if kind == ScenarioKind::RetardedStudy {
            r.check("physics.c", physics.c.is_finite());
        }
        if matches!(kind, ScenarioKind::NonlocalStudy | ScenarioKind::RetardedStudy) {
            r.check("physics.kT", physics.kt > 0.0);
        }

        if !r.bad.is_empty() {
            let mut bad = r.bad;
            bad.sort();
            bad.dedup();
            return Err(Error::Validation(bad));
        }
        let grid = Grid1D::new(n, length)?;
        Ok(Config {
            grid,
            physics,
            scenario: ScenarioConfig {
                kind,
                initial,
                sigma,
                x0,
                k0,
                amplitude,
                potential,
                omega,
                t_end,
                dt,
                scheme,
                seed,
                kernel: kernel.expect("checked above"),
                kernel_scale,
                seeds,
            },
            out_dir,
            stride,
            entries,
        })
    }
}
