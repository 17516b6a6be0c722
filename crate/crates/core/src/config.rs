//! `key=value` configuration files, command-line overrides and the figure presets.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{DampingModel, MassPairing, Materials};
use crate::scalar::Scalar;
use crate::simulation::RunConfig;
use crate::stepper::InitialPreset;

/// Every key accepted in a config file or as a `key=value` override.
pub const KEYS: &[&str] = &[
    "L",
    "Nx",
    "T",
    "c",
    "rho1",
    "rho2",
    "b",
    "k",
    "damping",
    "mu",
    "pairing",
    "literal_paper",
    "ic",
    "N",
    "amplitude",
    "allow_unstable",
    "snapshots",
];

/// Ordered set of raw `key=value` settings. Later layers win.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses config file text: one `key=value` per line, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Self::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Usage(format!("config line {}: expected key=value, got `{line}`", lineno + 1))
            })?;
            s.set(k.trim(), v.trim())?;
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses one `key=value` argument.
    pub fn set_pair(&mut self, arg: &str) -> Result<()> {
        let (k, v) = arg
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("expected key=value, got `{arg}`")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::config(key, "unknown key"));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Overlays `other` on top of `self`.
    pub fn merge(&mut self, other: &Settings) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Builds and validates a run configuration; absent keys take the defaults
    /// of [`RunConfig::default`].
    pub fn build<T: Scalar>(&self) -> Result<RunConfig<T>> {
        let d = RunConfig::<T>::default();
        let real = |key: &str, default: T| -> Result<T> { self.parse_real(key).map(|v| v.unwrap_or(default)) };

        let length = real("L", d.length)?;
        let n_interior = self.parse_as::<usize>("Nx")?.unwrap_or(d.n_interior);
        let final_time = real("T", d.final_time)?;
        let courant = real("c", d.courant)?;
        let materials = Materials {
            rho1: real("rho1", d.materials.rho1)?,
            rho2: real("rho2", d.materials.rho2)?,
            b: real("b", d.materials.b)?,
            k: real("k", d.materials.k)?,
        };

        let mu = self.parse_real::<T>("mu")?;
        let mut damping = match self.get("damping").unwrap_or("linear") {
            "undamped" | "none" => DampingModel::undamped(),
            "linear" => DampingModel::linear(mu.unwrap_or_else(T::one)),
            "powerlaw" | "power_law" => DampingModel::power_law(),
            "expflat" | "exp_flat" => DampingModel::exp_flat(),
            other => {
                return Err(Error::config(
                    "damping",
                    format!("expected undamped|linear|powerlaw|expflat, got `{other}`"),
                ))
            }
        };
        if mu.is_some() && !matches!(damping.law, crate::model::DampingLaw::Linear { .. }) {
            return Err(Error::config("mu", "only meaningful with damping=linear"));
        }
        if let Some(p) = self.get("pairing") {
            damping = damping.with_pairing(match p {
                "consistent" => MassPairing::Consistent,
                "lumped" => MassPairing::Lumped,
                other => {
                    return Err(Error::config("pairing", format!("expected consistent|lumped, got `{other}`")))
                }
            });
        }
        if let Some(lit) = self.parse_bool("literal_paper")? {
            damping = damping.with_literal_paper(lit);
        }

        let mode = self.parse_as::<u32>("N")?;
        let initial = match self.get("ic").unwrap_or("sine_mode") {
            "sine_mode" => match (mode, d.initial) {
                (Some(n), _) => InitialPreset::SineMode(n),
                (None, InitialPreset::SineMode(n)) => InitialPreset::SineMode(n),
                (None, _) => InitialPreset::SineMode(2),
            },
            "cos_sin" => {
                if mode.is_some() {
                    return Err(Error::config("N", "only meaningful with ic=sine_mode"));
                }
                InitialPreset::CosSin
            }
            other => return Err(Error::config("ic", format!("expected cos_sin|sine_mode, got `{other}`"))),
        };
        if initial == InitialPreset::SineMode(0) {
            return Err(Error::config("N", "mode number must be at least 1"));
        }

        let snapshot_times = match self.get("snapshots") {
            None | Some("") => Vec::new(),
            Some(list) => list
                .split(',')
                .map(|s| parse_real_str::<T>("snapshots", s.trim()))
                .collect::<Result<Vec<T>>>()?,
        };

        let config = RunConfig {
            length,
            n_interior,
            final_time,
            courant,
            materials,
            damping,
            initial,
            amplitude: real("amplitude", d.amplitude)?,
            allow_unstable: self.parse_bool("allow_unstable")?.unwrap_or(false),
            snapshot_times,
        };
        config.validate()?;
        for &t in &config.snapshot_times {
            if !(t >= T::zero() && t <= config.final_time) {
                return Err(Error::config("snapshots", format!("time {t} outside [0, {}]", config.final_time)));
            }
        }
        Ok(config)
    }

    fn parse_real<T: Scalar>(&self, key: &str) -> Result<Option<T>> {
        self.get(key).map(|v| parse_real_str(key, v)).transpose()
    }

    fn parse_as<U: FromStr>(&self, key: &str) -> Result<Option<U>> {
        self.get(key)
            .map(|v| {
                v.parse::<U>()
                    .map_err(|_| Error::config(key, format!("expected a non-negative integer, got `{v}`")))
            })
            .transpose()
    }

    fn parse_bool(&self, key: &str) -> Result<Option<bool>> {
        self.get(key)
            .map(|v| match v {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => Err(Error::config(key, format!("expected true|false, got `{v}`"))),
            })
            .transpose()
    }
}

impl fmt::Display for Settings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.values {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

fn parse_real_str<T: Scalar>(key: &str, v: &str) -> Result<T> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::config(key, format!("expected a number, got `{v}`")))?;
    Ok(T::lit(x))
}

/// Layers the file (if any) and the `key=value` overrides over the defaults.
pub fn parse_config<T: Scalar, S: AsRef<str>>(args: &[S], file: Option<&Path>) -> Result<RunConfig<T>> {
    let mut settings = match file {
        Some(p) => Settings::from_file(p)?,
        None => Settings::new(),
    };
    for a in args {
        settings.set_pair(a.as_ref())?;
    }
    settings.build()
}

/// Named setups `fig1` to `fig8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Initial data of the undamped cos/sin run.
    Fig1,
    /// Solution snapshots of the same run.
    Fig2,
    /// Undamped energy conservation.
    Fig3,
    /// Linear damping, energy against `t`.
    Fig4,
    /// Linear damping, `log E` against `t`.
    Fig5,
    /// Power-law damping, energy against `t`.
    Fig6,
    /// Power-law damping, `log E` against `log t`.
    Fig7,
    /// Exponentially flat damping, `log E` against `log log t`.
    Fig8,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Fig1,
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig7,
        Preset::Fig8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
        }
    }

    /// Raw settings of the preset, to be overlaid by a file and overrides.
    ///
    /// fig1 to fig3 share the undamped cos/sin run on `L = 2`, `Nx = 50`,
    /// `T = 10`. The damped presets share one mesh, initial state and horizon
    /// so that only the damping law differs between them.
    pub fn settings(self) -> Settings {
        let pairs: &[(&str, &str)] = match self {
            Preset::Fig1 => &[
                ("damping", "undamped"),
                ("L", "2"),
                ("Nx", "50"),
                ("T", "10"),
                ("ic", "cos_sin"),
                ("snapshots", "0"),
            ],
            Preset::Fig2 => &[
                ("damping", "undamped"),
                ("L", "2"),
                ("Nx", "50"),
                ("T", "10"),
                ("ic", "cos_sin"),
                ("snapshots", "0,2.5,5,7.5,10"),
            ],
            Preset::Fig3 => &[
                ("damping", "undamped"),
                ("L", "2"),
                ("Nx", "50"),
                ("T", "10"),
                ("ic", "cos_sin"),
            ],
            Preset::Fig4 | Preset::Fig5 => &DECAY_SETUP_LINEAR,
            Preset::Fig6 | Preset::Fig7 => &DECAY_SETUP_POWERLAW,
            Preset::Fig8 => &DECAY_SETUP_EXPFLAT,
        };
        let mut s = Settings::new();
        for (k, v) in pairs {
            s.set(k, v).expect("preset keys are valid");
        }
        s
    }

    pub fn config<T: Scalar>(self) -> Result<RunConfig<T>> {
        self.settings().build()
    }
}

const DECAY_SETUP_LINEAR: [(&str, &str); 7] = [
    ("damping", "linear"),
    ("mu", "1"),
    ("L", "5"),
    ("Nx", "10"),
    ("T", "500"),
    ("N", "1"),
    ("amplitude", "3"),
];
const DECAY_SETUP_POWERLAW: [(&str, &str); 6] = [
    ("damping", "powerlaw"),
    ("L", "5"),
    ("Nx", "10"),
    ("T", "500"),
    ("N", "1"),
    ("amplitude", "3"),
];
const DECAY_SETUP_EXPFLAT: [(&str, &str); 6] = [
    ("damping", "expflat"),
    ("L", "5"),
    ("Nx", "10"),
    ("T", "500"),
    ("N", "1"),
    ("amplitude", "3"),
];

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown preset `{s}` (expected fig1..fig8)")))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
