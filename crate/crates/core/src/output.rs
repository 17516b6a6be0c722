//! CSV traces, state snapshots, plot columns and fit reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::decay::{Classification, DecayFit, DecayModel};
use crate::energy::{EnergyKind, EnergySample, EnergyTrace};
use crate::error::{Error, Result};
use crate::fem::Mesh;
use crate::scalar::Scalar;
use crate::stepper::Level;

pub const TRACE_HEADER: &str = "step,t,E_paper,E_phys,dissipation_rate,identity_residual";
pub const SNAPSHOT_HEADER: &str = "x,phi,psi,u,v";

/// Significant digits written for reals unless overridden.
pub const DEFAULT_DIGITS: usize = 17;

/// Environment variable holding the number of significant digits (1 to 17).
pub const PRECISION_ENV: &str = "TIMOSHENKO_PRECISION";

/// Significant digits from [`PRECISION_ENV`], or [`DEFAULT_DIGITS`].
pub fn digits_from_env() -> Result<usize> {
    match std::env::var(PRECISION_ENV) {
        Err(_) => Ok(DEFAULT_DIGITS),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(d) if (1..=17).contains(&d) => Ok(d),
            _ => Err(Error::config(PRECISION_ENV, format!("expected an integer in 1..=17, got `{v}`"))),
        },
    }
}

/// Scientific notation with `digits` significant digits. NaN is written as `NaN`.
pub fn format_real<T: Scalar>(x: T, digits: usize) -> String {
    let x = x.to_f64_lossy();
    if x.is_nan() {
        return "NaN".to_string();
    }
    format!("{:.*e}", digits.max(1) - 1, x)
}

pub fn render_trace<T: Scalar>(trace: &EnergyTrace<T>, digits: usize) -> String {
    let mut out = String::with_capacity(96 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for s in &trace.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.step,
            format_real(s.time, digits),
            format_real(s.e_paper, digits),
            format_real(s.e_phys, digits),
            format_real(s.dissipation_rate, digits),
            format_real(s.identity_residual, digits),
        );
    }
    out
}

pub fn write_trace<T: Scalar>(path: &Path, trace: &EnergyTrace<T>, digits: usize) -> Result<()> {
    fs::write(path, render_trace(trace, digits))?;
    Ok(())
}

/// Parses a trace CSV. The fingerprint of the result is derived from the text.
pub fn parse_trace(text: &str) -> Result<EnergyTrace<f64>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == TRACE_HEADER => {}
        Some((_, h)) => {
            return Err(Error::Trace {
                line: 1,
                reason: format!("expected header `{TRACE_HEADER}`, got `{h}`"),
            })
        }
        None => {
            return Err(Error::Trace {
                line: 1,
                reason: "empty file".into(),
            })
        }
    }
    let mut samples = Vec::new();
    for (i, line) in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let bad = |reason: String| Error::Trace { line: i + 1, reason };
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(bad(format!("expected 6 columns, got {}", cols.len())));
        }
        let step = cols[0]
            .parse::<usize>()
            .map_err(|_| bad(format!("bad step `{}`", cols[0])))?;
        let mut reals = [0.0f64; 5];
        for (r, c) in reals.iter_mut().zip(&cols[1..]) {
            *r = c.parse::<f64>().map_err(|_| bad(format!("bad number `{c}`")))?;
        }
        samples.push(EnergySample {
            step,
            time: reals[0],
            e_paper: reals[1],
            e_phys: reals[2],
            dissipation_rate: reals[3],
            identity_residual: reals[4],
        });
    }
    let digest = Sha256::digest(text.as_bytes());
    Ok(EnergyTrace {
        samples,
        fingerprint: digest[..8].iter().map(|b| format!("{b:02x}")).collect(),
    })
}

pub fn read_trace(path: &Path) -> Result<EnergyTrace<f64>> {
    parse_trace(&fs::read_to_string(path)?)
}

/// Snapshot table over all `Nx + 2` nodes, boundary values zero.
pub fn render_snapshot<T: Scalar>(mesh: &Mesh<T>, level: &Level<T>, digits: usize) -> Result<String> {
    let n = mesh.n_interior();
    if level.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: level.dim(),
        });
    }
    let mut out = String::new();
    out.push_str(SNAPSHOT_HEADER);
    out.push('\n');
    for (j, x) in mesh.all_nodes().into_iter().enumerate() {
        let at = |f: &[T]| if j == 0 || j == n + 1 { T::zero() } else { f[j - 1] };
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            format_real(x, digits),
            format_real(at(&level.phi), digits),
            format_real(at(&level.psi), digits),
            format_real(at(&level.u), digits),
            format_real(at(&level.v), digits),
        );
    }
    Ok(out)
}

/// File name of the snapshot taken at step `n`.
pub fn snapshot_name(step: usize) -> String {
    format!("snapshot_{step:06}.csv")
}

/// File name of the plot columns for one decay model.
pub fn plot_name(model: DecayModel) -> String {
    format!("plot_{}.csv", model.abscissa_label())
}

/// Two-column `(x, log E)` data for `model`; samples outside its domain or with
/// non-positive energy are skipped.
pub fn render_plot<T: Scalar>(trace: &EnergyTrace<T>, kind: EnergyKind, model: DecayModel, digits: usize) -> String {
    let mut out = format!("{},logE\n", model.abscissa_label());
    for (t, e) in trace.times().into_iter().zip(trace.energies(kind)) {
        if e.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
            continue;
        }
        if let Some(x) = model.transform(t) {
            let _ = writeln!(out, "{},{}", format_real(x, digits), format_real(e.ln(), digits));
        }
    }
    out
}

/// Writes the three plot files into `dir` and returns their paths.
pub fn write_plots<T: Scalar>(dir: &Path, trace: &EnergyTrace<T>, kind: EnergyKind, digits: usize) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::with_capacity(3);
    for model in DecayModel::ALL {
        let p = dir.join(plot_name(model));
        fs::write(&p, render_plot(trace, kind, model, digits))?;
        paths.push(p);
    }
    Ok(paths)
}

/// Fits of all three decay laws plus the selected one.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub fits: Vec<DecayFit<f64>>,
    pub selected: DecayModel,
    pub fingerprint: String,
    pub energy: EnergyKind,
}

impl FitReport {
    pub fn new(classification: &Classification<f64>, fingerprint: &str, energy: EnergyKind) -> Self {
        Self {
            fits: classification.fits.clone(),
            selected: classification.selected,
            fingerprint: fingerprint.to_string(),
            energy,
        }
    }

    pub fn selected_fit(&self) -> &DecayFit<f64> {
        self.fits
            .iter()
            .find(|f| f.model == self.selected)
            .expect("selected model has a fit")
    }

    pub fn summary_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("fingerprint {}", self.fingerprint),
            format!(
                "energy {}",
                match self.energy {
                    EnergyKind::Paper => "E_paper",
                    EnergyKind::Physical => "E_phys",
                }
            ),
        ];
        for f in &self.fits {
            let form = match f.model {
                DecayModel::Exponential => "log E = a t + b",
                DecayModel::Polynomial => "log E = a log t + b",
                DecayModel::Logarithmic => "log E = a log log t + b",
            };
            lines.push(format!(
                "{:<12} {:<24} a={:+.6e} b={:+.6e} r2={:.9} n={} t=[{:.4}, {:.4}]",
                f.model.name(),
                form,
                f.slope,
                f.intercept,
                f.r_squared,
                f.sample_count,
                f.window.0,
                f.window.1
            ));
        }
        for m in DecayModel::ALL {
            if !self.fits.iter().any(|f| f.model == m) {
                lines.push(format!("{:<12} not fitted (too few samples in its domain)", m.name()));
            }
        }
        lines.push(format!("selected {}", self.selected));
        lines
    }

    pub fn render(&self) -> String {
        let mut s = self.summary_lines().join("\n");
        s.push('\n');
        s
    }
}
