//! Run configuration and the marching loop that records the energy trace.

use sha2::{Digest, Sha256};

use crate::energy::{energy_paper, energy_physical, predicted_rate, EnergySample, EnergyTrace};
use crate::error::{Error, Result};
use crate::fem::Mesh;
use crate::model::{DampingLaw, DampingModel, MassPairing, Materials};
use crate::scalar::Scalar;
use crate::stepper::{initial_conditions, BeamState, InitialPreset, Level, System};

/// Largest accepted Courant ratio `Δt / h` without the override flag.
///
/// P1 consistent mass puts the top of the spectrum of `M⁻¹K` at `12/h²`, and
/// the two-step scheme needs `ω_max Δt < 1`.
pub const COURANT_MAX: f64 = 0.288_675_134_594_812_9;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig<T> {
    pub length: T,
    pub n_interior: usize,
    pub final_time: T,
    /// `Δt = courant * h`.
    pub courant: T,
    pub materials: Materials<T>,
    pub damping: DampingModel<T>,
    pub initial: InitialPreset,
    pub amplitude: T,
    pub allow_unstable: bool,
    /// Times at which the CLI writes state snapshots.
    pub snapshot_times: Vec<T>,
}

impl<T: Scalar> Default for RunConfig<T> {
    /// Beam of length 50 on 10 interior nodes, `T = 4`, `c = 0.2`, unit
    /// materials, linear damping `μ = 1`, second sine mode.
    fn default() -> Self {
        Self {
            length: T::lit(50.0),
            n_interior: 10,
            final_time: T::lit(4.0),
            courant: T::lit(0.2),
            materials: Materials::unit(),
            damping: DampingModel::linear(T::one()),
            initial: InitialPreset::SineMode(2),
            amplitude: T::one(),
            allow_unstable: false,
            snapshot_times: Vec::new(),
        }
    }
}

impl<T: Scalar> RunConfig<T> {
    pub fn mesh(&self) -> Result<Mesh<T>> {
        Mesh::new(self.length, self.n_interior)
    }

    pub fn dt(&self) -> Result<T> {
        Ok(self.courant * self.mesh()?.h())
    }

    /// `round(T / Δt)`, at least one step.
    pub fn n_steps(&self) -> Result<usize> {
        let ratio = (self.final_time / self.dt()?).round();
        let n = ratio
            .to_usize()
            .ok_or_else(|| Error::config("T", "step count does not fit in usize"))?;
        Ok(n.max(1))
    }

    pub fn validate(&self) -> Result<()> {
        self.mesh().map_err(|e| Error::config("L/Nx", e.to_string()))?;
        self.materials.validate()?;
        self.damping.validate()?;
        if !(self.final_time.is_finite() && self.final_time > T::zero()) {
            return Err(Error::config("T", format!("must be positive, got {}", self.final_time)));
        }
        if !(self.courant.is_finite() && self.courant > T::zero()) {
            return Err(Error::config("c", format!("must be positive, got {}", self.courant)));
        }
        if !self.allow_unstable && self.courant > T::lit(COURANT_MAX) {
            return Err(Error::config(
                "c",
                format!(
                    "Courant ratio {} exceeds the stability limit {COURANT_MAX:.4} (set allow_unstable=true to override)",
                    self.courant
                ),
            ));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::config("amplitude", "must be finite"));
        }
        self.n_steps()?;
        Ok(())
    }

    /// Canonical `key=value` rendering; also the input of [`Self::fingerprint`].
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        kv("L", self.length.to_string());
        kv("Nx", self.n_interior.to_string());
        kv("T", self.final_time.to_string());
        kv("c", self.courant.to_string());
        kv("rho1", self.materials.rho1.to_string());
        kv("rho2", self.materials.rho2.to_string());
        kv("b", self.materials.b.to_string());
        kv("k", self.materials.k.to_string());
        kv("damping", self.damping.name().to_string());
        if let DampingLaw::Linear { mu } = self.damping.law {
            kv("mu", mu.to_string());
        }
        kv(
            "pairing",
            match self.damping.pairing {
                MassPairing::Consistent => "consistent",
                MassPairing::Lumped => "lumped",
            }
            .to_string(),
        );
        kv("literal_paper", self.damping.literal_paper.to_string());
        match self.initial {
            InitialPreset::CosSin => kv("ic", "cos_sin".into()),
            InitialPreset::SineMode(n) => {
                kv("ic", "sine_mode".into());
                kv("N", n.to_string());
            }
        }
        kv("amplitude", self.amplitude.to_string());
        kv("allow_unstable", self.allow_unstable.to_string());
        if !self.snapshot_times.is_empty() {
            let times: Vec<String> = self.snapshot_times.iter().map(|t| t.to_string()).collect();
            kv("snapshots", times.join(","));
        }
        out
    }

    /// First 16 hex digits of the SHA-256 of [`Self::canonical`].
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Runs the start-up step and `Nt - 1` leapfrog steps, recording both energies
/// at every level.
pub fn run_simulation<T: Scalar>(config: &RunConfig<T>) -> Result<(BeamState<T>, EnergyTrace<T>)> {
    run_simulation_with(config, |_, _, _| {})
}

/// Like [`run_simulation`], calling `on_level(n, t_n, level)` for every level.
pub fn run_simulation_with<T, F>(config: &RunConfig<T>, mut on_level: F) -> Result<(BeamState<T>, EnergyTrace<T>)>
where
    T: Scalar,
    F: FnMut(usize, T, &Level<T>),
{
    config.validate()?;
    let mesh = config.mesh()?;
    let system = System::new(mesh, config.materials, config.damping)?;
    let dt = config.dt()?;
    let n_steps = config.n_steps()?;

    let energies = |level: &Level<T>| {
        let (m, k, s, mat) = (system.mass(), system.stiffness(), system.coupling(), system.materials());
        (energy_paper(level, m, k, mat), energy_physical(level, m, k, s, mat))
    };
    let sample = |n: usize, level: &Level<T>| {
        let (e_paper, e_phys) = energies(level);
        EnergySample {
            step: n,
            time: T::from_count(n) * dt,
            e_paper,
            e_phys,
            dissipation_rate: T::nan(),
            identity_residual: T::nan(),
        }
    };

    let mut samples = Vec::with_capacity(n_steps + 1);
    let level0 = initial_conditions(config.initial, &mesh, config.amplitude);
    samples.push(sample(0, &level0));
    on_level(0, T::zero(), &level0);

    let mut state = system.startup_step(&level0, dt)?;
    samples.push(sample(1, &state.curr));
    on_level(1, dt, &state.curr);

    while state.step < n_steps {
        let next = system.next_level(&state)?;
        let n = state.step;
        let next_sample = sample(n + 1, &next);
        let rate = predicted_rate(&system, &state.prev, &state.curr, &next);
        let realised = (next_sample.e_phys - samples[n - 1].e_phys) / (dt + dt);
        samples[n].dissipation_rate = rate;
        samples[n].identity_residual = realised - rate;
        samples.push(next_sample);
        state.prev = std::mem::replace(&mut state.curr, next);
        state.step += 1;
        on_level(state.step, state.time(), &state.curr);
    }

    Ok((
        state,
        EnergyTrace {
            samples,
            fingerprint: config.fingerprint(),
        },
    ))
}
