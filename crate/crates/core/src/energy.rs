//! Discrete energies and the per-step energy balance.
//!
//! Two quadratic forms are tracked. `E_paper` is
//! `½(ρ1‖U‖²_M + ρ2‖V‖²_M + k‖Φ‖²_K + b‖Ψ‖²_K + k‖Ψ‖²_M)`; `E_phys` adds the
//! cross term `k ΦᵀSΨ`, which turns the shear part into the exact integral
//! `½ k ∫(φ_h' + ψ_h)²` and makes it the invariant of the semi-discrete flow.

use crate::model::{DampingLaw, Materials};
use crate::scalar::Scalar;
use crate::stepper::{Level, System};
use crate::tridiag::TriDiag;

pub fn energy_paper<T: Scalar>(
    level: &Level<T>,
    mass: &TriDiag<T>,
    stiffness: &TriDiag<T>,
    materials: &Materials<T>,
) -> T {
    let half = T::lit(0.5);
    half * (materials.rho1 * mass.quad_form(&level.u)
        + materials.rho2 * mass.quad_form(&level.v)
        + materials.k * stiffness.quad_form(&level.phi)
        + materials.b * stiffness.quad_form(&level.psi)
        + materials.k * mass.quad_form(&level.psi))
}

pub fn energy_physical<T: Scalar>(
    level: &Level<T>,
    mass: &TriDiag<T>,
    stiffness: &TriDiag<T>,
    coupling: &TriDiag<T>,
    materials: &Materials<T>,
) -> T {
    energy_paper(level, mass, stiffness, materials) + cross_term(level, coupling, materials)
}

/// `k ΦᵀSΨ`, the difference `E_phys - E_paper`.
pub fn cross_term<T: Scalar>(level: &Level<T>, coupling: &TriDiag<T>, materials: &Materials<T>) -> T {
    materials.k * coupling.bilinear(&level.phi, &level.psi)
}

/// Energy rate the damping model predicts over the step `n-1 → n+1` (`<= 0`
/// whenever the pairing makes it sign definite, zero when undamped).
///
/// Linear damping uses `-μ ‖Vⁿ‖²_P`; the nonlinear laws use `-Fⁿ · (V^{n+1} + V^{n-1})/2`
/// with `Fⁿ` the damping force the scheme applied.
pub fn predicted_rate<T: Scalar>(
    system: &System<T>,
    prev: &Level<T>,
    curr: &Level<T>,
    next: &Level<T>,
) -> T {
    let damping = system.damping();
    match damping.law {
        DampingLaw::Undamped => T::zero(),
        DampingLaw::Linear { mu } => {
            let weighted: T = match damping.pairing {
                crate::model::MassPairing::Consistent => system.mass().quad_form(&curr.v),
                crate::model::MassPairing::Lumped => system
                    .lumped_mass()
                    .iter()
                    .zip(&curr.v)
                    .map(|(&m, &v)| m * v * v)
                    .sum(),
            };
            -mu * weighted
        }
        DampingLaw::PowerLaw | DampingLaw::ExpFlat => {
            let half = T::lit(0.5);
            let mean: Vec<T> = prev
                .v
                .iter()
                .zip(&next.v)
                .map(|(&a, &b)| half * (a + b))
                .collect();
            let force = system.damping_force(curr, &mean);
            -crate::scalar::dot(&force, &mean)
        }
    }
}

/// Realised centred rate `(E_phys^{n+1} - E_phys^{n-1}) / (2Δt)` minus [`predicted_rate`].
pub fn identity_residual<T: Scalar>(
    system: &System<T>,
    prev: &Level<T>,
    curr: &Level<T>,
    next: &Level<T>,
    dt: T,
) -> T {
    let e = |l: &Level<T>| {
        energy_physical(l, system.mass(), system.stiffness(), system.coupling(), system.materials())
    };
    (e(next) - e(prev)) / (dt + dt) - predicted_rate(system, prev, curr, next)
}

/// Energy observables at one time level.
///
/// `dissipation_rate` and `identity_residual` need both neighbours and are
/// NaN at the first and last level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample<T> {
    pub step: usize,
    pub time: T,
    pub e_paper: T,
    pub e_phys: T,
    pub dissipation_rate: T,
    pub identity_residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTrace<T> {
    pub samples: Vec<EnergySample<T>>,
    /// Hex digest of the run configuration.
    pub fingerprint: String,
}

/// Which energy a consumer reads from a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyKind {
    Paper,
    #[default]
    Physical,
}

impl<T: Scalar> EnergyTrace<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.time).collect()
    }

    pub fn energies(&self, kind: EnergyKind) -> Vec<T> {
        self.samples
            .iter()
            .map(|s| match kind {
                EnergyKind::Paper => s.e_paper,
                EnergyKind::Physical => s.e_phys,
            })
            .collect()
    }

    /// `max_n |E_phys(n) - E_phys(0)| / E_phys(0)`.
    pub fn max_relative_drift(&self) -> T {
        let e0 = self.samples[0].e_phys;
        self.samples
            .iter()
            .map(|s| (s.e_phys - e0).abs() / e0)
            .fold(T::zero(), T::max)
    }

    /// Largest residual over the levels where it is defined.
    pub fn max_abs_residual(&self) -> T {
        self.samples
            .iter()
            .map(|s| s.identity_residual)
            .filter(|r| !r.is_nan())
            .fold(T::zero(), |m, r| m.max(r.abs()))
    }

    /// Largest increase `E(n+2) - E(n)` within either parity class, or zero.
    pub fn max_parity_increase(&self) -> T {
        self.samples
            .windows(3)
            .map(|w| w[2].e_phys - w[0].e_phys)
            .fold(T::zero(), T::max)
    }
}
