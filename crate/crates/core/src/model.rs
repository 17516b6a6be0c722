//! Material constants and damping laws.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Coefficients of the Timoshenko system
/// `rho1 φ_tt = k (φ_x + ψ)_x`, `rho2 ψ_tt = b ψ_xx - k (φ_x + ψ) - damping`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Materials<T> {
    pub rho1: T,
    pub rho2: T,
    pub b: T,
    pub k: T,
}

impl<T: Scalar> Default for Materials<T> {
    fn default() -> Self {
        Self::unit()
    }
}

impl<T: Scalar> Materials<T> {
    /// All four constants equal to one.
    pub fn unit() -> Self {
        Self {
            rho1: T::one(),
            rho2: T::one(),
            b: T::one(),
            k: T::one(),
        }
    }

    pub fn new(rho1: T, rho2: T, b: T, k: T) -> Result<Self> {
        let m = Self { rho1, rho2, b, k };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("rho1", self.rho1),
            ("rho2", self.rho2),
            ("b", self.b),
            ("k", self.k),
        ] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// `k / rho1 == b / rho2` to relative `1e-12`.
    pub fn equal_wave_speeds(&self) -> bool {
        let a = self.k / self.rho1;
        let c = self.b / self.rho2;
        (a - c).abs() <= T::lit(1e-12) * a.max(c)
    }
}

/// Damping law acting on the rotation velocity `ψ_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DampingLaw<T> {
    Undamped,
    /// `μ ψ_t`
    Linear { mu: T },
    /// `|ψ_t| ψ_t`
    PowerLaw,
    /// `sign(ψ_t) exp(-1/ψ_t²)`
    ExpFlat,
}

/// Mass matrix paired with the nodal damping values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassPairing {
    Consistent,
    Lumped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingModel<T> {
    pub law: DampingLaw<T>,
    pub pairing: MassPairing,
    /// Linear: explicit `μ M Vⁿ` instead of the time average.
    /// ExpFlat: explicit `K g(Ψⁿ)` instead of the lumped, time-averaged `g(V)`.
    pub literal_paper: bool,
}

impl<T: Scalar> DampingModel<T> {
    pub fn undamped() -> Self {
        Self {
            law: DampingLaw::Undamped,
            pairing: MassPairing::Consistent,
            literal_paper: false,
        }
    }

    pub fn linear(mu: T) -> Self {
        Self {
            law: DampingLaw::Linear { mu },
            pairing: MassPairing::Consistent,
            literal_paper: false,
        }
    }

    pub fn power_law() -> Self {
        Self {
            law: DampingLaw::PowerLaw,
            pairing: MassPairing::Consistent,
            literal_paper: false,
        }
    }

    pub fn exp_flat() -> Self {
        Self {
            law: DampingLaw::ExpFlat,
            pairing: MassPairing::Lumped,
            literal_paper: false,
        }
    }

    pub fn with_pairing(mut self, pairing: MassPairing) -> Self {
        self.pairing = pairing;
        self
    }

    pub fn with_literal_paper(mut self, literal: bool) -> Self {
        self.literal_paper = literal;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let DampingLaw::Linear { mu } = self.law {
            if !(mu.is_finite() && mu > T::zero()) {
                return Err(Error::config("mu", format!("must be positive, got {mu}")));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self.law {
            DampingLaw::Undamped => "undamped",
            DampingLaw::Linear { .. } => "linear",
            DampingLaw::PowerLaw => "powerlaw",
            DampingLaw::ExpFlat => "expflat",
        }
    }

    pub fn is_undamped(&self) -> bool {
        matches!(self.law, DampingLaw::Undamped)
    }

    /// True when the V-update treats damping explicitly at level `n`.
    pub fn is_explicit(&self) -> bool {
        self.literal_paper && matches!(self.law, DampingLaw::Linear { .. } | DampingLaw::ExpFlat)
    }

    /// Nodal coefficient `a(s)` with `damping(s) = a(s) s`, always `>= 0`.
    pub fn coefficient(&self, s: T) -> T {
        match self.law {
            DampingLaw::Undamped => T::zero(),
            DampingLaw::Linear { mu } => mu,
            DampingLaw::PowerLaw => s.abs(),
            DampingLaw::ExpFlat => {
                let g = g_odd(s);
                if g.is_zero() {
                    T::zero()
                } else {
                    g / s
                }
            }
        }
    }

    /// Nodal damping value `a(s) s`.
    pub fn nodal(&self, s: T) -> T {
        match self.law {
            DampingLaw::Undamped => T::zero(),
            DampingLaw::Linear { mu } => mu * s,
            DampingLaw::PowerLaw => s.abs() * s,
            DampingLaw::ExpFlat => g_odd(s),
        }
    }
}

/// Odd extension `sign(s) exp(-1/s²)` of the flat feedback, zero at and near the origin.
pub fn g_odd<T: Scalar>(s: T) -> T {
    let a = s.abs();
    if a.is_zero() || a < T::lit(1e-150) {
        return T::zero();
    }
    let g = (-(a * a).recip()).exp();
    if s < T::zero() {
        -g
    } else {
        g
    }
}
