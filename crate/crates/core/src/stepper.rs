//! Leapfrog time stepping of the semi-discrete system
//!
//! ```text
//! rho1 M U' = -k (K Φ + S Ψ)
//! rho2 M V' = -b K Ψ + k S Φ - k M Ψ - D(V, Ψ)
//! Φ' = U,  Ψ' = V
//! ```
//!
//! started by one forward Euler step. Damping on `V` is either time averaged,
//! `P diag(a(Vⁿ)) (V^{n+1} + V^{n-1}) / 2` with `P` the consistent or lumped
//! mass, or explicit at level `n` for the scheme-literal variants.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fem::{lump_mass, Assembly, Mesh};
use crate::model::{g_odd, DampingLaw, DampingModel, Materials, MassPairing};
use crate::scalar::{dot, Scalar};
use crate::tridiag::{ThomasFactor, TriDiag};

/// Nodal values of `(φ, ψ, φ_t, ψ_t)` at the interior nodes for one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct Level<T> {
    pub phi: Vec<T>,
    pub psi: Vec<T>,
    pub u: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> Level<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            phi: vec![T::zero(); n],
            psi: vec![T::zero(); n],
            u: vec![T::zero(); n],
            v: vec![T::zero(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn is_finite(&self) -> bool {
        self.fields().iter().all(|f| f.iter().all(|x| x.is_finite()))
    }

    pub fn fields(&self) -> [&[T]; 4] {
        [&self.phi, &self.psi, &self.u, &self.v]
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        for f in self.fields() {
            if f.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: f.len(),
                });
            }
        }
        Ok(())
    }
}

/// Two consecutive levels, as required by the two-step scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamState<T> {
    pub prev: Level<T>,
    pub curr: Level<T>,
    /// Index of `curr`.
    pub step: usize,
    pub dt: T,
}

impl<T: Scalar> BeamState<T> {
    pub fn time(&self) -> T {
        T::from_count(self.step) * self.dt
    }

    /// Same levels with the roles of `prev`/`curr` exchanged and `dt` negated.
    /// Stepping the result marches the scheme backwards in time.
    pub fn reversed(&self) -> Self {
        Self {
            prev: self.curr.clone(),
            curr: self.prev.clone(),
            step: self.step,
            dt: -self.dt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialPreset {
    /// `φ0 = cos(2πx/L)`, `ψ0 = sin(2πx/L)`.
    CosSin,
    /// `φ0 = sin(Nπx/L)`, `ψ0 = cos(Nπx/L)`.
    SineMode(u32),
}

/// Nodal interpolation of a preset at the interior nodes, zero velocities.
pub fn initial_conditions<T: Scalar>(preset: InitialPreset, mesh: &Mesh<T>, amplitude: T) -> Level<T> {
    let len = mesh.length().to_f64_lossy();
    let amp = amplitude;
    let (phi, psi) = mesh
        .interior_nodes()
        .into_iter()
        .map(|x| {
            let x = x.to_f64_lossy();
            let (p, q) = match preset {
                InitialPreset::CosSin => {
                    let arg = 2.0 * PI * x / len;
                    (arg.cos(), arg.sin())
                }
                InitialPreset::SineMode(n) => {
                    let arg = f64::from(n) * PI * x / len;
                    (arg.sin(), arg.cos())
                }
            };
            (amp * T::lit(p), amp * T::lit(q))
        })
        .unzip();
    let n = mesh.n_interior();
    Level {
        phi,
        psi,
        u: vec![T::zero(); n],
        v: vec![T::zero(); n],
    }
}

/// Assembled operators plus the material and damping choices of one run.
#[derive(Debug, Clone)]
pub struct System<T> {
    mesh: Mesh<T>,
    materials: Materials<T>,
    damping: DampingModel<T>,
    assembly: Assembly<T>,
    lumped: Vec<T>,
    mass_factor: ThomasFactor<T>,
}

impl<T: Scalar> System<T> {
    pub fn new(mesh: Mesh<T>, materials: Materials<T>, damping: DampingModel<T>) -> Result<Self> {
        materials.validate()?;
        damping.validate()?;
        let assembly = Assembly::new(&mesh);
        let lumped = lump_mass(&assembly.mass).main().to_vec();
        let mass_factor = assembly.mass.factor()?;
        Ok(Self {
            mesh,
            materials,
            damping,
            assembly,
            lumped,
            mass_factor,
        })
    }

    pub fn mesh(&self) -> &Mesh<T> {
        &self.mesh
    }

    pub fn materials(&self) -> &Materials<T> {
        &self.materials
    }

    pub fn damping(&self) -> &DampingModel<T> {
        &self.damping
    }

    pub fn mass(&self) -> &TriDiag<T> {
        &self.assembly.mass
    }

    pub fn stiffness(&self) -> &TriDiag<T> {
        &self.assembly.stiffness
    }

    pub fn coupling(&self) -> &TriDiag<T> {
        &self.assembly.coupling
    }

    /// Row sums of the mass matrix.
    pub fn lumped_mass(&self) -> &[T] {
        &self.lumped
    }

    pub fn dim(&self) -> usize {
        self.mesh.n_interior()
    }

    /// `M⁻¹ r`
    pub fn apply_mass_inverse(&self, r: &mut [T]) -> Result<()> {
        self.mass_factor.solve_in_place(r)
    }

    /// Undamped right-hand sides `(r_u, r_v)` of the two momentum equations.
    pub fn elastic_forces(&self, level: &Level<T>) -> (Vec<T>, Vec<T>) {
        let Materials { b, k, .. } = self.materials;
        let kphi = self.stiffness().mul_vec(&level.phi);
        let kpsi = self.stiffness().mul_vec(&level.psi);
        let sphi = self.coupling().mul_vec(&level.phi);
        let spsi = self.coupling().mul_vec(&level.psi);
        let mpsi = self.mass().mul_vec(&level.psi);
        let ru = kphi.iter().zip(&spsi).map(|(&a, &c)| -k * (a + c)).collect();
        let rv = kpsi
            .iter()
            .zip(&sphi)
            .zip(&mpsi)
            .map(|((&kp, &sp), &mp)| -b * kp + k * (sp - mp))
            .collect();
        (ru, rv)
    }

    /// `P x` for the configured damping pairing.
    fn pair(&self, x: &[T]) -> Vec<T> {
        match self.damping.pairing {
            MassPairing::Consistent => self.mass().mul_vec(x),
            MassPairing::Lumped => self.lumped.iter().zip(x).map(|(&m, &v)| m * v).collect(),
        }
    }

    /// Damping force evaluated entirely at one level (used by the start-up
    /// step and by the explicit variants).
    pub fn explicit_damping_force(&self, level: &Level<T>) -> Vec<T> {
        let d = &self.damping;
        match d.law {
            DampingLaw::Undamped => vec![T::zero(); self.dim()],
            DampingLaw::ExpFlat if d.literal_paper => {
                let g: Vec<T> = level.psi.iter().map(|&s| g_odd(s)).collect();
                self.stiffness().mul_vec(&g)
            }
            _ => {
                let nodal: Vec<T> = level.v.iter().map(|&s| d.nodal(s)).collect();
                self.pair(&nodal)
            }
        }
    }

    /// Damping force the scheme applies at step `n`, given level `n` and the
    /// time average `(V^{n+1} + V^{n-1}) / 2`.
    pub fn damping_force(&self, curr: &Level<T>, v_mean: &[T]) -> Vec<T> {
        if self.damping.is_undamped() || self.damping.is_explicit() {
            return self.explicit_damping_force(curr);
        }
        let scaled: Vec<T> = curr
            .v
            .iter()
            .zip(v_mean)
            .map(|(&s, &m)| self.damping.coefficient(s) * m)
            .collect();
        self.pair(&scaled)
    }

    /// Forward Euler start-up step from level 0.
    pub fn startup_step(&self, level0: &Level<T>, dt: T) -> Result<BeamState<T>> {
        let n = self.dim();
        level0.check_dim(n)?;
        let Materials { rho1, rho2, .. } = self.materials;
        let (mut au, mut av) = self.elastic_forces(level0);
        let force = self.explicit_damping_force(level0);
        for (a, f) in av.iter_mut().zip(&force) {
            *a = *a - *f;
        }
        self.apply_mass_inverse(&mut au)?;
        self.apply_mass_inverse(&mut av)?;
        let axpy = |x: &[T], y: &[T], s: T| -> Vec<T> {
            x.iter().zip(y).map(|(&a, &b)| a + s * b).collect()
        };
        let level1 = Level {
            phi: axpy(&level0.phi, &level0.u, dt),
            psi: axpy(&level0.psi, &level0.v, dt),
            u: axpy(&level0.u, &au, dt / rho1),
            v: axpy(&level0.v, &av, dt / rho2),
        };
        if !level1.is_finite() {
            return Err(Error::NonFinite { step: 1 });
        }
        Ok(BeamState {
            prev: level0.clone(),
            curr: level1,
            step: 1,
            dt,
        })
    }

    /// Level `n + 1` from levels `n - 1` and `n`.
    pub fn next_level(&self, state: &BeamState<T>) -> Result<Level<T>> {
        let n = self.dim();
        state.prev.check_dim(n)?;
        state.curr.check_dim(n)?;
        let dt = state.dt;
        let two_dt = dt + dt;
        let Materials { rho1, rho2, .. } = self.materials;
        let (prev, curr) = (&state.prev, &state.curr);

        let (mut au, mut rv) = self.elastic_forces(curr);
        self.apply_mass_inverse(&mut au)?;
        let step = |old: &[T], rate: &[T], s: T| -> Vec<T> {
            old.iter().zip(rate).map(|(&a, &b)| a + s * b).collect()
        };
        let phi = step(&prev.phi, &curr.u, two_dt);
        let psi = step(&prev.psi, &curr.v, two_dt);
        let u = step(&prev.u, &au, two_dt / rho1);

        let v = if self.damping.is_undamped() || self.damping.is_explicit() {
            let force = self.explicit_damping_force(curr);
            for (r, f) in rv.iter_mut().zip(&force) {
                *r = *r - *f;
            }
            self.apply_mass_inverse(&mut rv)?;
            step(&prev.v, &rv, two_dt / rho2)
        } else {
            let coeff: Vec<T> = curr.v.iter().map(|&s| self.damping.coefficient(s)).collect();
            match self.damping.pairing {
                MassPairing::Consistent => {
                    // M diag(a) is inverted by M⁻¹ exactly, leaving a diagonal solve
                    self.apply_mass_inverse(&mut rv)?;
                    prev.v
                        .iter()
                        .zip(&rv)
                        .zip(&coeff)
                        .map(|((&vp, &w), &a)| ((rho2 - dt * a) * vp + two_dt * w) / (rho2 + dt * a))
                        .collect()
                }
                MassPairing::Lumped => {
                    let extra: Vec<T> = coeff
                        .iter()
                        .zip(&self.lumped)
                        .map(|(&a, &m)| dt * a * m)
                        .collect();
                    let lhs = self.mass().scaled(rho2).plus_diagonal(&extra);
                    let mvp = self.mass().mul_vec(&prev.v);
                    let rhs: Vec<T> = mvp
                        .iter()
                        .zip(&prev.v)
                        .zip(&extra)
                        .zip(&rv)
                        .map(|(((&mv, &vp), &e), &r)| rho2 * mv - e * vp + two_dt * r)
                        .collect();
                    lhs.solve(&rhs)?
                }
            }
        };
        let next = Level { phi, psi, u, v };
        if !next.is_finite() {
            return Err(Error::NonFinite {
                step: state.step + 1,
            });
        }
        Ok(next)
    }

    /// Advances `state` by one level in place.
    pub fn leapfrog_step(&self, state: &mut BeamState<T>) -> Result<()> {
        let next = self.next_level(state)?;
        state.prev = std::mem::replace(&mut state.curr, next);
        state.step += 1;
        Ok(())
    }

    /// Largest angular frequency of the undamped semi-discrete system,
    /// by power iteration on the generalised eigenproblem.
    pub fn max_frequency(&self) -> Result<T> {
        let n = self.dim();
        let Materials { rho1, rho2, .. } = self.materials;
        // alternating start vector has weight on the highest modes
        let mut phi: Vec<T> = (0..n)
            .map(|i| if i % 2 == 0 { T::one() } else { -T::one() })
            .collect();
        let mut psi = phi.clone();
        let mut lambda = T::zero();
        for _ in 0..500 {
            let level = Level {
                phi: phi.clone(),
                psi: psi.clone(),
                u: vec![T::zero(); n],
                v: vec![T::zero(); n],
            };
            let (mut ru, mut rv) = self.elastic_forces(&level);
            // A x = -(r_u, r_v)
            let ax = dot(&phi, &ru) + dot(&psi, &rv);
            let bx = rho1 * self.mass().quad_form(&phi) + rho2 * self.mass().quad_form(&psi);
            lambda = -ax / bx;
            self.apply_mass_inverse(&mut ru)?;
            self.apply_mass_inverse(&mut rv)?;
            let scale = ru
                .iter()
                .chain(&rv)
                .fold(T::zero(), |m, x| m.max(x.abs()));
            if scale.is_zero() {
                break;
            }
            phi = ru.iter().map(|&x| -x / (rho1 * scale)).collect();
            psi = rv.iter().map(|&x| -x / (rho2 * scale)).collect();
        }
        Ok(lambda.max(T::zero()).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(l: f64, n: usize, d: DampingModel<f64>) -> System<f64> {
        System::new(Mesh::new(l, n).unwrap(), Materials::unit(), d).unwrap()
    }

    fn models() -> Vec<DampingModel<f64>> {
        vec![
            DampingModel::undamped(),
            DampingModel::linear(1.0),
            DampingModel::linear(1.0).with_literal_paper(true),
            DampingModel::linear(1.0).with_pairing(MassPairing::Lumped),
            DampingModel::power_law(),
            DampingModel::power_law().with_pairing(MassPairing::Lumped),
            DampingModel::exp_flat(),
            DampingModel::exp_flat().with_pairing(MassPairing::Consistent),
            DampingModel::exp_flat().with_literal_paper(true),
        ]
    }

    #[test]
    fn cos_sin_preset_values() {
        let mesh = Mesh::<f64>::new(2.0, 3).unwrap();
        let l = initial_conditions(InitialPreset::CosSin, &mesh, 1.0);
        let want_phi = [0.0, -1.0, 0.0];
        let want_psi = [1.0, 0.0, -1.0];
        for i in 0..3 {
            assert!((l.phi[i] - want_phi[i]).abs() < 1e-15);
            assert!((l.psi[i] - want_psi[i]).abs() < 1e-15);
        }
        assert!(l.u.iter().chain(&l.v).all(|&x| x == 0.0));
    }

    #[test]
    fn sine_mode_presets() {
        let mesh = Mesh::new(2.0, 7).unwrap();
        let z = initial_conditions(InitialPreset::SineMode(3), &mesh, 0.0);
        assert_eq!(z, Level::zeros(7));
        let mesh = Mesh::<f64>::new(1.0, 3).unwrap();
        let l = initial_conditions(InitialPreset::SineMode(2), &mesh, 1.0);
        assert!((mesh.node(1) - 0.25).abs() < 1e-16);
        assert!((l.phi[0] - 1.0).abs() < 1e-15);
        assert!(l.psi[0].abs() < 1e-15);
    }

    #[test]
    fn zero_state_is_fixed_point() {
        for d in models() {
            let sys = system(2.0, 5, d);
            let mut st = sys.startup_step(&Level::zeros(5), 0.05).unwrap();
            assert_eq!(st.curr, Level::zeros(5));
            for _ in 0..3 {
                sys.leapfrog_step(&mut st).unwrap();
            }
            assert_eq!(st.curr, Level::zeros(5));
            assert_eq!(st.step, 4);
        }
    }

    #[test]
    fn startup_keeps_positions_when_velocity_is_zero() {
        let sys = system(2.0, 3, DampingModel::undamped());
        let l0 = initial_conditions(InitialPreset::CosSin, sys.mesh(), 1.0);
        let st = sys.startup_step(&l0, 0.1).unwrap();
        assert_eq!(st.curr.phi, l0.phi);
        assert_eq!(st.curr.psi, l0.psi);
    }

    #[test]
    fn startup_regression_value() {
        // U¹ = Δt M⁻¹(-KΦ⁰ - SΨ⁰) on L=2, N=3 with Φ⁰=[0,-1,0], Ψ⁰=[1,0,-1].
        // -KΦ⁰ - SΨ⁰ = [-2, 3, -2], M = tridiag(1/12, 1/3, 1/12), so
        // M⁻¹(...) = [-66/7, 96/7, -66/7] by hand elimination.
        let sys = system(2.0, 3, DampingModel::undamped());
        let l0 = initial_conditions(InitialPreset::CosSin, sys.mesh(), 1.0);
        let st = sys.startup_step(&l0, 0.1).unwrap();
        let want = [-6.6 / 7.0, 9.6 / 7.0, -6.6 / 7.0];
        for (got, want) in st.curr.u.iter().zip(want) {
            assert!((got - want).abs() < 1e-12, "{:?}", st.curr.u);
        }
    }

    #[test]
    fn undamped_positions_repeat_without_velocity() {
        let sys = system(2.0, 4, DampingModel::undamped());
        let mut l = initial_conditions(InitialPreset::SineMode(1), sys.mesh(), 1.0);
        l.u = vec![0.0; 4];
        let st = BeamState {
            prev: l.clone(),
            curr: Level {
                u: vec![0.0; 4],
                ..initial_conditions(InitialPreset::CosSin, sys.mesh(), 0.5)
            },
            step: 1,
            dt: 0.01,
        };
        let next = sys.next_level(&st).unwrap();
        assert_eq!(next.phi, st.prev.phi);
    }

    #[test]
    fn linear_step_matches_scalar_formula() {
        let sys = system(2.0, 3, DampingModel::linear(0.8));
        let dt = 0.05;
        let prev = Level {
            phi: vec![0.1, -0.2, 0.3],
            psi: vec![0.4, 0.0, -0.1],
            u: vec![0.5, 0.1, -0.3],
            v: vec![-0.2, 0.6, 0.1],
        };
        let curr = Level {
            phi: vec![0.12, -0.18, 0.27],
            psi: vec![0.38, 0.03, -0.12],
            u: vec![0.45, 0.12, -0.28],
            v: vec![-0.15, 0.55, 0.12],
        };
        let st = BeamState {
            prev: prev.clone(),
            curr: curr.clone(),
            step: 1,
            dt,
        };
        let next = sys.next_level(&st).unwrap();

        // independent evaluation with dense 3x3 arithmetic
        let h: f64 = 0.5;
        let m = [[2.0 * h / 3.0, h / 6.0, 0.0], [h / 6.0, 2.0 * h / 3.0, h / 6.0], [0.0, h / 6.0, 2.0 * h / 3.0]];
        let k = [[2.0 / h, -1.0 / h, 0.0], [-1.0 / h, 2.0 / h, -1.0 / h], [0.0, -1.0 / h, 2.0 / h]];
        let s = [[0.0, -0.5, 0.0], [0.5, 0.0, -0.5], [0.0, 0.5, 0.0]];
        let mv = |a: &[[f64; 3]; 3], x: &[f64]| -> [f64; 3] {
            let mut y = [0.0; 3];
            for i in 0..3 {
                for j in 0..3 {
                    y[i] += a[i][j] * x[j];
                }
            }
            y
        };
        let solve = |b: [f64; 3]| -> [f64; 3] {
            // Cramer's rule
            let det3 = |a: [[f64; 3]; 3]| {
                a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                    + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
            };
            let d = det3(m);
            let mut x = [0.0; 3];
            for c in 0..3 {
                let mut a = m;
                for r in 0..3 {
                    a[r][c] = b[r];
                }
                x[c] = det3(a) / d;
            }
            x
        };
        let (kpsi, sphi, mpsi) = (mv(&k, &curr.psi), mv(&s, &curr.phi), mv(&m, &curr.psi));
        let w = solve([
            -kpsi[0] + sphi[0] - mpsi[0],
            -kpsi[1] + sphi[1] - mpsi[1],
            -kpsi[2] + sphi[2] - mpsi[2],
        ]);
        let mu = 0.8;
        for (i, wi) in w.iter().enumerate() {
            let want = (prev.v[i] * (1.0 - dt * mu) + 2.0 * dt * wi) / (1.0 + dt * mu);
            assert!((next.v[i] - want).abs() < 1e-13);
            assert!((next.phi[i] - (prev.phi[i] + 2.0 * dt * curr.u[i])).abs() < 1e-15);
        }
    }

    #[test]
    fn startup_with_zero_velocity_ignores_damping() {
        let l0 = initial_conditions(InitialPreset::SineMode(1), &Mesh::new(1.0, 6).unwrap(), 0.3);
        let a = system(1.0, 6, DampingModel::power_law());
        let b = system(1.0, 6, DampingModel::power_law().with_pairing(MassPairing::Lumped));
        let c = system(1.0, 6, DampingModel::undamped());
        let sa = a.startup_step(&l0, 0.01).unwrap();
        let sb = b.startup_step(&l0, 0.01).unwrap();
        let sc = c.startup_step(&l0, 0.01).unwrap();
        assert_eq!(sa.curr, sc.curr);
        assert_eq!(sb.curr, sc.curr);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let sys = system(1.0, 4, DampingModel::undamped());
        assert!(matches!(
            sys.startup_step(&Level::zeros(3), 0.1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn blow_up_reports_step() {
        let sys = system(1.0, 20, DampingModel::undamped());
        let l0 = initial_conditions(InitialPreset::CosSin, sys.mesh(), 1.0);
        let h = sys.mesh().h();
        let mut st = sys.startup_step(&l0, 3.0 * h).unwrap();
        let err = loop {
            if let Err(e) = sys.leapfrog_step(&mut st) {
                break e;
            }
            assert!(st.step < 100_000);
        };
        match err {
            Error::NonFinite { step } => assert_eq!(step, st.step + 1),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn max_frequency_close_to_stiffness_bound() {
        // ω_max² → 12/h² on fine meshes
        let sys = system(2.0, 50, DampingModel::undamped());
        let h = sys.mesh().h();
        let w = sys.max_frequency().unwrap();
        assert!(w * h > 12f64.sqrt() * 0.99 && w * h < 12f64.sqrt() * 1.02, "{}", w * h);
    }

    #[test]
    fn reversal_returns_to_start() {
        let sys = system(2.0, 10, DampingModel::undamped());
        let l0 = initial_conditions(InitialPreset::SineMode(2), sys.mesh(), 1.0);
        let st0 = sys.startup_step(&l0, 0.2 * sys.mesh().h()).unwrap();
        let mut st = st0.clone();
        for _ in 0..200 {
            sys.leapfrog_step(&mut st).unwrap();
        }
        let mut back = st.reversed();
        for _ in 0..200 {
            sys.leapfrog_step(&mut back).unwrap();
        }
        let scale = st0.curr.phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (a, b) in back.curr.fields().iter().zip(st0.prev.fields()) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() <= 1e-8 * scale);
            }
        }
    }
}
