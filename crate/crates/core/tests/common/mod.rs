//! Dense reference model built element by element, independent of the
//! banded storage used by the library, plus a classical RK4 integrator.

#![allow(dead_code)]

pub type Dense = Vec<Vec<f64>>;

pub struct DenseModel {
    pub n: usize,
    pub mass: Dense,
    pub stiffness: Dense,
    /// `S[i][j] = ∫ w_i' w_j`
    pub coupling: Dense,
    pub rho1: f64,
    pub rho2: f64,
    pub b: f64,
    pub k: f64,
    /// Linear damping coefficient on `ψ_t`, zero when undamped.
    pub mu: f64,
}

impl DenseModel {
    pub fn new(length: f64, n: usize) -> Self {
        let h = length / (n + 1) as f64;
        let mut mass = vec![vec![0.0; n]; n];
        let mut stiffness = vec![vec![0.0; n]; n];
        let mut coupling = vec![vec![0.0; n]; n];
        // element e spans nodes e and e+1 (0 and n+1 are the clamped ends);
        // local hats: left = 1 - s, right = s on s ∈ [0, 1]
        let local_mass = [[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]];
        let local_stiff = [[1.0 / h, -1.0 / h], [-1.0 / h, 1.0 / h]];
        // ∫ w_a' w_b over the element: slopes (-1/h, 1/h), ∫ hat = h/2
        let slopes = [-1.0 / h, 1.0 / h];
        for e in 0..=n {
            let nodes = [e, e + 1];
            for a in 0..2 {
                for bb in 0..2 {
                    let (gi, gj) = (nodes[a], nodes[bb]);
                    if gi == 0 || gj == 0 || gi == n + 1 || gj == n + 1 {
                        continue;
                    }
                    let (i, j) = (gi - 1, gj - 1);
                    mass[i][j] += local_mass[a][bb];
                    stiffness[i][j] += local_stiff[a][bb];
                    coupling[i][j] += slopes[a] * h / 2.0;
                }
            }
        }
        Self {
            n,
            mass,
            stiffness,
            coupling,
            rho1: 1.0,
            rho2: 1.0,
            b: 1.0,
            k: 1.0,
            mu: 0.0,
        }
    }

    /// State layout `[φ, ψ, u, v]`.
    pub fn rhs(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n;
        let (phi, psi, u, v) = (&y[..n], &y[n..2 * n], &y[2 * n..3 * n], &y[3 * n..]);
        let k_phi = matvec(&self.stiffness, phi);
        let k_psi = matvec(&self.stiffness, psi);
        let s_phi = matvec(&self.coupling, phi);
        let s_psi = matvec(&self.coupling, psi);
        let m_psi = matvec(&self.mass, psi);
        let m_v = matvec(&self.mass, v);
        let fu: Vec<f64> = (0..n).map(|i| -self.k * (k_phi[i] + s_psi[i]) / self.rho1).collect();
        let fv: Vec<f64> = (0..n)
            .map(|i| (-self.b * k_psi[i] + self.k * s_phi[i] - self.k * m_psi[i] - self.mu * m_v[i]) / self.rho2)
            .collect();
        let du = solve(&self.mass, &fu);
        let dv = solve(&self.mass, &fv);
        let mut out = Vec::with_capacity(4 * n);
        out.extend_from_slice(u);
        out.extend_from_slice(v);
        out.extend(du);
        out.extend(dv);
        out
    }

    pub fn rk4(&self, y0: &[f64], dt: f64, steps: usize) -> Vec<f64> {
        let mut y = y0.to_vec();
        let add = |a: &[f64], b: &[f64], s: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, z)| x + s * z).collect() };
        for _ in 0..steps {
            let k1 = self.rhs(&y);
            let k2 = self.rhs(&add(&y, &k1, dt / 2.0));
            let k3 = self.rhs(&add(&y, &k2, dt / 2.0));
            let k4 = self.rhs(&add(&y, &k3, dt));
            for i in 0..y.len() {
                y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        y
    }

    /// `½(ρ1|u|²_M + ρ2|v|²_M + b|ψ|²_K) + ½k ∫(φ_x + ψ)²`.
    pub fn physical_energy(&self, y: &[f64]) -> f64 {
        let n = self.n;
        let (phi, psi, u, v) = (&y[..n], &y[n..2 * n], &y[2 * n..3 * n], &y[3 * n..]);
        let q = |a: &Dense, x: &[f64], z: &[f64]| dot(&matvec(a, z), x);
        0.5 * (self.rho1 * q(&self.mass, u, u)
            + self.rho2 * q(&self.mass, v, v)
            + self.b * q(&self.stiffness, psi, psi)
            + self.k * (q(&self.stiffness, phi, phi) + 2.0 * q(&self.coupling, phi, psi) + q(&self.mass, psi, psi)))
    }
}

pub fn matvec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| dot(row, x)).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting.
pub fn solve(a: &Dense, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Dense = a.clone();
    let mut x = b.to_vec();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))
            .unwrap();
        m.swap(c, p);
        x.swap(c, p);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            let pivot_row = m[c].clone();
            for (x, p) in m[r][c..].iter_mut().zip(&pivot_row[c..]) {
                *x -= f * p;
            }
            x[r] -= f * x[c];
        }
    }
    for c in (0..n).rev() {
        let s: f64 = (c + 1..n).map(|j| m[c][j] * x[j]).sum();
        x[c] = (x[c] - s) / m[c][c];
    }
    x
}

/// `φ = sin(mπx/L)`, `ψ = cos(mπx/L)` at the interior nodes, at rest.
pub fn sine_mode_state(length: f64, n: usize, mode: u32) -> Vec<f64> {
    let h = length / (n + 1) as f64;
    let arg = |i: usize| mode as f64 * std::f64::consts::PI * (i + 1) as f64 * h / length;
    let mut y: Vec<f64> = (0..n).map(|i| arg(i).sin()).collect();
    y.extend((0..n).map(|i| arg(i).cos()));
    y.extend(std::iter::repeat_n(0.0, 2 * n));
    y
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
