//! Uniform 1-D mesh and P1 Galerkin matrices over the interior nodes.
//!
//! With hat functions `w_1..w_N` vanishing at both ends of `[0, L]`:
//!
//! * mass `M_ij = ∫ w_i w_j`: `2h/3` on the diagonal, `h/6` off it,
//! * stiffness `K_ij = ∫ w_i' w_j'`: `2/h` on the diagonal, `-1/h` off it,
//! * coupling `S_ij = ∫ w_i' w_j`: zero diagonal, `-1/2` above, `+1/2` below.
//!
//! `S` is skew because the hats vanish at the Dirichlet ends.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tridiag::TriDiag;

/// Uniform partition `x_i = i h`, `i = 0..=N+1`, `h = L / (N + 1)`.
///
/// Only the `N` interior nodes carry unknowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh<T> {
    length: T,
    n_interior: usize,
    h: T,
}

impl<T: Scalar> Mesh<T> {
    pub fn new(length: T, n_interior: usize) -> Result<Self> {
        if !(length.is_finite() && length > T::zero()) {
            return Err(Error::InvalidMesh(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        if n_interior == 0 {
            return Err(Error::InvalidMesh(
                "at least one interior node is required".into(),
            ));
        }
        let h = length / T::from_count(n_interior + 1);
        Ok(Self {
            length,
            n_interior,
            h,
        })
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn h(&self) -> T {
        self.h
    }

    /// Coordinate of node `i` in `0..=N+1`; the last node is exactly `L`.
    pub fn node(&self, i: usize) -> T {
        assert!(i <= self.n_interior + 1, "node {i} outside mesh");
        if i == self.n_interior + 1 {
            self.length
        } else {
            T::from_count(i) * self.h
        }
    }

    /// Coordinates of the interior nodes `x_1..x_N`.
    pub fn interior_nodes(&self) -> Vec<T> {
        (1..=self.n_interior).map(|i| self.node(i)).collect()
    }

    /// Coordinates of every node, boundary included.
    pub fn all_nodes(&self) -> Vec<T> {
        (0..=self.n_interior + 1).map(|i| self.node(i)).collect()
    }
}

pub fn assemble_mass<T: Scalar>(mesh: &Mesh<T>) -> TriDiag<T> {
    let h = mesh.h();
    TriDiag::symmetric_constant(
        mesh.n_interior(),
        T::lit(2.0) * h / T::lit(3.0),
        h / T::lit(6.0),
    )
}

pub fn assemble_stiffness<T: Scalar>(mesh: &Mesh<T>) -> TriDiag<T> {
    let h = mesh.h();
    TriDiag::symmetric_constant(mesh.n_interior(), T::lit(2.0) / h, -h.recip())
}

/// `S_ij = ∫ w_i' w_j`; independent of `h`.
pub fn assemble_coupling<T: Scalar>(mesh: &Mesh<T>) -> TriDiag<T> {
    TriDiag::skew_constant(mesh.n_interior(), T::lit(-0.5))
}

/// Diagonal matrix of row sums of `m`.
///
/// For the interior P1 mass this is `h` away from the ends and `5h/6` on the
/// two rows adjacent to the Dirichlet nodes.
pub fn lump_mass<T: Scalar>(m: &TriDiag<T>) -> TriDiag<T> {
    TriDiag::diagonal(m.row_sums())
}

/// Which bilinear form [`quadrature_oracle`] integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    /// `∫ w_i w_j`
    Mass,
    /// `∫ w_i' w_j'`
    Stiffness,
    /// `∫ w_i' w_j`
    Coupling,
}

/// Hat function `w_i` at `x`, straight from its piecewise definition.
fn hat<T: Scalar>(mesh: &Mesh<T>, i: usize, x: T) -> T {
    let h = mesh.h();
    let left = T::from_count(i - 1) * h;
    let mid = T::from_count(i) * h;
    let right = T::from_count(i + 1) * h;
    if x >= left && x <= mid {
        (x - left) / h
    } else if x > mid && x <= right {
        (right - x) / h
    } else {
        T::zero()
    }
}

/// Derivative of `w_i` on element `[x_e, x_{e+1}]`.
fn hat_slope<T: Scalar>(mesh: &Mesh<T>, i: usize, element: usize) -> T {
    if element + 1 == i {
        mesh.h().recip()
    } else if element == i {
        -mesh.h().recip()
    } else {
        T::zero()
    }
}

/// Three-point Gauss-Legendre nodes and weights on `[-1, 1]` (exact to degree 5).
fn gauss3<T: Scalar>() -> [(T, T); 3] {
    let a = T::lit(0.6).sqrt();
    [
        (-a, T::lit(5.0 / 9.0)),
        (T::zero(), T::lit(8.0 / 9.0)),
        (a, T::lit(5.0 / 9.0)),
    ]
}

/// Entry `(i, j)` (1-based, interior) of the requested form, by per-element
/// Gauss quadrature of the hat functions themselves. Used to cross-check the
/// closed-form assembly.
pub fn quadrature_oracle<T: Scalar>(mesh: &Mesh<T>, kind: FormKind, i: usize, j: usize) -> Result<T> {
    let n = mesh.n_interior();
    if i == 0 || j == 0 || i > n || j > n {
        return Err(Error::IndexOutOfRange { i, j, n });
    }
    if i.abs_diff(j) > 1 {
        return Ok(T::zero());
    }
    let h = mesh.h();
    let half = h / T::lit(2.0);
    let rule = gauss3::<T>();
    let mut total = T::zero();
    // element e spans [x_e, x_{e+1}]; w_i lives on elements i-1 and i
    for e in (i - 1)..=i {
        if e + 1 != j && e != j {
            continue;
        }
        let centre = (T::from_count(e) + T::lit(0.5)) * h;
        let integral: T = rule
            .iter()
            .map(|&(xi, wt)| {
                let x = centre + xi * half;
                let value = match kind {
                    FormKind::Mass => hat(mesh, i, x) * hat(mesh, j, x),
                    FormKind::Stiffness => hat_slope(mesh, i, e) * hat_slope(mesh, j, e),
                    FormKind::Coupling => hat_slope(mesh, i, e) * hat(mesh, j, x),
                };
                wt * value
            })
            .sum();
        total = total + integral * half;
    }
    Ok(total)
}

/// The three assembled matrices of a mesh.
#[derive(Debug, Clone)]
pub struct Assembly<T> {
    pub mass: TriDiag<T>,
    pub stiffness: TriDiag<T>,
    pub coupling: TriDiag<T>,
}

impl<T: Scalar> Assembly<T> {
    pub fn new(mesh: &Mesh<T>) -> Self {
        Self {
            mass: assemble_mass(mesh),
            stiffness: assemble_stiffness(mesh),
            coupling: assemble_coupling(mesh),
        }
    }
}
