//! Tridiagonal matrices stored as three diagonals, with a Thomas solver.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Structural tag carried by a [`TriDiag`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    Symmetric,
    Skew,
    General,
}

/// `n x n` tridiagonal matrix.
///
/// `sub[i]` is entry `(i + 1, i)`, `sup[i]` is entry `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriDiag<T> {
    sub: Vec<T>,
    main: Vec<T>,
    sup: Vec<T>,
    structure: Structure,
}

impl<T: Scalar> TriDiag<T> {
    /// Builds a matrix from its diagonals, checking lengths and the structural tag.
    pub fn new(sub: Vec<T>, main: Vec<T>, sup: Vec<T>, structure: Structure) -> Result<Self> {
        let n = main.len();
        if n == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        for d in [&sub, &sup] {
            if d.len() != n - 1 {
                return Err(Error::DimensionMismatch {
                    expected: n - 1,
                    got: d.len(),
                });
            }
        }
        let ok = match structure {
            Structure::Symmetric => sub.iter().zip(&sup).all(|(a, b)| a == b),
            Structure::Skew => {
                sub.iter().zip(&sup).all(|(&a, &b)| a == -b) && main.iter().all(|m| m.is_zero())
            }
            Structure::General => true,
        };
        if !ok {
            return Err(Error::Usage(format!(
                "diagonals do not satisfy the {structure:?} tag"
            )));
        }
        Ok(Self {
            sub,
            main,
            sup,
            structure,
        })
    }

    /// Symmetric matrix with constant diagonals.
    pub fn symmetric_constant(n: usize, main: T, off: T) -> Self {
        Self {
            sub: vec![off; n.saturating_sub(1)],
            main: vec![main; n],
            sup: vec![off; n.saturating_sub(1)],
            structure: Structure::Symmetric,
        }
    }

    /// Skew matrix with zero diagonal and constant super-diagonal `sup`.
    pub fn skew_constant(n: usize, sup: T) -> Self {
        Self {
            sub: vec![-sup; n.saturating_sub(1)],
            main: vec![T::zero(); n],
            sup: vec![sup; n.saturating_sub(1)],
            structure: Structure::Skew,
        }
    }

    pub fn diagonal(main: Vec<T>) -> Self {
        let n = main.len();
        Self {
            sub: vec![T::zero(); n.saturating_sub(1)],
            main,
            sup: vec![T::zero(); n.saturating_sub(1)],
            structure: Structure::Symmetric,
        }
    }

    pub fn dim(&self) -> usize {
        self.main.len()
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn sub(&self) -> &[T] {
        &self.sub
    }

    pub fn main(&self) -> &[T] {
        &self.main
    }

    pub fn sup(&self) -> &[T] {
        &self.sup
    }

    pub fn is_diagonal(&self) -> bool {
        self.sub.iter().chain(&self.sup).all(|x| x.is_zero())
    }

    /// Entry `(i, j)`, zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> T {
        let n = self.dim();
        assert!(i < n && j < n, "entry ({i}, {j}) outside {n}x{n}");
        if i == j {
            self.main[i]
        } else if j == i + 1 {
            self.sup[i]
        } else if i == j + 1 {
            self.sub[j]
        } else {
            T::zero()
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            sub: self.sup.clone(),
            main: self.main.clone(),
            sup: self.sub.clone(),
            structure: self.structure,
        }
    }

    pub fn scaled(&self, factor: T) -> Self {
        let s = |v: &[T]| v.iter().map(|&x| x * factor).collect::<Vec<_>>();
        Self {
            sub: s(&self.sub),
            main: s(&self.main),
            sup: s(&self.sup),
            structure: self.structure,
        }
    }

    /// `self + diag(d)`; the result keeps a symmetric tag only if `self` was symmetric.
    pub fn plus_diagonal(&self, d: &[T]) -> Self {
        assert_eq!(d.len(), self.dim());
        let structure = match self.structure {
            Structure::Symmetric => Structure::Symmetric,
            _ => Structure::General,
        };
        Self {
            sub: self.sub.clone(),
            main: self.main.iter().zip(d).map(|(&a, &b)| a + b).collect(),
            sup: self.sup.clone(),
            structure,
        }
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        let n = self.dim();
        assert_eq!(x.len(), n);
        assert_eq!(y.len(), n);
        for i in 0..n {
            let mut acc = self.main[i] * x[i];
            if i > 0 {
                acc = acc + self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc = acc + self.sup[i] * x[i + 1];
            }
            y[i] = acc;
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim()];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        let n = self.dim();
        assert_eq!(x.len(), n);
        assert_eq!(y.len(), n);
        let mut acc = T::zero();
        for i in 0..n {
            let mut row = self.main[i] * y[i];
            if i > 0 {
                row = row + self.sub[i - 1] * y[i - 1];
            }
            if i + 1 < n {
                row = row + self.sup[i] * y[i + 1];
            }
            acc = acc + x[i] * row;
        }
        acc
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[T]) -> T {
        self.bilinear(x, x)
    }

    /// Row sums, i.e. `A` applied to the all-ones vector.
    pub fn row_sums(&self) -> Vec<T> {
        self.mul_vec(&vec![T::one(); self.dim()])
    }

    /// Row-major dense copy, mostly for tests.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// LU factorisation without pivoting (Thomas algorithm).
    pub fn factor(&self) -> Result<ThomasFactor<T>> {
        let n = self.dim();
        let mut inv_pivot = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n.saturating_sub(1));
        let mut pivot = self.main[0];
        for i in 0..n {
            if i > 0 {
                pivot = self.main[i] - self.sub[i - 1] * upper[i - 1];
            }
            if !pivot.is_finite() || pivot.abs() < T::min_positive_value() {
                return Err(Error::SingularPivot { row: i });
            }
            let inv = pivot.recip();
            inv_pivot.push(inv);
            if i + 1 < n {
                upper.push(self.sup[i] * inv);
            }
        }
        Ok(ThomasFactor {
            sub: self.sub.clone(),
            inv_pivot,
            upper,
        })
    }

    /// Solves `A x = rhs`.
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let mut x = rhs.to_vec();
        self.factor()?.solve_in_place(&mut x)?;
        Ok(x)
    }
}

/// Factored tridiagonal matrix, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct ThomasFactor<T> {
    sub: Vec<T>,
    inv_pivot: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> ThomasFactor<T> {
    pub fn dim(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn solve_in_place(&self, x: &mut [T]) -> Result<()> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        x[0] = x[0] * self.inv_pivot[0];
        for i in 1..n {
            x[i] = (x[i] - self.sub[i - 1] * x[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            x[i] = x[i] - self.upper[i] * x[i + 1];
        }
        Ok(())
    }
}

/// Solves `A x = rhs` with the Thomas algorithm.
pub fn thomas_solve<T: Scalar>(a: &TriDiag<T>, rhs: &[T]) -> Result<Vec<T>> {
    if rhs.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: rhs.len(),
        });
    }
    a.solve(rhs)
}
