//! Exact 4-dimensional linear algebra for the stability reduction:
//! fixed-size vectors and matrices, the constant structure/symmetry
//! matrices, symplecticity predicates, and the K-block extraction from a
//! symplectic product of two involutions.
//!
//! Everything here is dimension 4 (or 2 for the reduced block) by
//! construction; matrices are plain stack values and all comparisons are
//! tolerance-based.

use thiserror::Error;

/// Default tolerance for structural identities obtained from numerical
/// integration (block vanishing, eigenvector residuals).
pub const DEFAULT_STRUCTURAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Error, PartialEq)]
pub enum SymplecticError {
    /// `(1/2)(W + W^{-1})` is not block diagonal to the requested
    /// tolerance. The usual cause is a wrong reduction basis or a failed
    /// variational integration, so this is an error rather than a silent
    /// projection.
    #[error("off-diagonal blocks of (W + W^-1)/2 have max-norm {off_diagonal_norm:e} > tol {tol:e}")]
    BlockStructure { off_diagonal_norm: f64, tol: f64 },
    /// Matrix not invertible to working precision.
    #[error("matrix is singular to working precision")]
    SingularMatrix,
}

// ---------------------------------------------------------------------------
// Vec4
// ---------------------------------------------------------------------------

/// A point or tangent vector in the 4-dimensional phase space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec4(pub [f64; 4]);

impl Vec4 {
    pub const ZERO: Vec4 = Vec4([0.0; 4]);

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Vec4([a, b, c, d])
    }

    /// Standard basis vector, `i` in `0..4`.
    pub fn basis(i: usize) -> Self {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        Vec4(v)
    }

    pub fn dot(&self, other: &Vec4) -> f64 {
        (0..4).map(|i| self.0[i] * other.0[i]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn scale(&self, c: f64) -> Vec4 {
        Vec4(self.0.map(|x| x * c))
    }

    pub fn add(&self, other: &Vec4) -> Vec4 {
        let mut v = self.0;
        for i in 0..4 {
            v[i] += other.0[i];
        }
        Vec4(v)
    }

    pub fn sub(&self, other: &Vec4) -> Vec4 {
        let mut v = self.0;
        for i in 0..4 {
            v[i] -= other.0[i];
        }
        Vec4(v)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn approx_eq(&self, other: &Vec4, tol: f64) -> bool {
        self.sub(other).max_norm() < tol
    }
}

impl std::ops::Index<usize> for Vec4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for Vec4 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

// ---------------------------------------------------------------------------
// Mat4
// ---------------------------------------------------------------------------

/// A 4x4 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4(pub [[f64; 4]; 4]);

impl Mat4 {
    pub const ZERO: Mat4 = Mat4([[0.0; 4]; 4]);

    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Mat4(m)
    }

    pub fn from_rows(rows: [[f64; 4]; 4]) -> Self {
        Mat4(rows)
    }

    pub fn from_cols(cols: [Vec4; 4]) -> Self {
        let mut m = [[0.0; 4]; 4];
        for (j, c) in cols.iter().enumerate() {
            for i in 0..4 {
                m[i][j] = c.0[i];
            }
        }
        Mat4(m)
    }

    pub fn diag(d: [f64; 4]) -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = d[i];
        }
        Mat4(m)
    }

    pub fn col(&self, j: usize) -> Vec4 {
        Vec4([self.0[0][j], self.0[1][j], self.0[2][j], self.0[3][j]])
    }

    pub fn transpose(&self) -> Mat4 {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.0[j][i];
            }
        }
        Mat4(m)
    }

    pub fn mul(&self, other: &Mat4) -> Mat4 {
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a != 0.0 {
                    for j in 0..4 {
                        m[i][j] += a * other.0[k][j];
                    }
                }
            }
        }
        Mat4(m)
    }

    pub fn mul_vec(&self, v: &Vec4) -> Vec4 {
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| self.0[i][j] * v.0[j]).sum();
        }
        Vec4(out)
    }

    pub fn add(&self, other: &Mat4) -> Mat4 {
        let mut m = self.0;
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] += other.0[i][j];
            }
        }
        Mat4(m)
    }

    pub fn sub(&self, other: &Mat4) -> Mat4 {
        let mut m = self.0;
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] -= other.0[i][j];
            }
        }
        Mat4(m)
    }

    pub fn scale(&self, c: f64) -> Mat4 {
        Mat4(self.0.map(|row| row.map(|x| x * c)))
    }

    /// Entrywise max-norm.
    pub fn max_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0f64, |a, x| a.max(x.abs()))
    }

    pub fn approx_eq(&self, other: &Mat4, tol: f64) -> bool {
        self.sub(other).max_norm() < tol
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    /// `self^k` by repeated multiplication (k is small here: 2 or 4).
    pub fn pow(&self, k: u32) -> Mat4 {
        let mut out = Mat4::identity();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Mat4, SymplecticError> {
        let mut a = self.0;
        let mut inv = Mat4::identity().0;
        for col in 0..4 {
            let mut pivot = col;
            for row in col + 1..4 {
                if a[row][col].abs() > a[pivot][col].abs() {
                    pivot = row;
                }
            }
            if a[pivot][col].abs() < 1e-300 {
                return Err(SymplecticError::SingularMatrix);
            }
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let d = a[col][col];
            for j in 0..4 {
                a[col][j] /= d;
                inv[col][j] /= d;
            }
            for row in 0..4 {
                if row != col {
                    let f = a[row][col];
                    if f != 0.0 {
                        for j in 0..4 {
                            a[row][j] -= f * a[col][j];
                            inv[row][j] -= f * inv[col][j];
                        }
                    }
                }
            }
        }
        let out = Mat4(inv);
        if !out.is_finite() {
            return Err(SymplecticError::SingularMatrix);
        }
        Ok(out)
    }

    pub fn det(&self) -> f64 {
        // LU with partial pivoting; sign tracked through row swaps.
        let mut a = self.0;
        let mut det = 1.0;
        for col in 0..4 {
            let mut pivot = col;
            for row in col + 1..4 {
                if a[row][col].abs() > a[pivot][col].abs() {
                    pivot = row;
                }
            }
            if pivot != col {
                a.swap(col, pivot);
                det = -det;
            }
            if a[col][col] == 0.0 {
                return 0.0;
            }
            det *= a[col][col];
            for row in col + 1..4 {
                let f = a[row][col] / a[col][col];
                for j in col..4 {
                    a[row][j] -= f * a[col][j];
                }
            }
        }
        det
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    /// Coefficients `(c1, c2, c3, c4)` of the characteristic polynomial
    /// `l^4 - c1 l^3 + c2 l^2 - c3 l + c4`, by the Faddeev-LeVerrier
    /// recurrence. For a symplectic matrix the polynomial is palindromic:
    /// `c3 = c1` and `c4 = 1`.
    pub fn charpoly(&self) -> (f64, f64, f64, f64) {
        let mut m = *self;
        let c1 = m.trace();
        m = self.mul(&m.sub(&Mat4::identity().scale(c1)));
        let c2 = -m.trace() / 2.0;
        m = self.mul(&m.add(&Mat4::identity().scale(c2)));
        let c3 = m.trace() / 3.0;
        m = self.mul(&m.sub(&Mat4::identity().scale(c3)));
        let c4 = -m.trace() / 4.0;
        (c1, c2, c3, c4)
    }
}

impl std::ops::Index<(usize, usize)> for Mat4 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

// ---------------------------------------------------------------------------
// Mat2
// ---------------------------------------------------------------------------

/// A 2x2 real matrix (the reduced stability block).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn from_rows(rows: [[f64; 2]; 2]) -> Self {
        Mat2(rows)
    }

    pub fn max_norm(&self) -> f64 {
        self.0.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Both eigenvalues if they are real, `None` if complex.
    pub fn real_eigenvalues(&self) -> Option<(f64, f64)> {
        let tr = self.trace();
        let disc = tr * tr - 4.0 * self.det();
        if disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        Some(((tr - sq) / 2.0, (tr + sq) / 2.0))
    }

    pub fn approx_eq(&self, other: &Mat2, tol: f64) -> bool {
        let mut d = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        d < tol
    }
}

impl std::ops::Index<(usize, usize)> for Mat2 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

// ---------------------------------------------------------------------------
// Constant matrices
// ---------------------------------------------------------------------------

/// The named constant matrices of the reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    /// Canonical symplectic structure `[0 I; -I 0]`.
    J,
    /// Time-reversing involution of the collinear orbit, `diag(1,-1,-1,1)`.
    SCollinear,
    /// `diag(1,1,-1,-1)`; the conjugated form of the symmetry in the
    /// reduction basis.
    Lambda,
    /// Time-preserving quarter-period rotation of the planar orbit.
    SF,
    /// Time-reversing involution of the planar orbit, `diag(-1,1,1,-1)`.
    SG,
    /// `SF^T * SG`, the involution entering the planar factorization.
    QPlanar,
}

/// Returns the exact integer-entried constant matrix.
pub fn constant(name: Constant) -> Mat4 {
    match name {
        Constant::J => Mat4::from_rows([
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
        ]),
        Constant::SCollinear => Mat4::diag([1.0, -1.0, -1.0, 1.0]),
        Constant::Lambda => Mat4::diag([1.0, 1.0, -1.0, -1.0]),
        Constant::SF => Mat4::from_rows([
            [0.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]),
        Constant::SG => Mat4::diag([-1.0, 1.0, 1.0, -1.0]),
        Constant::QPlanar => Mat4::from_rows([
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, -1.0, 0.0],
        ]),
    }
}

/// True iff `M' J M = J` within `tol` (max-norm).
pub fn is_symplectic(m: &Mat4, tol: f64) -> bool {
    let j = constant(Constant::J);
    m.transpose().mul(&j).mul(m).sub(&j).max_norm() < tol
}

/// True iff `M' J M = -J` within `tol`: `M` is symplectic with
/// multiplier -1, the signature of a time-reversing symmetry.
pub fn anti_symplectic_multiplier(m: &Mat4, tol: f64) -> bool {
    let j = constant(Constant::J);
    m.transpose().mul(&j).mul(m).add(&j).max_norm() < tol
}

// ---------------------------------------------------------------------------
// K-block reduction
// ---------------------------------------------------------------------------

/// The split of `(1/2)(W + W^{-1})` into 2x2 blocks.
#[derive(Debug, Clone, Copy)]
pub struct BlockSplit {
    /// Upper-left block (equals `K'` when the structure holds).
    pub k_transpose: Mat2,
    /// Lower-right block `K`.
    pub k: Mat2,
    /// Max-norm of the two off-diagonal blocks.
    pub off_diagonal_norm: f64,
}

/// Computes `(1/2)(W + W^{-1})` and splits it into 2x2 blocks without
/// enforcing the block structure. Diagnostic companion of [`k_block`].
pub fn half_sum_split(w: &Mat4) -> Result<BlockSplit, SymplecticError> {
    let w_inv = w.inverse()?;
    let m = w.add(&w_inv).scale(0.5);
    let k_transpose = Mat2([[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]);
    let k = Mat2([[m[(2, 2)], m[(2, 3)]], [m[(3, 2)], m[(3, 3)]]]);
    let mut off = 0.0f64;
    for i in 0..2 {
        for j in 2..4 {
            off = off.max(m[(i, j)].abs());
            off = off.max(m[(j, i)].abs());
        }
    }
    Ok(BlockSplit {
        k_transpose,
        k,
        off_diagonal_norm: off,
    })
}

/// Extracts the lower-right 2x2 block `K` of `(1/2)(W + W^{-1})`.
///
/// Fails with [`SymplecticError::BlockStructure`] when the off-diagonal
/// blocks exceed `tol`, the primary symptom of a mis-built reduction basis
/// or a failed variational integration.
pub fn k_block(w: &Mat4, tol: f64) -> Result<Mat2, SymplecticError> {
    let split = half_sum_split(w)?;
    if split.off_diagonal_norm >= tol {
        return Err(SymplecticError::BlockStructure {
            off_diagonal_norm: split.off_diagonal_norm,
            tol,
        });
    }
    Ok(split.k)
}

/// Stability predicate on the reduced block: `W` is stable iff both
/// eigenvalues of `K` are real with absolute value at most `1 + tol`.
/// Complex eigenvalues return `false`.
pub fn k_block_stable(k: &Mat2, tol: f64) -> bool {
    match k.real_eigenvalues() {
        Some((a, b)) => a.abs() <= 1.0 + tol && b.abs() <= 1.0 + tol,
        None => false,
    }
}
