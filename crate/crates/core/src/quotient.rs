//! The quotient space attached to an associate vector.
//!
//! For an associate xi with invertible <xi, xi>, the submodule generated by
//! xi is modded out by realizing its orthogonal complement concretely: at
//! every point t an orthonormal basis of xi(t)-perp is built with a fixed
//! deterministic rule (drop the largest-modulus coordinate of xi(t), then
//! orthonormalize the remaining standard basis vectors in index order).
//! The semi-inner product <x, z | xi> restricted to this complement is a
//! genuine inner product; its Gram data is kept per point.
//!
//! Everything downstream (frame bounds, reconstruction, operator norms)
//! decomposes over the points of the commutative algebra, and this pointwise
//! picture is the implementation backbone of the whole crate.

use crate::algebra::AlgebraElement;
use crate::error::{CoreError, Result};
use crate::hilbert_module::{module_action, ModuleVector};
use crate::linalg::{CMatrix, CVector};
use crate::two_inner::two_inner;

/// An associate vector together with an orthonormal realization of its
/// complement and the Gram data of the induced inner product.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    associate: ModuleVector,
    complement_basis: Vec<ModuleVector>,
    /// Per point t: the m x (m-1) matrix whose columns are the basis at t.
    point_bases: Vec<CMatrix>,
    /// Per point t: Gram matrix of <.,.|xi> on the complement basis.
    gram_xi: Vec<CMatrix>,
    /// Per point t: |xi(t)|^2.
    xi_norm_sq: Vec<f64>,
    /// <xi, xi>^-1, precomputed at build time.
    gram_inv: AlgebraElement,
}

impl QuotientSpace {
    /// Builds the quotient data for `xi`.
    ///
    /// Requires a commutative algebra, rank >= 2, and <xi, xi> invertible
    /// (every point value bounded away from zero by `tol`).
    pub fn build(xi: &ModuleVector, tol: f64) -> Result<Self> {
        let n = xi.points().ok_or_else(|| {
            CoreError::NonCommutative(xi.algebra().to_string())
        })?;
        let m = xi.rank();
        if m < 2 {
            return Err(CoreError::InvalidArgument(
                "quotient construction needs rank >= 2".into(),
            ));
        }
        let gram = xi.inner(xi)?;
        let gram_inv = gram.invert(tol)?;

        let mut point_bases = Vec::with_capacity(n);
        let mut xi_norm_sq = Vec::with_capacity(n);
        for t in 0..n {
            let xt = xi.point_vector(t)?;
            let nsq: f64 = xt.iter().map(|c| c.norm_sqr()).sum();
            xi_norm_sq.push(nsq);
            point_bases.push(orthonormal_complement(&xt)?);
        }

        let complement_basis: Vec<ModuleVector> = (0..m - 1)
            .map(|i| {
                let cols: Vec<CVector> = point_bases
                    .iter()
                    .map(|u| u.column(i).clone_owned())
                    .collect();
                ModuleVector::from_point_vectors(xi.algebra(), m, &cols)
            })
            .collect::<Result<Vec<_>>>()?;

        let mut gram_xi = vec![CMatrix::zeros(m - 1, m - 1); n];
        for i in 0..m - 1 {
            for j in 0..m - 1 {
                let g = two_inner(&complement_basis[i], &complement_basis[j], xi)?;
                let entries = g.diagonal_entries().expect("commutative algebra");
                for (t, gm) in gram_xi.iter_mut().enumerate() {
                    gm[(i, j)] = entries[t];
                }
            }
        }

        Ok(QuotientSpace {
            associate: xi.clone(),
            complement_basis,
            point_bases,
            gram_xi,
            xi_norm_sq,
            gram_inv,
        })
    }

    pub fn associate(&self) -> &ModuleVector {
        &self.associate
    }

    pub fn complement_basis(&self) -> &[ModuleVector] {
        &self.complement_basis
    }

    pub fn gram(&self) -> &[CMatrix] {
        &self.gram_xi
    }

    pub fn point_basis(&self, t: usize) -> &CMatrix {
        &self.point_bases[t]
    }

    pub fn xi_norm_sq(&self) -> &[f64] {
        &self.xi_norm_sq
    }

    pub fn points(&self) -> usize {
        self.point_bases.len()
    }

    pub fn rank(&self) -> usize {
        self.associate.rank()
    }

    pub fn complement_dim(&self) -> usize {
        self.rank() - 1
    }

    /// Orthogonal projection onto the complement:
    /// x - <x, xi><xi, xi>^-1 xi.
    pub fn project(&self, x: &ModuleVector) -> Result<ModuleVector> {
        let coeff = x.inner(&self.associate)?.mul(&self.gram_inv)?;
        x.sub(&module_action(&coeff, &self.associate)?)
    }

    /// Complement coordinates of (the projection of) x, one vector per point.
    pub fn complement_coords(&self, x: &ModuleVector) -> Result<Vec<CVector>> {
        if x.algebra() != self.associate.algebra() || x.rank() != self.rank() {
            return Err(CoreError::ShapeMismatch(
                "vector does not live in the quotient's module".into(),
            ));
        }
        (0..self.points())
            .map(|t| {
                let xt = x.point_vector(t)?;
                Ok(self.point_bases[t].adjoint() * xt)
            })
            .collect()
    }

    /// Reassembles a module vector from complement coordinates.
    pub fn vector_from_coords(&self, coords: &[CVector]) -> Result<ModuleVector> {
        if coords.len() != self.points() || coords.iter().any(|c| c.len() != self.complement_dim())
        {
            return Err(CoreError::ShapeMismatch(format!(
                "expected {} coordinate vectors of length {}",
                self.points(),
                self.complement_dim()
            )));
        }
        let points: Vec<CVector> = coords
            .iter()
            .zip(&self.point_bases)
            .map(|(c, u)| u * c)
            .collect();
        ModuleVector::from_point_vectors(self.associate.algebra(), self.rank(), &points)
    }
}

/// Orthonormal basis of the orthogonal complement of a nonzero vector.
///
/// Deterministic rule: drop the standard basis vector at the index where
/// |xi_j| is largest (smallest index on ties), then modified Gram-Schmidt
/// over the remaining standard basis vectors in increasing index order,
/// with one re-orthogonalization pass.
fn orthonormal_complement(xi: &CVector) -> Result<CMatrix> {
    let m = xi.len();
    let nsq: f64 = xi.iter().map(|c| c.norm_sqr()).sum();
    if nsq == 0.0 {
        return Err(CoreError::NotInvertible {
            min_spectral: 0.0,
            tol: 0.0,
        });
    }
    let q0 = xi.scale(1.0 / nsq.sqrt());
    let pivot = (0..m)
        .max_by(|&i, &j| {
            xi[i]
                .norm()
                .partial_cmp(&xi[j].norm())
                .expect("finite")
                .then(j.cmp(&i)) // prefer the smaller index on ties
        })
        .expect("nonempty vector");

    let mut basis = CMatrix::zeros(m, m - 1);
    let mut col = 0;
    for j in 0..m {
        if j == pivot {
            continue;
        }
        let mut v = CVector::zeros(m);
        v[j] = num_complex::Complex64::ONE;
        for _pass in 0..2 {
            let c = q0.dotc(&v);
            v -= q0.scale(1.0) * c;
            for k in 0..col {
                let u = basis.column(k).clone_owned();
                let c = u.dotc(&v);
                v -= u * c;
            }
        }
        let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(CoreError::Internal(
                "orthonormalization collapsed; complement basis incomplete".into(),
            ));
        }
        basis.set_column(col, &v.scale(1.0 / norm));
        col += 1;
    }
    Ok(basis)
}
