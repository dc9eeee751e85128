//! Small dense complex linear algebra helpers.
//!
//! Everything here operates on desk-scale matrices (dimensions in the tens),
//! so direct dense decompositions are used throughout. Eigen machinery is
//! delegated to nalgebra; the functions below fix ordering conventions and
//! package the generalized eigenproblem used by the frame-bound solvers.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{CoreError, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entry modulus; zero for empty matrices.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted ascending.
///
/// The input is symmetrized as (m + m*)/2 first; callers that need to detect
/// non-Hermitian inputs should check `hermitian_deviation` separately.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Spectral norm (largest singular value), computed as sqrt(lambda_max(m* m)).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let eigs = hermitian_eigenvalues(&gram);
    eigs.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Smallest singular value of a (possibly rectangular) matrix.
pub fn min_singular_value(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    // Use the smaller Gram matrix of the two orientations.
    let gram = if m.ncols() <= m.nrows() {
        m.adjoint() * m
    } else {
        m * m.adjoint()
    };
    let eigs = hermitian_eigenvalues(&gram);
    eigs.first().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// How far a matrix is from Hermitian, in spectral norm.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    spectral_norm(&(m - m.adjoint()))
}

/// Solve the Hermitian-definite generalized eigenproblem  Q v = lambda W v.
///
/// W must be Hermitian positive definite. Returns eigenvalues ascending and
/// eigenvectors (columns, in the original coordinates). Reduction: with
/// W = L L*, the problem becomes the ordinary Hermitian eigenproblem for
/// L^-1 Q L^-*, whose eigenvectors u map back via v = L^-* u.
pub fn generalized_eigen(q: &CMatrix, w: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = q.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    if q.ncols() != n || w.nrows() != n || w.ncols() != n {
        return Err(CoreError::ShapeMismatch(format!(
            "generalized eigenproblem needs square matrices of equal size, got {}x{} and {}x{}",
            q.nrows(),
            q.ncols(),
            w.nrows(),
            w.ncols()
        )));
    }
    let chol = Cholesky::new(w.clone()).ok_or_else(|| {
        CoreError::InvalidArgument(
            "generalized eigenproblem: weight matrix is not positive definite".into(),
        )
    })?;
    let l = chol.l();
    let linv_q = l
        .solve_lower_triangular(q)
        .ok_or_else(|| CoreError::Internal("triangular solve failed".into()))?;
    // right-multiply by L^-*: solve L X = (L^-1 Q)* and take the adjoint
    let x = l
        .solve_lower_triangular(&linv_q.adjoint())
        .ok_or_else(|| CoreError::Internal("triangular solve failed".into()))?;
    let t = x.adjoint();
    let (values, u) = hermitian_eigen(&t);
    // v = L^-* u, i.e. solve L* V = U
    let v = l
        .adjoint()
        .solve_upper_triangular(&u)
        .ok_or_else(|| CoreError::Internal("triangular solve failed".into()))?;
    Ok((values, v))
}

/// Kronecker product in row-major pairing: (A kron B)[(i,k),(j,l)] = A[i,j] B[k,l].
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}
