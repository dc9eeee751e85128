//! Tensor products of modules, 2-inner products, and frames.
//!
//! The tensor of the left module A^m and right module B^m' is the free
//! module of rank m*m' over the spatial tensor algebra, with row-major
//! pairing of both coordinates and points. The 2-inner product on it is
//! *defined* by its factorization on simple tensors,
//!
//! ```text
//! <x1 (x) y1, x2 (x) y2 | xi (x) eta> = <x1, x2 | xi> (x) <y1, y2 | eta>,
//! ```
//!
//! extended sesquilinearly. Pointwise this is the form matrix
//! `M_xi(t) (x) M_eta(t')` with `M_xi(t) = |xi(t)|^2 I - xi(t) xi(t)*`,
//! which is NOT the standard construction of the flattened module: its
//! degenerate directions are `xi(t)-span (x) C + C (x) eta(t')-span`,
//! strictly more than the line through `xi (x) eta`. Frame bounds therefore
//! live on the embedded complement-tensor-complement subspace, and all
//! routines below restrict there.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::algebra::{AlgebraDescriptor, AlgebraElement};
use crate::error::{CoreError, Result};
use crate::frames::TwoFrame;
use crate::hilbert_module::{module_action, ModuleVector};
use crate::linalg::{generalized_eigen, hermitian_eigen, kron, spectral_norm, CMatrix, CVector};
use crate::sample::random_vector;
use crate::two_inner::two_inner;

/// Slack allowed when checking that certified product bounds contain the
/// computed optimal bounds of the product frame.
pub const TENSOR_BOUNDS_SLACK: f64 = 1e-8;

/// Tensor of two module vectors: coordinate (i, j) of the result is
/// `x_i (x) y_j`, at row-major index `i * rank(y) + j`.
pub fn tensor_vector(x: &ModuleVector, y: &ModuleVector) -> Result<ModuleVector> {
    let algebra = AlgebraDescriptor::tensor_of(x.algebra().clone(), y.algebra().clone());
    let mut coords = Vec::with_capacity(x.rank() * y.rank());
    for xi in x.coords() {
        for yj in y.coords() {
            coords.push(xi.tensor(yj));
        }
    }
    ModuleVector::new(algebra, coords)
}

/// The pair (xi, eta) of factor associates, with the pointwise form
/// matrices of the factorized 2-inner product precomputed.
#[derive(Clone, Debug)]
pub struct TensorAssociate {
    left: ModuleVector,
    right: ModuleVector,
    /// M_xi(t) = |xi(t)|^2 I - xi(t) xi(t)* per left point.
    left_forms: Vec<CMatrix>,
    /// M_eta(t') per right point.
    right_forms: Vec<CMatrix>,
}

fn degeneracy_form(v: &CVector) -> CMatrix {
    let nsq: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    let m = v.len();
    CMatrix::identity(m, m).map(|c| c * Complex64::new(nsq, 0.0)) - v * v.adjoint()
}

impl TensorAssociate {
    pub fn new(left: ModuleVector, right: ModuleVector) -> Result<Self> {
        let nl = left.points().ok_or_else(|| {
            CoreError::NonCommutative(left.algebra().to_string())
        })?;
        let nr = right.points().ok_or_else(|| {
            CoreError::NonCommutative(right.algebra().to_string())
        })?;
        let left_forms = (0..nl)
            .map(|t| Ok(degeneracy_form(&left.point_vector(t)?)))
            .collect::<Result<Vec<_>>>()?;
        let right_forms = (0..nr)
            .map(|t| Ok(degeneracy_form(&right.point_vector(t)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TensorAssociate {
            left,
            right,
            left_forms,
            right_forms,
        })
    }

    pub fn left(&self) -> &ModuleVector {
        &self.left
    }

    pub fn right(&self) -> &ModuleVector {
        &self.right
    }

    /// The flattened associate xi (x) eta.
    pub fn vector(&self) -> Result<ModuleVector> {
        tensor_vector(&self.left, &self.right)
    }

    fn flat_algebra(&self) -> AlgebraDescriptor {
        AlgebraDescriptor::tensor_of(
            self.left.algebra().clone(),
            self.right.algebra().clone(),
        )
    }

    fn flat_rank(&self) -> usize {
        self.left.rank() * self.right.rank()
    }

    fn check_flat(&self, v: &ModuleVector) -> Result<()> {
        if v.algebra() != &self.flat_algebra() || v.rank() != self.flat_rank() {
            return Err(CoreError::ShapeMismatch(format!(
                "vector over {} rank {} does not live in the tensor module \
                 over {} rank {}",
                v.algebra(),
                v.rank(),
                self.flat_algebra(),
                self.flat_rank()
            )));
        }
        Ok(())
    }

    /// Evaluates the factorized 2-inner product on flattened vectors:
    /// at point pair (t, t') the value is Y* (M_xi(t) (x) M_eta(t')) X.
    pub fn two_inner(&self, x: &ModuleVector, y: &ModuleVector) -> Result<AlgebraElement> {
        self.check_flat(x)?;
        self.check_flat(y)?;
        let nl = self.left_forms.len();
        let nr = self.right_forms.len();
        let mut entries = Vec::with_capacity(nl * nr);
        for t in 0..nl {
            for tp in 0..nr {
                let form = kron(&self.left_forms[t], &self.right_forms[tp]);
                let xv = x.point_vector(t * nr + tp)?;
                let yv = y.point_vector(t * nr + tp)?;
                entries.push(yv.dotc(&(form * xv)));
            }
        }
        Ok(AlgebraElement::diagonal(entries))
    }
}

/// Outcome of comparing the product frame operator against the Kronecker
/// product of the factor frame operators.
#[derive(Clone, Debug, Serialize)]
pub struct TensorOperatorCheck {
    pub residual: f64,
    pub pass: bool,
}

/// Result of restricting a scalar-left-factor tensor frame to its right
/// factor, with the witness-relative derived bounds.
#[derive(Clone, Debug, Serialize)]
pub struct ScalarFactorRestriction {
    pub lower: f64,
    pub upper: f64,
    pub verified: bool,
}

/// A product frame {x_i (x) y_j} with associate xi (x) eta.
#[derive(Clone, Debug)]
pub struct TensorFrame {
    left: TwoFrame,
    right: TwoFrame,
    associate: TensorAssociate,
    product_vectors: Vec<ModuleVector>,
    certified_bounds: Option<(f64, f64)>,
}

impl TensorFrame {
    /// Builds the product frame and certifies bounds (AC, BD) from the
    /// factor bounds (claimed when present, optimal otherwise). Errors if
    /// either factor fails the lower frame inequality.
    pub fn build(left: TwoFrame, right: TwoFrame, tol: f64) -> Result<Self> {
        let left_bounds = resolve_bounds(&left, tol)?;
        let right_bounds = resolve_bounds(&right, tol)?;
        let certified = (
            left_bounds.0 * right_bounds.0,
            left_bounds.1 * right_bounds.1,
        );
        let mut tf = Self::assemble(left, right)?;
        tf.certified_bounds = Some(certified);
        Ok(tf)
    }

    /// Builds the product family without validating that the factors are
    /// frames; used by checks that must accept degenerate input.
    pub fn assemble(left: TwoFrame, right: TwoFrame) -> Result<Self> {
        let associate = TensorAssociate::new(left.associate().clone(), right.associate().clone())?;
        let mut product_vectors = Vec::with_capacity(left.len() * right.len());
        for x in left.vectors() {
            for y in right.vectors() {
                product_vectors.push(tensor_vector(x, y)?);
            }
        }
        Ok(TensorFrame {
            left,
            right,
            associate,
            product_vectors,
            certified_bounds: None,
        })
    }

    pub fn left(&self) -> &TwoFrame {
        &self.left
    }

    pub fn right(&self) -> &TwoFrame {
        &self.right
    }

    pub fn associate(&self) -> &TensorAssociate {
        &self.associate
    }

    /// All x_i (x) y_j in row-major (i, j) order.
    pub fn product_vectors(&self) -> &[ModuleVector] {
        &self.product_vectors
    }

    pub fn certified_bounds(&self) -> Option<(f64, f64)> {
        self.certified_bounds
    }

    /// Per point pair: orthonormal basis of the range of the tensor form,
    /// taken from its eigenvectors. The range has dimension
    /// (m-1)(m'-1) exactly; anything else signals an internal error.
    fn range_basis(&self, t: usize, tp: usize) -> Result<(CMatrix, CMatrix)> {
        let w = kron(
            &self.associate.left_forms[t],
            &self.associate.right_forms[tp],
        );
        let dim = w.nrows();
        let r = (self.associate.left.rank() - 1) * (self.associate.right.rank() - 1);
        let (eigs, vecs) = hermitian_eigen(&w);
        let cutoff = 0.5 * eigs.last().copied().unwrap_or(0.0);
        let kept: Vec<usize> = (0..dim).filter(|&k| eigs[k] > cutoff).collect();
        if kept.len() != r {
            return Err(CoreError::Internal(format!(
                "tensor form rank {} at point pair ({t}, {tp}), expected {r}",
                kept.len()
            )));
        }
        let mut q = CMatrix::zeros(dim, r);
        for (col, &k) in kept.iter().enumerate() {
            q.set_column(col, &vecs.column(k));
        }
        Ok((q, w))
    }

    /// Optimal frame bounds of the product family, computed entirely in the
    /// flattened module: at each point pair the middle form of the frame
    /// inequality is solved against the tensor form on its range.
    pub fn optimal_bounds(&self, tol: f64) -> Result<(f64, f64)> {
        let nl = self.associate.left_forms.len();
        let nr = self.associate.right_forms.len();
        let mut a_opt = f64::INFINITY;
        let mut b_opt: f64 = 0.0;
        for t in 0..nl {
            for tp in 0..nr {
                let (q, w) = self.range_basis(t, tp)?;
                let w_r = q.adjoint() * &w * &q;
                let r = q.ncols();
                let mut mid = CMatrix::zeros(r, r);
                for z in &self.product_vectors {
                    let zv = z.point_vector(t * nr + tp)?;
                    let y = q.adjoint() * (&w * zv);
                    mid += &y * y.adjoint();
                }
                let (eigs, _) = generalized_eigen(&mid, &w_r)?;
                a_opt = a_opt.min(*eigs.first().expect("range dim >= 1"));
                b_opt = b_opt.max(*eigs.last().expect("range dim >= 1"));
            }
        }
        if !a_opt.is_finite() || a_opt <= tol * b_opt.max(1.0) {
            return Err(CoreError::NotAFrame {
                a_opt: if a_opt.is_finite() { a_opt } else { 0.0 },
                b_opt,
            });
        }
        Ok((a_opt, b_opt))
    }

    /// Compares the matrix of the product frame operator on the embedded
    /// complement-tensor-complement basis against the Kronecker product of
    /// the factor frame operator matrices.
    ///
    /// The left side is computed honestly in the flattened module (analysis
    /// coefficients through the tensor 2-inner product, synthesis through
    /// the module action); the right side reuses the factor machinery.
    pub fn frame_operator_check(&self, tol: f64) -> Result<TensorOperatorCheck> {
        let left_ops = self.left.operators(tol)?;
        let right_ops = self.right.operators(tol)?;
        let left_basis = left_ops.quotient().complement_basis().to_vec();
        let right_basis = right_ops.quotient().complement_basis().to_vec();

        // embedded basis vectors b^E_k (x) b^F_l, row-major (k, l)
        let mut embedded = Vec::with_capacity(left_basis.len() * right_basis.len());
        for bk in &left_basis {
            for bl in &right_basis {
                embedded.push(tensor_vector(bk, bl)?);
            }
        }

        // S(B) = sum_ij <B, z_ij | xi (x) eta> z_ij in the flattened module
        let mut images = Vec::with_capacity(embedded.len());
        for b in &embedded {
            let mut acc = ModuleVector::zero(
                &self.associate.flat_algebra(),
                self.associate.flat_rank(),
            );
            for z in &self.product_vectors {
                let c = self.associate.two_inner(b, z)?;
                acc = acc.add(&module_action(&c, z)?)?;
            }
            images.push(acc);
        }

        let nl = self.associate.left_forms.len();
        let nr = self.associate.right_forms.len();
        let dim = embedded.len();
        let mut residual: f64 = 0.0;
        for t in 0..nl {
            for tp in 0..nr {
                let pt = t * nr + tp;
                let mut p = CMatrix::zeros(dim, dim);
                for (col, img) in images.iter().enumerate() {
                    let iv = img.point_vector(pt)?;
                    for (row, b) in embedded.iter().enumerate() {
                        p[(row, col)] = b.point_vector(pt)?.dotc(&iv);
                    }
                }
                let expected = kron(left_ops.frame_matrix(t), right_ops.frame_matrix(tp));
                residual = residual.max(spectral_norm(&(p - expected)));
            }
        }
        Ok(TensorOperatorCheck {
            residual,
            pass: residual <= tol,
        })
    }

    /// Restriction of a scalar-left-factor product frame to its right
    /// factor. The witness x fixes the derived bounds
    /// `A1 = A <x,x|xi> / sum_i |<x,x_i|xi>|^2` (same for B), which are then
    /// verified against sampled right-module vectors.
    pub fn scalar_factor_restriction(
        &self,
        witness: &ModuleVector,
        samples: usize,
        rng: &mut impl Rng,
        tol: f64,
    ) -> Result<ScalarFactorRestriction> {
        if self.left.associate().algebra() != &AlgebraDescriptor::diagonal(1) {
            return Err(CoreError::InvalidArgument(format!(
                "scalar factor restriction needs left algebra diagonal(1), got {}",
                self.left.associate().algebra()
            )));
        }
        let (a, b) = match self.certified_bounds {
            Some(bounds) => bounds,
            None => self.optimal_bounds(tol)?,
        };
        let xi = self.left.associate();
        let beta = two_inner(witness, witness, xi)?.diagonal_entries().expect("diag(1)")[0].re;
        let mut delta = 0.0;
        for x_i in self.left.vectors() {
            let c = two_inner(witness, x_i, xi)?.diagonal_entries().expect("diag(1)")[0];
            delta += c.norm_sqr();
        }
        if delta <= tol {
            return Err(CoreError::DegenerateInput(format!(
                "witness has sum_i |<x, x_i | xi>|^2 = {delta:.3e}"
            )));
        }
        let lower = a * beta / delta;
        let upper = b * beta / delta;

        let eta = self.right.associate();
        let mut verified = true;
        for _ in 0..samples {
            let y = random_vector(eta.algebra(), eta.rank(), rng);
            let gyy = two_inner(&y, &y, eta)?;
            let mut mid = AlgebraElement::zero(eta.algebra());
            for yj in self.right.vectors() {
                let c = two_inner(&y, yj, eta)?;
                mid = mid.add(&c.mul(&c.adjoint())?)?;
            }
            let lo = gyy.scale(Complex64::new(lower, 0.0));
            let hi = gyy.scale(Complex64::new(upper, 0.0));
            if !lo.leq(&mid, tol)? || !mid.leq(&hi, tol)? {
                verified = false;
                break;
            }
        }
        Ok(ScalarFactorRestriction {
            lower,
            upper,
            verified,
        })
    }

    /// Checks the reconstruction identity
    /// `x (x) y = sum_ij <x (x) y, x_i (x) y_j | xi (x) eta> (x_i (x) y_j)`
    /// on the embedded complement basis (equality modulo the degenerate
    /// directions of the tensor form). When it holds, the product frame
    /// must be normalized tight: the optimal bounds are verified to be
    /// (1, 1) before returning true.
    pub fn tightness_from_reconstruction(&self, tol: f64) -> Result<bool> {
        let left_ops = self.left.operators(tol)?;
        let right_ops = self.right.operators(tol)?;
        let nl = self.associate.left_forms.len();
        let nr = self.associate.right_forms.len();

        for bk in left_ops.quotient().complement_basis() {
            for bl in right_ops.quotient().complement_basis() {
                let b = tensor_vector(bk, bl)?;
                let mut acc = ModuleVector::zero(
                    &self.associate.flat_algebra(),
                    self.associate.flat_rank(),
                );
                for z in &self.product_vectors {
                    let c = self.associate.two_inner(&b, z)?;
                    acc = acc.add(&module_action(&c, z)?)?;
                }
                // compare after projecting onto the embedded subspace,
                // which is the range of the tensor form pointwise
                let mut worst: f64 = 0.0;
                for t in 0..nl {
                    for tp in 0..nr {
                        let pt = t * nr + tp;
                        let q = kron(
                            left_ops.quotient().point_basis(t),
                            right_ops.quotient().point_basis(tp),
                        );
                        let diff = q.adjoint() * (acc.point_vector(pt)? - b.point_vector(pt)?);
                        worst = worst.max(diff.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt());
                    }
                }
                if worst > tol {
                    return Ok(false);
                }
            }
        }

        let r = (self.associate.left.rank() - 1) * (self.associate.right.rank() - 1);
        let check_tol = (r as f64).sqrt() * tol * 10.0;
        let (a_opt, b_opt) = self.optimal_bounds(tol)?;
        if (a_opt - 1.0).abs() > check_tol || (b_opt - 1.0).abs() > check_tol {
            return Err(CoreError::Internal(format!(
                "tensor reconstruction identity held but bounds are \
                 ({a_opt}, {b_opt}), not (1, 1)"
            )));
        }
        Ok(true)
    }
}

fn resolve_bounds(frame: &TwoFrame, tol: f64) -> Result<(f64, f64)> {
    let (a_opt, b_opt) = frame.optimal_bounds(tol)?;
    match frame.claimed_bounds() {
        Some((a, b)) => {
            if a > a_opt + tol || b_opt > b + tol {
                return Err(CoreError::InvalidArgument(format!(
                    "claimed factor bounds ({a}, {b}) do not contain the \
                     optimal bounds ({a_opt}, {b_opt})"
                )));
            }
            Ok((a, b))
        }
        None => Ok((a_opt, b_opt)),
    }
}

/// Machine-readable summary of the tensor suite for a frame pair.
#[derive(Clone, Debug, Serialize)]
pub struct TensorCheckReport {
    pub bounds_certified: (f64, f64),
    pub bounds_optimal: (f64, f64),
    pub frame_operator_residual: f64,
    pub pass: bool,
}

/// Builds the product of two frames and runs the tensor checks: certified
/// bounds must contain the computed optimal bounds and the product frame
/// operator must factor as the Kronecker product of the factor operators.
pub fn tensor_check(left: &TwoFrame, right: &TwoFrame, tol: f64) -> Result<TensorCheckReport> {
    let tf = TensorFrame::build(left.clone(), right.clone(), tol)?;
    let certified = tf.certified_bounds().expect("build certifies bounds");
    let optimal = tf.optimal_bounds(tol)?;
    let op = tf.frame_operator_check(tol)?;
    let contained = certified.0 <= optimal.0 + TENSOR_BOUNDS_SLACK
        && optimal.1 <= certified.1 + TENSOR_BOUNDS_SLACK;
    Ok(TensorCheckReport {
        bounds_certified: certified,
        bounds_optimal: optimal,
        frame_operator_residual: op.residual,
        pass: contained && op.pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_frame_instance;
    use crate::linalg::{cplx, max_abs};
    use crate::sample::{random_element, random_hermitian, random_positive, rng_from_seed};

    const TOL: f64 = 1e-10;

    fn e(rank: usize, j: usize) -> ModuleVector {
        ModuleVector::standard_basis(&AlgebraDescriptor::diagonal(1), rank, j).unwrap()
    }

    /// E = C^3, xi = e1, frame {e2, e3, e2+e3}: optimal bounds (1, 3).
    fn canonical_frame() -> TwoFrame {
        let vectors = vec![e(3, 1), e(3, 2), e(3, 1).add(&e(3, 2)).unwrap()];
        TwoFrame::new(vectors, e(3, 0), TOL).unwrap()
    }

    /// Parseval singleton {e2} with xi = e1 on C^2.
    fn parseval_frame() -> TwoFrame {
        TwoFrame::new(vec![e(2, 1)], e(2, 0), TOL).unwrap()
    }

    /// Tight frame {sqrt(2) e2} with xi = e1 on C^2: bounds (2, 2).
    fn tight_two_frame() -> TwoFrame {
        let v = e(2, 1).scale(cplx(2.0_f64.sqrt(), 0.0));
        TwoFrame::new(vec![v], e(2, 0), TOL).unwrap()
    }

    #[test]
    fn tensor_vector_basis_bookkeeping() {
        // e2 (x) e1 in C^2 (x) C^2 lands at row-major index 1*2 + 0 = 2
        let t = tensor_vector(&e(2, 1), &e(2, 0)).unwrap();
        assert_eq!(t.rank(), 4);
        for j in 0..4 {
            let entry = t.coord(j).diagonal_entries().unwrap()[0];
            let expect = if j == 2 { 1.0 } else { 0.0 };
            assert!((entry - cplx(expect, 0.0)).norm() < 1e-15);
        }
        // zero factor collapses the product
        let z = ModuleVector::zero(&AlgebraDescriptor::diagonal(1), 2);
        assert!(tensor_vector(&z, &e(2, 1)).unwrap().is_zero(0.0));
    }

    #[test]
    fn module_action_distributes_over_tensor() {
        let da = AlgebraDescriptor::diagonal(2);
        let db = AlgebraDescriptor::diagonal(3);
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let a = random_element(&da, &mut rng);
            let b = random_element(&db, &mut rng);
            let x = crate::sample::random_vector(&da, 2, &mut rng);
            let y = crate::sample::random_vector(&db, 3, &mut rng);
            let lhs = module_action(&a.tensor(&b), &tensor_vector(&x, &y).unwrap()).unwrap();
            let rhs = tensor_vector(
                &module_action(&a, &x).unwrap(),
                &module_action(&b, &y).unwrap(),
            )
            .unwrap();
            assert!(lhs.sub(&rhs).unwrap().is_zero(1e-12));
        }
    }

    #[test]
    fn two_inner_factorizes_on_simple_tensors() {
        let da = AlgebraDescriptor::diagonal(2);
        let db = AlgebraDescriptor::diagonal(2);
        let mut rng = rng_from_seed(5);
        for _ in 0..200 {
            let x1 = crate::sample::random_vector(&da, 3, &mut rng);
            let x2 = crate::sample::random_vector(&da, 3, &mut rng);
            let y1 = crate::sample::random_vector(&db, 2, &mut rng);
            let y2 = crate::sample::random_vector(&db, 2, &mut rng);
            let xi = crate::sample::random_vector(&da, 3, &mut rng);
            let eta = crate::sample::random_vector(&db, 2, &mut rng);
            let assoc = TensorAssociate::new(xi.clone(), eta.clone()).unwrap();

            let lhs = assoc
                .two_inner(
                    &tensor_vector(&x1, &y1).unwrap(),
                    &tensor_vector(&x2, &y2).unwrap(),
                )
                .unwrap();
            let rhs = two_inner(&x1, &x2, &xi)
                .unwrap()
                .tensor(&two_inner(&y1, &y2, &eta).unwrap());
            assert!(lhs.sub(&rhs).unwrap().norm() <= 1e-9, "factorization failed");
        }
    }

    #[test]
    fn two_inner_extends_bilinearly_to_sums() {
        let da = AlgebraDescriptor::diagonal(2);
        let db = AlgebraDescriptor::diagonal(2);
        let mut rng = rng_from_seed(6);
        for _ in 0..100 {
            let xi = crate::sample::random_vector(&da, 3, &mut rng);
            let eta = crate::sample::random_vector(&db, 2, &mut rng);
            let assoc = TensorAssociate::new(xi.clone(), eta.clone()).unwrap();

            let terms: Vec<(ModuleVector, ModuleVector)> = (0..3)
                .map(|_| {
                    (
                        crate::sample::random_vector(&da, 3, &mut rng),
                        crate::sample::random_vector(&db, 2, &mut rng),
                    )
                })
                .collect();
            let others: Vec<(ModuleVector, ModuleVector)> = (0..2)
                .map(|_| {
                    (
                        crate::sample::random_vector(&da, 3, &mut rng),
                        crate::sample::random_vector(&db, 2, &mut rng),
                    )
                })
                .collect();

            // direct evaluation on the flattened sums
            let mut z = ModuleVector::zero(&AlgebraDescriptor::diagonal(4), 6);
            for (u, v) in &terms {
                z = z.add(&tensor_vector(u, v).unwrap()).unwrap();
            }
            let mut zp = ModuleVector::zero(&AlgebraDescriptor::diagonal(4), 6);
            for (s, t) in &others {
                zp = zp.add(&tensor_vector(s, t).unwrap()).unwrap();
            }
            let direct = assoc.two_inner(&z, &zp).unwrap();

            // term-by-term expansion through the factorized formula
            let mut expanded = AlgebraElement::zero(&AlgebraDescriptor::diagonal(4));
            for (u, v) in &terms {
                for (s, t) in &others {
                    let term = two_inner(u, s, &xi)
                        .unwrap()
                        .tensor(&two_inner(v, t, &eta).unwrap());
                    expanded = expanded.add(&term).unwrap();
                }
            }
            assert!(direct.sub(&expanded).unwrap().norm() <= 1e-9);
        }
    }

    #[test]
    fn order_compatible_with_tensoring() {
        // a <= b implies a (x) x <= b (x) x for positive x
        let da = AlgebraDescriptor::diagonal(3);
        let db = AlgebraDescriptor::matrix(2);
        let mut rng = rng_from_seed(8);
        for _ in 0..100 {
            let a = random_hermitian(&da, &mut rng);
            let c = random_element(&da, &mut rng);
            let b = a.add(&c.mul(&c.adjoint()).unwrap()).unwrap(); // a <= b
            let x = random_positive(&db, &mut rng);
            assert!(a.leq(&b, 1e-12).unwrap());
            let lhs = a.tensor(&x);
            let rhs = b.tensor(&x);
            assert!(lhs.leq(&rhs, 1e-9).unwrap());
        }
    }

    #[test]
    fn parseval_tensor_parseval_is_parseval() {
        let report = tensor_check(&parseval_frame(), &parseval_frame(), TOL).unwrap();
        assert_eq!(report.bounds_certified, (1.0, 1.0));
        assert!((report.bounds_optimal.0 - 1.0).abs() <= 1e-9);
        assert!((report.bounds_optimal.1 - 1.0).abs() <= 1e-9);
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn certified_product_bounds() {
        // (1,3) (x) (2,2) certifies (2, 6); optimal bounds must sit inside
        let left = canonical_frame().with_claimed_bounds(1.0, 3.0).unwrap();
        let right = tight_two_frame().with_claimed_bounds(2.0, 2.0).unwrap();
        let report = tensor_check(&left, &right, TOL).unwrap();
        assert_eq!(report.bounds_certified, (2.0, 6.0));
        assert!(report.bounds_certified.0 <= report.bounds_optimal.0 + 1e-8);
        assert!(report.bounds_optimal.1 <= report.bounds_certified.1 + 1e-8);
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn non_frame_factor_is_rejected() {
        // {e2} in C^3 leaves the e3 direction uncovered
        let not_frame = TwoFrame::new(vec![e(3, 1)], e(3, 0), TOL).unwrap();
        assert!(matches!(
            TensorFrame::build(not_frame, parseval_frame(), TOL),
            Err(CoreError::NotAFrame { .. })
        ));
    }

    #[test]
    fn frame_operator_factorizes_on_canonical_pair() {
        let tf = TensorFrame::build(canonical_frame(), parseval_frame(), TOL).unwrap();
        let check = tf.frame_operator_check(1e-9).unwrap();
        assert!(check.pass, "residual {}", check.residual);
        // the expected Kronecker factor is [[2,1],[1,2]] (x) [1]
        let left_ops = tf.left().operators(TOL).unwrap();
        let right_ops = tf.right().operators(TOL).unwrap();
        let k = kron(left_ops.frame_matrix(0), right_ops.frame_matrix(0));
        let expect = CMatrix::from_row_slice(
            2,
            2,
            &[cplx(2.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(2.0, 0.0)],
        );
        assert!(max_abs(&(k - expect)) < 1e-12);
    }

    #[test]
    fn frame_operator_factorizes_on_random_pairs() {
        let desc = AlgebraDescriptor::diagonal(2);
        let mut rng = rng_from_seed(21);
        for _ in 0..10 {
            let (_, left) = generate_frame_instance(&desc, 3, 4, TOL, 0.01, &mut rng).unwrap();
            let (_, right) = generate_frame_instance(&desc, 3, 4, TOL, 0.01, &mut rng).unwrap();
            let tf = TensorFrame::build(left, right, TOL).unwrap();
            let check = tf.frame_operator_check(1e-9).unwrap();
            assert!(check.pass, "residual {}", check.residual);
        }
    }

    #[test]
    fn product_bounds_are_products_of_factor_bounds() {
        let desc = AlgebraDescriptor::diagonal(1);
        let mut rng = rng_from_seed(33);
        for _ in 0..10 {
            let (_, left) = generate_frame_instance(&desc, 3, 4, TOL, 0.01, &mut rng).unwrap();
            let (_, right) = generate_frame_instance(&desc, 3, 5, TOL, 0.01, &mut rng).unwrap();
            let (a, b) = left.optimal_bounds(TOL).unwrap();
            let (c, d) = right.optimal_bounds(TOL).unwrap();
            let tf = TensorFrame::build(left, right, TOL).unwrap();
            let (ac, bd) = tf.optimal_bounds(TOL).unwrap();
            assert!((ac - a * c).abs() <= 1e-8 * (1.0 + a * c), "{ac} vs {}", a * c);
            assert!((bd - b * d).abs() <= 1e-8 * (1.0 + b * d), "{bd} vs {}", b * d);
        }
    }

    #[test]
    fn scalar_factor_restriction_parseval() {
        let tf = TensorFrame::build(parseval_frame(), parseval_frame(), TOL).unwrap();
        let mut rng = rng_from_seed(2);
        let out = tf
            .scalar_factor_restriction(&e(2, 1), 50, &mut rng, 1e-9)
            .unwrap();
        assert!((out.lower - 1.0).abs() < 1e-12);
        assert!((out.upper - 1.0).abs() < 1e-12);
        assert!(out.verified);

        // the associate itself is a degenerate witness
        assert!(matches!(
            tf.scalar_factor_restriction(&e(2, 0), 10, &mut rng, 1e-9),
            Err(CoreError::DegenerateInput(_))
        ));
    }

    #[test]
    fn scalar_factor_restriction_scaled() {
        // Parseval left factor, right factor with bounds (2, 6)
        let right = {
            let s = cplx(2.0_f64.sqrt(), 0.0);
            let vectors = vec![
                e(3, 1).scale(s),
                e(3, 2).scale(s),
                e(3, 1).add(&e(3, 2)).unwrap().scale(s),
            ];
            TwoFrame::new(vectors, e(3, 0), TOL).unwrap()
        };
        let (c, d) = right.optimal_bounds(TOL).unwrap();
        assert!((c - 2.0).abs() < 1e-12 && (d - 6.0).abs() < 1e-12);

        let tf = TensorFrame::build(parseval_frame(), right, TOL).unwrap();
        let (ca, cb) = tf.certified_bounds().unwrap();
        assert!((ca - 2.0).abs() < 1e-12 && (cb - 6.0).abs() < 1e-12);
        let mut rng = rng_from_seed(4);
        let out = tf
            .scalar_factor_restriction(&e(2, 1), 50, &mut rng, 1e-9)
            .unwrap();
        assert!((out.lower - 2.0).abs() < 1e-12);
        assert!((out.upper - 6.0).abs() < 1e-12);
        assert!(out.verified);
    }

    #[test]
    fn tensor_tightness() {
        // {e2, e3}/e1 (x) {e2}/e1: both operators are the identity
        let left = TwoFrame::new(vec![e(3, 1), e(3, 2)], e(3, 0), TOL).unwrap();
        let tf = TensorFrame::assemble(left, parseval_frame()).unwrap();
        assert!(tf.tightness_from_reconstruction(1e-9).unwrap());

        // left operator [[2,1],[1,2]] != id breaks the identity
        let tf = TensorFrame::assemble(canonical_frame(), parseval_frame()).unwrap();
        assert!(!tf.tightness_from_reconstruction(1e-9).unwrap());

        // empty family reconstructs nothing
        let empty = TwoFrame::new(Vec::new(), e(3, 0), TOL).unwrap();
        let tf = TensorFrame::assemble(empty, parseval_frame()).unwrap();
        assert!(!tf.tightness_from_reconstruction(1e-9).unwrap());
    }
}
