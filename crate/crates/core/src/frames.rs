//! 2-frames relative to an associate vector: bound verification, optimal
//! bounds, analysis/synthesis/frame operators, and reconstruction.
//!
//! Over diagonal(n) the operator inequality
//!
//! ```text
//! A <x,x|xi>  <=  sum_i <x,x_i|xi><x_i,x|xi>  <=  B <x,x|xi>
//! ```
//!
//! decomposes into n independent scalar problems. At each point the frame
//! data restricts to the complement of xi(t) and the optimal bounds are the
//! extreme generalized eigenvalues against the Gram matrix of the induced
//! inner product there. That pointwise strategy is the backbone of every
//! routine in this module.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraElement;
use crate::error::{CoreError, Result};
use crate::hilbert_module::{is_a_independent, module_action, ModuleFrame, ModuleVector};
use crate::linalg::{generalized_eigen, hermitian_eigenvalues, spectral_norm, CMatrix, CVector};
use crate::quotient::QuotientSpace;
use crate::two_inner::{pointwise_colinear, two_inner};

/// Singular-value threshold used when a constructor has to decide
/// A-independence and no explicit tolerance is available (JSON intake).
pub const DEFAULT_INDEPENDENCE_TOL: f64 = 1e-10;

/// A finite vector family with an associate and optional claimed bounds.
#[derive(Clone, Debug)]
pub struct TwoFrame {
    vectors: Vec<ModuleVector>,
    associate: ModuleVector,
    claimed_bounds: Option<(f64, f64)>,
}

impl TwoFrame {
    /// Builds a frame candidate, enforcing that every vector is
    /// A-independent of the associate (pairwise, decided pointwise).
    pub fn new(vectors: Vec<ModuleVector>, associate: ModuleVector, tol: f64) -> Result<Self> {
        if associate.rank() < 2 {
            return Err(CoreError::InvalidArgument(
                "2-frames need module rank >= 2".into(),
            ));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.algebra() != associate.algebra() || v.rank() != associate.rank() {
                return Err(CoreError::ShapeMismatch(format!(
                    "frame vector {i} does not match the associate's module"
                )));
            }
            if !is_a_independent(&[v.clone(), associate.clone()], tol)? {
                return Err(CoreError::Dependent(format!(
                    "frame vector {i} is A-dependent with the associate"
                )));
            }
        }
        Ok(TwoFrame {
            vectors,
            associate,
            claimed_bounds: None,
        })
    }

    fn new_unchecked(
        vectors: Vec<ModuleVector>,
        associate: ModuleVector,
        claimed_bounds: Option<(f64, f64)>,
    ) -> Self {
        TwoFrame {
            vectors,
            associate,
            claimed_bounds,
        }
    }

    pub fn with_claimed_bounds(mut self, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a <= b) {
            return Err(CoreError::InvalidArgument(format!(
                "claimed bounds must satisfy 0 < A <= B, got ({a}, {b})"
            )));
        }
        self.claimed_bounds = Some((a, b));
        Ok(self)
    }

    pub fn vectors(&self) -> &[ModuleVector] {
        &self.vectors
    }

    pub fn associate(&self) -> &ModuleVector {
        &self.associate
    }

    pub fn claimed_bounds(&self) -> Option<(f64, f64)> {
        self.claimed_bounds
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Analysis coefficients {<x, x_i | xi>}_i.
    pub fn analysis(&self, x: &ModuleVector) -> Result<Vec<AlgebraElement>> {
        self.vectors
            .iter()
            .map(|xi| two_inner(x, xi, &self.associate))
            .collect()
    }

    /// Synthesis sum_i c_i x_i.
    pub fn synthesis(&self, coeffs: &[AlgebraElement]) -> Result<ModuleVector> {
        if coeffs.len() != self.vectors.len() {
            return Err(CoreError::ShapeMismatch(format!(
                "{} coefficients for {} frame vectors",
                coeffs.len(),
                self.vectors.len()
            )));
        }
        let mut acc = ModuleVector::zero(self.associate.algebra(), self.associate.rank());
        for (c, v) in coeffs.iter().zip(&self.vectors) {
            acc = acc.add(&module_action(c, v)?)?;
        }
        Ok(acc)
    }

    /// The frame operator S x = sum_i <x, x_i | xi> x_i.
    pub fn frame_operator_apply(&self, x: &ModuleVector) -> Result<ModuleVector> {
        let coeffs = self.analysis(x)?;
        self.synthesis(&coeffs)
    }

    /// Builds the pointwise operator data for this frame.
    pub fn operators(&self, tol: f64) -> Result<FrameOperators> {
        FrameOperators::build(self, tol)
    }

    /// Optimal frame bounds (extreme generalized eigenvalues over all
    /// points). Signals not-a-frame when the lower bound is within
    /// tolerance of zero.
    pub fn optimal_bounds(&self, tol: f64) -> Result<(f64, f64)> {
        self.operators(tol)?.optimal_bounds(tol)
    }

    /// Checks a claimed bound pair against the optimal bounds, producing an
    /// eigenvector witness on failure.
    pub fn verify_bounds(&self, a: f64, b: f64, tol: f64) -> Result<BoundsVerdict> {
        if !(a > 0.0 && a <= b) {
            return Err(CoreError::InvalidArgument(format!(
                "claimed bounds must satisfy 0 < A <= B, got ({a}, {b})"
            )));
        }
        let ops = self.operators(tol)?;
        let (a_opt, b_opt) = ops.optimal_bounds(tol)?;
        let mut witness = None;
        if a > a_opt + tol {
            witness = Some(ops.extreme_witness(BoundSide::Lower)?);
        } else if b_opt > b + tol {
            witness = Some(ops.extreme_witness(BoundSide::Upper)?);
        }
        Ok(BoundsVerdict {
            claimed: (a, b),
            optimal: (a_opt, b_opt),
            pass: witness.is_none(),
            witness,
        })
    }

    /// Reconstruction through the inverse frame operator: computes
    /// y = S^-1(project x) pointwise and returns the projected synthesis of
    /// the analysis coefficients of y, which recovers project(x).
    pub fn reconstruct(&self, x: &ModuleVector, tol: f64) -> Result<ModuleVector> {
        let ops = self.operators(tol)?;
        ops.optimal_bounds(tol)?; // not-a-frame guard
        let px = ops.quotient().project(x)?;
        let coords = ops.quotient().complement_coords(&px)?;
        let solved: Vec<CVector> = coords
            .iter()
            .enumerate()
            .map(|(t, v)| ops.solve_frame_system(t, v))
            .collect::<Result<Vec<_>>>()?;
        let y = ops.quotient().vector_from_coords(&solved)?;
        let coeffs = self.analysis(&y)?;
        let out = self.synthesis(&coeffs)?;
        ops.quotient().project(&out)
    }
}

/// Which side of the frame inequality a witness violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    Lower,
    Upper,
}

/// A point, eigenvalue, and embedded eigenvector exhibiting a bound value.
#[derive(Clone, Debug, Serialize)]
pub struct BoundsWitness {
    pub side: BoundSide,
    pub point: usize,
    /// Rayleigh quotient of the frame operator at the witness.
    pub quadratic_form_value: f64,
    pub vector: ModuleVector,
}

/// Outcome of verifying claimed bounds against computed optimal bounds.
#[derive(Clone, Debug, Serialize)]
pub struct BoundsVerdict {
    pub claimed: (f64, f64),
    pub optimal: (f64, f64),
    pub pass: bool,
    pub witness: Option<BoundsWitness>,
}

struct PointExtremes {
    min: f64,
    max: f64,
    min_vec: CVector,
    max_vec: CVector,
}

/// Pointwise matrices of the synthesis and frame operators on the
/// complement, plus the extreme generalized eigenvalues per point.
pub struct FrameOperators {
    quotient: QuotientSpace,
    /// Per point: d x N complement coordinates of the frame vectors.
    synthesis_matrices: Vec<CMatrix>,
    /// Per point: S(t) = |xi(t)|^2 V(t) V(t)*, the frame operator matrix.
    frame_matrices: Vec<CMatrix>,
    extremes: Vec<PointExtremes>,
}

impl FrameOperators {
    pub fn build(frame: &TwoFrame, tol: f64) -> Result<Self> {
        let quotient = QuotientSpace::build(frame.associate(), tol)?;
        let n_points = quotient.points();
        let d = quotient.complement_dim();
        let n_vecs = frame.len();

        let mut synthesis_matrices = Vec::with_capacity(n_points);
        let mut frame_matrices = Vec::with_capacity(n_points);
        let mut extremes = Vec::with_capacity(n_points);
        for t in 0..n_points {
            let mut v = CMatrix::zeros(d, n_vecs);
            for (i, x) in frame.vectors().iter().enumerate() {
                let coords = quotient.point_basis(t).adjoint() * x.point_vector(t)?;
                v.set_column(i, &coords);
            }
            let scale = Complex64::new(quotient.xi_norm_sq()[t], 0.0);
            let s = (&v * v.adjoint()).map(|c| c * scale);

            // The middle form of the frame inequality in complement
            // coordinates is the Gram of the analysis map; solve it against
            // the Gram of <.,.|xi> on the complement.
            let analysis = v.adjoint().map(|c| c * scale); // N x d
            let q = analysis.adjoint() * &analysis;
            let w = &quotient.gram()[t];
            let (eigs, vecs) = generalized_eigen(&q, w)?;
            let lo = *eigs.first().expect("complement dim >= 1");
            let hi = *eigs.last().expect("complement dim >= 1");
            extremes.push(PointExtremes {
                min: lo,
                max: hi,
                min_vec: vecs.column(0).clone_owned(),
                max_vec: vecs.column(d - 1).clone_owned(),
            });
            synthesis_matrices.push(v);
            frame_matrices.push(s);
        }
        Ok(FrameOperators {
            quotient,
            synthesis_matrices,
            frame_matrices,
            extremes,
        })
    }

    pub fn quotient(&self) -> &QuotientSpace {
        &self.quotient
    }

    pub fn synthesis_matrix(&self, t: usize) -> &CMatrix {
        &self.synthesis_matrices[t]
    }

    pub fn frame_matrix(&self, t: usize) -> &CMatrix {
        &self.frame_matrices[t]
    }

    pub fn points(&self) -> usize {
        self.frame_matrices.len()
    }

    /// Extreme generalized eigenvalues at one point.
    pub fn point_spectrum(&self, t: usize) -> (f64, f64) {
        (self.extremes[t].min, self.extremes[t].max)
    }

    /// Global optimal bounds; not-a-frame when the lower one is within
    /// tol * max(1, B_opt) of zero.
    pub fn optimal_bounds(&self, tol: f64) -> Result<(f64, f64)> {
        let a_opt = self
            .extremes
            .iter()
            .map(|e| e.min)
            .fold(f64::INFINITY, f64::min);
        let b_opt = self.extremes.iter().map(|e| e.max).fold(0.0, f64::max);
        if !a_opt.is_finite() || a_opt <= tol * b_opt.max(1.0) {
            return Err(CoreError::NotAFrame {
                a_opt: if a_opt.is_finite() { a_opt } else { 0.0 },
                b_opt,
            });
        }
        Ok((a_opt, b_opt))
    }

    /// Operator norm of the synthesis map against the quotient geometry:
    /// max over points of |xi(t)| sigma_max(V(t)).
    pub fn synthesis_norm(&self) -> f64 {
        self.synthesis_matrices
            .iter()
            .zip(self.quotient.xi_norm_sq())
            .map(|(v, &nsq)| nsq.sqrt() * spectral_norm(v))
            .fold(0.0, f64::max)
    }

    /// Operator norm of the frame operator: max over points of
    /// lambda_max(S(t)).
    pub fn frame_operator_norm(&self) -> f64 {
        self.frame_matrices
            .iter()
            .map(|s| hermitian_eigenvalues(s).last().copied().unwrap_or(0.0))
            .fold(0.0, f64::max)
    }

    /// Solves S(t) w = v at one point.
    fn solve_frame_system(&self, t: usize, v: &CVector) -> Result<CVector> {
        let s = &self.frame_matrices[t];
        if let Some(chol) = s.clone().cholesky() {
            return Ok(chol.solve(v));
        }
        s.clone()
            .lu()
            .solve(v)
            .ok_or_else(|| CoreError::Internal("singular frame operator solve".into()))
    }

    /// Embeds the extreme eigenvector of one side as a module vector
    /// supported at the extreme point.
    fn extreme_witness(&self, side: BoundSide) -> Result<BoundsWitness> {
        let (point, value, raw) = match side {
            BoundSide::Lower => {
                let (t, e) = self
                    .extremes
                    .iter()
                    .enumerate()
                    .min_by(|(_, a), (_, b)| a.min.partial_cmp(&b.min).expect("finite"))
                    .expect("at least one point");
                (t, e.min, e.min_vec.clone())
            }
            BoundSide::Upper => {
                let (t, e) = self
                    .extremes
                    .iter()
                    .enumerate()
                    .max_by(|(_, a), (_, b)| a.max.partial_cmp(&b.max).expect("finite"))
                    .expect("at least one point");
                (t, e.max, e.max_vec.clone())
            }
        };
        let norm: f64 = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let unit = raw.scale(1.0 / norm.max(f64::MIN_POSITIVE));
        let d = self.quotient.complement_dim();
        let coords: Vec<CVector> = (0..self.points())
            .map(|t| if t == point { unit.clone() } else { CVector::zeros(d) })
            .collect();
        Ok(BoundsWitness {
            side,
            point,
            quadratic_form_value: value,
            vector: self.quotient.vector_from_coords(&coords)?,
        })
    }
}

/// Converts a module frame with known bounds (A, B) into a 2-frame with
/// certified (not necessarily tight) bounds
/// (A lambda_min(<xi,xi>), B lambda_max(<xi,xi>)).
///
/// Vectors that are pointwise colinear with the associate everywhere vanish
/// in the quotient and are dropped; vectors colinear at only some points are
/// rejected, since they are neither degenerate nor A-independent.
pub fn from_module_frame(
    mf: &ModuleFrame,
    xi: &ModuleVector,
    tol: f64,
) -> Result<TwoFrame> {
    let (a, b) = mf.claimed_bounds().ok_or_else(|| {
        CoreError::InvalidArgument("module frame must carry known bounds".into())
    })?;
    let gram = xi.inner(xi)?;
    gram.invert(tol)?; // invertibility precondition
    let entries = gram
        .diagonal_entries()
        .ok_or_else(|| CoreError::NonCommutative(xi.algebra().to_string()))?;
    let lam_min = entries.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
    let lam_max = entries.iter().map(|c| c.re).fold(0.0, f64::max);

    let mut kept = Vec::new();
    for (i, v) in mf.vectors().iter().enumerate() {
        if is_a_independent(&[v.clone(), xi.clone()], tol)? {
            kept.push(v.clone());
        } else if pointwise_colinear(v, xi, tol)? {
            // lies in the submodule generated by xi; contributes nothing
            continue;
        } else {
            return Err(CoreError::Dependent(format!(
                "module frame vector {i} is colinear with the associate at some \
                 but not all points"
            )));
        }
    }
    Ok(TwoFrame::new_unchecked(
        kept,
        xi.clone(),
        Some((a * lam_min, b * lam_max)),
    ))
}

/// Restricts a 2-frame to the complement: the projected vectors form a
/// module frame there, with bounds derived from the optimal 2-frame bounds
/// and the spectrum of <xi, xi>. The derived inequality is re-verified
/// pointwise before returning.
pub fn restrict_to_complement_frame(frame: &TwoFrame, tol: f64) -> Result<ModuleFrame> {
    let ops = frame.operators(tol)?;
    let (a_opt, b_opt) = ops.optimal_bounds(tol)?;
    let xi_sq = ops.quotient().xi_norm_sq();
    let lam_min = xi_sq.iter().copied().fold(f64::INFINITY, f64::min);
    let lam_max = xi_sq.iter().copied().fold(0.0, f64::max);
    let a_mod = a_opt / lam_max;
    let b_mod = b_opt / lam_min;

    // verified check: the projected family's pointwise module-frame
    // operator on the complement has spectrum inside [a_mod, b_mod]
    for t in 0..ops.points() {
        let v = ops.synthesis_matrix(t);
        let g = v * v.adjoint();
        let eigs = hermitian_eigenvalues(&g);
        let lo = eigs.first().copied().unwrap_or(0.0);
        let hi = eigs.last().copied().unwrap_or(0.0);
        if lo + tol < a_mod || hi > b_mod + tol {
            return Err(CoreError::Internal(format!(
                "complement restriction bounds violated at point {t}: \
                 [{lo}, {hi}] not inside [{a_mod}, {b_mod}]"
            )));
        }
    }

    let projected = frame
        .vectors()
        .iter()
        .map(|x| ops.quotient().project(x))
        .collect::<Result<Vec<_>>>()?;
    ModuleFrame::new(projected, Some((a_mod, b_mod)))
}

/// Optimal bounds of a module frame for the full module A^m, computed
/// pointwise from the m x m frame operator sum_i x_i(t) x_i(t)*.
pub fn module_frame_bounds(mf: &ModuleFrame, tol: f64) -> Result<(f64, f64)> {
    let Some(first) = mf.vectors().first() else {
        return Err(CoreError::NotAFrame {
            a_opt: 0.0,
            b_opt: 0.0,
        });
    };
    let n = first.points().ok_or_else(|| {
        CoreError::NonCommutative(first.algebra().to_string())
    })?;
    let m = first.rank();
    let mut a_opt = f64::INFINITY;
    let mut b_opt: f64 = 0.0;
    for t in 0..n {
        let mut f = CMatrix::zeros(m, m);
        for x in mf.vectors() {
            let xt = x.point_vector(t)?;
            f += &xt * xt.adjoint();
        }
        let eigs = hermitian_eigenvalues(&f);
        a_opt = a_opt.min(eigs[0]);
        b_opt = b_opt.max(eigs[m - 1]);
    }
    if a_opt <= tol * b_opt.max(1.0) {
        return Err(CoreError::NotAFrame { a_opt, b_opt });
    }
    Ok((a_opt, b_opt))
}

/// Checks the mixed-associate identity
/// `<S_eta x, x | xi> = <S_xi x, x | eta>*`
/// for a vector family and two A-independent associates.
pub fn mixed_associate_check(
    vectors: &[ModuleVector],
    xi: &ModuleVector,
    eta: &ModuleVector,
    x: &ModuleVector,
    tol: f64,
) -> Result<bool> {
    Ok(mixed_associate_residual(vectors, xi, eta, x, tol)? <= tol)
}

/// Residual of the mixed-associate identity. The probe vector is first
/// projected orthogonal to both associates pointwise.
pub fn mixed_associate_residual(
    vectors: &[ModuleVector],
    xi: &ModuleVector,
    eta: &ModuleVector,
    x: &ModuleVector,
    indep_tol: f64,
) -> Result<f64> {
    if !is_a_independent(&[xi.clone(), eta.clone()], indep_tol.max(1e-14))? {
        return Err(CoreError::Dependent(
            "the two associates are A-dependent".into(),
        ));
    }
    let n = xi.points().expect("independence check implies commutative");
    let m = xi.rank();

    // project x off span{xi(t), eta(t)} at every point
    let mut points = Vec::with_capacity(n);
    for t in 0..n {
        let xi_t = xi.point_vector(t)?;
        let eta_t = eta.point_vector(t)?;
        let mut xt = x.point_vector(t)?;
        let q1 = xi_t.scale(1.0 / xi_t.norm());
        let mut r = eta_t.clone();
        let c = q1.dotc(&r);
        r -= q1.scale(1.0) * c;
        let q2 = r.scale(1.0 / r.norm());
        let c1 = q1.dotc(&xt);
        let c2 = q2.dotc(&xt);
        xt -= q1 * c1 + q2 * c2;
        points.push(xt);
    }
    let x_perp = ModuleVector::from_point_vectors(x.algebra(), m, &points)?;

    let apply = |assoc: &ModuleVector| -> Result<ModuleVector> {
        let mut acc = ModuleVector::zero(x.algebra(), m);
        for v in vectors {
            let c = two_inner(&x_perp, v, assoc)?;
            acc = acc.add(&module_action(&c, v)?)?;
        }
        Ok(acc)
    };
    let s_xi_x = apply(xi)?;
    let s_eta_x = apply(eta)?;
    let lhs = two_inner(&s_eta_x, &x_perp, xi)?;
    let rhs = two_inner(&s_xi_x, &x_perp, eta)?.adjoint();
    Ok(lhs.sub(&rhs)?.norm())
}

/// Checks the reconstruction hypothesis `x = sum_i <x, x_i | xi> x_i` on a
/// complement basis (equality taken in the quotient). When it holds, the
/// family must be a normalized tight frame: the optimal bounds are verified
/// to be (1, 1) before returning true.
pub fn tightness_from_reconstruction(
    vectors: &[ModuleVector],
    xi: &ModuleVector,
    tol: f64,
) -> Result<bool> {
    let q = QuotientSpace::build(xi, tol)?;
    for v in vectors {
        if v.algebra() != xi.algebra() || v.rank() != xi.rank() {
            return Err(CoreError::ShapeMismatch(
                "frame vector does not match the associate's module".into(),
            ));
        }
    }
    for basis_vec in q.complement_basis() {
        let mut acc = ModuleVector::zero(xi.algebra(), xi.rank());
        for v in vectors {
            let c = two_inner(basis_vec, v, xi)?;
            acc = acc.add(&module_action(&c, v)?)?;
        }
        let residual = q.project(&acc)?.sub(basis_vec)?.norm();
        if residual > tol {
            return Ok(false);
        }
    }

    // hypothesis holds; the frame operator is the identity on the
    // complement, so the bounds must be (1, 1) up to accumulated error
    let d = q.complement_dim();
    let check_tol = (d as f64).sqrt() * tol * 10.0;
    let mut a_opt = f64::INFINITY;
    let mut b_opt: f64 = 0.0;
    for t in 0..q.points() {
        let mut v = CMatrix::zeros(d, vectors.len());
        for (i, x) in vectors.iter().enumerate() {
            v.set_column(i, &(q.point_basis(t).adjoint() * x.point_vector(t)?));
        }
        let s = (&v * v.adjoint()).map(|c| c * Complex64::new(q.xi_norm_sq()[t], 0.0));
        let eigs = hermitian_eigenvalues(&s);
        a_opt = a_opt.min(eigs[0]);
        b_opt = b_opt.max(eigs[d - 1]);
    }
    if (a_opt - 1.0).abs() > check_tol || (b_opt - 1.0).abs() > check_tol {
        return Err(CoreError::Internal(format!(
            "reconstruction identity held but bounds are ({a_opt}, {b_opt}), not (1, 1)"
        )));
    }
    Ok(true)
}

// --- JSON encoding -----------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TwoFrameJson {
    associate: ModuleVector,
    vectors: Vec<ModuleVector>,
    claimed_bounds: Option<(f64, f64)>,
}

impl Serialize for TwoFrame {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        TwoFrameJson {
            associate: self.associate.clone(),
            vectors: self.vectors.clone(),
            claimed_bounds: self.claimed_bounds,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TwoFrame {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let proxy = TwoFrameJson::deserialize(deserializer)?;
        let mut frame = TwoFrame::new(proxy.vectors, proxy.associate, DEFAULT_INDEPENDENCE_TOL)
            .map_err(D::Error::custom)?;
        if let Some((a, b)) = proxy.claimed_bounds {
            frame = frame.with_claimed_bounds(a, b).map_err(D::Error::custom)?;
        }
        Ok(frame)
    }
}
