//! Free Hilbert modules A^m over a finite-dimensional C*-algebra.
//!
//! A `ModuleVector` is an m-tuple of algebra elements. The A-valued inner
//! product is
//!
//! ```text
//! <x, y> = sum_j x_j y_j*
//! ```
//!
//! which is A-linear in the first slot: `<a x, b y> = a <x, y> b*`.
//!
//! Over `diagonal(n)` a module vector is equivalently a family of n complex
//! m-vectors, one per point; most of the frame machinery downstream works
//! pointwise in that picture.

use num_complex::Complex64;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{AlgebraDescriptor, AlgebraElement, ConcreteForm, ElementData};
use crate::error::{CoreError, Result};
use crate::linalg::{min_singular_value, CMatrix, CVector};
use crate::report::{AxiomReport, AxiomWitness, RecordBuilder};
use crate::sample::{random_complex, random_element, random_vector, rng_from_seed};

/// Element of the free module A^m.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleVector {
    algebra: AlgebraDescriptor,
    coords: Vec<AlgebraElement>,
}

impl ModuleVector {
    pub fn new(algebra: AlgebraDescriptor, coords: Vec<AlgebraElement>) -> Result<Self> {
        let algebra = algebra.normalized();
        if coords.is_empty() {
            return Err(CoreError::InvalidArgument(
                "module vector needs rank >= 1".into(),
            ));
        }
        for c in &coords {
            if c.descriptor() != &algebra {
                return Err(CoreError::DescriptorMismatch {
                    expected: algebra.to_string(),
                    found: c.descriptor().to_string(),
                });
            }
        }
        Ok(ModuleVector { algebra, coords })
    }

    pub fn zero(algebra: &AlgebraDescriptor, rank: usize) -> Self {
        let algebra = algebra.normalized();
        let coords = (0..rank).map(|_| AlgebraElement::zero(&algebra)).collect();
        ModuleVector { algebra, coords }
    }

    /// The j-th standard basis vector: unit in coordinate j, zero elsewhere.
    pub fn standard_basis(algebra: &AlgebraDescriptor, rank: usize, j: usize) -> Result<Self> {
        if j >= rank {
            return Err(CoreError::InvalidArgument(format!(
                "basis index {j} out of range for rank {rank}"
            )));
        }
        let mut v = Self::zero(algebra, rank);
        v.coords[j] = AlgebraElement::unit(&v.algebra);
        Ok(v)
    }

    pub fn algebra(&self) -> &AlgebraDescriptor {
        &self.algebra
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[AlgebraElement] {
        &self.coords
    }

    pub fn coord(&self, j: usize) -> &AlgebraElement {
        &self.coords[j]
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(CoreError::DescriptorMismatch {
                expected: self.algebra.to_string(),
                found: other.algebra.to_string(),
            });
        }
        if self.rank() != other.rank() {
            return Err(CoreError::ShapeMismatch(format!(
                "rank mismatch: {} vs {}",
                self.rank(),
                other.rank()
            )));
        }
        Ok(())
    }

    /// A-valued inner product, A-linear in the first slot.
    pub fn inner(&self, other: &Self) -> Result<AlgebraElement> {
        self.check_same_shape(other)?;
        let mut acc = AlgebraElement::zero(&self.algebra);
        for (x, y) in self.coords.iter().zip(&other.coords) {
            acc = acc.add(&x.mul(&y.adjoint())?)?;
        }
        Ok(acc)
    }

    /// Module norm sqrt(||<x,x>||).
    pub fn norm(&self) -> f64 {
        self.inner(self).map(|g| g.norm().sqrt()).unwrap_or(0.0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(x, y)| x.add(y))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleVector {
            algebra: self.algebra.clone(),
            coords,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        ModuleVector {
            algebra: self.algebra.clone(),
            coords: self.coords.iter().map(|c| c.scale(alpha)).collect(),
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.coords.iter().all(|c| c.is_zero(tol))
    }

    /// Number of points when the algebra is commutative.
    pub fn points(&self) -> Option<usize> {
        self.algebra.points()
    }

    /// The complex m-vector this module vector takes at point t (diagonal
    /// algebras only).
    pub fn point_vector(&self, t: usize) -> Result<CVector> {
        let n = self.points().ok_or_else(|| {
            CoreError::NonCommutative(self.algebra.to_string())
        })?;
        if t >= n {
            return Err(CoreError::InvalidArgument(format!(
                "point index {t} out of range for {n} points"
            )));
        }
        let entries: Vec<Complex64> = self
            .coords
            .iter()
            .map(|c| c.diagonal_entries().expect("diagonal algebra")[t])
            .collect();
        Ok(CVector::from_vec(entries))
    }

    /// Assembles a vector from its per-point complex m-vectors.
    pub fn from_point_vectors(
        algebra: &AlgebraDescriptor,
        rank: usize,
        points: &[CVector],
    ) -> Result<Self> {
        let algebra = algebra.normalized();
        let n = match algebra.concrete() {
            ConcreteForm::Diagonal(n) => n,
            ConcreteForm::Matrix(_) => {
                return Err(CoreError::NonCommutative(algebra.to_string()))
            }
        };
        if points.len() != n || points.iter().any(|p| p.len() != rank) {
            return Err(CoreError::ShapeMismatch(format!(
                "expected {n} point vectors of length {rank}"
            )));
        }
        let coords = (0..rank)
            .map(|j| {
                AlgebraElement::diagonal((0..n).map(|t| points[t][j]).collect())
            })
            .collect();
        Ok(ModuleVector { algebra, coords })
    }
}

/// Left module action a . x, coordinatewise.
pub fn module_action(a: &AlgebraElement, x: &ModuleVector) -> Result<ModuleVector> {
    if a.descriptor() != x.algebra() {
        return Err(CoreError::DescriptorMismatch {
            expected: x.algebra().to_string(),
            found: a.descriptor().to_string(),
        });
    }
    let coords = x
        .coords
        .iter()
        .map(|c| a.mul(c))
        .collect::<Result<Vec<_>>>()?;
    ModuleVector::new(x.algebra.clone(), coords)
}

/// A-combination sum_i a_i x_i.
pub fn a_combination(
    coeffs: &[AlgebraElement],
    vectors: &[ModuleVector],
) -> Result<ModuleVector> {
    if coeffs.len() != vectors.len() {
        return Err(CoreError::ShapeMismatch(format!(
            "{} coefficients for {} vectors",
            coeffs.len(),
            vectors.len()
        )));
    }
    let first = vectors.first().ok_or_else(|| {
        CoreError::InvalidArgument("A-combination of an empty family".into())
    })?;
    let mut acc = ModuleVector::zero(first.algebra(), first.rank());
    for (a, x) in coeffs.iter().zip(vectors) {
        acc = acc.add(&module_action(a, x)?)?;
    }
    Ok(acc)
}

/// A-independence over a commutative algebra.
///
/// Over diagonal(n) an A-coefficient supported at a single point turns any
/// pointwise linear dependence into a nonzero A-solution, so the family is
/// A-independent iff at every point t the complex vectors {v_k(t)} are
/// linearly independent. Decided by a smallest-singular-value test with
/// threshold `tol`.
pub fn is_a_independent(vectors: &[ModuleVector], tol: f64) -> Result<bool> {
    let Some(first) = vectors.first() else {
        return Ok(true);
    };
    for v in vectors {
        first.check_same_shape(v)?;
    }
    let n = first.points().ok_or_else(|| {
        CoreError::UnsupportedAlgebra(format!(
            "A-independence is only decided over commutative algebras, got {}",
            first.algebra()
        ))
    })?;
    let m = first.rank();
    let k = vectors.len();
    if k > m {
        return Ok(false);
    }
    for t in 0..n {
        let mut mat = CMatrix::zeros(m, k);
        for (col, v) in vectors.iter().enumerate() {
            mat.set_column(col, &v.point_vector(t)?);
        }
        if min_singular_value(&mat) <= tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A finite family of module vectors with optional frame bounds.
#[derive(Clone, Debug)]
pub struct ModuleFrame {
    vectors: Vec<ModuleVector>,
    claimed_bounds: Option<(f64, f64)>,
}

impl ModuleFrame {
    pub fn new(vectors: Vec<ModuleVector>, claimed_bounds: Option<(f64, f64)>) -> Result<Self> {
        if let Some((a, b)) = claimed_bounds {
            if !(a > 0.0 && a <= b) {
                return Err(CoreError::InvalidArgument(format!(
                    "frame bounds must satisfy 0 < A <= B, got ({a}, {b})"
                )));
            }
        }
        if let Some(first) = vectors.first() {
            for v in &vectors {
                first.check_same_shape(v)?;
            }
        }
        Ok(ModuleFrame {
            vectors,
            claimed_bounds,
        })
    }

    pub fn vectors(&self) -> &[ModuleVector] {
        &self.vectors
    }

    pub fn claimed_bounds(&self) -> Option<(f64, f64)> {
        self.claimed_bounds
    }
}

/// Samples the inner-product axioms on random data and reports residuals.
///
/// The five records cover: positivity of <x,x>, conjugate symmetry,
/// A-sesquilinearity <ax,by> = a<x,y>b*, complex linearity with additivity,
/// and definiteness (<x,x> = 0 iff x = 0).
pub fn check_module_axioms(
    algebra: &AlgebraDescriptor,
    rank: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<AxiomReport> {
    if rank == 0 {
        return Err(CoreError::InvalidArgument("rank must be >= 1".into()));
    }
    let algebra = algebra.normalized();
    let mut rng = rng_from_seed(seed);
    let mut i1 = RecordBuilder::new("I1");
    let mut i2 = RecordBuilder::new("I2");
    let mut i3 = RecordBuilder::new("I3");
    let mut i4 = RecordBuilder::new("I4");
    let mut i5 = RecordBuilder::new("I5");

    for _ in 0..trials {
        let x = random_vector(&algebra, rank, &mut rng);
        let y = random_vector(&algebra, rank, &mut rng);
        let z = random_vector(&algebra, rank, &mut rng);
        let a = random_element(&algebra, &mut rng);
        let b = random_element(&algebra, &mut rng);
        let alpha = random_complex(&mut rng);
        let beta = random_complex(&mut rng);

        let gxx = x.inner(&x)?;
        i1.observe(gxx.positivity_residual(), tol, || {
            AxiomWitness::from_vectors(vec![x.clone()])
        });

        let r2 = x
            .inner(&y)?
            .sub(&y.inner(&x)?.adjoint())?
            .norm();
        i2.observe(r2, tol, || {
            AxiomWitness::from_vectors(vec![x.clone(), y.clone()])
        });

        let lhs = module_action(&a, &x)?.inner(&module_action(&b, &y)?)?;
        let rhs = a.mul(&x.inner(&y)?)?.mul(&b.adjoint())?;
        i3.observe(lhs.sub(&rhs)?.norm(), tol, || {
            AxiomWitness::new(vec![x.clone(), y.clone()], vec![a.clone(), b.clone()])
        });

        let lin_lhs = x.scale(alpha).add(&y.scale(beta))?.inner(&z)?;
        let lin_rhs = x.inner(&z)?.scale(alpha).add(&y.inner(&z)?.scale(beta))?;
        i4.observe(lin_lhs.sub(&lin_rhs)?.norm(), tol, || {
            let e = AlgebraElement::unit(&algebra);
            AxiomWitness::new(
                vec![x.clone(), y.clone(), z.clone()],
                vec![e.scale(alpha), e.scale(beta)],
            )
        });

        // definiteness: zero gives exactly zero, and a nonzero vector gives
        // ||<x,x>|| at least the square of its largest entry
        let zero = ModuleVector::zero(&algebra, rank);
        let r0 = zero.inner(&zero)?.norm();
        let peak: f64 = x.coords().iter().map(|c| c.max_entry_abs()).fold(0.0, f64::max);
        let r5 = r0.max((peak * peak - gxx.norm()).max(0.0));
        i5.observe(r5, tol, || {
            AxiomWitness::from_vectors(vec![x.clone()])
        });
    }

    Ok(AxiomReport {
        records: vec![i1.finish(), i2.finish(), i3.finish(), i4.finish(), i5.finish()],
        trials,
        seed,
        tol,
    })
}

// --- JSON encoding -----------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ModuleVectorJson {
    algebra: AlgebraDescriptor,
    rank: usize,
    coords: Vec<ElementData>,
}

impl Serialize for ModuleVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let proxy = ModuleVectorJson {
            algebra: self.algebra.clone(),
            rank: self.rank(),
            coords: self.coords.iter().map(|c| c.data().clone()).collect(),
        };
        proxy.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ModuleVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let proxy = ModuleVectorJson::deserialize(deserializer)?;
        if proxy.coords.len() != proxy.rank {
            return Err(D::Error::custom(format!(
                "declared rank {} but {} coordinates",
                proxy.rank,
                proxy.coords.len()
            )));
        }
        let coords = proxy
            .coords
            .into_iter()
            .map(|d| AlgebraElement::from_data(proxy.algebra.clone(), d))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        ModuleVector::new(proxy.algebra, coords).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cplx;

    fn d2() -> AlgebraDescriptor {
        AlgebraDescriptor::diagonal(2)
    }

    /// diagonal(n) vector from a grid of real entries: rows are coordinates,
    /// columns are points.
    fn vec_d(rows: &[&[f64]]) -> ModuleVector {
        let coords = rows
            .iter()
            .map(|r| AlgebraElement::diagonal_from_reals(r))
            .collect();
        ModuleVector::new(AlgebraDescriptor::diagonal(rows[0].len()), coords).unwrap()
    }

    fn elem_d(entries: &[f64]) -> AlgebraElement {
        AlgebraElement::diagonal_from_reals(entries)
    }

    #[test]
    fn inner_product_pointwise_oracle() {
        let x = vec_d(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let z = vec_d(&[&[1.0, 1.0], &[0.0, 0.0]]);
        // direct evaluation: sum_j x_j conj(z_j) per point
        assert!(x.inner(&z).unwrap().sub(&elem_d(&[1.0, 2.0])).unwrap().is_zero(1e-15));
        assert!(x.inner(&x).unwrap().sub(&elem_d(&[1.0, 5.0])).unwrap().is_zero(1e-15));
        let zero = ModuleVector::zero(&d2(), 2);
        assert!(x.inner(&zero).unwrap().is_zero(1e-15));
    }

    #[test]
    fn module_action_coordinatewise() {
        let a = elem_d(&[2.0, 3.0]);
        let x = vec_d(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let ax = module_action(&a, &x).unwrap();
        assert_eq!(ax, vec_d(&[&[2.0, 3.0], &[0.0, 3.0]]));
        let e = AlgebraElement::unit(&d2());
        assert_eq!(module_action(&e, &x).unwrap(), x);
        let zero = AlgebraElement::zero(&d2());
        assert!(module_action(&zero, &x).unwrap().is_zero(0.0));
    }

    #[test]
    fn a_combination_examples() {
        let x = vec_d(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let e = AlgebraElement::unit(&d2());
        let combo = a_combination(std::slice::from_ref(&e), std::slice::from_ref(&x)).unwrap();
        assert_eq!(combo, x);

        let neg_e = e.scale(cplx(-1.0, 0.0));
        let cancel = a_combination(&[e.clone(), neg_e], &[x.clone(), x.clone()]).unwrap();
        assert!(cancel.is_zero(1e-15));

        let b1 = vec_d(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let b2 = vec_d(&[&[0.0, 0.0], &[1.0, 1.0]]);
        let mixed = a_combination(&[elem_d(&[1.0, 0.0]), elem_d(&[0.0, 1.0])], &[b1, b2]).unwrap();
        assert_eq!(mixed, vec_d(&[&[1.0, 0.0], &[0.0, 1.0]]));
    }

    #[test]
    fn a_independence_pointwise_rank() {
        let xi = vec_d(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let x = vec_d(&[&[0.0, 0.0], &[1.0, 1.0]]);
        assert!(is_a_independent(&[xi.clone(), x.clone()], 1e-10).unwrap());

        let a = elem_d(&[0.5, -2.0]);
        let axi = module_action(&a, &xi).unwrap();
        assert!(!is_a_independent(&[xi.clone(), axi], 1e-10).unwrap());

        let zero = ModuleVector::zero(&d2(), 2);
        assert!(!is_a_independent(&[x.clone(), zero], 1e-10).unwrap());

        // invariance under multiplication by an invertible element
        let inv = elem_d(&[3.0, -0.5]);
        let scaled = module_action(&inv, &x).unwrap();
        assert!(is_a_independent(&[xi, scaled], 1e-10).unwrap());
    }

    #[test]
    fn a_independence_refuses_matrix_algebras() {
        let desc = AlgebraDescriptor::matrix(2);
        let v = ModuleVector::standard_basis(&desc, 2, 0).unwrap();
        assert!(matches!(
            is_a_independent(&[v], 1e-10),
            Err(CoreError::UnsupportedAlgebra(_))
        ));
    }

    #[test]
    fn module_axioms_hold_on_random_data() {
        for desc in [
            AlgebraDescriptor::diagonal(3),
            AlgebraDescriptor::matrix(2),
        ] {
            let report = check_module_axioms(&desc, 3, 300, 7, 1e-10).unwrap();
            assert!(report.all_pass(), "{desc}: {:?}", report.records);
        }
    }

    #[test]
    fn cauchy_schwarz_at_norm_level() {
        let mut rng = rng_from_seed(11);
        let desc = AlgebraDescriptor::diagonal(3);
        for _ in 0..500 {
            let x = random_vector(&desc, 4, &mut rng);
            let y = random_vector(&desc, 4, &mut rng);
            let lhs = x.inner(&y).unwrap().norm();
            let rhs = x.inner(&x).unwrap().norm().sqrt() * y.inner(&y).unwrap().norm().sqrt();
            assert!(lhs <= rhs + 1e-10, "{lhs} > {rhs}");
        }
    }

    #[test]
    fn json_round_trip() {
        let x = vec_d(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.contains(r#""algebra":{"kind":"diagonal","n":2}"#), "{s}");
        assert!(s.contains(r#""rank":2"#), "{s}");
        let back: ModuleVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);

        // rank/coords disagreement is rejected
        let bad = r#"{"algebra":{"kind":"diagonal","n":2},"rank":3,"coords":[[[1.0,0.0],[0.0,0.0]]]}"#;
        assert!(serde_json::from_str::<ModuleVector>(bad).is_err());
    }

    #[test]
    fn point_vector_round_trip() {
        let x = vec_d(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let p0 = x.point_vector(0).unwrap();
        let p1 = x.point_vector(1).unwrap();
        assert_eq!(p0[0], cplx(1.0, 0.0));
        assert_eq!(p1[1], cplx(1.0, 0.0));
        let back = ModuleVector::from_point_vectors(&d2(), 2, &[p0, p1]).unwrap();
        assert_eq!(back, x);
    }
}
