//! Finite-dimensional C*-algebra arithmetic.
//!
//! Three concrete families are supported:
//!
//! - `diagonal(n)`: the commutative algebra of functions on n points,
//!   represented as length-n complex sequences with pointwise operations;
//! - `matrix(k)`: the full matrix algebra of k x k complex matrices;
//! - `tensor(left, right)`: spatial tensor products, stored in their
//!   identified concrete form (Kronecker data).
//!
//! A tensor of diagonal algebras is flattened eagerly to `diagonal(n*m)`
//! with row-major point pairing, which keeps commutative algebras closed
//! under tensoring. Mixed tensors keep Kronecker matrix form.
//!
//! All values are immutable after construction and every operation is a
//! pure function, so elements may be shared freely across threads.

use std::fmt;

use num_complex::Complex64;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CoreError, Result};
use crate::linalg::{
    self, hermitian_deviation, hermitian_eigenvalues, max_abs, min_singular_value, spectral_norm,
    CMatrix,
};

/// Default absolute tolerance on spectra for positivity and order checks.
pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-10;

/// Description of a concrete finite-dimensional C*-algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AlgebraDescriptor {
    Diagonal { n: usize },
    Matrix { k: usize },
    Tensor {
        left: Box<AlgebraDescriptor>,
        right: Box<AlgebraDescriptor>,
    },
}

/// The concrete representation an algebra reduces to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConcreteForm {
    /// Length-n diagonal data.
    Diagonal(usize),
    /// d x d matrix data.
    Matrix(usize),
}

impl AlgebraDescriptor {
    pub fn diagonal(n: usize) -> Self {
        AlgebraDescriptor::Diagonal { n }
    }

    pub fn matrix(k: usize) -> Self {
        AlgebraDescriptor::Matrix { k }
    }

    /// Canonical tensor descriptor: diagonal factors are flattened row-major.
    pub fn tensor_of(left: AlgebraDescriptor, right: AlgebraDescriptor) -> Self {
        let left = left.normalized();
        let right = right.normalized();
        match (&left, &right) {
            (AlgebraDescriptor::Diagonal { n }, AlgebraDescriptor::Diagonal { n: m }) => {
                AlgebraDescriptor::Diagonal { n: n * m }
            }
            _ => AlgebraDescriptor::Tensor {
                left: Box::new(left),
                right: Box::new(right),
            },
        }
    }

    /// Flattens nested diagonal tensors to their identified diagonal algebra.
    pub fn normalized(&self) -> Self {
        match self {
            AlgebraDescriptor::Tensor { left, right } => {
                AlgebraDescriptor::tensor_of(left.normalized(), right.normalized())
            }
            other => other.clone(),
        }
    }

    /// Ambient dimension of the concrete representation: n for diagonal
    /// data, d for d x d matrix data.
    pub fn concrete(&self) -> ConcreteForm {
        match self.normalized() {
            AlgebraDescriptor::Diagonal { n } => ConcreteForm::Diagonal(n),
            AlgebraDescriptor::Matrix { k } => ConcreteForm::Matrix(k),
            AlgebraDescriptor::Tensor { left, right } => {
                let dl = match left.concrete() {
                    ConcreteForm::Diagonal(n) => n,
                    ConcreteForm::Matrix(k) => k,
                };
                let dr = match right.concrete() {
                    ConcreteForm::Diagonal(n) => n,
                    ConcreteForm::Matrix(k) => k,
                };
                ConcreteForm::Matrix(dl * dr)
            }
        }
    }

    pub fn is_commutative(&self) -> bool {
        matches!(self.concrete(), ConcreteForm::Diagonal(_))
    }

    /// Number of points for commutative algebras.
    pub fn points(&self) -> Option<usize> {
        match self.concrete() {
            ConcreteForm::Diagonal(n) => Some(n),
            ConcreteForm::Matrix(_) => None,
        }
    }
}

impl fmt::Display for AlgebraDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraDescriptor::Diagonal { n } => write!(f, "diagonal({n})"),
            AlgebraDescriptor::Matrix { k } => write!(f, "matrix({k})"),
            AlgebraDescriptor::Tensor { left, right } => write!(f, "tensor({left}, {right})"),
        }
    }
}

/// Concrete data of an algebra element.
#[derive(Clone, Debug, PartialEq)]
pub enum ElementData {
    Diagonal(Vec<Complex64>),
    Matrix(CMatrix),
}

/// An element of a finite-dimensional C*-algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    descriptor: AlgebraDescriptor,
    data: ElementData,
}

impl AlgebraElement {
    /// Builds an element of `diagonal(entries.len())`.
    pub fn diagonal(entries: Vec<Complex64>) -> Self {
        let n = entries.len();
        AlgebraElement {
            descriptor: AlgebraDescriptor::diagonal(n),
            data: ElementData::Diagonal(entries),
        }
    }

    pub fn diagonal_from_reals(entries: &[f64]) -> Self {
        Self::diagonal(entries.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    /// Builds an element of `matrix(k)` from a square matrix.
    pub fn matrix(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(CoreError::ShapeMismatch(format!(
                "matrix element must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let k = m.nrows();
        Ok(AlgebraElement {
            descriptor: AlgebraDescriptor::matrix(k),
            data: ElementData::Matrix(m),
        })
    }

    /// Builds an element from a descriptor and matching concrete data.
    pub fn from_data(descriptor: AlgebraDescriptor, data: ElementData) -> Result<Self> {
        let descriptor = descriptor.normalized();
        match (descriptor.concrete(), &data) {
            (ConcreteForm::Diagonal(n), ElementData::Diagonal(v)) if v.len() == n => {}
            (ConcreteForm::Matrix(d), ElementData::Matrix(m))
                if m.nrows() == d && m.ncols() == d => {}
            (form, _) => {
                return Err(CoreError::ShapeMismatch(format!(
                    "element data does not match {descriptor} (concrete form {form:?})"
                )))
            }
        }
        Ok(AlgebraElement { descriptor, data })
    }

    pub fn zero(descriptor: &AlgebraDescriptor) -> Self {
        let descriptor = descriptor.normalized();
        let data = match descriptor.concrete() {
            ConcreteForm::Diagonal(n) => ElementData::Diagonal(vec![Complex64::ZERO; n]),
            ConcreteForm::Matrix(d) => ElementData::Matrix(CMatrix::zeros(d, d)),
        };
        AlgebraElement { descriptor, data }
    }

    /// Multiplicative unit of the algebra.
    pub fn unit(descriptor: &AlgebraDescriptor) -> Self {
        let descriptor = descriptor.normalized();
        let data = match descriptor.concrete() {
            ConcreteForm::Diagonal(n) => ElementData::Diagonal(vec![Complex64::ONE; n]),
            ConcreteForm::Matrix(d) => ElementData::Matrix(CMatrix::identity(d, d)),
        };
        AlgebraElement { descriptor, data }
    }

    pub fn descriptor(&self) -> &AlgebraDescriptor {
        &self.descriptor
    }

    pub fn data(&self) -> &ElementData {
        &self.data
    }

    pub fn diagonal_entries(&self) -> Option<&[Complex64]> {
        match &self.data {
            ElementData::Diagonal(v) => Some(v),
            ElementData::Matrix(_) => None,
        }
    }

    /// Concrete matrix form (diagonal data embeds as a diagonal matrix).
    pub fn to_matrix(&self) -> CMatrix {
        match &self.data {
            ElementData::Diagonal(v) => {
                let n = v.len();
                let mut m = CMatrix::zeros(n, n);
                for (i, c) in v.iter().enumerate() {
                    m[(i, i)] = *c;
                }
                m
            }
            ElementData::Matrix(m) => m.clone(),
        }
    }

    fn check_same_descriptor(&self, other: &Self) -> Result<()> {
        if self.descriptor != other.descriptor {
            return Err(CoreError::DescriptorMismatch {
                expected: self.descriptor.to_string(),
                found: other.descriptor.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_descriptor(other)?;
        let data = match (&self.data, &other.data) {
            (ElementData::Diagonal(a), ElementData::Diagonal(b)) => {
                ElementData::Diagonal(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (ElementData::Matrix(a), ElementData::Matrix(b)) => ElementData::Matrix(a + b),
            _ => unreachable!("same descriptor implies same data form"),
        };
        Ok(AlgebraElement {
            descriptor: self.descriptor.clone(),
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Algebra multiplication (pointwise for diagonal, matrix product otherwise).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_descriptor(other)?;
        let data = match (&self.data, &other.data) {
            (ElementData::Diagonal(a), ElementData::Diagonal(b)) => {
                ElementData::Diagonal(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            (ElementData::Matrix(a), ElementData::Matrix(b)) => ElementData::Matrix(a * b),
            _ => unreachable!("same descriptor implies same data form"),
        };
        Ok(AlgebraElement {
            descriptor: self.descriptor.clone(),
            data,
        })
    }

    /// Scalar multiplication by a complex number.
    pub fn scale(&self, alpha: Complex64) -> Self {
        let data = match &self.data {
            ElementData::Diagonal(v) => ElementData::Diagonal(v.iter().map(|c| c * alpha).collect()),
            ElementData::Matrix(m) => ElementData::Matrix(m.map(|c| c * alpha)),
        };
        AlgebraElement {
            descriptor: self.descriptor.clone(),
            data,
        }
    }

    /// Involution: complex conjugate for diagonal data, conjugate transpose
    /// for matrix data.
    pub fn adjoint(&self) -> Self {
        let data = match &self.data {
            ElementData::Diagonal(v) => ElementData::Diagonal(v.iter().map(|c| c.conj()).collect()),
            ElementData::Matrix(m) => ElementData::Matrix(m.adjoint()),
        };
        AlgebraElement {
            descriptor: self.descriptor.clone(),
            data,
        }
    }

    /// C*-norm: max entry modulus for diagonal data, largest singular value
    /// for matrix data.
    pub fn norm(&self) -> f64 {
        match &self.data {
            ElementData::Diagonal(v) => v.iter().map(|c| c.norm()).fold(0.0, f64::max),
            ElementData::Matrix(m) => spectral_norm(m),
        }
    }

    /// Distance from satisfying "Hermitian with nonnegative spectrum":
    /// the larger of the Hermitian deviation and the spectral negativity.
    pub fn positivity_residual(&self) -> f64 {
        match &self.data {
            ElementData::Diagonal(v) => v
                .iter()
                .map(|c| c.im.abs().max((-c.re).max(0.0)))
                .fold(0.0, f64::max),
            ElementData::Matrix(m) => {
                let herm = hermitian_deviation(m);
                let min_eig = hermitian_eigenvalues(m).first().copied().unwrap_or(0.0);
                herm.max((-min_eig).max(0.0))
            }
        }
    }

    /// True iff the element is Hermitian within tol and its spectrum is >= -tol.
    pub fn is_positive(&self, tol: f64) -> bool {
        self.positivity_residual() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        match &self.data {
            ElementData::Diagonal(v) => v.iter().all(|c| c.im.abs() <= tol),
            ElementData::Matrix(m) => hermitian_deviation(m) <= tol,
        }
    }

    /// Operator order: self <= other iff other - self is positive.
    pub fn leq(&self, other: &Self, tol: f64) -> Result<bool> {
        let diff = other.sub(self)?;
        Ok(diff.is_positive(tol))
    }

    /// Smallest spectral magnitude: min entry modulus for diagonal data,
    /// smallest singular value for matrix data. Zero means not invertible.
    pub fn min_spectral_value(&self) -> f64 {
        match &self.data {
            ElementData::Diagonal(v) => v
                .iter()
                .map(|c| c.norm())
                .fold(f64::INFINITY, f64::min)
                .min(f64::INFINITY),
            ElementData::Matrix(m) => min_singular_value(m),
        }
    }

    /// Multiplicative inverse. Fails when the spectrum is not bounded away
    /// from zero by more than tol.
    pub fn invert(&self, tol: f64) -> Result<Self> {
        let min_spec = self.min_spectral_value();
        if !min_spec.is_finite() || min_spec <= tol {
            return Err(CoreError::NotInvertible {
                min_spectral: if min_spec.is_finite() { min_spec } else { 0.0 },
                tol,
            });
        }
        let data = match &self.data {
            ElementData::Diagonal(v) => {
                ElementData::Diagonal(v.iter().map(|c| Complex64::ONE / c).collect())
            }
            ElementData::Matrix(m) => {
                let inv = m.clone().try_inverse().ok_or(CoreError::NotInvertible {
                    min_spectral: min_spec,
                    tol,
                })?;
                ElementData::Matrix(inv)
            }
        };
        Ok(AlgebraElement {
            descriptor: self.descriptor.clone(),
            data,
        })
    }

    /// Spatial tensor product, in the identified concrete algebra.
    ///
    /// Diagonal (x) diagonal stays diagonal with row-major pairing; any other
    /// combination takes Kronecker matrix form.
    pub fn tensor(&self, other: &Self) -> Self {
        let descriptor =
            AlgebraDescriptor::tensor_of(self.descriptor.clone(), other.descriptor.clone());
        let data = match (&self.data, &other.data) {
            (ElementData::Diagonal(a), ElementData::Diagonal(b)) => {
                let mut out = Vec::with_capacity(a.len() * b.len());
                for x in a {
                    for y in b {
                        out.push(x * y);
                    }
                }
                ElementData::Diagonal(out)
            }
            _ => ElementData::Matrix(linalg::kron(&self.to_matrix(), &other.to_matrix())),
        };
        AlgebraElement { descriptor, data }
    }

    /// Largest entry modulus of the concrete data.
    pub fn max_entry_abs(&self) -> f64 {
        match &self.data {
            ElementData::Diagonal(v) => v.iter().map(|c| c.norm()).fold(0.0, f64::max),
            ElementData::Matrix(m) => max_abs(m),
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_entry_abs() <= tol
    }
}

// --- JSON encoding -----------------------------------------------------
//
// Complex scalars serialize as [re, im]. A diagonal element is an array of
// complex scalars, a matrix element an array of rows. Elements carry no
// embedded descriptor; the enclosing payload (e.g. a module vector) does.

fn complex_to_pair(c: &Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn pair_to_complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl Serialize for ElementData {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ElementData::Diagonal(v) => v
                .iter()
                .map(complex_to_pair)
                .collect::<Vec<_>>()
                .serialize(serializer),
            ElementData::Matrix(m) => {
                let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
                    .map(|i| (0..m.ncols()).map(|j| complex_to_pair(&m[(i, j)])).collect())
                    .collect();
                rows.serialize(serializer)
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ElementDataJson {
    Diagonal(Vec<[f64; 2]>),
    Matrix(Vec<Vec<[f64; 2]>>),
}

impl<'de> Deserialize<'de> for ElementData {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        match ElementDataJson::deserialize(deserializer)? {
            ElementDataJson::Diagonal(v) => Ok(ElementData::Diagonal(
                v.into_iter().map(pair_to_complex).collect(),
            )),
            ElementDataJson::Matrix(rows) => {
                let nrows = rows.len();
                let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
                if nrows == 0 || ncols != nrows || rows.iter().any(|r| r.len() != ncols) {
                    return Err(D::Error::custom("matrix element data must be square"));
                }
                let mut m = CMatrix::zeros(nrows, ncols);
                for (i, row) in rows.into_iter().enumerate() {
                    for (j, p) in row.into_iter().enumerate() {
                        m[(i, j)] = pair_to_complex(p);
                    }
                }
                Ok(ElementData::Matrix(m))
            }
        }
    }
}

impl Serialize for AlgebraElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.data.serialize(serializer)
    }
}
