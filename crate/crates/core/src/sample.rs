//! Seeded random data generation.
//!
//! All randomized checks in this crate draw from ChaCha8, a portable counter
//! RNG whose stream depends only on the seed, so identical seeds reproduce
//! identical reports on every platform. Entries are uniform in (-1, 1) on
//! both real and imaginary parts, which keeps sampled data at unit scale.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraDescriptor, AlgebraElement, ConcreteForm};
use crate::hilbert_module::ModuleVector;
use crate::linalg::CMatrix;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_element(descriptor: &AlgebraDescriptor, rng: &mut impl Rng) -> AlgebraElement {
    let descriptor = descriptor.normalized();
    match descriptor.concrete() {
        ConcreteForm::Diagonal(n) => {
            AlgebraElement::diagonal((0..n).map(|_| random_complex(rng)).collect())
        }
        ConcreteForm::Matrix(d) => {
            let m = CMatrix::from_fn(d, d, |_, _| random_complex(rng));
            AlgebraElement::from_data(
                descriptor,
                crate::algebra::ElementData::Matrix(m),
            )
            .expect("square data matches descriptor")
        }
    }
}

pub fn random_hermitian(descriptor: &AlgebraDescriptor, rng: &mut impl Rng) -> AlgebraElement {
    let a = random_element(descriptor, rng);
    a.add(&a.adjoint()).expect("same descriptor").scale(Complex64::new(0.5, 0.0))
}

/// A positive element of the form a a*.
pub fn random_positive(descriptor: &AlgebraDescriptor, rng: &mut impl Rng) -> AlgebraElement {
    let a = random_element(descriptor, rng);
    a.mul(&a.adjoint()).expect("same descriptor")
}

pub fn random_vector(
    algebra: &AlgebraDescriptor,
    rank: usize,
    rng: &mut impl Rng,
) -> ModuleVector {
    let coords = (0..rank).map(|_| random_element(algebra, rng)).collect();
    ModuleVector::new(algebra.clone(), coords).expect("coords share the algebra")
}
