//! Deterministic random frame instances.
//!
//! Generation is a pure function of the RNG stream: the associate is drawn
//! until its gram is well-conditioned (smallest point value at least a
//! tenth of the largest), and the frame vectors are random combinations of
//! the complement basis, redrawn until the family is a frame with a lower
//! bound above the requested floor. With exactly rank-1 vectors the
//! complement basis itself is returned, orthonormalized against the induced
//! inner product, which forces a Parseval instance.

use rand::Rng;

use crate::algebra::AlgebraDescriptor;
use crate::error::{CoreError, Result};
use crate::frames::TwoFrame;
use crate::hilbert_module::ModuleVector;
use crate::linalg::CVector;
use crate::quotient::QuotientSpace;
use crate::sample::{random_complex, random_vector};
use crate::two_inner::TwoInnerSpace;

const MAX_RETRIES: usize = 32;

/// Conditioning floor for the associate: min_t |xi(t)|^2 >= RATIO * max_t.
const ASSOCIATE_SPECTRAL_RATIO: f64 = 0.1;

/// Draws an associate whose gram is invertible and well-conditioned.
pub fn draw_associate(
    algebra: &AlgebraDescriptor,
    rank: usize,
    rng: &mut impl Rng,
) -> Result<ModuleVector> {
    for _ in 0..MAX_RETRIES {
        let xi = random_vector(algebra, rank, rng);
        let gram = xi.inner(&xi)?;
        let Some(entries) = gram.diagonal_entries() else {
            return Err(CoreError::NonCommutative(algebra.to_string()));
        };
        let min = entries.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        let max = entries.iter().map(|c| c.re).fold(0.0, f64::max);
        if max > 0.0 && min >= ASSOCIATE_SPECTRAL_RATIO * max {
            return Ok(xi);
        }
    }
    Err(CoreError::GenerationFailed {
        retries: MAX_RETRIES,
        reason: "no well-conditioned associate found".into(),
    })
}

/// Generates a deterministic (space, frame) instance.
///
/// - `n_vectors == rank - 1` produces the orthonormalized complement basis,
///   a Parseval frame by construction, with claimed bounds (1, 1);
/// - `n_vectors >= rank` produces random complement-spanning combinations,
///   redrawn until the lower optimal bound exceeds `min_lower_bound`;
/// - `n_vectors < rank - 1` instances are returned as-is (they cannot be
///   frames and are flagged not-a-frame downstream).
pub fn generate_frame_instance(
    algebra: &AlgebraDescriptor,
    rank: usize,
    n_vectors: usize,
    tol: f64,
    min_lower_bound: f64,
    rng: &mut impl Rng,
) -> Result<(TwoInnerSpace, TwoFrame)> {
    let space = TwoInnerSpace::new(algebra.normalized(), rank)?;
    if !space.is_commutative() {
        return Err(CoreError::NonCommutative(algebra.to_string()));
    }
    let xi = draw_associate(algebra, rank, rng)?;
    let quotient = QuotientSpace::build(&xi, tol)?;
    let d = quotient.complement_dim();
    let n_points = quotient.points();

    if n_vectors == d {
        // complement basis scaled pointwise by 1 / |xi(t)|: the frame
        // operator becomes the identity on the complement
        let vectors: Vec<ModuleVector> = (0..d)
            .map(|k| {
                let points: Vec<CVector> = (0..n_points)
                    .map(|t| {
                        let u = quotient.point_basis(t).column(k).clone_owned();
                        u.scale(1.0 / quotient.xi_norm_sq()[t].sqrt())
                    })
                    .collect();
                ModuleVector::from_point_vectors(algebra, rank, &points)
            })
            .collect::<Result<Vec<_>>>()?;
        let frame = TwoFrame::new(vectors, xi, tol)?.with_claimed_bounds(1.0, 1.0)?;
        return Ok((space, frame));
    }

    let mut last_reason = String::new();
    for _ in 0..MAX_RETRIES {
        let vectors: Vec<ModuleVector> = (0..n_vectors)
            .map(|_| {
                let coords: Vec<CVector> = (0..n_points)
                    .map(|_| CVector::from_fn(d, |_, _| random_complex(rng)))
                    .collect();
                quotient.vector_from_coords(&coords)
            })
            .collect::<Result<Vec<_>>>()?;
        let frame = match TwoFrame::new(vectors, xi.clone(), tol) {
            Ok(f) => f,
            Err(CoreError::Dependent(why)) => {
                last_reason = why;
                continue;
            }
            Err(e) => return Err(e),
        };
        if n_vectors < d {
            // cannot span the complement; caller sees not-a-frame
            return Ok((space, frame));
        }
        match frame.optimal_bounds(tol) {
            Ok((a_opt, _)) if a_opt > min_lower_bound => return Ok((space, frame)),
            Ok((a_opt, _)) => {
                last_reason = format!("lower bound {a_opt:.3e} below floor {min_lower_bound:.3e}");
            }
            Err(CoreError::NotAFrame { a_opt, .. }) => {
                last_reason = format!("drawn family is not a frame (A_opt = {a_opt:.3e})");
            }
            Err(e) => return Err(e),
        }
    }
    Err(CoreError::GenerationFailed {
        retries: MAX_RETRIES,
        reason: last_reason,
    })
}
