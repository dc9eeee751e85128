//! The standard A-valued 2-inner product and its axioms.
//!
//! For a module with inner product `<.,.>` the construction is
//!
//! ```text
//! <x, y | z> = <x, y><z, z> - <x, z><z, y>
//! ```
//!
//! an operator-valued Gram determinant in which the third slot acts as a
//! direction being modded out. Over a commutative algebra this satisfies
//! the seven axioms checked by [`TwoInnerSpace::check_axioms`]; over matrix
//! algebras the checker finds concrete counterexamples instead.
//!
//! The induced 2-norm is `p(x, z) = sqrt(||<x, x | z>||)`.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::algebra::{AlgebraDescriptor, AlgebraElement};
use crate::error::{CoreError, Result};
use crate::hilbert_module::{module_action, ModuleVector};
use crate::linalg::{min_singular_value, CMatrix};
use crate::report::{AxiomReport, AxiomWitness, RecordBuilder};
use crate::sample::{random_complex, random_element, random_vector, rng_from_seed};

/// Evaluates the standard 2-inner product `<x, y | z>`.
pub fn two_inner(x: &ModuleVector, y: &ModuleVector, z: &ModuleVector) -> Result<AlgebraElement> {
    let xy = x.inner(y)?;
    let zz = z.inner(z)?;
    let xz = x.inner(z)?;
    let zy = z.inner(y)?;
    xy.mul(&zz)?.sub(&xz.mul(&zy)?)
}

/// The 2-norm `p(x, z) = sqrt(||<x, x | z>||)`.
pub fn two_norm(x: &ModuleVector, z: &ModuleVector) -> Result<f64> {
    Ok(two_inner(x, x, z)?.norm().sqrt())
}

/// The Cauchy-Schwarz gap `<x,x|z><y,y|z> - <x,y|z><x,y|z>*`.
///
/// Over a commutative algebra this is a positive element; callers assert
/// `is_positive(gap, tol)`.
pub fn cauchy_schwarz_gap(
    x: &ModuleVector,
    y: &ModuleVector,
    z: &ModuleVector,
) -> Result<AlgebraElement> {
    let gxx = two_inner(x, x, z)?;
    let gyy = two_inner(y, y, z)?;
    let gxy = two_inner(x, y, z)?;
    gxx.mul(&gyy)?.sub(&gxy.mul(&gxy.adjoint())?)
}

/// Whether x(t) and y(t) span at most a line at every point.
///
/// This is the decision procedure for the degeneracy direction of the first
/// axiom: the second singular value of the m x 2 matrix [x(t) y(t)] must
/// stay below `sv_tol` at every point.
pub fn pointwise_colinear(x: &ModuleVector, y: &ModuleVector, sv_tol: f64) -> Result<bool> {
    let n = x.points().ok_or_else(|| {
        CoreError::NonCommutative(x.algebra().to_string())
    })?;
    let m = x.rank();
    for t in 0..n {
        let mut mat = CMatrix::zeros(m, 2);
        mat.set_column(0, &x.point_vector(t)?);
        mat.set_column(1, &y.point_vector(t)?);
        // second singular value = smallest of the 2-column matrix
        if min_singular_value(&mat) > sv_tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of the sup-characterization check for the 2-norm.
#[derive(Clone, Debug, Serialize)]
pub struct SupCharacterization {
    /// p(x, y).
    pub norm_value: f64,
    /// ||<x, z | y>|| for the witness z = x / p(x, y).
    pub witness_value: f64,
    /// |p(z, y) - 1| for the witness.
    pub witness_unit_residual: f64,
    /// How much any sampled unit-p direction exceeded p(x, y).
    pub sampled_excess: f64,
    pub pass: bool,
}

/// A module rank paired with the standard 2-inner product construction.
#[derive(Clone, Debug, Serialize)]
pub struct TwoInnerSpace {
    algebra: AlgebraDescriptor,
    rank: usize,
}

impl TwoInnerSpace {
    /// Requires rank >= 2 so that nondegenerate pairs exist.
    pub fn new(algebra: AlgebraDescriptor, rank: usize) -> Result<Self> {
        if rank < 2 {
            return Err(CoreError::InvalidArgument(format!(
                "a 2-inner product space needs rank >= 2, got {rank}"
            )));
        }
        Ok(TwoInnerSpace {
            algebra: algebra.normalized(),
            rank,
        })
    }

    pub fn algebra(&self) -> &AlgebraDescriptor {
        &self.algebra
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_commutative(&self) -> bool {
        self.algebra.is_commutative()
    }

    fn check_vector(&self, v: &ModuleVector) -> Result<()> {
        if v.algebra() != &self.algebra || v.rank() != self.rank {
            return Err(CoreError::ShapeMismatch(format!(
                "vector over {} rank {} does not belong to space over {} rank {}",
                v.algebra(),
                v.rank(),
                self.algebra,
                self.rank
            )));
        }
        Ok(())
    }

    pub fn two_inner(
        &self,
        x: &ModuleVector,
        y: &ModuleVector,
        z: &ModuleVector,
    ) -> Result<AlgebraElement> {
        self.check_vector(x)?;
        self.check_vector(y)?;
        self.check_vector(z)?;
        two_inner(x, y, z)
    }

    pub fn two_norm(&self, x: &ModuleVector, z: &ModuleVector) -> Result<f64> {
        self.check_vector(x)?;
        self.check_vector(z)?;
        two_norm(x, z)
    }

    pub fn random_vector(&self, rng: &mut impl Rng) -> ModuleVector {
        random_vector(&self.algebra, self.rank, rng)
    }

    /// Samples the seven 2-inner-product axioms on random data.
    ///
    /// The degeneracy axiom T1 is tested in both directions: colinear pairs
    /// must evaluate to zero, and near-zero evaluations must be pointwise
    /// colinear (rank oracle with singular threshold sqrt(tol)).
    pub fn check_axioms(&self, trials: usize, seed: u64, tol: f64) -> Result<AxiomReport> {
        let mut rng = rng_from_seed(seed);
        let mut t1 = RecordBuilder::new("T1");
        let mut t2 = RecordBuilder::new("T2");
        let mut t3 = RecordBuilder::new("T3");
        let mut t4 = RecordBuilder::new("T4");
        let mut t5 = RecordBuilder::new("T5");
        let mut t6 = RecordBuilder::new("T6");
        let mut t7 = RecordBuilder::new("T7");
        let sv_tol = tol.max(f64::EPSILON).sqrt();

        for _ in 0..trials {
            let x = self.random_vector(&mut rng);
            let y = self.random_vector(&mut rng);
            let z = self.random_vector(&mut rng);
            let w = self.random_vector(&mut rng);
            let a = random_element(&self.algebra, &mut rng);
            let b = random_element(&self.algebra, &mut rng);
            let alpha = random_complex(&mut rng);

            // T1 forward: a multiple of y is degenerate against y.
            let ay = module_action(&a, &y)?;
            let fwd = two_inner(&ay, &ay, &y)?.norm();
            t1.observe(fwd, tol, || {
                AxiomWitness::new(vec![ay.clone(), y.clone()], vec![a.clone()])
            });
            // T1 reverse, on commutative algebras: zero evaluation without
            // pointwise colinearity is a violation, and vice versa.
            if self.is_commutative() {
                let g = two_inner(&x, &x, &y)?.norm();
                let colinear = pointwise_colinear(&x, &y, sv_tol)?;
                if g <= tol && !colinear {
                    t1.fail(g.max(sv_tol), || {
                        AxiomWitness::from_vectors(vec![x.clone(), y.clone()])
                    });
                }
                if colinear && g > tol {
                    t1.fail(g, || {
                        AxiomWitness::from_vectors(vec![x.clone(), y.clone()])
                    });
                }
            }

            let gxx = two_inner(&x, &x, &y)?;
            t2.observe(gxx.positivity_residual(), tol, || {
                AxiomWitness::from_vectors(vec![x.clone(), y.clone()])
            });

            let r3 = gxx.sub(&two_inner(&y, &y, &x)?)?.norm();
            t3.observe(r3, tol, || {
                AxiomWitness::from_vectors(vec![x.clone(), y.clone()])
            });

            let r4 = two_inner(&x, &y, &z)?
                .sub(&two_inner(&y, &x, &z)?.adjoint())?
                .norm();
            t4.observe(r4, tol, || {
                AxiomWitness::from_vectors(vec![x.clone(), y.clone(), z.clone()])
            });

            let ax = module_action(&a, &x)?;
            let by = module_action(&b, &y)?;
            let lhs5 = two_inner(&ax, &by, &z)?;
            let rhs5 = a.mul(&two_inner(&x, &y, &z)?)?.mul(&b.adjoint())?;
            t5.observe(lhs5.sub(&rhs5)?.norm(), tol, || {
                AxiomWitness::new(
                    vec![x.clone(), y.clone(), z.clone()],
                    vec![a.clone(), b.clone()],
                )
            });

            let lhs6 = two_inner(&x, &y.scale(alpha), &z)?;
            let rhs6 = two_inner(&x, &y, &z)?.scale(alpha.conj());
            t6.observe(lhs6.sub(&rhs6)?.norm(), tol, || {
                let e = AlgebraElement::unit(&self.algebra);
                AxiomWitness::new(vec![x.clone(), y.clone(), z.clone()], vec![e.scale(alpha)])
            });

            let lhs7 = two_inner(&x.add(&y)?, &z, &w)?;
            let rhs7 = two_inner(&x, &z, &w)?.add(&two_inner(&y, &z, &w)?)?;
            t7.observe(lhs7.sub(&rhs7)?.norm(), tol, || {
                AxiomWitness::from_vectors(vec![x.clone(), y.clone(), z.clone(), w.clone()])
            });
        }

        Ok(AxiomReport {
            records: vec![
                t1.finish(),
                t2.finish(),
                t3.finish(),
                t4.finish(),
                t5.finish(),
                t6.finish(),
                t7.finish(),
            ],
            trials,
            seed,
            tol,
        })
    }

    /// Verifies the sup formula for the 2-norm:
    /// p(x, y) = sup { ||<x, z | y>|| : p(z, y) = 1 }.
    ///
    /// The witness z = x / p(x, y) must attain the sup, and sampled unit-p
    /// directions must not exceed it.
    pub fn sup_characterization_check(
        &self,
        x: &ModuleVector,
        y: &ModuleVector,
        samples: usize,
        rng: &mut impl Rng,
        tol: f64,
    ) -> Result<SupCharacterization> {
        self.check_vector(x)?;
        self.check_vector(y)?;
        let p = two_norm(x, y)?;
        if p <= tol {
            return Err(CoreError::DegenerateInput(format!(
                "p(x, y) = {p:.3e} is within tolerance of zero"
            )));
        }
        let z = x.scale(Complex64::new(1.0 / p, 0.0));
        let witness_unit_residual = (two_norm(&z, y)? - 1.0).abs();
        let witness_value = two_inner(x, &z, y)?.norm();
        let mut sampled_excess: f64 = 0.0;
        for _ in 0..samples {
            let w = self.random_vector(rng);
            let q = two_norm(&w, y)?;
            if q <= tol {
                continue;
            }
            let zu = w.scale(Complex64::new(1.0 / q, 0.0));
            let v = two_inner(x, &zu, y)?.norm();
            sampled_excess = sampled_excess.max(v - p);
        }
        sampled_excess = sampled_excess.max(0.0);
        let pass = witness_unit_residual <= tol
            && (witness_value - p).abs() <= tol
            && sampled_excess <= tol;
        Ok(SupCharacterization {
            norm_value: p,
            witness_value,
            witness_unit_residual,
            sampled_excess,
            pass,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    // Independent oracle: pointwise Gram determinant of the pair (x, z).
    fn gram_det_oracle(x: &ModuleVector, z: &ModuleVector) -> Vec<f64> {
        let n = x.points().unwrap();
        (0..n)
            .map(|t| {
                let xv = x.point_vector(t).unwrap();
                let zv = z.point_vector(t).unwrap();
                let xx: f64 = xv.iter().map(|c| c.norm_sqr()).sum();
                let zz: f64 = zv.iter().map(|c| c.norm_sqr()).sum();
                let xz: Complex64 = xv.iter().zip(zv.iter()).map(|(a, b)| a * b.conj()).sum();
                xx * zz - xz.norm_sqr()
            })
            .collect()
    }

    #[test]
    fn standard_construction_worked_example() {
        let x = vec_d(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let z = vec_d(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let g = two_inner(&x, &x, &z).unwrap();
        assert!(g.sub(&elem_d(&[0.0, 1.0])).unwrap().is_zero(1e-14));
        // oracle agreement
        let oracle = gram_det_oracle(&x, &z);
        for (t, &d) in oracle.iter().enumerate() {
            let got = g.diagonal_entries().unwrap()[t];
            assert!((got.re - d).abs() < 1e-14 && got.im.abs() < 1e-14);
        }

        let y = vec_d(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let gxy = two_inner(&x, &y, &z).unwrap();
        assert!(gxy.is_zero(1e-14));

        // multiples of z are degenerate against z
        let a = elem_d(&[2.0, 3.0]);
        let az = module_action(&a, &z).unwrap();
        assert!(two_inner(&az, &az, &z).unwrap().is_zero(1e-14));
    }

    #[test]
    fn two_norm_examples() {
        let x = vec_d(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let z = vec_d(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert!((two_norm(&x, &z).unwrap() - 1.0).abs() < 1e-14);
        let a = elem_d(&[2.0, -1.0]);
        let az = module_action(&a, &z).unwrap();
        assert!(two_norm(&az, &z).unwrap() < 1e-12);
    }

    #[test]
    fn two_norm_invariant_under_second_slot_shift() {
        let desc = AlgebraDescriptor::diagonal(3);
        let mut rng = rng_from_seed(23);
        for _ in 0..300 {
            let x = random_vector(&desc, 4, &mut rng);
            let z = random_vector(&desc, 4, &mut rng);
            let a = random_element(&desc, &mut rng);
            let shifted = z.add(&module_action(&a, &x).unwrap()).unwrap();
            let p0 = two_norm(&x, &z).unwrap();
            let p1 = two_norm(&x, &shifted).unwrap();
            assert!((p0 - p1).abs() <= 1e-9 * (1.0 + p0), "{p0} vs {p1}");
            // Gram-determinant oracle sees the same invariance pointwise
            let d0 = gram_det_oracle(&x, &z);
            let d1 = gram_det_oracle(&x, &shifted);
            for (a, b) in d0.iter().zip(&d1) {
                assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn cauchy_schwarz_gap_properties() {
        let desc = AlgebraDescriptor::diagonal(3);
        let mut rng = rng_from_seed(5);
        for _ in 0..1000 {
            let space = TwoInnerSpace::new(desc.clone(), 4).unwrap();
            let x = space.random_vector(&mut rng);
            let y = space.random_vector(&mut rng);
            let z = space.random_vector(&mut rng);
            let gap = cauchy_schwarz_gap(&x, &y, &z).unwrap();
            assert!(gap.is_positive(1e-9), "gap residual {}", gap.positivity_residual());
        }
        // equality case y = x gives an exactly zero gap
        let mut rng = rng_from_seed(6);
        let x = random_vector(&desc, 4, &mut rng);
        let z = random_vector(&desc, 4, &mut rng);
        let gap = cauchy_schwarz_gap(&x, &x, &z).unwrap();
        assert!(gap.norm() <= 1e-12, "equality gap {}", gap.norm());
    }

    #[test]
    fn axioms_pass_on_commutative_algebras() {
        let space = TwoInnerSpace::new(AlgebraDescriptor::diagonal(4), 3).unwrap();
        let report = space.check_axioms(500, 1, 1e-9).unwrap();
        assert!(report.all_pass(), "{:#?}", report.records);
    }

    #[test]
    fn axioms_fail_with_witness_on_matrix_algebras() {
        let space = TwoInnerSpace::new(AlgebraDescriptor::matrix(2), 2).unwrap();
        let report = space.check_axioms(200, 1, 1e-9).unwrap();
        let t2 = report.record("T2").unwrap();
        let t3 = report.record("T3").unwrap();
        assert!(
            !t2.pass || !t3.pass,
            "expected a T2 or T3 counterexample over matrix(2)"
        );
        let failing = if !t2.pass { t2 } else { t3 };
        assert!(failing.witness.is_some());
        assert!(failing.worst_residual > 1e-9);
    }

    #[test]
    fn vacuous_report_passes() {
        let space = TwoInnerSpace::new(AlgebraDescriptor::diagonal(2), 2).unwrap();
        let report = space.check_axioms(0, 9, 1e-9).unwrap();
        assert!(report.all_pass());
        assert!(report.records.iter().all(|r| r.worst_residual == 0.0));
    }

    #[test]
    fn norm_product_bound() {
        // ||<x, y | z>|| <= p(x, z) p(y, z)
        let desc = AlgebraDescriptor::diagonal(3);
        let mut rng = rng_from_seed(12);
        for _ in 0..1000 {
            let x = random_vector(&desc, 4, &mut rng);
            let y = random_vector(&desc, 4, &mut rng);
            let z = random_vector(&desc, 4, &mut rng);
            let lhs = two_inner(&x, &y, &z).unwrap().norm();
            let rhs = two_norm(&x, &z).unwrap() * two_norm(&y, &z).unwrap();
            assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
        }
    }

    #[test]
    fn two_norm_axioms_on_random_data() {
        let desc = AlgebraDescriptor::diagonal(3);
        let mut rng = rng_from_seed(13);
        for _ in 0..500 {
            let x = random_vector(&desc, 4, &mut rng);
            let y = random_vector(&desc, 4, &mut rng);
            let z = random_vector(&desc, 4, &mut rng);
            let a = random_element(&desc, &mut rng);
            let alpha = random_complex(&mut rng);

            // scalar homogeneity
            let lhs = two_norm(&x.scale(alpha), &y).unwrap();
            let rhs = alpha.norm() * two_norm(&x, &y).unwrap();
            assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));

            // symmetry p(x, y) = p(y, x)
            let pxy = two_norm(&x, &y).unwrap();
            let pyx = two_norm(&y, &x).unwrap();
            assert!((pxy - pyx).abs() <= 1e-9 * (1.0 + pxy));

            // triangle inequality in the first slot
            let tri = two_norm(&x.add(&y).unwrap(), &z).unwrap();
            let sum = two_norm(&x, &z).unwrap() + two_norm(&y, &z).unwrap();
            assert!(tri <= sum + 1e-9);

            // module-action bound p(ax, y) <= ||a|| p(x, y)
            let pax = two_norm(&module_action(&a, &x).unwrap(), &y).unwrap();
            assert!(pax <= a.norm() * two_norm(&x, &y).unwrap() + 1e-9);
        }
    }

    #[test]
    fn sup_characterization() {
        let space = TwoInnerSpace::new(AlgebraDescriptor::diagonal(2), 2).unwrap();
        let x = vec_d(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let z = vec_d(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let mut rng = rng_from_seed(3);
        let out = space
            .sup_characterization_check(&x, &z, 200, &mut rng, 1e-9)
            .unwrap();
        assert!(out.pass, "{out:?}");
        assert!((out.witness_value - out.norm_value).abs() <= 1e-9);

        // degenerate input: x a module multiple of y
        let a = elem_d(&[2.0, 3.0]);
        let az = module_action(&a, &z).unwrap();
        assert!(matches!(
            space.sup_characterization_check(&az, &z, 10, &mut rng, 1e-9),
            Err(CoreError::DegenerateInput(_))
        ));
    }

    #[test]
    fn space_requires_rank_two() {
        assert!(matches!(
            TwoInnerSpace::new(AlgebraDescriptor::diagonal(2), 1),
            Err(CoreError::InvalidArgument(_))
        ));
    }

    #[test]
    fn t1_reverse_direction_catches_rank_oracle() {
        // colinear at every point, by construction with different scalars per point
        let y = vec_d(&[&[1.0, 1.0], &[2.0, 0.5]]);
        let a = elem_d(&[3.0, -0.25]);
        let x = module_action(&a, &y).unwrap();
        assert!(pointwise_colinear(&x, &y, 1e-8).unwrap());
        assert!(two_inner(&x, &x, &y).unwrap().norm() < 1e-12);
        // generic pair is not colinear
        let w = vec_d(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(!pointwise_colinear(&w, &y, 1e-8).unwrap());
    }
}
