//! Suite orchestration: deterministic instance generation and the full
//! check battery over one configuration.

use anyhow::Result;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use framelab_core::error::CoreError;
use framelab_core::frames::{
    from_module_frame, mixed_associate_residual, module_frame_bounds,
    restrict_to_complement_frame, tightness_from_reconstruction, TwoFrame,
};
use framelab_core::generate::{draw_associate, generate_frame_instance};
use framelab_core::hilbert_module::{
    check_module_axioms, is_a_independent, module_action, ModuleFrame, ModuleVector,
};
use framelab_core::sample::{random_element, random_vector, rng_from_seed};
use framelab_core::tensor::{tensor_check, TensorFrame, TENSOR_BOUNDS_SLACK};
use framelab_core::two_inner::{cauchy_schwarz_gap, two_inner, two_norm, TwoInnerSpace};

use crate::config::SuiteConfig;

/// Floor for the lower frame bound of generated instances; keeps the
/// inverse-frame-operator solves well-conditioned.
pub const GENERATED_LOWER_BOUND_FLOOR: f64 = 0.01;

/// One executed (or skipped) check.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteRecord {
    pub name: String,
    pub anchor: String,
    pub pass: bool,
    pub worst_residual: f64,
    pub witness: Option<Value>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub tool_version: String,
    pub timestamp_unix: u64,
    pub config: SuiteConfig,
    pub records: Vec<SuiteRecord>,
    pub overall_pass: bool,
}

impl SuiteReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "framelab suite v{} (seed {}, tol {:.1e})\n",
            self.tool_version, self.config.seed, self.config.tol
        ));
        for r in &self.records {
            let status = if let Some(note) = &r.note {
                if r.pass {
                    format!("SKIP ({note})")
                } else {
                    format!("FAIL ({note})")
                }
            } else if r.pass {
                "PASS".to_string()
            } else {
                "FAIL".to_string()
            };
            out.push_str(&format!(
                "{:<38} {:<10} worst residual {:.3e}  [{}]\n",
                r.name, status, r.worst_residual, r.anchor
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.overall_pass { "PASS" } else { "FAIL" }
        ));
        out
    }
}

struct Sink {
    records: Vec<SuiteRecord>,
}

impl Sink {
    fn new() -> Self {
        Sink {
            records: Vec::new(),
        }
    }

    fn record(
        &mut self,
        name: &str,
        anchor: &str,
        pass: bool,
        worst_residual: f64,
        witness: Option<Value>,
    ) {
        self.records.push(SuiteRecord {
            name: name.into(),
            anchor: anchor.into(),
            pass,
            worst_residual,
            witness,
            note: None,
        });
    }

    fn fail_with_note(&mut self, name: &str, anchor: &str, note: String) {
        self.records.push(SuiteRecord {
            name: name.into(),
            anchor: anchor.into(),
            pass: false,
            worst_residual: f64::NAN,
            witness: None,
            note: Some(note),
        });
    }

    fn skip(&mut self, name: &str, anchor: &str, why: &str) {
        self.records.push(SuiteRecord {
            name: name.into(),
            anchor: anchor.into(),
            pass: true,
            worst_residual: 0.0,
            witness: None,
            note: Some(why.into()),
        });
    }
}

/// Deterministic instance generation for a configuration: the associate and
/// frame draw from a ChaCha8 stream seeded by the config seed only.
pub fn generate_instance(config: &SuiteConfig) -> Result<(TwoInnerSpace, TwoFrame), CoreError> {
    let mut rng = rng_from_seed(config.seed);
    generate_frame_instance(
        &config.algebra,
        config.rank,
        config.frame_size,
        config.tol,
        GENERATED_LOWER_BOUND_FLOOR,
        &mut rng,
    )
}

const COMMUTATIVE_ONLY: &str = "requires commutative algebra";

/// Names and anchors of the frame- and tensor-level checks, in execution
/// order; used both for running and for emitting skip records.
const FRAME_CHECKS: &[(&str, &str)] = &[
    ("cauchy-schwarz", "Cauchy-Schwarz gap positivity"),
    ("two-norm/product-bound", "norm bound via 2-norm products"),
    ("two-norm/sup-characterization", "2-norm sup characterization"),
    ("two-norm/shift-invariance", "2-norm slot-shift invariance"),
    ("frame/generation", "seeded instance generation"),
    ("frame/optimal-bounds", "optimal frame bounds"),
    ("frame/verify-bounds", "frame bound verification"),
    ("frame/synthesis-norm", "synthesis operator norm"),
    ("frame/operator-norm", "frame operator norm"),
    ("frame/self-adjoint", "frame operator self-adjointness"),
    ("frame/positivity", "frame operator positivity sandwich"),
    ("frame/reconstruction", "inverse frame operator reconstruction"),
    ("frame/mixed-associates", "mixed associate symmetry"),
    ("conversions/module-to-2-frame", "module frame conversion bounds"),
    ("conversions/complement-restriction", "complement module frame restriction"),
    ("frame/tightness", "reconstruction identity implies tightness"),
    ("tensor/certified-bounds", "product frame certified bounds"),
    ("tensor/frame-operator", "product frame operator factorization"),
    ("tensor/scalar-restriction", "scalar-factor frame restriction"),
    ("tensor/parseval", "Parseval product frame"),
    ("tensor/tightness", "tensor reconstruction identity implies tightness"),
];

/// Runs the full battery for one configuration.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let mut sink = Sink::new();
    let tol = config.tol;

    // axiom suites run on every algebra; counterexamples are the point of
    // running them on non-commutative ones
    let space = TwoInnerSpace::new(config.algebra.clone(), config.rank)
        .map_err(|e| anyhow::anyhow!("invalid config: {e}"))?;
    let t_report = space.check_axioms(config.trials, config.seed, tol)?;
    for rec in &t_report.records {
        sink.record(
            &format!("axioms/{}", rec.axiom),
            &format!("2-inner product axiom {}", rec.axiom),
            rec.pass,
            rec.worst_residual,
            rec.witness.as_ref().map(|w| serde_json::to_value(w).unwrap()),
        );
    }
    let i_report = check_module_axioms(&config.algebra, config.rank, config.trials, config.seed, tol)?;
    for rec in &i_report.records {
        sink.record(
            &format!("axioms/{}", rec.axiom),
            &format!("module inner product axiom {}", rec.axiom),
            rec.pass,
            rec.worst_residual,
            rec.witness.as_ref().map(|w| serde_json::to_value(w).unwrap()),
        );
    }

    if !config.algebra.is_commutative() {
        for (name, anchor) in FRAME_CHECKS {
            sink.skip(name, anchor, COMMUTATIVE_ONLY);
        }
        return Ok(finish(config, sink));
    }

    let mut rng = rng_from_seed(config.seed);
    run_two_inner_checks(config, &space, &mut sink, &mut rng);
    run_frame_checks(config, &mut sink, &mut rng);

    Ok(finish(config, sink))
}

fn run_two_inner_checks(
    config: &SuiteConfig,
    space: &TwoInnerSpace,
    sink: &mut Sink,
    rng: &mut ChaCha8Rng,
) {
    let tol = config.tol;
    let desc = &config.algebra;
    let m = config.rank;

    let mut gap_residual: f64 = 0.0;
    let mut gap_witness = None;
    for _ in 0..config.trials {
        let x = random_vector(desc, m, rng);
        let y = random_vector(desc, m, rng);
        let z = random_vector(desc, m, rng);
        let gap = cauchy_schwarz_gap(&x, &y, &z).expect("shapes match");
        let r = gap.positivity_residual();
        if r > gap_residual {
            gap_residual = r;
            if r > tol && gap_witness.is_none() {
                gap_witness = Some(serde_json::to_value([&x, &y, &z]).unwrap());
            }
        }
        // equality case
        let eq = cauchy_schwarz_gap(&x, &x, &z).expect("shapes match").norm();
        gap_residual = gap_residual.max(eq);
    }
    sink.record(
        "cauchy-schwarz",
        "Cauchy-Schwarz gap positivity",
        gap_residual <= tol,
        gap_residual,
        gap_witness,
    );

    let mut bound_residual: f64 = 0.0;
    let mut sup_residual: f64 = 0.0;
    let mut shift_residual: f64 = 0.0;
    for _ in 0..config.trials {
        let x = random_vector(desc, m, rng);
        let y = random_vector(desc, m, rng);
        let z = random_vector(desc, m, rng);
        let a = random_element(desc, rng);

        let lhs = two_inner(&x, &y, &z).expect("shapes match").norm();
        let cap = two_norm(&x, &z).unwrap() * two_norm(&y, &z).unwrap();
        bound_residual = bound_residual.max(lhs - cap);

        if let Ok(out) = space.sup_characterization_check(&x, &y, 5, rng, tol) {
            sup_residual = sup_residual
                .max(out.witness_unit_residual)
                .max((out.witness_value - out.norm_value).abs())
                .max(out.sampled_excess);
        }

        let shifted = y.add(&module_action(&a, &x).unwrap()).unwrap();
        let p0 = two_norm(&x, &y).unwrap();
        let p1 = two_norm(&x, &shifted).unwrap();
        shift_residual = shift_residual.max((p0 - p1).abs());
    }
    bound_residual = bound_residual.max(0.0);
    sink.record(
        "two-norm/product-bound",
        "norm bound via 2-norm products",
        bound_residual <= tol,
        bound_residual,
        None,
    );
    sink.record(
        "two-norm/sup-characterization",
        "2-norm sup characterization",
        sup_residual <= tol,
        sup_residual,
        None,
    );
    sink.record(
        "two-norm/shift-invariance",
        "2-norm slot-shift invariance",
        shift_residual <= tol,
        shift_residual,
        None,
    );
}

fn run_frame_checks(config: &SuiteConfig, sink: &mut Sink, rng: &mut ChaCha8Rng) {
    let tol = config.tol;
    let desc = &config.algebra;
    let m = config.rank;
    let probes = config.trials.min(50);

    let frame = match generate_instance(config) {
        Ok((_, frame)) => {
            sink.record("frame/generation", "seeded instance generation", true, 0.0, None);
            frame
        }
        Err(e) => {
            sink.fail_with_note("frame/generation", "seeded instance generation", e.to_string());
            for (name, anchor) in &FRAME_CHECKS[5..] {
                sink.skip(name, anchor, "skipped: instance generation failed");
            }
            return;
        }
    };

    let ops = frame.operators(tol).expect("generated associate is invertible");
    let bounds = match ops.optimal_bounds(tol) {
        Ok(bounds) => {
            sink.record("frame/optimal-bounds", "optimal frame bounds", true, 0.0, None);
            bounds
        }
        Err(e) => {
            sink.fail_with_note("frame/optimal-bounds", "optimal frame bounds", e.to_string());
            for (name, anchor) in &FRAME_CHECKS[6..] {
                sink.skip(name, anchor, "skipped: instance is not a frame");
            }
            return;
        }
    };
    let (a_opt, b_opt) = bounds;

    let claim = frame.claimed_bounds().unwrap_or(bounds);
    match frame.verify_bounds(claim.0, claim.1, tol) {
        Ok(verdict) => sink.record(
            "frame/verify-bounds",
            "frame bound verification",
            verdict.pass,
            0.0,
            verdict.witness.map(|w| serde_json::to_value(w).unwrap()),
        ),
        Err(e) => sink.fail_with_note("frame/verify-bounds", "frame bound verification", e.to_string()),
    }

    let synth_excess = (ops.synthesis_norm() - b_opt.sqrt()).max(0.0);
    sink.record(
        "frame/synthesis-norm",
        "synthesis operator norm",
        synth_excess <= tol,
        synth_excess,
        None,
    );
    let op_excess = (ops.frame_operator_norm() - b_opt).max(0.0);
    sink.record(
        "frame/operator-norm",
        "frame operator norm",
        op_excess <= tol,
        op_excess,
        None,
    );

    let mut adj_residual: f64 = 0.0;
    let mut pos_residual: f64 = 0.0;
    let mut rec_residual: f64 = 0.0;
    for _ in 0..probes {
        let x = random_vector(desc, m, rng);
        let y = random_vector(desc, m, rng);
        let sx = frame.frame_operator_apply(&x).unwrap();
        let sy = frame.frame_operator_apply(&y).unwrap();
        let sym = two_inner(&sx, &y, frame.associate())
            .unwrap()
            .sub(&two_inner(&x, &sy, frame.associate()).unwrap())
            .unwrap()
            .norm();
        adj_residual = adj_residual.max(sym);

        // positivity sandwich in the operator order
        let quad = two_inner(&sx, &x, frame.associate()).unwrap();
        let gxx = two_inner(&x, &x, frame.associate()).unwrap();
        let below = quad
            .sub(&gxx.scale(num_complex::Complex64::new(a_opt, 0.0)))
            .unwrap()
            .positivity_residual();
        let above = gxx
            .scale(num_complex::Complex64::new(b_opt, 0.0))
            .sub(&quad)
            .unwrap()
            .positivity_residual();
        pos_residual = pos_residual.max(below).max(above);

        let rec = frame.reconstruct(&x, tol).unwrap();
        let px = ops.quotient().project(&x).unwrap();
        rec_residual = rec_residual.max(rec.sub(&px).unwrap().norm() / x.norm().max(1e-300));
    }
    sink.record(
        "frame/self-adjoint",
        "frame operator self-adjointness",
        adj_residual <= tol,
        adj_residual,
        None,
    );
    sink.record(
        "frame/positivity",
        "frame operator positivity sandwich",
        pos_residual <= tol,
        pos_residual,
        None,
    );
    sink.record(
        "frame/reconstruction",
        "inverse frame operator reconstruction",
        rec_residual <= tol,
        rec_residual,
        None,
    );

    // second associate, independent of the first
    let mut mixed_residual: f64 = 0.0;
    let mut mixed_ok = false;
    for _ in 0..8 {
        let eta = match draw_associate(desc, m, rng) {
            Ok(eta) => eta,
            Err(_) => continue,
        };
        if !is_a_independent(&[frame.associate().clone(), eta.clone()], tol).unwrap_or(false) {
            continue;
        }
        mixed_ok = true;
        for _ in 0..probes {
            let x = random_vector(desc, m, rng);
            let r = mixed_associate_residual(frame.vectors(), frame.associate(), &eta, &x, tol)
                .expect("independence checked");
            mixed_residual = mixed_residual.max(r);
        }
        break;
    }
    if mixed_ok {
        sink.record(
            "frame/mixed-associates",
            "mixed associate symmetry",
            mixed_residual <= tol,
            mixed_residual,
            None,
        );
    } else {
        sink.fail_with_note(
            "frame/mixed-associates",
            "mixed associate symmetry",
            "no independent second associate found".into(),
        );
    }

    run_conversion_checks(config, &frame, sink, rng);
    run_tensor_checks(config, sink, rng);
}

fn run_conversion_checks(
    config: &SuiteConfig,
    frame: &TwoFrame,
    sink: &mut Sink,
    rng: &mut ChaCha8Rng,
) {
    let tol = config.tol;
    let desc = &config.algebra;
    let m = config.rank;

    // module frame -> 2-frame with certified bounds containing the optimal
    let mut converted = false;
    for _ in 0..16 {
        let vectors: Vec<ModuleVector> =
            (0..m + 2).map(|_| random_vector(desc, m, rng)).collect();
        let plain = ModuleFrame::new(vectors.clone(), None).unwrap();
        let Ok((a, b)) = module_frame_bounds(&plain, tol) else {
            continue;
        };
        let mf = ModuleFrame::new(vectors, Some((a, b))).unwrap();
        let Ok(xi) = draw_associate(desc, m, rng) else {
            continue;
        };
        let Ok(f) = from_module_frame(&mf, &xi, tol) else {
            continue;
        };
        let (c, d) = f.claimed_bounds().unwrap();
        let Ok((a_opt, b_opt)) = f.optimal_bounds(tol) else {
            continue;
        };
        let excess = (c - a_opt).max(b_opt - d).max(0.0);
        sink.record(
            "conversions/module-to-2-frame",
            "module frame conversion bounds",
            excess <= tol,
            excess,
            None,
        );
        converted = true;
        break;
    }
    if !converted {
        sink.fail_with_note(
            "conversions/module-to-2-frame",
            "module frame conversion bounds",
            "no convertible module frame drawn".into(),
        );
    }

    match restrict_to_complement_frame(frame, tol) {
        Ok(_) => sink.record(
            "conversions/complement-restriction",
            "complement module frame restriction",
            true,
            0.0,
            None,
        ),
        Err(e) => sink.fail_with_note(
            "conversions/complement-restriction",
            "complement module frame restriction",
            e.to_string(),
        ),
    }

    // a Parseval instance must satisfy the reconstruction identity
    let parseval = generate_frame_instance(desc, m, m - 1, tol, 0.5, rng);
    match parseval {
        Ok((_, p)) => match tightness_from_reconstruction(p.vectors(), p.associate(), tol) {
            Ok(tight) => sink.record(
                "frame/tightness",
                "reconstruction identity implies tightness",
                tight,
                0.0,
                None,
            ),
            Err(e) => sink.fail_with_note(
                "frame/tightness",
                "reconstruction identity implies tightness",
                e.to_string(),
            ),
        },
        Err(e) => sink.fail_with_note(
            "frame/tightness",
            "reconstruction identity implies tightness",
            e.to_string(),
        ),
    }
}

fn run_tensor_checks(config: &SuiteConfig, sink: &mut Sink, rng: &mut ChaCha8Rng) {
    let tol = config.tol;
    let desc = &config.algebra;
    let m = config.rank;
    let n = config.frame_size;

    let pair = (
        generate_frame_instance(desc, m, n, tol, GENERATED_LOWER_BOUND_FLOOR, rng),
        generate_frame_instance(desc, m, n, tol, GENERATED_LOWER_BOUND_FLOOR, rng),
    );
    match pair {
        (Ok((_, left)), Ok((_, right))) => {
            match tensor_check(&left, &right, tol) {
                Ok(report) => {
                    let (ca, cb) = report.bounds_certified;
                    let (oa, ob) = report.bounds_optimal;
                    let bound_excess = (ca - oa).max(ob - cb).max(0.0);
                    sink.record(
                        "tensor/certified-bounds",
                        "product frame certified bounds",
                        bound_excess <= TENSOR_BOUNDS_SLACK,
                        bound_excess,
                        None,
                    );
                    sink.record(
                        "tensor/frame-operator",
                        "product frame operator factorization",
                        report.frame_operator_residual <= tol,
                        report.frame_operator_residual,
                        None,
                    );
                }
                Err(e) => {
                    sink.fail_with_note("tensor/certified-bounds", "product frame certified bounds", e.to_string());
                    sink.skip(
                        "tensor/frame-operator",
                        "product frame operator factorization",
                        "skipped: tensor build failed",
                    );
                }
            }
            run_scalar_restriction_check(config, right, sink, rng);
        }
        _ => {
            sink.fail_with_note(
                "tensor/certified-bounds",
                "product frame certified bounds",
                "factor instance generation failed".into(),
            );
            sink.skip(
                "tensor/frame-operator",
                "product frame operator factorization",
                "skipped: tensor build failed",
            );
            sink.skip(
                "tensor/scalar-restriction",
                "scalar-factor frame restriction",
                "skipped: tensor build failed",
            );
        }
    }

    // Parseval (x) Parseval
    let parseval_pair = (
        generate_frame_instance(desc, m, m - 1, tol, 0.5, rng),
        generate_frame_instance(desc, m, m - 1, tol, 0.5, rng),
    );
    match parseval_pair {
        (Ok((_, p1)), Ok((_, p2))) => {
            match tensor_check(&p1, &p2, tol) {
                Ok(report) => {
                    let (oa, ob) = report.bounds_optimal;
                    let dev = (oa - 1.0).abs().max((ob - 1.0).abs());
                    sink.record(
                        "tensor/parseval",
                        "Parseval product frame",
                        dev <= tol && report.pass,
                        dev,
                        None,
                    );
                }
                Err(e) => {
                    sink.fail_with_note("tensor/parseval", "Parseval product frame", e.to_string())
                }
            }
            match TensorFrame::build(p1, p2, tol)
                .and_then(|tf| tf.tightness_from_reconstruction(tol))
            {
                Ok(tight) => sink.record(
                    "tensor/tightness",
                    "tensor reconstruction identity implies tightness",
                    tight,
                    0.0,
                    None,
                ),
                Err(e) => sink.fail_with_note(
                    "tensor/tightness",
                    "tensor reconstruction identity implies tightness",
                    e.to_string(),
                ),
            }
        }
        _ => {
            sink.fail_with_note(
                "tensor/parseval",
                "Parseval product frame",
                "factor instance generation failed".into(),
            );
            sink.skip(
                "tensor/tightness",
                "tensor reconstruction identity implies tightness",
                "skipped: Parseval factors unavailable",
            );
        }
    }
}

/// Restriction of a product frame with scalar left factor to its right
/// factor, with the witness-relative derived bounds verified by sampling.
fn run_scalar_restriction_check(
    config: &SuiteConfig,
    right: TwoFrame,
    sink: &mut Sink,
    rng: &mut ChaCha8Rng,
) {
    const NAME: &str = "tensor/scalar-restriction";
    const ANCHOR: &str = "scalar-factor frame restriction";
    let tol = config.tol;
    let scalar = framelab_core::algebra::AlgebraDescriptor::diagonal(1);
    let left = match generate_frame_instance(
        &scalar,
        config.rank,
        config.frame_size,
        tol,
        GENERATED_LOWER_BOUND_FLOOR,
        rng,
    ) {
        Ok((_, f)) => f,
        Err(e) => {
            sink.fail_with_note(NAME, ANCHOR, format!("scalar factor generation failed: {e}"));
            return;
        }
    };
    let witness = match left.operators(tol) {
        Ok(ops) => ops.quotient().complement_basis()[0].clone(),
        Err(e) => {
            sink.fail_with_note(NAME, ANCHOR, e.to_string());
            return;
        }
    };
    match TensorFrame::build(left, right, tol)
        .and_then(|tf| tf.scalar_factor_restriction(&witness, config.trials.min(25), rng, tol))
    {
        Ok(out) => sink.record(NAME, ANCHOR, out.verified && out.lower <= out.upper, 0.0, None),
        Err(e) => sink.fail_with_note(NAME, ANCHOR, e.to_string()),
    }
}

fn finish(config: &SuiteConfig, sink: Sink) -> SuiteReport {
    let overall_pass = sink.records.iter().all(|r| r.pass);
    SuiteReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        config: config.clone(),
        records: sink.records,
        overall_pass,
    }
}
