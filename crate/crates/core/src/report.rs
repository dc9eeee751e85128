//! Axiom check reports.
//!
//! A record carries the worst residual seen across all trials and, on
//! failure, the first witness encountered (by trial order), so reports are
//! deterministic regardless of how trials might be scheduled.

use serde::Serialize;

use crate::algebra::AlgebraElement;
use crate::hilbert_module::ModuleVector;

/// Concrete data that exhibits an axiom violation.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomWitness {
    pub vectors: Vec<ModuleVector>,
    pub coefficients: Vec<AlgebraElement>,
    pub residual: f64,
}

impl AxiomWitness {
    pub fn new(vectors: Vec<ModuleVector>, coefficients: Vec<AlgebraElement>) -> Self {
        AxiomWitness {
            vectors,
            coefficients,
            residual: 0.0,
        }
    }

    pub fn from_vectors(vectors: Vec<ModuleVector>) -> Self {
        Self::new(vectors, Vec::new())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomRecord {
    pub axiom: String,
    pub pass: bool,
    pub worst_residual: f64,
    pub witness: Option<AxiomWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub records: Vec<AxiomRecord>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn record(&self, axiom: &str) -> Option<&AxiomRecord> {
        self.records.iter().find(|r| r.axiom == axiom)
    }
}

/// Accumulates residuals for one axiom across trials.
pub(crate) struct RecordBuilder {
    axiom: String,
    worst: f64,
    pass: bool,
    witness: Option<AxiomWitness>,
}

impl RecordBuilder {
    pub fn new(axiom: &str) -> Self {
        RecordBuilder {
            axiom: axiom.to_string(),
            worst: 0.0,
            pass: true,
            witness: None,
        }
    }

    /// Feeds one trial's residual; captures the first failing witness.
    pub fn observe<F: FnOnce() -> AxiomWitness>(&mut self, residual: f64, tol: f64, witness: F) {
        if residual > self.worst {
            self.worst = residual;
        }
        if residual > tol && self.witness.is_none() {
            let mut w = witness();
            w.residual = residual;
            self.witness = Some(w);
            self.pass = false;
        }
    }

    /// Marks an outright failure that is not residual-based.
    pub fn fail<F: FnOnce() -> AxiomWitness>(&mut self, residual: f64, witness: F) {
        if residual > self.worst {
            self.worst = residual;
        }
        if self.witness.is_none() {
            let mut w = witness();
            w.residual = residual;
            self.witness = Some(w);
        }
        self.pass = false;
    }

    pub fn finish(self) -> AxiomRecord {
        AxiomRecord {
            axiom: self.axiom,
            pass: self.pass,
            worst_residual: self.worst,
            witness: self.witness,
        }
    }
}
