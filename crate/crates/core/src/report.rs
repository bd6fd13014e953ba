//! Residual bookkeeping shared by every verification routine.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::calculus::FiberPoint;
use crate::C64;

/// How a residual is judged against its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    /// Identity holds: the largest residual must be `≤ tol`.
    AtMost,
    /// Identity is expected to fail: some sample must exceed `10·tol`.
    Witness,
    /// Quantity must stay bounded away from zero: the smallest value must be `> tol`.
    AtLeast,
}

impl Expect {
    pub fn as_str(self) -> &'static str {
        match self {
            Expect::AtMost => "at_most",
            Expect::Witness => "witness",
            Expect::AtLeast => "at_least",
        }
    }

    /// The bound the recorded value is compared with.
    pub fn threshold(self, tol: f64) -> f64 {
        match self {
            Expect::Witness => 10.0 * tol,
            _ => tol,
        }
    }

    fn passes(self, value: f64, tol: f64) -> bool {
        match self {
            Expect::AtMost => value <= tol,
            Expect::Witness => value > 10.0 * tol,
            Expect::AtLeast => value > tol,
        }
    }

    /// Whether `candidate` should replace `current` as the recorded extreme.
    fn more_extreme(self, candidate: f64, current: f64) -> bool {
        if current.is_nan() {
            return false;
        }
        if candidate.is_nan() {
            return true;
        }
        match self {
            Expect::AtMost | Expect::Witness => candidate > current,
            Expect::AtLeast => candidate < current,
        }
    }
}

/// Coordinates of the sample that produced a recorded residual.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleCoords {
    pub z: Vec<C64>,
    pub w: Option<Vec<C64>>,
}

impl SampleCoords {
    pub fn base(z: &[C64]) -> Self {
        SampleCoords { z: z.to_vec(), w: None }
    }

    pub fn fiber(p: &FiberPoint) -> Self {
        SampleCoords { z: p.z().to_vec(), w: Some(p.w().to_vec()) }
    }

    pub fn none() -> Self {
        SampleCoords::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRow {
    pub label: String,
    /// Largest residual seen (smallest for [`Expect::AtLeast`]).
    pub value: f64,
    pub tol: f64,
    pub expect: Expect,
    pub samples: usize,
    /// Sample at which `value` was attained.
    pub worst: SampleCoords,
}

impl ResidualRow {
    pub fn pass(&self) -> bool {
        self.expect.passes(self.value, self.tol)
    }
}

/// Per-identity extreme residuals for one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub suite: String,
    pub rows: Vec<ResidualRow>,
    /// Failures that prevented a check from running at all.
    pub errors: Vec<String>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(suite: &str) -> Self {
        VerificationReport { suite: suite.to_string(), rows: Vec::new(), errors: Vec::new(), notes: Vec::new() }
    }

    /// Adds one sample to the row `label`, creating the row on first use.
    pub fn record(&mut self, label: &str, value: f64, tol: f64, expect: Expect, at: SampleCoords) {
        match self.rows.iter_mut().find(|r| r.label == label) {
            Some(row) => {
                row.samples += 1;
                if row.expect.more_extreme(value, row.value) {
                    row.value = value;
                    row.worst = at;
                }
            }
            None => self.rows.push(ResidualRow {
                label: label.to_string(),
                value,
                tol,
                expect,
                samples: 1,
                worst: at,
            }),
        }
    }

    pub fn record_error(&mut self, message: impl ToString) {
        self.errors.push(message.to_string());
    }

    pub fn note(&mut self, message: impl ToString) {
        self.notes.push(message.to_string());
    }

    /// Folds another report's rows into this one, row by row.
    pub fn merge(&mut self, other: VerificationReport) {
        for row in other.rows {
            match self.rows.iter_mut().find(|r| r.label == row.label) {
                Some(mine) => {
                    mine.samples += row.samples;
                    if mine.expect.more_extreme(row.value, mine.value) {
                        mine.value = row.value;
                        mine.worst = row.worst;
                    }
                }
                None => self.rows.push(row),
            }
        }
        self.errors.extend(other.errors);
        self.notes.extend(other.notes);
    }

    pub fn row(&self, label: &str) -> Option<&ResidualRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn pass(&self) -> bool {
        self.errors.is_empty() && !self.rows.is_empty() && self.rows.iter().all(ResidualRow::pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ResidualRow> {
        self.rows.iter().filter(|r| !r.pass())
    }
}
