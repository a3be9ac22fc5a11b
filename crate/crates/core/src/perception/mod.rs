//! Perception pairs: signal spaces on a finite domain together with a group of
//! invertible Φ-operations acting on the right by precomposition.

mod automorphism;
mod pair;

pub use automorphism::{enumerate_automorphisms, AutomorphismSearch};
pub use pair::{
    aut_distance, natural_pseudo_distance, natural_pseudo_distance_over, separation_check, validate_operation, OperationCheck,
    OperationMap, PairFile, PerceptionPair, Separation, MAX_GROUP_ORDER,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;
use crate::DEFAULT_TOLERANCE;

/// Sup-norm distance of two equal-length slices.
#[inline]
pub(crate) fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Sup-norm distance, stopping early once it exceeds `limit`.
#[inline]
pub(crate) fn sup_dist_exceeds(a: &[f64], b: &[f64], limit: f64) -> bool {
    a.iter().zip(b).any(|(x, y)| (x - y).abs() > limit)
}

/// A bounded real function on the points `0..len` of a finite domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    values: Vec<f64>,
    bound: f64,
}

impl Signal {
    /// Signal whose declared bound is its own sup norm.
    pub fn new(values: Vec<f64>) -> Self {
        let bound = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Signal { values, bound }
    }

    pub fn with_bound(values: Vec<f64>, bound: f64) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Malformed(format!("signal value {i} is not finite")));
        }
        if let Some(i) = values.iter().position(|v| v.abs() > bound) {
            return Err(Error::Malformed(format!(
                "|value[{i}]| = {} exceeds declared bound {bound}",
                values[i].abs()
            )));
        }
        Ok(Signal { values, bound })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `self ∘ g`, i.e. `x ↦ self(forward[x])`.
    pub fn compose(&self, forward: &[usize]) -> Signal {
        Signal {
            values: forward.iter().map(|&x| self.values[x]).collect(),
            bound: self.bound,
        }
    }
}

/// Sup-norm distance between two signals over the same domain.
pub fn signal_distance(a: &Signal, b: &Signal) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(sup_dist(a.values(), b.values()))
}

/// A finite, deduplicated set of signals over a common domain.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalSpace {
    signals: Vec<Signal>,
    points: usize,
    tolerance: f64,
}

impl SignalSpace {
    /// Collects signals over a domain of `points` points, dropping any signal
    /// within `tolerance` of an earlier one.
    pub fn new(points: usize, signals: Vec<Signal>, tolerance: f64) -> Result<Self> {
        if !(tolerance >= 0.0) {
            return Err(Error::Parameter(format!("tolerance must be >= 0, got {tolerance}")));
        }
        let mut kept: Vec<Signal> = Vec::with_capacity(signals.len());
        for s in signals {
            if s.len() != points {
                return Err(Error::Shape {
                    expected: points,
                    found: s.len(),
                });
            }
            if let Some(i) = s.values().iter().position(|v| !v.is_finite()) {
                return Err(Error::Malformed(format!("signal value {i} is not finite")));
            }
            if !kept
                .iter()
                .any(|k| !sup_dist_exceeds(k.values(), s.values(), tolerance))
            {
                kept.push(s);
            }
        }
        Ok(SignalSpace {
            signals: kept,
            points,
            tolerance,
        })
    }

    /// Builds a space from raw value vectors with the default tolerance.
    pub fn from_values(points: usize, values: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            points,
            values.into_iter().map(Signal::new).collect(),
            DEFAULT_TOLERANCE,
        )
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn get(&self, i: usize) -> &Signal {
        &self.signals[i]
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    /// Domain size.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Nearest member (ties to the lowest index) and its sup distance.
    pub fn nearest(&self, values: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, s) in self.signals.iter().enumerate() {
            if let Some((_, b)) = best {
                if sup_dist_exceeds(s.values(), values, b) {
                    continue;
                }
                let d = sup_dist(s.values(), values);
                if d < b {
                    best = Some((i, d));
                }
            } else {
                best = Some((i, sup_dist(s.values(), values)));
            }
        }
        best
    }

    /// Index of the member within tolerance of `values`, if any.
    pub fn position(&self, values: &[f64]) -> Option<usize> {
        self.nearest(values)
            .filter(|&(_, d)| d <= self.tolerance)
            .map(|(i, _)| i)
    }

    /// `D_Φ` as a matrix over the members.
    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.len();
        let mut m = DistanceMatrix::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                let d = sup_dist(self.signals[i].values(), self.signals[j].values());
                m.set(i, j, d);
                m.set(j, i, d);
            }
        }
        m
    }
}

/// The point pseudo-metric induced by a signal space:
/// `D_X(i, j) = max_φ |φ(i) − φ(j)|`.
pub fn induce_point_metric(phi: &SignalSpace) -> Result<DistanceMatrix> {
    if phi.is_empty() {
        return Err(Error::Parameter("cannot induce a metric from an empty signal space".into()));
    }
    let n = phi.points();
    let mut m = DistanceMatrix::zeros(n);
    for s in phi.signals() {
        let v = s.values();
        for i in 0..n {
            for j in i + 1..n {
                let d = (v[i] - v[j]).abs();
                if d > m.get(i, j) {
                    m.set(i, j, d);
                    m.set(j, i, d);
                }
            }
        }
    }
    Ok(m)
}
