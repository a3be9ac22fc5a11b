#![allow(dead_code)]

use geneo_core::perception::{OperationMap, PerceptionPair, SignalSpace};

pub const TOL: f64 = 1e-9;

/// Φ = {(0, 0.5, 1), (1, 0.5, 0)} on three points.
pub fn toy_phi() -> SignalSpace {
    SignalSpace::from_values(3, vec![vec![0.0, 0.5, 1.0], vec![1.0, 0.5, 0.0]]).unwrap()
}

/// The toy signals under {id, reversal}.
pub fn toy() -> PerceptionPair {
    PerceptionPair::generated(toy_phi(), vec![OperationMap::new(vec![2, 1, 0])]).unwrap()
}

/// The toy signals under the trivial group.
pub fn toy_trivial() -> PerceptionPair {
    PerceptionPair::generated(toy_phi(), vec![]).unwrap()
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}
