use serde::{Deserialize, Serialize};

use super::FiniteMetric;
use crate::error::{Error, Result};

/// A finite ε-net with a per-point coverage certificate.
///
/// `coverage[p] = (c, d)` says point `p` lies at distance `d <= eps` from
/// center `c` (a point index, not a position in `centers`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsNet {
    pub eps: f64,
    pub centers: Vec<usize>,
    pub coverage: Vec<(usize, f64)>,
}

impl EpsNet {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Largest certified covering distance.
    pub fn radius(&self) -> f64 {
        self.coverage.iter().map(|c| c.1).fold(0.0, f64::max)
    }

    /// Re-derives both net invariants from the metric; returns the first
    /// failure as a message.
    pub fn verify<M: FiniteMetric + ?Sized>(&self, m: &M) -> std::result::Result<(), String> {
        if self.coverage.len() != m.len() {
            return Err(format!(
                "coverage lists {} points, space has {}",
                self.coverage.len(),
                m.len()
            ));
        }
        for (p, &(c, d)) in self.coverage.iter().enumerate() {
            if !self.centers.contains(&c) {
                return Err(format!("point {p} certified by non-center {c}"));
            }
            if d > self.eps || m.distance(p, c) != d {
                return Err(format!("point {p}: certificate ({c}, {d}) is wrong"));
            }
        }
        for (a, &ca) in self.centers.iter().enumerate() {
            for &cb in &self.centers[a + 1..] {
                if m.distance(ca, cb) <= self.eps {
                    return Err(format!("centers {ca} and {cb} are within eps"));
                }
            }
        }
        Ok(())
    }
}

/// Greedy farthest-point ε-net.
///
/// The first center is index 0; each further center is the point farthest
/// from the current centers (ties to the lowest index), until every point is
/// within `eps`. The center sequence does not depend on `eps`, so nets for
/// smaller radii extend nets for larger ones.
pub fn greedy_eps_net<M: FiniteMetric + ?Sized>(m: &M, eps: f64) -> Result<EpsNet> {
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("eps must be > 0, got {eps}")));
    }
    let n = m.len();
    if n == 0 {
        return Ok(EpsNet {
            eps,
            centers: vec![],
            coverage: vec![],
        });
    }
    let mut centers = vec![0];
    let mut coverage: Vec<(usize, f64)> = (0..n).map(|p| (0, m.distance(p, 0))).collect();
    loop {
        let (far, dist) = coverage
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (p, &(_, d))| {
                if d > best.1 {
                    (p, d)
                } else {
                    best
                }
            });
        if dist <= eps {
            break;
        }
        centers.push(far);
        for (p, cov) in coverage.iter_mut().enumerate() {
            let d = m.distance(p, far);
            if d < cov.1 || (d == cov.1 && far < cov.0) {
                *cov = (far, d);
            }
        }
    }
    Ok(EpsNet {
        eps,
        centers,
        coverage,
    })
}

fn directed<M: FiniteMetric + ?Sized>(a: &[usize], b: &[usize], m: &M) -> f64 {
    a.iter()
        .map(|&x| {
            b.iter()
                .map(|&y| m.distance(x, y))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Hausdorff distance between two nonempty index sets.
pub fn hausdorff_distance<M: FiniteMetric + ?Sized>(a: &[usize], b: &[usize], m: &M) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Parameter("hausdorff distance of an empty set".into()));
    }
    let n = m.len();
    if let Some(&bad) = a.iter().chain(b).find(|&&i| i >= n) {
        return Err(Error::Parameter(format!("index {bad} outside space of size {n}")));
    }
    Ok(directed(a, b, m).max(directed(b, a, m)))
}

pub(crate) fn check_schedule(schedule: &[f64]) -> Result<()> {
    if let Some(bad) = schedule.iter().find(|e| !(**e > 0.0)) {
        return Err(Error::Parameter(format!("schedule entry {bad} is not positive")));
    }
    if schedule.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::Parameter("eps schedule must be decreasing".into()));
    }
    Ok(())
}

/// Net sizes along a decreasing eps schedule.
pub fn tb_profile<M: FiniteMetric + ?Sized>(m: &M, schedule: &[f64]) -> Result<Vec<usize>> {
    check_schedule(schedule)?;
    schedule
        .iter()
        .map(|&eps| greedy_eps_net(m, eps).map(|net| net.len()))
        .collect()
}
