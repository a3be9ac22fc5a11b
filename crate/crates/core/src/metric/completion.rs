use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use super::net::check_schedule;
use super::{validate_pseudo_metric, DistanceMatrix, Violation};
use crate::error::{Error, Result};

/// Default number of consecutive non-improving points that ends enumeration.
pub const DEFAULT_SATURATION_WINDOW: usize = 256;

/// A countable dense subset of a (pseudo-)metric space, given by an
/// enumerator over exact descriptors and a distance oracle.
///
/// The first `sample_len()` ranks are the designated sample: the finite
/// domain that gets embedded into the completion point by point.
pub trait DensePresentation {
    type Point: Clone + Debug + Eq + Hash;

    /// Descriptor at `rank`, or `None` once a finite enumeration is exhausted.
    fn point(&self, rank: usize) -> Option<Self::Point>;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64;

    fn sample_len(&self) -> usize {
        0
    }

    fn claimed_totally_bounded(&self) -> bool {
        true
    }

    /// Checks the pseudo-metric axioms on the first `k` enumerated points.
    fn check_sample(&self, k: usize, tol: f64) -> Result<Vec<Violation>> {
        let pts: Vec<_> = (0..k).map_while(|r| self.point(r)).collect();
        let rows = pts
            .iter()
            .map(|a| pts.iter().map(|b| self.distance(a, b)).collect())
            .collect();
        validate_pseudo_metric(&DistanceMatrix::from_rows(rows)?, tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompletionOptions {
    /// Maximum number of ranks to enumerate.
    pub budget: usize,
    /// Consecutive non-improving points required for saturation.
    pub window: usize,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        CompletionOptions {
            budget: 100_000,
            window: DEFAULT_SATURATION_WINDOW,
        }
    }
}

/// A finite net standing in for the completion at resolution `eps`.
#[derive(Clone, Debug)]
pub struct CompletionApprox<P> {
    /// Net descriptors; sample points come first.
    pub points: Vec<P>,
    /// Oracle distances between net points.
    pub space: DistanceMatrix,
    /// Sample rank to net index.
    pub sample_embedding: Vec<usize>,
    /// Per enumerated rank: (net index, distance) of its certified cover.
    pub coverage: Vec<(usize, f64)>,
    pub eps: f64,
    /// False when the budget ran out before the saturation window closed.
    pub saturated: bool,
    lookup: HashMap<P, usize>,
}

impl<P: Clone + Eq + Hash> CompletionApprox<P> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn explored(&self) -> usize {
        self.coverage.len()
    }

    /// Largest certified covering distance over everything enumerated.
    pub fn coverage_radius(&self) -> f64 {
        self.coverage.iter().map(|c| c.1).fold(0.0, f64::max)
    }

    /// Net index of a descriptor that is itself a net point.
    pub fn index_of(&self, p: &P) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    /// Nearest net point (ties to the lowest index) and its distance.
    pub fn nearest<D>(&self, p: &P, presentation: &D) -> (usize, f64)
    where
        D: DensePresentation<Point = P> + ?Sized,
    {
        if let Some(i) = self.index_of(p) {
            return (i, 0.0);
        }
        nearest_in(&self.points, p, presentation).expect("completion net is never empty here")
    }
}

fn nearest_in<D>(net: &[D::Point], p: &D::Point, presentation: &D) -> Option<(usize, f64)>
where
    D: DensePresentation + ?Sized,
{
    let mut best: Option<(usize, f64)> = None;
    for (i, q) in net.iter().enumerate() {
        let d = presentation.distance(p, q);
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((i, d));
        }
    }
    best
}

/// [`completion_net_with`] using the default saturation window.
pub fn completion_net<D: DensePresentation + ?Sized>(
    presentation: &D,
    eps: f64,
    budget: usize,
) -> Result<CompletionApprox<D::Point>> {
    completion_net_with(
        presentation,
        eps,
        &CompletionOptions {
            budget,
            ..Default::default()
        },
    )
}

/// Builds a certified ε-net of the completion by enumeration.
///
/// Sample points are always net points (so the inclusion of the sample is
/// exact). Every further enumerated point becomes a net point iff it is more
/// than `eps` from all current net points. Enumeration stops when the
/// presentation is exhausted, when `window` consecutive points added nothing
/// (saturated), or at the budget (not saturated).
pub fn completion_net_with<D: DensePresentation + ?Sized>(
    presentation: &D,
    eps: f64,
    opts: &CompletionOptions,
) -> Result<CompletionApprox<D::Point>> {
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("eps must be > 0, got {eps}")));
    }
    let sample_len = presentation.sample_len();
    if opts.budget < sample_len {
        return Err(Error::Parameter(format!(
            "budget {} is smaller than the sample ({sample_len} points)",
            opts.budget
        )));
    }
    if opts.window == 0 {
        return Err(Error::Parameter("saturation window must be positive".into()));
    }

    let mut points: Vec<D::Point> = Vec::new();
    let mut lookup: HashMap<D::Point, usize> = HashMap::new();
    let mut sample_embedding = Vec::with_capacity(sample_len);
    let mut coverage = Vec::new();
    let mut quiet = 0usize;
    let mut saturated = false;

    for rank in 0.. {
        if rank >= opts.budget {
            break;
        }
        let Some(p) = presentation.point(rank) else {
            saturated = true;
            break;
        };
        if let Some(&i) = lookup.get(&p) {
            coverage.push((i, 0.0));
            if rank < sample_len {
                sample_embedding.push(i);
            } else {
                quiet += 1;
            }
        } else if rank < sample_len {
            let i = points.len();
            lookup.insert(p.clone(), i);
            points.push(p);
            sample_embedding.push(i);
            coverage.push((i, 0.0));
        } else {
            match nearest_in(&points, &p, presentation) {
                Some((i, d)) if d <= eps => {
                    coverage.push((i, d));
                    quiet += 1;
                }
                _ => {
                    let i = points.len();
                    lookup.insert(p.clone(), i);
                    points.push(p);
                    coverage.push((i, 0.0));
                    quiet = 0;
                }
            }
        }
        if rank >= sample_len && quiet >= opts.window {
            saturated = true;
            break;
        }
    }

    let rows = points
        .iter()
        .map(|a| points.iter().map(|b| presentation.distance(a, b)).collect())
        .collect();
    Ok(CompletionApprox {
        space: DistanceMatrix::from_rows(rows)?,
        points,
        sample_embedding,
        coverage,
        eps,
        saturated,
        lookup,
    })
}

/// Completion net sizes along a decreasing eps schedule.
pub fn tb_profile_presented<D: DensePresentation + ?Sized>(
    presentation: &D,
    schedule: &[f64],
    opts: &CompletionOptions,
) -> Result<Vec<usize>> {
    check_schedule(schedule)?;
    schedule
        .iter()
        .map(|&eps| completion_net_with(presentation, eps, opts).map(|c| c.len()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Points of a fixed finite list on the real line.
    struct Listed(Vec<i64>, usize);

    impl DensePresentation for Listed {
        type Point = i64;
        fn point(&self, rank: usize) -> Option<i64> {
            self.0.get(rank).copied()
        }
        fn distance(&self, a: &i64, b: &i64) -> f64 {
            (a - b).abs() as f64
        }
        fn sample_len(&self) -> usize {
            self.1
        }
    }

    #[test]
    fn finite_presentation_net_is_the_space() {
        let p = Listed(vec![0, 3, 7, 8], 4);
        for eps in [0.5, 2.0, 100.0] {
            let c = completion_net(&p, eps, 10).unwrap();
            assert_eq!(c.points, vec![0, 3, 7, 8]);
            assert!(c.saturated);
            assert_eq!(c.sample_embedding, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn large_eps_without_sample_is_one_point() {
        let p = Listed(vec![0, 3, 7, 8], 0);
        let c = completion_net(&p, 10.0, 10).unwrap();
        assert_eq!(c.points, vec![0]);
        assert_eq!(c.coverage_radius(), 8.0);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let p = Listed((0..100).map(|i| i * 10).collect(), 0);
        let c = completion_net(&p, 1.0, 20).unwrap();
        assert!(!c.saturated);
        assert_eq!(c.explored(), 20);
        assert!(completion_net(&Listed(vec![1, 2], 2), 1.0, 1).is_err());
    }

    #[test]
    fn profile_is_monotone() {
        let p = Listed((0..50).map(|i| i * i).collect(), 0);
        let sizes = tb_profile_presented(&p, &[1000.0, 100.0, 10.0, 1.0], &Default::default()).unwrap();
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]), "{sizes:?}");
    }
}
