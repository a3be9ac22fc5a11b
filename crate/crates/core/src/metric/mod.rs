//! Pseudo-metric space primitives.
//!
//! Everything here works on finite data: a [`DistanceMatrix`] or any type
//! implementing [`FiniteMetric`]. Infinite spaces enter only through a
//! [`DensePresentation`], which [`completion_net`] turns into a finite net
//! carrying a coverage certificate.

mod completion;
mod net;

pub use completion::{
    completion_net, completion_net_with, tb_profile_presented, CompletionApprox, CompletionOptions,
    DensePresentation, DEFAULT_SATURATION_WINDOW,
};
pub use net::{greedy_eps_net, hausdorff_distance, tb_profile, EpsNet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite space with a distance function on indices `0..len()`.
pub trait FiniteMetric {
    fn len(&self) -> usize;

    fn distance(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Adapter turning a closure into a [`FiniteMetric`].
pub struct FnMetric<F> {
    len: usize,
    f: F,
}

impl<F: Fn(usize, usize) -> f64> FnMetric<F> {
    pub fn new(len: usize, f: F) -> Self {
        FnMetric { len, f }
    }
}

impl<F: Fn(usize, usize) -> f64> FiniteMetric for FnMetric<F> {
    fn len(&self) -> usize {
        self.len
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        (self.f)(i, j)
    }
}

/// Symmetric table of pairwise distances.
///
/// Serialized as `{"n": int, "d": [[real]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    n: usize,
    d: Vec<Vec<f64>>,
}

impl TryFrom<RawMatrix> for DistanceMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        if raw.d.len() != raw.n {
            return Err(Error::Malformed(format!(
                "declared n = {} but {} rows given",
                raw.n,
                raw.d.len()
            )));
        }
        DistanceMatrix::from_rows(raw.d)
    }
}

impl From<DistanceMatrix> for RawMatrix {
    fn from(m: DistanceMatrix) -> Self {
        RawMatrix {
            n: m.n,
            d: m.rows(),
        }
    }
}

impl DistanceMatrix {
    /// Builds a matrix from rows, rejecting non-square input and NaN or
    /// infinite entries.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Malformed(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Malformed(format!("entry ({i},{j}) is not finite")));
            }
            d.extend(row);
        }
        Ok(DistanceMatrix { n, d })
    }

    pub fn zeros(n: usize) -> Self {
        DistanceMatrix {
            n,
            d: vec![0.0; n * n],
        }
    }

    /// Materializes any finite metric.
    pub fn from_metric<M: FiniteMetric + ?Sized>(m: &M) -> Self {
        let n = m.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = m.distance(i, j);
            }
        }
        DistanceMatrix { n, d }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.d[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Largest entry; 0 for the empty matrix.
    pub fn diameter(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// Restriction to the listed indices, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> DistanceMatrix {
        let k = idx.len();
        let mut d = Vec::with_capacity(k * k);
        for &i in idx {
            for &j in idx {
                d.push(self.get(i, j));
            }
        }
        DistanceMatrix { n: k, d }
    }

    /// Largest entrywise absolute difference; `None` when sizes differ.
    pub fn max_abs_diff(&self, other: &DistanceMatrix) -> Option<f64> {
        (self.n == other.n).then(|| {
            self.d
                .iter()
                .zip(&other.d)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }
}

impl FiniteMetric for DistanceMatrix {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn distance(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

/// A failed pseudo-metric axiom.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Diagonal { i: usize, value: f64 },
    Negative { i: usize, j: usize, value: f64 },
    Symmetry { i: usize, j: usize, excess: f64 },
    /// `d(i,k) > d(i,j) + d(j,k) + tol`, reported for `i < k`.
    Triangle { i: usize, j: usize, k: usize, excess: f64 },
}

/// Checks the pseudo-metric axioms within `tol`; the list is empty iff all hold.
pub fn validate_pseudo_metric(d: &DistanceMatrix, tol: f64) -> Result<Vec<Violation>> {
    if !(tol >= 0.0) {
        return Err(Error::Parameter(format!("tolerance must be >= 0, got {tol}")));
    }
    let n = d.n();
    let mut out = Vec::new();
    for i in 0..n {
        let v = d.get(i, i);
        if v.abs() > tol {
            out.push(Violation::Diagonal { i, value: v });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && d.get(i, j) < -tol {
                out.push(Violation::Negative {
                    i,
                    j,
                    value: d.get(i, j),
                });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let excess = (d.get(i, j) - d.get(j, i)).abs();
            if excess > tol {
                out.push(Violation::Symmetry { i, j, excess });
            }
        }
    }
    for i in 0..n {
        for k in i + 1..n {
            let dik = d.get(i, k);
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let excess = dik - (d.get(i, j) + d.get(j, k));
                if excess > tol {
                    out.push(Violation::Triangle { i, j, k, excess });
                }
            }
        }
    }
    Ok(out)
}

/// Result of [`metric_quotient`].
#[derive(Clone, Debug, PartialEq)]
pub struct Quotient {
    pub matrix: DistanceMatrix,
    /// Old index to class index.
    pub projection: Vec<usize>,
    /// Lowest member of each class; its row defines the class distances.
    pub representatives: Vec<usize>,
}

/// Identifies points at distance `<= tol`.
///
/// Classes are the connected components of the "within tol" graph, numbered by
/// their lowest member.
pub fn metric_quotient(d: &DistanceMatrix, tol: f64) -> Result<Quotient> {
    if !(tol >= 0.0) {
        return Err(Error::Parameter(format!("tolerance must be >= 0, got {tol}")));
    }
    let n = d.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if d.get(i, j) <= tol || d.get(j, i) <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    // keep the lower index as root
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi] = lo;
                }
            }
        }
    }
    let mut class_of_root = vec![usize::MAX; n];
    let mut representatives = Vec::new();
    let mut projection = vec![0; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if class_of_root[r] == usize::MAX {
            class_of_root[r] = representatives.len();
            representatives.push(i);
        }
        projection[i] = class_of_root[r];
    }
    let matrix = d.submatrix(&representatives);
    Ok(Quotient {
        matrix,
        projection,
        representatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> DistanceMatrix {
        DistanceMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn two_point_metric_is_valid() {
        assert!(validate_pseudo_metric(&m(&[&[0.0, 1.0], &[1.0, 0.0]]), 1e-9)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn asymmetric_pair_is_reported() {
        let v = validate_pseudo_metric(&m(&[&[0.0, 1.0], &[2.0, 0.0]]), 1e-9).unwrap();
        assert_eq!(v, vec![Violation::Symmetry { i: 0, j: 1, excess: 1.0 }]);
    }

    #[test]
    fn triangle_violation_names_the_triple() {
        let d = m(&[&[0.0, 1.0, 3.0], &[1.0, 0.0, 1.0], &[3.0, 1.0, 0.0]]);
        let v = validate_pseudo_metric(&d, 1e-9).unwrap();
        assert_eq!(
            v,
            vec![Violation::Triangle {
                i: 0,
                j: 1,
                k: 2,
                excess: 1.0
            }]
        );
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(matches!(
            DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0]]),
            Err(Error::Malformed(_))
        ));
        assert!(matches!(
            DistanceMatrix::from_rows(vec![vec![0.0, f64::NAN], vec![1.0, 0.0]]),
            Err(Error::Malformed(_))
        ));
        let bad: std::result::Result<DistanceMatrix, _> =
            serde_json::from_str(r#"{"n": 3, "d": [[0,1],[1,0]]}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn json_shape() {
        let d = m(&[&[0.0, 0.5], &[0.5, 0.0]]);
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"n":2,"d":[[0.0,0.5],[0.5,0.0]]}"#);
        let back: DistanceMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn quotient_of_metric_is_identity() {
        let d = m(&[&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.0], &[2.0, 1.0, 0.0]]);
        let q = metric_quotient(&d, 1e-9).unwrap();
        assert_eq!(q.projection, vec![0, 1, 2]);
        assert_eq!(q.matrix, d);
    }

    #[test]
    fn quotient_of_zero_matrix_is_one_class() {
        let q = metric_quotient(&DistanceMatrix::zeros(3), 1e-9).unwrap();
        assert_eq!(q.projection, vec![0, 0, 0]);
        assert_eq!(q.matrix.n(), 1);
    }

    #[test]
    fn quotient_merges_zero_pairs() {
        let d = m(&[&[0.0, 0.0, 1.0], &[0.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]);
        let q = metric_quotient(&d, 1e-9).unwrap();
        assert_eq!(q.projection, vec![0, 0, 1]);
        assert_eq!(q.representatives, vec![0, 2]);
        assert_eq!(q.matrix, m(&[&[0.0, 1.0], &[1.0, 0.0]]));
        assert!(validate_pseudo_metric(&q.matrix, 1e-9).unwrap().is_empty());
    }
}
