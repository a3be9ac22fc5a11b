use serde::Serialize;

use super::pair::{validate_operation, OperationMap, PerceptionPair};
use crate::error::Result;

/// Result of [`enumerate_automorphisms`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AutomorphismSearch {
    /// Invertible Φ-operations found, sorted lexicographically by forward map.
    pub maps: Vec<OperationMap>,
    /// Number of D_X-isometries that reached signal matching.
    pub isometries_checked: usize,
    /// False when the cap stopped the search early.
    pub complete: bool,
}

/// All permutations of the domain that are invertible Φ-operations.
///
/// Candidates are built point by point and pruned as soon as a partial map
/// fails to preserve `D_X`; only full isometries are matched against Φ. At
/// most `cap` isometries are checked.
pub fn enumerate_automorphisms(pair: &PerceptionPair, cap: usize) -> Result<AutomorphismSearch> {
    let n = pair.points();
    let d = pair.domain();
    let tol = pair.tolerance();
    let mut search = AutomorphismSearch {
        maps: Vec::new(),
        isometries_checked: 0,
        complete: true,
    };
    let mut forward = vec![0usize; n];
    let mut used = vec![false; n];
    // explicit stack of the next candidate image per depth
    let mut next = vec![0usize; n + 1];
    let mut depth = 0usize;
    loop {
        if depth == n {
            if search.isometries_checked >= cap {
                search.complete = false;
                break;
            }
            search.isometries_checked += 1;
            let g = OperationMap::new(forward.clone());
            if validate_operation(pair.phi(), &g)?.is_invertible {
                search.maps.push(g);
            }
            if depth == 0 {
                break;
            }
            depth -= 1;
            used[forward[depth]] = false;
            continue;
        }
        let mut placed = false;
        while next[depth] < n {
            let y = next[depth];
            next[depth] += 1;
            if used[y] {
                continue;
            }
            let isometric = (0..depth).all(|k| (d.get(depth, k) - d.get(y, forward[k])).abs() <= tol);
            if isometric {
                forward[depth] = y;
                used[y] = true;
                depth += 1;
                next[depth] = 0;
                placed = true;
                break;
            }
        }
        if !placed {
            if depth == 0 {
                break;
            }
            depth -= 1;
            used[forward[depth]] = false;
        }
    }
    Ok(search)
}
