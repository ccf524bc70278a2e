//! Shortest path through a leveled graph of candidate points: complete
//! bipartite edges between consecutive levels, Euclidean weights.

use crate::error::{GaspError, Result};
use crate::geom::Vec3;

/// Minimum-total-length path taking exactly one point per level. Ties are
/// broken toward the lexicographically smallest index sequence. Returns the
/// chosen index per level and the total length.
pub fn shortest_arc(levels: &[Vec<Vec3>]) -> Result<(Vec<usize>, f64)> {
    if levels.len() < 2 {
        return Err(GaspError::Input("path graph needs at least 2 levels".into()));
    }
    for (l, pts) in levels.iter().enumerate() {
        if pts.is_empty() {
            return Err(GaspError::Internal(format!("empty candidate level {l}")));
        }
    }
    let n = levels.len();
    // cost to reach the last level from each point, computed backward
    let mut cost: Vec<Vec<f64>> = levels.iter().map(|l| vec![0.0; l.len()]).collect();
    for l in (0..n - 1).rev() {
        for i in 0..levels[l].len() {
            let p = levels[l][i];
            let mut best = f64::INFINITY;
            for (j, &q) in levels[l + 1].iter().enumerate() {
                let c = p.dist(q) + cost[l + 1][j];
                if c < best {
                    best = c;
                }
            }
            cost[l][i] = best;
        }
    }
    // greedy forward reconstruction: smallest index among exact minima
    let mut path = Vec::with_capacity(n);
    let mut first = 0;
    for i in 1..levels[0].len() {
        if cost[0][i] < cost[0][first] {
            first = i;
        }
    }
    path.push(first);
    let total = cost[0][first];
    for l in 0..n - 1 {
        let p = levels[l][path[l]];
        let mut best = 0;
        let mut best_c = f64::INFINITY;
        for (j, &q) in levels[l + 1].iter().enumerate() {
            let c = p.dist(q) + cost[l + 1][j];
            if c < best_c {
                best_c = c;
                best = j;
            }
        }
        path.push(best);
    }
    Ok((path, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::vec3;

    fn path_length(levels: &[Vec<Vec3>], path: &[usize]) -> f64 {
        (0..path.len() - 1)
            .map(|l| levels[l][path[l]].dist(levels[l + 1][path[l + 1]]))
            .sum()
    }

    #[test]
    fn single_candidate_levels_are_forced() {
        let levels = vec![
            vec![vec3(0.0, 0.0, 0.0)],
            vec![vec3(1.0, 2.0, 0.0)],
            vec![vec3(0.0, 0.0, 3.0)],
        ];
        let (path, total) = shortest_arc(&levels).unwrap();
        assert_eq!(path, vec![0, 0, 0]);
        assert!((total - path_length(&levels, &path)).abs() < 1e-12);
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        // deterministic pseudo-random leveled graphs, brute-forced
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for case in 0..100 {
            let nlevels = 2 + case % 4;
            let levels: Vec<Vec<Vec3>> = (0..nlevels)
                .map(|l| {
                    let k = 1 + (case + l) % 5;
                    (0..k)
                        .map(|_| vec3(next(), next(), next()))
                        .collect()
                })
                .collect();
            let (path, total) = shortest_arc(&levels).unwrap();
            // exhaustive search
            let mut best = f64::INFINITY;
            let mut stack = vec![(0usize, Vec::<usize>::new())];
            while let Some((l, prefix)) = stack.pop() {
                if l == levels.len() {
                    let len = path_length(&levels, &prefix);
                    if len < best {
                        best = len;
                    }
                    continue;
                }
                for i in 0..levels[l].len() {
                    let mut p = prefix.clone();
                    p.push(i);
                    stack.push((l + 1, p));
                }
            }
            assert!(
                (total - best).abs() < 1e-9,
                "case {case}: dp {total} vs brute {best}"
            );
            assert!((path_length(&levels, &path) - total).abs() < 1e-9);
        }
    }

    #[test]
    fn ties_prefer_smallest_indices() {
        // two symmetric middle candidates at equal cost
        let levels = vec![
            vec![vec3(0.0, 0.0, 0.0)],
            vec![vec3(0.0, 1.0, 1.0), vec3(0.0, -1.0, 1.0)],
            vec![vec3(0.0, 0.0, 2.0)],
        ];
        let (path, _) = shortest_arc(&levels).unwrap();
        assert_eq!(path, vec![0, 0, 0]);
    }

    #[test]
    fn empty_level_is_an_error() {
        let levels = vec![vec![vec3(0.0, 0.0, 0.0)], vec![]];
        assert!(shortest_arc(&levels).is_err());
    }
}
