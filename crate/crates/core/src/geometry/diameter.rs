use std::cmp::Ordering;

use serde::Serialize;

use super::hull::{convex_hull, rotating_calipers};
use super::norm::NormSpec;
use crate::error::{Error, Result};
use crate::models::PointSet;
use crate::scalar::Scalar;

/// Largest interpoint distance and the pair `(i, j)`, `i < j`, achieving it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiameterResult<S: Scalar> {
    pub value: S,
    pub i: usize,
    pub j: usize,
}

#[derive(Clone, Copy)]
struct Best<S> {
    key: S,
    i: usize,
    j: usize,
}

impl<S: Scalar> Best<S> {
    fn offer(&mut self, key: S, a: usize, b: usize) {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        match key.partial_cmp(&self.key) {
            Some(Ordering::Greater) => *self = Best { key, i, j },
            Some(Ordering::Equal) if (i, j) < (self.i, self.j) => *self = Best { key, i, j },
            _ => {}
        }
    }

    fn finish(self, spec: &NormSpec) -> DiameterResult<S> {
        DiameterResult { value: spec.from_key(self.key), i: self.i, j: self.j }
    }
}

fn check_size<S: Scalar>(ps: &PointSet<S>) -> Result<()> {
    if ps.len() < 2 {
        return Err(Error::TooFewPoints { n: ps.len(), required: 2 });
    }
    Ok(())
}

/// Exhaustive scan over all pairs; ties go to the lexicographically smallest pair.
pub fn diameter_naive<S: Scalar>(ps: &PointSet<S>, spec: &NormSpec) -> Result<DiameterResult<S>> {
    check_size(ps)?;
    let n = ps.len();
    let mut best = Best { key: S::neg_infinity(), i: 0, j: 1 };
    for i in 0..n {
        let xi = ps.row(i);
        for j in i + 1..n {
            let k = spec.distance_key(xi, ps.row(j));
            if k > best.key {
                best = Best { key: k, i, j };
            }
        }
    }
    Ok(best.finish(spec))
}

/// Exact diameter with triangle-inequality pruning.
///
/// Points are visited by decreasing norm and a pair is skipped once
/// `‖x_i‖ + ‖x_j‖` falls below the current best distance. The result, including
/// the tie-break, is identical to [`diameter_naive`].
pub fn diameter_fast<S: Scalar>(ps: &PointSet<S>, spec: &NormSpec) -> Result<DiameterResult<S>> {
    check_size(ps)?;
    let n = ps.len();
    let norms: Vec<S> = ps.rows().map(|r| spec.from_key(spec.key(r))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap().then(a.cmp(&b)));

    let mut best = Best { key: S::neg_infinity(), i: 0, j: 1 };
    let top = order[0];
    for (j, row) in ps.rows().enumerate() {
        if j != top {
            best.offer(spec.distance_key(ps.row(top), row), top, j);
        }
    }
    if ps.dim() == 2 && spec.is_euclidean() && n > 3 {
        if let Some((a, b)) = rotating_calipers(ps, &convex_hull(ps)) {
            if a != b {
                best.offer(spec.distance_key(ps.row(a), ps.row(b)), a, b);
            }
        }
    }

    // Rounding in the norms and distances is absorbed by a relative margin so
    // that no pair able to tie the best is pruned.
    let margin = S::one() - S::of((64 + 8 * ps.dim()) as f64) * S::epsilon();
    let mut threshold = spec.from_key(best.key) * margin;
    for a in 0..n {
        let ia = order[a];
        let na = norms[ia];
        if na + norms[order[0]] < threshold {
            break;
        }
        let xa = ps.row(ia);
        for &ib in &order[a + 1..] {
            if na + norms[ib] < threshold {
                break;
            }
            let k = spec.distance_key(xa, ps.row(ib));
            if k >= best.key {
                best.offer(k, ia, ib);
                threshold = spec.from_key(best.key) * margin;
            }
        }
    }
    Ok(best.finish(spec))
}

/// Which diameter algorithm to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiameterAlgo {
    Naive,
    Fast,
}

impl std::str::FromStr for DiameterAlgo {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Self::Naive),
            "fast" => Ok(Self::Fast),
            _ => Err(Error::Parse(format!("unknown diameter algorithm '{s}' (naive|fast)"))),
        }
    }
}

pub fn diameter<S: Scalar>(ps: &PointSet<S>, spec: &NormSpec, algo: DiameterAlgo) -> Result<DiameterResult<S>> {
    match algo {
        DiameterAlgo::Naive => diameter_naive(ps, spec),
        DiameterAlgo::Fast => diameter_fast(ps, spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::max_norm;
    use proptest::prelude::*;

    fn specs() -> Vec<NormSpec> {
        ["1", "2", "3", "2.5", "inf"].iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn two_points() {
        let ps = PointSet::from_rows(&[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        for f in [diameter_naive::<f64>, diameter_fast::<f64>] {
            assert_eq!(f(&ps, &NormSpec::euclidean()).unwrap(), DiameterResult { value: 5.0, i: 0, j: 1 });
        }
    }

    #[test]
    fn collinear_points() {
        let ps = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [5.0, 0.0]]).unwrap();
        let r = diameter_fast(&ps, &NormSpec::euclidean()).unwrap();
        assert_eq!((r.value, r.i, r.j), (5.0, 0, 3));
        assert_eq!(r, diameter_naive(&ps, &NormSpec::euclidean()).unwrap());
    }

    #[test]
    fn duplicate_farthest_pairs_use_lexicographic_order() {
        // Square corners: both diagonals tie; (0, 2) precedes (1, 3).
        let ps = PointSet::from_rows(&[[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [0.0, 0.0]]).unwrap();
        for spec in specs() {
            let naive = diameter_naive(&ps, &spec).unwrap();
            // Under the max norm the sides tie with the diagonals.
            let expected = if spec.q().is_infinite() { (0, 1) } else { (0, 2) };
            assert_eq!((naive.i, naive.j), expected, "q = {spec}");
            assert_eq!(diameter_fast(&ps, &spec).unwrap(), naive);
        }
        // Repeated points give repeated pairs.
        let ps = PointSet::from_rows(&[[0.0, 0.0], [2.0, 0.0], [0.0, 0.0], [2.0, 0.0]]).unwrap();
        assert_eq!(diameter_fast(&ps, &NormSpec::euclidean()).unwrap(), DiameterResult { value: 2.0, i: 0, j: 1 });
    }

    #[test]
    fn rejects_single_point() {
        let ps = PointSet::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(matches!(diameter_fast(&ps, &NormSpec::euclidean()), Err(Error::TooFewPoints { .. })));
        assert!(diameter_naive(&ps, &NormSpec::euclidean()).is_err());
    }

    #[test]
    fn value_is_recomputed_distance_of_pair() {
        let ps = crate::models::sample_sphere_uniform::<f64>(3, 500, 4).unwrap();
        for spec in specs() {
            let r = diameter_fast(&ps, &spec).unwrap();
            assert_eq!(r.value, spec.distance(ps.row(r.i), ps.row(r.j)));
        }
    }

    #[test]
    fn works_for_f32() {
        let ps = PointSet::<f32>::from_rows(&[[0.0f32, 0.0], [3.0, 4.0], [1.0, 1.0]]).unwrap();
        assert_eq!(diameter_fast(&ps, &NormSpec::euclidean()).unwrap().value, 5.0f32);
    }

    fn cloud() -> impl Strategy<Value = (usize, Vec<f64>)> {
        (1usize..5, 2usize..40).prop_flat_map(|(d, n)| {
            (Just(d), prop::collection::vec(prop_oneof![-3i32..3, -1000i32..1000].prop_map(|v| v as f64 / 8.0), d * n))
        })
    }

    proptest! {
        #[test]
        fn fast_matches_naive((d, coords) in cloud(), q in prop::sample::select(vec![1.0, 2.0, 3.0, 1.5, f64::INFINITY])) {
            let ps = PointSet::new(d, coords).unwrap();
            let spec = NormSpec::new(q).unwrap();
            let naive = diameter_naive(&ps, &spec).unwrap();
            let fast = diameter_fast(&ps, &spec).unwrap();
            prop_assert_eq!(fast, naive);
            let (m, _) = max_norm(&ps, &spec).unwrap();
            prop_assert!(naive.value <= 2.0 * m * (1.0 + 1e-12));
        }

        #[test]
        fn value_is_permutation_invariant((d, coords) in cloud(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let ps = PointSet::new(d, coords).unwrap();
            let mut perm: Vec<usize> = (0..ps.len()).collect();
            perm.shuffle(&mut crate::rng::rng_from_seed(seed));
            let spec = NormSpec::euclidean();
            let a = diameter_fast(&ps, &spec).unwrap().value;
            let b = diameter_fast(&ps.permuted(&perm), &spec).unwrap().value;
            prop_assert_eq!(a, b);
        }
    }
}
