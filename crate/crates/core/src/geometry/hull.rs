//! Planar convex hull (monotone chain) and rotating calipers.

use crate::models::PointSet;
use crate::scalar::Scalar;

fn cross<S: Scalar>(o: &[S], a: &[S], b: &[S]) -> S {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Indices of the hull vertices in counter-clockwise order, collinear points dropped.
pub fn convex_hull<S: Scalar>(ps: &PointSet<S>) -> Vec<usize> {
    assert_eq!(ps.dim(), 2, "convex hull is planar");
    let mut idx: Vec<usize> = (0..ps.len()).collect();
    idx.sort_by(|&a, &b| {
        let (pa, pb) = (ps.row(a), ps.row(b));
        pa[0].partial_cmp(&pb[0])
            .unwrap()
            .then(pa[1].partial_cmp(&pb[1]).unwrap())
            .then(a.cmp(&b))
    });
    idx.dedup_by(|a, b| ps.row(*a) == ps.row(*b));
    if idx.len() < 3 {
        return idx;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> =
            if pass == 0 { Box::new(idx.iter()) } else { Box::new(idx.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(ps.row(hull[hull.len() - 2]), ps.row(hull[hull.len() - 1]), ps.row(p)) <= S::zero()
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Farthest pair of hull vertices (Euclidean), as indices into the point set.
pub fn rotating_calipers<S: Scalar>(ps: &PointSet<S>, hull: &[usize]) -> Option<(usize, usize)> {
    let h = hull.len();
    let dist2 = |a: usize, b: usize| {
        let (p, q) = (ps.row(a), ps.row(b));
        let (dx, dy) = (p[0] - q[0], p[1] - q[1]);
        dx * dx + dy * dy
    };
    match h {
        0 | 1 => return None,
        2 => return Some((hull[0], hull[1])),
        _ => {}
    }
    let mut best = (S::neg_infinity(), hull[0], hull[1]);
    let mut j = 1;
    for i in 0..h {
        let (a, b) = (ps.row(hull[i]), ps.row(hull[(i + 1) % h]));
        // Advance the antipodal pointer while the area to edge (i, i+1) grows.
        let mut steps = 0;
        while steps < h
            && cross(a, b, ps.row(hull[(j + 1) % h])) > cross(a, b, ps.row(hull[j]))
        {
            j = (j + 1) % h;
            steps += 1;
        }
        for &(u, v) in &[(hull[i], hull[j]), (hull[(i + 1) % h], hull[j])] {
            let d = dist2(u, v);
            if d > best.0 {
                best = (d, u, v);
            }
        }
    }
    Some((best.1, best.2))
}
