//! Brute-force ground truth.
//!
//! The classical free-space dynamic program over all `(n - 1) x (m - 1)`
//! cells, exhaustive critical-value search on top of it, and helpers for the
//! property suites. Nothing here depends on the oracle's own machinery, so it
//! can arbitrate every other module. Inputs need not be canonical.

use crate::series::{CurveParam, TimeSeries};

/// A directed edge of one curve, from value `a` to value `b`. Points on the
/// edge are identified by the value the curve takes there; the order of
/// points follows the edge direction. On a constant edge all points share
/// one value and free space is all-or-nothing, so they compare equal.
#[derive(Clone, Copy)]
struct Edge {
    a: f64,
    b: f64,
}

/// Reachable part of a cell boundary, `lo` at or before `hi` along its edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
}

impl Edge {
    fn at_or_before(&self, x: f64, y: f64) -> bool {
        if self.b > self.a {
            x <= y
        } else if self.b < self.a {
            x >= y
        } else {
            true
        }
    }

    fn later(&self, x: f64, y: f64) -> f64 {
        if self.at_or_before(x, y) {
            y
        } else {
            x
        }
    }

    /// Points of the edge within `delta` of `x`.
    fn free(&self, x: f64, delta: f64) -> Option<Span> {
        let lo = self.a.min(self.b).max(x - delta);
        let hi = self.a.max(self.b).min(x + delta);
        if lo > hi {
            return None;
        }
        if self.b >= self.a {
            Some(Span { lo, hi })
        } else {
            Some(Span { lo: hi, hi: lo })
        }
    }

    /// The part of `free` at or after `from`.
    fn clip(&self, free: Option<Span>, from: f64) -> Option<Span> {
        let f = free?;
        let lo = self.later(f.lo, from);
        self.at_or_before(lo, f.hi).then_some(Span { lo, hi: f.hi })
    }
}

/// One row of the free-space diagram: for a fixed edge of `Q`, the reachable
/// spans on the left boundaries of its cells (indexed by `P` vertex).
#[derive(Debug, Clone, PartialEq)]
pub struct FreeSpaceRow {
    pub left: Vec<Option<Span>>,
}

/// Whether the continuous Fréchet distance of `p` and `q` is at most `delta`.
/// O(nm) time, O(n) memory.
pub fn free_space_decide(p: &[f64], q: &[f64], delta: f64) -> bool {
    assert!(!p.is_empty() && !q.is_empty(), "curves must be nonempty");
    if delta.is_nan() || delta < 0.0 {
        return false;
    }
    if p.len() == 1 || q.len() == 1 {
        let (x, other) = if p.len() == 1 { (p[0], q) } else { (q[0], p) };
        return other.iter().all(|&y| (y - x).abs() <= delta);
    }
    if (p[0] - q[0]).abs() > delta || (p[p.len() - 1] - q[q.len() - 1]).abs() > delta {
        return false;
    }
    let n = p.len();
    let m = q.len();
    let pe = |i: usize| Edge {
        a: p[i],
        b: p[i + 1],
    };
    let qe = |j: usize| Edge {
        a: q[j],
        b: q[j + 1],
    };

    // Bottom boundaries of the current row of cells, one per P edge.
    let mut bottom: Vec<Option<Span>> = Vec::with_capacity(n - 1);
    let mut open = true;
    for i in 0..n - 1 {
        let e = pe(i);
        let f = e.free(q[0], delta);
        let span = if open {
            f.filter(|s| s.lo == e.a)
        } else {
            None
        };
        open = span.is_some_and(|s| s.hi == e.b);
        bottom.push(span);
    }

    let mut row = FreeSpaceRow {
        left: vec![None; n],
    };
    let mut column_open = true;
    for j in 0..m - 1 {
        let e = qe(j);
        let first = if column_open {
            e.free(p[0], delta).filter(|s| s.lo == e.a)
        } else {
            None
        };
        column_open = first.is_some_and(|s| s.hi == e.b);
        row.left[0] = first;
        for i in 0..n - 1 {
            let left = row.left[i];
            let below = bottom[i];
            let right_free = e.free(p[i + 1], delta);
            let right = match (below, left) {
                (Some(_), _) => right_free,
                (None, Some(l)) => e.clip(right_free, l.lo),
                (None, None) => None,
            };
            let pedge = pe(i);
            let top_free = pedge.free(q[j + 1], delta);
            let top = match (left, below) {
                (Some(_), _) => top_free,
                (None, Some(b)) => pedge.clip(top_free, b.lo),
                (None, None) => None,
            };
            row.left[i + 1] = right;
            bottom[i] = top;
        }
    }
    row.left[n - 1].is_some_and(|s| s.hi == q[m - 1])
}

/// All critical values of the pair: cross vertex distances and half of every
/// intra-curve vertex distance. Sorted, duplicates removed.
pub fn critical_values(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.len() * q.len() + p.len() * p.len() + q.len() * q.len());
    for &a in p {
        for &b in q {
            out.push((a - b).abs());
        }
    }
    for s in [p, q] {
        for &a in s {
            for &b in s {
                out.push((a - b).abs() / 2.0);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Exact Fréchet distance by binary search over every critical value.
pub fn brute_exact(p: &[f64], q: &[f64]) -> f64 {
    let cands = critical_values(p, q);
    let first_true = cands.partition_point(|&d| !free_space_decide(p, q, d));
    cands[first_true.min(cands.len() - 1)]
}

/// The value ranges of the strengthened vertex-removal statement: `3 delta`
/// around the first and last signature vertex, `delta` around the rest.
pub fn corollary_ranges(values: &[f64], signature: &[usize], delta: f64) -> Vec<(f64, f64)> {
    let last = signature.len().saturating_sub(1);
    signature
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let r = if k == 0 || k == last {
                3.0 * delta
            } else {
                delta
            };
            (values[i] - r, values[i] + r)
        })
        .collect()
}

/// Vertex values of the subcurve between two points of `series`.
pub fn subcurve(series: &TimeSeries, from: CurveParam, to: CurveParam) -> Vec<f64> {
    debug_assert!(from <= to);
    let mut out = vec![from.value()];
    for i in from.ceil()..=to.floor() {
        if i == from.floor() && from.is_vertex() {
            continue;
        }
        out.push(series.value(i));
    }
    if !to.is_vertex() || from == to {
        out.push(to.value());
    }
    if from == to {
        out.truncate(1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decide_examples() {
        assert!(free_space_decide(&[0.0, 10.0], &[2.0, 9.0], 2.0));
        assert!(!free_space_decide(&[0.0, 10.0], &[2.0, 9.0], 1.99));
        let p = [0.0, 4.0, 1.0, 6.0];
        assert!(free_space_decide(&p, &p, 0.0));
        assert!(free_space_decide(&[0.0, 6.0, 0.0], &[0.0, 0.0], 6.0));
        assert!(!free_space_decide(&[0.0, 6.0, 0.0], &[0.0, 0.0], 5.9));
    }

    #[test]
    fn backtracking_is_not_allowed() {
        // Q revisits 10 after P has moved on.
        let p = [0.0, 10.0, 0.0];
        let q = [0.0, 10.0, 0.0, 10.0, 0.0];
        assert!(!free_space_decide(&p, &q, 4.9));
        assert!(free_space_decide(&p, &q, 5.0));
    }

    #[test]
    fn constant_edges_and_points() {
        assert!(free_space_decide(&[3.0, 3.0, 3.0], &[3.0], 0.0));
        assert!(free_space_decide(&[1.0, 1.0, 5.0], &[1.0, 5.0, 5.0], 0.0));
        assert!(!free_space_decide(
            &[1.0, 1.0, 5.0],
            &[1.0, 4.0, 5.0, 4.0],
            0.9
        ));
        assert!(free_space_decide(&[7.0], &[6.0, 8.0], 1.0));
    }

    #[test]
    fn exact_examples() {
        assert_eq!(brute_exact(&[0.0, 10.0, 0.0], &[1.0, 8.0, 2.0]), 2.0);
        let p = [0.0, 3.0, -1.0, 2.0];
        assert_eq!(brute_exact(&p, &p), 0.0);
        assert_eq!(brute_exact(&[0.0, 10.0], &[0.0, 8.0]), 2.0);
        assert_eq!(brute_exact(&[0.0, 10.0], &[2.0, 9.0]), 2.0);
    }

    #[test]
    fn corollary_range_examples() {
        assert_eq!(
            corollary_ranges(&[0.0, 10.0], &[0, 1], 1.0),
            vec![(-3.0, 3.0), (7.0, 13.0)]
        );
        let r = corollary_ranges(&[0.0, 1.0, 0.5, 3.0], &[0, 1, 2, 3], 0.2);
        let expect = [(-0.6, 0.6), (0.8, 1.2), (0.3, 0.7), (2.4, 3.6)];
        for (got, want) in r.iter().zip(expect) {
            assert!((got.0 - want.0).abs() < 1e-12 && (got.1 - want.1).abs() < 1e-12);
        }
        assert_eq!(corollary_ranges(&[7.0], &[0], 0.0), vec![(7.0, 7.0)]);
    }

    #[test]
    fn subcurve_pieces() {
        let s = TimeSeries::from_slice(&[0.0, 10.0, 0.0, 10.0]).unwrap();
        let a = CurveParam::on_edge(0, 0.0, 10.0, 4.0);
        let b = CurveParam::on_edge(2, 0.0, 10.0, 3.0);
        assert_eq!(subcurve(&s, a, b), vec![4.0, 10.0, 0.0, 3.0]);
        let v1 = CurveParam::vertex(&s, 1);
        assert_eq!(
            subcurve(&s, v1, CurveParam::vertex(&s, 3)),
            vec![10.0, 0.0, 10.0]
        );
        assert_eq!(subcurve(&s, v1, v1), vec![10.0]);
        assert_eq!(
            subcurve(&s, a, CurveParam::on_edge(0, 0.0, 10.0, 6.0)),
            vec![4.0, 6.0]
        );
    }
}
