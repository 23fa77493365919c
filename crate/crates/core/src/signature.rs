//! Nested simplification signatures of a canonical series.
//!
//! Every vertex gets a removal threshold: it belongs to the signature at
//! scale `delta` exactly when its threshold exceeds `delta`. Thresholds come
//! from retiring alternating extrema cheapest-first. An interior edge between
//! two interior extrema retires both of its vertices at half its amplitude;
//! an edge touching an endpoint retires its interior vertex alone at the full
//! amplitude. Endpoints never retire.

use std::fmt;

use crate::error::{check_delta, Error, Result};
use crate::series::{Envelope, TimeSeries};

#[derive(Debug, Clone)]
pub struct SignatureHierarchy {
    series: TimeSeries,
    envelope: Envelope,
    removal_threshold: Vec<f64>,
    /// Vertex indices by decreasing threshold, ties by index.
    storage: Vec<u32>,
    /// All thresholds ascending, for size queries.
    ascending: Vec<f64>,
    levels: Vec<f64>,
}

impl SignatureHierarchy {
    /// Builds the hierarchy of a canonical series in O(n log n).
    pub fn build(series: &TimeSeries) -> Self {
        assert!(
            series.is_canonical(),
            "signature hierarchy needs a canonical series"
        );
        let v = series.values();
        let n = v.len();
        let mut thr = vec![f64::INFINITY; n];

        if n > 2 {
            stack_thresholds(v, &mut thr);
        }

        Self::assemble(series, thr)
    }

    pub fn series(&self) -> &TimeSeries {
        &self.series
    }

    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    pub fn removal_thresholds(&self) -> &[f64] {
        &self.removal_threshold
    }

    /// Distinct finite thresholds, ascending.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Reassembles a hierarchy from stored thresholds (index files).
    pub fn from_thresholds(series: &TimeSeries, thresholds: Vec<f64>) -> Result<Self> {
        if !series.is_canonical()
            || thresholds.len() != series.len()
            || thresholds.iter().any(|t| t.is_nan() || *t < 0.0)
        {
            return Err(Error::MalformedIndices(
                "threshold table does not match the series".into(),
            ));
        }
        Ok(Self::assemble(series, thresholds))
    }

    fn assemble(series: &TimeSeries, thr: Vec<f64>) -> Self {
        let mut keyed: Vec<(f64, u32)> = thr.iter().zip(0u32..).map(|(&t, i)| (t, i)).collect();
        keyed.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let storage: Vec<u32> = keyed.into_iter().map(|(_, i)| i).collect();
        let mut ascending = thr.clone();
        ascending.sort_unstable_by(f64::total_cmp);
        let mut levels: Vec<f64> = ascending
            .iter()
            .copied()
            .filter(|t| t.is_finite())
            .collect();
        levels.dedup();
        Self {
            series: series.clone(),
            envelope: Envelope::build(series),
            removal_threshold: thr,
            storage,
            ascending,
            levels,
        }
    }

    fn count_above(&self, delta: f64) -> usize {
        self.ascending.len() - self.ascending.partition_point(|&t| t <= delta)
    }

    /// Number of signature vertices at scale `delta`, O(log n).
    pub fn size_at(&self, delta: f64) -> Result<usize> {
        check_delta(delta)?;
        Ok(self.count_above(delta).max(self.series.len().min(2)))
    }

    /// Signature vertex indices at `delta`, ascending. O(l log l).
    pub fn core_at(&self, delta: f64) -> Result<Vec<usize>> {
        check_delta(delta)?;
        let l = self.count_above(delta);
        let mut core: Vec<usize> = self.storage[..l].iter().map(|&i| i as usize).collect();
        core.sort_unstable();
        Ok(core)
    }

    /// The signature at `delta` plus the boundary extreme vertices that make
    /// the first and last pieces fit into `2 * delta`-wide ranges.
    pub fn extract_extended(&self, delta: f64) -> Result<ExtendedSignature> {
        let core = self.core_at(delta)?;
        let v = self.series.values();
        let env = &self.envelope;
        let n = v.len();
        let t = core.len();
        let wide = |a: usize, b: usize| (v[a] - v[b]).abs() > 2.0 * delta;
        let (lo, hi) = (
            env.prefix_argmin[n - 1] as usize,
            env.prefix_argmax[n - 1] as usize,
        );
        if t <= 2 {
            let (a, b) = (lo.min(hi), lo.max(hi));
            let mut indices = vec![0, a, b, n - 1];
            let grid = wide(a, b).then(|| indices.clone());
            indices.dedup();
            return Ok(ExtendedSignature {
                delta,
                indices,
                grid,
                core: None,
            });
        }

        let second = core[1];
        let head = if v[second] >= env.prefix_max[second] {
            env.prefix_argmin[second] as usize
        } else {
            debug_assert!(v[second] <= env.prefix_min[second]);
            env.prefix_argmax[second] as usize
        };
        let penult = core[t - 2];
        let tail = if v[penult] >= env.suffix_max[penult] {
            env.suffix_argmin[penult] as usize
        } else {
            debug_assert!(v[penult] <= env.suffix_min[penult]);
            env.suffix_argmax[penult] as usize
        };

        let mut indices = Vec::with_capacity(t + 2);
        indices.push(0);
        indices.push(head);
        indices.extend_from_slice(&core[1..t - 1]);
        indices.push(tail);
        indices.push(n - 1);

        let mut grid = Vec::with_capacity(t + 2);
        grid.push(0);
        if wide(head, second) {
            grid.push(head);
        }
        grid.extend_from_slice(&core[1..t - 1]);
        if wide(penult, tail) {
            grid.push(tail);
        }
        grid.push(n - 1);
        indices.dedup();
        Ok(ExtendedSignature {
            delta,
            indices,
            grid: wide(lo, hi).then_some(grid),
            core: Some(core),
        })
    }
}

/// Retirement key of the live edge `(u, w)`; `None` for the edge joining
/// both endpoints.
fn edge_key(v: &[f64], u: usize, w: usize) -> Option<f64> {
    let amp = (v[u] - v[w]).abs();
    match (u == 0, w == v.len() - 1) {
        (true, true) => None,
        (false, false) => Some(amp / 2.0),
        _ => Some(amp),
    }
}

/// Cheapest-first retirement in one left-to-right pass, ties to the leftmost
/// edge. An edge retires once its key is below the live edge to its left and
/// at most the live edge to its right.
fn stack_thresholds(v: &[f64], thr: &mut [f64]) {
    let last = v.len() - 1;
    let mut s: Vec<usize> = Vec::with_capacity(64);
    let key = |u, w| edge_key(v, u, w).unwrap_or(f64::INFINITY);
    for i in 0..=last {
        s.push(i);
        loop {
            let k = s.len();
            if k >= 3 {
                let (u, w, x) = (s[k - 3], s[k - 2], s[k - 1]);
                let e = key(u, w);
                let left_ok = u == 0 || key(s[k - 4], u) > e;
                if left_ok && e <= key(w, x) {
                    if u == 0 {
                        thr[w] = e;
                        s.remove(k - 2);
                    } else {
                        thr[u] = e;
                        thr[w] = e;
                        s.truncate(k - 3);
                        s.push(x);
                    }
                    continue;
                }
            }
            if i == last && k >= 3 {
                let (u, w) = (s[k - 2], s[k - 1]);
                if key(u, w) < key(s[k - 3], u) {
                    thr[u] = key(u, w);
                    s.remove(k - 2);
                    continue;
                }
            }
            break;
        }
    }
}

/// Number of signature vertices of `h` at `delta`.
pub fn signature_size_at(h: &SignatureHierarchy, delta: f64) -> Result<usize> {
    h.size_at(delta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedSignature {
    pub delta: f64,
    /// Increasing vertex indices, first `0`, last `n - 1`.
    pub indices: Vec<usize>,
    /// Super-cell boundaries. The first and last pieces are the longest
    /// `2 * delta`-range pieces ending at a signature vertex, so a boundary
    /// extreme is dropped when its piece can be absorbed and kept (even on
    /// top of the endpoint) when it cannot. `None` when the whole curve fits
    /// into a `2 * delta`-wide range.
    grid: Option<Vec<usize>>,
    /// The plain signature, `None` when it has at most two vertices.
    core: Option<Vec<usize>>,
}

impl ExtendedSignature {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Non-decreasing super-cell boundaries, see the field docs.
    pub fn grid(&self) -> Option<&[usize]> {
        self.grid.as_deref()
    }

    pub fn is_degenerate(&self) -> bool {
        self.core.is_none()
    }

    /// The plain signature's vertex indices.
    pub fn core(&self) -> Vec<usize> {
        match &self.core {
            Some(c) => c.clone(),
            None => {
                let mut c = vec![0, *self.indices.last().unwrap()];
                c.dedup();
                c
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    /// Interior vertices must lie outside the segment of their neighbours.
    NonDegenerate,
    /// Each piece must be `2 * delta`-monotone.
    Monotone,
    /// Interior edges longer than `2 * delta`, end edges longer than `delta`.
    EdgeLength,
    /// Pieces stay within their edge (end pieces within `delta` of it).
    Range,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::NonDegenerate => "(a) non-degenerate",
            Clause::Monotone => "(b) 2δ-monotone",
            Clause::EdgeLength => "(c) minimum edge length",
            Clause::Range => "(d) range",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub clause: Clause,
    /// Position in the candidate sequence (0-based) where it fails.
    pub at: usize,
}

/// Checks whether `indices` form a signature of `series` at `delta`.
/// Returns the first violated clause, clause order (a)–(d).
pub fn validate_signature(
    series: &TimeSeries,
    indices: &[usize],
    delta: f64,
) -> Result<std::result::Result<(), Violation>> {
    check_delta(delta)?;
    let v = series.values();
    let n = v.len();
    if indices.first() != Some(&0) || indices.last() != Some(&(n - 1)) {
        return Err(Error::MalformedIndices(
            "first index must be the first vertex and last index the last".into(),
        ));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::MalformedIndices(
            "indices must increase strictly".into(),
        ));
    }
    let t = indices.len();
    let val = |k: usize| v[indices[k]];

    for k in 1..t.saturating_sub(1) {
        let (a, b, c) = (val(k - 1), val(k), val(k + 1));
        if a.min(c) <= b && b <= a.max(c) {
            return Ok(Err(Violation {
                clause: Clause::NonDegenerate,
                at: k,
            }));
        }
    }

    for k in 0..t.saturating_sub(1) {
        let piece = &v[indices[k]..=indices[k + 1]];
        if !is_monotone_within(piece, 2.0 * delta, true)
            && !is_monotone_within(piece, 2.0 * delta, false)
        {
            return Ok(Err(Violation {
                clause: Clause::Monotone,
                at: k,
            }));
        }
    }

    for k in 0..t.saturating_sub(1) {
        let len = (val(k) - val(k + 1)).abs();
        let is_end = k == 0 || k + 2 == t;
        let ok = if is_end {
            len > delta
        } else {
            len > 2.0 * delta
        };
        if !ok {
            return Ok(Err(Violation {
                clause: Clause::EdgeLength,
                at: k,
            }));
        }
    }

    for k in 0..t.saturating_sub(1) {
        let (a, b) = (val(k), val(k + 1));
        let is_end = k == 0 || k + 2 == t;
        let slack = if is_end { delta } else { 0.0 };
        let (lo, hi) = (a.min(b), a.max(b));
        if v[indices[k]..=indices[k + 1]]
            .iter()
            .any(|&x| lo - x > slack || x - hi > slack)
        {
            return Ok(Err(Violation {
                clause: Clause::Range,
                at: k,
            }));
        }
    }
    Ok(Ok(()))
}

/// `increasing`: no value exceeds a later one by more than `slack`.
fn is_monotone_within(piece: &[f64], slack: f64, increasing: bool) -> bool {
    let mut extreme = piece[0];
    for &x in piece {
        if increasing {
            extreme = extreme.max(x);
            if extreme - x > slack {
                return false;
            }
        } else {
            extreme = extreme.min(x);
            if x - extreme > slack {
                return false;
            }
        }
    }
    true
}
