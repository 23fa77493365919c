//! The preprocessed oracle and its decision query.
//!
//! A query runs over the grid of super cells spanned by the extended
//! signatures of both curves. The first cell is resolved by a boundary
//! search, the last one by the same search on the reversed curves, and
//! every other cell by two range-successor queries that push the earliest
//! reachable exit points up and to the right.

use crate::error::{check_delta, Result};
use crate::reference;
use crate::series::{CurveParam, IndexedSeries, TimeSeries, View};
use crate::signature::SignatureHierarchy;

/// A curve indexed once for repeated queries.
#[derive(Debug, Clone)]
pub struct Oracle {
    p: IndexedSeries,
    hierarchy: SignatureHierarchy,
    original_len: usize,
}

/// A canonical query curve with its per-query structures.
#[derive(Debug, Clone)]
pub struct Query {
    q: IndexedSeries,
    hierarchy: SignatureHierarchy,
}

impl Query {
    pub fn new(raw: &[f64]) -> Result<Self> {
        let series = TimeSeries::from_slice(raw)?.canonicalize();
        Ok(Self::from_canonical(series))
    }

    fn from_canonical(series: TimeSeries) -> Self {
        let hierarchy = SignatureHierarchy::build(&series);
        Self {
            q: IndexedSeries::new(series),
            hierarchy,
        }
    }

    pub fn series(&self) -> &TimeSeries {
        &self.q.series
    }

    pub fn len(&self) -> usize {
        self.q.series.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// How a decision was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// The signature of `P` was too large for `Q` to follow.
    EarlyExit,
    /// One extended signature has fewer than three vertices; the free-space
    /// program answered.
    Fallback,
    Grid,
}

/// Work counters of one decision.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecisionStats {
    pub s_p: usize,
    pub s_q: usize,
    pub cells: u64,
    pub range_queries: u64,
    pub node_visits: u64,
    pub seed_iterations: u64,
}

/// A monotone sequence of matched point pairs certifying `d_F <= delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledVisitingOrder {
    pub delta: f64,
    pub pairs: Vec<(CurveParam, CurveParam)>,
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub accepted: bool,
    pub route: Route,
    pub stats: DecisionStats,
    witness: Option<CoupledVisitingOrder>,
}

impl Decision {
    pub fn witness(&self) -> Option<&CoupledVisitingOrder> {
        self.witness.as_ref()
    }
}

/// The certificate of an accepting grid-path decision. `None` ("no
/// witness") for rejections, early exits and fallback decisions, and when
/// the decision ran without recording.
pub fn extract_witness(decision: &Decision) -> Option<CoupledVisitingOrder> {
    decision.witness.clone()
}

pub fn build_oracle(raw: &[f64]) -> Result<Oracle> {
    Oracle::build(raw)
}

pub fn decide(oracle: &Oracle, q_raw: &[f64], delta: f64) -> Result<bool> {
    oracle.decide(q_raw, delta)
}

impl Oracle {
    pub fn build(raw: &[f64]) -> Result<Self> {
        let series = TimeSeries::from_slice(raw)?.canonicalize();
        let hierarchy = SignatureHierarchy::build(&series);
        Ok(Self {
            p: IndexedSeries::new(series),
            hierarchy,
            original_len: raw.len(),
        })
    }

    /// Reassembles an oracle from a canonical series and its stored removal
    /// thresholds; the range index and envelopes are rebuilt.
    pub fn from_parts(
        series: TimeSeries,
        thresholds: Vec<f64>,
        original_len: usize,
    ) -> Result<Self> {
        let hierarchy = SignatureHierarchy::from_thresholds(&series, thresholds)?;
        Ok(Self {
            p: IndexedSeries::new(series),
            hierarchy,
            original_len,
        })
    }

    pub fn series(&self) -> &TimeSeries {
        &self.p.series
    }

    pub fn hierarchy(&self) -> &SignatureHierarchy {
        &self.hierarchy
    }

    /// Length of the input before canonicalization.
    pub fn original_len(&self) -> usize {
        self.original_len
    }

    pub fn decide(&self, q_raw: &[f64], delta: f64) -> Result<bool> {
        check_delta(delta)?;
        let q = Query::new(q_raw)?;
        self.decide_query(&q, delta)
    }

    pub fn decide_query(&self, q: &Query, delta: f64) -> Result<bool> {
        Ok(self.run(q, delta, false)?.accepted)
    }

    /// Decides and records counters plus, on grid-path acceptance, a witness.
    pub fn decide_traced(&self, q: &Query, delta: f64) -> Result<Decision> {
        self.run(q, delta, true)
    }

    fn run(&self, query: &Query, delta: f64, record: bool) -> Result<Decision> {
        check_delta(delta)?;
        let mut stats = DecisionStats::default();
        let finish = |accepted, route, stats| Decision {
            accepted,
            route,
            stats,
            witness: None,
        };
        let m = query.len();
        if self.hierarchy.size_at(delta)? > m + 2 {
            return Ok(finish(false, Route::EarlyExit, stats));
        }
        let sig_p = self.hierarchy.extract_extended(delta)?;
        let sig_q = query.hierarchy.extract_extended(delta)?;
        stats.s_p = sig_p.len();
        stats.s_q = sig_q.len();
        let (Some(ip), Some(jq)) = (sig_p.grid(), sig_q.grid()) else {
            let accepted = reference::free_space_decide(
                self.p.series.values(),
                query.series().values(),
                delta,
            );
            return Ok(finish(accepted, Route::Fallback, stats));
        };
        let grid = Grid {
            p: self.p.forward(),
            q: query.q.forward(),
            pr: self.p.reversed(),
            qr: query.q.reversed(),
            ip,
            jq,
            delta,
        };
        let (accepted, witness) = grid.solve(&mut stats, record);
        Ok(Decision {
            accepted,
            route: Route::Grid,
            stats,
            witness,
        })
    }
}

/// Earliest point `w <= bound` on `search` such that the prefix of `fixed`
/// up to `fixed_end` and the prefix of `search` up to `w` are within Fréchet
/// distance `delta`. The fixed prefix must fit into a `2 * delta`-wide range.
/// Parameters are in the views' own coordinates.
pub fn boundary_seed(
    fixed: View<'_>,
    fixed_end: CurveParam,
    search: View<'_>,
    bound: CurveParam,
    delta: f64,
) -> Option<CurveParam> {
    boundary_seed_counted(
        fixed,
        fixed_end,
        search,
        bound,
        delta,
        &mut DecisionStats::default(),
    )
}

fn boundary_seed_counted(
    fixed: View<'_>,
    fixed_end: CurveParam,
    search: View<'_>,
    bound: CurveParam,
    delta: f64,
    stats: &mut DecisionStats,
) -> Option<CurveParam> {
    let at_start = |p: CurveParam| p.floor() == 0 && p.is_vertex();
    let (lo, hi) = fixed.prefix_range(fixed_end);
    stats.range_queries += 2;
    let w = search.first_entry_counted(bound, hi - delta, lo + delta, &mut stats.node_visits)?;
    let (mut s, mut t) = (fixed_end, w);
    // Each round strictly moves `s` or `t` back past a vertex or an extreme
    // level, so the loop ends well within this many rounds.
    let cap = 2 * (fixed.len() + search.len()) + 8;
    for _ in 0..cap {
        if at_start(s) && at_start(t) {
            return Some(w);
        }
        stats.seed_iterations += 1;
        stats.range_queries += 4;
        let (lo, hi) = search.prefix_range(t);
        let s2 = fixed.first_entry_counted(s, hi - delta, lo + delta, &mut stats.node_visits)?;
        if s2 == s {
            return None;
        }
        s = s2;
        if at_start(s) && at_start(t) {
            return Some(w);
        }
        let (lo, hi) = fixed.prefix_range(s);
        let t2 = search.first_entry_counted(t, hi - delta, lo + delta, &mut stats.node_visits)?;
        if t2 == t {
            return None;
        }
        t = t2;
    }
    panic!("boundary search did not converge");
}

/// A reachable exit point and, when recording, its witness node.
#[derive(Debug, Clone, Copy)]
struct Exit {
    at: CurveParam,
    node: u32,
}

/// Witness nodes with back-pointers; node 0 is the pair of start points.
struct Trail {
    record: bool,
    nodes: Vec<(CurveParam, CurveParam, u32)>,
}

impl Trail {
    fn new(record: bool, p0: CurveParam, q0: CurveParam) -> Self {
        let mut t = Trail {
            record,
            nodes: Vec::new(),
        };
        if record {
            t.nodes.push((p0, q0, 0));
        }
        t
    }

    fn push(&mut self, p: CurveParam, q: CurveParam, prev: u32) -> u32 {
        if !self.record {
            return 0;
        }
        self.nodes.push((p, q, prev));
        (self.nodes.len() - 1) as u32
    }

    fn path(&self, mut node: u32) -> Vec<(CurveParam, CurveParam)> {
        let mut out = Vec::new();
        loop {
            let (p, q, prev) = self.nodes[node as usize];
            out.push((p, q));
            if node == 0 {
                break;
            }
            node = prev;
        }
        out.reverse();
        out
    }
}

struct Grid<'a> {
    p: View<'a>,
    q: View<'a>,
    pr: View<'a>,
    qr: View<'a>,
    ip: &'a [usize],
    jq: &'a [usize],
    delta: f64,
}

impl Grid<'_> {
    /// Every monotone path crosses the vertical line through `ip[sp - 2]`,
    /// the start of the last column. A forward sweep finds the earliest
    /// reachable point of that line in each row, a backward sweep over the
    /// reversed curves the latest point from which the end is reachable.
    fn solve(
        &self,
        stats: &mut DecisionStats,
        record: bool,
    ) -> (bool, Option<CoupledVisitingOrder>) {
        let (n, m) = (self.p.len(), self.q.len());
        let (sp, sq) = (self.ip.len(), self.jq.len());
        let ipr: Vec<usize> = self.ip.iter().rev().map(|&i| n - 1 - i).collect();
        let jqr: Vec<usize> = self.jq.iter().rev().map(|&j| m - 1 - j).collect();
        let forward = Sweep {
            p: self.p,
            q: self.q,
            ip: self.ip,
            jq: self.jq,
            delta: self.delta,
        };
        let backward = Sweep {
            p: self.pr,
            q: self.qr,
            ip: &ipr,
            jq: &jqr,
            delta: self.delta,
        };
        let mut trail_f = Trail::new(record, self.p.vertex(0), self.q.vertex(0));
        let mut trail_b = Trail::new(record, self.pr.vertex(0), self.qr.vertex(0));
        let earliest = forward.run(sp - 2, &mut trail_f, stats);
        let latest = backward.run(1, &mut trail_b, stats);

        for l in 0..sq - 1 {
            let (Some(a), Some(b)) = (earliest[l], latest[sq - 2 - l]) else {
                continue;
            };
            let b_at = self.qr.to_forward(b.at);
            if a.at > b_at {
                continue;
            }
            if !record {
                return (true, None);
            }
            let mut pairs = trail_f.path(a.node);
            for (x, y) in trail_b.path(b.node).into_iter().rev() {
                pairs.push((self.pr.to_forward(x), self.qr.to_forward(y)));
            }
            let cvo = CoupledVisitingOrder {
                delta: self.delta,
                pairs,
            };
            return (true, Some(cvo));
        }
        (false, None)
    }
}

/// First point after `from` where `view` enters `[x - delta, x + delta]`,
/// given that `from` lies outside and vertex `w` is the first one inside.
fn band_entry(view: View<'_>, from: CurveParam, w: usize, x: f64, delta: f64) -> CurveParam {
    let prev = if from.ceil() == w {
        from.value()
    } else {
        view.value(w - 1)
    };
    let level = if prev > x + delta {
        x + delta
    } else {
        x - delta
    };
    CurveParam::on_edge(w - 1, view.value(w - 1), view.value(w), level)
}

/// Exit-point propagation over the super cells of the first `cols`
/// columns, in the coordinates of one pair of views.
struct Sweep<'a> {
    p: View<'a>,
    q: View<'a>,
    ip: &'a [usize],
    jq: &'a [usize],
    delta: f64,
}

impl Sweep<'_> {
    /// Earliest reachable point on the right edge of column `cols - 1`, per
    /// row.
    fn run(&self, cols: usize, trail: &mut Trail, stats: &mut DecisionStats) -> Vec<Option<Exit>> {
        let (ip, jq, delta) = (self.ip, self.jq, self.delta);
        let rows = jq.len() - 1;

        // Cell (0, 0): top and right exits come from the boundary searches.
        let w_seed = boundary_seed_counted(
            self.p,
            self.p.vertex(ip[1]),
            self.q,
            self.q.vertex(jq[1]),
            delta,
            stats,
        )
        .map(|w| Exit {
            at: w,
            node: trail.push(self.p.vertex(ip[1]), w, 0),
        });
        let v_seed = boundary_seed_counted(
            self.q,
            self.q.vertex(jq[1]),
            self.p,
            self.p.vertex(ip[1]),
            delta,
            stats,
        )
        .map(|v| Exit {
            at: v,
            node: trail.push(v, self.q.vertex(jq[1]), 0),
        });

        // bottom[k]: exit on the bottom edge of cell (k, l) of the current row.
        let mut bottom: Vec<Option<Exit>> = vec![None; cols];
        let mut out = vec![None; rows];
        for (l, slot) in out.iter_mut().enumerate() {
            let mut left: Option<Exit> = None;
            for k in 0..cols {
                if k == 0 && l == 0 {
                    bottom[0] = v_seed;
                    left = w_seed;
                    continue;
                }
                let below = bottom[k];
                if below.is_some() || left.is_some() {
                    stats.cells += 1;
                }
                let top = if l + 1 < rows {
                    self.top_exit(k, l, below, left, trail, stats)
                } else {
                    None
                };
                bottom[k] = top;
                left = self.right_exit(k, l, below, left, trail, stats);
            }
            *slot = left;
        }
        out
    }

    /// Exit through the right edge `s = i_{k+1}` of cell `(k, l)`.
    fn right_exit(
        &self,
        k: usize,
        l: usize,
        below: Option<Exit>,
        left: Option<Exit>,
        trail: &mut Trail,
        stats: &mut DecisionStats,
    ) -> Option<Exit> {
        let (from, prev) = match (below, left) {
            (Some(b), _) => (self.q.vertex(self.jq[l]), b.node),
            (None, Some(lf)) => (lf.at, lf.node),
            (None, None) => return None,
        };
        let x = self.p.value(self.ip[k + 1]);
        let at = if (from.value() - x).abs() <= self.delta {
            from
        } else {
            stats.range_queries += 1;
            let w = self.q.min_index_in_box(
                from.ceil(),
                self.jq[l + 1],
                x - self.delta,
                x + self.delta,
                &mut stats.node_visits,
            )?;
            band_entry(self.q, from, w, x, self.delta)
        };
        Some(Exit {
            at,
            node: trail.push(self.p.vertex(self.ip[k + 1]), at, prev),
        })
    }

    /// Exit through the top edge `t = j_{l+1}` of cell `(k, l)`.
    fn top_exit(
        &self,
        k: usize,
        l: usize,
        below: Option<Exit>,
        left: Option<Exit>,
        trail: &mut Trail,
        stats: &mut DecisionStats,
    ) -> Option<Exit> {
        let (from, prev) = match (left, below) {
            (Some(lf), _) => (self.p.vertex(self.ip[k]), lf.node),
            (None, Some(b)) => (b.at, b.node),
            (None, None) => return None,
        };
        let y = self.q.value(self.jq[l + 1]);
        let at = if (from.value() - y).abs() <= self.delta {
            from
        } else {
            stats.range_queries += 1;
            let v = self.p.min_index_in_box(
                from.ceil(),
                self.ip[k + 1],
                y - self.delta,
                y + self.delta,
                &mut stats.node_visits,
            )?;
            band_entry(self.p, from, v, y, self.delta)
        };
        Some(Exit {
            at,
            node: trail.push(at, self.q.vertex(self.jq[l + 1]), prev),
        })
    }
}

/// Checks a witness against two canonical curves: monotone pairs, each
/// pair within `delta`, every extended-signature vertex of both curves
/// visited, and the first and last pieces accepted by the free-space
/// program.
pub fn check_witness(
    p: &TimeSeries,
    q: &TimeSeries,
    delta: f64,
    cvo: &CoupledVisitingOrder,
) -> bool {
    let pairs = &cvo.pairs;
    let (n, m) = (p.len(), q.len());
    if pairs.len() < 2 || delta < 0.0 {
        return false;
    }
    let start = (CurveParam::vertex(p, 0), CurveParam::vertex(q, 0));
    let end = (CurveParam::vertex(p, n - 1), CurveParam::vertex(q, m - 1));
    if pairs[0] != start || pairs[pairs.len() - 1] != end {
        return false;
    }
    let in_range =
        |c: CurveParam, len: usize| c.floor() < len && (c.is_vertex() || c.floor() + 1 < len);
    if !pairs.iter().all(|&(a, b)| in_range(a, n) && in_range(b, m)) {
        return false;
    }
    if pairs.windows(2).any(|w| w[1].0 < w[0].0 || w[1].1 < w[0].1) {
        return false;
    }
    let close = |a: f64, b: f64| {
        let tol = 4.0 * f64::EPSILON * (a.abs().max(b.abs()).max(delta));
        (a - b).abs() <= delta + tol
    };
    if !pairs.iter().all(|&(a, b)| close(a.value(), b.value())) {
        return false;
    }
    for (series, side) in [(p, 0), (q, 1)] {
        let Ok(ext) = SignatureHierarchy::build(series).extract_extended(delta) else {
            return false;
        };
        let visited = |i: usize| {
            pairs.iter().any(|pr| {
                let c = if side == 0 { pr.0 } else { pr.1 };
                c.is_vertex() && c.floor() == i
            })
        };
        let required = ext.grid().unwrap_or(&ext.indices);
        if !required.iter().all(|&i| visited(i)) {
            return false;
        }
    }
    let (a, b) = (pairs[1], pairs[pairs.len() - 2]);
    let first = reference::free_space_decide(
        &reference::subcurve(p, start.0, a.0),
        &reference::subcurve(q, start.1, a.1),
        delta,
    );
    let last = reference::free_space_decide(
        &reference::subcurve(p, b.0, end.0),
        &reference::subcurve(q, b.1, end.1),
        delta,
    );
    first && last
}
