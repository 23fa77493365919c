//! Exact distance queries by searching the critical values.
//!
//! The Fréchet distance of two curves is attained at a critical value:
//! the distance between a vertex of one curve and a vertex of the other, or
//! half the distance between two vertices of the same curve. Each of these
//! three families is an implicit matrix over two sorted value lists, so it
//! can be counted and ranked without materializing it.

use crate::decision::{Oracle, Query};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// `|a - b|` for `a` in `P`, `b` in `Q`.
    Cross,
    /// `|a - a'| / 2` for `a, a'` in `P`, diagonal included.
    IntraP,
    IntraQ,
}

/// The multiset of one critical-value family over sorted value lists.
#[derive(Debug, Clone)]
pub struct CriticalFamily {
    pub kind: FamilyKind,
    a: Vec<f64>,
    b: Vec<f64>,
}

/// How [`CriticalFamily::select_kth`] ranks elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    /// Bisection over the float bit patterns, counting at each step.
    #[default]
    Counting,
    /// Weighted-median pruning over the sign-split sorted rows.
    Matrix,
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

impl CriticalFamily {
    pub fn cross(p: &[f64], q: &[f64]) -> Self {
        Self {
            kind: FamilyKind::Cross,
            a: sorted(p),
            b: sorted(q),
        }
    }

    /// Half distances within one curve; `kind` must be an intra kind.
    pub fn intra(kind: FamilyKind, values: &[f64]) -> Self {
        assert!(kind != FamilyKind::Cross);
        let a = sorted(values);
        Self {
            kind,
            b: a.clone(),
            a,
        }
    }

    pub fn total_count(&self) -> u64 {
        self.a.len() as u64 * self.b.len() as u64
    }

    #[inline]
    fn scale(&self, d: f64) -> f64 {
        match self.kind {
            FamilyKind::Cross => d,
            _ => d / 2.0,
        }
    }

    /// The family element for the pair `(x, y)`.
    pub fn element(&self, x: f64, y: f64) -> f64 {
        self.scale((x - y).abs())
    }

    fn count_with(&self, x: f64, strict: bool) -> u64 {
        let ok = |d: f64| if strict { d < x } else { d <= x };
        let b = &self.b;
        let (mut lo, mut hi) = (0usize, 0usize);
        let mut total = 0u64;
        for &a in &self.a {
            // Row `a` has its qualifying columns in one contiguous block that
            // only moves right as `a` grows.
            while lo < b.len() && b[lo] < a && !ok(self.scale(a - b[lo])) {
                lo += 1;
            }
            hi = hi.max(lo);
            while hi < b.len() && (b[hi] < a || ok(self.scale(b[hi] - a))) {
                hi += 1;
            }
            total += (hi - lo) as u64;
        }
        total
    }

    /// Number of elements `<= x`, O(|A| + |B|).
    pub fn count_le(&self, x: f64) -> u64 {
        self.count_with(x, false)
    }

    /// Number of elements `< x`.
    pub fn count_lt(&self, x: f64) -> u64 {
        self.count_with(x, true)
    }

    /// The largest element.
    pub fn max(&self) -> f64 {
        let (a, b) = (&self.a, &self.b);
        self.element(a[0], b[b.len() - 1])
            .max(self.element(a[a.len() - 1], b[0]))
    }

    /// The `k`-th smallest element (1-based, multiset order).
    pub fn select_kth(&self, k: u64) -> Result<f64> {
        self.select_with(k, Selection::Counting)
    }

    pub fn select_with(&self, k: u64, how: Selection) -> Result<f64> {
        let total = self.total_count();
        if k == 0 || k > total {
            return Err(Error::RankOutOfRange { k, total });
        }
        Ok(match how {
            Selection::Counting => self.select_counting(k),
            Selection::Matrix => self.select_matrix(k),
        })
    }

    fn select_counting(&self, k: u64) -> f64 {
        // Non-negative floats order like their bit patterns, and the count
        // only steps at element values, so the smallest pattern reaching `k`
        // is an element.
        let (mut lo, mut hi) = (0u64, self.max().to_bits());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.count_le(f64::from_bits(mid)) >= k {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        f64::from_bits(lo)
    }

    /// Each value `a` yields two sorted rows: the columns at or above `a`
    /// ascending, and those below `a` in reverse. Selection keeps a window per
    /// row and discards on either side of the weighted median of the window
    /// medians.
    fn select_matrix(&self, mut k: u64) -> f64 {
        let b = &self.b;
        struct Row {
            a: f64,
            split: usize,
            up: bool,
            lo: usize,
            hi: usize,
        }
        let mut rows: Vec<Row> = Vec::with_capacity(2 * self.a.len());
        for &a in &self.a {
            let split = b.partition_point(|&y| y < a);
            rows.push(Row {
                a,
                split,
                up: true,
                lo: 0,
                hi: b.len() - split,
            });
            rows.push(Row {
                a,
                split,
                up: false,
                lo: 0,
                hi: split,
            });
        }
        let at = |r: &Row, t: usize| {
            let y = if r.up {
                b[r.split + t]
            } else {
                b[r.split - 1 - t]
            };
            self.element(r.a, y)
        };
        loop {
            rows.retain(|r| r.lo < r.hi);
            let mut meds: Vec<(f64, u64)> = rows
                .iter()
                .map(|r| (at(r, r.lo + (r.hi - r.lo) / 2), (r.hi - r.lo) as u64))
                .collect();
            let live: u64 = meds.iter().map(|m| m.1).sum();
            if live <= 32 {
                let mut rest: Vec<f64> = rows
                    .iter()
                    .flat_map(|r| (r.lo..r.hi).map(move |t| (r, t)))
                    .map(|(r, t)| at(r, t))
                    .collect();
                rest.sort_by(f64::total_cmp);
                return rest[(k - 1) as usize];
            }
            meds.sort_by(|x, y| x.0.total_cmp(&y.0));
            let mut acc = 0;
            let mut pivot = meds[meds.len() - 1].0;
            for &(v, w) in &meds {
                acc += w;
                if 2 * acc >= live {
                    pivot = v;
                    break;
                }
            }
            let (mut less, mut le) = (0u64, 0u64);
            let mut cuts = Vec::with_capacity(rows.len());
            for r in &rows {
                let lt_end = r.lo + partition(r.lo, r.hi, |t| at(r, t) < pivot);
                let le_end = r.lo + partition(r.lo, r.hi, |t| at(r, t) <= pivot);
                less += (lt_end - r.lo) as u64;
                le += (le_end - r.lo) as u64;
                cuts.push((lt_end, le_end));
            }
            if k <= less {
                for (r, c) in rows.iter_mut().zip(&cuts) {
                    r.hi = c.0;
                }
            } else if k <= le {
                return pivot;
            } else {
                k -= le;
                for (r, c) in rows.iter_mut().zip(&cuts) {
                    r.lo = c.1;
                }
            }
        }
    }
}

/// Number of `t` in `[lo, hi)` satisfying a predicate that holds on a
/// prefix of the range.
fn partition(lo: usize, hi: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut a, mut b) = (lo, hi);
    while a < b {
        let mid = a + (b - a) / 2;
        if pred(mid) {
            a = mid + 1;
        } else {
            b = mid;
        }
    }
    a - lo
}

pub fn count_le(f: &CriticalFamily, x: f64) -> u64 {
    f.count_le(x)
}

pub fn select_kth(f: &CriticalFamily, k: u64) -> Result<f64> {
    f.select_kth(k)
}

/// Outcome of an exact distance query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceReport {
    pub value: f64,
    /// Decision calls made by the search, the initial zero test included.
    pub rounds: u32,
}

/// `d_F(P, Q)` for the oracle's curve `P`, exactly.
pub fn exact_distance(oracle: &Oracle, q_raw: &[f64]) -> Result<f64> {
    let q = Query::new(q_raw)?;
    Ok(exact_distance_query(oracle, &q, Selection::Counting)?.value)
}

pub fn exact_distance_query(oracle: &Oracle, q: &Query, how: Selection) -> Result<DistanceReport> {
    let mut rounds = 1;
    if oracle.decide_query(q, 0.0)? {
        return Ok(DistanceReport { value: 0.0, rounds });
    }
    let p = oracle.series().values();
    let qv = q.series().values();
    let families = [
        CriticalFamily::cross(p, qv),
        CriticalFamily::intra(FamilyKind::IntraP, p),
        CriticalFamily::intra(FamilyKind::IntraQ, qv),
    ];
    // Any pairing keeps every matched pair within the largest cross distance.
    let mut accepted = families[0].max();
    let mut rejected = 0.0f64;
    loop {
        let mut best: Option<(usize, u64, u64)> = None;
        for (f, fam) in families.iter().enumerate() {
            let below = fam.count_le(rejected);
            let live = fam.count_lt(accepted).saturating_sub(below);
            if live > 0 && best.is_none_or(|b| live > b.2) {
                best = Some((f, below, live));
            }
        }
        let Some((f, below, live)) = best else {
            return Ok(DistanceReport {
                value: accepted,
                rounds,
            });
        };
        let pivot = families[f].select_with(below + live.div_ceil(2), how)?;
        rounds += 1;
        if oracle.decide_query(q, pivot)? {
            accepted = pivot;
        } else {
            rejected = pivot;
        }
    }
}
