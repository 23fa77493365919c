//! One-dimensional polygonal curves.
//!
//! A [`TimeSeries`] is the piecewise-linear map `[1, n] -> R` through its
//! vertex values. All indices in the Rust API are 0-based; the real-valued
//! parameter accepted by [`TimeSeries::eval`] keeps the conventional 1-based
//! range `[1, n]`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::range_index::RangeIndex;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    canonical: bool,
}

impl TimeSeries {
    /// Validates raw vertex values. The result is not canonical, even if the
    /// values happen to be.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: i + 1 });
        }
        Ok(Self {
            values,
            canonical: false,
        })
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    /// Drops every interior vertex that lies weakly between its neighbours and
    /// merges runs of equal values. The traced image and the order in which
    /// it is traversed are unchanged, so Fréchet distances are preserved.
    pub fn canonicalize(&self) -> TimeSeries {
        if self.canonical {
            return self.clone();
        }
        let mut out: Vec<f64> = Vec::with_capacity(self.values.len());
        for &x in &self.values {
            if out.last() == Some(&x) {
                continue;
            }
            while out.len() >= 2 {
                let top = out[out.len() - 1];
                let below = out[out.len() - 2];
                if below.min(x) <= top && top <= below.max(x) {
                    out.pop();
                } else {
                    break;
                }
            }
            if out.last() != Some(&x) {
                out.push(x);
            }
        }
        TimeSeries {
            values: out,
            canonical: true,
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    /// Checks the canonical-form invariant directly on the values.
    pub fn has_canonical_shape(&self) -> bool {
        let v = &self.values;
        v.windows(2).all(|w| w[0] != w[1])
            && v.windows(3)
                .all(|w| (w[1] > w[0] && w[1] > w[2]) || (w[1] < w[0] && w[1] < w[2]))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Vertex value, 0-based.
    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Linear interpolation at the 1-based real parameter `t`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let n = self.values.len();
        if !(t >= 1.0 && t <= n as f64) {
            return Err(Error::ParamOutOfRange { t, n });
        }
        let base = (t.floor() as usize).min(n) - 1;
        let alpha = t - (base + 1) as f64;
        if alpha == 0.0 {
            return Ok(self.values[base]);
        }
        let (a, b) = (self.values[base], self.values[base + 1]);
        Ok((1.0 - alpha) * a + alpha * b)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Parses the text series format: one decimal number per line, blank lines
/// and lines starting with `#` ignored.
pub fn parse_text(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            line: no + 1,
            message: format!("not a number: {line:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: no + 1,
                message: format!("non-finite value {line:?}"),
            });
        }
        out.push(v);
    }
    Ok(out)
}

/// A point on a curve, stored as the index of the vertex that starts its edge
/// together with the exact value the curve takes there.
///
/// Points produced by level crossings carry the crossed level verbatim, so
/// containment tests against interval bounds never see interpolation error.
/// Within one edge the order of points follows the edge direction, which is
/// recoverable from the stored `dir`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveParam {
    pos: usize,
    value: f64,
    /// 0 at a vertex, otherwise the sign of the edge slope.
    dir: i8,
}

impl CurveParam {
    pub fn vertex(series: &TimeSeries, i: usize) -> Self {
        Self::vertex_with_value(i, series.value(i))
    }

    pub(crate) fn vertex_with_value(i: usize, value: f64) -> Self {
        Self {
            pos: i,
            value,
            dir: 0,
        }
    }

    /// The point on edge `(pos, pos + 1)` where the curve takes `level`.
    /// `start`/`end` are the edge's vertex values; `level` must lie in
    /// between. Collapses to a vertex when `level` equals an endpoint.
    pub(crate) fn on_edge(pos: usize, start: f64, end: f64, level: f64) -> Self {
        debug_assert!(start.min(end) <= level && level <= start.max(end));
        if level == start {
            Self::vertex_with_value(pos, start)
        } else if level == end {
            Self::vertex_with_value(pos + 1, end)
        } else {
            Self {
                pos,
                value: level,
                dir: if end > start { 1 } else { -1 },
            }
        }
    }

    /// Builds a parameter from a 1-based real position.
    pub fn from_real(series: &TimeSeries, t: f64) -> Result<Self> {
        let value = series.eval(t)?;
        let base = t.floor() as usize - 1;
        if t == t.floor() {
            return Ok(Self::vertex_with_value(base, value));
        }
        let (a, b) = (series.value(base), series.value(base + 1));
        Ok(Self::on_edge(base, a, b, value.clamp(a.min(b), a.max(b))))
    }

    /// 0-based index of the vertex at or before this point.
    pub fn floor(&self) -> usize {
        self.pos
    }

    /// 0-based index of the first vertex at or after this point.
    pub fn ceil(&self) -> usize {
        if self.dir == 0 {
            self.pos
        } else {
            self.pos + 1
        }
    }

    pub fn is_vertex(&self) -> bool {
        self.dir == 0
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Position within the edge, in `[0, 1)`.
    pub fn fraction(&self, series: &TimeSeries) -> f64 {
        if self.dir == 0 {
            0.0
        } else {
            let a = series.value(self.pos);
            let b = series.value(self.pos + 1);
            (self.value - a) / (b - a)
        }
    }

    /// The conventional 1-based real parameter.
    pub fn to_real(&self, series: &TimeSeries) -> f64 {
        (self.pos + 1) as f64 + self.fraction(series)
    }

    /// The same point seen on the index-reversed curve of `n` vertices.
    pub(crate) fn reversed(&self, n: usize) -> Self {
        if self.dir == 0 {
            Self::vertex_with_value(n - 1 - self.pos, self.value)
        } else {
            Self {
                pos: n - 2 - self.pos,
                value: self.value,
                dir: -self.dir,
            }
        }
    }
}

impl Eq for CurveParam {}

impl PartialOrd for CurveParam {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CurveParam {
    fn cmp(&self, other: &Self) -> Ordering {
        self.pos
            .cmp(&other.pos)
            .then_with(|| match (self.dir, other.dir) {
                (0, 0) => Ordering::Equal,
                (0, _) => Ordering::Less,
                (_, 0) => Ordering::Greater,
                (d, _) => {
                    let ord = self.value.total_cmp(&other.value);
                    if d > 0 {
                        ord
                    } else {
                        ord.reverse()
                    }
                }
            })
    }
}

/// Running minima and maxima from both ends of a series, with the earliest
/// index attaining each.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub prefix_min: Vec<f64>,
    pub prefix_max: Vec<f64>,
    pub suffix_min: Vec<f64>,
    pub suffix_max: Vec<f64>,
    pub prefix_argmin: Vec<u32>,
    pub prefix_argmax: Vec<u32>,
    pub suffix_argmin: Vec<u32>,
    pub suffix_argmax: Vec<u32>,
}

impl Envelope {
    pub fn build(series: &TimeSeries) -> Self {
        let v = series.values();
        let n = v.len();
        let mut env = Envelope {
            prefix_min: Vec::with_capacity(n),
            prefix_max: Vec::with_capacity(n),
            suffix_min: vec![0.0; n],
            suffix_max: vec![0.0; n],
            prefix_argmin: Vec::with_capacity(n),
            prefix_argmax: Vec::with_capacity(n),
            suffix_argmin: vec![0; n],
            suffix_argmax: vec![0; n],
        };
        let (mut lo, mut hi, mut alo, mut ahi) = (v[0], v[0], 0u32, 0u32);
        for (i, &x) in v.iter().enumerate() {
            if x < lo {
                lo = x;
                alo = i as u32;
            }
            if x > hi {
                hi = x;
                ahi = i as u32;
            }
            env.prefix_min.push(lo);
            env.prefix_max.push(hi);
            env.prefix_argmin.push(alo);
            env.prefix_argmax.push(ahi);
        }
        let (mut lo, mut hi) = (v[n - 1], v[n - 1]);
        let (mut alo, mut ahi) = ((n - 1) as u32, (n - 1) as u32);
        for i in (0..n).rev() {
            let x = v[i];
            // `<=` moves ties to the earlier index.
            if x <= lo {
                lo = x;
                alo = i as u32;
            }
            if x >= hi {
                hi = x;
                ahi = i as u32;
            }
            env.suffix_min[i] = lo;
            env.suffix_max[i] = hi;
            env.suffix_argmin[i] = alo;
            env.suffix_argmax[i] = ahi;
        }
        env
    }
}

/// A canonical series together with the structures the query algorithms
/// need: its envelope and an orthogonal range-successor index.
#[derive(Debug, Clone)]
pub struct IndexedSeries {
    pub series: TimeSeries,
    pub envelope: Envelope,
    pub index: RangeIndex,
}

impl IndexedSeries {
    pub fn new(series: TimeSeries) -> Self {
        let envelope = Envelope::build(&series);
        let index = RangeIndex::build(&series);
        Self {
            series,
            envelope,
            index,
        }
    }

    pub fn forward(&self) -> View<'_> {
        View {
            base: self,
            reversed: false,
        }
    }

    pub fn reversed(&self) -> View<'_> {
        View {
            base: self,
            reversed: true,
        }
    }
}

/// A read-only view of an indexed series, optionally with its vertex order
/// reversed. Parameters handed to and returned by a view are in the view's
/// own coordinates; [`View::to_forward`] maps them back.
#[derive(Debug, Clone, Copy)]
pub struct View<'a> {
    base: &'a IndexedSeries,
    reversed: bool,
}

impl<'a> View<'a> {
    pub fn len(&self) -> usize {
        self.base.series.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    pub fn series(&self) -> &'a TimeSeries {
        &self.base.series
    }

    fn flip(&self, i: usize) -> usize {
        if self.reversed {
            self.len() - 1 - i
        } else {
            i
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        self.base.series.value(self.flip(i))
    }

    pub fn vertex(&self, i: usize) -> CurveParam {
        CurveParam::vertex_with_value(i, self.value(i))
    }

    /// Minimum over view vertices `0..=i`.
    pub fn prefix_min(&self, i: usize) -> f64 {
        let env = &self.base.envelope;
        if self.reversed {
            env.suffix_min[self.flip(i)]
        } else {
            env.prefix_min[i]
        }
    }

    pub fn prefix_max(&self, i: usize) -> f64 {
        let env = &self.base.envelope;
        if self.reversed {
            env.suffix_max[self.flip(i)]
        } else {
            env.prefix_max[i]
        }
    }

    /// `(min, max)` of the view's subcurve from its start up to `p`.
    pub fn prefix_range(&self, p: CurveParam) -> (f64, f64) {
        let lo = self.prefix_min(p.floor()).min(p.value());
        let hi = self.prefix_max(p.floor()).max(p.value());
        (lo, hi)
    }

    pub fn to_forward(&self, p: CurveParam) -> CurveParam {
        if self.reversed {
            p.reversed(self.len())
        } else {
            p
        }
    }

    pub fn from_forward(&self, p: CurveParam) -> CurveParam {
        self.to_forward(p)
    }

    /// Smallest view index in `[i_lo, i_hi]` whose value lies in
    /// `[v_lo, v_hi]`.
    pub(crate) fn min_index_in_box(
        &self,
        i_lo: usize,
        i_hi: usize,
        v_lo: f64,
        v_hi: f64,
        visits: &mut u64,
    ) -> Option<usize> {
        let idx = &self.base.index;
        if self.reversed {
            let n = self.len();
            idx.max_index_counted(n - 1 - i_hi, n - 1 - i_lo, v_lo, v_hi, visits)
                .map(|i| n - 1 - i)
        } else {
            idx.min_index_counted(i_lo, i_hi, v_lo, v_hi, visits)
        }
    }

    /// Earliest point at or before `bound` whose value is `<= hi`
    /// (`below == true`) or `>= lo` (`below == false`).
    fn earliest_beyond(
        &self,
        bound: CurveParam,
        level: f64,
        below: bool,
        visits: &mut u64,
    ) -> Option<CurveParam> {
        let hit = if below {
            self.min_index_in_box(0, bound.floor(), f64::NEG_INFINITY, level, visits)
        } else {
            self.min_index_in_box(0, bound.floor(), level, f64::INFINITY, visits)
        };
        match hit {
            Some(0) => Some(self.vertex(0)),
            // The previous vertex is strictly on the other side of `level`, so
            // the curve crosses it on the edge entering vertex `i`.
            Some(i) => Some(CurveParam::on_edge(
                i - 1,
                self.value(i - 1),
                self.value(i),
                level,
            )),
            None => {
                let inside = if below {
                    bound.value() <= level
                } else {
                    bound.value() >= level
                };
                if !bound.is_vertex() && inside {
                    let p = bound.floor();
                    Some(CurveParam::on_edge(
                        p,
                        self.value(p),
                        self.value(p + 1),
                        level,
                    ))
                } else {
                    None
                }
            }
        }
    }

    /// Smallest point `t <= bound` with value in `[lo, hi]`.
    pub fn first_entry(&self, bound: CurveParam, lo: f64, hi: f64) -> Option<CurveParam> {
        self.first_entry_counted(bound, lo, hi, &mut 0)
    }

    pub(crate) fn first_entry_counted(
        &self,
        bound: CurveParam,
        lo: f64,
        hi: f64,
        visits: &mut u64,
    ) -> Option<CurveParam> {
        if lo > hi {
            return None;
        }
        // The curve is continuous: once it has been both <= hi and >= lo, it
        // has passed through [lo, hi] no later than the later of the two.
        let a = self.earliest_beyond(bound, hi, true, visits)?;
        let b = self.earliest_beyond(bound, lo, false, visits)?;
        Some(a.max(b))
    }
}

/// Smallest point `t <= bound` of `series` whose value lies in `[lo, hi]`,
/// using a range index built over `series`.
pub fn first_entry(
    series: &IndexedSeries,
    bound: CurveParam,
    lo: f64,
    hi: f64,
) -> Option<CurveParam> {
    series.forward().first_entry(bound, lo, hi)
}
