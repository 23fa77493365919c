//! Orthogonal range successor over the points `(i, P(i))`.
//!
//! The structure is a layered range tree laid out level by level. The tree
//! splits the value-rank axis; every node keeps the vertex indices of its
//! points in ascending order, and the node lists of one level are stored
//! back to back so that a node over ranks `[lo, hi)` occupies exactly the
//! slots `[lo, hi)` of its level. Each level also stores one bit per slot
//! telling whether the point descends to the right child. A rank query over
//! those bits maps the position of an index successor in a node onto the
//! position of the same successor in either child in O(1), which is the
//! fractional-cascading step. A query visits O(log n) nodes.

use crate::series::TimeSeries;

#[derive(Debug, Clone)]
struct RankBits {
    words: Vec<u64>,
    /// Number of set bits in `words[..k]`.
    cum: Vec<u32>,
}

impl RankBits {
    fn from_bools(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len() / 64 + 1];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        let mut cum = Vec::with_capacity(words.len());
        let mut acc = 0u32;
        for w in &words {
            cum.push(acc);
            acc += w.count_ones();
        }
        Self { words, cum }
    }

    /// Set bits in `[0, p)`.
    #[inline]
    fn rank1(&self, p: usize) -> usize {
        let w = p / 64;
        let r = p % 64;
        let partial = if r == 0 {
            0
        } else {
            (self.words[w] & ((1u64 << r) - 1)).count_ones()
        };
        (self.cum[w] + partial) as usize
    }
}

#[derive(Debug, Clone)]
pub struct RangeIndex {
    /// Point values sorted ascending (ties by index); position = rank.
    sorted_values: Vec<f64>,
    /// `lists[d]`: per-node ascending index lists of level `d`.
    lists: Vec<Vec<u32>>,
    /// `right[d]`: whether slot `p` of level `d` descends to the right child.
    right: Vec<RankBits>,
}

#[inline]
fn split(lo: usize, hi: usize) -> usize {
    lo + (hi - lo) / 2
}

#[derive(Clone, Copy)]
enum Want {
    Min,
    Max,
}

impl RangeIndex {
    pub fn build(series: &TimeSeries) -> Self {
        let values = series.values();
        let n = values.len();
        assert!(
            n <= u32::MAX as usize,
            "series too long for the range index"
        );

        let mut keyed: Vec<(f64, u32)> = values.iter().zip(0u32..).map(|(&x, i)| (x, i)).collect();
        keyed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut rank = vec![0u32; n];
        for (r, &(_, i)) in keyed.iter().enumerate() {
            rank[i as usize] = r as u32;
        }
        let sorted_values = keyed.into_iter().map(|(x, _)| x).collect();

        // Ranks travel with the lists so each level is one sequential pass.
        let mut lists = vec![(0..n as u32).collect::<Vec<u32>>()];
        let mut ranks = rank;
        let mut right = Vec::new();
        let mut nodes = vec![(0usize, n)];
        while nodes.iter().any(|&(lo, hi)| hi - lo > 1) {
            let cur = lists.last().unwrap();
            let mut next = vec![0u32; n];
            let mut next_ranks = vec![0u32; n];
            let mut bits = vec![false; n];
            let mut children = Vec::with_capacity(nodes.len() * 2);
            for &(lo, hi) in &nodes {
                let mid = split(lo, hi);
                let (mut l, mut r) = (lo, mid);
                for p in lo..hi {
                    let (i, rk) = (cur[p], ranks[p]);
                    let go_right = rk as usize >= mid;
                    let dst = if go_right { r } else { l };
                    next[dst] = i;
                    next_ranks[dst] = rk;
                    l += usize::from(!go_right);
                    r += usize::from(go_right);
                    bits[p] = go_right;
                }
                if mid > lo {
                    children.push((lo, mid));
                }
                children.push((mid, hi));
            }
            right.push(RankBits::from_bools(&bits));
            lists.push(next);
            ranks = next_ranks;
            nodes = children;
        }

        Self {
            sorted_values,
            lists,
            right,
        }
    }

    pub fn len(&self) -> usize {
        self.sorted_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_values.is_empty()
    }

    /// Smallest index in `[i_lo, i_hi]` whose value lies in `[v_lo, v_hi]`.
    /// All bounds are inclusive and may be infinite.
    pub fn min_index_in_box(
        &self,
        i_lo: usize,
        i_hi: usize,
        v_lo: f64,
        v_hi: f64,
    ) -> Option<usize> {
        self.min_index_counted(i_lo, i_hi, v_lo, v_hi, &mut 0)
    }

    /// Largest index in `[i_lo, i_hi]` whose value lies in `[v_lo, v_hi]`.
    pub fn max_index_in_box(
        &self,
        i_lo: usize,
        i_hi: usize,
        v_lo: f64,
        v_hi: f64,
    ) -> Option<usize> {
        self.max_index_counted(i_lo, i_hi, v_lo, v_hi, &mut 0)
    }

    /// As [`Self::min_index_in_box`], adding the number of tree nodes visited
    /// to `visits`.
    pub fn min_index_counted(
        &self,
        i_lo: usize,
        i_hi: usize,
        v_lo: f64,
        v_hi: f64,
        visits: &mut u64,
    ) -> Option<usize> {
        self.query(i_lo, i_hi, v_lo, v_hi, Want::Min, visits)
    }

    pub fn max_index_counted(
        &self,
        i_lo: usize,
        i_hi: usize,
        v_lo: f64,
        v_hi: f64,
        visits: &mut u64,
    ) -> Option<usize> {
        self.query(i_lo, i_hi, v_lo, v_hi, Want::Max, visits)
    }

    fn query(
        &self,
        i_lo: usize,
        i_hi: usize,
        v_lo: f64,
        v_hi: f64,
        want: Want,
        visits: &mut u64,
    ) -> Option<usize> {
        let n = self.len();
        if n == 0 || i_lo > i_hi || i_lo >= n || v_lo.is_nan() || v_hi.is_nan() || v_lo > v_hi {
            return None;
        }
        let i_hi = i_hi.min(n - 1);
        let a = self.sorted_values.partition_point(|&x| x < v_lo);
        let b = self.sorted_values.partition_point(|&x| x <= v_hi);
        if a >= b {
            return None;
        }
        // Root level lists every index in order, so positions equal indices.
        self.descend(0, 0, n, i_lo, i_hi + 1, a, b, want, visits)
            .map(|i| i as usize)
    }

    /// `[s, e)` are the slots of node `[lo, hi)` at level `d` holding indices
    /// inside the query's index range; `[a, b)` is the query's rank range.
    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        d: usize,
        lo: usize,
        hi: usize,
        s: usize,
        e: usize,
        a: usize,
        b: usize,
        want: Want,
        visits: &mut u64,
    ) -> Option<u32> {
        *visits += 1;
        if s >= e || hi <= a || b <= lo {
            return None;
        }
        if a <= lo && hi <= b {
            let list = &self.lists[d];
            return Some(match want {
                Want::Min => list[s],
                Want::Max => list[e - 1],
            });
        }
        let mid = split(lo, hi);
        let bits = &self.right[d];
        let base = bits.rank1(lo);
        let ones_s = bits.rank1(s) - base;
        let ones_e = bits.rank1(e) - base;
        let zeros_s = (s - lo) - ones_s;
        let zeros_e = (e - lo) - ones_e;
        let l = self.descend(
            d + 1,
            lo,
            mid,
            lo + zeros_s,
            lo + zeros_e,
            a,
            b,
            want,
            visits,
        );
        let r = self.descend(
            d + 1,
            mid,
            hi,
            mid + ones_s,
            mid + ones_e,
            a,
            b,
            want,
            visits,
        );
        match (l, r, want) {
            (Some(x), Some(y), Want::Min) => Some(x.min(y)),
            (Some(x), Some(y), Want::Max) => Some(x.max(y)),
            (x, None, _) => x,
            (None, y, _) => y,
        }
    }
}
