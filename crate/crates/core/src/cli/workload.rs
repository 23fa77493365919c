//! Random instance generators for the self-check and the benchmark.

use rand::Rng;

use crate::signature::SignatureHierarchy;
use crate::TimeSeries;

/// `n` vertices of a walk with steps uniform in `[-1, 1]`, starting at 0.
pub fn random_walk<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut x = 0.0;
    (0..n)
        .map(|_| {
            let v = x;
            x += rng.gen_range(-1.0..=1.0);
            v
        })
        .collect()
}

/// Integer-valued curve with values in `[0, range]`.
pub fn integer_curve<R: Rng>(rng: &mut R, len: usize, range: i32) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(0..=range) as f64).collect()
}

/// A query derived from `p`: a sorted sample of its vertices with every
/// value jittered by at most `jitter`, rounded to integers.
pub fn derived_curve<R: Rng>(rng: &mut R, p: &[f64], len: usize, jitter: i32) -> Vec<f64> {
    let mut picks: Vec<usize> = (0..len.max(2)).map(|_| rng.gen_range(0..p.len())).collect();
    picks.sort_unstable();
    picks[0] = 0;
    *picks.last_mut().unwrap() = p.len() - 1;
    picks
        .into_iter()
        .map(|i| p[i] + rng.gen_range(-jitter..=jitter) as f64)
        .collect()
}

/// A benchmark instance: the scale `delta` at which the signature of `p`
/// has about `m / 2` vertices, and a query of `m` vertices that follows
/// that signature with small wiggles and jitter, so that decisions run
/// through the whole super-cell grid.
pub fn signature_following_query<R: Rng>(
    rng: &mut R,
    hierarchy: &SignatureHierarchy,
    m: usize,
) -> (Vec<f64>, f64) {
    let mut thr: Vec<f64> = hierarchy.removal_thresholds().to_vec();
    thr.sort_by(|a, b| b.total_cmp(a));
    let target = (m / 2).clamp(2, thr.len().saturating_sub(1).max(2));
    let delta = thr
        .get(target)
        .copied()
        .filter(|d| d.is_finite())
        .unwrap_or(1.0);

    let sig = hierarchy
        .extract_extended(delta)
        .expect("delta is a valid scale")
        .indices;
    let v = hierarchy.series().values();
    let edges = sig.len().saturating_sub(1).max(1);
    let spare = m.saturating_sub(sig.len()) / 2;
    let mut q = Vec::with_capacity(m);
    for (e, w) in sig.windows(2).enumerate() {
        let (a, b) = (v[w[0]], v[w[1]]);
        q.push(a);
        let wiggles = spare / edges + usize::from(e < spare % edges);
        let dir = if b >= a { 1.0 } else { -1.0 };
        for k in 1..=wiggles {
            let x = a + (b - a) * k as f64 / (wiggles + 1) as f64;
            q.push(x);
            q.push(x - dir * delta / 2.0);
        }
    }
    q.push(v[*sig.last().unwrap()]);
    for x in &mut q {
        *x += rng.gen_range(-delta / 8.0..=delta / 8.0);
    }
    (q, delta)
}

/// Convenience: the canonical form of `raw`.
pub fn canonical(raw: &[f64]) -> Vec<f64> {
    TimeSeries::from_slice(raw)
        .expect("generated curves are finite and nonempty")
        .canonicalize()
        .values()
        .to_vec()
}
