//! Scaling benchmark: index build time, oracle decision time and
//! free-space decision time as the indexed curve grows.

use std::io::{self, Write};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::workload::{random_walk, signature_following_query};
use crate::decision::{Oracle, Query};
use crate::distance::{exact_distance_query, Selection};
use crate::reference::free_space_decide;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub n_list: Vec<usize>,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    /// Also run one exact distance query per size and report its rounds.
    pub rounds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub build_ms: f64,
    pub oracle_query_us: f64,
    pub reference_query_us: f64,
    /// Decision calls of one exact distance query, if measured.
    pub rounds: Option<u32>,
    pub s_p: usize,
    pub s_q: usize,
}

pub const GENERATOR: &str =
    "P: random walk, steps uniform in [-1,1]; Q: extended signature of P at delta with wiggles and jitter";

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

/// Fastest wall time of `f` in microseconds over repetitions that fill
/// `budget` (at least one).
fn time_us(budget: Duration, mut f: impl FnMut()) -> f64 {
    let start = Instant::now();
    let mut best = f64::INFINITY;
    while best.is_infinite() || start.elapsed() < budget {
        let t = Instant::now();
        f();
        best = best.min(t.elapsed().as_secs_f64() * 1e6);
    }
    best
}

/// Runs every size that is at least `m`; smaller ones are reported on
/// `warn` and skipped.
pub fn run(cfg: &BenchConfig, mut warn: impl FnMut(&str)) -> Vec<BenchRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        if cfg.m > n {
            warn(&format!("skipping n={n}: m={} exceeds n", cfg.m));
            continue;
        }
        let (mut build, mut oracle_t, mut reference_t) = (vec![], vec![], vec![]);
        let mut rounds = None;
        let (mut s_p, mut s_q) = (0, 0);
        for trial in 0..cfg.trials {
            let p = random_walk(&mut rng, n);
            let t0 = Instant::now();
            let oracle = Oracle::build(&p).expect("walk is finite");
            build.push(t0.elapsed().as_secs_f64() * 1e3);

            let (q, delta) = signature_following_query(&mut rng, oracle.hierarchy(), cfg.m);
            oracle_t.push(time_us(Duration::from_millis(30), || {
                let query = Query::new(&q).expect("query is finite");
                std::hint::black_box(oracle.decide_query(&query, delta).expect("valid delta"));
            }));
            let query = Query::new(&q).expect("query is finite");
            let traced = oracle.decide_traced(&query, delta).expect("valid delta");
            s_p = traced.stats.s_p;
            s_q = traced.stats.s_q;
            let (pc, qc) = (oracle.series().values(), query.series().values());
            reference_t.push(time_us(Duration::from_millis(30), || {
                std::hint::black_box(free_space_decide(pc, qc, delta));
            }));
            if cfg.rounds && trial == 0 {
                let r = exact_distance_query(&oracle, &query, Selection::Counting)
                    .expect("valid query");
                rounds = Some(r.rounds);
            }
        }
        rows.push(BenchRow {
            n,
            m: cfg.m,
            build_ms: median(build),
            oracle_query_us: median(oracle_t),
            reference_query_us: median(reference_t),
            rounds,
            s_p,
            s_q,
        });
    }
    rows
}

pub fn write_csv<W: Write>(mut w: W, cfg: &BenchConfig, rows: &[BenchRow]) -> io::Result<()> {
    writeln!(w, "# generator: {GENERATOR}")?;
    writeln!(w, "# seed: {}, trials: {}", cfg.seed, cfg.trials)?;
    writeln!(
        w,
        "n,m,build_ms,oracle_query_us,reference_query_us,rounds,s_p,s_q"
    )?;
    for r in rows {
        let rounds = r.rounds.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{:.3},{:.3},{:.3},{},{},{}",
            r.n, r.m, r.build_ms, r.oracle_query_us, r.reference_query_us, rounds, r.s_p, r.s_q
        )?;
    }
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
