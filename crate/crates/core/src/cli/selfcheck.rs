//! Randomized comparison of the oracle against the free-space program.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::workload::{derived_curve, integer_curve};
use crate::decision::{Oracle, Query};
use crate::distance::{exact_distance_query, Selection};
use crate::reference::{brute_exact, critical_values, free_space_decide};

#[derive(Debug, Clone)]
pub struct SelfcheckConfig {
    pub trials: u64,
    pub seed: u64,
    pub max_n: usize,
    pub max_m: usize,
    /// Flip every oracle answer; used to exercise the failure path.
    pub inject_fault: bool,
}

#[derive(Debug, Clone, Default)]
pub struct SelfcheckReport {
    pub trials: u64,
    pub passed: u64,
    /// One line per failing trial, enough to replay it.
    pub failures: Vec<String>,
}

fn fmt_curve(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// Checks one instance; returns a repro line on the first mismatch.
fn check_instance(p: &[f64], q: &[f64], rng: &mut ChaCha8Rng, fault: bool) -> Option<String> {
    let oracle = Oracle::build(p).expect("generated curve is valid");
    let query = Query::new(q).expect("generated curve is valid");
    let (pc, qc) = (oracle.series().values(), query.series().values());
    let repro = |what: &str| format!("P={} Q={} {what}", fmt_curve(p), fmt_curve(q));

    let crit = critical_values(pc, qc);
    let mut deltas = vec![0.0];
    for _ in 0..6 {
        let i = rng.gen_range(0..crit.len());
        deltas.push(crit[i]);
        if i + 1 < crit.len() {
            deltas.push((crit[i] + crit[i + 1]) / 2.0);
        }
    }
    deltas.shuffle(rng);
    for d in deltas {
        let got = oracle.decide_query(&query, d).expect("delta is valid") != fault;
        let want = free_space_decide(pc, qc, d);
        if got != want {
            return Some(repro(&format!("delta={d} oracle={got} reference={want}")));
        }
    }
    let got = exact_distance_query(&oracle, &query, Selection::Counting)
        .expect("query is valid")
        .value;
    let want = brute_exact(pc, qc);
    if got != want && !fault {
        return Some(repro(&format!("distance oracle={got} reference={want}")));
    }
    None
}

pub fn run(cfg: &SelfcheckConfig) -> SelfcheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = SelfcheckReport {
        trials: cfg.trials,
        ..Default::default()
    };
    for _ in 0..cfg.trials {
        let n = rng.gen_range(1..=cfg.max_n.max(1));
        let m = rng.gen_range(1..=cfg.max_m.max(1));
        let p = integer_curve(&mut rng, n, 20);
        let q = if rng.gen_bool(0.5) {
            derived_curve(&mut rng, &p, m, 2)
        } else {
            integer_curve(&mut rng, m, 20)
        };
        match check_instance(&p, &q, &mut rng, cfg.inject_fault) {
            None => report.passed += 1,
            Some(line) => report.failures.push(line),
        }
    }
    report
}
