//! Acceptance suite: one line per criterion, exact comparisons throughout.
//! Runs without the libtest harness so the lines always reach stdout.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use serde_json::Value;

use stoneforge::campaign;
use stoneforge::measures::{rosenthal_thin, MeasureError, MeasureFamily};
use stoneforge::pair::BlockSchema;
use stoneforge::report::Report;
use stoneforge::scalar::Scalar;
use stoneforge::separation::{Carrier, PresentedAntichain};
use stoneforge::tree::DEFAULT_BRUTE_BOUND;

const SEED: u64 = 42;

type Q = BigRational;

enum Outcome {
    Pass(String),
    Fail(String),
    /// The criterion as worded cannot hold; the failure mode was checked.
    Unattainable(String),
}

struct Suite {
    failures: usize,
}

impl Suite {
    fn run(&mut self, id: &str, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) {
        let started = Instant::now();
        let outcome = f();
        let elapsed = started.elapsed();
        let over = elapsed > limit;
        let (mark, note) = match outcome {
            Outcome::Pass(n) if !over => ("PASS", n),
            Outcome::Pass(n) => ("FAIL", format!("{n}; runtime over {limit:?}")),
            Outcome::Fail(n) => ("FAIL", n),
            Outcome::Unattainable(n) => ("FAIL", format!("unattainable as stated: {n}")),
        };
        if mark == "FAIL" && !note.starts_with("unattainable") {
            self.failures += 1;
        }
        println!("criterion {id:<3} {mark}  {title}  [{:.2}s / {:?}]  {note}", elapsed.as_secs_f64(), limit);
    }
}

fn failures(r: &Report) -> String {
    r.failures().map(|c| format!("{}: {}", c.id, c.detail)).collect::<Vec<_>>().join("; ")
}

fn detail<'a>(r: &'a Report, id: &str) -> &'a Value {
    &r.checks.iter().find(|c| c.id == id).unwrap_or_else(|| panic!("missing check {id}")).detail
}

fn all_strings(max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for len in 1..=max_len {
        for v in 0..1u32 << len {
            out.push((0..len).map(|i| if v >> (len - 1 - i) & 1 == 1 { '1' } else { '0' }).collect());
        }
    }
    out
}

fn comparable(a: &str, b: &str) -> bool {
    a.starts_with(b) || b.starts_with(a)
}

/// Antichains among `nodes` by size, by plain subset enumeration.
fn antichain_sizes(nodes: &[String], max_size: usize) -> Vec<u64> {
    let mut counts = vec![0u64; max_size + 1];
    fn rec(nodes: &[String], from: usize, chosen: &mut Vec<usize>, max: usize, counts: &mut [u64]) {
        counts[chosen.len()] += 1;
        if chosen.len() == max {
            return;
        }
        for i in from..nodes.len() {
            if chosen.iter().all(|&j| !comparable(&nodes[i], &nodes[j])) {
                chosen.push(i);
                rec(nodes, i + 1, chosen, max, counts);
                chosen.pop();
            }
        }
    }
    rec(nodes, 0, &mut Vec::new(), max_size, &mut counts);
    counts
}

fn criterion_1() -> Outcome {
    let r = campaign::kernel_equivalence(SEED, 3, 10_000, DEFAULT_BRUTE_BOUND);
    if !r.passed {
        return Outcome::Fail(failures(&r));
    }
    // A conjunction (U, V) with disjoint U, V over the 15 nodes is nonzero
    // iff U is an antichain; V ranges over subsets of the other nodes.
    let nodes = all_strings(3);
    let sizes = antichain_sizes(&nodes, nodes.len());
    let nonzero: u64 = sizes.iter().enumerate().map(|(k, c)| c << (nodes.len() - k)).sum();
    let d = detail(&r, "exhaustive");
    let total = 3u64.pow(nodes.len() as u32);
    if d["conjunctions"] != total || d["zero"].as_u64() != Some(total - nonzero) {
        return Outcome::Fail(format!("counts {d} differ from oracle total {total}, nonzero {nonzero}"));
    }
    let random = detail(&r, "random");
    Outcome::Pass(format!(
        "{total} conjunctions ({nonzero} nonzero) and {} random DNFs agree with the oracle",
        random["samples"]
    ))
}

fn criterion_2() -> Outcome {
    let r = campaign::star_sweep(4, 4, DEFAULT_BRUTE_BOUND);
    if !r.passed {
        return Outcome::Fail(failures(&r));
    }
    let nodes = all_strings(4);
    let pairs = nodes
        .iter()
        .flat_map(|s| nodes.iter().map(move |t| (s, t)))
        .filter(|(s, t)| t.len() > s.len() && t.starts_with(s.as_str()))
        .count();
    let sizes = antichain_sizes(&nodes, 4);
    let got_pairs = detail(&r, "proper-prefix-pairs-vanish")["pairs"].as_u64();
    let got_sizes: Vec<u64> = detail(&r, "antichain-meets-nonzero")["by_size"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    if got_pairs != Some(pairs as u64) || got_sizes != sizes[1..] {
        return Outcome::Fail(format!("swept {got_pairs:?} pairs / {got_sizes:?}, oracle {pairs} / {:?}", &sizes[1..]));
    }
    Outcome::Pass(format!("{pairs} prefix pairs vanish; antichain meets by size {:?} are nonzero with witnesses", &sizes[1..]))
}

fn criterion_3() -> Outcome {
    let r = campaign::independence_sweep(SEED, 4, 200, DEFAULT_BRUTE_BOUND);
    if !r.passed {
        return Outcome::Fail(failures(&r));
    }
    // distinct sequences, compared on a long unrolled window
    let mut sequences = BTreeSet::new();
    for total in 1..=4usize {
        for period_len in 1..=total {
            let prefix_len = total - period_len;
            for v in 0..1u32 << total {
                let bit = |i: usize| v >> i & 1 == 1;
                let seq: Vec<bool> = (0..64)
                    .map(|i| if i < prefix_len { bit(i) } else { bit(prefix_len + (i - prefix_len) % period_len) })
                    .collect();
                sequences.insert(seq);
            }
        }
    }
    let n = sequences.len() as u64;
    let triples = n * (n - 1) * (n - 2) / 6;
    let d = detail(&r, "exhaustive-triples");
    if d["branches"] != n || d["cases"] != triples * 8 {
        return Outcome::Fail(format!("swept {d}, oracle {n} branches / {} cases", triples * 8));
    }
    Outcome::Pass(format!(
        "{} splits over {n} branches and {} random five-branch splits verified",
        triples * 8,
        detail(&r, "random-five")["cases"]
    ))
}

fn criterion_4() -> Outcome {
    let r = campaign::ep_laws(SEED, 10_000, 100_000, 10_000);
    if !r.passed {
        return Outcome::Fail(failures(&r));
    }
    Outcome::Pass(format!(
        "{} law checks on 10^4 triples, {} memberships, {} window pairs",
        r.checks.iter().filter(|c| c.id.starts_with("law.")).count(),
        detail(&r, "membership-vs-unrolled")["checks"],
        detail(&r, "equality-window")["pairs"]
    ))
}

fn criterion_5() -> Outcome {
    let r = campaign::pair_campaign(SEED, 1_000, 20, &[10, 100, 1_000]);
    if !r.passed {
        return Outcome::Fail(failures(&r));
    }
    Outcome::Pass(format!(
        "μ vanishes past the index on {} elements; witnesses hold at horizons 10, 100, 1000",
        detail(&r, "mu-vanishes-beyond-index")["elements"]
    ))
}

fn criterion_6_literal() -> Outcome {
    let pairs = PresentedAntichain::blocks(Carrier::PowerSet, BlockSchema::full(0, 2, 2).unwrap()).unwrap();
    let eps = Q::from_ratio(1, 2);
    // μ_k(A_k) = [2k ∈ A_k] − [2k+1 ∈ A_k] = 1 − 1
    let diagonal = Q::from_int(1) - Q::from_int(1);
    match rosenthal_thin(&MeasureFamily::<Q>::PairDifference, &pairs, &eps, 20) {
        Err(MeasureError::HypothesisViolation { index: 0, value }) if value == diagonal.to_string() => Outcome::Unattainable(
            "A_n = {2n, 2n+1} gives |μ_k(A_k)| = 0 ≤ ε, so the thinning hypothesis fails and |μ_k(A)| = 1 cannot occur".into(),
        ),
        other => Outcome::Fail(format!("unexpected outcome {other:?}")),
    }
}

fn criterion_6() -> Outcome {
    let r = campaign::thinning_campaign(SEED, 100);
    if !r.passed {
        return Outcome::Fail(failures(&r));
    }
    let a = detail(&r, "pair-family.alternation");
    // 2ε/3 and ε/3 at ε = 1/2
    let (lower, upper) = (Q::from_ratio(2, 3) * Q::from_ratio(1, 2), Q::from_ratio(1, 2) / Q::from_int(3));
    if a["lower"] != lower.to_string() || a["upper"] != upper.to_string() || a["even_value"] != "1" || a["odd_value"] != "0" {
        return Outcome::Fail(format!("alternation detail {a}"));
    }
    Outcome::Pass(format!(
        "A_n = {{2n}}: all {} indices kept with zero cross-sums, |μ_k(A)| = 1 > {lower} and 0 < {upper}; 100 random families verified",
        detail(&r, "pair-family.thinning")["selected"]
    ))
}

fn criterion_7() -> Outcome {
    let r = campaign::grothendieck_campaign(SEED, 50);
    if !r.passed {
        return Outcome::Fail(failures(&r));
    }
    let b = detail(&r, "base");
    let want = [("m1_value", "1"), ("m1_bound", "1/2"), ("m0_value", "0"), ("m0_bound", "1/4")];
    if want.iter().any(|(k, v)| b[*k] != *v) {
        return Outcome::Fail(format!("base detail {b}"));
    }
    Outcome::Pass(format!(
        "base: 1 > 1/2 on M1, 0 < 1/4 on M0; 50 perturbations hold (stronger 3η/4 bound held in {})",
        detail(&r, "perturbations")["stronger_bound_holds"]
    ))
}

fn criterion_8() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_stoneforge"))
            .args(["selftest", "--seed", "42"])
            .env_remove("STONEFORGE_MAX_BRUTE")
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    if a.status.code() != Some(0) || b.status.code() != Some(0) {
        return Outcome::Fail(format!("selftest exit codes {:?} / {:?}", a.status.code(), b.status.code()));
    }
    if a.stdout != b.stdout {
        return Outcome::Fail("reports differ".into());
    }
    Outcome::Pass(format!("two selftest reports of {} bytes are identical", a.stdout.len()))
}

fn main() -> ExitCode {
    let mut suite = Suite { failures: 0 };
    let minute = Duration::from_secs(60);
    suite.run("1", "kernel word problem vs oracle", minute, criterion_1);
    suite.run("2", "prefix-pair and antichain meet sweep", minute, criterion_2);
    suite.run("3", "independence witnesses", Duration::from_secs(300), criterion_3);
    suite.run("4", "eventually periodic set substrate", minute, criterion_4);
    suite.run("5", "pair algebra vanishing and witnesses", minute, criterion_5);
    suite.run("6a", "thinning on A_n = {2n, 2n+1}", Duration::from_secs(30), criterion_6_literal);
    suite.run("6", "thinning and alternation witness", Duration::from_secs(30), criterion_6);
    suite.run("7", "positive decomposition inequalities", Duration::from_secs(30), criterion_7);
    suite.run("8", "byte-identical selftest reports", Duration::from_secs(600), criterion_8);
    if suite.failures == 0 {
        println!("acceptance: all attainable criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", suite.failures);
        ExitCode::FAILURE
    }
}
