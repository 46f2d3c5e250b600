//! Seeded verification campaigns. Each returns a [`Report`]; the same
//! parameters and seed always give the same report.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::json;

use crate::ep::EpSet;
use crate::measures::{
    alternation_witness, dirac_decomposition, positive_grothendieck_check, rosenthal_thin,
    verify_positive_decomposition, FasMeasure, MeasureError, MeasureFamily,
};
use crate::pair::{mu_eval, wssp_witness, BlockSchema, PairElement};
use crate::report::Report;
use crate::scalar::Scalar;
use crate::separation::{
    check_wssp_witness, independence_meet, Carrier, Element, PresentedAntichain, SeparationWitness,
};
use crate::term::{Conjunction, Dnf};
use crate::tree::{
    brute_force_witness, conjunction_is_zero_mod_kernel, is_zero_mod_kernel, witness_point,
    AntichainOracle, TreeNode,
};

type Q = BigRational;

/// Random instance generators shared by the campaigns and the tests.
pub mod gen {
    use rand::seq::index::sample;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::separation::{BranchSelection, Progression};

    pub type Rng = ChaCha8Rng;

    pub fn rng(seed: u64) -> Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn bits(rng: &mut Rng, len: usize) -> Vec<bool> {
        (0..len).map(|_| rng.random()).collect()
    }

    /// Distinct nodes of depth at most `max_depth`.
    pub fn nodes(rng: &mut Rng, count: usize, max_depth: usize) -> Vec<TreeNode> {
        let all = TreeNode::all_up_to(max_depth);
        sample(rng, all.len(), count.min(all.len())).into_iter().map(|i| all[i]).collect()
    }

    /// A DNF with 1 to `max_conjuncts` conjuncts over at most `max_nodes`
    /// distinct nodes; returns the DNF and the nodes it was drawn from.
    pub fn tree_dnf(
        rng: &mut Rng,
        max_conjuncts: usize,
        max_nodes: usize,
        max_depth: usize,
    ) -> (Dnf<TreeNode>, BTreeSet<TreeNode>) {
        let count = rng.random_range(1..=max_nodes);
        let pool = nodes(rng, count, max_depth);
        let conjuncts: Vec<Conjunction<TreeNode>> = (0..rng.random_range(1..=max_conjuncts))
            .map(|_| {
                let (mut pos, mut neg) = (Vec::new(), Vec::new());
                for &g in &pool {
                    match rng.random_range(0..4) {
                        0 => pos.push(g),
                        1 => neg.push(g),
                        _ => {}
                    }
                }
                Conjunction::new(pos, neg)
            })
            .collect();
        (Dnf::from_conjunctions(conjuncts), pool.into_iter().collect())
    }

    /// Raw `(prefix, pattern)` bits, not canonicalized.
    pub fn raw_ep(rng: &mut Rng) -> (Vec<bool>, Vec<bool>) {
        let prefix_len = rng.random_range(0..=10);
        let pattern_len = rng.random_range(1..=6);
        (bits(rng, prefix_len), bits(rng, pattern_len))
    }

    pub fn raw_contains(raw: &(Vec<bool>, Vec<bool>), n: usize) -> bool {
        let (prefix, pattern) = raw;
        match prefix.get(n) {
            Some(&b) => b,
            None => pattern[(n - prefix.len()) % pattern.len()],
        }
    }

    pub fn ep(rng: &mut Rng) -> EpSet {
        let (prefix, pattern) = raw_ep(rng);
        EpSet::new(prefix, pattern).expect("pattern is non-empty")
    }

    /// Another raw form of the same set: some pattern bits moved into the
    /// prefix and the pattern rotated and repeated.
    pub fn reencode(rng: &mut Rng, raw: &(Vec<bool>, Vec<bool>)) -> (Vec<bool>, Vec<bool>) {
        let (prefix, pattern) = raw;
        let shift = rng.random_range(0..3 * pattern.len());
        let reps = rng.random_range(1..=3);
        let mut new_prefix = prefix.clone();
        new_prefix.extend((0..shift).map(|i| pattern[i % pattern.len()]));
        let new_pattern =
            (0..reps * pattern.len()).map(|i| pattern[(shift + i) % pattern.len()]).collect();
        (new_prefix, new_pattern)
    }

    /// An eventually periodic set that is pair-closed beyond an even prefix.
    pub fn pair_set(rng: &mut Rng) -> (Vec<bool>, Vec<bool>) {
        let prefix_len = 2 * rng.random_range(0..=6);
        let prefix = bits(rng, prefix_len);
        let pairs = rng.random_range(1..=4);
        let pattern = (0..pairs).flat_map(|_| [rng.random::<bool>(); 2]).collect();
        (prefix, pattern)
    }

    pub fn branch(rng: &mut Rng, max_prefix: usize, max_period: usize) -> BranchSelection {
        let prefix_len = rng.random_range(0..=max_prefix);
        let period_len = rng.random_range(1..=max_period);
        let prefix = bits(rng, prefix_len);
        let period = bits(rng, period_len);
        BranchSelection::new(prefix, period, Progression::default()).expect("valid branch")
    }

    /// `count` pairwise distinct branches.
    pub fn distinct_branches(rng: &mut Rng, count: usize) -> Vec<BranchSelection> {
        let mut out: Vec<BranchSelection> = Vec::with_capacity(count);
        while out.len() < count {
            let b = branch(rng, 6, 6);
            if out.iter().all(|o| o.first_difference(&b).is_some()) {
                out.push(b);
            }
        }
        out
    }

    /// A block schema with a non-empty mask.
    pub fn schema(rng: &mut Rng, max_start: usize, max_stride: usize) -> BlockSchema {
        let start = rng.random_range(0..=max_start);
        let stride = rng.random_range(1..=max_stride);
        let width = rng.random_range(1..=stride);
        let mut mask = bits(rng, width);
        let forced = rng.random_range(0..width);
        mask[forced] = true;
        BlockSchema::new(start, stride, mask).expect("width ≤ stride")
    }

    /// A measure family on a block antichain with `|μ_k(A_k)| > ε` for every
    /// `k < horizon`: a heavy atom inside `A_k` plus a few light atoms
    /// anywhere.
    pub fn measure_family(
        rng: &mut Rng,
        eps: &Q,
        horizon: usize,
    ) -> (MeasureFamily<Q>, BlockSchema) {
        let schema = schema(rng, 4, 5);
        let reach = schema.start() + schema.stride() * horizon + 2;
        let measures = (0..horizon)
            .map(|k| loop {
                let members: Vec<usize> = schema.component_elements(k).collect();
                let heavy = members[rng.random_range(0..members.len())];
                let sign = if rng.random() { 1 } else { -1 };
                let magnitude = eps.clone() + Q::from_ratio(rng.random_range(1..=16), 8);
                let mut atoms = vec![(heavy, magnitude * Q::from_int(sign))];
                for _ in 0..rng.random_range(0..=3) {
                    let light = eps.clone() * Q::from_ratio(rng.random_range(-8..=8), 32);
                    atoms.push((rng.random_range(0..reach), light));
                }
                let mu = FasMeasure::new(atoms);
                let diagonal: Q =
                    schema.component_elements(k).map(|i| mu.weight(i)).fold(Q::from_int(0), |a, w| a + w);
                if diagonal.abs() > *eps {
                    break mu;
                }
            })
            .collect();
        (MeasureFamily::Explicit(measures), schema)
    }

    /// A measure with at most three atoms of weight at most `1/100` in
    /// absolute value, below `reach`.
    pub fn small_measure(rng: &mut Rng, reach: usize) -> FasMeasure<Q> {
        let atoms: Vec<(usize, Q)> = (0..rng.random_range(0..=3))
            .map(|_| (rng.random_range(0..reach), Q::from_ratio(rng.random_range(-10..=10), 1000)))
            .collect();
        FasMeasure::new(atoms)
    }
}

/// All eventually periodic branches with `prefix.len() + period.len() ≤
/// max_len`, one representative per sequence.
pub fn small_branches(max_len: usize) -> Vec<crate::separation::BranchSelection> {
    use crate::separation::{BranchSelection, Progression};
    let strings = |len: usize| (0..1usize << len).map(move |v| (0..len).map(|i| v >> i & 1 == 1).collect::<Vec<bool>>());
    let mut out: Vec<BranchSelection> = Vec::new();
    for total in 1..=max_len {
        for period_len in 1..=total {
            for prefix in strings(total - period_len) {
                for period in strings(period_len) {
                    let b = BranchSelection::new(prefix.clone(), period, Progression::default())
                        .expect("valid branch");
                    if out.iter().all(|o| o.first_difference(&b).is_some()) {
                        out.push(b);
                    }
                }
            }
        }
    }
    out
}

/// Decision procedure against the brute-force oracle: every single-conjunct
/// DNF over the nodes of depth at most `exhaustive_depth`, then `samples`
/// random DNFs.
pub fn kernel_equivalence(seed: u64, exhaustive_depth: usize, samples: usize, bound: usize) -> Report {
    let inputs = json!({"seed": seed, "exhaustive_depth": exhaustive_depth, "samples": samples, "bound": bound});
    let mut report = Report::new("kernel-check", &inputs);

    let universe: BTreeSet<TreeNode> = TreeNode::all_up_to(exhaustive_depth).into_iter().collect();
    match AntichainOracle::new(&universe, bound) {
        Err(e) => report.check("exhaustive", false, json!({"error": e.to_string()})),
        Ok(oracle) => {
            let nodes = oracle.generators().to_vec();
            let total = 3usize.pow(nodes.len() as u32);
            let (mut zero, mut mismatches, mut first) = (0usize, 0usize, None);
            for code in 0..total {
                let (mut pos, mut neg, mut rest) = (0u64, 0u64, code);
                for i in 0..nodes.len() {
                    match rest % 3 {
                        1 => pos |= 1 << i,
                        2 => neg |= 1 << i,
                        _ => {}
                    }
                    rest /= 3;
                }
                let pick = |m: u64| (0..nodes.len()).filter(move |i| m >> i & 1 == 1).map(|i| nodes[i]);
                let d = Dnf::from(Conjunction::new(pick(pos), pick(neg)));
                let decided = is_zero_mod_kernel(&d);
                let oracle_zero = oracle.search(&[(pos, neg)]).is_none();
                zero += decided as usize;
                if decided != oracle_zero {
                    mismatches += 1;
                    first.get_or_insert_with(|| serde_json::to_value(&d).expect("serializable"));
                }
            }
            report.check(
                "exhaustive",
                mismatches == 0,
                json!({"conjunctions": total, "zero": zero, "mismatches": mismatches, "first_mismatch": first}),
            );
        }
    }

    let mut rng = gen::rng(seed);
    let (mut zero, mut mismatches, mut bad_witness, mut errors, mut first) = (0usize, 0usize, 0usize, 0usize, None);
    for _ in 0..samples {
        let (d, pool) = gen::tree_dnf(&mut rng, 3, 6, 4);
        let decided = is_zero_mod_kernel(&d);
        match brute_force_witness(&d, &pool, bound) {
            Err(_) => errors += 1,
            Ok(w) => {
                zero += decided as usize;
                if decided != w.is_none() {
                    mismatches += 1;
                    first.get_or_insert_with(|| serde_json::to_value(&d).expect("serializable"));
                }
                if let Some(point) = w {
                    let decision_point = d
                        .conjuncts()
                        .find(|c| !conjunction_is_zero_mod_kernel(c))
                        .and_then(|c| witness_point(c).ok());
                    let sound = point.evaluate(&d) && decision_point.is_some_and(|p| p.evaluate(&d));
                    bad_witness += !sound as usize;
                }
            }
        }
    }
    report.check(
        "random",
        mismatches == 0 && bad_witness == 0 && errors == 0,
        json!({"samples": samples, "zero": zero, "mismatches": mismatches, "bad_witnesses": bad_witness,
               "oracle_errors": errors, "first_mismatch": first}),
    );
    report
}

fn antichains_up_to(nodes: &[TreeNode], max_size: usize) -> Vec<Vec<TreeNode>> {
    fn extend(nodes: &[TreeNode], from: usize, max_size: usize, current: &mut Vec<TreeNode>, out: &mut Vec<Vec<TreeNode>>) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        if current.len() == max_size {
            return;
        }
        for i in from..nodes.len() {
            if current.iter().all(|c| !c.is_comparable(&nodes[i])) {
                current.push(nodes[i]);
                extend(nodes, i + 1, max_size, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(nodes, 0, max_size, &mut Vec::new(), &mut out);
    out
}

/// Exhaustive check that `A_s ∧ A_t` vanishes for every proper prefix pair
/// and that every antichain meet is nonzero with a valid point.
pub fn star_sweep(max_depth: usize, max_size: usize, bound: usize) -> Report {
    let inputs = json!({"max_depth": max_depth, "max_size": max_size, "bound": bound});
    let mut report = Report::new("star-sweep", &inputs);
    let nodes = TreeNode::all_up_to(max_depth);

    let (mut pairs, mut failures, mut first) = (0usize, 0usize, None);
    for s in &nodes {
        for t in nodes.iter().filter(|t| s.is_proper_prefix_of(t)) {
            pairs += 1;
            let d: Dnf<TreeNode> = Conjunction::new([*s, *t], []).into();
            let gens = BTreeSet::from([*s, *t]);
            let oracle_zero = brute_force_witness(&d, &gens, bound).map(|w| w.is_none()).unwrap_or(false);
            if !(is_zero_mod_kernel(&d) && oracle_zero) {
                failures += 1;
                first.get_or_insert_with(|| json!([s.to_string(), t.to_string()]));
            }
        }
    }
    report.check("proper-prefix-pairs-vanish", failures == 0, json!({"pairs": pairs, "failures": failures, "first_failure": first}));

    let sets = antichains_up_to(&nodes, max_size);
    let mut by_size = vec![0usize; max_size + 1];
    let (mut failures, mut first) = (0usize, None);
    for u in &sets {
        by_size[u.len()] += 1;
        let c = Conjunction::new(u.iter().copied(), []);
        let d: Dnf<TreeNode> = c.clone().into();
        let gens: BTreeSet<TreeNode> = u.iter().copied().collect();
        let ok = !is_zero_mod_kernel(&d)
            && witness_point(&c).is_ok_and(|p| p.satisfies(&c) && p.nodes() == &gens)
            && brute_force_witness(&d, &gens, bound).is_ok_and(|w| w.is_some());
        if !ok {
            failures += 1;
            first.get_or_insert_with(|| json!(u.iter().map(ToString::to_string).collect::<Vec<_>>()));
        }
    }
    report.check(
        "antichain-meets-nonzero",
        failures == 0,
        json!({"sets": sets.len(), "by_size": &by_size[1..], "failures": failures, "first_failure": first}),
    );
    report
}

/// The independence construction on every triple of small branches and on
/// random families of five.
pub fn independence_sweep(seed: u64, max_len: usize, random_cases: usize, bound: usize) -> Report {
    let inputs = json!({"seed": seed, "max_len": max_len, "random_cases": random_cases, "bound": bound});
    let mut report = Report::new("independence", &inputs);

    let run = |branches: &[crate::separation::BranchSelection]| -> (usize, usize, Option<serde_json::Value>) {
        let n = branches.len();
        let (mut cases, mut failures, mut first) = (0, 0, None);
        for split in 0..1usize << n {
            cases += 1;
            let f: BTreeSet<usize> = (0..n).filter(|i| split >> i & 1 == 1).collect();
            let ok = independence_meet(branches, &f, bound).is_ok_and(|r| r.verified);
            if !ok {
                failures += 1;
                first.get_or_insert_with(|| json!({"branches": branches, "split": f}));
            }
        }
        (cases, failures, first)
    };

    let small = small_branches(max_len);
    let (mut cases, mut failures, mut first) = (0usize, 0usize, None);
    let mut triples = 0usize;
    for i in 0..small.len() {
        for j in i + 1..small.len() {
            for k in j + 1..small.len() {
                triples += 1;
                let (c, f, x) = run(&[small[i].clone(), small[j].clone(), small[k].clone()]);
                cases += c;
                failures += f;
                if first.is_none() {
                    first = x;
                }
            }
        }
    }
    report.check(
        "exhaustive-triples",
        failures == 0,
        json!({"branches": small.len(), "triples": triples, "cases": cases, "failures": failures, "first_failure": first}),
    );

    let mut rng = gen::rng(seed);
    let (mut cases, mut failures, mut first) = (0usize, 0usize, None);
    for _ in 0..random_cases {
        let branches = gen::distinct_branches(&mut rng, 5);
        let (c, f, x) = run(&branches);
        cases += c;
        failures += f;
        if first.is_none() {
            first = x;
        }
    }
    report.check(
        "random-five",
        failures == 0,
        json!({"families": random_cases, "cases": cases, "failures": failures, "first_failure": first}),
    );
    report
}

/// Boolean-algebra laws, membership against the raw representation, and the
/// window equality criterion.
pub fn ep_laws(seed: u64, triples: usize, memberships: usize, pairs: usize) -> Report {
    let inputs = json!({"seed": seed, "triples": triples, "memberships": memberships, "pairs": pairs});
    let mut report = Report::new("ep-laws", &inputs);
    let mut rng = gen::rng(seed);

    type Law = fn(&EpSet, &EpSet, &EpSet) -> bool;
    let laws: [(&str, Law); 10] = [
        ("union-associative", |a, b, c| a.union(&b.union(c)) == a.union(b).union(c)),
        ("intersection-associative", |a, b, c| a.intersection(&b.intersection(c)) == a.intersection(b).intersection(c)),
        ("union-commutative", |a, b, _| a.union(b) == b.union(a)),
        ("intersection-commutative", |a, b, _| a.intersection(b) == b.intersection(a)),
        ("distributive-meet-over-join", |a, b, c| a.intersection(&b.union(c)) == a.intersection(b).union(&a.intersection(c))),
        ("distributive-join-over-meet", |a, b, c| a.union(&b.intersection(c)) == a.union(b).intersection(&a.union(c))),
        ("absorption", |a, b, _| a.union(&a.intersection(b)) == *a && a.intersection(&a.union(b)) == *a),
        ("de-morgan", |a, b, _| {
            a.union(b).complement() == a.complement().intersection(&b.complement())
                && a.intersection(b).complement() == a.complement().union(&b.complement())
        }),
        ("complement", |a, _, _| {
            a.union(&a.complement()) == EpSet::full()
                && a.intersection(&a.complement()).is_empty()
                && a.complement().complement() == *a
        }),
        ("difference", |a, b, _| a.difference(b) == a.intersection(&b.complement())),
    ];
    let mut failures = vec![0usize; laws.len()];
    let mut pointwise_failures = 0usize;
    for _ in 0..triples {
        let (ra, rb, rc) = (gen::raw_ep(&mut rng), gen::raw_ep(&mut rng), gen::raw_ep(&mut rng));
        let canon = |r: &(Vec<bool>, Vec<bool>)| EpSet::new(r.0.clone(), r.1.clone()).expect("non-empty pattern");
        let (a, b, c) = (canon(&ra), canon(&rb), canon(&rc));
        for (slot, (_, law)) in failures.iter_mut().zip(&laws) {
            *slot += !law(&a, &b, &c) as usize;
        }
        let (u, i, n) = (a.union(&b), a.intersection(&b), a.complement());
        let window = 2 * (ra.0.len() + rb.0.len() + ra.1.len() * rb.1.len()) + 8;
        let pointwise = (0..window).all(|x| {
            let (ina, inb) = (gen::raw_contains(&ra, x), gen::raw_contains(&rb, x));
            u.contains(x) == (ina || inb) && i.contains(x) == (ina && inb) && n.contains(x) == !ina
        });
        pointwise_failures += !pointwise as usize;
    }
    for ((name, _), f) in laws.iter().zip(&failures) {
        report.check(&format!("law.{name}"), *f == 0, json!({"triples": triples, "failures": f}));
    }
    report.check("law.pointwise-operations", pointwise_failures == 0, json!({"triples": triples, "failures": pointwise_failures}));

    let (mut failures, mut checked) = (0usize, 0usize);
    while checked < memberships {
        let raw = gen::raw_ep(&mut rng);
        let set = EpSet::new(raw.0.clone(), raw.1.clone()).expect("non-empty pattern");
        for _ in 0..10 {
            let n = rand::Rng::random_range(&mut rng, 0..200);
            failures += (set.contains(n) != gen::raw_contains(&raw, n)) as usize;
            checked += 1;
        }
    }
    report.check("membership-vs-unrolled", failures == 0, json!({"checks": checked, "failures": failures}));

    let (mut failures, mut equal) = (0usize, 0usize);
    for k in 0..pairs {
        let ra = gen::raw_ep(&mut rng);
        let rb = if k % 2 == 0 { gen::reencode(&mut rng, &ra) } else { gen::raw_ep(&mut rng) };
        let a = EpSet::new(ra.0.clone(), ra.1.clone()).expect("non-empty pattern");
        let b = EpSet::new(rb.0.clone(), rb.1.clone()).expect("non-empty pattern");
        let long = 4 * (ra.0.len() + rb.0.len() + ra.1.len() * rb.1.len()) + 16;
        let unrolled = (0..long).all(|x| gen::raw_contains(&ra, x) == gen::raw_contains(&rb, x));
        equal += unrolled as usize;
        let agree = a.agrees_on_window(&b);
        failures += !(agree == (a == b) && agree == unrolled) as usize;
    }
    report.check("equality-window", failures == 0, json!({"pairs": pairs, "equal": equal, "failures": failures}));
    report
}

/// The schemas the pair campaigns always include.
pub fn standard_schemas() -> Vec<BlockSchema> {
    vec![
        BlockSchema::full(0, 4, 2).expect("valid"),
        BlockSchema::full(0, 4, 1).expect("valid"),
        BlockSchema::full(0, 1, 1).expect("valid"),
    ]
}

/// μ-vanishing on random pair-algebra elements and separation witnesses on
/// block antichains.
pub fn pair_campaign(seed: u64, elements: usize, random_schemas: usize, horizons: &[usize]) -> Report {
    let inputs = json!({"seed": seed, "elements": elements, "random_schemas": random_schemas, "horizons": horizons});
    let mut report = Report::new("pair-demo", &inputs);
    let mut rng = gen::rng(seed);

    let (mut failures, mut max_vanish, mut first) = (0usize, 0usize, None);
    for _ in 0..elements {
        let raw = gen::pair_set(&mut rng);
        let set = EpSet::new(raw.0.clone(), raw.1.clone()).expect("non-empty pattern");
        let Ok(e) = PairElement::new(set.clone()) else {
            failures += 1;
            continue;
        };
        let v = e.vanish_index();
        max_vanish = max_vanish.max(v);
        let window = 2 * (raw.0.len() + raw.1.len()) + 4;
        let last_unpaired = (0..window)
            .filter(|&k| gen::raw_contains(&raw, 2 * k) != gen::raw_contains(&raw, 2 * k + 1))
            .max();
        let oracle_vanish = last_unpaired.map_or(0, |k| k + 1);
        let end = v.max(set.threshold().div_ceil(2)) + set.period() + 1;
        let vanishes = (v..end).all(|n| mu_eval::<Q>(n, &e).is_zero());
        let ok = vanishes && e.verify_certificate() && v == oracle_vanish;
        if !ok {
            failures += 1;
            first.get_or_insert_with(|| json!({"set": set, "vanish_index": v, "oracle": oracle_vanish}));
        }
    }
    report.check(
        "mu-vanishes-beyond-index",
        failures == 0,
        json!({"elements": elements, "max_vanish_index": max_vanish, "failures": failures, "first_failure": first}),
    );

    let mut schemas = standard_schemas();
    schemas.extend((0..random_schemas).map(|_| gen::schema(&mut rng, 8, 6)));
    for &h in horizons {
        let (mut failures, mut first) = (0usize, None);
        for schema in &schemas {
            let ok = PresentedAntichain::blocks(Carrier::PairAlgebra, schema.clone())
                .ok()
                .and_then(|ac| wssp_witness(&ac).ok().map(|w| (ac, w)))
                .is_some_and(|(ac, w)| check_wssp_witness(&ac, &w, h).unwrap_or(false));
            if !ok {
                failures += 1;
                first.get_or_insert_with(|| json!(schema));
            }
        }
        report.check(
            &format!("wssp-witness.horizon-{h:04}"),
            failures == 0,
            json!({"schemas": schemas.len(), "failures": failures, "first_failure": first}),
        );
    }
    report
}

fn q_str(x: &Q) -> String {
    x.to_string()
}

/// Recomputes cross-sums by direct per-atom summation over explicit member
/// lists; also checks that no rejected index could be added afterwards.
fn independent_thinning_check(
    fam: &MeasureFamily<Q>,
    members: &dyn Fn(usize) -> Vec<usize>,
    eps: &Q,
    horizon: usize,
    selected: &[usize],
    reported: &[Q],
) -> bool {
    let bound = eps.clone() / Q::from_int(3);
    let cross = |k: usize, n: usize| -> Q {
        let mu = fam.measure(k).expect("index presented");
        let mut sum = Q::from_int(0);
        for x in members(n) {
            for (&i, w) in mu.atoms() {
                if i == x {
                    sum += w.clone();
                }
            }
        }
        sum.abs()
    };
    let sum_over = |k: usize, set: &[usize]| -> Q {
        set.iter().filter(|&&n| n != k).fold(Q::from_int(0), |a, &n| a + cross(k, n))
    };
    let sums_ok = selected.len() == reported.len()
        && selected.iter().zip(reported).all(|(&k, r)| {
            let s = sum_over(k, selected);
            s == *r && s < bound
        });
    let maximal = (0..horizon).filter(|c| !selected.contains(c)).all(|c| {
        let mut grown = selected.to_vec();
        grown.push(c);
        grown.iter().any(|&k| sum_over(k, &grown) >= bound)
    });
    sums_ok && maximal
}

fn independent_alternation_check(
    fam: &MeasureFamily<Q>,
    members: &dyn Fn(usize) -> Vec<usize>,
    eps: &Q,
    selected: &[usize],
    values: &[Q],
) -> bool {
    let union: BTreeSet<usize> = selected.iter().step_by(2).flat_map(|&n| members(n)).collect();
    let third = eps.clone() / Q::from_int(3);
    selected.iter().zip(values).enumerate().all(|(pos, (&k, v))| {
        let mu = fam.measure(k).expect("index presented");
        let direct = mu.atoms().iter().filter(|(i, _)| union.contains(i)).fold(Q::from_int(0), |a, (_, w)| a + w.clone());
        let size = direct.abs();
        direct == *v && if pos % 2 == 0 { size > third.clone() + third.clone() } else { size < third }
    })
}

/// Thinning and the alternation witness on the pair-difference family and on
/// random families.
pub fn thinning_campaign(seed: u64, families: usize) -> Report {
    let inputs = json!({"seed": seed, "families": families});
    let mut report = Report::new("thinning", &inputs);
    let eps = Q::from_ratio(1, 2);
    let horizon = 20;
    let fam = MeasureFamily::<Q>::PairDifference;

    // The literal pairing A_n = {2n, 2n+1} gives μ_n(A_n) = 0.
    let pairs = PresentedAntichain::blocks(Carrier::PowerSet, BlockSchema::full(0, 2, 2).expect("valid"))
        .expect("power-set blocks");
    let literal = rosenthal_thin(&fam, &pairs, &eps, horizon);
    let outcome = match &literal {
        Ok(_) => "accepted".to_string(),
        Err(e) => e.to_string(),
    };
    report.check(
        "pair-family.pairs-rejected",
        matches!(&literal, Err(MeasureError::HypothesisViolation { index: 0, value }) if value == "0"),
        json!({"antichain": "A_n = {2n, 2n+1}", "outcome": outcome}),
    );

    let singles = BlockSchema::full(0, 2, 1).expect("valid");
    let ac = PresentedAntichain::blocks(Carrier::PowerSet, singles.clone()).expect("power-set blocks");
    let members = |n: usize| singles.component_elements(n).collect::<Vec<_>>();
    match rosenthal_thin(&fam, &ac, &eps, horizon) {
        Err(e) => report.check("pair-family.thinning", false, json!({"error": e.to_string()})),
        Ok(t) => {
            let all = t.selected == (0..horizon).collect::<Vec<_>>();
            let zero = t.cross_sums.iter().all(|s| s.is_zero());
            let verified = independent_thinning_check(&fam, &members, &eps, horizon, &t.selected, &t.cross_sums);
            report.check(
                "pair-family.thinning",
                all && zero && verified,
                json!({"antichain": "A_n = {2n}", "selected": t.selected.len(), "all_cross_sums_zero": zero, "bound": q_str(&t.bound)}),
            );
            match alternation_witness(&fam, &ac, &eps, &t.selected) {
                Err(e) => report.check("pair-family.alternation", false, json!({"error": e.to_string()})),
                Ok((_, r)) => {
                    let expected = r.rows.iter().all(|row| {
                        row.value == Q::from_int(if row.position % 2 == 0 { 1 } else { 0 })
                    });
                    let values: Vec<Q> = r.rows.iter().map(|row| row.value.clone()).collect();
                    let verified = independent_alternation_check(&fam, &members, &eps, &t.selected, &values);
                    report.check(
                        "pair-family.alternation",
                        expected && verified && r.lower == Q::from_ratio(1, 3) && r.upper == Q::from_ratio(1, 6),
                        json!({"even_value": "1", "odd_value": "0", "lower": q_str(&r.lower),
                               "upper": q_str(&r.upper), "gap": q_str(&r.gap)}),
                    );
                }
            }
        }
    }

    // μ_k = δ_{2k} − δ_{2k+1} + 2^{-k} δ_0
    let tilted = MeasureFamily::Explicit(
        (0..12)
            .map(|k| &FasMeasure::pair_difference(k) + &FasMeasure::new([(0, Q::from_ratio(1, 1 << k))]))
            .collect(),
    );
    match rosenthal_thin(&tilted, &ac, &eps, 12) {
        Err(e) => report.check("tilted-family.thinning", false, json!({"error": e.to_string()})),
        Ok(t) => {
            let verified = independent_thinning_check(&tilted, &members, &eps, 12, &t.selected, &t.cross_sums);
            let alternation = alternation_witness(&tilted, &ac, &eps, &t.selected).is_ok();
            report.check(
                "tilted-family.thinning",
                verified && alternation,
                json!({"selected": t.selected, "cross_sums": t.cross_sums.iter().map(q_str).collect::<Vec<_>>()}),
            );
        }
    }

    let mut rng = gen::rng(seed);
    let (mut failures, mut selected_total, mut first) = (0usize, 0usize, None);
    for case in 0..families {
        let h = rand::Rng::random_range(&mut rng, 6..=16);
        let (fam, schema) = gen::measure_family(&mut rng, &eps, h);
        let ac = PresentedAntichain::blocks(Carrier::PowerSet, schema.clone()).expect("power-set blocks");
        let members = |n: usize| schema.component_elements(n).collect::<Vec<_>>();
        let ok = match rosenthal_thin(&fam, &ac, &eps, h) {
            Err(_) => false,
            Ok(t) => {
                selected_total += t.selected.len();
                independent_thinning_check(&fam, &members, &eps, h, &t.selected, &t.cross_sums)
                    && alternation_witness(&fam, &ac, &eps, &t.selected).is_ok_and(|(_, r)| {
                        let values: Vec<Q> = r.rows.iter().map(|row| row.value.clone()).collect();
                        independent_alternation_check(&fam, &members, &eps, &t.selected, &values)
                            && r.gap >= eps.clone() / Q::from_int(3)
                    })
            }
        };
        if !ok {
            failures += 1;
            first.get_or_insert(case);
        }
    }
    report.check(
        "random-families",
        failures == 0,
        json!({"families": families, "selected_total": selected_total, "failures": failures, "first_failure": first}),
    );
    report
}

/// The inequalities for the Dirac decomposition and small perturbations of it.
pub fn grothendieck_campaign(seed: u64, perturbations: usize) -> Report {
    let inputs = json!({"seed": seed, "perturbations": perturbations});
    let mut report = Report::new("grothendieck", &inputs);
    let horizon = 24;
    let witness = SeparationWitness::new(
        Element::Set(EpSet::progression(0, 4).expect("valid")),
        Carrier::PowerSet,
        EpSet::progression(0, 2).expect("valid"),
        EpSet::progression(1, 2).expect("valid"),
    )
    .expect("disjoint infinite index sets");

    let base = dirac_decomposition::<Q>(horizon, |_| FasMeasure::zero());
    let decomposed = verify_positive_decomposition(&base, horizon);
    let checked = positive_grothendieck_check(&base, &witness, horizon);
    let detail = match &checked {
        Ok(r) => json!({
            "decomposition": decomposed.is_ok(),
            "rows": r.rows.len(),
            "m1_value": r.rows.iter().find(|x| x.below).map(|x| q_str(&x.value)),
            "m1_bound": r.rows.iter().find(|x| x.below).map(|x| q_str(&x.bound)),
            "m0_value": r.rows.iter().find(|x| !x.below).map(|x| q_str(&x.value)),
            "m0_bound": r.rows.iter().find(|x| !x.below).map(|x| q_str(&x.bound)),
            "stronger_bound_holds": r.stronger_bound,
        }),
        Err(e) => json!({"error": e.to_string()}),
    };
    report.check("base", decomposed.is_ok() && checked.as_ref().is_ok_and(|r| r.passed), detail);

    let mut rng = gen::rng(seed);
    let (mut failures, mut stronger, mut first) = (0usize, 0usize, None);
    for case in 0..perturbations {
        let perturbed: Vec<FasMeasure<Q>> = (0..horizon).map(|_| gen::small_measure(&mut rng, 4 * horizon)).collect();
        let d = dirac_decomposition::<Q>(horizon, |n| perturbed[n].clone());
        let ok = verify_positive_decomposition(&d, horizon).is_ok()
            && positive_grothendieck_check(&d, &witness, horizon).is_ok_and(|r| {
                stronger += r.stronger_bound as usize;
                r.passed
            });
        if !ok {
            failures += 1;
            first.get_or_insert(case);
        }
    }
    report.check(
        "perturbations",
        failures == 0,
        json!({"cases": perturbations, "stronger_bound_holds": stronger, "failures": failures, "first_failure": first}),
    );
    report
}

/// Every campaign at its acceptance size.
pub fn selftest(seed: u64, bound: usize) -> Report {
    let inputs = json!({"seed": seed, "bound": bound});
    Report::merge(
        "selftest",
        &inputs,
        vec![
            kernel_equivalence(seed, 3, 10_000, bound),
            star_sweep(4, 4, bound),
            independence_sweep(seed, 4, 200, bound),
            ep_laws(seed, 10_000, 100_000, 10_000),
            pair_campaign(seed, 1_000, 20, &[10, 100, 1_000]),
            thinning_campaign(seed, 100),
            grothendieck_campaign(seed, 50),
        ],
    )
}
