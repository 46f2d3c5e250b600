//! Command-line front end. Exit codes: 0 when every check passes, 1 when a
//! check fails (the JSON report is still written), 2 for usage errors and
//! malformed input.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::json;

use crate::campaign;
use crate::ep::EpSet;
use crate::measures::{alternation_witness, rosenthal_thin, MeasureError, MeasureFamily};
use crate::pair::{mu_eval, BlockSchema, PairElement};
use crate::report::Report;
use crate::separation::{independence_meet, BranchSelection, Carrier, PresentedAntichain};
use crate::term::{Dnf, Term};
use crate::tree::{brute_force_witness, is_zero_mod_kernel, witness_point, TreeNode, DEFAULT_BRUTE_BOUND};

/// Environment variable bounding brute-force generator counts.
pub const BRUTE_ENV: &str = "STONEFORGE_MAX_BRUTE";

#[derive(Debug, Parser)]
#[command(name = "stoneforge", version, about = "Exact verification campaigns for tree-quotient Boolean algebras, separation witnesses and finitely additive measures")]
struct Cli {
    /// Seed for randomized campaigns.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Print a text table instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    /// Include the wall-clock runtime in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether a DNF over tree nodes is zero modulo the prefix kernel;
    /// without --dnf, run the decision-versus-oracle campaign.
    KernelCheck(KernelCheck),
    /// Exhaustively check proper-prefix meets vanish and antichain meets do not.
    StarSweep(StarSweep),
    /// Build and verify independence witnesses for branches.
    Independence(Independence),
    /// Pair-algebra μ table and separation witnesses for block antichains.
    PairDemo(PairDemo),
    /// Thinning, alternation witnesses and positive-decomposition inequalities.
    Grothendieck(Grothendieck),
    /// Boolean-algebra laws and membership for eventually periodic sets.
    EpLaws(EpLaws),
    /// Run every campaign at acceptance size.
    Selftest,
}

#[derive(Debug, Args)]
struct KernelCheck {
    /// JSON DNF (list of {"U","V"}) or term ({"op",...}).
    #[arg(long)]
    dnf: Option<PathBuf>,
    /// Cross-check the decision with the brute-force oracle.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = 3)]
    exhaustive_depth: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
}

#[derive(Debug, Args)]
struct StarSweep {
    #[arg(long, default_value_t = 4)]
    max_depth: usize,
    #[arg(long, default_value_t = 4)]
    max_size: usize,
}

#[derive(Debug, Args)]
struct Independence {
    /// JSON list of branches.
    #[arg(long)]
    branches: Option<PathBuf>,
    /// JSON list of branch indices in F.
    #[arg(long)]
    split: Option<PathBuf>,
    /// Check every split of the given branches.
    #[arg(long)]
    all_splits: bool,
    #[arg(long, default_value_t = 4)]
    max_len: usize,
    #[arg(long, default_value_t = 200)]
    random_cases: usize,
}

#[derive(Debug, Args)]
struct PairDemo {
    /// Horizon for the witness checks; defaults to 10, 100 and 1000.
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, default_value_t = 1_000)]
    elements: usize,
    /// Number of corpus elements shown in the μ table.
    #[arg(long, default_value_t = 8)]
    table: usize,
}

#[derive(Debug, Args)]
struct Grothendieck {
    /// JSON measure family: "pair-difference" or {"explicit":[measure,...]}.
    #[arg(long, requires = "antichain")]
    family: Option<PathBuf>,
    /// JSON antichain: {"blocks":{start,stride,width}} or {"sets":[...]}.
    #[arg(long, requires = "family")]
    antichain: Option<PathBuf>,
    #[arg(long, default_value = "1/2")]
    epsilon: String,
    #[arg(long, default_value_t = 20)]
    horizon: usize,
    #[arg(long, default_value_t = 100)]
    families: usize,
    #[arg(long, default_value_t = 50)]
    perturbations: usize,
}

#[derive(Debug, Args)]
struct EpLaws {
    #[arg(long, default_value_t = 10_000)]
    triples: usize,
    #[arg(long, default_value_t = 100_000)]
    memberships: usize,
    #[arg(long, default_value_t = 10_000)]
    pairs: usize,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum AntichainInput {
    Blocks(BlockSchema),
    Sets(Vec<EpSet>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum KernelInput {
    Dnf(Dnf<TreeNode>),
    Term(Term<TreeNode>),
}

/// A failure that maps to exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<(T, String), InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let value = serde_json::from_str(&text)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    Ok((value, text))
}

fn brute_bound() -> Result<usize, InputError> {
    match std::env::var(BRUTE_ENV) {
        Err(_) => Ok(DEFAULT_BRUTE_BOUND),
        Ok(v) => v.trim().parse().map_err(|_| InputError(format!("{BRUTE_ENV}: `{v}` is not a count"))),
    }
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let started = Instant::now();
    let mut report = match dispatch(&cli) {
        Ok(r) => r,
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    if cli.timing {
        report.runtime_ms = Some(started.elapsed().as_millis() as u64);
    }
    let text = if cli.human { report.to_human() } else { report.to_json() + "\n" };
    let _ = out.write_all(text.as_bytes());
    if report.passed {
        0
    } else {
        1
    }
}

fn dispatch(cli: &Cli) -> Result<Report, InputError> {
    let seed = cli.seed;
    let bound = brute_bound()?;
    Ok(match &cli.command {
        Command::KernelCheck(k) => match &k.dnf {
            None => campaign::kernel_equivalence(seed, k.exhaustive_depth, k.samples, bound),
            Some(path) => kernel_check_file(path, k.oracle, bound)?,
        },
        Command::StarSweep(s) => campaign::star_sweep(s.max_depth, s.max_size, bound),
        Command::Independence(i) => match &i.branches {
            None => campaign::independence_sweep(seed, i.max_len, i.random_cases, bound),
            Some(path) => independence_file(path, i.split.as_deref(), i.all_splits, bound)?,
        },
        Command::PairDemo(p) => pair_demo(seed, p),
        Command::Grothendieck(g) => match (&g.family, &g.antichain) {
            (Some(f), Some(a)) => grothendieck_files(f, a, &g.epsilon, g.horizon)?,
            _ => Report::merge(
                "grothendieck",
                &json!({"seed": seed, "families": g.families, "perturbations": g.perturbations}),
                vec![
                    campaign::thinning_campaign(seed, g.families),
                    campaign::grothendieck_campaign(seed, g.perturbations),
                ],
            ),
        },
        Command::EpLaws(e) => campaign::ep_laws(seed, e.triples, e.memberships, e.pairs),
        Command::Selftest => campaign::selftest(seed, bound),
    })
}

fn kernel_check_file(path: &Path, oracle: bool, bound: usize) -> Result<Report, InputError> {
    let (input, text) = read_json::<KernelInput>(path)?;
    let d = match input {
        KernelInput::Dnf(d) => d,
        KernelInput::Term(t) => t.to_dnf(),
    };
    let mut report = Report::new("kernel-check", &json!({"dnf": text, "oracle": oracle, "bound": bound}));
    let zero = is_zero_mod_kernel(&d);
    let witness = d.conjuncts().find_map(|c| witness_point(c).ok());
    report.check("decision", true, json!({"dnf": d, "zero": zero, "witness": witness}));
    if oracle {
        let w = brute_force_witness(&d, &d.generators(), bound)?;
        report.check("oracle-agrees", w.is_none() == zero, json!({"zero": w.is_none(), "witness": w}));
    }
    Ok(report)
}

fn independence_file(
    path: &Path,
    split: Option<&Path>,
    all_splits: bool,
    bound: usize,
) -> Result<Report, InputError> {
    let (branches, text) = read_json::<Vec<BranchSelection>>(path)?;
    let splits: Vec<BTreeSet<usize>> = match (all_splits, split) {
        (true, _) => {
            if branches.len() > 16 {
                return Err(InputError("--all-splits supports at most 16 branches".into()));
            }
            (0..1usize << branches.len())
                .map(|m| (0..branches.len()).filter(|i| m >> i & 1 == 1).collect())
                .collect()
        }
        (false, Some(p)) => vec![read_json::<BTreeSet<usize>>(p)?.0],
        (false, None) => return Err(InputError("give --split F.json or --all-splits".into())),
    };
    let mut report = Report::new(
        "independence",
        &json!({"branches": text, "splits": splits, "bound": bound}),
    );
    for f in splits {
        let r = independence_meet(&branches, &f, bound)?;
        let id = format!(
            "split-{}",
            (0..branches.len()).map(|i| if f.contains(&i) { '1' } else { '0' }).collect::<String>()
        );
        report.check(&id, r.verified, serde_json::to_value(&r)?);
    }
    Ok(report)
}

fn pair_demo(seed: u64, p: &PairDemo) -> Report {
    let horizons = p.horizon.map_or_else(|| vec![10, 100, 1_000], |h| vec![h]);
    let mut report = campaign::pair_campaign(seed, p.elements, 20, &horizons);
    let mut rng = campaign::gen::rng(seed);
    let rows: Vec<serde_json::Value> = (0..p.table.min(p.elements))
        .map(|_| {
            let raw = campaign::gen::pair_set(&mut rng);
            let set = EpSet::new(raw.0, raw.1).expect("non-empty pattern");
            let e = PairElement::new(set.clone()).expect("pair-closed beyond an even prefix");
            let shown = e.vanish_index().max(4) + 2;
            let mu: Vec<i64> = (0..shown).map(|n| mu_eval::<f64>(n, &e) as i64).collect();
            json!({"set": set, "vanish_index": e.vanish_index(), "mu": mu})
        })
        .collect();
    report.check("mu-table", true, json!(rows));
    report
}

fn grothendieck_files(family: &Path, antichain: &Path, epsilon: &str, horizon: usize) -> Result<Report, InputError> {
    let (fam, fam_text) = read_json::<MeasureFamily<BigRational>>(family)?;
    let (ac, ac_text) = read_json::<AntichainInput>(antichain)?;
    let eps: BigRational = epsilon
        .parse()
        .map_err(|_| InputError(format!("--epsilon: `{epsilon}` is not a rational p/q")))?;
    let ac = match ac {
        AntichainInput::Blocks(s) => PresentedAntichain::blocks(Carrier::PowerSet, s)?,
        AntichainInput::Sets(v) => PresentedAntichain::set_list(Carrier::PowerSet, v)?,
    };
    let mut report = Report::new(
        "grothendieck",
        &json!({"family": fam_text, "antichain": ac_text, "epsilon": eps.to_string(), "horizon": horizon}),
    );
    let thinning = match rosenthal_thin(&fam, &ac, &eps, horizon) {
        Err(MeasureError::IndexNotPresented(n)) => {
            return Err(InputError(format!("index {n} is not presented; lower --horizon")))
        }
        Err(MeasureError::Separation(e)) => return Err(InputError(e.to_string())),
        Err(e) => {
            report.check("thinning", false, json!({"error": e.to_string()}));
            return Ok(report);
        }
        Ok(t) => t,
    };
    report.check(
        "thinning",
        true,
        json!({
            "selected": thinning.selected,
            "cross_sums": thinning.cross_sums.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "bound": thinning.bound.to_string(),
        }),
    );
    match alternation_witness(&fam, &ac, &eps, &thinning.selected) {
        Err(e) => report.check("alternation", false, json!({"error": e.to_string()})),
        Ok((a, r)) => report.check(
            "alternation",
            r.rows.iter().all(|row| row.holds),
            json!({
                "union": a,
                "values": r.rows.iter().map(|row| json!([row.index, row.value.to_string()])).collect::<Vec<_>>(),
                "lower": r.lower.to_string(),
                "upper": r.upper.to_string(),
                "gap": r.gap.to_string(),
            }),
        ),
    }
    Ok(report)
}
