//! Null-case generators and the seeded robustness campaign.
//!
//! Each degenerate family lands on the root set of some non-constant linear
//! functional: equal weights, equal adjacent pair sums, zeros, mirrored
//! vectors. The campaign runs Hu-Tucker on such instances under both tie
//! policies and checks, per instance: a tree comes back, it is optimal, every
//! tie agrees with the bound shadow direction, explicit shadow arithmetic
//! reproduces the same phase-1 tree without a single tie, and the decision
//! path survives the shift `w + a*s` at the stability witness.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::alphabetic::{
    brute_force_optimal, dp_optimal_cost, hu_tucker_phase1, phase1_path, reconstruct_from_depths,
    symbolic_phase1, tree_cost, SolveResult, TieBreak, TiePolicy,
};
use crate::error::{Error, Result};
use crate::numeric::{Rational, WeightVector};
use crate::partition::{
    brute_force_partition, greedy_partition, greedy_partition_path, partition_value,
};
use crate::perturb::{dyadic_shadow, Orientation, ShadowVector};
use crate::trace::{stability_witness, verify_policy, DecisionTrace};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum InstanceFamily {
    AllEqual,
    /// Contiguous blocks over `k` distinct values.
    EqualBlocks {
        k: usize,
    },
    /// Random weights, each zeroed with probability `fraction`.
    ZeroSprinkled {
        fraction: Rational,
    },
    /// `a, b, a, b, ...`: every adjacent pair has the same sum.
    PairSumTies,
    Palindrome,
    UniformRandom,
}

impl InstanceFamily {
    pub fn name(&self) -> &'static str {
        match self {
            InstanceFamily::AllEqual => "all_equal",
            InstanceFamily::EqualBlocks { .. } => "equal_blocks",
            InstanceFamily::ZeroSprinkled { .. } => "zero_sprinkled",
            InstanceFamily::PairSumTies => "pair_sum_ties",
            InstanceFamily::Palindrome => "palindrome",
            InstanceFamily::UniformRandom => "uniform_random",
        }
    }

    pub fn is_degenerate(&self) -> bool {
        !matches!(self, InstanceFamily::UniformRandom)
    }

    fn rank(&self) -> usize {
        match self {
            InstanceFamily::AllEqual => 0,
            InstanceFamily::EqualBlocks { .. } => 1,
            InstanceFamily::ZeroSprinkled { .. } => 2,
            InstanceFamily::PairSumTies => 3,
            InstanceFamily::Palindrome => 4,
            InstanceFamily::UniformRandom => 5,
        }
    }
}

impl fmt::Display for InstanceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceFamily::EqualBlocks { k } => write!(f, "equal_blocks({k})"),
            InstanceFamily::ZeroSprinkled { fraction } => write!(f, "zero_sprinkled({fraction})"),
            other => f.write_str(other.name()),
        }
    }
}

/// `k / 2^m` with `k` in `lo..=hi` and `m` in `0..=3`.
fn dyadic_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    let k = rng.gen_range(lo..=hi);
    let m = rng.gen_range(0..=3u32);
    Rational::from_integer(k)
        .checked_div(&Rational::pow2(m))
        .expect("nonzero")
}

/// Deterministic in `(family, n, seed)`; every entry is nonnegative.
pub fn generate(family: &InstanceFamily, n: usize, seed: u64) -> Result<WeightVector> {
    if n == 0 {
        return Err(Error::InvalidSize("instances need n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<Rational> = match family {
        InstanceFamily::AllEqual => vec![Rational::one(); n],
        InstanceFamily::EqualBlocks { k } => {
            let k = (*k).clamp(1, n);
            let mut values: Vec<Rational> = Vec::with_capacity(k);
            while values.len() < k {
                let v = dyadic_rational(&mut rng, 1, 64);
                if !values.contains(&v) {
                    values.push(v);
                }
            }
            let mut cuts: Vec<usize> = Vec::with_capacity(k - 1);
            while cuts.len() < k - 1 {
                let c = rng.gen_range(1..n);
                if !cuts.contains(&c) {
                    cuts.push(c);
                }
            }
            cuts.sort_unstable();
            (0..n)
                .map(|i| values[cuts.iter().filter(|&&c| c <= i).count()].clone())
                .collect()
        }
        InstanceFamily::ZeroSprinkled { fraction } => {
            let scale = Rational::pow2(32);
            (0..n)
                .map(|_| {
                    let v = dyadic_rational(&mut rng, 1, 64);
                    let draw = Rational::from_integer(rng.gen_range(0..1i64 << 32))
                        .checked_div(&scale)
                        .expect("nonzero");
                    if draw < *fraction {
                        Rational::zero()
                    } else {
                        v
                    }
                })
                .collect()
        }
        InstanceFamily::PairSumTies => {
            let a = dyadic_rational(&mut rng, 0, 64);
            let b = dyadic_rational(&mut rng, 0, 64);
            (0..n)
                .map(|i| if i % 2 == 0 { a.clone() } else { b.clone() })
                .collect()
        }
        InstanceFamily::Palindrome => {
            let half: Vec<Rational> = (0..n.div_ceil(2))
                .map(|_| dyadic_rational(&mut rng, 0, 64))
                .collect();
            (0..n).map(|i| half[i.min(n - 1 - i)].clone()).collect()
        }
        InstanceFamily::UniformRandom => {
            (0..n).map(|_| dyadic_rational(&mut rng, 0, 1000)).collect()
        }
    };
    WeightVector::new(weights)
}

/// Which dyadic orientation realizes each tie policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Binding {
    pub leftmost: Orientation,
    pub rightmost: Orientation,
}

impl Default for Binding {
    fn default() -> Self {
        Binding {
            leftmost: Orientation::Negative,
            rightmost: Orientation::Positive,
        }
    }
}

impl Binding {
    pub fn orientation(&self, policy: TiePolicy) -> Orientation {
        match policy {
            TiePolicy::Leftmost => self.leftmost,
            TiePolicy::Rightmost => self.rightmost,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOptions {
    pub binding: Binding,
    pub stability: bool,
    /// Cross-check against tree enumeration up to this size.
    pub brute_force_max_n: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            binding: Binding::default(),
            stability: true,
            brute_force_max_n: 11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceVerdict {
    pub feasible: bool,
    pub optimal: bool,
    pub policy_verified: bool,
    pub symbolic_equivalent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable: Option<bool>,
    /// The shifted instance has pairwise distinct, nonzero weights.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leaves_null_family: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brute_force_agrees: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_count: Option<usize>,
    pub depths_reconstruct: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<Rational>,
    pub dp_cost: Rational,
    pub comparisons: usize,
    pub ties: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability_witness: Option<Rational>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

impl InstanceVerdict {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn pairwise_distinct_nonzero(w: &WeightVector) -> bool {
    let mut sorted: Vec<&Rational> = w.iter().collect();
    sorted.sort();
    sorted.iter().all(|x| !x.is_zero()) && sorted.windows(2).all(|p| p[0] != p[1])
}

/// Phase 1 agrees with the shadow arithmetic: same merges, no ties.
fn symbolic_agrees(
    w: &WeightVector,
    run_merges: &[(Vec<usize>, Vec<usize>)],
    s: &ShadowVector,
) -> Result<bool> {
    let sym = symbolic_phase1(w, s)?;
    Ok(sym.ties == 0 && sym.merges == run_merges)
}

/// Runs every robustness check on one instance. Errors only for inputs
/// outside the domain; check failures are reported in the verdict.
pub fn check_instance(
    w: &WeightVector,
    policy: TiePolicy,
    options: &CheckOptions,
) -> Result<InstanceVerdict> {
    w.check_nonnegative()?;
    let n = w.len();
    let mut failures = Vec::new();
    let run = hu_tucker_phase1(w, TieBreak::Policy(policy))?;
    let result = reconstruct_from_depths(&run.depths);
    let dp_cost = dp_optimal_cost(w)?;

    let feasible = result.is_solution();
    if !feasible {
        failures.push(format!(
            "phase-1 depths {:?} are not realizable",
            run.depths
        ));
    }
    let cost = match &result {
        SolveResult::Solution(tree) => Some(tree_cost(tree, w)?),
        SolveResult::Failure => None,
    };
    let optimal = cost.as_ref() == Some(&dp_cost);
    if feasible && !optimal {
        failures.push(format!(
            "cost {} differs from DP optimum {dp_cost}",
            cost.clone().unwrap()
        ));
    }

    let (brute_force_agrees, optimal_count) = if n <= options.brute_force_max_n {
        let (bf, count) = brute_force_optimal(w)?;
        if bf != dp_cost {
            failures.push(format!("brute force {bf} differs from DP {dp_cost}"));
        }
        (Some(bf == dp_cost), Some(count))
    } else {
        (None, None)
    };

    let s = dyadic_shadow(n, options.binding.orientation(policy))?;
    let policy_verified = match verify_policy(&run.trace, w, &s) {
        Ok(report) => {
            if let Some(step) = report.first_failure() {
                failures.push(format!(
                    "tie at step {step} disagrees with the shadow direction"
                ));
            }
            report.passed()
        }
        Err(e) => {
            failures.push(format!("verification error: {e}"));
            false
        }
    };

    let symbolic_equivalent = symbolic_agrees(w, &run.merges, &s)?;
    if !symbolic_equivalent {
        failures.push("shadow arithmetic produced a different phase-1 tree or a tie".into());
    }

    let (mut stable, mut leaves_null_family, mut witness) = (None, None, None);
    if options.stability && policy_verified {
        match stability_witness(&run.trace, w, &s) {
            Ok(a) => {
                let shifted = w.shifted(&a, s.entries())?;
                let rerun = phase1_path(&shifted, TieBreak::Policy(policy))?;
                let same = rerun.trace.same_path(&run.trace)
                    && rerun.trace.tie_count() == 0
                    && reconstruct_from_depths(&rerun.depths) == result;
                if !same {
                    failures.push(format!("decision path changed at w + a*s for a = {a}"));
                }
                let generic = pairwise_distinct_nonzero(&shifted);
                if !generic {
                    failures.push("shifted weights still contain zeros or repeats".into());
                }
                stable = Some(same);
                leaves_null_family = Some(generic);
                witness = Some(a);
            }
            Err(e) => {
                failures.push(format!("stability witness: {e}"));
                stable = Some(false);
            }
        }
    }

    Ok(InstanceVerdict {
        feasible,
        optimal,
        policy_verified,
        symbolic_equivalent,
        stable,
        leaves_null_family,
        brute_force_agrees,
        optimal_count,
        depths_reconstruct: feasible,
        cost,
        dp_cost,
        comparisons: run.trace.len(),
        ties: run.trace.tie_count(),
        stability_witness: witness,
        failures,
    })
}

/// `|OPT(w + delta) - OPT(w)| <= (n - 1) * sum |delta_i|`.
pub fn check_lipschitz(w: &WeightVector, delta: &[Rational]) -> Result<bool> {
    let moved = w.checked_add(delta)?;
    w.check_nonnegative()?;
    moved.check_nonnegative()?;
    let change = (dp_optimal_cost(&moved)? - dp_optimal_cost(w)?).abs();
    let l1: Rational = delta.iter().map(Rational::abs).sum();
    Ok(change <= l1.mul_int(w.len() as i64 - 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionVerdict {
    pub policy_verified: bool,
    pub greedy_value: Rational,
    pub optimum: Rational,
    pub stable: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

impl PartitionVerdict {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Greedy PARTITION under `s`: traces verify, the value never beats the
/// exact optimum, and the path survives the shift to `w + a*s`.
pub fn check_partition(w: &WeightVector, s: &ShadowVector) -> Result<PartitionVerdict> {
    let mut failures = Vec::new();
    let (assignment, trace) = greedy_partition(w, s)?;
    let greedy_value = partition_value(&assignment, w)?;
    let optimum = brute_force_partition(w)?;
    if greedy_value < optimum {
        failures.push(format!(
            "greedy value {greedy_value} below optimum {optimum}"
        ));
    }
    let shape_ok = trace
        .records()
        .iter()
        .all(|r| r.functional.is_unit_shaped());
    if !shape_ok {
        failures.push("emitted a functional outside {-1, 0, 1}".into());
    }
    let policy_verified = match verify_policy(&trace, w, s) {
        Ok(r) => r.passed(),
        Err(_) => false,
    };
    if !policy_verified {
        failures.push("greedy trace fails policy verification".into());
    }
    let stable = policy_verified && partition_stable(w, s, &assignment, &trace)?;
    if policy_verified && !stable {
        failures.push("greedy decision path changed under the stability shift".into());
    }
    Ok(PartitionVerdict {
        policy_verified,
        greedy_value,
        optimum,
        stable,
        failures,
    })
}

fn partition_stable(
    w: &WeightVector,
    s: &ShadowVector,
    assignment: &crate::partition::PartitionAssignment,
    trace: &DecisionTrace,
) -> Result<bool> {
    let a = match stability_witness(trace, w, s) {
        Ok(a) => a,
        Err(_) => return Ok(false),
    };
    let shifted = w.shifted(&a, s.entries())?;
    let (p2, t2) = greedy_partition_path(&shifted, s)?;
    Ok(&p2 == assignment && t2.same_path(trace) && t2.tie_count() == 0)
}

/// How many instances of the campaign get the path-stability check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityCoverage {
    All,
    /// `k` instances spread evenly over the canonical order.
    Sample(usize),
}

/// Everything a campaign depends on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignConfig {
    pub seed: u64,
    pub n_min: usize,
    pub n_max: usize,
    pub policies: Vec<TiePolicy>,
    pub families: Vec<(InstanceFamily, usize)>,
    pub stability: StabilityCoverage,
    pub brute_force_max_n: usize,
    pub lipschitz_pairs: usize,
    pub lipschitz_n_max: usize,
    pub partition_instances: usize,
    pub partition_n_max: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seed: 0,
            n_min: 1,
            n_max: 200,
            policies: TiePolicy::ALL.to_vec(),
            families: Vec::new(),
            stability: StabilityCoverage::All,
            brute_force_max_n: 11,
            lipschitz_pairs: 0,
            lipschitz_n_max: 40,
            partition_instances: 0,
            partition_n_max: 16,
        }
    }
}

impl CampaignConfig {
    /// Parses the flat `key = value` format; `#` starts a comment line.
    ///
    /// ```text
    /// seed = 7
    /// n_min = 1
    /// n_max = 200
    /// policies = leftmost, rightmost
    /// family.all_equal = 100
    /// family.equal_blocks = 100
    /// equal_blocks.k = 3
    /// family.zero_sprinkled = 100
    /// zero_sprinkled.fraction = 1/2
    /// family.pair_sum_ties = 100
    /// family.palindrome = 100
    /// family.uniform_random = 500
    /// stability = 200
    /// brute_force.n_max = 11
    /// lipschitz.pairs = 500
    /// lipschitz.n_max = 40
    /// partition.instances = 200
    /// partition.n_max = 16
    /// ```
    pub fn parse(text: &str) -> Result<CampaignConfig> {
        let mut cfg = CampaignConfig::default();
        let mut counts: Vec<(usize, usize)> = Vec::new();
        let mut k = 3usize;
        let mut fraction = Rational::new(1, 2);

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let indent = raw.len() - raw.trim_start().len();
            let eq = raw
                .find('=')
                .ok_or_else(|| Error::parse(line_no, indent + 1, "expected `key = value`"))?;
            let key = raw[..eq].trim();
            let value = raw[eq + 1..].trim();
            let value_col = eq + 2 + (raw[eq + 1..].len() - raw[eq + 1..].trim_start().len());
            let bad = |what: &str| {
                Error::parse(
                    line_no,
                    value_col,
                    format!("invalid {what} `{value}` for `{key}`"),
                )
            };
            let int = || value.parse::<usize>().map_err(|_| bad("integer"));
            match key {
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                "n_min" => cfg.n_min = int()?,
                "n_max" => cfg.n_max = int()?,
                "policies" => {
                    cfg.policies = value
                        .split(',')
                        .map(|p| {
                            p.trim()
                                .parse::<TiePolicy>()
                                .map_err(|_| bad("policy list"))
                        })
                        .collect::<Result<_>>()?
                }
                "equal_blocks.k" => k = int()?,
                "zero_sprinkled.fraction" => {
                    fraction = value.parse().map_err(|_| bad("rational"))?;
                    if fraction.is_negative() || fraction > Rational::one() {
                        return Err(bad("fraction in [0, 1]"));
                    }
                }
                "stability" => {
                    cfg.stability = if value == "all" {
                        StabilityCoverage::All
                    } else {
                        StabilityCoverage::Sample(int()?)
                    }
                }
                "brute_force.n_max" => cfg.brute_force_max_n = int()?,
                "lipschitz.pairs" => cfg.lipschitz_pairs = int()?,
                "lipschitz.n_max" => cfg.lipschitz_n_max = int()?,
                "partition.instances" => cfg.partition_instances = int()?,
                "partition.n_max" => cfg.partition_n_max = int()?,
                _ => match key.strip_prefix("family.") {
                    Some(name) => {
                        let rank =
                            FAMILY_NAMES
                                .iter()
                                .position(|f| *f == name)
                                .ok_or_else(|| {
                                    Error::parse(
                                        line_no,
                                        indent + 1,
                                        format!("unknown family `{name}`"),
                                    )
                                })?;
                        counts.retain(|(r, _)| *r != rank);
                        counts.push((rank, int()?));
                    }
                    None => {
                        return Err(Error::parse(
                            line_no,
                            indent + 1,
                            format!("unknown key `{key}`"),
                        ))
                    }
                },
            }
        }
        if cfg.n_min == 0 || cfg.n_min > cfg.n_max {
            return Err(Error::parse(1, 1, "need 1 <= n_min <= n_max"));
        }
        if cfg.partition_n_max == 0 || cfg.partition_n_max > crate::partition::MAX_BRUTE_FORCE_ITEMS
        {
            return Err(Error::parse(1, 1, "partition.n_max must be in 1..=16"));
        }
        if cfg.brute_force_max_n > crate::alphabetic::MAX_ENUMERATION_LEAVES {
            return Err(Error::parse(1, 1, "brute_force.n_max must be at most 12"));
        }
        if cfg.lipschitz_n_max == 0 {
            return Err(Error::parse(1, 1, "lipschitz.n_max must be positive"));
        }
        counts.sort_unstable();
        cfg.families = counts
            .into_iter()
            .map(|(rank, count)| (family_from_rank(rank, k, &fraction), count))
            .collect();
        Ok(cfg)
    }
}

const FAMILY_NAMES: [&str; 6] = [
    "all_equal",
    "equal_blocks",
    "zero_sprinkled",
    "pair_sum_ties",
    "palindrome",
    "uniform_random",
];

fn family_from_rank(rank: usize, k: usize, fraction: &Rational) -> InstanceFamily {
    match rank {
        0 => InstanceFamily::AllEqual,
        1 => InstanceFamily::EqualBlocks { k },
        2 => InstanceFamily::ZeroSprinkled {
            fraction: fraction.clone(),
        },
        3 => InstanceFamily::PairSumTies,
        4 => InstanceFamily::Palindrome,
        _ => InstanceFamily::UniformRandom,
    }
}

impl FromStr for CampaignConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CampaignConfig::parse(s)
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    splitmix(splitmix(splitmix(base) ^ stream) ^ index)
}

/// One generated instance of a campaign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSpec {
    pub family: InstanceFamily,
    pub n: usize,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn weights(&self) -> WeightVector {
        generate(&self.family, self.n, self.seed).expect("n >= 1")
    }
}

/// Instances in canonical order: by family, then `n`, then seed.
pub fn campaign_instances(config: &CampaignConfig) -> Vec<InstanceSpec> {
    let mut out = Vec::new();
    for (family, count) in &config.families {
        for i in 0..*count {
            let seed = derive_seed(config.seed, family.rank() as u64 + 1, i as u64);
            let span = (config.n_max - config.n_min + 1) as u64;
            let n = config.n_min + (splitmix(seed) % span) as usize;
            out.push(InstanceSpec {
                family: family.clone(),
                n,
                seed,
            });
        }
    }
    out.sort_by_key(|a| (a.family.rank(), a.n, a.seed));
    out
}

/// Outcome of matching one tie policy to a dyadic orientation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolicyBinding {
    pub policy: TiePolicy,
    /// Orientations consistent with every instance examined.
    pub consistent: Vec<Orientation>,
    /// The orientation used for the checks.
    pub bound: Orientation,
    /// First instance (canonical index) that ruled each other orientation out.
    pub eliminated: Vec<(Orientation, usize)>,
}

impl PolicyBinding {
    pub fn resolved(&self) -> bool {
        self.consistent.len() == 1
    }
}

fn consistent_with(w: &WeightVector, policy: TiePolicy, orientation: Orientation) -> Result<bool> {
    let run = hu_tucker_phase1(w, TieBreak::Policy(policy))?;
    let s = dyadic_shadow(w.len(), orientation)?;
    Ok(verify_policy(&run.trace, w, &s)?.passed() && symbolic_agrees(w, &run.merges, &s)?)
}

/// Eliminates orientations instance by instance until one survives.
pub fn resolve_binding(instances: &[InstanceSpec], policy: TiePolicy) -> Result<PolicyBinding> {
    let mut alive = vec![Orientation::Positive, Orientation::Negative];
    let mut eliminated = Vec::new();
    for (idx, spec) in instances.iter().enumerate() {
        if alive.len() <= 1 {
            break;
        }
        let w = spec.weights();
        let mut keep = Vec::new();
        for o in alive {
            if consistent_with(&w, policy, o)? {
                keep.push(o);
            } else {
                eliminated.push((o, idx));
            }
        }
        alive = keep;
    }
    let bound = match alive.as_slice() {
        [only] => *only,
        _ => Binding::default().orientation(policy),
    };
    Ok(PolicyBinding {
        policy,
        consistent: alive,
        bound,
        eliminated,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub family: String,
    pub n: usize,
    pub seed: u64,
    pub policy: TiePolicy,
    pub verdict: &'static str,
    #[serde(flatten)]
    pub checks: InstanceVerdict,
    /// Present only on failure, for reproduction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LipschitzRecord {
    pub index: usize,
    pub n: usize,
    pub seed: u64,
    pub opt_change: Rational,
    pub bound: Rational,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionRecord {
    pub index: usize,
    pub n: usize,
    pub seed: u64,
    pub orientation: Orientation,
    pub verdict: &'static str,
    #[serde(flatten)]
    pub checks: PartitionVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignReport {
    pub seed: u64,
    pub bindings: Vec<PolicyBinding>,
    pub instances: Vec<InstanceRecord>,
    pub lipschitz: Vec<LipschitzRecord>,
    pub partitions: Vec<PartitionRecord>,
}

fn verdict_str(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Picks one check out of a verdict; `None` when it was not run.
type Column = dyn Fn(&InstanceVerdict) -> Option<bool>;

impl CampaignReport {
    pub fn passed(&self) -> bool {
        self.bindings.iter().all(|b| !b.consistent.is_empty())
            && self.instances.iter().all(|r| r.checks.passed())
            && self.lipschitz.iter().all(|r| r.ok)
            && self.partitions.iter().all(|r| r.checks.passed())
    }

    pub fn failures(&self) -> impl Iterator<Item = &InstanceRecord> {
        self.instances.iter().filter(|r| !r.checks.passed())
    }

    /// Line-delimited records followed by a `#`-prefixed summary block.
    pub fn to_text(&self) -> String {
        #[derive(Serialize)]
        struct Header<'a> {
            kind: &'static str,
            seed: u64,
            bindings: &'a [PolicyBinding],
        }
        #[derive(Serialize)]
        struct Tagged<'a, T: Serialize> {
            kind: &'static str,
            #[serde(flatten)]
            body: &'a T,
        }
        let mut out = String::new();
        out.push_str(&json(&Header {
            kind: "header",
            seed: self.seed,
            bindings: &self.bindings,
        }));
        out.push('\n');
        for r in &self.instances {
            out.push_str(&json(&Tagged {
                kind: "instance",
                body: r,
            }));
            out.push('\n');
        }
        for r in &self.lipschitz {
            out.push_str(&json(&Tagged {
                kind: "lipschitz",
                body: r,
            }));
            out.push('\n');
        }
        for r in &self.partitions {
            out.push_str(&json(&Tagged {
                kind: "partition",
                body: r,
            }));
            out.push('\n');
        }
        out.push_str(&self.summary());
        out
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let count = |f: &Column| {
            let considered: Vec<bool> =
                self.instances.iter().filter_map(|r| f(&r.checks)).collect();
            (considered.iter().filter(|&&b| b).count(), considered.len())
        };
        let _ = writeln!(s, "# campaign seed {}", self.seed);
        for b in &self.bindings {
            let status = match b.consistent.len() {
                1 => format!("bound to {} dyadic direction", b.bound.as_str()),
                0 => "no orientation consistent".to_string(),
                _ => format!(
                    "undetermined (no discriminating tie); using {}",
                    b.bound.as_str()
                ),
            };
            let _ = writeln!(s, "# binding {}: {}", b.policy.as_str(), status);
        }
        let degenerate = self
            .instances
            .iter()
            .filter(|r| r.family != "uniform_random")
            .count();
        let _ = writeln!(
            s,
            "# instance runs: {} ({} on degenerate families)",
            self.instances.len(),
            degenerate
        );
        let rows: [(&str, &Column); 8] = [
            ("feasible", &|v| Some(v.feasible)),
            ("optimal", &|v| Some(v.optimal)),
            ("depths reconstruct", &|v| Some(v.depths_reconstruct)),
            ("policy verified", &|v| Some(v.policy_verified)),
            ("symbolic equivalent", &|v| Some(v.symbolic_equivalent)),
            ("path stable", &|v| v.stable),
            ("leaves null family", &|v| v.leaves_null_family),
            ("brute force agrees", &|v| v.brute_force_agrees),
        ];
        for (name, f) in rows {
            let (ok, total) = count(f);
            let _ = writeln!(s, "# {name}: {ok}/{total}");
        }
        let multi = self
            .instances
            .iter()
            .filter(|r| r.checks.optimal_count.is_some_and(|c| c > 1))
            .count();
        let _ = writeln!(s, "# runs with multiple optimal trees: {multi}");
        let lip_ok = self.lipschitz.iter().filter(|r| r.ok).count();
        let _ = writeln!(s, "# lipschitz: {lip_ok}/{}", self.lipschitz.len());
        let part_ok = self.partitions.iter().filter(|r| r.checks.passed()).count();
        let _ = writeln!(s, "# partition: {part_ok}/{}", self.partitions.len());
        let _ = writeln!(s, "# aggregate: {}", verdict_str(self.passed()));
        s
    }
}

fn json<T: Serialize>(record: &T) -> String {
    serde_json::to_string(record).expect("report records serialize")
}

fn lipschitz_pair(
    config: &CampaignConfig,
    index: usize,
) -> Result<(u64, WeightVector, Vec<Rational>)> {
    let seed = derive_seed(config.seed, 100, index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=config.lipschitz_n_max);
    let families = [
        InstanceFamily::AllEqual,
        InstanceFamily::ZeroSprinkled {
            fraction: Rational::new(1, 2),
        },
        InstanceFamily::PairSumTies,
        InstanceFamily::UniformRandom,
    ];
    let family = &families[rng.gen_range(0..families.len())];
    let w = generate(family, n, rng.gen())?;
    let delta = w
        .iter()
        .map(|x| {
            let d = dyadic_rational(&mut rng, 0, 64);
            if rng.gen_bool(0.5) {
                d
            } else if d > *x {
                -x
            } else {
                -d
            }
        })
        .collect();
    Ok((seed, w, delta))
}

/// Exactly `min(k, total)` indices, evenly spaced, starting at 0.
fn sampled(index: usize, k: usize, total: usize) -> bool {
    let (i, k, total) = (index as u128, k as u128, total as u128);
    k >= total || (i * k).div_ceil(total) < ((i + 1) * k).div_ceil(total)
}

/// Executes the configured campaign. Deterministic in `config`.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    let instances = campaign_instances(config);
    let bindings = config
        .policies
        .iter()
        .map(|&p| resolve_binding(&instances, p))
        .collect::<Result<Vec<_>>>()?;
    let binding = Binding {
        leftmost: bindings
            .iter()
            .find(|b| b.policy == TiePolicy::Leftmost)
            .map_or(Binding::default().leftmost, |b| b.bound),
        rightmost: bindings
            .iter()
            .find(|b| b.policy == TiePolicy::Rightmost)
            .map_or(Binding::default().rightmost, |b| b.bound),
    };

    let mut records = Vec::with_capacity(instances.len() * config.policies.len());
    for (index, spec) in instances.iter().enumerate() {
        let w = spec.weights();
        let options = CheckOptions {
            binding,
            stability: match config.stability {
                StabilityCoverage::All => true,
                StabilityCoverage::Sample(k) => sampled(index, k, instances.len()),
            },
            brute_force_max_n: config.brute_force_max_n,
        };
        for &policy in &config.policies {
            let checks = check_instance(&w, policy, &options)?;
            let ok = checks.passed();
            records.push(InstanceRecord {
                index,
                family: spec.family.name().to_string(),
                n: spec.n,
                seed: spec.seed,
                policy,
                verdict: verdict_str(ok),
                checks,
                weights: (!ok).then(|| w.to_string()),
            });
        }
    }

    let mut lipschitz = Vec::with_capacity(config.lipschitz_pairs);
    for index in 0..config.lipschitz_pairs {
        let (seed, w, delta) = lipschitz_pair(config, index)?;
        let moved = w.checked_add(&delta)?;
        let opt_change = (dp_optimal_cost(&moved)? - dp_optimal_cost(&w)?).abs();
        let l1: Rational = delta.iter().map(Rational::abs).sum();
        let bound = l1.mul_int(w.len() as i64 - 1);
        let ok = check_lipschitz(&w, &delta)?;
        lipschitz.push(LipschitzRecord {
            index,
            n: w.len(),
            seed,
            opt_change,
            bound,
            ok,
        });
    }

    let mut partitions = Vec::with_capacity(config.partition_instances);
    for index in 0..config.partition_instances {
        let seed = derive_seed(config.seed, 200, index as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=config.partition_n_max);
        let family = match rng.gen_range(0..4) {
            0 => InstanceFamily::AllEqual,
            1 => InstanceFamily::EqualBlocks { k: 2 },
            2 => InstanceFamily::PairSumTies,
            _ => InstanceFamily::UniformRandom,
        };
        let w = generate(&family, n, rng.gen())?;
        let s = dyadic_shadow(n, Orientation::Positive)?;
        let checks = check_partition(&w, &s)?;
        partitions.push(PartitionRecord {
            index,
            n,
            seed,
            orientation: Orientation::Positive,
            verdict: verdict_str(checks.passed()),
            checks,
        });
    }

    Ok(CampaignReport {
        seed: config.seed,
        bindings,
        instances: records,
        lipschitz,
        partitions,
    })
}
