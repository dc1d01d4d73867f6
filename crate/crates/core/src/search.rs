//! Branch-and-bound search for a small set of auxiliary monomials.
//!
//! The root of the tree proposes no candidates; every other node proposes
//! its parent's set extended by one decomposition tuple of the parent's
//! branching target. Children are ordered by the configured heuristic and
//! visited depth first. Candidate sets that cannot beat the incumbent (or
//! the configured cap) are pruned, and tuples containing a monomial whose
//! derivative cost exceeds the budget are never generated. Each verified
//! set is immediately swept for a smaller subset, and the survivor
//! tightens the pruning bound for the rest of the traversal.

use std::time::{Duration, Instant};

use crate::decompose::{decompose, select_target, sort_candidates, Heuristic};
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::system::{AuxDefinition, AuxKind, ExtendedSystem};
use crate::verify::{verify, VerifyCtx, VerifyError, VerifyOutcome};

/// Knobs for one search run.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Child ordering rule.
    pub heuristic: Heuristic,
    /// Largest admissible candidate set size.
    pub max_aux: u32,
    /// Differential order `k` used by the verifier.
    pub diff_order: u32,
    /// Highest derivative cost a candidate monomial may have.
    pub max_aux_deriv: u32,
    /// Abort after this many verified nodes.
    pub node_limit: Option<u64>,
    /// Abort after this much wall time.
    pub time_limit: Option<Duration>,
    /// Sweep subsets of every verified set.
    pub shrink_enabled: bool,
}

impl SearchConfig {
    /// Defaults scaled to a system of order `h`: verify at `k = 3h`, admit
    /// candidates costing up to `2h` derivatives, cap the set size at 8.
    pub fn for_system(sys: &ExtendedSystem) -> Self {
        let h = sys.order();
        SearchConfig {
            heuristic: Heuristic::h3_default(),
            max_aux: 8,
            diff_order: 3 * h,
            max_aux_deriv: 2 * h,
            node_limit: None,
            time_limit: None,
            shrink_enabled: true,
        }
    }
}

/// Counters reported by every search, successful or not.
#[derive(Clone, Debug)]
pub struct SearchStats {
    /// Candidate sets verified (the root counts only when it succeeds).
    pub nodes_traversed: u64,
    /// Subset verifications performed by shrink sweeps.
    pub shrink_checks: u64,
    /// Elapsed wall time.
    pub wall_time: Duration,
    /// Total auxiliary count of the result, zero on failure.
    pub best_order: u32,
}

/// Why a search ended without a quadratization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureKind {
    /// The tree was exhausted and at least one branch was cut by the size
    /// bound; a larger `max_aux` may help.
    Pr1Exhausted,
    /// The tree was exhausted without any size-bound cut; candidates were
    /// limited by the derivative budget or by decomposability alone.
    Pr2Exhausted,
    /// The node limit was reached before the tree was exhausted.
    NodeLimit,
    /// The time limit was reached before the tree was exhausted.
    TimeLimit,
}

impl FailureKind {
    /// Stable lowercase label, as used in reports.
    pub fn label(self) -> &'static str {
        match self {
            FailureKind::Pr1Exhausted => "pr1_exhausted",
            FailureKind::Pr2Exhausted => "pr2_exhausted",
            FailureKind::NodeLimit => "node_limit",
            FailureKind::TimeLimit => "time_limit",
        }
    }
}

/// A search that ended without a quadratization.
#[derive(Clone, Debug)]
pub struct SearchFailure {
    /// What stopped the search.
    pub kind: FailureKind,
    /// Counters at the time of failure.
    pub stats: SearchStats,
}

/// A successful quadratization.
#[derive(Clone, Debug)]
pub struct QuadResult {
    /// All auxiliaries: the system's registered ones first, then the found
    /// monomials in discovery order, with their final symbol ids.
    pub aux_set: Vec<AuxDefinition>,
    /// Degree-two right-hand sides over the generator symbols: states
    /// first, then registered auxiliaries, then the found monomials.
    pub quadratic_system: Vec<Polynomial>,
    /// Counters of the run that produced this result.
    pub stats: SearchStats,
    /// Differential order the verification ran at.
    pub diff_order_used: u32,
}

/// Outcome of a subset sweep over a candidate set.
#[derive(Clone, Debug)]
pub enum ShrinkOutcome {
    /// A proper subset suffices.
    Shrunk {
        /// The surviving candidates, in their original relative order.
        kept: Vec<Monomial>,
        /// Quadratic forms of the verification that accepted the subset.
        forms: Vec<Polynomial>,
        /// Subset verifications performed.
        checks: u64,
    },
    /// No proper subset verifies.
    Unchanged {
        /// Subset verifications performed.
        checks: u64,
    },
}

/// Sweeps nonempty proper subsets of `candidates` by ascending cardinality
/// (position-lexicographic within one cardinality) and returns the first
/// subset that verifies at order `diff_order`.
pub fn shrink(
    sys: &ExtendedSystem,
    candidates: &[Monomial],
    diff_order: u32,
) -> Result<ShrinkOutcome, VerifyError> {
    let mut ctx = VerifyCtx::new(sys);
    let mut checks = 0;
    Ok(match sweep(&mut ctx, candidates, diff_order, &mut checks)? {
        Some((kept, forms)) => ShrinkOutcome::Shrunk { kept, forms, checks },
        None => ShrinkOutcome::Unchanged { checks },
    })
}

fn sweep(
    ctx: &mut VerifyCtx<'_>,
    candidates: &[Monomial],
    k: u32,
    checks: &mut u64,
) -> Result<Option<(Vec<Monomial>, Vec<Polynomial>)>, VerifyError> {
    let n = candidates.len();
    for size in 1..n {
        let mut picked: Vec<usize> = (0..size).collect();
        loop {
            let subset: Vec<Monomial> = picked.iter().map(|&i| candidates[i].clone()).collect();
            *checks += 1;
            if let VerifyOutcome::Success { forms } = verify(ctx, &subset, k)? {
                return Ok(Some((subset, forms)));
            }
            if !next_combination(&mut picked, n) {
                break;
            }
        }
    }
    Ok(None)
}

/// Advances `picked` to the next index combination out of `n`, returning
/// false after the last one.
fn next_combination(picked: &mut [usize], n: usize) -> bool {
    let size = picked.len();
    let mut i = size;
    while i > 0 {
        i -= 1;
        if picked[i] < i + n - size {
            picked[i] += 1;
            for j in i + 1..size {
                picked[j] = picked[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

struct Driver<'a> {
    sys: &'a ExtendedSystem,
    cfg: &'a SearchConfig,
    ctx: VerifyCtx<'a>,
    start: Instant,
    nodes: u64,
    shrink_checks: u64,
    size_pruned: bool,
    incumbent: Option<(Vec<Monomial>, Vec<Polynomial>)>,
    abort: Option<FailureKind>,
}

impl<'a> Driver<'a> {
    /// Candidate sets of this size or larger are cut.
    fn bound(&self) -> usize {
        let cap = self.cfg.max_aux as usize + 1;
        match &self.incumbent {
            Some((kept, _)) => cap.min(kept.len()),
            None => cap,
        }
    }

    fn hit_limit(&mut self) -> bool {
        if let Some(limit) = self.cfg.node_limit {
            if self.nodes >= limit {
                self.abort = Some(FailureKind::NodeLimit);
                return true;
            }
        }
        if let Some(limit) = self.cfg.time_limit {
            if self.start.elapsed() >= limit {
                self.abort = Some(FailureKind::TimeLimit);
                return true;
            }
        }
        false
    }

    fn expand(&mut self, path: &[Monomial], remainders: &[Polynomial]) {
        let Some(target) = select_target(remainders) else {
            return;
        };
        let mut registered: Vec<Monomial> = self
            .sys
            .auxes()
            .iter()
            .filter_map(|def| match &def.kind {
                AuxKind::Monomial(m) => Some(m.clone()),
                AuxKind::Inverse(_) => None,
            })
            .collect();
        registered.extend_from_slice(path);
        let budget = self.cfg.diff_order.min(self.cfg.max_aux_deriv);
        let mut tuples = decompose(&target, &registered);
        tuples.retain(|t| {
            t.elements()
                .iter()
                .all(|m| registered.contains(m) || self.sys.deriv_cost(m) <= budget)
        });
        sort_candidates(&mut tuples, &self.cfg.heuristic);
        for tuple in &tuples {
            if self.abort.is_some() {
                return;
            }
            // New candidates join the path largest first, the order the
            // tuple is written in; subset sweeps depend on this.
            let mut child = path.to_vec();
            for m in tuple.elements().iter().rev() {
                if !registered.contains(m) {
                    child.push(m.clone());
                }
            }
            if child.len() == path.len() {
                continue;
            }
            if child.len() >= self.bound() {
                self.size_pruned = true;
                continue;
            }
            if self.hit_limit() {
                return;
            }
            self.nodes += 1;
            let outcome = verify(&mut self.ctx, &child, self.cfg.diff_order)
                .expect("candidate cost is checked before expansion");
            match outcome {
                VerifyOutcome::Success { forms } => {
                    let mut kept = (child.clone(), forms);
                    if self.cfg.shrink_enabled {
                        let smaller = sweep(
                            &mut self.ctx,
                            &child,
                            self.cfg.diff_order,
                            &mut self.shrink_checks,
                        )
                        .expect("candidate cost is checked before expansion");
                        if let Some(pair) = smaller {
                            kept = pair;
                        }
                    }
                    self.incumbent = Some(kept);
                }
                VerifyOutcome::Residual { remainders } => self.expand(&child, &remainders),
            }
        }
    }

    fn stats(&self, best_order: u32) -> SearchStats {
        SearchStats {
            nodes_traversed: self.nodes,
            shrink_checks: self.shrink_checks,
            wall_time: self.start.elapsed(),
            best_order,
        }
    }

    fn finish(mut self) -> Result<QuadResult, SearchFailure> {
        if let Some((kept, forms)) = self.incumbent.take() {
            let mut aux_set = self.sys.auxes().to_vec();
            let base = aux_set.len() as u32;
            for (i, m) in kept.iter().enumerate() {
                aux_set.push(AuxDefinition {
                    id: base + i as u32,
                    kind: AuxKind::Monomial(m.clone()),
                    deriv_cost: self.sys.deriv_cost(m),
                });
            }
            let stats = self.stats(aux_set.len() as u32);
            Ok(QuadResult {
                aux_set,
                quadratic_system: forms,
                stats,
                diff_order_used: self.cfg.diff_order,
            })
        } else {
            let kind = self.abort.unwrap_or(if self.size_pruned {
                FailureKind::Pr1Exhausted
            } else {
                FailureKind::Pr2Exhausted
            });
            Err(SearchFailure { kind, stats: self.stats(0) })
        }
    }
}

/// Runs the branch-and-bound search.
///
/// The root (no candidates) is verified first and, when it succeeds, counts
/// as the single traversed node. Otherwise the tree is explored depth first
/// in heuristic order. When a limit fires after an incumbent was found the
/// incumbent is returned as the result.
///
/// Panics if a registered auxiliary costs more derivatives than
/// `cfg.diff_order` allows; candidates generated by the search itself are
/// always within budget.
pub fn search(sys: &ExtendedSystem, cfg: &SearchConfig) -> Result<QuadResult, SearchFailure> {
    let start = Instant::now();
    let mut driver = Driver {
        sys,
        cfg,
        ctx: VerifyCtx::new(sys),
        start,
        nodes: 0,
        shrink_checks: 0,
        size_pruned: false,
        incumbent: None,
        abort: None,
    };
    let root = verify(&mut driver.ctx, &[], cfg.diff_order)
        .expect("registered auxiliaries must fit the derivative budget");
    match root {
        VerifyOutcome::Success { forms } => {
            driver.nodes = 1;
            let stats = driver.stats(sys.auxes().len() as u32);
            Ok(QuadResult {
                aux_set: sys.auxes().to_vec(),
                quadratic_system: forms,
                stats,
                diff_order_used: cfg.diff_order,
            })
        }
        VerifyOutcome::Residual { remainders } => {
            driver.expand(&[], &remainders);
            driver.finish()
        }
    }
}

/// One round of [`auto_search`].
#[derive(Clone, Debug)]
pub struct AutoRound {
    /// Differential order the round ran at.
    pub diff_order: u32,
    /// Candidate set cap the round ran with.
    pub max_aux: u32,
    /// Nodes the round traversed.
    pub nodes_traversed: u64,
    /// None when the round found a quadratization.
    pub failure: Option<FailureKind>,
}

/// Retries the search with widened parameters until it succeeds.
///
/// Starting from `cfg.diff_order` and `cfg.max_aux`, every failed round
/// raises the order by one (capped at `3h + 2` for a system of order `h`)
/// and doubles the set cap (at least one). Node and time limits span all
/// rounds and abort the escalation, as does exhausting 16 rounds.
pub fn auto_search(
    sys: &ExtendedSystem,
    cfg: &SearchConfig,
) -> (Vec<AutoRound>, Result<QuadResult, SearchFailure>) {
    const MAX_ROUNDS: usize = 16;
    let start = Instant::now();
    let order_cap = 3 * sys.order() + 2;
    let mut diff_order = cfg.diff_order;
    let mut max_aux = cfg.max_aux;
    let mut spent_nodes = 0u64;
    let mut rounds = Vec::new();
    loop {
        let round_cfg = SearchConfig {
            diff_order,
            max_aux,
            node_limit: cfg.node_limit.map(|l| l.saturating_sub(spent_nodes)),
            time_limit: cfg.time_limit.map(|l| l.saturating_sub(start.elapsed())),
            ..cfg.clone()
        };
        match search(sys, &round_cfg) {
            Ok(mut result) => {
                rounds.push(AutoRound {
                    diff_order,
                    max_aux,
                    nodes_traversed: result.stats.nodes_traversed,
                    failure: None,
                });
                result.stats.wall_time = start.elapsed();
                return (rounds, Ok(result));
            }
            Err(mut failure) => {
                spent_nodes += failure.stats.nodes_traversed;
                rounds.push(AutoRound {
                    diff_order,
                    max_aux,
                    nodes_traversed: failure.stats.nodes_traversed,
                    failure: Some(failure.kind),
                });
                let aborted =
                    matches!(failure.kind, FailureKind::NodeLimit | FailureKind::TimeLimit);
                if aborted || rounds.len() >= MAX_ROUNDS {
                    failure.stats.wall_time = start.elapsed();
                    return (rounds, Err(failure));
                }
                diff_order = (diff_order + 1).min(order_cap);
                max_aux = max_aux.saturating_mul(2).max(1);
            }
        }
    }
}
