//! Exhaustive minimum-length schedule search for small instances, and
//! instance-level checks of the lower bounds and optimality claims.
//!
//! The search is iterative deepening over sets of distinct candidate
//! transmissions. Both decode modes are order independent (progressive
//! decoding replays the list to a fixpoint), so only sets are enumerated.
//! When `M = C` the windows are invariant under rotation, so some
//! transmission can be assumed to lie inside client 0's window; the first
//! pick is restricted to those payloads.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::decoder::{DecodeMode, DecodingReport};
use crate::instance::{MessageId, ProblemInstance, Regime, UncodedThreshold};
use crate::schemes::{Schedule, Transmission};

/// Widest message index the bitmask search supports.
pub const MAX_SEARCH_MESSAGES: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Upper bound on `C * (2^K - 1)`.
    pub candidate_cap: u64,
    /// Deepest schedule length searched. `None` means `S + 4`, or the uncoded
    /// counting floor when that is larger.
    pub depth_cap: Option<usize>,
    /// Upper bound on the number of candidate sets at a single depth.
    pub combination_cap: u128,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            candidate_cap: 100_000,
            depth_cap: None,
            combination_cap: 1_000_000_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CapKind {
    Candidates,
    Combinations,
    Messages,
}

impl fmt::Display for CapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapKind::Candidates => f.write_str("candidate cap"),
            CapKind::Combinations => f.write_str("combination cap"),
            CapKind::Messages => f.write_str("message limit"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{cap} exceeded: need {required}, limit {limit}")]
    CapExceeded {
        cap: CapKind,
        limit: u128,
        required: u128,
    },
    #[error("no satisfying schedule with at most {depth_cap} transmissions (depth cap)")]
    Infeasible { depth_cap: usize },
}

/// Deduplicated candidate transmissions in search order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSpace {
    pub candidates: Vec<Transmission>,
    /// `(client, payload)` pairs before deduplicating by payload.
    pub raw_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub n_min: usize,
    pub witness: Schedule,
    /// Candidate transmissions after deduplication.
    pub search_space: usize,
    pub raw_candidates: usize,
    /// Depth the search started from.
    pub floor: usize,
    pub mode: DecodeMode,
}

fn sort_candidates(mut candidates: Vec<Transmission>) -> Vec<Transmission> {
    candidates.sort_by(|a, b| {
        a.payload
            .len()
            .cmp(&b.payload.len())
            .then(a.transmitter.cmp(&b.transmitter))
            .then_with(|| a.payload.iter().cmp(b.payload.iter()))
    });
    candidates
}

/// Every nonempty subset of every client's window, one entry per distinct
/// payload, attributed to the smallest client holding it.
pub fn enumerate_transmissions(
    instance: &ProblemInstance,
    candidate_cap: u64,
) -> Result<CandidateSpace, OracleError> {
    let k = instance.k();
    let per_client = if k >= 64 { u128::MAX } else { (1u128 << k) - 1 };
    let required = per_client.saturating_mul(instance.c() as u128);
    if required > candidate_cap as u128 {
        return Err(OracleError::CapExceeded {
            cap: CapKind::Candidates,
            limit: candidate_cap as u128,
            required,
        });
    }

    let mut seen = std::collections::BTreeSet::new();
    let mut candidates = Vec::new();
    let mut raw_count = 0;
    for client in instance.clients() {
        let start = instance.window_start(client);
        let window: Vec<MessageId> = (0..k).map(|t| instance.message(start + t)).collect();
        for bits in 1..(1u64 << k) {
            raw_count += 1;
            let payload: std::collections::BTreeSet<MessageId> = window
                .iter()
                .enumerate()
                .filter(|(t, _)| bits >> t & 1 == 1)
                .map(|(_, &x)| x)
                .collect();
            if seen.insert(payload.clone()) {
                candidates.push(Transmission {
                    transmitter: client,
                    payload,
                });
            }
        }
    }
    Ok(CandidateSpace {
        candidates: sort_candidates(candidates),
        raw_count,
    })
}

/// Singleton payloads for every message some client holds.
pub fn uncoded_transmissions(instance: &ProblemInstance) -> CandidateSpace {
    let candidates = (0..instance.m())
        .filter_map(|x| {
            let x = MessageId(x);
            instance
                .clients()
                .find(|&c| instance.holds(c, x))
                .map(|c| Transmission::new(c, [x]))
        })
        .collect();
    CandidateSpace {
        candidates: sort_candidates(candidates),
        raw_count: instance.c() * instance.k(),
    }
}

/// Length below which no uncoded schedule can satisfy every client. With
/// `M = C` each uncoded message is new to exactly `M - K` clients.
pub fn uncoded_floor(instance: &ProblemInstance) -> usize {
    let s = instance.s();
    if s == 0 {
        return 0;
    }
    let mut floor = s + 1;
    if instance.is_square() {
        let (m, k) = (instance.m(), instance.k());
        floor = floor.max((m * s).div_ceil(m - k));
    }
    floor
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

struct Search {
    mode: DecodeMode,
    demand: u32,
    windows: Vec<u128>,
    masks: Vec<u128>,
    /// Static decode of candidate `c` by client `i`: one bit or zero.
    gains: Vec<Vec<u128>>,
}

impl Search {
    fn new(instance: &ProblemInstance, candidates: &[Transmission], mode: DecodeMode) -> Self {
        let windows: Vec<u128> = instance
            .clients()
            .map(|client| {
                let start = instance.window_start(client);
                (0..instance.k()).fold(0u128, |acc, t| acc | 1 << instance.message(start + t).0)
            })
            .collect();
        let masks: Vec<u128> = candidates
            .iter()
            .map(|t| t.payload.iter().fold(0u128, |acc, x| acc | 1 << x.0))
            .collect();
        let gains = masks
            .iter()
            .map(|&mask| {
                windows
                    .iter()
                    .map(|&w| {
                        let unknown = mask & !w;
                        if unknown.count_ones() == 1 {
                            unknown
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        Search {
            mode,
            demand: 0,
            windows,
            masks,
            gains,
        }
    }

    fn progressive_gain(&self, client: usize, chosen: &[usize]) -> u32 {
        let window = self.windows[client];
        let mut knowledge = window;
        loop {
            let mut changed = false;
            for &c in chosen {
                let unknown = self.masks[c] & !knowledge;
                if unknown.count_ones() == 1 {
                    knowledge |= unknown;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (knowledge & !window).count_ones()
    }

    fn satisfied(&self, chosen: &[usize], decoded: &[u128]) -> bool {
        match self.mode {
            DecodeMode::Static => decoded.iter().all(|d| d.count_ones() >= self.demand),
            DecodeMode::Progressive => {
                (0..self.windows.len()).all(|i| self.progressive_gain(i, chosen) >= self.demand)
            }
        }
    }

    /// Per-client potential: distinct static decodes, or for progressive
    /// decoding the number of chosen payloads not inside the window (each
    /// transmission yields at most one message per client).
    fn potential(&self, client: usize, candidate: usize) -> u128 {
        match self.mode {
            DecodeMode::Static => self.gains[candidate][client],
            DecodeMode::Progressive => {
                u128::from(self.masks[candidate] & !self.windows[client] != 0)
            }
        }
    }

    /// Depth-first over increasing positions in `pool`. `state[i]` is a
    /// decoded-message mask (static) or a count of useful payloads
    /// (progressive).
    fn descend(
        &self,
        pool: &[usize],
        start: usize,
        remaining: usize,
        state: &[u128],
        chosen: &mut Vec<usize>,
    ) -> bool {
        if remaining == 0 {
            return self.satisfied(chosen, state);
        }
        let short = |v: u128| -> bool {
            let have = match self.mode {
                DecodeMode::Static => v.count_ones() as usize,
                DecodeMode::Progressive => v as usize,
            };
            have + remaining < self.demand as usize
        };
        if state.iter().any(|&v| short(v)) {
            return false;
        }
        if pool.len() < start + remaining {
            return false;
        }
        let mut next = vec![0u128; state.len()];
        for pos in start..=pool.len() - remaining {
            let c = pool[pos];
            for (i, slot) in next.iter_mut().enumerate() {
                *slot = match self.mode {
                    DecodeMode::Static => state[i] | self.potential(i, c),
                    DecodeMode::Progressive => state[i] + self.potential(i, c),
                };
            }
            chosen.push(c);
            if self.descend(pool, pos + 1, remaining - 1, &next, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    fn search_depth(&self, depth: usize, symmetric: bool) -> Option<Vec<usize>> {
        let n = self.masks.len();
        let clients = self.windows.len();
        let anchors: Vec<usize> = if symmetric {
            (0..n)
                .filter(|&c| self.masks[c] & !self.windows[0] == 0)
                .collect()
        } else {
            (0..n).collect()
        };
        anchors.par_iter().find_map_first(|&anchor| {
            let pool: Vec<usize> = if symmetric {
                (0..n).filter(|&c| c != anchor).collect()
            } else {
                (anchor + 1..n).collect()
            };
            let state: Vec<u128> = (0..clients).map(|i| self.potential(i, anchor)).collect();
            let mut chosen = vec![anchor];
            self.descend(&pool, 0, depth - 1, &state, &mut chosen)
                .then_some(chosen)
        })
    }
}

fn run_search(
    instance: &ProblemInstance,
    space: CandidateSpace,
    floor: usize,
    mode: DecodeMode,
    config: &OracleConfig,
) -> Result<OracleResult, OracleError> {
    if instance.m() > MAX_SEARCH_MESSAGES {
        return Err(OracleError::CapExceeded {
            cap: CapKind::Messages,
            limit: MAX_SEARCH_MESSAGES as u128,
            required: instance.m() as u128,
        });
    }
    let s = instance.s();
    let depth_cap = config.depth_cap.unwrap_or_else(|| (s + 4).max(floor));
    let result =
        |n_min: usize, transmissions: Vec<Transmission>, space: &CandidateSpace| OracleResult {
            n_min,
            witness: Schedule::manual(*instance, transmissions),
            search_space: space.candidates.len(),
            raw_candidates: space.raw_count,
            floor,
            mode,
        };
    if s == 0 {
        return Ok(result(0, Vec::new(), &space));
    }

    let mut search = Search::new(instance, &space.candidates, mode);
    search.demand = s as u32;
    let symmetric = instance.is_square();
    let n = space.candidates.len();
    for depth in floor.max(1)..=depth_cap {
        let anchors = if symmetric {
            (0..n)
                .filter(|&c| search.masks[c] & !search.windows[0] == 0)
                .count() as u128
        } else {
            1
        };
        let sets = if symmetric {
            anchors.saturating_mul(binomial(n.saturating_sub(1), depth - 1))
        } else {
            binomial(n, depth)
        };
        if sets > config.combination_cap {
            return Err(OracleError::CapExceeded {
                cap: CapKind::Combinations,
                limit: config.combination_cap,
                required: sets,
            });
        }
        if let Some(chosen) = search.search_depth(depth, symmetric) {
            let transmissions = chosen
                .into_iter()
                .map(|c| space.candidates[c].clone())
                .collect();
            return Ok(result(depth, transmissions, &space));
        }
    }
    Err(OracleError::Infeasible { depth_cap })
}

/// Shortest satisfying schedule over all encodable payloads.
pub fn brute_force_min(
    instance: &ProblemInstance,
    mode: DecodeMode,
    config: &OracleConfig,
) -> Result<OracleResult, OracleError> {
    let space = enumerate_transmissions(instance, config.candidate_cap)?;
    let floor = if instance.s() == 0 {
        0
    } else {
        instance.s() + 1
    };
    run_search(instance, space, floor, mode, config)
}

/// Shortest satisfying schedule using uncoded transmissions only.
pub fn uncoded_min(
    instance: &ProblemInstance,
    mode: DecodeMode,
    config: &OracleConfig,
) -> Result<OracleResult, OracleError> {
    let space = uncoded_transmissions(instance);
    run_search(instance, space, uncoded_floor(instance), mode, config)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoremId {
    /// At least `S+1` transmissions.
    LowerBound,
    /// Served total at least `C*S`.
    ServedTotal,
    /// Uncoded optimal for `K <= (C+2)/3`.
    UncodedOptimal,
    /// Square schedules serve extra clients unchanged.
    ScaleOut,
    /// `S+1` achieved in the regimes that claim it.
    Achievability,
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let id = match self {
            TheoremId::LowerBound => "T1",
            TheoremId::ServedTotal => "T2",
            TheoremId::UncodedOptimal => "T3",
            TheoremId::ScaleOut => "T4",
            TheoremId::Achievability => "T5",
        };
        f.write_str(id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("pass"),
            Verdict::Fail => f.write_str("FAIL"),
            Verdict::NotApplicable => f.write_str("n/a"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremCheck {
    pub id: TheoremId,
    pub verdict: Verdict,
    pub detail: String,
}

impl TheoremCheck {
    fn new(id: TheoremId, ok: bool, detail: String) -> Self {
        let verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        TheoremCheck {
            id,
            verdict,
            detail,
        }
    }

    fn skip(id: TheoremId, detail: impl Into<String>) -> Self {
        TheoremCheck {
            id,
            verdict: Verdict::NotApplicable,
            detail: detail.into(),
        }
    }
}

/// Evaluates the lower bounds and optimality claims against one schedule and
/// its decoding report. Failures are reported, never raised.
pub fn check_theorems(
    schedule: &Schedule,
    report: &DecodingReport,
    config: &OracleConfig,
) -> Vec<TheoremCheck> {
    let instance = &schedule.instance;
    let (m, c, s) = (instance.m(), instance.c(), instance.s());
    let mut checks = Vec::with_capacity(5);

    checks.push(if report.satisfied && s >= 1 {
        TheoremCheck::new(
            TheoremId::LowerBound,
            report.n_used > s,
            format!("N={} vs S+1={}", report.n_used, s + 1),
        )
    } else {
        TheoremCheck::skip(TheoremId::LowerBound, "schedule unsatisfied or S=0")
    });

    checks.push(if report.satisfied {
        TheoremCheck::new(
            TheoremId::ServedTotal,
            report.served_total() >= c * s,
            format!(
                "sum R_i={} vs C*S={} ({} raw decode events)",
                report.served_total(),
                c * s,
                report.decode_event_total()
            ),
        )
    } else {
        TheoremCheck::skip(TheoremId::ServedTotal, "schedule unsatisfied")
    });

    checks.push(if UncodedThreshold::of(instance).by_clients && s >= 1 {
        match (
            brute_force_min(instance, report.mode, config),
            uncoded_min(instance, report.mode, config),
        ) {
            (Ok(full), Ok(uncoded)) => TheoremCheck::new(
                TheoremId::UncodedOptimal,
                full.n_min == uncoded.n_min,
                format!("exhaustive {} vs uncoded {}", full.n_min, uncoded.n_min),
            ),
            (Err(e), _) | (_, Err(e)) => {
                TheoremCheck::skip(TheoremId::UncodedOptimal, format!("search skipped: {e}"))
            }
        }
    } else {
        TheoremCheck::skip(TheoremId::UncodedOptimal, "K > (C+2)/3")
    });

    checks.push(if instance.is_square() && report.satisfied {
        let mut failed = Vec::new();
        for wider in [m + 1, 2 * m] {
            let ok = schedule
                .with_clients(wider)
                .ok()
                .and_then(|s| s.decode(report.mode).ok())
                .is_some_and(|r| r.satisfied);
            if !ok {
                failed.push(wider);
            }
        }
        TheoremCheck::new(
            TheoremId::ScaleOut,
            failed.is_empty(),
            if failed.is_empty() {
                format!("re-verified on C'={} and C'={}", m + 1, 2 * m)
            } else {
                format!("fails on C'={failed:?}")
            },
        )
    } else {
        TheoremCheck::skip(TheoremId::ScaleOut, "needs a satisfied M = C schedule")
    });

    checks.push(match schedule.regime {
        Some(r) if r.claims_s_plus_one() && s >= 1 => TheoremCheck::new(
            TheoremId::Achievability,
            report.satisfied && report.n_used == s + 1,
            format!(
                "regime {r}: N={} (S+1={}), satisfied={}",
                report.n_used,
                s + 1,
                report.satisfied
            ),
        ),
        _ => TheoremCheck::skip(TheoremId::Achievability, "regime does not claim S+1"),
    });

    checks
}

/// Whether the regime's construction is claimed optimal.
pub fn regime_claims_optimal(regime: Regime, s: usize) -> bool {
    match regime {
        Regime::A | Regime::B { .. } | Regime::DHalf | Regime::EHigh => true,
        Regime::CMid => s == 1,
        Regime::Unclassified => false,
    }
}
