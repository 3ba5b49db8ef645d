//! Metrical colourings of prime windows and the Ramsey encodings of
//! arithmetic progressions, twin primes and prime gaps.
//!
//! Index `i` of every instance here is the host `K_{i+1}` (complete family
//! with offset 1). Its vertices carry the window primes through the fixed map
//! `Θ[i,m]: v_r -> p_{m+r}`, `r = 0..=i`, and the edge `{v_r, v_s}` is
//! coloured `|p_{m+r} - p_{m+s}|`. The alphabet is `{0, ..., p_{m+i+1} - 1}`,
//! written as decimal labels.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::engine::{
    numeric_labels, ramsey_number, Admissible, EngineConfig, EngineError, Label, LabeledTarget, PerIndex,
    RamseyBase, RamseySymbol, SearchReport, SearchStatus,
};
use crate::family::GraphFamily;
use crate::graph::{complete_graph, find_colored_occurrence, path_graph, Graph};

pub const DEFAULT_SIEVE_BOUND: u64 = 10_000_000;

pub const THETA_CONVENTION: &str = "Theta[i,m]: v_r -> p_{m+r} for r = 0..i (p_{m+i+1} bounds the alphabet only)";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrimeError {
    #[error("the sieve up to {bound} holds {available} primes but p_{index} is needed; a bound of at least {required_bound} suffices")]
    SieveTooSmall { index: usize, bound: u64, available: usize, required_bound: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// All primes up to `bound`, 1-indexed through [`PrimeTable::nth`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeTable {
    bound: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    /// Sieve of Eratosthenes.
    pub fn sieve(bound: u64) -> Self {
        let n = bound as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for p in 2..=n {
            if composite[p] {
                continue;
            }
            primes.push(p as u64);
            let mut j = p.saturating_mul(p);
            while j <= n {
                composite[j] = true;
                j += p;
            }
        }
        Self { bound, primes }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// `p_n`, with `p_1 = 2`.
    pub fn nth(&self, n: usize) -> Result<u64, PrimeError> {
        if n == 0 {
            return Err(PrimeError::InvalidParameter("primes are indexed from 1".into()));
        }
        self.primes.get(n - 1).copied().ok_or(PrimeError::SieveTooSmall {
            index: n,
            bound: self.bound,
            available: self.primes.len(),
            required_bound: nth_prime_upper_bound(n),
        })
    }

    /// Fails unless `p_n` is in the table.
    pub fn require(&self, n: usize) -> Result<(), PrimeError> {
        self.nth(n).map(|_| ())
    }

    /// `p_a, ..., p_b`.
    pub fn window(&self, a: usize, b: usize) -> Result<Vec<u64>, PrimeError> {
        self.require(b)?;
        (a..=b).map(|n| self.nth(n)).collect()
    }
}

/// `p_n < n (ln n + ln ln n)` for `n >= 6`.
fn nth_prime_upper_bound(n: usize) -> u64 {
    if n < 6 {
        return 13;
    }
    let x = n as f64;
    (x * (x.ln() + x.ln().ln())).ceil() as u64
}

/// The metrical colouring of `K_{i+1}` induced by `Θ[i,m]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricalAssignment {
    pub host: Graph,
    /// `theta[r] = p_{m+r}`.
    pub theta: Vec<u64>,
    /// `p_{m+i+1}`; every colour is below it.
    pub alphabet_bound: u64,
    /// Colour of each host edge, edge id order.
    pub coloring: Vec<u64>,
}

impl MetricalAssignment {
    pub fn labels(&self) -> Vec<Label> {
        self.coloring.iter().map(|d| d.to_string()).collect()
    }
}

pub fn metrical_coloring(i: usize, m: usize, table: &PrimeTable) -> Result<MetricalAssignment, PrimeError> {
    if m == 0 {
        return Err(PrimeError::InvalidParameter("m must be at least 1".into()));
    }
    let host = complete_graph(i + 1).expect("i + 1 >= 1");
    let theta = table.window(m, m + i)?;
    let alphabet_bound = table.nth(m + i + 1)?;
    let coloring = host.edges().iter().map(|&(u, v)| theta[u].abs_diff(theta[v])).collect();
    Ok(MetricalAssignment { host, theta, alphabet_bound, coloring })
}

/// Base over `{K_{i+1}}` whose admissible set at `i` is the single metrical
/// colouring of the window.
pub fn metrical_base(m: usize, horizon: usize, table: &PrimeTable) -> Result<RamseyBase, PrimeError> {
    let mut alphabets = BTreeMap::new();
    let mut colorings = BTreeMap::new();
    for i in 0..=horizon {
        let a = metrical_coloring(i, m, table)?;
        alphabets.insert(i, numeric_labels(a.alphabet_bound as usize));
        colorings.insert(i, vec![a.labels()]);
    }
    Ok(RamseyBase {
        family: GraphFamily::complete(1),
        alphabet: PerIndex::Indexed(alphabets),
        admissible: Admissible::Explicit(PerIndex::Indexed(colorings)),
    })
}

fn gap_path(t: usize, gap: u64) -> LabeledTarget {
    LabeledTarget::monochromatic(path_graph(t).expect("t >= 1"), gap.to_string())
}

/// The window `{p_m, ..., p_{m+i}}` contains `a, a+g, ..., a+t*g` for some
/// `g` in `gaps`.
fn window_has_ap(window: &[u64], t: usize, gaps: &[u64]) -> Option<Vec<u64>> {
    let set: HashSet<u64> = window.iter().copied().collect();
    gaps.iter().find_map(|&g| {
        window.iter().find_map(|&a| {
            let terms: Vec<u64> = (0..=t as u64).map(|s| a + s * g).collect();
            terms.iter().all(|x| set.contains(x)).then_some(terms)
        })
    })
}

/// Primes along a `g`-monochromatic `P_t` of the metrical colouring, in
/// increasing order, if such a path exists; checked to form an AP of gap `g`.
fn realize_path(a: &MetricalAssignment, t: usize, g: u64) -> Option<Result<Vec<u64>, String>> {
    let path = path_graph(t).expect("t >= 1");
    let occ = find_colored_occurrence(&path, &vec![g; t], &a.host, &a.coloring)?;
    let mut primes: Vec<u64> = occ.vertex_map.iter().map(|&v| a.theta[v]).collect();
    let monotone = primes.windows(2).all(|w| w[0] < w[1]) || primes.windows(2).all(|w| w[0] > w[1]);
    primes.sort_unstable();
    let ap = primes.windows(2).all(|w| w[1] - w[0] == g);
    Some(if monotone && ap { Ok(primes) } else { Err(format!("path {primes:?} is not a gap-{g} progression")) })
}

fn candidate_of(trace: &[(usize, bool)]) -> Option<usize> {
    trace.iter().rev().take_while(|e| e.1).last().map(|e| e.0)
}

fn persistent(trace: &[(usize, bool)]) -> bool {
    trace.windows(2).all(|w| !w[0].1 || w[1].1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeReport {
    pub problem: &'static str,
    pub t: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    pub m: usize,
    pub horizon: usize,
    pub candidate_index: Option<usize>,
    pub status: SearchStatus,
    pub realizing_primes: Option<Vec<u64>>,
    pub oracle_candidate: Option<usize>,
    pub oracle_agreement: bool,
    /// Once arrows holds it keeps holding on the searched range.
    pub persistence_verified: bool,
    /// Every monochromatic path found at a true index reads as a progression.
    pub paths_are_progressions: bool,
    pub theta_convention: &'static str,
    pub notes: Vec<String>,
    pub search: SearchReport,
}

fn validate(t: usize, m: usize) -> Result<(), PrimeError> {
    if t == 0 || m == 0 {
        return Err(PrimeError::InvalidParameter("t and m must be at least 1".into()));
    }
    Ok(())
}

/// Progressions of `t + 1` primes with common gap `k`, least term at least
/// `p_m`, inside growing windows.
pub fn ap_ramsey(
    t: usize,
    k: u64,
    m: usize,
    horizon: usize,
    table: &PrimeTable,
    config: &EngineConfig,
) -> Result<PrimeReport, PrimeError> {
    validate(t, m)?;
    if k == 0 {
        return Err(PrimeError::InvalidParameter("k must be at least 1".into()));
    }
    let symbol = RamseySymbol::uniform(vec![gap_path(t, k)]);
    gap_report("ap", t, Some(k), m, horizon, &symbol, &|_| vec![k], table, config)
}

/// Twin primes: `K_2` coloured 2.
pub fn twin_prime_ramsey(
    m: usize,
    horizon: usize,
    table: &PrimeTable,
    config: &EngineConfig,
) -> Result<PrimeReport, PrimeError> {
    let mut r = ap_ramsey(1, 2, m, horizon, table, config)?;
    r.problem = "twin";
    Ok(r)
}

/// At index `i`, targets `P_t` coloured `j` for every `0 < j < i`, over the
/// window starting at `p_1`.
pub fn greentao_ramsey(
    t: usize,
    horizon: usize,
    table: &PrimeTable,
    config: &EngineConfig,
) -> Result<PrimeReport, PrimeError> {
    validate(t, 1)?;
    let symbol = RamseySymbol {
        targets: PerIndex::indexed((0..=horizon).map(|i| (i, (1..i as u64).map(|j| gap_path(t, j)).collect()))),
    };
    let mut r = gap_report("greentao", t, None, 1, horizon, &symbol, &|i| (1..i as u64).collect(), table, config)?;
    r.notes.push("symbol read literally: targets (P_t, j) for 0 < j < i, so it changes with the index".into());
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
fn gap_report(
    problem: &'static str,
    t: usize,
    k: Option<u64>,
    m: usize,
    horizon: usize,
    symbol: &RamseySymbol,
    gaps: &dyn Fn(usize) -> Vec<u64>,
    table: &PrimeTable,
    config: &EngineConfig,
) -> Result<PrimeReport, PrimeError> {
    table.require(m + horizon + 1)?;
    let base = metrical_base(m, horizon, table)?;
    let mut search = ramsey_number(&base, symbol, horizon, config)?;
    search.convention.notes.push(THETA_CONVENTION.into());
    let trace = search.trace_values();

    let mut oracle = Vec::new();
    let mut paths_ok = true;
    let mut notes = Vec::new();
    let mut realized: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for &(i, holds) in &trace {
        let window = table.window(m, m + i)?;
        oracle.push((i, window_has_ap(&window, t, &gaps(i)).is_some()));
        if holds {
            let a = metrical_coloring(i, m, table)?;
            match gaps(i).into_iter().find_map(|g| realize_path(&a, t, g)) {
                Some(Ok(p)) => {
                    realized.insert(i, p);
                }
                Some(Err(e)) => {
                    paths_ok = false;
                    notes.push(format!("index {i}: {e}"));
                }
                None => {
                    paths_ok = false;
                    notes.push(format!("index {i}: arrows holds but no monochromatic path was found"));
                }
            }
        }
    }
    let candidate_index = search.candidate_value;
    let oracle_candidate = candidate_of(&oracle);
    let realizing_primes = candidate_index.and_then(|c| realized.get(&c).cloned());
    Ok(PrimeReport {
        problem,
        t,
        k,
        m,
        horizon,
        candidate_index,
        status: search.status,
        realizing_primes,
        oracle_candidate,
        oracle_agreement: oracle == trace && oracle_candidate == candidate_index,
        persistence_verified: persistent(&trace),
        paths_are_progressions: paths_ok,
        theta_convention: THETA_CONVENTION,
        notes,
        search,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PolignacMode {
    ShortCircuit,
    Exhaustive,
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexValue {
    pub index: usize,
    pub arrows: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolignacReport {
    pub t: usize,
    pub gap: u64,
    pub m: usize,
    pub horizon: usize,
    pub mode: PolignacMode,
    pub candidate_index: Option<usize>,
    pub status: SearchStatus,
    /// The consecutive primes realizing the gap at the candidate index.
    pub realizing_primes: Option<Vec<u64>>,
    pub oracle_candidate: Option<usize>,
    pub oracle_agreement: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub short_circuit_trace: Option<Vec<IndexValue>>,
    /// Largest index the exhaustive run covered.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive_horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes_agree: Option<bool>,
    pub theta_convention: &'static str,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchReport>,
}

/// Edge ids of the Hamiltonian path `v_0 v_1 ... v_i` in `K_{i+1}`.
fn hamiltonian_path_edges(host: &Graph) -> Vec<usize> {
    (1..host.vertex_count()).map(|r| host.edge_id(r - 1, r).expect("complete graph")).collect()
}

/// Admissible colourings at `i`: the metrical colouring on the path through
/// consecutive window primes, anything in `A_{(i,m)}` elsewhere.
pub fn polignac_base(m: usize, horizon: usize, table: &PrimeTable) -> Result<RamseyBase, PrimeError> {
    let mut alphabets = BTreeMap::new();
    let mut forced = BTreeMap::new();
    for i in 0..=horizon {
        let a = metrical_coloring(i, m, table)?;
        alphabets.insert(i, numeric_labels(a.alphabet_bound as usize));
        let f: BTreeMap<usize, Label> =
            hamiltonian_path_edges(&a.host).into_iter().map(|e| (e, a.coloring[e].to_string())).collect();
        forced.insert(i, f);
    }
    Ok(RamseyBase {
        family: GraphFamily::complete(1),
        alphabet: PerIndex::Indexed(alphabets),
        admissible: Admissible::Generated { forced: PerIndex::Indexed(forced), free: None },
    })
}

/// `|A_{(i,m)}|^(free edges)` for the Polignac base at `i`.
pub fn polignac_points(i: usize, m: usize, table: &PrimeTable) -> Result<u128, PrimeError> {
    let free = ((i + 1) * i / 2 - i) as u32;
    Ok((table.nth(m + i + 1)? as u128).saturating_pow(free))
}

/// Gap `2t` between consecutive primes from `p_m` on.
///
/// The short-circuit mode uses the fact that with more than one colour
/// available, every completion has a `2t`-coloured edge exactly when a forced
/// path edge has one; it scans consecutive gaps. The exhaustive mode runs the
/// engine over every completion of the free edges, on the indices whose
/// admissible sets fit `config.max_points`.
pub fn polignac_ramsey(
    t: usize,
    m: usize,
    horizon: usize,
    mode: PolignacMode,
    table: &PrimeTable,
    config: &EngineConfig,
) -> Result<PolignacReport, PrimeError> {
    validate(t, m)?;
    table.require(m + horizon + 1)?;
    let gap = 2 * t as u64;
    let mut notes = Vec::new();

    // Gap oracle: independent of any graph machinery.
    let window = table.window(m, m + horizon)?;
    let first_gap = window.windows(2).position(|w| w[1] - w[0] == gap);
    let oracle: Vec<(usize, bool)> = (0..=horizon).map(|i| (i, first_gap.is_some_and(|r| r < i))).collect();
    let oracle_candidate = candidate_of(&oracle);

    let short = (mode != PolignacMode::Exhaustive).then(|| {
        (0..=horizon)
            .map(|i| {
                let a = metrical_coloring(i, m, table)?;
                let hit = hamiltonian_path_edges(&a.host).into_iter().any(|e| a.coloring[e] == gap);
                // The short cut needs a colour other than the gap for free edges.
                debug_assert!(a.alphabet_bound > 1);
                Ok((i, hit))
            })
            .collect::<Result<Vec<_>, PrimeError>>()
    });
    let short = short.transpose()?;

    let (search, exhaustive_horizon) = if mode != PolignacMode::ShortCircuit {
        let mut top = None;
        for i in 0..=horizon {
            if polignac_points(i, m, table)? > config.max_points {
                break;
            }
            top = Some(i);
        }
        match top {
            Some(h) => {
                if h < horizon {
                    notes.push(format!(
                        "exhaustive mode covers indices 0..={h}; index {} exceeds the capacity bound {}",
                        h + 1,
                        config.max_points
                    ));
                }
                let base = polignac_base(m, h, table)?;
                let symbol = RamseySymbol::uniform(vec![gap_path(1, gap)]);
                let mut report = ramsey_number(&base, &symbol, h, config)?;
                report.convention.notes.push(THETA_CONVENTION.into());
                (Some(report), Some(h))
            }
            None => {
                return Err(EngineError::CapacityExceeded {
                    index: 0,
                    needed: polignac_points(0, m, table)?,
                    bound: config.max_points,
                }
                .into())
            }
        }
    } else {
        (None, None)
    };

    let ex_trace = search.as_ref().map(|s| s.trace_values());
    let modes_agree = match (&short, &ex_trace) {
        (Some(s), Some(e)) => Some(s.iter().zip(e).all(|(a, b)| a == b)),
        _ => None,
    };
    let trace = short.clone().or(ex_trace.clone()).expect("at least one mode ran");
    let candidate_index = candidate_of(&trace);
    let covered = trace.len();
    let oracle_agreement = oracle[..covered] == trace[..] && (covered <= horizon || oracle_candidate == candidate_index);
    let realizing_primes = match (candidate_index, first_gap) {
        (Some(_), Some(r)) => Some(vec![window[r], window[r + 1]]),
        _ => None,
    };
    Ok(PolignacReport {
        t,
        gap,
        m,
        horizon,
        mode,
        candidate_index,
        status: if candidate_index.is_some() { SearchStatus::Found } else { SearchStatus::NotFoundWithinHorizon },
        realizing_primes,
        oracle_candidate,
        oracle_agreement,
        short_circuit_trace: short.map(|s| s.into_iter().map(|(index, arrows)| IndexValue { index, arrows }).collect()),
        exhaustive_horizon,
        modes_agree,
        theta_convention: THETA_CONVENTION,
        notes,
        search,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZhangEntry {
    pub m: usize,
    pub candidate_index: Option<usize>,
    pub realizing_primes: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZhangRow {
    pub t: usize,
    pub gap: u64,
    /// Found within the horizon for every `m <= m_max`; says nothing beyond.
    pub found_for_all_m: bool,
    pub entries: Vec<ZhangEntry>,
}

/// For each `t <= t_max`, whether gap `2t` shows up after `p_m` within the
/// horizon for every `m <= m_max` (short-circuit Polignac runs).
pub fn zhang_ramsey_scan(
    m_max: usize,
    t_max: usize,
    horizon: usize,
    table: &PrimeTable,
    config: &EngineConfig,
) -> Result<Vec<ZhangRow>, PrimeError> {
    (1..=t_max)
        .map(|t| {
            let entries = (1..=m_max)
                .map(|m| {
                    let r = polignac_ramsey(t, m, horizon, PolignacMode::ShortCircuit, table, config)?;
                    Ok(ZhangEntry { m, candidate_index: r.candidate_index, realizing_primes: r.realizing_primes })
                })
                .collect::<Result<Vec<_>, PrimeError>>()?;
            Ok(ZhangRow {
                t,
                gap: 2 * t as u64,
                found_for_all_m: entries.iter().all(|e| e.candidate_index.is_some()),
                entries,
            })
        })
        .collect()
}
