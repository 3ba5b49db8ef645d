//! Built-in invariant suites and small random instance generators.
//!
//! [`run_selftest`] checks field arithmetic, embedding counts, the indicator
//! zero-set property, backend agreement, the monotonicity properties, resolution
//! and embedding invariance, the prime-encoding oracles and worker-count
//! determinism. Every failure carries a reproducer.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::{
    classical_instance, embed_alphabet, numeric_labels, ramsey_number, resolution_invariance_check, Admissible,
    EngineConfig, Label, LabeledTarget, PerIndex, RamseyBase, RamseySymbol,
};
use crate::family::GraphFamily;
use crate::field::{prime_power, AlphabetInjection, FieldElement, FieldSpec};
use crate::graph::{complete_graph, count_embeddings, cycle_graph, path_graph, Graph};
use crate::indicator::{build_indicator, evaluate, ColoredTarget, Coloring};
use crate::primes::{ap_ramsey, polignac_ramsey, twin_prime_ramsey, PolignacMode, PrimeTable};

/// A small random instance over `K_1..K_5` or `P_1..P_5`.
#[derive(Clone, Debug)]
pub struct SmallInstance {
    pub base: RamseyBase,
    pub symbol: RamseySymbol,
    pub horizon: usize,
}

/// `K_2, P_2, K_3, P_3, K_{1,3}, 2K_2`.
pub fn small_target_graphs() -> Vec<Graph> {
    vec![
        complete_graph(2).unwrap(),
        path_graph(2).unwrap(),
        complete_graph(3).unwrap(),
        path_graph(3).unwrap(),
        Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap(),
        Graph::new(4, [(0, 1), (2, 3)]).unwrap(),
    ]
}

pub fn sample_target(rng: &mut impl Rng, alphabet: &[Label]) -> LabeledTarget {
    let graph = small_target_graphs().choose(rng).unwrap().clone();
    let coloring = (0..graph.edge_count()).map(|_| alphabet.choose(rng).unwrap().clone()).collect();
    LabeledTarget::new(graph, coloring)
}

/// Maximal base with 2 or 3 labels; the symbol is up to two random coloured
/// targets, half the time on top of a monochromatic copy of one graph per label.
pub fn sample_instance(rng: &mut impl Rng) -> SmallInstance {
    let a = rng.gen_range(2..=3);
    let alphabet: Vec<Label> = if rng.gen_bool(0.5) {
        numeric_labels(a)
    } else {
        ["r", "g", "b"][..a].iter().map(|s| s.to_string()).collect()
    };
    let family = if rng.gen_bool(0.75) { GraphFamily::complete(0) } else { GraphFamily::path(0) };
    let mut targets: Vec<LabeledTarget> = Vec::new();
    if rng.gen_bool(0.5) {
        // one monochromatic copy of a small graph per label
        let graphs = small_target_graphs();
        let x = graphs[..4].choose(rng).unwrap();
        targets.extend(alphabet.iter().map(|l| LabeledTarget::monochromatic(x.clone(), l.clone())));
    }
    let n_random = rng.gen_range(usize::from(targets.is_empty())..=2);
    targets.extend((0..n_random).map(|_| sample_target(rng, &alphabet)));
    SmallInstance {
        base: RamseyBase::maximal(family, alphabet),
        symbol: RamseySymbol::uniform(targets),
        horizon: 5,
    }
}

/// A sub-base: each edge of each `G_i` is forced to a random label with
/// probability 1/3.
pub fn sample_restriction(rng: &mut impl Rng, inst: &SmallInstance) -> RamseyBase {
    let alphabet = inst.base.alphabet.at(inst.base.family.first_index()).unwrap().clone();
    let mut forced = BTreeMap::new();
    for i in inst.base.family.first_index()..=inst.horizon {
        let g = inst.base.family.member(i).unwrap();
        let mut f = BTreeMap::new();
        for e in 0..g.edge_count() {
            if rng.gen_bool(1.0 / 3.0) {
                f.insert(e, alphabet.choose(rng).unwrap().clone());
            }
        }
        forced.insert(i, f);
    }
    RamseyBase {
        admissible: Admissible::Generated { forced: PerIndex::Indexed(forced), free: None },
        ..inst.base.clone()
    }
}

/// A uniformly random injection of `n` labels into `field`.
pub fn sample_injection(rng: &mut impl Rng, n: usize, field: &FieldSpec) -> AlphabetInjection {
    let mut elements = field.all_elements();
    elements.shuffle(rng);
    elements.truncate(n);
    AlphabetInjection::new(field.clone(), elements).unwrap()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    /// The first failing case.
    pub failure: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SelftestOptions {
    pub workers: usize,
    pub seed: u64,
    /// Replace field tables with damaged copies in the arithmetic suite.
    pub corrupt_field: bool,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self { workers: 2, seed: 0x5eed, corrupt_field: false }
    }
}

struct Suite {
    name: &'static str,
    checks: usize,
    failure: Option<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, checks: 0, failure: None }
    }

    fn check(&mut self, ok: bool, reproducer: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(reproducer());
        }
    }

    fn fail(&mut self, reproducer: String) {
        self.check(false, || reproducer);
    }

    fn done(self) -> SuiteResult {
        SuiteResult { name: self.name, passed: self.failure.is_none(), checks: self.checks, failure: self.failure }
    }
}

fn brute_force_count(x: &Graph, g: &Graph) -> usize {
    fn go(x: &Graph, g: &Graph, map: &mut Vec<usize>, count: &mut usize) {
        if map.len() == x.vertex_count() {
            if x.edges().iter().all(|&(u, v)| g.is_adjacent(map[u], map[v])) {
                *count += 1;
            }
            return;
        }
        for h in 0..g.vertex_count() {
            if !map.contains(&h) {
                map.push(h);
                go(x, g, map, count);
                map.pop();
            }
        }
    }
    let mut count = 0;
    go(x, g, &mut Vec::new(), &mut count);
    count
}

fn brute_force_contains(x: &Graph, psi: &[FieldElement], g: &Graph, rho: &[FieldElement]) -> bool {
    fn go(x: &Graph, psi: &[FieldElement], g: &Graph, rho: &[FieldElement], map: &mut Vec<usize>) -> bool {
        if map.len() == x.vertex_count() {
            return x.edges().iter().zip(psi).all(|(&(u, v), &c)| match g.edge_id(map[u], map[v]) {
                Some(e) => rho[e] == c,
                None => false,
            });
        }
        for h in 0..g.vertex_count() {
            if !map.contains(&h) {
                map.push(h);
                if go(x, psi, g, rho, map) {
                    return true;
                }
                map.pop();
            }
        }
        false
    }
    go(x, psi, g, rho, &mut Vec::new())
}

fn all_points(field: &FieldSpec, n: usize) -> impl Iterator<Item = Vec<FieldElement>> + '_ {
    let q = field.order() as u64;
    (0..q.pow(n as u32)).map(move |mut code| {
        (0..n)
            .map(|_| {
                let d = code % q;
                code /= q;
                field.element(d).unwrap()
            })
            .collect()
    })
}

fn field_suite(opts: &SelftestOptions) -> SuiteResult {
    let mut s = Suite::new("field: a^(q-1) = 1 and a * inv(a) = 1 for q <= 256");
    for q in 2..=256u64 {
        let Some((p, k)) = prime_power(q) else { continue };
        let mut f = FieldSpec::new(p, k).unwrap();
        if opts.corrupt_field {
            f = f.corrupted_for_fault_injection();
        }
        for a in f.all_elements().into_iter().skip(1) {
            let fermat = f.pow(a, q - 1);
            s.check(fermat == f.one(), || format!("GF({q}): element {} has a^(q-1) = {}", f.format(a), f.format(fermat)));
            let inv = f.inv(a).unwrap();
            s.check(f.mul(a, inv) == f.one(), || format!("GF({q}): element {} times its inverse is not 1", f.format(a)));
        }
    }
    s.done()
}

fn embedding_suite() -> SuiteResult {
    let mut s = Suite::new("graph: embedding counts match brute force");
    let mut graphs = small_target_graphs();
    graphs.extend([complete_graph(4).unwrap(), cycle_graph(4).unwrap(), cycle_graph(5).unwrap(), path_graph(4).unwrap()]);
    for x in &graphs {
        for g in &graphs {
            let fast = count_embeddings(x, g);
            let slow = brute_force_count(x, g);
            s.check(fast == slow, || format!("|G/X| for X = {:?}, G = {:?}: {fast} vs {slow}", x.edges(), g.edges()));
        }
    }
    s.done()
}

fn zero_set_suite() -> SuiteResult {
    let mut s = Suite::new("indicator: vanishing iff a coloured target occurs");
    let hosts = [
        complete_graph(3).unwrap(),
        path_graph(3).unwrap(),
        cycle_graph(4).unwrap(),
        complete_graph(4).unwrap(),
        Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap(),
    ];
    let targets = [complete_graph(2).unwrap(), path_graph(2).unwrap(), complete_graph(3).unwrap()];
    for q in [2u64, 3] {
        let f = FieldSpec::new(q as u32, 1).unwrap();
        for host in &hosts {
            for x in &targets {
                let colorings: Vec<Vec<FieldElement>> = vec![
                    vec![f.zero(); x.edge_count()],
                    vec![f.one(); x.edge_count()],
                    (0..x.edge_count()).map(|e| f.element(e as u64 % q).unwrap()).collect(),
                ];
                for psi in colorings {
                    let expr = build_indicator(host, &[ColoredTarget::new(x.clone(), psi.clone())], &f).unwrap();
                    for rho in all_points(&f, host.edge_count()) {
                        let vanishes = evaluate(&expr, &Coloring(rho.clone())).unwrap().is_zero();
                        let contains = brute_force_contains(x, &psi, host, &rho);
                        s.check(vanishes == contains, || {
                            format!(
                                "GF({q}) host {:?} target {:?} psi {:?} rho {:?}: vanishes {vanishes}, contains {contains}",
                                host.edges(),
                                x.edges(),
                                psi.iter().map(|a| a.code()).collect::<Vec<_>>(),
                                rho.iter().map(|a| a.code()).collect::<Vec<_>>()
                            )
                        });
                    }
                }
            }
        }
    }
    s.done()
}

fn describe(inst: &SmallInstance) -> String {
    let targets: Vec<String> = inst
        .symbol
        .targets
        .at(1)
        .into_iter()
        .flatten()
        .map(|t| format!("{:?} coloured {:?}", t.graph.edges(), t.coloring))
        .collect();
    format!(
        "family {} alphabet {:?} targets [{}] horizon {}",
        inst.base.family.index_rule(),
        inst.base.alphabet.at(inst.base.family.first_index()),
        targets.join("; "),
        inst.horizon
    )
}

fn random_suites(opts: &SelftestOptions, trials: usize) -> Vec<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let config = EngineConfig { workers: opts.workers, ..Default::default() };
    let mut agree = Suite::new("engine: direct and algebraic backends agree");
    let mut prefix = Suite::new("engine: arrows persists along maximal uniform hereditary instances");
    let mut extension = Suite::new("engine: enlarging the symbol never raises the number");
    let mut restriction = Suite::new("engine: restricting the base never raises the number");
    let mut resolution = Suite::new("engine: resolution leaves the number unchanged");
    let mut embedding = Suite::new("engine: the number does not depend on the alphabet injection");

    for _ in 0..trials {
        let inst = sample_instance(&mut rng);
        let report = match ramsey_number(&inst.base, &inst.symbol, inst.horizon, &config) {
            Ok(r) => r,
            Err(e) => {
                agree.fail(format!("{}: {e}", describe(&inst)));
                continue;
            }
        };
        agree.check(true, String::new);
        let trace = report.trace_values();
        prefix.check(trace.windows(2).all(|w| !w[0].1 || w[1].1), || format!("{}: trace {trace:?}", describe(&inst)));

        let mut bigger = inst.clone();
        let alphabet = inst.base.alphabet.at(1).unwrap().clone();
        if let Some(ts) = inst.symbol.targets.at(1) {
            let mut ts = ts.clone();
            ts.push(sample_target(&mut rng, &alphabet));
            bigger.symbol = RamseySymbol::uniform(ts);
        }
        match ramsey_number(&bigger.base, &bigger.symbol, bigger.horizon, &config) {
            Ok(r) => extension.check(
                report.candidate_value.is_none()
                    || r.candidate_value.is_some_and(|c| c <= report.candidate_value.unwrap()),
                || format!("{}: {:?} then {:?}", describe(&bigger), report.candidate_value, r.candidate_value),
            ),
            Err(e) => extension.fail(format!("{}: {e}", describe(&bigger))),
        }

        let sub = sample_restriction(&mut rng, &inst);
        match ramsey_number(&sub, &inst.symbol, inst.horizon, &config) {
            Ok(r) => restriction.check(
                report.candidate_value.is_none()
                    || r.candidate_value.is_some_and(|c| c <= report.candidate_value.unwrap()),
                || format!("{} restricted: {:?} then {:?}", describe(&inst), report.candidate_value, r.candidate_value),
            ),
            Err(e) => restriction.fail(format!("{} restricted: {e}", describe(&inst))),
        }

        match resolution_invariance_check(&inst.base, &inst.symbol, inst.horizon, &config) {
            Ok(c) => resolution.check(c.agrees, || format!("{}: {c:?}", describe(&inst))),
            Err(e) => resolution.fail(format!("{}: {e}", describe(&inst))),
        }

        let q = if alphabet.len() == 2 { [2u32, 3, 4][rng.gen_range(0..3)] } else { [3u32, 4][rng.gen_range(0..2)] };
        let (p, k) = prime_power(q as u64).unwrap();
        let field = FieldSpec::new(p, k).unwrap();
        let inj = sample_injection(&mut rng, alphabet.len(), &field);
        let range = inst.base.family.first_index()..=inst.horizon;
        match embed_alphabet(&inst.base, &inst.symbol, &PerIndex::Constant(inj.clone()), range)
            .and_then(|(b, s)| ramsey_number(&b, &s, inst.horizon, &config))
        {
            Ok(r) => embedding.check(
                r.candidate_value == report.candidate_value && r.trace_values() == trace,
                || format!("{} via {:?}: {:?} vs {:?}", describe(&inst), inj.images(), r.candidate_value, report.candidate_value),
            ),
            Err(e) => embedding.fail(format!("{} via {:?}: {e}", describe(&inst), inj.images())),
        }
    }
    vec![agree.done(), prefix.done(), extension.done(), restriction.done(), resolution.done(), embedding.done()]
}

fn prime_suite(opts: &SelftestOptions) -> SuiteResult {
    let mut s = Suite::new("primes: encodings agree with direct sieve scans");
    let table = PrimeTable::sieve(100_000);
    let config = EngineConfig { workers: opts.workers, ..Default::default() };
    for t in 1..=3 {
        for k in [2u64, 4, 6] {
            for m in [1, 2, 5] {
                match ap_ramsey(t, k, m, 10, &table, &config) {
                    Ok(r) => s.check(r.oracle_agreement && r.persistence_verified && r.paths_are_progressions, || {
                        format!("ap t={t} k={k} m={m}: engine {:?}, oracle {:?}", r.candidate_index, r.oracle_candidate)
                    }),
                    Err(e) => s.fail(format!("ap t={t} k={k} m={m}: {e}")),
                }
            }
        }
    }
    for m in 1..=10 {
        match twin_prime_ramsey(m, 10, &table, &config) {
            Ok(r) => s.check(r.oracle_agreement, || format!("twin m={m}: {:?} vs {:?}", r.candidate_index, r.oracle_candidate)),
            Err(e) => s.fail(format!("twin m={m}: {e}")),
        }
    }
    for (t, m) in [(1, 1), (1, 2), (2, 1), (3, 3)] {
        match polignac_ramsey(t, m, 6, PolignacMode::Both, &table, &config) {
            Ok(r) => s.check(r.modes_agree == Some(true) && r.oracle_agreement, || {
                format!("polignac t={t} m={m}: modes agree {:?}, oracle agreement {}", r.modes_agree, r.oracle_agreement)
            }),
            Err(e) => s.fail(format!("polignac t={t} m={m}: {e}")),
        }
    }
    s.done()
}

fn determinism_suite(opts: &SelftestOptions) -> SuiteResult {
    let mut s = Suite::new("determinism: reports identical across worker counts");
    let (base, symbol) = classical_instance(&[3, 3]).unwrap();
    let run = |workers: usize| {
        let config = EngineConfig { workers, witness_limit: 3, ..Default::default() };
        ramsey_number(&base, &symbol, 7, &config).map(|r| serde_json::to_string(&r).unwrap())
    };
    let table = PrimeTable::sieve(1000);
    let run_ap = |workers: usize| {
        let config = EngineConfig { workers, ..Default::default() };
        ap_ramsey(2, 6, 1, 8, &table, &config).map(|r| serde_json::to_string(&r).unwrap())
    };
    let n = opts.workers.max(2);
    s.check(run(1) == run(n), || format!("R(3,3) report differs between 1 and {n} workers"));
    s.check(run_ap(1) == run_ap(n), || format!("ap(2,6,1) report differs between 1 and {n} workers"));
    s.done()
}

/// Runs every suite; the build is healthy iff all results pass.
pub fn run_selftest(opts: &SelftestOptions) -> Vec<SuiteResult> {
    let mut out = vec![field_suite(opts), embedding_suite(), zero_set_suite()];
    out.extend(random_suites(opts, 20));
    out.push(prime_suite(opts));
    out.push(determinism_suite(opts));
    out
}
