//! Randomized cross-validation of the invariants relating the different
//! ways of computing the same Euler characteristics.
//!
//! Every case draws a finite group from a fixed library, builds a rigid
//! complex as a disjoint union of coset orbits (rigid by construction) and
//! checks that independent routes agree. Cases are generated from
//! per-case ChaCha streams, so a run is a pure function of its parameters.

use std::fmt;
use std::path::PathBuf;
use std::sync::OnceLock;

use eulerchi_core::groupoid::chi_gamma_atlas;
use eulerchi_core::translation::{
    anchor_map, chi_gamma_noniter, chi_gamma_strata, chi_order_ell, iterate_inertia, lambda_chi, DEFAULT_RECURSION_CAP,
};
use eulerchi_core::{CellMap, CellSpace, ConstructibleFunction, FiniteGroup, Presentation, RigidGComplex};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::format::{ComplexDoc, GroupDoc, PresentationDoc};
use crate::report::Report;

/// A group of the generator library with its subgroup lattice.
pub struct LibraryGroup {
    pub name: &'static str,
    pub group: FiniteGroup,
    pub subgroups: Vec<Vec<usize>>,
}

/// The fixed group library, ordered by group order.
pub fn library() -> &'static [LibraryGroup] {
    static LIBRARY: OnceLock<Vec<LibraryGroup>> = OnceLock::new();
    LIBRARY.get_or_init(|| {
        let c = FiniteGroup::cyclic;
        let mut groups = vec![
            ("C1", FiniteGroup::trivial()),
            ("C2", c(2)),
            ("C3", c(3)),
            ("C4", c(4)),
            ("C2xC2", c(2).direct_product(&c(2))),
            ("C5", c(5)),
            ("C6", c(6)),
            ("S3", FiniteGroup::symmetric(3)),
            ("C7", c(7)),
            ("C8", c(8)),
            ("D4", FiniteGroup::dihedral(4)),
            ("Q8", FiniteGroup::quaternion()),
            ("C2xC2xC2", c(2).direct_product(&c(2)).direct_product(&c(2))),
            ("D5", FiniteGroup::dihedral(5)),
            ("A4", FiniteGroup::alternating(4)),
            ("D6", FiniteGroup::dihedral(6)),
            ("C2xS3", c(2).direct_product(&FiniteGroup::symmetric(3))),
            ("C2xQ8", c(2).direct_product(&FiniteGroup::quaternion())),
            ("C3xS3", c(3).direct_product(&FiniteGroup::symmetric(3))),
            ("S4", FiniteGroup::symmetric(4)),
            ("C2xA4", c(2).direct_product(&FiniteGroup::alternating(4))),
            ("C3xQ8", c(3).direct_product(&FiniteGroup::quaternion())),
        ];
        groups.sort_by_key(|(_, g)| g.order());
        groups.into_iter().map(|(name, group)| LibraryGroup { name, subgroups: group.subgroups(), group }).collect()
    })
}

/// Presentations drawn for Γ.
pub fn presentation_pool() -> Vec<(&'static str, Presentation)> {
    vec![
        ("trivial", Presentation::trivial()),
        ("Z", Presentation::integers()),
        ("Z^2", Presentation::free_abelian(2)),
        ("Z^3", Presentation::free_abelian(3)),
        ("Z/2", Presentation::cyclic(2).expect("k ≥ 1")),
        ("Z/3", Presentation::cyclic(3).expect("k ≥ 1")),
        ("Z/4", Presentation::cyclic(4).expect("k ≥ 1")),
        ("Klein", Presentation::new(2, vec![vec![1, 1], vec![2, 2], vec![1, 2, 1, 2]]).expect("valid")),
        ("F2", Presentation::new(2, vec![]).expect("valid")),
        ("Z/2*Z/3", Presentation::new(2, vec![vec![1, 1], vec![2, 2, 2]]).expect("valid")),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    ThreeWay,
    OrderEll,
    Anchor,
    CellMapFubini,
    Multiplicativity,
    Additivity,
    Iteration,
    Morita,
    LevelSet,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::ThreeWay,
        Check::OrderEll,
        Check::Anchor,
        Check::CellMapFubini,
        Check::Multiplicativity,
        Check::Additivity,
        Check::Iteration,
        Check::Morita,
        Check::LevelSet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::ThreeWay => "three_way",
            Check::OrderEll => "order_ell",
            Check::Anchor => "anchor_fubini",
            Check::CellMapFubini => "cell_map_fubini",
            Check::Multiplicativity => "multiplicativity",
            Check::Additivity => "additivity",
            Check::Iteration => "iteration",
            Check::Morita => "morita_coset",
            Check::LevelSet => "levelset_vs_sum",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One orbit `G/H` of cells of dimension `dim`; `side` picks its half in
/// the additivity bipartition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub subgroup: Vec<usize>,
    pub dim: u32,
    pub side: bool,
}

/// Everything a case checks, generated up front so failures can be shrunk
/// and replayed.
#[derive(Debug, Clone)]
pub struct Instance {
    pub group: usize,
    pub orbits: Vec<Orbit>,
    pub gamma: usize,
    /// Second factor for multiplicativity.
    pub factor: RigidGComplex,
    pub iterate: (usize, usize),
    pub coset_subgroup: Vec<usize>,
    pub map: CellMap,
    pub map_function: ConstructibleFunction,
    pub function: ConstructibleFunction,
}

impl Instance {
    pub fn library_group(&self) -> &'static LibraryGroup {
        &library()[self.group]
    }

    pub fn complex(&self) -> RigidGComplex {
        let orbits: Vec<(Vec<usize>, u32)> = self.orbits.iter().map(|o| (o.subgroup.clone(), o.dim)).collect();
        RigidGComplex::induced(self.library_group().group.clone(), &orbits).expect("library subgroups")
    }

    pub fn presentation(&self) -> Presentation {
        presentation_pool()[self.gamma].1.clone()
    }

    /// Cell ids of the orbits with `side == want`.
    fn side_ids(&self, x: &RigidGComplex, want: bool) -> Vec<String> {
        let order = self.library_group().group.order();
        let mut ids = Vec::new();
        let mut offset = 0;
        for o in &self.orbits {
            let size = order / o.subgroup.len();
            if o.side == want {
                ids.extend(x.space().cells()[offset..offset + size].iter().map(|c| c.id.clone()));
            }
            offset += size;
        }
        ids
    }
}

#[derive(Debug, Clone)]
pub struct Config {
    pub seed: u64,
    pub cases: usize,
    pub max_group: usize,
    pub max_cells: usize,
    pub cap: usize,
    /// Deliberately wrong `Λχ` (off by one on complexes with a 1-cell), to
    /// exercise failure detection and shrinking.
    pub inject_fault: bool,
    pub dump: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            cases: 100,
            max_group: 24,
            max_cells: 60,
            cap: DEFAULT_RECURSION_CAP,
            inject_fault: false,
            dump: PathBuf::from("eulerchi-counterexample.json"),
        }
    }
}

/// A single compared pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub name: String,
    pub lhs: i64,
    pub rhs: i64,
}

impl Comparison {
    fn new(name: impl Into<String>, lhs: i64, rhs: i64) -> Self {
        Comparison { name: name.into(), lhs, rhs }
    }

    pub fn pass(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Outcome of one check on one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Compared(Vec<Comparison>),
    Error(String),
}

impl Outcome {
    pub fn failed(&self) -> bool {
        match self {
            Outcome::Compared(cs) => cs.iter().any(|c| !c.pass()),
            Outcome::Error(_) => true,
        }
    }

    fn comparisons(&self) -> usize {
        match self {
            Outcome::Compared(cs) => cs.len(),
            Outcome::Error(_) => 1,
        }
    }
}

fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

fn random_orbits(rng: &mut ChaCha8Rng, g: &LibraryGroup, count: usize, max_dim: u32, max_cells: usize) -> Vec<Orbit> {
    let mut orbits = Vec::new();
    let mut cells = 0;
    for _ in 0..count {
        let h = g.subgroups.choose(rng).expect("the trivial subgroup exists");
        let size = g.group.order() / h.len();
        let dim = rng.random_range(0..=max_dim);
        let side = rng.random_bool(0.5);
        if cells + size <= max_cells {
            cells += size;
            orbits.push(Orbit { subgroup: h.clone(), dim, side });
        }
    }
    orbits
}

/// A random cell space with ids `{prefix}{i}` and dimensions below `max_dim`.
pub fn random_space(rng: &mut impl Rng, prefix: &str, max_cells: usize, max_dim: u32) -> CellSpace {
    let n = rng.random_range(0..=max_cells);
    CellSpace::from_pairs((0..n).map(|i| (format!("{prefix}{i}"), rng.random_range(0..max_dim)))).expect("distinct ids")
}

/// A random constructible function with values in `-20..20`.
pub fn random_function(rng: &mut impl Rng, max_cells: usize) -> ConstructibleFunction {
    let space = random_space(rng, "c", max_cells, 4);
    let values = (0..space.len()).map(|_| rng.random_range(-20..20)).collect();
    ConstructibleFunction::from_values(space, values).expect("one value per cell")
}

/// A random cell map (fibers of dimension at least the target cell's) with
/// a random function on its source.
pub fn random_cell_map(rng: &mut impl Rng) -> (CellMap, ConstructibleFunction) {
    let target = CellSpace::from_pairs((0..rng.random_range(1..6)).map(|i| (format!("t{i}"), rng.random_range(0..3))))
        .expect("distinct ids");
    let n = rng.random_range(0..16);
    let mut cells = Vec::with_capacity(n);
    let mut assign = Vec::with_capacity(n);
    for k in 0..n {
        let t = rng.random_range(0..target.len());
        cells.push((format!("s{k}"), target.cells()[t].dim + rng.random_range(0..3)));
        assign.push(t);
    }
    let source = CellSpace::from_pairs(cells).expect("distinct ids");
    let values = (0..n).map(|_| rng.random_range(-9..9)).collect();
    let f = ConstructibleFunction::from_values(source.clone(), values).expect("one value per cell");
    (CellMap::from_indices(source, target, assign).expect("dimension-compatible"), f)
}

/// Generates case `case` of the run with the given parameters.
pub fn instance(config: &Config, case: usize) -> Instance {
    let mut rng = case_rng(config.seed, case);
    let lib = library();
    let eligible = lib.iter().take_while(|g| g.group.order() <= config.max_group.max(1)).count();
    let group = rng.random_range(0..eligible);
    let count = rng.random_range(1..=5);
    let orbits = random_orbits(&mut rng, &lib[group], count, 2, config.max_cells);
    let gamma = rng.random_range(0..presentation_pool().len());

    let small = rng.random_range(0..3);
    let factor_count = rng.random_range(1..=2);
    let factor_orbits = random_orbits(&mut rng, &lib[small], factor_count, 1, 3);
    let factor_orbits: Vec<(Vec<usize>, u32)> = factor_orbits.into_iter().map(|o| (o.subgroup, o.dim)).collect();
    let factor = RigidGComplex::induced(lib[small].group.clone(), &factor_orbits).expect("library subgroups");

    // p1 ∈ {trivial, Z, Z/2, Z/3}, p2 ∈ {trivial, Z, Z^2, Z/2, Klein}
    let iterate = ([0, 1, 4, 5][rng.random_range(0..4)], [0, 1, 2, 4, 7][rng.random_range(0..5)]);
    let coset_subgroup = lib[group].subgroups.choose(&mut rng).expect("non-empty").clone();
    let (map, map_function) = random_cell_map(&mut rng);
    let function = random_function(&mut rng, 12);
    Instance { group, orbits, gamma, factor, iterate, coset_subgroup, map, map_function, function }
}

/// Runs `check` on `inst`.
pub fn run_check(check: Check, inst: &Instance, config: &Config) -> Outcome {
    match compare(check, inst, config) {
        Ok(cs) => Outcome::Compared(cs),
        Err(e) => Outcome::Error(e.to_string()),
    }
}

fn faulty_lambda(p: &Presentation, x: &RigidGComplex, config: &Config) -> eulerchi_core::Result<i64> {
    let v = lambda_chi(p, x)?;
    let has_edge = x.space().cells().iter().any(|c| c.dim == 1);
    Ok(if config.inject_fault && has_edge { v + 1 } else { v })
}

fn compare(check: Check, inst: &Instance, config: &Config) -> eulerchi_core::Result<Vec<Comparison>> {
    let x = inst.complex();
    let p = inst.presentation();
    let mut out = Vec::new();
    match check {
        Check::ThreeWay => {
            let strata = chi_gamma_strata(&p, &x)?;
            out.push(Comparison::new("chi_gamma_strata = lambda_chi", strata, faulty_lambda(&p, &x, config)?));
            out.push(Comparison::new("chi_gamma_strata = chi_gamma_noniter", strata, chi_gamma_noniter(&p, &x)?));
        }
        Check::OrderEll => {
            for ell in 0..=3usize.min(config.cap) {
                let lhs = chi_order_ell(&x, ell, config.cap)?;
                let rhs = chi_gamma_noniter(&Presentation::free_abelian(ell), &x)?;
                out.push(Comparison::new(format!("chi_order_ell({ell}) = chi_gamma_noniter(Z^{ell})"), lhs, rhs));
            }
        }
        Check::Anchor => {
            let m = anchor_map(&p, &x)?;
            let one = ConstructibleFunction::one(m.source().clone());
            let weighted =
                ConstructibleFunction::from_fn(m.source().clone(), |c| 1 + c.id.len() as i64 % 3 - c.dim as i64);
            out.push(Comparison::new("integral of 1 over inertia = lambda_chi", one.integrate()?, lambda_chi(&p, &x)?));
            for (name, f) in [("1", one), ("weighted", weighted)] {
                out.push(Comparison::new(
                    format!("integral of pushforward({name}) = integral of {name}"),
                    m.pushforward(&f)?.integrate()?,
                    f.integrate()?,
                ));
            }
        }
        Check::CellMapFubini => {
            let pushed = inst.map.pushforward(&inst.map_function)?;
            out.push(Comparison::new(
                "integral of pushforward = integral",
                pushed.integrate()?,
                inst.map_function.integrate()?,
            ));
        }
        Check::Multiplicativity => {
            let y = &inst.factor;
            let xy = x.product(y)?;
            let lhs = lambda_chi(&p, &xy)?;
            let rhs = lambda_chi(&p, &x)?.checked_mul(lambda_chi(&p, y)?).ok_or(eulerchi_core::Error::Overflow)?;
            out.push(Comparison::new("lambda_chi(x*y) = lambda_chi(x)*lambda_chi(y)", lhs, rhs));
            let g = x.orbit_groupoid().product(&y.orbit_groupoid())?;
            out.push(Comparison::new("chi_gamma of product groupoid = lambda_chi(x*y)", g.chi_gamma(&p)?, lhs));
        }
        Check::Additivity => {
            let a = x.restrict(&inst.side_ids(&x, true))?;
            let b = x.restrict(&inst.side_ids(&x, false))?;
            let whole = chi_gamma_strata(&p, &x)?;
            let parts = chi_gamma_strata(&p, &a)? + chi_gamma_strata(&p, &b)?;
            out.push(Comparison::new("chi_gamma(x) = chi_gamma(a) + chi_gamma(b)", whole, parts));
            out.push(Comparison::new("chi_gamma(x) = atlas sum", whole, chi_gamma_atlas(&[a, b], &p)?));
        }
        Check::Iteration => {
            let pool = presentation_pool();
            let r = iterate_inertia(&pool[inst.iterate.0].1, &pool[inst.iterate.1].1, &x)?;
            out.push(Comparison::new("chi_iterated = chi_product", r.chi_iterated, r.chi_product));
        }
        Check::Morita => {
            let g = &inst.library_group().group;
            let h = &inst.coset_subgroup;
            let cosets = RigidGComplex::induced(g.clone(), &[(h.clone(), 0)])?;
            let (hg, _) = g.subgroup(h)?;
            let orbits = hg.conj_orbit_count(&p.hom_enumerate(&hg))?;
            out.push(Comparison::new("lambda_chi(G/H) = |H\\Hom(p,H)|", lambda_chi(&p, &cosets)?, orbits.count as i64));
        }
        Check::LevelSet => {
            let f = &inst.function;
            out.push(Comparison::new("integrate = integrate_levelset", f.integrate()?, f.integrate_levelset()?));
            let integrand = x.orbit_groupoid().integrand(&p)?;
            out.push(Comparison::new(
                "integrand: integrate = integrate_levelset",
                integrand.integrate()?,
                integrand.integrate_levelset()?,
            ));
        }
    }
    Ok(out)
}

/// Greedily removes orbits (and simplifies Γ) while `check` keeps failing.
pub fn shrink(check: Check, mut inst: Instance, config: &Config) -> Instance {
    loop {
        let mut progressed = false;
        for i in 0..inst.orbits.len() {
            let mut cand = inst.clone();
            cand.orbits.remove(i);
            if run_check(check, &cand, config).failed() {
                inst = cand;
                progressed = true;
                break;
            }
        }
        if !progressed {
            for gamma in 0..inst.gamma {
                let mut cand = inst.clone();
                cand.gamma = gamma;
                if run_check(check, &cand, config).failed() {
                    inst = cand;
                    progressed = true;
                    break;
                }
            }
        }
        if !progressed {
            return inst;
        }
    }
}

/// JSON form of a failing instance, loadable by the other subcommands.
pub fn counterexample_json(
    config: &Config,
    case: usize,
    check: Check,
    inst: &Instance,
    outcome: &Outcome,
) -> serde_json::Value {
    let x = inst.complex();
    let pool = presentation_pool();
    let (gamma_name, gamma) = &pool[inst.gamma];
    let result = match outcome {
        Outcome::Compared(cs) => json!(cs),
        Outcome::Error(msg) => json!({ "error": msg }),
    };
    json!({
        "seed": config.seed,
        "case": case,
        "check": check,
        "group": inst.library_group().name,
        "gamma_name": gamma_name,
        "gamma": PresentationDoc::from(gamma),
        "complex": ComplexDoc::from_complex(&x),
        "factor": ComplexDoc::from_complex(&inst.factor),
        "iterate": [pool[inst.iterate.0].0, pool[inst.iterate.1].0],
        "coset_subgroup": inst.coset_subgroup,
        "coset_group": GroupDoc::from(&inst.library_group().group),
        "comparisons": result,
    })
}

/// First failure of a run, already shrunk.
#[derive(Debug, Clone)]
pub struct Failure {
    pub case: usize,
    pub check: Check,
    pub instance: Instance,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Default)]
pub struct Tally {
    pub runs: usize,
    pub comparisons: usize,
    pub failures: usize,
}

#[derive(Debug, Clone)]
pub struct Summary {
    pub tallies: Vec<(Check, Tally)>,
    pub failure: Option<Failure>,
}

fn run_case(config: &Config, case: usize) -> Vec<(Check, Outcome, Instance)> {
    let inst = instance(config, case);
    Check::ALL.iter().map(|&c| (c, run_check(c, &inst, config), inst.clone())).collect()
}

/// Runs all cases, in parallel across threads, aggregating by case index.
pub fn run(config: &Config) -> Summary {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(config.cases.max(1));
    let mut results: Vec<Option<Vec<(Check, Outcome, Instance)>>> = vec![None; config.cases];
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                s.spawn(move || {
                    (t..config.cases).step_by(threads).map(|case| (case, run_case(config, case))).collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (case, r) in h.join().expect("verify worker panicked") {
                results[case] = Some(r);
            }
        }
    });

    let mut tallies: Vec<(Check, Tally)> = Check::ALL.iter().map(|&c| (c, Tally::default())).collect();
    let mut failure = None;
    for (case, outcomes) in results.into_iter().enumerate() {
        for (i, (check, outcome, inst)) in outcomes.expect("every case ran").into_iter().enumerate() {
            let tally = &mut tallies[i].1;
            tally.runs += 1;
            tally.comparisons += outcome.comparisons();
            if outcome.failed() {
                tally.failures += 1;
                if failure.is_none() {
                    let instance = shrink(check, inst, config);
                    let outcome = run_check(check, &instance, config);
                    failure = Some(Failure { case, check, instance, outcome });
                }
            }
        }
    }
    Summary { tallies, failure }
}

impl Summary {
    pub fn report(&self, config: &Config) -> Report {
        let comparisons: usize = self.tallies.iter().map(|(_, t)| t.comparisons).sum();
        let failures: usize = self.tallies.iter().map(|(_, t)| t.failures).sum();
        let mut report = Report::new(
            "verify",
            json!({
                "seed": config.seed,
                "cases": config.cases,
                "max_group": config.max_group,
                "max_cells": config.max_cells,
                "comparisons": comparisons,
                "failures": failures,
            }),
        );
        for (check, t) in &self.tallies {
            report.breakdown.push(json!({
                "check": check.name(),
                "runs": t.runs,
                "comparisons": t.comparisons,
                "failures": t.failures,
            }));
            report.assert_eq(format!("{check}: failing cases"), t.failures as i64, 0);
        }
        if let Some(f) = &self.failure {
            match &f.outcome {
                Outcome::Compared(cs) => {
                    for c in cs {
                        report.assert_eq(format!("case {} {}: {}", f.case, f.check, c.name), c.lhs, c.rhs);
                    }
                }
                Outcome::Error(msg) => {
                    report.warn(format!("case {} {}: {msg}", f.case, f.check));
                }
            }
            report.warn(format!("minimized counterexample written to {}", config.dump.display()));
        }
        if config.inject_fault {
            report.warn("fault injection enabled: lambda_chi is deliberately wrong");
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Config {
        Config { cases: 6, max_group: 8, max_cells: 12, ..Config::default() }
    }

    #[test]
    fn instances_respect_limits() {
        let config = Config { cases: 40, ..Config::default() };
        for case in 0..config.cases {
            let inst = instance(&config, case);
            let x = inst.complex();
            assert!(x.group().order() <= config.max_group);
            assert!(x.space().len() <= config.max_cells);
        }
    }

    #[test]
    fn instances_are_deterministic() {
        let config = small();
        let a = instance(&config, 3);
        let b = instance(&config, 3);
        assert_eq!(a.complex(), b.complex());
        assert_eq!(a.map, b.map);
        assert_eq!(a.function, b.function);
        assert_ne!(instance(&config, 4).function, a.function);
    }

    #[test]
    fn small_run_passes() {
        let config = small();
        let summary = run(&config);
        assert!(summary.failure.is_none(), "{:?}", summary.failure);
        assert!(summary.report(&config).passed());
    }

    #[test]
    fn injected_fault_shrinks_to_one_edge_orbit() {
        let config = Config { inject_fault: true, cases: 20, ..small() };
        let summary = run(&config);
        let failure = summary.failure.clone().expect("fault is detected");
        assert_eq!(failure.check, Check::ThreeWay);
        assert_eq!(failure.instance.orbits.len(), 1);
        assert_eq!(failure.instance.orbits[0].dim, 1);
        assert_eq!(failure.instance.gamma, 0);
        assert!(!summary.report(&config).passed());
    }
}
