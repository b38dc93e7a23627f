//! One line per acceptance criterion. Runs without the test harness so the
//! lines reach the terminal; exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kissing::enumerator::{reference_code, EnumConfig, Reference};
use kissing::estimate::{
    grid_min_area, long_edge_cap, min_area_over_box, verify_d3_cases, verify_superadditivity, ChordRange, EdgeBox,
    EdgeClass, TaggedRange, CHORD_CAP, MAX_CIRCUMRADIUS, REASON_ALL_CONTACT, REASON_DIAGONAL, SPLIT_LONG, SPLIT_MID,
};
use kissing::hypermap::OrbitKind;
use kissing::lpfeas::{
    candidate_system, fate_of, feasible_when_shrunk, micro, solve, AngleBounds, Fate, FeasibilityVerdict,
};
use kissing::pipeline::{check_node_types, realize, run_enumeration};
use kissing::sphgeom::{circumradius, H0, TGT};
use kissing::tame::is_tame_contact;

mod common;
use common::*;

// Tolerances, pinned.
const SOL0: f64 = 0.551_285_598;
const SOL0_TOL: f64 = 1e-8;
const TOTAL: f64 = 1.540_658_6;
const TOTAL_TOL: f64 = 1e-6;
const TAU_TOL: f64 = 1e-8;
const MARGIN: f64 = 1e-6;
const SHARP: f64 = 1e-9;
const GRID: usize = 21;

struct Line {
    pass: bool,
    detail: String,
    budget: Duration,
    elapsed: Duration,
}

fn timed(budget: Duration, f: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (pass, detail) = f();
    Line { pass, detail, budget, elapsed: start.elapsed() }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn constants() -> (bool, String) {
    let sol0 = 3.0 * (1.0f64 / 3.0).acos() - PI;
    let total = 4.0 * PI - 20.0 * sol0;
    let lib = kissing::sphgeom::Constants::new();
    let pass = (sol0 - SOL0).abs() <= SOL0_TOL
        && (lib.sol0 - sol0).abs() <= SOL0_TOL
        && (total - TOTAL).abs() <= TOTAL_TOL
        && (lib.total - total).abs() <= TOTAL_TOL
        && total < TGT;
    (pass, format!("sol0 = {sol0:.10}, total = {total:.8} < tgt = {TGT}"))
}

fn realization() -> (bool, String) {
    let codes = [Reference::Fcc, Reference::Hcp].map(reference_code).to_vec();
    let total = 4.0 * PI - 20.0 * (3.0 * (1.0f64 / 3.0).acos() - PI);
    let mut pass = true;
    let mut detail = Vec::new();
    for which in [Reference::Fcc, Reference::Hcp] {
        let r = realize(which, &codes).expect("reference fan builds");
        let ok = r.darts == 48
            && r.nodes == 12
            && r.edges == 24
            && r.faces == 14
            && r.node_degrees.iter().enumerate().all(|(k, &c)| c == if k == 4 { 12 } else { 0 })
            && r.face_sizes.get(3) == Some(&8)
            && r.face_sizes.get(4) == Some(&6)
            && r.nodes + r.faces == r.edges + 2
            && r.tame_flags.len() == 10
            && r.tame_flags.values().all(|&v| v)
            && (r.total_tau - total).abs() <= TAU_TOL;
        pass &= ok;
        detail.push(format!("{which:?}: 48/12/24/14, Σtau - total = {:.1e}", r.total_tau - total));
    }
    (pass, detail.join("; "))
}

fn main_estimate() -> (bool, String) {
    let cases = verify_d3_cases();
    let sharp = ["(3,0,0)", "(2,0,1)"];
    let mut worst = f64::INFINITY;
    let mut pass = true;
    for c in cases.iter().filter(|c| c.id.starts_with('(') && !c.id.contains(' ')) {
        if sharp.contains(&c.id.as_str()) {
            pass &= c.slack.abs() <= SHARP;
        } else {
            pass &= c.slack >= MARGIN;
            worst = worst.min(c.slack);
        }
    }
    let cap = long_edge_cap(2, 0, 1).expect("cap exists");
    pass &= (cap - (32.0f64 / 3.0).sqrt()).abs() <= SHARP;

    // (0,0,3): long edges in [3, 3.27]
    let long = TaggedRange { class: EdgeClass::Large, range: ChordRange::new(3.0, 3.27) };
    let b = EdgeBox { edges: [long; 3] };
    let area = min_area_over_box(&b).expect("box realizable");
    pass &= area > PI / 2.0 - SHARP && grid_min_area(&b).is_some_and(|g| g >= area - SHARP);

    // (1,1,1) vacuity: corners and a 21³ grid
    let ranges =
        [ChordRange::new(2.0, 2.0), ChordRange::new(2.0 * H0, SPLIT_MID), ChordRange::new(SPLIT_LONG, CHORD_CAP)];
    let at = |r: ChordRange, i: usize| r.lo + (r.hi - r.lo) * i as f64 / (GRID - 1) as f64;
    let mut vac = f64::INFINITY;
    for i in 0..GRID {
        for j in 0..GRID {
            for k in 0..GRID {
                let r = circumradius(at(ranges[0], i), at(ranges[1], j), at(ranges[2], k)).unwrap_or(f64::INFINITY);
                vac = vac.min(r);
            }
        }
    }
    pass &= vac > MAX_CIRCUMRADIUS;
    let reported = cases.iter().find(|c| c.id == "(1,1,1) vacuous").expect("vacuity case");
    pass &= reported.minimum > MAX_CIRCUMRADIUS && reported.pass;
    pass &= cases.iter().all(|c| c.pass);
    (
        pass,
        format!(
            "{} cases, least margin {worst:.2e}, cap(2,0,1) = {cap:.10}, area(0,0,3) ≥ {area:.6}, vacuity radius {vac:.6}",
            cases.len()
        ),
    )
}

fn superadditivity() -> (bool, String) {
    let r = verify_superadditivity();
    let excluded = |reason: &str| r.exclusions.iter().any(|e| e.reason == reason && e.pairs > 0);
    let pass = r.pass() && excluded(REASON_ALL_CONTACT) && excluded(REASON_DIAGONAL);
    let counts: Vec<String> = r.exclusions.iter().map(|e| format!("{}: {}", e.reason, e.pairs)).collect();
    (pass, format!("{} pairs checked of {}; excluded {}", r.checked, r.cross_product, counts.join(", ")))
}

fn node_types() -> (bool, String) {
    let r = check_node_types();
    let r0: BTreeSet<(usize, usize)> = r.admissible.iter().filter(|t| t.r == 0).map(|t| (t.p, t.q)).collect();
    let pass = r0 == BTreeSet::from([(0, 3), (1, 3), (2, 2)]) && r.admissible.iter().all(|t| t.faces() < 5);
    (pass, format!("r = 0: {r0:?}; {} admissible, none with five faces", r.admissible.len()))
}

fn classification() -> (bool, String, Vec<kissing::hypermap::Hypermap>) {
    let (report, result) = run_enumeration(&EnumConfig::default(), false).expect("enumeration runs");
    let has = |w| report.codes.contains(&reference_code(w));
    let pass = report.classes == 8 && has(Reference::Fcc) && has(Reference::Hcp);
    let detail = format!(
        "{} classes ({} unfolded), FCC and HCP present; metrics {:?}",
        report.classes, report.unfolded, report.metrics
    );
    (pass, detail, result.hypermaps())
}

fn elimination(classes: &[kissing::hypermap::Hypermap]) -> (bool, String) {
    let widened = AngleBounds::default().widened(&micro());
    let (mut hexagon, mut lp, mut survivors) = (0, 0, BTreeSet::new());
    let mut pass = true;
    for h in classes {
        match fate_of(h).expect("fate") {
            Fate::HexagonEliminated(_) => {
                hexagon += 1;
                pass &= h.orbits(OrbitKind::Face).classes.iter().any(|f| f.len() == 6);
            }
            Fate::LpInfeasible { rules, certificate } => {
                lp += 1;
                let sys = candidate_system(h, &widened, rules).expect("system").system;
                pass &= farkas_holds(&sys, &FeasibilityVerdict::Infeasible { certificate });
            }
            Fate::Survivor { .. } => {
                survivors.insert(h.canonical_code(true).expect("code").to_hex());
                pass &= feasible_when_shrunk(h).expect("shrunk system");
            }
        }
    }
    let expected = BTreeSet::from([reference_code(Reference::Fcc), reference_code(Reference::Hcp)]);
    pass &= hexagon == 1 && lp == 5 && survivors == expected;
    (
        pass,
        format!(
            "{hexagon} hexagon, {lp} LP-infeasible with Farkas certificates, {} survivors (FCC, HCP)",
            survivors.len()
        ),
    )
}

fn properties() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pass = true;
    for _ in 0..500 {
        let h = random_hypermap(&mut rng, 24);
        pass &= (0..h.dart_count()).all(|x| h.e()[h.n()[h.f()[x]]] == x);
        for (kind, p) in [(OrbitKind::Edge, h.e()), (OrbitKind::Node, h.n()), (OrbitKind::Face, h.f())] {
            pass &= h.orbits(kind).len() == cycles(p).len();
        }
        pass &= h.check_structure().biconnected == brute_biconnected(&h);
    }
    for _ in 0..500 {
        let h = from_rotation(&random_rotation(&mut rng));
        pass &= h.dart_count() <= 60 && h.check_structure().biconnected == brute_biconnected(&h);
    }
    let mut boxes = 0;
    while boxes < 200 {
        let b = random_box(&mut rng);
        let (Ok(corner), Some(grid)) = (min_area_over_box(&b), grid_min_area(&b)) else { continue };
        boxes += 1;
        pass &= grid >= corner - SHARP;
    }
    let mut verdicts = 0;
    for _ in 0..500 {
        let sys = random_system(&mut rng);
        let Ok(v) = solve(&sys) else { continue };
        verdicts += 1;
        pass &= match &v {
            FeasibilityVerdict::Feasible { witness } => sys.rows.iter().all(|r| r.holds_at(witness)),
            FeasibilityVerdict::Infeasible { .. } => farkas_holds(&sys, &v),
        };
    }
    // a tame verdict on a reference map is itself re-derived
    let fcc = kissing::enumerator::reference_hypermap(Reference::Fcc);
    pass &= is_tame_contact(&fcc).is_tame() && brute_biconnected(&fcc);
    (pass, format!("500 hypermaps, 500 plane maps (≤ 60 darts), 200 boxes, {verdicts} LP verdicts"))
}

fn main() -> ExitCode {
    let mut lines = vec![
        ("constants", timed(secs(1), constants)),
        ("realization", timed(secs(1), realization)),
        ("main estimate", timed(secs(10), main_estimate)),
        ("superadditivity", timed(secs(5), superadditivity)),
        ("node types", timed(secs(1), node_types)),
    ];
    let start = Instant::now();
    let (pass, detail, classes) = classification();
    lines.push(("classification", Line { pass, detail, budget: secs(600), elapsed: start.elapsed() }));
    lines.push(("elimination", timed(secs(30), || elimination(&classes))));
    lines.push(("property suites", timed(secs(60), properties)));

    let mut all = true;
    for (i, (name, l)) in lines.iter().enumerate() {
        let ok = l.pass && l.elapsed <= l.budget;
        all &= ok;
        println!(
            "[{}] {}. {name}: {} ({:.2}s of {}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            l.detail,
            l.elapsed.as_secs_f64(),
            l.budget.as_secs()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
