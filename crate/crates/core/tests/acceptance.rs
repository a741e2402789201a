//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N: PASS|FAIL` line with its evidence.

use std::time::Instant;

use oc_reason::assumptions::{
    build_assumption_bcs, discover_risk_labelings, AssumptionSelection, RiskPair,
};
use oc_reason::bcs::{
    compose, count_satisfying, derivable, enumerate_satisfying, implies, intersect, inverse,
    is_satisfiable, path_consistency, path_consistency_naive, true_minimal_relations, Bcs,
    Correspondence,
};
use oc_reason::closedness::{
    is_join_closed, is_max_closed, join_closure, orders_for_assumptions, relation_violation,
    JoinTable,
};
use oc_reason::fixtures;
use oc_reason::games::{int, NormalFormGame, Payoff};
use oc_reason::random::{
    random_bcs, random_bcs_sized, random_join_closed, random_max_closed, random_permutation,
    random_semilattice, RandomBcsParams,
};
use oc_reason::reductions::{
    augment_always_satisfiable, csp_to_si_games, implication_instance,
    join_incompleteness_instance, montanari_instance,
};
use oc_reason::relation::Relation;
use oc_reason::si::{decide_si, decide_si_with, find_any_si, Certificate, Mode, Preference};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(n: u32, ok: bool, detail: &str) {
    println!(
        "criterion {n}: {} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} failed: {detail}");
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn labels(bcs: &Bcs, c: &Correspondence) -> Vec<(String, String)> {
    bcs.oc_labels(c).unwrap()
}

fn pair(a: &str, b: &str) -> (String, String) {
    (a.to_string(), b.to_string())
}

/// Random two-dimensional utilities per outcome, a Pareto-style preference.
fn random_pareto(rng: &mut ChaCha8Rng, bcs: &Bcs) -> Preference {
    let keys: Vec<(String, String)> = bcs
        .variables()
        .iter()
        .flat_map(|v| v.domain.iter().map(move |d| (v.id.clone(), d.clone())))
        .collect();
    let vectors = keys
        .iter()
        .map(|_| vec![int(rng.gen_range(0..4)), int(rng.gen_range(0..4))])
        .collect();
    Preference::from_utilities(keys, vectors).unwrap()
}

#[test]
fn criterion_01_worked_example() {
    let (ga, gb, gc) = fixtures::trio();
    let games = vec![ga, gb, gc];
    let bcs = build_assumption_bcs(&games, &AssumptionSelection::all_structural()).unwrap();
    let psi = path_consistency(&bcs).psi_oc("Ga", "Gc").unwrap();
    let got = labels(&bcs, &psi);
    let expected = vec![
        pair("C,C", "E,E"),
        pair("C,D", "E,F"),
        pair("D,C", "F,E"),
        pair("D,D", "F,F"),
    ];
    let ga = &games[0];
    let primed_empty = ["C',C", "C',D", "C,C'", "D,C'", "C',C'"]
        .iter()
        .filter_map(|l| ga.outcome_by_label(l))
        .all(|o| psi.relation.row_is_empty(o));
    let pref = Preference::pareto(&games).unwrap();
    let modes: Vec<bool> = [Mode::Exact, Mode::Propagation, Mode::Refutation]
        .iter()
        .map(|&m| decide_si(&bcs, "Ga", "Gc", &pref, true, m).unwrap().answer)
        .collect();
    let ok = got == expected && primed_empty && modes.iter().all(|&a| a);
    verdict(
        1,
        ok,
        &format!(
            "listing matches: {}, strict in all modes: {modes:?}",
            got == expected && primed_empty
        ),
    );
}

#[test]
fn criterion_02_montanari() {
    let k4 = montanari_instance();
    let p = path_consistency(&k4);
    let no_op = p.narrowed_pairs(&k4).is_empty();
    let unsat = enumerate_satisfying(&k4, None).is_empty();
    let empty = Correspondence::new("X2", "X1", Relation::empty(3, 3));
    let implied = implies(&k4, &empty).unwrap();
    let derived = derivable(&p, &empty).unwrap();
    verdict(
        2,
        no_op && unsat && implied && !derived,
        &format!("no-op {no_op}, unsat {unsat}, implies {implied}, derivable {derived}"),
    );
}

#[test]
fn criterion_03_join_incompleteness() {
    let (bcs, joins) = join_incompleteness_instance();
    let closed = is_join_closed(&bcs, &joins).unwrap().is_closed();
    let p = path_consistency(&bcs);
    let left = p.psi(0, 1).contains(1, 1);
    let claim = Correspondence::new(
        "X",
        "Y",
        Relation::from_fn(2, 2, |a, b| !(a == 1 && b == 1)),
    );
    let oracle_excludes = implies(&bcs, &claim).unwrap();
    let pin = bcs.oc_from_labels("X", "Y", &[("x2", "y2")]).unwrap();
    let refuted = path_consistency(&bcs.with_constraint(pin).unwrap()).is_unsat();
    verdict(
        3,
        closed && left && oracle_excludes && refuted,
        &format!("join-closed {closed}, (x2,y2) kept {left}, oracle excludes {oracle_excludes}, pin refuted {refuted}"),
    );
}

#[test]
fn criterion_04_max_closed_completeness() {
    let mut r = rng(4);
    let (mut cases, mut mismatches, mut si_checks) = (0, 0, 0);
    while cases < 1000 {
        let (bcs, orders) = random_max_closed(&mut r, 4, 4);
        cases += 1;
        let p = path_consistency(&bcs);
        let truth = true_minimal_relations(&bcs);
        let n = bcs.len();
        if (0..n * n).any(|k| p.psi(k / n, k % n) != &truth[k]) {
            mismatches += 1;
            continue;
        }
        let pref = random_pareto(&mut r, &bcs);
        let cert = Certificate::Orders(orders);
        let x = &bcs.variables()[r.gen_range(0..n)].id;
        let y = &bcs.variables()[r.gen_range(0..n)].id;
        for strict in [false, true] {
            let exact = decide_si(&bcs, x, y, &pref, strict, Mode::Exact)
                .unwrap()
                .answer;
            let prop =
                decide_si_with(&bcs, x, y, &pref, strict, Mode::Propagation, Some(&cert)).unwrap();
            si_checks += 1;
            if exact != prop.answer || !prop.certified {
                mismatches += 1;
            }
        }
    }
    verdict(
        4,
        mismatches == 0,
        &format!("{cases} structures, {si_checks} verdicts, {mismatches} mismatches"),
    );
}

#[test]
fn criterion_05_join_refutation_completeness() {
    let mut r = rng(5);
    let (mut unsat, mut mismatches) = (0, 0);
    for _ in 0..1000 {
        let (bcs, joins) = random_join_closed(&mut r, 4, 5);
        assert!(is_join_closed(&bcs, &joins).unwrap().is_closed());
        let sat = is_satisfiable(&bcs);
        unsat += usize::from(!sat);
        if sat == path_consistency(&bcs).is_unsat() {
            mismatches += 1;
        }
    }
    verdict(
        5,
        mismatches == 0,
        &format!("1000 structures ({unsat} unsatisfiable), {mismatches} mismatches"),
    );
}

#[test]
fn criterion_06_reduction() {
    let mut r = rng(6);
    let (mut sat, mut mismatches) = (0, 0);
    for _ in 0..200 {
        let src = random_bcs(&mut r, &RandomBcsParams::default());
        let satisfiable = is_satisfiable(&src);
        sat += usize::from(satisfiable);
        let plain = csp_to_si_games(&src, false).unwrap();
        let pref = Preference::pareto(&plain.games).unwrap();
        let v = decide_si(
            &plain.bcs,
            &plain.base,
            &plain.candidate,
            &pref,
            false,
            Mode::Exact,
        )
        .unwrap();
        if v.answer == satisfiable {
            mismatches += 1;
        }
        let eps = csp_to_si_games(&src, true).unwrap();
        let pref = Preference::pareto(&eps.games).unwrap();
        let v = decide_si(
            &eps.bcs,
            &eps.base,
            &eps.candidate,
            &pref,
            false,
            Mode::Exact,
        )
        .unwrap();
        if v.answer == satisfiable {
            mismatches += 1;
        }
        for strict in [false, true] {
            let found = find_any_si(&eps.bcs, &pref, strict, Mode::Exact).unwrap();
            if found
                .iter()
                .any(|(x, y)| (x.as_str(), y.as_str()) != ("G", "G_prime"))
            {
                mismatches += 1;
            }
        }
    }
    verdict(
        6,
        mismatches == 0,
        &format!("200 sources ({sat} satisfiable), {mismatches} mismatches"),
    );
}

fn random_game(r: &mut ChaCha8Rng, name: &str) -> NormalFormGame {
    let rows = r.gen_range(1..=3);
    let cols = r.gen_range(1..=3);
    let acts = |p: &str, k: usize| (1..=k).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
    NormalFormGame::from_fn(name, vec![acts("r", rows), acts("c", cols)], |_| {
        vec![int(r.gen_range(0..5)), int(r.gen_range(0..5))]
    })
    .unwrap()
}

/// A positive affine, action-permuted copy of `g`.
fn disguised_copy(r: &mut ChaCha8Rng, g: &NormalFormGame, name: &str) -> NormalFormGame {
    let perms: Vec<Vec<usize>> = (0..2)
        .map(|p| random_permutation(r, g.actions(p).len()))
        .collect();
    let scale: Vec<Payoff> = (0..2).map(|_| int(r.gen_range(1..4))).collect();
    let shift: Vec<Payoff> = (0..2).map(|_| int(r.gen_range(-3..4))).collect();
    let actions: Vec<Vec<String>> = (0..2)
        .map(|p| {
            perms[p]
                .iter()
                .map(|&a| format!("{}'", g.actions(p)[a]))
                .collect()
        })
        .collect();
    NormalFormGame::from_fn(name, actions, |prof| {
        let orig = [perms[0][prof[0]], perms[1][prof[1]]];
        (0..2)
            .map(|p| g.utility(p, &orig) * scale[p] + shift[p])
            .collect()
    })
    .unwrap()
}

/// Stag-hunt shaped pair: two strict equilibria on the diagonal.
fn random_stag_hunt(r: &mut ChaCha8Rng, name: &str) -> NormalFormGame {
    let hi = r.gen_range(5..9);
    let lo = r.gen_range(2..5);
    let sucker = r.gen_range(0..2);
    let temptation = r.gen_range(lo..hi);
    NormalFormGame::bimatrix(
        name,
        &["H", "L"],
        &["H", "L"],
        &[
            &[(hi, hi), (sucker, temptation)],
            &[(temptation, sucker), (lo, lo)],
        ],
    )
    .unwrap()
}

fn risk_pairs(games: &[NormalFormGame]) -> Vec<RiskPair> {
    let label = |g: &NormalFormGame, which: [usize; 2]| {
        vec![
            g.actions(0)[which[0]].clone(),
            g.actions(1)[which[1]].clone(),
        ]
    };
    let mut out = Vec::new();
    for g1 in games {
        for g2 in games {
            if g1.name() == g2.name() {
                continue;
            }
            if let Some((l1, l2)) = discover_risk_labelings(g1, g2).into_iter().next() {
                out.push(RiskPair {
                    g1: g1.name().to_string(),
                    g2: g2.name().to_string(),
                    a1: label(g1, l1.first),
                    a2: label(g1, l1.second),
                    b1: Some(label(g2, l2.first)),
                    b2: Some(label(g2, l2.second)),
                });
            }
        }
    }
    out
}

#[test]
fn criterion_07_assumption_orders() {
    let mut r = rng(7);
    let (mut sets, mut failures, mut constraints) = (0, 0, 0);
    let mut failed_example = String::new();
    for case in 0..200 {
        let mut games = Vec::new();
        let k = r.gen_range(1..=3);
        for i in 0..k {
            games.push(random_game(&mut r, &format!("R{i}")));
        }
        if r.gen_bool(0.5) {
            let src = games[0].clone();
            games.push(disguised_copy(&mut r, &src, "Copy"));
        }
        if case == 0 {
            games.push(fixtures::stag_hunt_left());
            games.push(fixtures::stag_hunt_right());
        } else if r.gen_bool(0.5) {
            games.push(random_stag_hunt(&mut r, "S1"));
            games.push(random_stag_hunt(&mut r, "S2"));
        }
        games.shuffle(&mut r);
        let selection = AssumptionSelection {
            dominance: true,
            isomorphism: true,
            nash: r.gen_bool(0.5),
            decreasing_risk: risk_pairs(&games),
            restrict_to: None,
        };
        let bcs = build_assumption_bcs(&games, &selection).unwrap();
        sets += 1;
        constraints += bcs.constraints().len();
        let ok = match orders_for_assumptions(&games, &bcs) {
            Ok(orders) => is_max_closed(&bcs, &orders).unwrap().is_closed(),
            Err(e) => {
                failed_example = format!(": {e}");
                false
            }
        };
        failures += usize::from(!ok);
    }
    verdict(
        7,
        failures == 0,
        &format!(
            "{sets} game sets, {constraints} correspondences, {failures} failures{failed_example}"
        ),
    );
}

fn random_relation(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Relation {
    let p = r.gen_range(0.1..0.9);
    Relation::from_fn(rows, cols, |_, _| r.gen_bool(p))
}

#[test]
fn criterion_08_relation_algebra() {
    let mut r = rng(8);
    let mut failures = 0;
    for _ in 0..1000 {
        let (a, b, c, d) = (
            r.gen_range(1..5),
            r.gen_range(1..5),
            r.gen_range(1..5),
            r.gen_range(1..5),
        );
        let f = Correspondence::new("A", "B", random_relation(&mut r, a, b));
        let g = Correspondence::new("B", "C", random_relation(&mut r, b, c));
        let h = Correspondence::new("C", "D", random_relation(&mut r, c, d));
        let left = compose(&compose(&f, &g).unwrap(), &h).unwrap();
        let right = compose(&f, &compose(&g, &h).unwrap()).unwrap();
        let f2 = Correspondence::new("A", "B", random_relation(&mut r, a, b));
        let checks = [
            left == right,
            intersect(&f, &f).unwrap() == f,
            intersect(&f, &f2).unwrap() == intersect(&f2, &f).unwrap(),
            inverse(&inverse(&f)) == f,
        ];
        failures += checks.iter().filter(|&&ok| !ok).count();
    }
    // closedness is preserved by composition, intersection and inversion
    for _ in 0..1000 {
        let tables: Vec<JoinTable> = if r.gen_bool(0.5) {
            (0..3)
                .map(|_| {
                    let m = r.gen_range(1..5);
                    JoinTable::from_order(&random_permutation(&mut r, m))
                })
                .collect()
        } else {
            (0..3).map(|_| random_semilattice(&mut r, 5)).collect()
        };
        let closed = |r: &mut ChaCha8Rng, x: usize, y: usize| {
            let seed = random_relation(r, tables[x].size(), tables[y].size());
            join_closure(&seed, &tables[x], &tables[y])
        };
        let f = Correspondence::new("A", "B", closed(&mut r, 0, 1));
        let f2 = Correspondence::new("A", "B", closed(&mut r, 0, 1));
        let g = Correspondence::new("B", "C", closed(&mut r, 1, 2));
        let comp = compose(&f, &g).unwrap();
        let meet = intersect(&f, &f2).unwrap();
        let inv = inverse(&f);
        let checks = [
            relation_violation(&f.relation, &tables[0], &tables[1]).is_none(),
            relation_violation(&comp.relation, &tables[0], &tables[2]).is_none(),
            relation_violation(&meet.relation, &tables[0], &tables[1]).is_none(),
            relation_violation(&inv.relation, &tables[1], &tables[0]).is_none(),
        ];
        failures += checks.iter().filter(|&&ok| !ok).count();
    }
    verdict(
        8,
        failures == 0,
        &format!("1000 algebra samples, 1000 closedness samples, {failures} failures"),
    );
}

#[test]
fn criterion_09_polynomial_propagation() {
    let mut r = rng(9);
    let mut bound_ok = true;
    for _ in 0..60 {
        let n = r.gen_range(1..=12);
        let m = r.gen_range(1..=6);
        let bcs = random_bcs_sized(&mut r, n, m, 0.5, 0.7);
        let (naive, passes) = path_consistency_naive(&bcs);
        bound_ok &= passes <= n * n * m * m;
        bound_ok &= naive == path_consistency(&bcs);
    }
    let ladder = [3usize, 6, 12];
    let mut points = Vec::new();
    for &n in &ladder {
        let instances: Vec<Bcs> = (0..8)
            .map(|_| random_bcs_sized(&mut r, n, 6, 0.6, 0.8))
            .collect();
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let start = Instant::now();
            for bcs in &instances {
                std::hint::black_box(path_consistency(bcs));
            }
            best = best.min(start.elapsed().as_secs_f64());
        }
        points.push(((n as f64).ln(), best.max(1e-9).ln()));
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    verdict(
        9,
        bound_ok && slope < 6.0,
        &format!("pass bound held {bound_ok}, log-log exponent {slope:.2}"),
    );
}

#[test]
fn criterion_10_augment_and_implication() {
    let mut r = rng(10);
    let mut failures = 0;
    for _ in 0..200 {
        let src = random_bcs(&mut r, &RandomBcsParams::default());
        let aug = augment_always_satisfiable(&src).unwrap();
        let s = aug.bcs.require(&aug.anchor.0).unwrap();
        let on = aug.bcs.value_index(s, &aug.anchor.1).unwrap();
        let all = enumerate_satisfying(&aug.bcs, None);
        let switched_on = all.iter().filter(|a| a.0[s] == on).count();
        if all.is_empty() || switched_on != count_satisfying(&src) {
            failures += 1;
        }
    }
    let mut checked = 0;
    while checked < 200 {
        let src = random_bcs(&mut r, &RandomBcsParams::default());
        if !is_satisfiable(&src) {
            continue;
        }
        checked += 1;
        let i = r.gen_range(0..src.len());
        let v = r.gen_range(0..src.domain(i).len());
        let (var, value) = (src.variables()[i].id.clone(), src.domain(i)[v].clone());
        let (bcs, q) = implication_instance(&src, (&var, &value)).unwrap();
        let holds = implies(&bcs, &q.claim(&bcs).unwrap()).unwrap();
        let attainable = enumerate_satisfying(&src, None).iter().any(|a| a.0[i] == v);
        if holds == attainable || !is_satisfiable(&bcs) {
            failures += 1;
        }
    }
    verdict(
        10,
        failures == 0,
        &format!("200 augmentations, 200 implication instances, {failures} failures"),
    );
}
