//! Instance generators: the classic path-consistency counterexamples, the
//! reduction from binary constraint satisfaction to safe-improvement
//! questions over games, and the satisfiability-preserving constructions
//! used alongside it.

use num_traits::One;

use crate::assumptions::{build_assumption_bcs, game_variable, AssumptionSelection};
use crate::bcs::{is_satisfiable, Bcs, Correspondence, Variable};
use crate::closedness::{JoinFamily, JoinTable};
use crate::error::{input, precondition, Result};
use crate::fixtures;
use crate::games::{int, NormalFormGame, Payoff};
use crate::relation::Relation;

/// Three-colouring of the complete graph on four vertices.
pub fn montanari_instance() -> Bcs {
    let vars: Vec<Variable> = (1..=4)
        .map(|i| Variable::new(format!("X{i}"), ["1", "2", "3"]))
        .collect();
    let mut constraints = Vec::new();
    for i in 1..=4 {
        for j in i + 1..=4 {
            constraints.push(Correspondence::new(
                format!("X{i}"),
                format!("X{j}"),
                Relation::from_fn(3, 3, |a, b| a != b),
            ));
        }
    }
    Bcs::new(vars, constraints).expect("static instance")
}

/// Cover edges `(lower, upper)` of the four semilattices, by value label.
pub fn join_incompleteness_edges() -> Vec<(&'static str, Vec<(&'static str, &'static str)>)> {
    vec![
        ("X", vec![("x2", "x1")]),
        ("Y", vec![("y2", "y1")]),
        (
            "Z",
            vec![("z2", "z1"), ("z3", "z1"), ("z4", "z2"), ("z4", "z3")],
        ),
        (
            "W",
            vec![
                ("w2", "w1"),
                ("w3", "w1"),
                ("w4", "w1"),
                ("w5", "w2"),
                ("w6", "w2"),
                ("w6", "w3"),
                ("w7", "w3"),
                ("w7", "w4"),
                ("w5", "w4"),
            ],
        ),
    ]
}

type Images<'a> = Vec<(&'a str, Vec<&'a str>)>;

/// A join-closed structure where propagation cannot exclude `(x2, y2)`
/// between X and Y although no satisfying assignment uses that pair.
pub fn join_incompleteness_instance() -> (Bcs, JoinFamily) {
    let vars = vec![
        Variable::new("X", ["x1", "x2"]),
        Variable::new("Y", ["y1", "y2"]),
        Variable::new("Z", ["z1", "z2", "z3", "z4"]),
        Variable::new("W", ["w1", "w2", "w3", "w4", "w5", "w6", "w7"]),
    ];
    let bcs = Bcs::new(vars, vec![]).expect("static instance");
    let z_all = ["z1", "z2", "z3", "z4"];
    let w_all = ["w1", "w2", "w3", "w4", "w5", "w6", "w7"];
    let ocs: Vec<(&str, &str, Images)> = vec![
        (
            "X",
            "Z",
            vec![("x1", z_all.to_vec()), ("x2", vec!["z2", "z4"])],
        ),
        (
            "Y",
            "Z",
            vec![("y1", z_all.to_vec()), ("y2", vec!["z3", "z4"])],
        ),
        (
            "X",
            "W",
            vec![("x1", w_all.to_vec()), ("x2", vec!["w2", "w5", "w6"])],
        ),
        (
            "Y",
            "W",
            vec![("y1", w_all.to_vec()), ("y2", vec!["w3", "w6", "w7"])],
        ),
        (
            "Z",
            "W",
            vec![
                ("z1", w_all.to_vec()),
                ("z2", w_all.to_vec()),
                ("z3", w_all.to_vec()),
                ("z4", vec!["w7", "w5", "w4"]),
            ],
        ),
    ];
    let mut bcs = bcs;
    for (x, y, images) in ocs {
        let pairs: Vec<(&str, &str)> = images
            .iter()
            .flat_map(|(a, bs)| bs.iter().map(move |b| (*a, *b)))
            .collect();
        let oc = bcs.oc_from_labels(x, y, &pairs).expect("static instance");
        bcs.add_constraint(oc).expect("static instance");
    }
    let mut joins = JoinFamily::default();
    for (var, edges) in join_incompleteness_edges() {
        let i = bcs.var_index(var).unwrap();
        let idx: Vec<(usize, usize)> = edges
            .iter()
            .map(|(lo, hi)| {
                (
                    bcs.value_index(i, lo).unwrap(),
                    bcs.value_index(i, hi).unwrap(),
                )
            })
            .collect();
        let table = JoinTable::from_hasse(bcs.domain(i).len(), &idx).expect("static lattice");
        joins.tables.insert(var.to_string(), table);
    }
    (bcs, joins)
}

/// Games and correspondences encoding a source structure: the candidate
/// game is a safe Pareto improvement on the base game exactly when the
/// source is unsatisfiable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiHardnessInstance {
    pub games: Vec<NormalFormGame>,
    /// One variable per game; all constraints of the reduction.
    pub bcs: Bcs,
    pub base: String,
    pub candidate: String,
    pub source: Bcs,
    /// Per source variable, the name of its diagonal game.
    pub variable_games: Vec<(String, String)>,
}

fn action_labels(k: usize) -> Vec<String> {
    (1..=k).map(|a| format!("a{a}")).collect()
}

/// A square game paying `diag[l]` on the `l`-th diagonal outcome and (0, 0)
/// elsewhere.
fn diagonal_game(name: String, diag: &[(Payoff, Payoff)]) -> NormalFormGame {
    let acts = action_labels(diag.len());
    NormalFormGame::from_fn(name, vec![acts.clone(), acts], |p| {
        if p[0] == p[1] {
            vec![diag[p[0]].0, diag[p[0]].1]
        } else {
            vec![int(0), int(0)]
        }
    })
    .expect("diagonal games are well formed")
}

/// Diagonal payoffs for the game of source variable `i` (from 1) with `k`
/// values. Player 1's payoff strictly decreases and player 2's strictly
/// increases along the diagonal.
fn diagonal_payoffs(
    i: usize,
    k: usize,
    n: usize,
    k_max: usize,
    epsilon: bool,
) -> Vec<(Payoff, Payoff)> {
    if epsilon {
        let eps = Payoff::new(1, 4 * (n as i64 + 1));
        let base = int(3) + eps * int(i as i64);
        let mut diag: Vec<(Payoff, Payoff)> = (1..=k)
            .map(|l| {
                (
                    base + int((k + 1 - l) as i64),
                    Payoff::new(l as i64, 2 * (k as i64 + 1)),
                )
            })
            .collect();
        diag.push((base, Payoff::one() - eps * int(i as i64)));
        diag
    } else {
        let top = (k_max + 5 + i) as i64;
        (1..=k + 1)
            .map(|l| (int(top - l as i64), int(l as i64)))
            .collect()
    }
}

/// Builds the reduction. With `epsilon`, the fallback outcomes of the
/// diagonal games are pairwise Pareto-incomparable and incomparable with
/// the base and candidate outcomes, so no other pair of games can be in a
/// safe-improvement relation.
pub fn csp_to_si_games(source: &Bcs, epsilon: bool) -> Result<SiHardnessInstance> {
    let n = source.len();
    let k_max = source
        .variables()
        .iter()
        .map(|v| v.domain.len())
        .max()
        .unwrap_or(0);
    let base = fixtures::reduction_base();
    let candidate = fixtures::reduction_candidate();
    let mut games = vec![base.clone(), candidate.clone()];
    let mut variable_games = Vec::new();
    for (i, v) in source.variables().iter().enumerate() {
        let name = format!("G{}", i + 1);
        let diag = diagonal_payoffs(i + 1, v.domain.len(), n, k_max, epsilon);
        games.push(diagonal_game(name.clone(), &diag));
        variable_games.push((v.id.clone(), name));
    }
    let mut bcs = build_assumption_bcs(&games, &AssumptionSelection::all_structural())?;

    let diag_index = |game: &NormalFormGame, l: usize| game.outcome_index(&[l, l]);
    let game_of = |i: usize| &games[2 + i];
    for c in source.constraints() {
        let (s, t) = (source.require(&c.source)?, source.require(&c.target)?);
        let (gs, gt) = (game_of(s), game_of(t));
        let (ks, kt) = (source.domain(s).len(), source.domain(t).len());
        let mut rel = Relation::empty(gs.num_outcomes(), gt.num_outcomes());
        rel.insert(diag_index(gs, ks), diag_index(gt, kt));
        for (a, b) in c.relation.pairs() {
            rel.insert(diag_index(gs, a), diag_index(gt, b));
        }
        bcs.add_constraint(Correspondence::new(gs.name(), gt.name(), rel))?;
    }
    let (a1a1, a2a2) = (base.outcome_index(&[0, 0]), base.outcome_index(&[1, 1]));
    for i in 0..n {
        let g = game_of(i);
        let k = source.domain(i).len();
        let mut rel = Relation::empty(base.num_outcomes(), g.num_outcomes());
        for l in 0..k {
            rel.insert(a1a1, diag_index(g, l));
        }
        rel.insert(a2a2, diag_index(g, k));
        bcs.add_constraint(Correspondence::new(base.name(), g.name(), rel))?;

        let rel = Relation::from_fn(1, g.num_outcomes(), |_, b| {
            (0..=k).any(|l| diag_index(g, l) == b)
        });
        bcs.add_constraint(Correspondence::new(candidate.name(), g.name(), rel))?;
    }
    let rel = Relation::from_pairs(1, base.num_outcomes(), [(0, a1a1), (0, a2a2)]);
    bcs.add_constraint(Correspondence::new(candidate.name(), base.name(), rel))?;

    Ok(SiHardnessInstance {
        games,
        bcs,
        base: base.name().to_string(),
        candidate: candidate.name().to_string(),
        source: source.clone(),
        variable_games,
    })
}

fn fresh(taken: &[String], want: &str) -> String {
    let mut name = want.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Result of [`augment_always_satisfiable`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Augmented {
    pub bcs: Bcs,
    /// The switch variable and its "on" value: assignments with this value
    /// correspond one-to-one with the source's satisfying assignments.
    pub anchor: (String, String),
    /// Per source variable, the label of the added neutral value.
    pub zeros: Vec<String>,
}

/// Adds a switch variable and a neutral value to every domain so that the
/// all-neutral assignment always satisfies the result.
pub fn augment_always_satisfiable(source: &Bcs) -> Result<Augmented> {
    let ids: Vec<String> = source.variables().iter().map(|v| v.id.clone()).collect();
    let switch = fresh(&ids, "X0");
    let mut vars = vec![Variable::new(switch.clone(), ["0", "1"])];
    let mut zeros = Vec::new();
    for v in source.variables() {
        let z = fresh(&v.domain, "0");
        let mut domain = v.domain.clone();
        domain.push(z.clone());
        zeros.push(z);
        vars.push(Variable::new(v.id.clone(), domain));
    }
    let mut constraints = Vec::new();
    for (i, v) in source.variables().iter().enumerate() {
        let m = v.domain.len();
        // switch off ↦ neutral; switch on ↦ any original value
        let rel = Relation::from_fn(2, m + 1, |a, b| (a == 0 && b == m) || (a == 1 && b < m));
        constraints.push(Correspondence::new(switch.clone(), ids[i].clone(), rel));
    }
    for c in source.constraints() {
        let (r, k) = c.relation.dims();
        let mut rel = Relation::from_fn(r + 1, k + 1, |a, b| {
            a < r && b < k && c.relation.contains(a, b)
        });
        rel.insert(r, k);
        constraints.push(Correspondence::new(c.source.clone(), c.target.clone(), rel));
    }
    Ok(Augmented {
        bcs: Bcs::new(vars, constraints)?,
        anchor: (switch, "1".to_string()),
        zeros,
    })
}

/// "If `x` takes `x_value`, then `y` takes `y_value`."
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicationQuery {
    pub x: String,
    pub x_value: String,
    pub y: String,
    pub y_value: String,
}

impl ImplicationQuery {
    pub fn claim(&self, bcs: &Bcs) -> Result<Correspondence> {
        let (i, j) = (bcs.require(&self.x)?, bcs.require(&self.y)?);
        let (a, b) = (
            bcs.value_index(i, &self.x_value)?,
            bcs.value_index(j, &self.y_value)?,
        );
        let rel = Relation::from_fn(bcs.domain(i).len(), bcs.domain(j).len(), |p, q| {
            p != a || q == b
        });
        Ok(Correspondence::new(self.x.clone(), self.y.clone(), rel))
    }
}

/// Encodes "can `xi.0` take `xi.1`?" as an implication question on a
/// satisfiable structure: the query holds iff no satisfying assignment of
/// the source gives `xi.0` the value `xi.1`.
pub fn implication_instance(source: &Bcs, xi: (&str, &str)) -> Result<(Bcs, ImplicationQuery)> {
    let i = source.require(xi.0)?;
    let v = source.value_index(i, xi.1)?;
    if !is_satisfiable(source) {
        return precondition("implication instances need a satisfiable source structure");
    }
    let ids: Vec<String> = source.variables().iter().map(|v| v.id.clone()).collect();
    let x0 = fresh(&ids, "X0");
    let mut taken = ids.clone();
    taken.push(x0.clone());
    let flag = fresh(&taken, &format!("X{}", source.len() + 1));
    let mut vars = source.variables().to_vec();
    vars.push(Variable::new(x0.clone(), ["0"]));
    vars.push(Variable::new(flag.clone(), ["0", "1"]));
    let mut constraints = source.constraints().to_vec();
    let m = source.domain(i).len();
    constraints.push(Correspondence::new(
        xi.0,
        flag.clone(),
        Relation::from_fn(m, 2, |a, b| (a == v) == (b == 1)),
    ));
    let bcs = Bcs::new(vars, constraints)?;
    if bcs.len() != source.len() + 2 {
        return input("fresh variable names collided");
    }
    Ok((
        bcs,
        ImplicationQuery {
            x: x0,
            x_value: "0".into(),
            y: flag,
            y_value: "0".into(),
        },
    ))
}

/// The structure with one variable per game and the given constraints,
/// regenerated from game list and constraint list (used for round trips).
pub fn games_bcs(games: &[NormalFormGame], constraints: Vec<Correspondence>) -> Result<Bcs> {
    Bcs::new(games.iter().map(game_variable).collect(), constraints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bcs::{
        count_satisfying, derivable, enumerate_satisfying, implies, path_consistency,
    };
    use crate::closedness::{is_join_closed, search_max_orders};
    use crate::games::find_isomorphisms;
    use crate::random::{random_bcs, RandomBcsParams};
    use crate::si::{decide_si, find_any_si, Mode, Preference};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn montanari_is_unsat_but_path_consistent() {
        let k4 = montanari_instance();
        assert!(enumerate_satisfying(&k4, None).is_empty());
        let p = path_consistency(&k4);
        assert!(!p.is_unsat());
        for c in k4.constraints() {
            assert_eq!(
                &p.psi_oc(&c.source, &c.target).unwrap().relation,
                &c.relation
            );
        }
        let empty = Correspondence::new("X1", "X2", Relation::empty(3, 3));
        assert!(implies(&k4, &empty).unwrap());
        assert!(!derivable(&p, &empty).unwrap());
        assert!(search_max_orders(&k4).unwrap().is_none());
    }

    #[test]
    fn triangle_has_six_colourings() {
        let k4 = montanari_instance();
        let vars = k4.variables()[..3].to_vec();
        let cons = k4
            .constraints()
            .iter()
            .filter(|c| c.source != "X4" && c.target != "X4")
            .cloned()
            .collect();
        assert_eq!(count_satisfying(&Bcs::new(vars, cons).unwrap()), 6);
    }

    #[test]
    fn join_instance_properties() {
        let (bcs, joins) = join_incompleteness_instance();
        assert!(is_join_closed(&bcs, &joins).unwrap().is_closed());
        let w = &joins.tables["W"];
        let (w5, w7, w2) = (4, 6, 1);
        assert_eq!(w.join(w5, w7), 3);
        assert_eq!(w.join(w7, w2), 0);
        let p = path_consistency(&bcs);
        assert!(p.psi(0, 1).contains(1, 1));
        let claim = Correspondence::new(
            "X",
            "Y",
            Relation::from_fn(2, 2, |a, b| !(a == 1 && b == 1)),
        );
        assert!(implies(&bcs, &claim).unwrap());
        assert!(!derivable(&p, &claim).unwrap());
        // pinning x2 and y2 leaves only z4 for Z, and then nothing for W
        let xz = bcs
            .oc_from_labels("X", "Z", &[("x2", "z4"), ("x2", "z2")])
            .unwrap();
        let yz = bcs
            .oc_from_labels("Y", "Z", &[("y2", "z4"), ("y2", "z3")])
            .unwrap();
        let pinned = bcs
            .with_constraint(xz)
            .unwrap()
            .with_constraint(yz)
            .unwrap();
        assert!(enumerate_satisfying(&pinned, None).is_empty());
    }

    #[test]
    fn k4_reduction_gives_an_improvement() {
        let inst = csp_to_si_games(&montanari_instance(), false).unwrap();
        let pref = Preference::pareto(&inst.games).unwrap();
        let v = decide_si(
            &inst.bcs,
            &inst.base,
            &inst.candidate,
            &pref,
            false,
            Mode::Exact,
        )
        .unwrap();
        assert!(v.answer);
    }

    #[test]
    fn satisfiable_source_gives_no_improvement() {
        let src = Bcs::new(vec![Variable::new("A", ["only"])], vec![]).unwrap();
        let inst = csp_to_si_games(&src, false).unwrap();
        let pref = Preference::pareto(&inst.games).unwrap();
        let v = decide_si(
            &inst.bcs,
            &inst.base,
            &inst.candidate,
            &pref,
            false,
            Mode::Exact,
        )
        .unwrap();
        assert!(!v.answer);
        let ce = v.counterexample.unwrap();
        let labels = inst.bcs.assignment_labels(&ce);
        assert!(labels.contains(&("G".to_string(), "a1,a1".to_string())));
    }

    #[test]
    fn generated_games_are_pairwise_non_isomorphic() {
        for eps in [false, true] {
            let inst = csp_to_si_games(&montanari_instance(), eps).unwrap();
            for (i, a) in inst.games.iter().enumerate() {
                for b in &inst.games[i + 1..] {
                    if a.num_outcomes() > 1 || b.num_outcomes() > 1 {
                        assert!(
                            find_isomorphisms(a, b).is_empty(),
                            "{} {}",
                            a.name(),
                            b.name()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn assumption_correspondences_are_included() {
        let inst = csp_to_si_games(&montanari_instance(), false).unwrap();
        let regenerated =
            build_assumption_bcs(&inst.games, &AssumptionSelection::all_structural()).unwrap();
        for c in regenerated.constraints() {
            assert!(inst.bcs.constraints().contains(c));
        }
    }

    #[test]
    fn augmentation_of_k4() {
        let aug = augment_always_satisfiable(&montanari_instance()).unwrap();
        let all = enumerate_satisfying(&aug.bcs, None);
        assert!(!all.is_empty());
        let s = aug.bcs.require(&aug.anchor.0).unwrap();
        let on = aug.bcs.value_index(s, &aug.anchor.1).unwrap();
        assert!(all.iter().all(|a| a.0[s] != on));
    }

    #[test]
    fn augmentation_of_free_structure_counts_product() {
        let src = Bcs::new(
            vec![
                Variable::new("A", ["p", "q"]),
                Variable::new("B", ["r", "s", "t"]),
            ],
            vec![],
        )
        .unwrap();
        let aug = augment_always_satisfiable(&src).unwrap();
        let s = aug.bcs.require(&aug.anchor.0).unwrap();
        let on = enumerate_satisfying(&aug.bcs, None)
            .iter()
            .filter(|a| a.0[s] == 1)
            .count();
        assert_eq!(on, 6);
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let src = Bcs::new(vec![Variable::new("X0", ["0", "1"])], vec![]).unwrap();
        let aug = augment_always_satisfiable(&src).unwrap();
        assert_eq!(aug.anchor.0, "X0'");
        assert_eq!(aug.zeros, vec!["0'"]);
    }

    #[test]
    fn implication_on_single_value() {
        let src = Bcs::new(vec![Variable::new("A", ["only"])], vec![]).unwrap();
        let (bcs, q) = implication_instance(&src, ("A", "only")).unwrap();
        assert!(!implies(&bcs, &q.claim(&bcs).unwrap()).unwrap());
        assert!(implication_instance(&montanari_instance(), ("X1", "1")).is_err());
    }

    #[test]
    fn implication_on_augmented_k4() {
        let aug = augment_always_satisfiable(&montanari_instance()).unwrap();
        let (bcs, q) = implication_instance(&aug.bcs, (&aug.anchor.0, &aug.anchor.1)).unwrap();
        assert!(implies(&bcs, &q.claim(&bcs).unwrap()).unwrap());
    }

    fn small_source(seed: u64) -> Bcs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_bcs(&mut rng, &RandomBcsParams::default())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn reduction_soundness(seed in any::<u64>()) {
            let src = small_source(seed);
            let inst = csp_to_si_games(&src, false).unwrap();
            let pref = Preference::pareto(&inst.games).unwrap();
            let v = decide_si(&inst.bcs, &inst.base, &inst.candidate, &pref, false, Mode::Exact).unwrap();
            prop_assert_eq!(is_satisfiable(&src), !v.answer);
        }

        #[test]
        fn epsilon_variant_only_relates_base_and_candidate(seed in any::<u64>()) {
            let src = small_source(seed);
            let inst = csp_to_si_games(&src, true).unwrap();
            let pref = Preference::pareto(&inst.games).unwrap();
            for strict in [false, true] {
                for (x, y) in find_any_si(&inst.bcs, &pref, strict, Mode::Exact).unwrap() {
                    prop_assert_eq!((x.as_str(), y.as_str()), ("G", "G_prime"));
                }
            }
            let v = decide_si(&inst.bcs, &inst.base, &inst.candidate, &pref, false, Mode::Exact).unwrap();
            prop_assert_eq!(is_satisfiable(&src), !v.answer);
        }

        #[test]
        fn augmentation_bijection(seed in any::<u64>()) {
            let src = small_source(seed);
            let aug = augment_always_satisfiable(&src).unwrap();
            let s = aug.bcs.require(&aug.anchor.0).unwrap();
            let on = enumerate_satisfying(&aug.bcs, None).iter().filter(|a| a.0[s] == 1).count();
            prop_assert_eq!(on, count_satisfying(&src));
            prop_assert!(is_satisfiable(&aug.bcs));
        }
    }
}
