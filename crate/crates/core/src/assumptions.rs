//! Outcome correspondences generated from game-theoretic assumptions, and
//! their assembly into a constraint structure over a list of games.
//!
//! * dominance: a game and its one-round dominance reduction play the same
//!   surviving outcome, and never an eliminated one;
//! * isomorphism: fully reduced isomorphic games play corresponding outcomes
//!   (product of per-player image sets over all isomorphisms);
//! * nash: a game with pure equilibria plays one of them;
//! * decreasing risk: between two labeled 2×2 games where the efficient
//!   equilibrium became less risky, the efficient one is at least as likely.

use serde::{Deserialize, Serialize};

use crate::bcs::{Bcs, Correspondence, Variable};
use crate::error::{input, precondition, Result};
use crate::games::{
    eliminate_round, find_isomorphisms, is_fully_reduced, is_nash, pareto_compare, NormalFormGame,
    ParetoOrdering,
};
use crate::relation::Relation;

/// Which assumption families to apply.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssumptionSelection {
    pub dominance: bool,
    pub isomorphism: bool,
    pub nash: bool,
    pub decreasing_risk: Vec<RiskPair>,
    /// When present, dominance and isomorphism correspondences are only
    /// generated for these (unordered) game pairs.
    pub restrict_to: Option<Vec<(String, String)>>,
}

impl AssumptionSelection {
    pub fn all_structural() -> Self {
        AssumptionSelection {
            dominance: true,
            isomorphism: true,
            ..Default::default()
        }
    }

    fn is_empty(&self) -> bool {
        !self.dominance && !self.isomorphism && !self.nash && self.decreasing_risk.is_empty()
    }

    fn allows(&self, a: &str, b: &str) -> bool {
        match &self.restrict_to {
            None => true,
            Some(pairs) => pairs
                .iter()
                .any(|(x, y)| (x == a && y == b) || (x == b && y == a)),
        }
    }
}

/// A decreasing-risk pair. `a1`/`a2` give, per player, the action labels of
/// the efficient and the safe equilibrium in `g1`; `b1`/`b2` do the same for
/// `g2` and default to `a1`/`a2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskPair {
    pub g1: String,
    pub g2: String,
    pub a1: Vec<String>,
    pub a2: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b1: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b2: Option<Vec<String>>,
}

/// Per player, the action index of the efficient (`first`) and the safe
/// (`second`) equilibrium strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RiskLabeling {
    pub first: [usize; 2],
    pub second: [usize; 2],
}

impl RiskLabeling {
    pub fn resolve(game: &NormalFormGame, first: &[String], second: &[String]) -> Result<Self> {
        if game.players() != 2 || first.len() != 2 || second.len() != 2 {
            return input(format!(
                "decreasing-risk labeling for {} needs two labels per equilibrium",
                game.name()
            ));
        }
        let find = |p: usize, l: &str| match game.action_index(p, l) {
            Some(a) => Ok(a),
            None => input(format!(
                "game {}: unknown action {l:?} for player {}",
                game.name(),
                p + 1
            )),
        };
        Ok(RiskLabeling {
            first: [find(0, &first[0])?, find(1, &first[1])?],
            second: [find(0, &second[0])?, find(1, &second[1])?],
        })
    }

    /// The action index of player `p` at level `level` (0 = first, 1 = second).
    fn action(&self, p: usize, level: usize) -> usize {
        if level == 0 {
            self.first[p]
        } else {
            self.second[p]
        }
    }

    /// The outcome where player `p` plays level `own` and the opponent level `other`.
    fn profile(&self, p: usize, own: usize, other: usize) -> [usize; 2] {
        let mut prof = [0; 2];
        prof[p] = self.action(p, own);
        prof[1 - p] = self.action(1 - p, other);
        prof
    }
}

/// One maximal elimination round as a correspondence from `game` to its
/// subgame. Without dominated actions, the identity on the unchanged game.
pub fn oc_dominance(game: &NormalFormGame) -> (NormalFormGame, Correspondence) {
    match eliminate_round(game) {
        None => {
            let n = game.num_outcomes();
            let oc = Correspondence::new(game.name(), game.name(), Relation::identity(n));
            (game.clone(), oc)
        }
        Some((sub, _)) => {
            let rel = Relation::from_fn(game.num_outcomes(), sub.num_outcomes(), |a, b| {
                sub.outcome_label(b) == game.outcome_label(a)
            });
            let oc = Correspondence::new(game.name(), sub.name(), rel);
            (sub, oc)
        }
    }
}

/// The product-of-image-sets correspondence over all isomorphisms, or `None`
/// when the games are not isomorphic.
pub fn oc_isomorphism(g1: &NormalFormGame, g2: &NormalFormGame) -> Result<Option<Correspondence>> {
    for g in [g1, g2] {
        if !is_fully_reduced(g) {
            return precondition(format!(
                "isomorphism assumption needs games without strictly dominated actions; {} has some",
                g.name()
            ));
        }
    }
    let isos = find_isomorphisms(g1, g2);
    if isos.is_empty() {
        return Ok(None);
    }
    let images: Vec<Vec<Vec<bool>>> = (0..g1.players())
        .map(|p| {
            let k = g1.actions(p).len();
            let mut img = vec![vec![false; k]; k];
            for iso in &isos {
                for (a, &b) in iso.maps[p].iter().enumerate() {
                    img[a][b] = true;
                }
            }
            img
        })
        .collect();
    let rel = Relation::from_fn(g1.num_outcomes(), g2.num_outcomes(), |a, b| {
        let (pa, pb) = (g1.profile(a), g2.profile(b));
        (0..g1.players()).all(|p| images[p][pa[p]][pb[p]])
    });
    Ok(Some(Correspondence::new(g1.name(), g2.name(), rel)))
}

/// Self-loop keeping exactly the pure Nash equilibria.
pub fn oc_nash(game: &NormalFormGame) -> Result<Correspondence> {
    let n = game.num_outcomes();
    let rel = Relation::from_fn(n, n, |a, b| a == b && is_nash(game, a, false));
    if rel.is_empty() {
        return precondition(format!("game {} has no pure Nash equilibrium", game.name()));
    }
    Ok(Correspondence::new(game.name(), game.name(), rel))
}

fn check_risk_game(game: &NormalFormGame, l: &RiskLabeling) -> Result<()> {
    if game.players() != 2 || game.sizes() != [2, 2] {
        return precondition(format!(
            "decreasing risk needs 2×2 two-player games; {} is not",
            game.name()
        ));
    }
    for p in 0..2 {
        if l.first[p] == l.second[p] {
            return precondition(format!(
                "game {}: player {} uses the same action in both labeled equilibria",
                game.name(),
                p + 1
            ));
        }
    }
    let hi = game.outcome_index(&l.first);
    let lo = game.outcome_index(&l.second);
    for (idx, which) in [(hi, "efficient"), (lo, "safe")] {
        if !is_nash(game, idx, true) {
            return precondition(format!(
                "game {}: the {which} labeled profile ({}) is not a strict Nash equilibrium",
                game.name(),
                game.outcome_label(idx)
            ));
        }
    }
    if pareto_compare(game.payoffs(hi), game.payoffs(lo))? != ParetoOrdering::Better {
        return precondition(format!(
            "game {}: ({}) does not strictly Pareto-dominate ({})",
            game.name(),
            game.outcome_label(hi),
            game.outcome_label(lo)
        ));
    }
    Ok(())
}

/// Decreasing-risk correspondence from `g1` (labeled `l1`) to `g2` (labeled
/// `l2`): per player, first ↦ {first}, second ↦ {first, second}, taken as a
/// product over players.
pub fn oc_decreasing_risk(
    g1: &NormalFormGame,
    l1: &RiskLabeling,
    g2: &NormalFormGame,
    l2: &RiskLabeling,
) -> Result<Correspondence> {
    check_risk_game(g1, l1)?;
    check_risk_game(g2, l2)?;
    for p in 0..2 {
        for k in 0..2 {
            let (u, uh) = (
                g1.utility(p, &l1.profile(p, 0, k)),
                g2.utility(p, &l2.profile(p, 0, k)),
            );
            if uh < u {
                return precondition(format!(
                    "player {}: u({}) = {uh} in {} is below u({}) = {u} in {}",
                    p + 1,
                    label_of(g2, &l2.profile(p, 0, k)),
                    g2.name(),
                    label_of(g1, &l1.profile(p, 0, k)),
                    g1.name()
                ));
            }
            let (u, uh) = (
                g1.utility(p, &l1.profile(p, 1, k)),
                g2.utility(p, &l2.profile(p, 1, k)),
            );
            if uh > u {
                return precondition(format!(
                    "player {}: u({}) = {uh} in {} exceeds u({}) = {u} in {}",
                    p + 1,
                    label_of(g2, &l2.profile(p, 1, k)),
                    g2.name(),
                    label_of(g1, &l1.profile(p, 1, k)),
                    g1.name()
                ));
            }
        }
    }
    // level of an action index under a labeling
    let level = |l: &RiskLabeling, p: usize, a: usize| usize::from(a != l.first[p]);
    let rel = Relation::from_fn(g1.num_outcomes(), g2.num_outcomes(), |a, b| {
        let (pa, pb) = (g1.profile(a), g2.profile(b));
        (0..2).all(|p| {
            let (from, to) = (level(l1, p, pa[p]), level(l2, p, pb[p]));
            to == 0 || from == 1
        })
    });
    Ok(Correspondence::new(g1.name(), g2.name(), rel))
}

fn label_of(game: &NormalFormGame, profile: &[usize]) -> String {
    game.outcome_label(game.outcome_index(profile))
}

/// Every labeling pair under which the decreasing-risk preconditions hold.
pub fn discover_risk_labelings(
    g1: &NormalFormGame,
    g2: &NormalFormGame,
) -> Vec<(RiskLabeling, RiskLabeling)> {
    if g1.sizes() != [2, 2] || g2.sizes() != [2, 2] {
        return Vec::new();
    }
    let labelings: Vec<RiskLabeling> = (0..4)
        .map(|bits| {
            let first = [bits & 1, (bits >> 1) & 1];
            RiskLabeling {
                first,
                second: [1 - first[0], 1 - first[1]],
            }
        })
        .collect();
    let mut out = Vec::new();
    for l1 in &labelings {
        for l2 in &labelings {
            if oc_decreasing_risk(g1, l1, g2, l2).is_ok() {
                out.push((*l1, *l2));
            }
        }
    }
    out
}

/// Relabels a correspondence whose target is a structurally equal copy of
/// `target` so that it points at `target`'s outcome indices.
fn retarget(oc: &Correspondence, via: &NormalFormGame, target: &NormalFormGame) -> Correspondence {
    let map: Vec<usize> = (0..via.num_outcomes())
        .map(|b| {
            target
                .outcome_by_label(&via.outcome_label(b))
                .expect("structurally equal games share outcome labels")
        })
        .collect();
    let mut rel = Relation::empty(oc.relation.rows(), target.num_outcomes());
    for (a, b) in oc.relation.pairs() {
        rel.insert(a, map[b]);
    }
    Correspondence::new(oc.source.clone(), target.name(), rel)
}

pub fn game_variable(game: &NormalFormGame) -> Variable {
    Variable::new(game.name(), game.outcome_labels())
}

/// The constraint structure with one variable per game and the selected
/// assumption correspondences.
pub fn build_assumption_bcs(
    games: &[NormalFormGame],
    selection: &AssumptionSelection,
) -> Result<Bcs> {
    if games.is_empty() {
        return input("no games given");
    }
    if selection.is_empty() {
        return input("no assumption family selected");
    }
    let variables: Vec<Variable> = games.iter().map(game_variable).collect();
    let mut bcs = Bcs::new(variables, Vec::new())?;

    if selection.dominance {
        for g in games {
            if is_fully_reduced(g) {
                continue;
            }
            let (sub, oc) = oc_dominance(g);
            for h in games {
                if h.name() != g.name()
                    && h.same_structure(&sub)
                    && selection.allows(g.name(), h.name())
                {
                    bcs.add_constraint(retarget(&oc, &sub, h))?;
                }
            }
        }
    }
    if selection.isomorphism {
        let reduced: Vec<&NormalFormGame> = games.iter().filter(|g| is_fully_reduced(g)).collect();
        for (i, g1) in reduced.iter().enumerate() {
            for g2 in &reduced[i + 1..] {
                if !selection.allows(g1.name(), g2.name()) {
                    continue;
                }
                if let Some(oc) = oc_isomorphism(g1, g2)? {
                    bcs.add_constraint(oc)?;
                }
            }
        }
    }
    if selection.nash {
        for g in games {
            if let Ok(oc) = oc_nash(g) {
                bcs.add_constraint(oc)?;
            }
        }
    }
    for pair in &selection.decreasing_risk {
        let find = |name: &str| match games.iter().find(|g| g.name() == name) {
            Some(g) => Ok(g),
            None => input(format!("decreasing-risk pair names unknown game {name:?}")),
        };
        let (g1, g2) = (find(&pair.g1)?, find(&pair.g2)?);
        let l1 = RiskLabeling::resolve(g1, &pair.a1, &pair.a2)?;
        let l2 = RiskLabeling::resolve(
            g2,
            pair.b1.as_ref().unwrap_or(&pair.a1),
            pair.b2.as_ref().unwrap_or(&pair.a2),
        )?;
        bcs.add_constraint(oc_decreasing_risk(g1, &l1, g2, &l2)?)?;
    }
    Ok(bcs)
}
