//! Normal-form games and the primitives that feed assumption generation:
//! strict dominance, iterated elimination, affine isomorphism, pure Nash
//! equilibria and Pareto comparison.
//!
//! Payoffs are exact rationals. Outcomes are indexed in row-major order over
//! the action lists, player 0 varying slowest.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{input, Result};

pub type Payoff = Ratio<i64>;

/// Convenience constructor for integer payoffs.
pub fn int(v: i64) -> Payoff {
    Payoff::from_integer(v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormGame {
    name: String,
    actions: Vec<Vec<String>>,
    /// One payoff vector per outcome, indexed by outcome index.
    utilities: Vec<Vec<Payoff>>,
}

/// A pure strategy profile of a named game.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outcome {
    pub game: String,
    pub profile: Vec<usize>,
}

impl NormalFormGame {
    pub fn new(
        name: impl Into<String>,
        actions: Vec<Vec<String>>,
        utilities: Vec<Vec<Payoff>>,
    ) -> Result<Self> {
        let name = name.into();
        if actions.is_empty() {
            return input(format!("game {name}: needs at least one player"));
        }
        for (p, acts) in actions.iter().enumerate() {
            if acts.is_empty() {
                return input(format!("game {name}: player {} has no actions", p + 1));
            }
            let mut seen = HashSet::new();
            for a in acts {
                if !seen.insert(a) {
                    return input(format!(
                        "game {name}: duplicate action label {a:?} for player {}",
                        p + 1
                    ));
                }
                if a.contains(',') {
                    return input(format!("game {name}: action label {a:?} contains ','"));
                }
            }
        }
        let expected: usize = actions.iter().map(Vec::len).product();
        if utilities.len() != expected {
            return input(format!(
                "game {name}: expected {expected} utility entries, got {}",
                utilities.len()
            ));
        }
        if let Some(bad) = utilities.iter().position(|u| u.len() != actions.len()) {
            return input(format!(
                "game {name}: outcome {bad} has {} payoffs for {} players",
                utilities[bad].len(),
                actions.len()
            ));
        }
        Ok(NormalFormGame {
            name,
            actions,
            utilities,
        })
    }

    /// Builds a game from a payoff function over action-index profiles.
    pub fn from_fn(
        name: impl Into<String>,
        actions: Vec<Vec<String>>,
        mut payoff: impl FnMut(&[usize]) -> Vec<Payoff>,
    ) -> Result<Self> {
        let sizes: Vec<usize> = actions.iter().map(Vec::len).collect();
        let total: usize = sizes.iter().product();
        let utilities = (0..total).map(|idx| payoff(&decode(&sizes, idx))).collect();
        NormalFormGame::new(name, actions, utilities)
    }

    /// Two-player game from a row-major table of `(u1, u2)` integer payoffs.
    pub fn bimatrix(
        name: impl Into<String>,
        rows: &[&str],
        cols: &[&str],
        table: &[&[(i64, i64)]],
    ) -> Result<Self> {
        let actions = vec![
            rows.iter().map(|s| s.to_string()).collect(),
            cols.iter().map(|s| s.to_string()).collect(),
        ];
        if table.len() != rows.len() || table.iter().any(|r| r.len() != cols.len()) {
            return input("bimatrix table shape does not match action lists");
        }
        NormalFormGame::from_fn(name, actions, |p| {
            let (a, b) = table[p[0]][p[1]];
            vec![int(a), int(b)]
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn players(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self, player: usize) -> &[String] {
        &self.actions[player]
    }

    pub fn action_lists(&self) -> &[Vec<String>] {
        &self.actions
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.actions.iter().map(Vec::len).collect()
    }

    pub fn num_outcomes(&self) -> usize {
        self.utilities.len()
    }

    pub fn action_index(&self, player: usize, label: &str) -> Option<usize> {
        self.actions.get(player)?.iter().position(|a| a == label)
    }

    pub fn outcome_index(&self, profile: &[usize]) -> usize {
        debug_assert_eq!(profile.len(), self.players());
        profile
            .iter()
            .zip(&self.actions)
            .fold(0, |acc, (&a, acts)| acc * acts.len() + a)
    }

    pub fn profile(&self, index: usize) -> Vec<usize> {
        decode(&self.sizes(), index)
    }

    pub fn outcome_label(&self, index: usize) -> String {
        self.profile(index)
            .iter()
            .enumerate()
            .map(|(p, &a)| self.actions[p][a].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn outcome_labels(&self) -> Vec<String> {
        (0..self.num_outcomes())
            .map(|i| self.outcome_label(i))
            .collect()
    }

    /// Looks up an outcome by its comma-joined action labels.
    pub fn outcome_by_label(&self, label: &str) -> Option<usize> {
        let parts: Vec<&str> = label.split(',').collect();
        if parts.len() != self.players() {
            return None;
        }
        let profile = parts
            .iter()
            .enumerate()
            .map(|(p, l)| self.action_index(p, l.trim()))
            .collect::<Option<Vec<_>>>()?;
        Some(self.outcome_index(&profile))
    }

    pub fn payoffs(&self, index: usize) -> &[Payoff] {
        &self.utilities[index]
    }

    pub fn utility(&self, player: usize, profile: &[usize]) -> Payoff {
        self.utilities[self.outcome_index(profile)][player]
    }

    /// The subgame keeping, for each player, the listed action indices (in order).
    pub fn restrict(&self, name: impl Into<String>, keep: &[Vec<usize>]) -> Result<Self> {
        let actions: Vec<Vec<String>> = keep
            .iter()
            .enumerate()
            .map(|(p, ks)| ks.iter().map(|&a| self.actions[p][a].clone()).collect())
            .collect();
        NormalFormGame::from_fn(name, actions, |sub| {
            let full: Vec<usize> = sub.iter().enumerate().map(|(p, &a)| keep[p][a]).collect();
            self.utilities[self.outcome_index(&full)].clone()
        })
    }

    /// Same action labels per player (as sets) and same payoff on every labeled outcome.
    pub fn same_structure(&self, other: &NormalFormGame) -> bool {
        if self.players() != other.players() || self.num_outcomes() != other.num_outcomes() {
            return false;
        }
        for p in 0..self.players() {
            let mine: HashSet<&String> = self.actions[p].iter().collect();
            let theirs: HashSet<&String> = other.actions[p].iter().collect();
            if mine != theirs {
                return false;
            }
        }
        (0..self.num_outcomes()).all(|i| match other.outcome_by_label(&self.outcome_label(i)) {
            Some(j) => self.utilities[i] == other.utilities[j],
            None => false,
        })
    }

    fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.players() {
            return input(format!(
                "game {}: player index {player} out of range (players: {})",
                self.name,
                self.players()
            ));
        }
        Ok(())
    }

    fn check_action(&self, player: usize, action: usize) -> Result<()> {
        if action >= self.actions[player].len() {
            return input(format!(
                "game {}: action index {action} out of range for player {}",
                self.name,
                player + 1
            ));
        }
        Ok(())
    }

    /// All outcome indices with `player` fixed to `action`, in the order of
    /// the opponents' profiles.
    fn slice(&self, player: usize, action: usize) -> impl Iterator<Item = usize> + '_ {
        let sizes = self.sizes();
        (0..self.num_outcomes()).filter(move |&i| decode(&sizes, i)[player] == action)
    }

    fn dominates_unchecked(&self, player: usize, dominator: usize, dominated: usize) -> bool {
        self.slice(player, dominator)
            .zip(self.slice(player, dominated))
            .all(|(a, b)| self.utilities[a][player] > self.utilities[b][player])
    }
}

/// Mixed-radix decoding of an outcome index, player 0 most significant.
pub(crate) fn decode(sizes: &[usize], mut index: usize) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for (slot, &s) in out.iter_mut().zip(sizes).rev() {
        *slot = index % s;
        index /= s;
    }
    out
}

pub fn strictly_dominates(
    game: &NormalFormGame,
    player: usize,
    dominator: usize,
    dominated: usize,
) -> Result<bool> {
    game.check_player(player)?;
    game.check_action(player, dominator)?;
    game.check_action(player, dominated)?;
    if dominator == dominated {
        return input("an action cannot be compared with itself for strict dominance");
    }
    Ok(game.dominates_unchecked(player, dominator, dominated))
}

/// Per player, the indices of actions strictly dominated by some other action.
pub fn dominated_actions(game: &NormalFormGame) -> Vec<Vec<usize>> {
    (0..game.players())
        .map(|p| {
            let n = game.actions[p].len();
            (0..n)
                .filter(|&b| (0..n).any(|a| a != b && game.dominates_unchecked(p, a, b)))
                .collect()
        })
        .collect()
}

pub fn is_fully_reduced(game: &NormalFormGame) -> bool {
    dominated_actions(game).iter().all(Vec::is_empty)
}

/// One round of maximal elimination: every currently dominated action of
/// every player is removed at once. `None` when nothing is dominated.
pub fn eliminate_round(game: &NormalFormGame) -> Option<(NormalFormGame, Vec<Vec<usize>>)> {
    let dominated = dominated_actions(game);
    if dominated.iter().all(Vec::is_empty) {
        return None;
    }
    let keep: Vec<Vec<usize>> = dominated
        .iter()
        .enumerate()
        .map(|(p, gone)| {
            (0..game.actions[p].len())
                .filter(|a| !gone.contains(a))
                .collect()
        })
        .collect();
    let sub = game
        .restrict(format!("{}'", game.name), &keep)
        .expect("restriction of a valid game keeps at least one action per player");
    Some((sub, dominated))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTrace {
    /// Per round, per player, the labels eliminated in that round.
    pub rounds: Vec<Vec<Vec<String>>>,
    pub reduced: NormalFormGame,
}

pub fn fully_reduce(game: &NormalFormGame) -> ReductionTrace {
    let mut current = game.clone();
    let mut rounds = Vec::new();
    while let Some((next, gone)) = eliminate_round(&current) {
        rounds.push(
            gone.iter()
                .enumerate()
                .map(|(p, idx)| idx.iter().map(|&a| current.actions[p][a].clone()).collect())
                .collect(),
        );
        current = next;
    }
    ReductionTrace {
        rounds,
        reduced: current.with_name(game.name.clone()),
    }
}

/// `u_i(a) = scale_i · u'_i(Φ(a)) + shift_i` for every outcome `a` and player `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    /// Per player, `maps[i][a]` is the image of action `a` in the second game.
    pub maps: Vec<Vec<usize>>,
    pub scales: Vec<Payoff>,
    pub shifts: Vec<Payoff>,
}

impl Isomorphism {
    pub fn map_profile(&self, profile: &[usize]) -> Vec<usize> {
        profile
            .iter()
            .enumerate()
            .map(|(p, &a)| self.maps[p][a])
            .collect()
    }

    pub fn inverse(&self) -> Isomorphism {
        let maps = self
            .maps
            .iter()
            .map(|m| {
                let mut inv = vec![0; m.len()];
                for (a, &b) in m.iter().enumerate() {
                    inv[b] = a;
                }
                inv
            })
            .collect();
        Isomorphism {
            maps,
            scales: self.scales.iter().map(|l| l.recip()).collect(),
            shifts: self
                .scales
                .iter()
                .zip(&self.shifts)
                .map(|(l, b)| -b / l)
                .collect(),
        }
    }

    /// `self: g1 → g2` followed by `next: g2 → g3`.
    pub fn then(&self, next: &Isomorphism) -> Isomorphism {
        Isomorphism {
            maps: self
                .maps
                .iter()
                .zip(&next.maps)
                .map(|(f, g)| f.iter().map(|&a| g[a]).collect())
                .collect(),
            scales: self
                .scales
                .iter()
                .zip(&next.scales)
                .map(|(a, b)| a * b)
                .collect(),
            shifts: self
                .scales
                .iter()
                .zip(&self.shifts)
                .zip(&next.shifts)
                .map(|((l1, b1), b2)| l1 * b2 + b1)
                .collect(),
        }
    }
}

/// Lexicographic successor of a permutation; false when `perm` was the last one.
pub(crate) fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

fn value_profile(game: &NormalFormGame, player: usize) -> Vec<usize> {
    let mut vals: Vec<Payoff> = game.utilities.iter().map(|u| u[player]).collect();
    vals.sort();
    let mut counts = Vec::new();
    let mut i = 0;
    while i < vals.len() {
        let j = vals[i..].iter().take_while(|v| **v == vals[i]).count();
        counts.push(j);
        i += j;
    }
    counts
}

/// Solves `u = λ·u' + b` with `λ > 0` over all outcomes for one player.
fn affine_fit(
    g1: &NormalFormGame,
    g2: &NormalFormGame,
    player: usize,
    image: &[usize],
) -> Option<(Payoff, Payoff)> {
    let pairs: Vec<(Payoff, Payoff)> = (0..g1.num_outcomes())
        .map(|i| (g1.utilities[i][player], g2.utilities[image[i]][player]))
        .collect();
    let (u0, v0) = pairs[0];
    let scale = match pairs.iter().find(|(_, v)| *v != v0) {
        Some(&(u1, v1)) => (u1 - u0) / (v1 - v0),
        // u' constant: any λ works, so report λ = 1
        None => Payoff::one(),
    };
    if scale <= Payoff::zero() {
        return None;
    }
    let shift = u0 - scale * v0;
    pairs
        .iter()
        .all(|&(u, v)| u == scale * v + shift)
        .then_some((scale, shift))
}

/// Every isomorphism from `g1` to `g2`, enumerating per-player bijections in
/// lexicographic order (player 0 slowest). Factorial in the action counts;
/// intended for games with at most about six actions per player.
pub fn find_isomorphisms(g1: &NormalFormGame, g2: &NormalFormGame) -> Vec<Isomorphism> {
    if g1.sizes() != g2.sizes() {
        return Vec::new();
    }
    let n = g1.players();
    if (0..n).any(|p| value_profile(g1, p) != value_profile(g2, p)) {
        return Vec::new();
    }
    let sizes = g1.sizes();
    let mut perms: Vec<Vec<usize>> = sizes.iter().map(|&k| (0..k).collect()).collect();
    let mut found = Vec::new();
    loop {
        let image: Vec<usize> = (0..g1.num_outcomes())
            .map(|i| {
                let prof = decode(&sizes, i);
                let mapped: Vec<usize> =
                    prof.iter().enumerate().map(|(p, &a)| perms[p][a]).collect();
                g2.outcome_index(&mapped)
            })
            .collect();
        let fits: Option<Vec<(Payoff, Payoff)>> =
            (0..n).map(|p| affine_fit(g1, g2, p, &image)).collect();
        if let Some(fits) = fits {
            found.push(Isomorphism {
                maps: perms.clone(),
                scales: fits.iter().map(|f| f.0).collect(),
                shifts: fits.iter().map(|f| f.1).collect(),
            });
        }
        // advance the odometer of permutations, last player fastest
        let mut p = n;
        loop {
            if p == 0 {
                return found;
            }
            p -= 1;
            if next_permutation(&mut perms[p]) {
                break;
            }
            perms[p] = (0..sizes[p]).collect();
        }
    }
}

pub fn pure_nash_equilibria(game: &NormalFormGame, strict: bool) -> Vec<Outcome> {
    (0..game.num_outcomes())
        .filter(|&i| is_nash(game, i, strict))
        .map(|i| Outcome {
            game: game.name.clone(),
            profile: game.profile(i),
        })
        .collect()
}

pub(crate) fn is_nash(game: &NormalFormGame, index: usize, strict: bool) -> bool {
    let profile = game.profile(index);
    (0..game.players()).all(|p| {
        let here = game.utilities[index][p];
        (0..game.actions[p].len())
            .filter(|&a| a != profile[p])
            .all(|a| {
                let mut dev = profile.clone();
                dev[p] = a;
                let there = game.utility(p, &dev);
                if strict {
                    there < here
                } else {
                    there <= here
                }
            })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParetoOrdering {
    Better,
    Worse,
    Equal,
    Incomparable,
}

pub fn pareto_compare(u: &[Payoff], v: &[Payoff]) -> Result<ParetoOrdering> {
    if u.len() != v.len() {
        return input(format!(
            "payoff vectors of different lengths ({} vs {})",
            u.len(),
            v.len()
        ));
    }
    let (mut ge, mut le) = (true, true);
    for (a, b) in u.iter().zip(v) {
        match a.cmp(b) {
            Ordering::Greater => le = false,
            Ordering::Less => ge = false,
            Ordering::Equal => {}
        }
    }
    Ok(match (ge, le) {
        (true, true) => ParetoOrdering::Equal,
        (true, false) => ParetoOrdering::Better,
        (false, true) => ParetoOrdering::Worse,
        (false, false) => ParetoOrdering::Incomparable,
    })
}
