//! Structural conditions under which propagation is complete: max-closedness
//! with respect to per-variable total orders, and join-closedness with
//! respect to per-variable join semilattices. Also builds certifying orders
//! for structures generated from the game-theoretic assumptions.

use std::collections::BTreeMap;

use crate::assumptions::{
    discover_risk_labelings, oc_decreasing_risk, oc_dominance, oc_isomorphism, oc_nash,
    RiskLabeling,
};
use crate::bcs::{Bcs, Correspondence};
use crate::error::{input, precondition, Error, Result};
use crate::games::{find_isomorphisms, fully_reduce, is_fully_reduced, NormalFormGame};
use crate::relation::Relation;

/// Domains larger than this are rejected by [`search_max_orders`].
pub const SEARCH_DOMAIN_CAP: usize = 8;

/// Per variable, its values listed in ascending order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VariableOrder {
    ascending: BTreeMap<String, Vec<usize>>,
}

impl VariableOrder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every variable ordered as its domain is listed.
    pub fn listed(bcs: &Bcs) -> Self {
        let mut o = VariableOrder::new();
        for v in bcs.variables() {
            o.ascending
                .insert(v.id.clone(), (0..v.domain.len()).collect());
        }
        o
    }

    pub fn insert(&mut self, var: impl Into<String>, ascending: Vec<usize>) -> Result<()> {
        let var = var.into();
        let mut seen = vec![false; ascending.len()];
        for &v in &ascending {
            if v >= seen.len() || std::mem::replace(&mut seen[v], true) {
                return input(format!("order for {var} is not a permutation"));
            }
        }
        self.ascending.insert(var, ascending);
        Ok(())
    }

    pub fn get(&self, var: &str) -> Option<&[usize]> {
        self.ascending.get(var).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Vec<usize>)> {
        self.ascending.iter()
    }

    /// `rank[v]` is the position of value `v` in the ascending order.
    pub fn ranks(&self, var: &str) -> Option<Vec<usize>> {
        self.get(var).map(|asc| {
            let mut rank = vec![0; asc.len()];
            for (r, &v) in asc.iter().enumerate() {
                rank[v] = r;
            }
            rank
        })
    }

    fn tables(&self, bcs: &Bcs) -> Result<Vec<JoinTable>> {
        bcs.variables()
            .iter()
            .map(|v| match self.get(&v.id) {
                None => input(format!("no order given for variable {}", v.id)),
                Some(asc) if asc.len() != v.domain.len() => input(format!(
                    "order for {} has {} values, domain has {}",
                    v.id,
                    asc.len(),
                    v.domain.len()
                )),
                Some(asc) => Ok(JoinTable::from_order(asc)),
            })
            .collect()
    }
}

/// A validated join operator on `0..size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinTable {
    size: usize,
    table: Vec<usize>,
}

impl JoinTable {
    /// Validates closure, idempotency, commutativity and associativity.
    pub fn new(size: usize, table: Vec<usize>) -> Result<Self> {
        if table.len() != size * size {
            return input(format!(
                "join table needs {} entries, got {}",
                size * size,
                table.len()
            ));
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= size) {
            return input(format!("join table entry {bad} is outside the carrier"));
        }
        let t = JoinTable { size, table };
        for a in 0..size {
            if t.join(a, a) != a {
                return input(format!("join table violates idempotency at element {a}"));
            }
            for b in 0..size {
                if t.join(a, b) != t.join(b, a) {
                    return input(format!("join table violates commutativity at ({a}, {b})"));
                }
                for c in 0..size {
                    if t.join(t.join(a, b), c) != t.join(a, t.join(b, c)) {
                        return input(format!(
                            "join table violates associativity at ({a}, {b}, {c})"
                        ));
                    }
                }
            }
        }
        Ok(t)
    }

    /// The max operator of a total order given in ascending order.
    pub fn from_order(ascending: &[usize]) -> Self {
        let n = ascending.len();
        let mut rank = vec![0; n];
        for (r, &v) in ascending.iter().enumerate() {
            rank[v] = r;
        }
        let table = (0..n * n)
            .map(|k| {
                let (a, b) = (k / n, k % n);
                if rank[a] >= rank[b] {
                    a
                } else {
                    b
                }
            })
            .collect();
        JoinTable { size: n, table }
    }

    /// Compiles a Hasse diagram (`(lower, upper)` cover edges) into its
    /// least-upper-bound table.
    #[allow(clippy::needless_range_loop)]
    pub fn from_hasse(size: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut leq = vec![vec![false; size]; size];
        for (a, row) in leq.iter_mut().enumerate() {
            row[a] = true;
        }
        for &(lo, hi) in edges {
            if lo >= size || hi >= size {
                return input(format!("edge ({lo}, {hi}) is outside the carrier"));
            }
            leq[lo][hi] = true;
        }
        for k in 0..size {
            for i in 0..size {
                if leq[i][k] {
                    for j in 0..size {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for a in 0..size {
            for b in a + 1..size {
                if leq[a][b] && leq[b][a] {
                    return input(format!("edges form a cycle through elements {a} and {b}"));
                }
            }
        }
        let mut table = vec![0; size * size];
        for a in 0..size {
            for b in 0..size {
                let upper: Vec<usize> = (0..size).filter(|&c| leq[a][c] && leq[b][c]).collect();
                match upper.iter().find(|&&c| upper.iter().all(|&d| leq[c][d])) {
                    Some(&c) => table[a * size + b] = c,
                    None => {
                        return input(format!(
                            "elements {a} and {b} have no unique least upper bound"
                        ))
                    }
                }
            }
        }
        JoinTable::new(size, table)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.table[a * self.size + b]
    }
}

/// Per variable, a join semilattice on its domain.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct JoinFamily {
    pub tables: BTreeMap<String, JoinTable>,
}

impl JoinFamily {
    pub fn from_orders(orders: &VariableOrder) -> Self {
        JoinFamily {
            tables: orders
                .iter()
                .map(|(k, asc)| (k.clone(), JoinTable::from_order(asc)))
                .collect(),
        }
    }

    fn tables(&self, bcs: &Bcs) -> Result<Vec<JoinTable>> {
        bcs.variables()
            .iter()
            .map(|v| match self.tables.get(&v.id) {
                None => input(format!("no join table given for variable {}", v.id)),
                Some(t) if t.size() != v.domain.len() => input(format!(
                    "join table for {} has {} elements, domain has {}",
                    v.id,
                    t.size(),
                    v.domain.len()
                )),
                Some(t) => Ok(t.clone()),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Index of the offending constraint in the structure's constraint list.
    pub constraint: usize,
    pub source: String,
    pub target: String,
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub missing: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosednessReport {
    pub violation: Option<Violation>,
}

impl ClosednessReport {
    pub fn is_closed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Two related pairs and their missing join.
pub type JoinWitness = ((usize, usize), (usize, usize), (usize, usize));

/// First pair of related pairs whose join is missing, scanning pairs in
/// row-major order.
pub fn relation_violation(rel: &Relation, tx: &JoinTable, ty: &JoinTable) -> Option<JoinWitness> {
    let pairs: Vec<(usize, usize)> = rel.pairs().collect();
    for (i, &(x1, y1)) in pairs.iter().enumerate() {
        for &(x2, y2) in &pairs[i + 1..] {
            let j = (tx.join(x1, x2), ty.join(y1, y2));
            if !rel.contains(j.0, j.1) {
                return Some(((x1, y1), (x2, y2), j));
            }
        }
    }
    None
}

fn check_with_tables(bcs: &Bcs, tables: &[JoinTable]) -> ClosednessReport {
    for (ci, c) in bcs.constraints().iter().enumerate() {
        let s = bcs.var_index(&c.source).expect("validated constraint");
        let t = bcs.var_index(&c.target).expect("validated constraint");
        if let Some((first, second, missing)) =
            relation_violation(&c.relation, &tables[s], &tables[t])
        {
            return ClosednessReport {
                violation: Some(Violation {
                    constraint: ci,
                    source: c.source.clone(),
                    target: c.target.clone(),
                    first,
                    second,
                    missing,
                }),
            };
        }
    }
    ClosednessReport { violation: None }
}

pub fn is_max_closed(bcs: &Bcs, orders: &VariableOrder) -> Result<ClosednessReport> {
    Ok(check_with_tables(bcs, &orders.tables(bcs)?))
}

pub fn is_join_closed(bcs: &Bcs, joins: &JoinFamily) -> Result<ClosednessReport> {
    Ok(check_with_tables(bcs, &joins.tables(bcs)?))
}

/// Smallest superset of `rel` closed under the given joins.
pub fn join_closure(rel: &Relation, tx: &JoinTable, ty: &JoinTable) -> Relation {
    let mut out = rel.clone();
    loop {
        let pairs: Vec<(usize, usize)> = out.pairs().collect();
        let mut grew = false;
        for (i, &(x1, y1)) in pairs.iter().enumerate() {
            for &(x2, y2) in &pairs[i + 1..] {
                let (a, b) = (tx.join(x1, x2), ty.join(y1, y2));
                if !out.contains(a, b) {
                    out.insert(a, b);
                    grew = true;
                }
            }
        }
        if !grew {
            return out;
        }
    }
}

/// Depth-first search over per-variable permutations in lexicographic order,
/// checking each constraint as soon as both endpoints are ordered. Returns
/// the lexicographically first certificate.
pub fn search_max_orders(bcs: &Bcs) -> Result<Option<VariableOrder>> {
    if let Some(v) = bcs
        .variables()
        .iter()
        .find(|v| v.domain.len() > SEARCH_DOMAIN_CAP)
    {
        return input(format!(
            "variable {} has {} values; order search is capped at {SEARCH_DOMAIN_CAP}",
            v.id,
            v.domain.len()
        ));
    }
    let n = bcs.len();
    // constraints grouped by the later of their two endpoints
    let mut due: Vec<Vec<(usize, usize, &Relation)>> = vec![Vec::new(); n];
    for c in bcs.constraints() {
        let s = bcs.var_index(&c.source).expect("validated constraint");
        let t = bcs.var_index(&c.target).expect("validated constraint");
        due[s.max(t)].push((s, t, &c.relation));
    }
    let mut tables: Vec<Option<JoinTable>> = vec![None; n];
    let mut chosen: Vec<Vec<usize>> = vec![Vec::new(); n];
    if !assign_order(bcs, &due, 0, &mut tables, &mut chosen) {
        return Ok(None);
    }
    let mut out = VariableOrder::new();
    for (v, asc) in bcs.variables().iter().zip(chosen) {
        out.insert(v.id.clone(), asc)?;
    }
    Ok(Some(out))
}

fn assign_order(
    bcs: &Bcs,
    due: &[Vec<(usize, usize, &Relation)>],
    var: usize,
    tables: &mut [Option<JoinTable>],
    chosen: &mut [Vec<usize>],
) -> bool {
    if var == bcs.len() {
        return true;
    }
    let mut perm: Vec<usize> = (0..bcs.domain(var).len()).collect();
    loop {
        tables[var] = Some(JoinTable::from_order(&perm));
        let ok = due[var].iter().all(|&(s, t, rel)| {
            let (tx, ty) = (tables[s].as_ref().unwrap(), tables[t].as_ref().unwrap());
            relation_violation(rel, tx, ty).is_none()
        });
        if ok && assign_order(bcs, due, var + 1, tables, chosen) {
            chosen[var] = perm;
            return true;
        }
        if !crate::games::next_permutation(&mut perm) {
            tables[var] = None;
            return false;
        }
    }
}

/// The order quoted for decreasing-risk games, ascending:
/// (first, second) < (second, first) < (second, second) < (first, first),
/// where the pair lists player 1's then player 2's level.
fn risk_order(game: &NormalFormGame, l: &RiskLabeling) -> Vec<usize> {
    let at = |p1: [usize; 2], p2: [usize; 2]| game.outcome_index(&[p1[0], p2[1]]);
    vec![
        at(l.first, l.second),
        at(l.second, l.first),
        at(l.second, l.second),
        at(l.first, l.first),
    ]
}

/// Outcomes ordered so that automorphism classes (products of per-player
/// orbits) are contiguous; classes by smallest member, members by index.
fn orbit_order(game: &NormalFormGame) -> Vec<usize> {
    let autos = find_isomorphisms(game, game);
    let orbit_rep: Vec<Vec<usize>> = (0..game.players())
        .map(|p| {
            (0..game.actions(p).len())
                .map(|a| autos.iter().map(|iso| iso.maps[p][a]).min().unwrap_or(a))
                .collect()
        })
        .collect();
    let class_of = |o: usize| -> Vec<usize> {
        game.profile(o)
            .iter()
            .enumerate()
            .map(|(p, &a)| orbit_rep[p][a])
            .collect()
    };
    let mut classes: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for o in 0..game.num_outcomes() {
        let key = class_of(o);
        match classes.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(o),
            None => classes.push((key, vec![o])),
        }
    }
    classes.into_iter().flat_map(|(_, m)| m).collect()
}

fn game_by_name<'a>(games: &'a [NormalFormGame], name: &str) -> Option<&'a NormalFormGame> {
    games.iter().find(|g| g.name() == name)
}

/// Certifying orders for a structure built from the assumptions over
/// `games`: decreasing-risk games get the quoted order, isomorphic reduced
/// games are ordered isomorphically, reduced games keep automorphism classes
/// contiguous, and unreduced games inherit their fully reduced game's order
/// with eliminated outcomes below, by outcome label.
pub fn orders_for_assumptions(games: &[NormalFormGame], bcs: &Bcs) -> Result<VariableOrder> {
    for v in bcs.variables() {
        match game_by_name(games, &v.id) {
            Some(g) if g.outcome_labels() == v.domain => {}
            Some(_) => {
                return input(format!(
                    "variable {} does not match its game's outcomes",
                    v.id
                ))
            }
            None => return input(format!("variable {} has no game", v.id)),
        }
    }
    let risk = classify_constraints(games, bcs)?;

    let reduced: Vec<&NormalFormGame> = bcs
        .variables()
        .iter()
        .map(|v| game_by_name(games, &v.id).unwrap())
        .filter(|g| is_fully_reduced(g))
        .collect();
    let mut classes: Vec<Vec<&NormalFormGame>> = Vec::new();
    for g in &reduced {
        match classes
            .iter_mut()
            .find(|c| !find_isomorphisms(c[0], g).is_empty())
        {
            Some(c) => c.push(g),
            None => classes.push(vec![g]),
        }
    }

    let mut orders: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for class in &classes {
        let (seed, seed_order) = match class
            .iter()
            .find_map(|g| risk.get(g.name()).map(|l| (*g, l)))
        {
            Some((g, l)) => (g, risk_order(g, l)),
            None => (class[0], orbit_order(class[0])),
        };
        for g in class {
            let iso = find_isomorphisms(seed, g)
                .into_iter()
                .next()
                .expect("class members are isomorphic to the seed");
            let order = seed_order
                .iter()
                .map(|&o| g.outcome_index(&iso.map_profile(&seed.profile(o))))
                .collect();
            orders.insert(g.name().to_string(), order);
        }
    }

    for v in bcs.variables() {
        let g = game_by_name(games, &v.id).unwrap();
        if is_fully_reduced(g) {
            continue;
        }
        let star = fully_reduce(g).reduced;
        let anchor = reduced.iter().find(|h| h.same_structure(&star));
        let mut by_label: Vec<usize> = (0..g.num_outcomes()).collect();
        by_label.sort_by_key(|&o| g.outcome_label(o));
        let order = match anchor {
            None => by_label,
            Some(h) => {
                let kept: Vec<usize> = orders[h.name()]
                    .iter()
                    .map(|&o| {
                        g.outcome_by_label(&h.outcome_label(o))
                            .expect("reduced outcomes survive")
                    })
                    .collect();
                let mut order: Vec<usize> =
                    by_label.into_iter().filter(|o| !kept.contains(o)).collect();
                order.extend(kept);
                order
            }
        };
        orders.insert(g.name().to_string(), order);
    }

    let mut out = VariableOrder::new();
    for (k, asc) in orders {
        out.insert(k, asc)?;
    }
    let report = is_max_closed(bcs, &out)?;
    if let Some(v) = report.violation {
        return Err(Error::Precondition(format!(
            "constructed orders are not max-closed on constraint {} ({} → {})",
            v.constraint, v.source, v.target
        )));
    }
    Ok(out)
}

/// Checks every constraint against the correspondences the assumptions can
/// generate over `games` and returns the decreasing-risk labeling used per game.
fn classify_constraints(
    games: &[NormalFormGame],
    bcs: &Bcs,
) -> Result<BTreeMap<String, RiskLabeling>> {
    let mut risk: BTreeMap<String, RiskLabeling> = BTreeMap::new();
    for c in bcs.constraints() {
        let g1 = game_by_name(games, &c.source).unwrap();
        let g2 = game_by_name(games, &c.target).unwrap();
        if matches_structural(g1, g2, c)? {
            continue;
        }
        let mut matched = false;
        for (l1, l2) in discover_risk_labelings(g1, g2) {
            if oc_decreasing_risk(g1, &l1, g2, &l2)?.relation == c.relation {
                for (name, l) in [(g1.name(), l1), (g2.name(), l2)] {
                    if let Some(prev) = risk.insert(name.to_string(), l) {
                        if prev != l {
                            return precondition(format!(
                                "game {name} is used with two different decreasing-risk labelings"
                            ));
                        }
                    }
                }
                matched = true;
                break;
            }
        }
        if !matched {
            return input(format!(
                "constraint {} → {} is not generated by any supported assumption",
                c.source, c.target
            ));
        }
    }
    Ok(risk)
}

fn matches_structural(
    g1: &NormalFormGame,
    g2: &NormalFormGame,
    c: &Correspondence,
) -> Result<bool> {
    if g1.name() == g2.name() {
        if let Ok(oc) = oc_nash(g1) {
            if oc.relation == c.relation {
                return Ok(true);
            }
        }
    }
    if !is_fully_reduced(g1) {
        let (sub, oc) = oc_dominance(g1);
        if g2.same_structure(&sub) {
            let rel = Relation::from_fn(g1.num_outcomes(), g2.num_outcomes(), |a, b| {
                oc.relation
                    .image(a)
                    .any(|s| sub.outcome_label(s) == g2.outcome_label(b))
            });
            if rel == c.relation {
                return Ok(true);
            }
        }
    }
    if g1.name() != g2.name() && is_fully_reduced(g1) && is_fully_reduced(g2) {
        if let Some(oc) = oc_isomorphism(g1, g2)? {
            if oc.relation == c.relation {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assumptions::{build_assumption_bcs, AssumptionSelection, RiskPair};
    use crate::bcs::Variable;
    use crate::fixtures;

    fn xy(pairs: &[(usize, usize)]) -> Bcs {
        let bcs = Bcs::new(
            vec![
                Variable::new("X", ["x1", "x2"]),
                Variable::new("Y", ["y1", "y2"]),
            ],
            vec![],
        )
        .unwrap();
        bcs.with_constraint(Correspondence::new(
            "X",
            "Y",
            Relation::from_pairs(2, 2, pairs.iter().copied()),
        ))
        .unwrap()
    }

    fn orders(x: Vec<usize>, y: Vec<usize>) -> VariableOrder {
        let mut o = VariableOrder::new();
        o.insert("X", x).unwrap();
        o.insert("Y", y).unwrap();
        o
    }

    #[test]
    fn crossing_pattern_is_a_violation() {
        // x1 > x2 and y1 > y2; relation {(x1,y2),(x2,y1)} misses (x1,y1)
        let bcs = xy(&[(0, 1), (1, 0)]);
        let report = is_max_closed(&bcs, &orders(vec![1, 0], vec![1, 0])).unwrap();
        let v = report.violation.unwrap();
        assert_eq!(v.missing, (0, 0));
        assert_eq!((v.first, v.second), ((0, 1), (1, 0)));
    }

    #[test]
    fn crossing_pattern_has_a_certificate() {
        let bcs = xy(&[(0, 1), (1, 0)]);
        let found = search_max_orders(&bcs).unwrap().unwrap();
        assert!(is_max_closed(&bcs, &found).unwrap().is_closed());
        assert_eq!(found.get("X"), Some(&[0, 1][..]));
        assert_eq!(found.get("Y"), Some(&[1, 0][..]));
    }

    #[test]
    fn full_relation_is_closed_and_listed_order_found() {
        let bcs = xy(&[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert!(is_max_closed(&bcs, &orders(vec![1, 0], vec![0, 1]))
            .unwrap()
            .is_closed());
        let empty = Bcs::new(bcs.variables().to_vec(), vec![]).unwrap();
        assert_eq!(
            search_max_orders(&empty).unwrap().unwrap(),
            VariableOrder::listed(&empty)
        );
    }

    #[test]
    fn missing_order_is_an_error() {
        let bcs = xy(&[(0, 0)]);
        let mut o = VariableOrder::new();
        o.insert("X", vec![0, 1]).unwrap();
        assert!(is_max_closed(&bcs, &o).is_err());
        assert!(o.insert("Y", vec![0, 0]).is_err());
    }

    #[test]
    fn join_table_axioms() {
        let err = JoinTable::new(2, vec![0, 1, 0, 1]).unwrap_err().to_string();
        assert!(err.contains("commutativity"), "{err}");
        let err = JoinTable::new(2, vec![1, 1, 1, 1]).unwrap_err().to_string();
        assert!(err.contains("idempotency"), "{err}");
        assert!(JoinTable::new(2, vec![0, 1, 1, 1]).is_ok());
    }

    #[test]
    fn hasse_compilation() {
        // diamond: 3 below 1 and 2, both below 0
        let t = JoinTable::from_hasse(4, &[(3, 1), (3, 2), (1, 0), (2, 0)]).unwrap();
        assert_eq!(t.join(1, 2), 0);
        assert_eq!(t.join(3, 2), 2);
        // two maximal elements: no least upper bound
        assert!(JoinTable::from_hasse(3, &[(2, 0), (2, 1)]).is_err());
        assert!(JoinTable::from_hasse(2, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn max_tables_agree_with_order_check() {
        let bcs = xy(&[(0, 1), (1, 0)]);
        for x in [vec![0, 1], vec![1, 0]] {
            for y in [vec![0, 1], vec![1, 0]] {
                let o = orders(x.clone(), y.clone());
                assert_eq!(
                    is_max_closed(&bcs, &o).unwrap(),
                    is_join_closed(&bcs, &JoinFamily::from_orders(&o)).unwrap()
                );
            }
        }
    }

    #[test]
    fn trio_orders_certify() {
        let (ga, gb, gc) = fixtures::trio();
        let games = vec![ga, gb, gc];
        let bcs = build_assumption_bcs(&games, &AssumptionSelection::all_structural()).unwrap();
        let o = orders_for_assumptions(&games, &bcs).unwrap();
        assert!(is_max_closed(&bcs, &o).unwrap().is_closed());
    }

    #[test]
    fn stag_hunt_pair_gets_the_quoted_order() {
        let games = vec![fixtures::stag_hunt_left(), fixtures::stag_hunt_right()];
        let sel = AssumptionSelection {
            decreasing_risk: vec![RiskPair {
                g1: "SH".into(),
                g2: "SH2".into(),
                a1: vec!["H".into(), "H".into()],
                a2: vec!["L".into(), "L".into()],
                b1: None,
                b2: None,
            }],
            ..Default::default()
        };
        let bcs = build_assumption_bcs(&games, &sel).unwrap();
        let o = orders_for_assumptions(&games, &bcs).unwrap();
        let g = &games[0];
        let names: Vec<String> = o
            .get("SH")
            .unwrap()
            .iter()
            .map(|&i| g.outcome_label(i))
            .collect();
        assert_eq!(names, vec!["H,L", "L,H", "L,L", "H,H"]);
        assert_eq!(o.get("SH"), o.get("SH2"));
    }

    #[test]
    fn nash_only_structure_is_certified() {
        let games = vec![fixtures::stag_hunt_left()];
        let sel = AssumptionSelection {
            nash: true,
            ..Default::default()
        };
        let bcs = build_assumption_bcs(&games, &sel).unwrap();
        assert_eq!(bcs.constraints().len(), 1);
        assert!(orders_for_assumptions(&games, &bcs).is_ok());
    }

    #[test]
    fn foreign_constraints_are_rejected() {
        let games = vec![fixtures::stag_hunt_left(), fixtures::prisoners_dilemma()];
        let bcs = build_assumption_bcs(&games, &AssumptionSelection::all_structural()).unwrap();
        let bcs = bcs
            .with_constraint(Correspondence::new(
                "SH",
                "PD",
                Relation::from_pairs(4, 4, [(0, 3)]),
            ))
            .unwrap();
        assert!(orders_for_assumptions(&games, &bcs).is_err());
    }
}
