//! Safe improvements: preferences over (variable, outcome) keys, the
//! improvement correspondence, and deciders in three modes.
//!
//! * `exact` adds the non-improvement correspondence and asks the oracle for
//!   a satisfying assignment; always correct.
//! * `propagation` checks whether the path-consistency fixed point already
//!   entails the improvement; complete on max-closed structures.
//! * `refutation` only relies on propagation detecting unsatisfiability,
//!   which is complete on join-closed structures.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bcs::{
    counterexample, derivable, path_consistency, Assignment, Bcs, Correspondence, PropagatedBcs,
};
use crate::closedness::{is_join_closed, is_max_closed, JoinFamily, VariableOrder};
use crate::error::{input, precondition, Error, Result};
use crate::games::{NormalFormGame, Payoff};
use crate::relation::Relation;

/// A (variable, outcome label) pair.
pub type OutcomeKey = (String, String);

/// A preorder `⪰` over outcome keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preference {
    keys: Vec<(String, String)>,
    index: HashMap<(String, String), usize>,
    geq: Relation,
}

impl Preference {
    fn from_keys(
        keys: Vec<(String, String)>,
        mut geq: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, k) in keys.iter().enumerate() {
            if index.insert(k.clone(), i).is_some() {
                return input(format!("duplicate preference key ({}, {})", k.0, k.1));
            }
        }
        let n = keys.len();
        let geq = Relation::from_fn(n, n, |a, b| a == b || geq(a, b));
        Ok(Preference { keys, index, geq })
    }

    /// `a ⪰ b` iff `a`'s payoff vector is componentwise at least `b`'s.
    pub fn from_utilities(keys: Vec<(String, String)>, vectors: Vec<Vec<Payoff>>) -> Result<Self> {
        if keys.len() != vectors.len() {
            return input("one utility vector per key is required");
        }
        if let Some(first) = vectors.first() {
            if vectors.iter().any(|v| v.len() != first.len()) {
                return input("utility vectors have different numbers of players");
            }
        }
        Preference::from_keys(keys, |a, b| {
            vectors[a].iter().zip(&vectors[b]).all(|(x, y)| x >= y)
        })
    }

    /// The Pareto order on the games' payoff vectors.
    pub fn pareto(games: &[NormalFormGame]) -> Result<Self> {
        if let Some(g) = games.iter().find(|g| g.players() != games[0].players()) {
            return input(format!(
                "game {} has {} players, {} has {}",
                g.name(),
                g.players(),
                games[0].name(),
                games[0].players()
            ));
        }
        let (keys, vectors) = game_keys(games, |g, o| g.payoffs(o).to_vec());
        Preference::from_utilities(keys, vectors)
    }

    /// One player's utility order (player index from 0).
    pub fn player(games: &[NormalFormGame], player: usize) -> Result<Self> {
        if let Some(g) = games.iter().find(|g| player >= g.players()) {
            return input(format!("game {} has no player {}", g.name(), player + 1));
        }
        let (keys, vectors) = game_keys(games, |g, o| vec![g.payoffs(o)[player]]);
        Preference::from_utilities(keys, vectors)
    }

    /// Reflexive-transitive closure of explicit `a ⪰ b` facts over the
    /// structure's (variable, value) keys. Rejects facts that would make two
    /// distinct keys mutually preferred.
    pub fn explicit(bcs: &Bcs, facts: &[(OutcomeKey, OutcomeKey)]) -> Result<Self> {
        let keys: Vec<(String, String)> = bcs
            .variables()
            .iter()
            .flat_map(|v| v.domain.iter().map(move |d| (v.id.clone(), d.clone())))
            .collect();
        let mut pref = Preference::from_keys(keys, |_, _| false)?;
        for (a, b) in facts {
            let (i, j) = (pref.require(a)?, pref.require(b)?);
            pref.geq.insert(i, j);
        }
        let n = pref.keys.len();
        for k in 0..n {
            for i in 0..n {
                if pref.geq.contains(i, k) {
                    for j in 0..n {
                        if pref.geq.contains(k, j) {
                            pref.geq.insert(i, j);
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if pref.geq.contains(i, j) && pref.geq.contains(j, i) {
                    let (a, b) = (&pref.keys[i], &pref.keys[j]);
                    return input(format!(
                        "explicit preference makes ({}, {}) and ({}, {}) mutually preferred",
                        a.0, a.1, b.0, b.1
                    ));
                }
            }
        }
        Ok(pref)
    }

    pub fn keys(&self) -> &[(String, String)] {
        &self.keys
    }

    pub fn key_index(&self, var: &str, label: &str) -> Option<usize> {
        self.index
            .get(&(var.to_string(), label.to_string()))
            .copied()
    }

    fn require(&self, key: &(String, String)) -> Result<usize> {
        match self.index.get(key) {
            Some(&i) => Ok(i),
            None => input(format!("no preference entry for ({}, {})", key.0, key.1)),
        }
    }

    /// `a ⪰ b` by key index.
    pub fn geq(&self, a: usize, b: usize) -> bool {
        self.geq.contains(a, b)
    }

    /// `a ≻ b` iff `a ⪰ b` and not `b ⪰ a`.
    pub fn strictly(&self, a: usize, b: usize) -> bool {
        self.geq(a, b) && !self.geq(b, a)
    }

    /// True when every `⪰` fact of `self` also holds in `other`.
    pub fn is_sub_preference_of(&self, other: &Preference) -> bool {
        self.keys.iter().enumerate().all(|(i, ki)| {
            self.keys.iter().enumerate().all(|(j, kj)| {
                !self.geq(i, j)
                    || match (other.index.get(ki), other.index.get(kj)) {
                        (Some(&a), Some(&b)) => other.geq(a, b),
                        _ => false,
                    }
            })
        })
    }
}

fn game_keys(
    games: &[NormalFormGame],
    vector: impl Fn(&NormalFormGame, usize) -> Vec<Payoff>,
) -> (Vec<(String, String)>, Vec<Vec<Payoff>>) {
    let mut keys = Vec::new();
    let mut vectors = Vec::new();
    for g in games {
        for o in 0..g.num_outcomes() {
            keys.push((g.name().to_string(), g.outcome_label(o)));
            vectors.push(vector(g, o));
        }
    }
    (keys, vectors)
}

/// `{(o, o') | (y, o') ⪰ (x, o)}`, or `≻` when strict.
pub fn improvement_oc(
    bcs: &Bcs,
    x: &str,
    y: &str,
    pref: &Preference,
    strict: bool,
) -> Result<Correspondence> {
    let (i, j) = (bcs.require(x)?, bcs.require(y)?);
    let lookup = |var: &str, dom: &[String]| -> Result<Vec<usize>> {
        dom.iter()
            .map(|d| pref.require(&(var.to_string(), d.clone())))
            .collect()
    };
    let kx = lookup(x, bcs.domain(i))?;
    let ky = lookup(y, bcs.domain(j))?;
    let rel = Relation::from_fn(kx.len(), ky.len(), |a, b| {
        if strict {
            pref.strictly(ky[b], kx[a])
        } else {
            pref.geq(ky[b], kx[a])
        }
    });
    Ok(Correspondence::new(x, y, rel))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Propagation,
    Refutation,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Propagation => "propagation",
            Mode::Refutation => "refutation",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "propagation" => Ok(Mode::Propagation),
            "refutation" => Ok(Mode::Refutation),
            other => input(format!(
                "unknown mode {other:?} (exact, propagation, refutation)"
            )),
        }
    }
}

/// Evidence that the incomplete modes are complete on a given structure.
#[derive(Clone, Debug)]
pub enum Certificate {
    Orders(VariableOrder),
    Joins(JoinFamily),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiVerdict {
    pub answer: bool,
    pub mode: Mode,
    /// Exact mode, or a verified certificate that makes the mode complete.
    pub certified: bool,
    /// In exact mode, a satisfying assignment where `y` does not improve on `x`.
    pub counterexample: Option<Assignment>,
    pub warnings: Vec<String>,
}

/// Verifies a certificate for `mode`; returns whether the mode is complete.
pub fn certify(bcs: &Bcs, mode: Mode, certificate: Option<&Certificate>) -> Result<bool> {
    let Some(cert) = certificate else {
        return Ok(mode == Mode::Exact);
    };
    let report = match cert {
        Certificate::Orders(o) => is_max_closed(bcs, o)?,
        Certificate::Joins(j) => {
            if mode == Mode::Propagation {
                return precondition("propagation mode needs total orders; join semilattices only certify refutation");
            }
            is_join_closed(bcs, j)?
        }
    };
    if let Some(v) = report.violation {
        return precondition(format!(
            "certificate rejected: constraint {} ({} → {}) is not closed",
            v.constraint, v.source, v.target
        ));
    }
    Ok(true)
}

fn uncertified_warning(mode: Mode) -> String {
    format!("completeness not certified: a negative {mode} verdict may be wrong")
}

pub fn decide_si(
    bcs: &Bcs,
    x: &str,
    y: &str,
    pref: &Preference,
    strict: bool,
    mode: Mode,
) -> Result<SiVerdict> {
    decide_si_with(bcs, x, y, pref, strict, mode, None)
}

pub fn decide_si_with(
    bcs: &Bcs,
    x: &str,
    y: &str,
    pref: &Preference,
    strict: bool,
    mode: Mode,
    certificate: Option<&Certificate>,
) -> Result<SiVerdict> {
    let certified = certify(bcs, mode, certificate)?;
    let claim = improvement_oc(bcs, x, y, pref, strict)?;
    let propagated = match mode {
        Mode::Propagation => Some(path_consistency(bcs)),
        _ => None,
    };
    decide_prepared(bcs, &claim, mode, certified, propagated.as_ref())
}

fn decide_prepared(
    bcs: &Bcs,
    claim: &Correspondence,
    mode: Mode,
    certified: bool,
    propagated: Option<&PropagatedBcs>,
) -> Result<SiVerdict> {
    let (answer, counter) = match mode {
        Mode::Exact => {
            let c = counterexample(bcs, claim)?;
            (c.is_none(), c)
        }
        Mode::Propagation => {
            let p = propagated.expect("propagation mode is prepared with a fixed point");
            (derivable(p, claim)?, None)
        }
        Mode::Refutation => (refute(bcs, claim)?, None),
    };
    let warnings = if certified || answer {
        Vec::new()
    } else {
        vec![uncertified_warning(mode)]
    };
    Ok(SiVerdict {
        answer,
        mode,
        certified,
        counterexample: counter,
        warnings,
    })
}

/// True when propagation refutes every way of violating `claim`. First the
/// whole non-improvement correspondence is added; if that is not refuted,
/// each still-possible non-improving pair is pinned on its own (a single
/// pair is closed under any join, so each pinned structure stays in the
/// join-closed class).
fn refute(bcs: &Bcs, claim: &Correspondence) -> Result<bool> {
    let negated = Correspondence::new(
        claim.source.clone(),
        claim.target.clone(),
        claim.relation.complement(),
    );
    if path_consistency(&bcs.with_constraint(negated.clone())?).is_unsat() {
        return Ok(true);
    }
    let base = path_consistency(bcs);
    if base.is_unsat() {
        return Ok(true);
    }
    let (i, j) = (bcs.require(&claim.source)?, bcs.require(&claim.target)?);
    let candidates = negated.relation.intersect(base.psi(i, j));
    for (a, b) in candidates.pairs() {
        let pin = Correspondence::new(
            claim.source.clone(),
            claim.target.clone(),
            Relation::from_pairs(negated.relation.rows(), negated.relation.cols(), [(a, b)]),
        );
        if !path_consistency(&bcs.with_constraint(pin)?).is_unsat() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every `y ≠ x` that is a safe improvement on `x`, in variable order.
pub fn find_si_on(
    bcs: &Bcs,
    x: &str,
    pref: &Preference,
    strict: bool,
    mode: Mode,
) -> Result<Vec<String>> {
    bcs.require(x)?;
    let propagated = (mode == Mode::Propagation).then(|| path_consistency(bcs));
    let certified = certify(bcs, mode, None)?;
    let mut out = Vec::new();
    for v in bcs.variables() {
        if v.id == x {
            continue;
        }
        let claim = improvement_oc(bcs, x, &v.id, pref, strict)?;
        if decide_prepared(bcs, &claim, mode, certified, propagated.as_ref())?.answer {
            out.push(v.id.clone());
        }
    }
    Ok(out)
}

/// Every ordered pair `(x, y)`, `x ≠ y`, with `y` a safe improvement on `x`.
pub fn find_any_si(
    bcs: &Bcs,
    pref: &Preference,
    strict: bool,
    mode: Mode,
) -> Result<Vec<(String, String)>> {
    let propagated = (mode == Mode::Propagation).then(|| path_consistency(bcs));
    let certified = certify(bcs, mode, None)?;
    let mut out = Vec::new();
    for x in bcs.variables() {
        for y in bcs.variables() {
            if x.id == y.id {
                continue;
            }
            let claim = improvement_oc(bcs, &x.id, &y.id, pref, strict)?;
            if decide_prepared(bcs, &claim, mode, certified, propagated.as_ref())?.answer {
                out.push((x.id.clone(), y.id.clone()));
            }
        }
    }
    Ok(out)
}
