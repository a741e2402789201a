//! JSON file formats for games, constraint structures, orders,
//! semilattices and preferences.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::assumptions::game_variable;
use crate::bcs::{Bcs, Correspondence, Variable};
use crate::closedness::{JoinFamily, JoinTable, VariableOrder};
use crate::error::{input, Error, Result};
use crate::games::{NormalFormGame, Payoff};
use crate::si::Preference;

/// A payoff as written in files: an integer or a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PayoffJson {
    Int(i64),
    Text(String),
}

impl PayoffJson {
    pub fn from_payoff(p: &Payoff) -> Self {
        if *p.denom() == 1 {
            PayoffJson::Int(*p.numer())
        } else {
            PayoffJson::Text(format!("{}/{}", p.numer(), p.denom()))
        }
    }

    pub fn to_payoff(&self) -> Result<Payoff> {
        match self {
            PayoffJson::Int(v) => Ok(Payoff::from_integer(*v)),
            PayoffJson::Text(s) => {
                let parsed = match s.split_once('/') {
                    Some((n, d)) => n
                        .trim()
                        .parse::<i64>()
                        .ok()
                        .zip(d.trim().parse::<i64>().ok()),
                    None => s.trim().parse::<i64>().ok().map(|n| (n, 1)),
                };
                match parsed {
                    Some((_, 0)) | None => {
                        input(format!("payoff {s:?} is not an integer or p/q rational"))
                    }
                    Some((n, d)) => Ok(Payoff::new(n, d)),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub players: usize,
    pub actions: Vec<Vec<String>>,
    pub utilities: BTreeMap<String, Vec<PayoffJson>>,
}

impl GameJson {
    pub fn from_game(game: &NormalFormGame) -> Self {
        let utilities = (0..game.num_outcomes())
            .map(|i| {
                (
                    game.outcome_label(i),
                    game.payoffs(i)
                        .iter()
                        .map(PayoffJson::from_payoff)
                        .collect(),
                )
            })
            .collect();
        GameJson {
            name: Some(game.name().to_string()),
            players: game.players(),
            actions: game.action_lists().to_vec(),
            utilities,
        }
    }

    /// `fallback` names the game when the file does not.
    pub fn to_game(&self, fallback: &str) -> Result<NormalFormGame> {
        let name = self.name.clone().unwrap_or_else(|| fallback.to_string());
        if self.players != self.actions.len() {
            return input(format!(
                "game {name}: players = {} but {} action lists given",
                self.players,
                self.actions.len()
            ));
        }
        let skeleton = NormalFormGame::from_fn(name.clone(), self.actions.clone(), |_| {
            vec![Payoff::from_integer(0); self.players]
        })?;
        let mut utilities = vec![None; skeleton.num_outcomes()];
        for (label, payoffs) in &self.utilities {
            let Some(idx) = skeleton.outcome_by_label(label) else {
                return input(format!("game {name}: unknown outcome {label:?}"));
            };
            let values = payoffs
                .iter()
                .map(PayoffJson::to_payoff)
                .collect::<Result<Vec<_>>>()?;
            utilities[idx] = Some(values);
        }
        let utilities = utilities
            .into_iter()
            .enumerate()
            .map(|(i, u)| match u {
                Some(u) => Ok(u),
                None => input(format!(
                    "game {name}: missing utilities for {:?}",
                    skeleton.outcome_label(i)
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        NormalFormGame::new(name, self.actions.clone(), utilities)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableJson {
    pub id: String,
    pub domain: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintJson {
    pub x: String,
    pub y: String,
    pub pairs: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignatedJson {
    pub base: String,
    pub candidate: String,
}

/// A constraint structure file, optionally backed by games. Each game
/// contributes a variable named by its entry id whose domain is its
/// outcome labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceJson {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub games: Vec<GameEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variables: Vec<VariableJson>,
    #[serde(default)]
    pub constraints: Vec<ConstraintJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designated: Option<DesignatedJson>,
}

/// A loaded instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub games: Vec<NormalFormGame>,
    pub bcs: Bcs,
    /// `(base, candidate)`: the pair a safe-improvement question is about.
    pub designated: Option<(String, String)>,
}

impl Instance {
    pub fn plain(bcs: Bcs) -> Self {
        Instance {
            games: vec![],
            bcs,
            designated: None,
        }
    }
}

pub fn constraint_to_json(bcs: &Bcs, c: &Correspondence) -> Result<ConstraintJson> {
    Ok(ConstraintJson {
        x: c.source.clone(),
        y: c.target.clone(),
        pairs: bcs.oc_labels(c)?,
    })
}

/// Serializes an instance with games inlined. Variables that stem from a
/// game are not repeated.
pub fn instance_to_json(inst: &Instance) -> Result<InstanceJson> {
    let games: Vec<GameEntry> = inst
        .games
        .iter()
        .map(|g| GameEntry {
            id: g.name().to_string(),
            file: None,
            game: Some(GameJson::from_game(g)),
        })
        .collect();
    let variables = inst
        .bcs
        .variables()
        .iter()
        .filter(|v| !inst.games.iter().any(|g| g.name() == v.id))
        .map(|v| VariableJson {
            id: v.id.clone(),
            domain: v.domain.clone(),
        })
        .collect();
    let constraints = inst
        .bcs
        .constraints()
        .iter()
        .map(|c| constraint_to_json(&inst.bcs, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(InstanceJson {
        games,
        variables,
        constraints,
        designated: inst
            .designated
            .clone()
            .map(|(base, candidate)| DesignatedJson { base, candidate }),
    })
}

/// Builds an instance; relative game file paths resolve against `base_dir`.
pub fn instance_from_json(json: &InstanceJson, base_dir: &Path) -> Result<Instance> {
    let mut games = Vec::new();
    for entry in &json.games {
        let game = match (&entry.file, &entry.game) {
            (Some(file), None) => load_game(&base_dir.join(file))?,
            (None, Some(g)) => g.to_game(&entry.id)?,
            _ => {
                return input(format!(
                    "game entry {:?} needs exactly one of \"file\" and \"game\"",
                    entry.id
                ))
            }
        };
        games.push(game.with_name(entry.id.clone()));
    }
    let mut vars: Vec<Variable> = games.iter().map(game_variable).collect();
    vars.extend(
        json.variables
            .iter()
            .map(|v| Variable::new(v.id.clone(), v.domain.clone())),
    );
    let mut bcs = Bcs::new(vars, vec![])?;
    for c in &json.constraints {
        let oc = bcs.oc_from_labels(&c.x, &c.y, &c.pairs)?;
        bcs.add_constraint(oc)?;
    }
    let designated = match &json.designated {
        None => None,
        Some(d) => {
            bcs.require(&d.base)?;
            bcs.require(&d.candidate)?;
            Some((d.base.clone(), d.candidate.clone()))
        }
    };
    Ok(Instance {
        games,
        bcs,
        designated,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Pretty JSON with a trailing newline; deterministic for a given value.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("file formats serialize infallibly");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_game(path: &Path) -> Result<NormalFormGame> {
    let json: GameJson = read_json(path)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("game");
    json.to_game(stem)
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    let json: InstanceJson = read_json(path)?;
    instance_from_json(&json, path.parent().unwrap_or(Path::new(".")))
}

pub fn save_instance(path: &Path, inst: &Instance) -> Result<()> {
    write_json(path, &instance_to_json(inst)?)
}

/// `{"orders": {"X": ["x2", "x1"]}}`, ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrdersJson {
    pub orders: BTreeMap<String, Vec<String>>,
}

impl OrdersJson {
    pub fn from_orders(bcs: &Bcs, orders: &VariableOrder) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (var, asc) in orders.iter() {
            let i = bcs.require(var)?;
            out.insert(
                var.clone(),
                asc.iter().map(|&a| bcs.domain(i)[a].clone()).collect(),
            );
        }
        Ok(OrdersJson { orders: out })
    }

    pub fn to_orders(&self, bcs: &Bcs) -> Result<VariableOrder> {
        let mut orders = VariableOrder::new();
        for (var, labels) in &self.orders {
            let i = bcs.require(var)?;
            let asc = labels
                .iter()
                .map(|l| bcs.value_index(i, l))
                .collect::<Result<Vec<_>>>()?;
            orders.insert(var.clone(), asc)?;
        }
        Ok(orders)
    }
}

/// A semilattice given by Hasse cover edges `[lower, upper]` or by a full
/// join table (rows and columns in domain order).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemilatticeJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemilatticesJson {
    pub semilattices: BTreeMap<String, SemilatticeJson>,
}

impl SemilatticesJson {
    /// Writes every table in full.
    pub fn from_joins(bcs: &Bcs, joins: &JoinFamily) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (var, t) in &joins.tables {
            let i = bcs.require(var)?;
            let d = bcs.domain(i);
            let table = (0..t.size())
                .map(|a| (0..t.size()).map(|b| d[t.join(a, b)].clone()).collect())
                .collect();
            out.insert(
                var.clone(),
                SemilatticeJson {
                    edges: None,
                    table: Some(table),
                },
            );
        }
        Ok(SemilatticesJson { semilattices: out })
    }

    pub fn to_joins(&self, bcs: &Bcs) -> Result<JoinFamily> {
        let mut joins = JoinFamily::default();
        for (var, lattice) in &self.semilattices {
            let i = bcs.require(var)?;
            let size = bcs.domain(i).len();
            let label = |l: &String| bcs.value_index(i, l);
            let table = match (&lattice.edges, &lattice.table) {
                (Some(edges), None) => {
                    let idx = edges
                        .iter()
                        .map(|(lo, hi)| Ok((label(lo)?, label(hi)?)))
                        .collect::<Result<Vec<_>>>()?;
                    JoinTable::from_hasse(size, &idx)
                }
                (None, Some(rows)) => {
                    if rows.len() != size || rows.iter().any(|r| r.len() != size) {
                        return input(format!("semilattice {var}: table must be {size} x {size}"));
                    }
                    let flat = rows
                        .iter()
                        .flatten()
                        .map(label)
                        .collect::<Result<Vec<_>>>()?;
                    JoinTable::new(size, flat)
                }
                _ => {
                    return input(format!(
                        "semilattice {var}: give exactly one of \"edges\" and \"table\""
                    ))
                }
            }
            .map_err(|e| Error::Input(format!("semilattice {var}: {e}")))?;
            joins.tables.insert(var.clone(), table);
        }
        Ok(joins)
    }
}

/// Preference file: Pareto over all players, one player's utility (numbered
/// from 1), or explicit weak-preference facts between outcomes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PreferenceJson {
    Pareto,
    Player {
        player: usize,
    },
    Explicit {
        geq: Vec<((String, String), (String, String))>,
    },
}

impl PreferenceJson {
    pub fn build(&self, inst: &Instance) -> Result<Preference> {
        match self {
            PreferenceJson::Pareto => Preference::pareto(&inst.games),
            PreferenceJson::Player { player } => {
                if *player == 0 {
                    return input("players are numbered from 1");
                }
                Preference::player(&inst.games, player - 1)
            }
            PreferenceJson::Explicit { geq } => Preference::explicit(&inst.bcs, geq),
        }
    }
}
