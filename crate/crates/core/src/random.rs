//! Seeded generators for random instances used by property tests, the
//! acceptance suite and the CLI's `gen random-csp`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bcs::{Bcs, Correspondence, Variable};
use crate::closedness::{join_closure, JoinFamily, JoinTable, VariableOrder};
use crate::relation::Relation;

#[derive(Clone, Debug)]
pub struct RandomBcsParams {
    /// Variables are drawn from `1..=max_vars`.
    pub max_vars: usize,
    /// Domain sizes are drawn from `1..=max_domain`.
    pub max_domain: usize,
    /// Probability that an unordered variable pair receives a constraint.
    pub constraint_prob: f64,
    /// Probability that a value pair belongs to a constraint.
    pub pair_prob: f64,
}

impl Default for RandomBcsParams {
    fn default() -> Self {
        RandomBcsParams {
            max_vars: 4,
            max_domain: 3,
            constraint_prob: 0.5,
            pair_prob: 0.6,
        }
    }
}

pub fn random_domains<R: Rng>(rng: &mut R, max_vars: usize, max_domain: usize) -> Vec<Variable> {
    let n = rng.gen_range(1..=max_vars);
    (0..n)
        .map(|i| {
            let m = rng.gen_range(1..=max_domain);
            Variable::new(format!("X{}", i + 1), (0..m).map(|v| format!("v{}", v + 1)))
        })
        .collect()
}

pub fn random_bcs<R: Rng>(rng: &mut R, p: &RandomBcsParams) -> Bcs {
    let vars = random_domains(rng, p.max_vars, p.max_domain);
    let constraints = random_constraints(rng, &vars, p.constraint_prob, |rng, rows, cols| {
        Relation::from_fn(rows, cols, |_, _| rng.gen_bool(p.pair_prob))
    });
    Bcs::new(vars, constraints).expect("generated structures are well formed")
}

/// Fixed-size variant: exactly `n` variables with `m` values each.
pub fn random_bcs_sized<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    constraint_prob: f64,
    pair_prob: f64,
) -> Bcs {
    let vars: Vec<Variable> = (0..n)
        .map(|i| Variable::new(format!("X{}", i + 1), (0..m).map(|v| format!("v{}", v + 1))))
        .collect();
    let constraints = random_constraints(rng, &vars, constraint_prob, |rng, rows, cols| {
        Relation::from_fn(rows, cols, |_, _| rng.gen_bool(pair_prob))
    });
    Bcs::new(vars, constraints).expect("generated structures are well formed")
}

pub(crate) fn random_constraints<R: Rng>(
    rng: &mut R,
    vars: &[Variable],
    constraint_prob: f64,
    mut relation: impl FnMut(&mut R, usize, usize) -> Relation,
) -> Vec<Correspondence> {
    let mut out = Vec::new();
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            if rng.gen_bool(constraint_prob) {
                let (a, b) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
                let rel = relation(rng, vars[a].domain.len(), vars[b].domain.len());
                out.push(Correspondence::new(
                    vars[a].id.clone(),
                    vars[b].id.clone(),
                    rel,
                ));
            }
        }
    }
    out
}

/// A uniformly random permutation of `0..m`.
pub fn random_permutation<R: Rng>(rng: &mut R, m: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..m).collect();
    p.shuffle(rng);
    p
}

/// Random join semilattice on at most `max_size` elements: a union-closed
/// family of subsets of a four-element ground set, joined by union.
pub fn random_semilattice<R: Rng>(rng: &mut R, max_size: usize) -> JoinTable {
    loop {
        let seeds = rng.gen_range(1..=max_size.max(1));
        let mut family: Vec<u8> = (0..seeds).map(|_| rng.gen_range(0..16u8)).collect();
        let mut i = 0;
        while i < family.len() {
            for j in 0..i {
                let u = family[i] | family[j];
                if !family.contains(&u) {
                    family.push(u);
                }
            }
            i += 1;
        }
        family.sort_unstable();
        family.dedup();
        if family.len() > max_size {
            continue;
        }
        family.shuffle(rng);
        let n = family.len();
        let table = (0..n * n)
            .map(|k| {
                let u = family[k / n] | family[k % n];
                family
                    .iter()
                    .position(|&s| s == u)
                    .expect("family is union closed")
            })
            .collect();
        return JoinTable::new(n, table).expect("union is a join operator");
    }
}

/// Random structure whose constraints are closed under the given per-variable
/// joins: sparse random pairs, then closed.
fn random_closed<R: Rng>(
    rng: &mut R,
    vars: Vec<Variable>,
    tables: &[JoinTable],
    constraint_prob: f64,
    seed_prob: f64,
) -> Bcs {
    let index: std::collections::HashMap<String, usize> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.id.clone(), i))
        .collect();
    let mut constraints = Vec::new();
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            if !rng.gen_bool(constraint_prob) {
                continue;
            }
            let (a, b) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
            let (ra, rb) = (vars[a].domain.len(), vars[b].domain.len());
            let seed = Relation::from_fn(ra, rb, |_, _| rng.gen_bool(seed_prob));
            let rel = join_closure(
                &seed,
                &tables[index[&vars[a].id]],
                &tables[index[&vars[b].id]],
            );
            constraints.push(Correspondence::new(
                vars[a].id.clone(),
                vars[b].id.clone(),
                rel,
            ));
        }
    }
    Bcs::new(vars, constraints).expect("generated structures are well formed")
}

/// Random max-closed structure together with its certifying orders.
pub fn random_max_closed<R: Rng>(
    rng: &mut R,
    max_vars: usize,
    max_domain: usize,
) -> (Bcs, VariableOrder) {
    let vars = random_domains(rng, max_vars, max_domain);
    let mut orders = VariableOrder::new();
    let mut tables = Vec::new();
    for v in &vars {
        let perm = random_permutation(rng, v.domain.len());
        tables.push(JoinTable::from_order(&perm));
        orders.insert(v.id.clone(), perm).expect("permutation");
    }
    let bcs = random_closed(rng, vars, &tables, 0.7, 0.3);
    (bcs, orders)
}

/// Random join-closed structure over random semilattices of at most
/// `max_size` elements, together with its join family.
pub fn random_join_closed<R: Rng>(
    rng: &mut R,
    max_vars: usize,
    max_size: usize,
) -> (Bcs, JoinFamily) {
    let n = rng.gen_range(1..=max_vars);
    let tables: Vec<JoinTable> = (0..n).map(|_| random_semilattice(rng, max_size)).collect();
    let vars: Vec<Variable> = tables
        .iter()
        .enumerate()
        .map(|(i, t)| {
            Variable::new(
                format!("X{}", i + 1),
                (0..t.size()).map(|v| format!("v{}", v + 1)),
            )
        })
        .collect();
    let mut family = JoinFamily::default();
    for (v, t) in vars.iter().zip(&tables) {
        family.tables.insert(v.id.clone(), t.clone());
    }
    let bcs = random_closed(rng, vars, &tables, 0.7, 0.25);
    (bcs, family)
}
