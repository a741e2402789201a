//! Binary constraint structures: variables with finite domains and binary
//! outcome correspondences between them, path-consistency propagation and an
//! exact backtracking oracle.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{input, Result};
use crate::relation::Relation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub id: String,
    pub domain: Vec<String>,
}

impl Variable {
    pub fn new(id: impl Into<String>, domain: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Variable {
            id: id.into(),
            domain: domain.into_iter().map(Into::into).collect(),
        }
    }
}

/// `source ∼_relation target`: if `source` takes value `x`, `target` takes a
/// value in the image of `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correspondence {
    pub source: String,
    pub target: String,
    pub relation: Relation,
}

impl Correspondence {
    pub fn new(source: impl Into<String>, target: impl Into<String>, relation: Relation) -> Self {
        Correspondence {
            source: source.into(),
            target: target.into(),
            relation,
        }
    }
}

/// `x ↦ psi(phi(x))`.
pub fn compose(phi: &Correspondence, psi: &Correspondence) -> Result<Correspondence> {
    if phi.target != psi.source {
        return input(format!(
            "cannot compose {}→{} with {}→{}",
            phi.source, phi.target, psi.source, psi.target
        ));
    }
    if phi.relation.cols() != psi.relation.rows() {
        return input(format!("domain of {} has inconsistent sizes", phi.target));
    }
    Ok(Correspondence::new(
        phi.source.clone(),
        psi.target.clone(),
        phi.relation.then(&psi.relation),
    ))
}

pub fn intersect(phi: &Correspondence, xi: &Correspondence) -> Result<Correspondence> {
    if phi.source != xi.source || phi.target != xi.target {
        return input(format!(
            "cannot intersect {}→{} with {}→{}",
            phi.source, phi.target, xi.source, xi.target
        ));
    }
    if phi.relation.dims() != xi.relation.dims() {
        return input("intersected correspondences have different dimensions");
    }
    Ok(Correspondence::new(
        phi.source.clone(),
        phi.target.clone(),
        phi.relation.intersect(&xi.relation),
    ))
}

pub fn inverse(phi: &Correspondence) -> Correspondence {
    Correspondence::new(
        phi.target.clone(),
        phi.source.clone(),
        phi.relation.transpose(),
    )
}

/// One value index per variable, in variable order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub Vec<usize>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bcs {
    variables: Vec<Variable>,
    constraints: Vec<Correspondence>,
    index: HashMap<String, usize>,
}

impl Bcs {
    pub fn new(variables: Vec<Variable>, constraints: Vec<Correspondence>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, v) in variables.iter().enumerate() {
            if v.domain.is_empty() {
                return input(format!("variable {} has an empty domain", v.id));
            }
            let distinct: HashSet<&String> = v.domain.iter().collect();
            if distinct.len() != v.domain.len() {
                return input(format!("variable {} has duplicate domain values", v.id));
            }
            if index.insert(v.id.clone(), i).is_some() {
                return input(format!("duplicate variable id {}", v.id));
            }
        }
        let mut bcs = Bcs {
            variables,
            constraints: Vec::new(),
            index,
        };
        for c in constraints {
            bcs.add_constraint(c)?;
        }
        Ok(bcs)
    }

    pub fn add_constraint(&mut self, c: Correspondence) -> Result<()> {
        let s = self.require(&c.source)?;
        let t = self.require(&c.target)?;
        let want = (
            self.variables[s].domain.len(),
            self.variables[t].domain.len(),
        );
        if c.relation.dims() != want {
            return input(format!(
                "constraint {}→{} has dimensions {:?}, domains need {:?}",
                c.source,
                c.target,
                c.relation.dims(),
                want
            ));
        }
        self.constraints.push(c);
        Ok(())
    }

    pub fn with_constraint(&self, c: Correspondence) -> Result<Bcs> {
        let mut out = self.clone();
        out.add_constraint(c)?;
        Ok(out)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Correspondence] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn var_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        match self.var_index(id) {
            Some(i) => Ok(i),
            None => input(format!("unknown variable {id:?}")),
        }
    }

    pub fn domain(&self, var: usize) -> &[String] {
        &self.variables[var].domain
    }

    pub fn value_index(&self, var: usize, label: &str) -> Result<usize> {
        match self.variables[var].domain.iter().position(|d| d == label) {
            Some(v) => Ok(v),
            None => input(format!(
                "value {label:?} not in the domain of {}",
                self.variables[var].id
            )),
        }
    }

    pub fn full_oc(&self, x: &str, y: &str) -> Result<Correspondence> {
        let (i, j) = (self.require(x)?, self.require(y)?);
        Ok(Correspondence::new(
            x,
            y,
            Relation::full(self.domain(i).len(), self.domain(j).len()),
        ))
    }

    /// Builds a correspondence from value-label pairs.
    pub fn oc_from_labels<S: AsRef<str>>(
        &self,
        x: &str,
        y: &str,
        pairs: &[(S, S)],
    ) -> Result<Correspondence> {
        let (i, j) = (self.require(x)?, self.require(y)?);
        let mut rel = Relation::empty(self.domain(i).len(), self.domain(j).len());
        for (a, b) in pairs {
            rel.insert(
                self.value_index(i, a.as_ref())?,
                self.value_index(j, b.as_ref())?,
            );
        }
        Ok(Correspondence::new(x, y, rel))
    }

    /// Value labels of the pairs of a correspondence over this structure.
    pub fn oc_labels(&self, c: &Correspondence) -> Result<Vec<(String, String)>> {
        let (i, j) = (self.require(&c.source)?, self.require(&c.target)?);
        Ok(c.relation
            .pairs()
            .map(|(a, b)| (self.domain(i)[a].clone(), self.domain(j)[b].clone()))
            .collect())
    }

    pub fn assignment_labels(&self, a: &Assignment) -> Vec<(String, String)> {
        a.0.iter()
            .enumerate()
            .map(|(i, &v)| {
                (
                    self.variables[i].id.clone(),
                    self.variables[i].domain[v].clone(),
                )
            })
            .collect()
    }

    pub fn satisfies(&self, a: &Assignment) -> bool {
        a.0.len() == self.len()
            && a.0
                .iter()
                .enumerate()
                .all(|(i, &v)| v < self.domain(i).len())
            && self.constraints.iter().all(|c| {
                let (s, t) = (self.index[&c.source], self.index[&c.target]);
                c.relation.contains(a.0[s], a.0[t])
            })
    }

    /// One relation per ordered pair: identity on the diagonal, full
    /// elsewhere, intersected with every constraint and the inverse of every
    /// reverse-direction constraint.
    fn normalized(&self) -> Vec<Relation> {
        let n = self.len();
        let sizes: Vec<usize> = self.variables.iter().map(|v| v.domain.len()).collect();
        let mut psi: Vec<Relation> = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                if i == j {
                    Relation::identity(sizes[i])
                } else {
                    Relation::full(sizes[i], sizes[j])
                }
            })
            .collect();
        for c in &self.constraints {
            let (s, t) = (self.index[&c.source], self.index[&c.target]);
            psi[s * n + t].intersect_with(&c.relation);
            psi[t * n + s].intersect_with(&c.relation.transpose());
        }
        psi
    }
}

/// The path-consistency fixed point: `Ψ^{i,j}` for every ordered pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagatedBcs {
    ids: Vec<String>,
    psi: Vec<Relation>,
    unsat: bool,
}

impl PropagatedBcs {
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn psi(&self, i: usize, j: usize) -> &Relation {
        &self.psi[i * self.ids.len() + j]
    }

    pub fn psi_oc(&self, x: &str, y: &str) -> Result<Correspondence> {
        let i = self.position(x)?;
        let j = self.position(y)?;
        Ok(Correspondence::new(x, y, self.psi(i, j).clone()))
    }

    fn position(&self, id: &str) -> Result<usize> {
        match self.ids.iter().position(|v| v == id) {
            Some(i) => Ok(i),
            None => input(format!("unknown variable {id:?}")),
        }
    }

    /// True when some derived correspondence is everywhere empty.
    pub fn is_unsat(&self) -> bool {
        self.unsat
    }

    /// Values of variable `i` not excluded by propagation.
    pub fn possible_values(&self, i: usize) -> Vec<usize> {
        self.psi(i, i).pairs().map(|(a, _)| a).collect()
    }

    /// The ordered pairs `(i, j)` whose derived relation is strictly
    /// smaller than what `bcs` states directly.
    pub fn narrowed_pairs(&self, bcs: &Bcs) -> Vec<(usize, usize)> {
        let n = self.ids.len();
        let stated = bcs.normalized();
        (0..n * n)
            .filter(|&k| self.psi[k] != stated[k])
            .map(|k| (k / n, k % n))
            .collect()
    }

    /// Every derived correspondence as a constraint list (both directions, diagonal included).
    pub fn as_constraints(&self) -> Vec<Correspondence> {
        let n = self.ids.len();
        (0..n * n)
            .map(|k| {
                Correspondence::new(
                    self.ids[k / n].clone(),
                    self.ids[k % n].clone(),
                    self.psi[k].clone(),
                )
            })
            .collect()
    }

    fn finish(ids: Vec<String>, psi: Vec<Relation>) -> Self {
        let unsat = psi.iter().any(Relation::is_empty);
        PropagatedBcs { ids, psi, unsat }
    }
}

fn ids_of(bcs: &Bcs) -> Vec<String> {
    bcs.variables.iter().map(|v| v.id.clone()).collect()
}

/// `Ψ^{i,j} ∩= Ψ^{k,j} ∘ Ψ^{i,k}`, keeping `Ψ^{j,i}` the transpose. Returns
/// whether `Ψ^{i,j}` shrank.
fn revise(psi: &mut [Relation], n: usize, i: usize, j: usize, k: usize) -> bool {
    let via = psi[i * n + k].then(&psi[k * n + j]);
    let changed = psi[i * n + j].intersect_with(&via);
    if changed && i != j {
        psi[j * n + i] = psi[i * n + j].transpose();
    }
    changed
}

/// Worklist propagation: only triples that touch a changed pair are revisited.
pub fn path_consistency(bcs: &Bcs) -> PropagatedBcs {
    let n = bcs.len();
    let mut psi = bcs.normalized();
    let mut queued = vec![false; n * n];
    let mut work = VecDeque::new();
    for a in 0..n {
        for b in a..n {
            queued[a * n + b] = true;
            work.push_back((a, b));
        }
    }
    let push = |queued: &mut Vec<bool>, work: &mut VecDeque<(usize, usize)>, x: usize, y: usize| {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        if !queued[a * n + b] {
            queued[a * n + b] = true;
            work.push_back((a, b));
        }
    };
    while let Some((a, b)) = work.pop_front() {
        queued[a * n + b] = false;
        for j in 0..n {
            if revise(&mut psi, n, a, j, b) {
                push(&mut queued, &mut work, a, j);
            }
            if revise(&mut psi, n, b, j, a) {
                push(&mut queued, &mut work, b, j);
            }
        }
    }
    PropagatedBcs::finish(ids_of(bcs), psi)
}

/// Full sweeps over every triple until a sweep changes nothing. Returns the
/// fixed point and the number of sweeps performed, including the final one.
pub fn path_consistency_naive(bcs: &Bcs) -> (PropagatedBcs, usize) {
    let n = bcs.len();
    let mut psi = bcs.normalized();
    let mut passes = 0;
    loop {
        passes += 1;
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    changed |= revise(&mut psi, n, i, j, k);
                }
            }
        }
        if !changed {
            break;
        }
    }
    (PropagatedBcs::finish(ids_of(bcs), psi), passes)
}

/// Backtracking over variables in listed order, values in listed order, with
/// forward checking against every constraint. Returns at most `limit`
/// assignments in lexicographic order.
pub fn enumerate_satisfying(bcs: &Bcs, limit: Option<usize>) -> Vec<Assignment> {
    let mut out = Vec::new();
    search(bcs, limit, |a| out.push(a));
    out
}

pub fn count_satisfying(bcs: &Bcs) -> usize {
    let mut count = 0;
    search(bcs, None, |_| count += 1);
    count
}

pub fn is_satisfiable(bcs: &Bcs) -> bool {
    !enumerate_satisfying(bcs, Some(1)).is_empty()
}

fn search(bcs: &Bcs, limit: Option<usize>, mut emit: impl FnMut(Assignment)) {
    if limit == Some(0) {
        return;
    }
    let n = bcs.len();
    let mut live: Vec<Vec<bool>> = bcs
        .variables
        .iter()
        .map(|v| vec![true; v.domain.len()])
        .collect();
    // relations oriented from the earlier to the later variable
    let mut forward: Vec<Vec<(usize, Relation)>> = vec![Vec::new(); n];
    for c in &bcs.constraints {
        let (s, t) = (bcs.index[&c.source], bcs.index[&c.target]);
        if s == t {
            for (v, alive) in live[s].iter_mut().enumerate() {
                *alive &= c.relation.contains(v, v);
            }
        } else if s < t {
            forward[s].push((t, c.relation.clone()));
        } else {
            forward[t].push((s, c.relation.transpose()));
        }
    }
    let mut state = Search {
        forward,
        live,
        values: vec![0; n],
        found: 0,
        limit,
    };
    if state.live.iter().all(|d| d.iter().any(|&b| b)) {
        state.descend(0, &mut emit);
    }
}

struct Search {
    forward: Vec<Vec<(usize, Relation)>>,
    live: Vec<Vec<bool>>,
    values: Vec<usize>,
    found: usize,
    limit: Option<usize>,
}

impl Search {
    /// Returns false once the limit is reached.
    fn descend(&mut self, var: usize, emit: &mut impl FnMut(Assignment)) -> bool {
        if var == self.values.len() {
            emit(Assignment(self.values.clone()));
            self.found += 1;
            return self.limit.is_none_or(|l| self.found < l);
        }
        for v in 0..self.live[var].len() {
            if !self.live[var][v] {
                continue;
            }
            self.values[var] = v;
            let mut removed: Vec<(usize, usize)> = Vec::new();
            let mut wiped = false;
            for (t, rel) in &self.forward[var] {
                let dom = &mut self.live[*t];
                for (w, alive) in dom.iter_mut().enumerate() {
                    if *alive && !rel.contains(v, w) {
                        *alive = false;
                        removed.push((*t, w));
                    }
                }
                if !dom.iter().any(|&b| b) {
                    wiped = true;
                    break;
                }
            }
            let keep_going = wiped || self.descend(var + 1, emit);
            for (t, w) in removed {
                self.live[t][w] = true;
            }
            if !keep_going {
                return false;
            }
        }
        true
    }
}

/// Exact: every satisfying assignment satisfies `claim`.
pub fn implies(bcs: &Bcs, claim: &Correspondence) -> Result<bool> {
    Ok(counterexample(bcs, claim)?.is_none())
}

/// A satisfying assignment violating `claim`, if one exists.
pub fn counterexample(bcs: &Bcs, claim: &Correspondence) -> Result<Option<Assignment>> {
    let negated = Correspondence::new(
        claim.source.clone(),
        claim.target.clone(),
        claim.relation.complement(),
    );
    let extended = bcs.with_constraint(negated)?;
    Ok(enumerate_satisfying(&extended, Some(1)).into_iter().next())
}

/// `Ψ^{X,Y} ⊆ claim`.
pub fn derivable(propagated: &PropagatedBcs, claim: &Correspondence) -> Result<bool> {
    let derived = propagated.psi_oc(&claim.source, &claim.target)?;
    if derived.relation.dims() != claim.relation.dims() {
        return input("claim dimensions do not match the variable domains");
    }
    Ok(derived.relation.is_subset_of(&claim.relation))
}

/// `{(v_i, v_j) | v from some satisfying assignment}` for every ordered pair.
pub fn true_minimal_relations(bcs: &Bcs) -> Vec<Relation> {
    let n = bcs.len();
    let mut rel: Vec<Relation> = (0..n * n)
        .map(|k| Relation::empty(bcs.domain(k / n).len(), bcs.domain(k % n).len()))
        .collect();
    search(bcs, None, |a| {
        for i in 0..n {
            for j in 0..n {
                rel[i * n + j].insert(a.0[i], a.0[j]);
            }
        }
    });
    rel
}
