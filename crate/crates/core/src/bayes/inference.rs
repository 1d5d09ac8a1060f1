//! Exact inference by variable elimination.

use std::collections::BTreeMap;

use super::{Cpt, DiscreteDistribution, NetworkSpec};
use crate::error::InputError;
use crate::model::Level5;

/// Table over a set of five-state variables. `vars` is sorted ascending and
/// the table is laid out with the first variable most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    vars: Vec<usize>,
    table: Vec<f64>,
}

impl Factor {
    pub fn scalar(value: f64) -> Self {
        Self {
            vars: Vec::new(),
            table: vec![value],
        }
    }

    /// The table of `node` as a factor over the node and its parents.
    pub fn from_cpt(node: usize, parents: &[usize], cpt: &Cpt) -> Self {
        let mut vars: Vec<usize> = parents.to_vec();
        vars.push(node);
        vars.sort_unstable();
        let n = vars.len();
        let pos_of = |v: usize| vars.iter().position(|&x| x == v).unwrap();
        let node_pos = pos_of(node);
        let parent_pos: Vec<usize> = parents.iter().map(|&p| pos_of(p)).collect();

        let mut table = vec![0.0; 5usize.pow(n as u32)];
        let mut states = vec![0usize; n];
        for (idx, slot) in table.iter_mut().enumerate() {
            decode(idx, &mut states);
            let row = parent_pos.iter().fold(0usize, |acc, &p| acc * 5 + states[p]);
            *slot = cpt.row_by_index(row).probabilities()[states[node_pos]];
        }
        Self { vars, table }
    }

    /// Like [`Factor::from_cpt`] followed by [`Factor::reduce`] on every
    /// observed variable, without materializing the full table.
    /// `observed[v]` holds the state index of observed variables.
    pub fn from_cpt_given(node: usize, parents: &[usize], cpt: &Cpt, observed: &[Option<usize>]) -> Self {
        let mut vars: Vec<usize> = parents
            .iter()
            .copied()
            .chain(std::iter::once(node))
            .filter(|&v| observed[v].is_none())
            .collect();
        vars.sort_unstable();
        let n = vars.len();
        let mut table = vec![0.0; 5usize.pow(n as u32)];
        let mut states = vec![0usize; n];
        let state_of = |v: usize, states: &[usize]| match observed[v] {
            Some(s) => s,
            None => states[vars.iter().position(|&x| x == v).unwrap()],
        };
        for (idx, slot) in table.iter_mut().enumerate() {
            decode(idx, &mut states);
            let row = parents.iter().fold(0usize, |acc, &p| acc * 5 + state_of(p, &states));
            *slot = cpt.row_by_index(row).probabilities()[state_of(node, &states)];
        }
        Self { vars, table }
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    fn strides(&self) -> Vec<usize> {
        let n = self.vars.len();
        (0..n).map(|i| 5usize.pow((n - 1 - i) as u32)).collect()
    }

    /// Fixes `var` to `state` and drops it from the scope.
    pub fn reduce(&self, var: usize, state: usize) -> Self {
        let Some(pos) = self.vars.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let strides = self.strides();
        let vars: Vec<usize> = self.vars.iter().copied().filter(|&v| v != var).collect();
        let mut out = vec![0.0; 5usize.pow(vars.len() as u32)];
        let mut states = vec![0usize; vars.len()];
        for (idx, slot) in out.iter_mut().enumerate() {
            decode(idx, &mut states);
            let mut src = state * strides[pos];
            let mut k = 0;
            for (i, s) in strides.iter().enumerate() {
                if i == pos {
                    continue;
                }
                src += states[k] * s;
                k += 1;
            }
            *slot = self.table[src];
        }
        Self { vars, table: out }
    }

    pub fn product(&self, other: &Factor) -> Self {
        let mut vars: Vec<usize> = self.vars.iter().chain(&other.vars).copied().collect();
        vars.sort_unstable();
        vars.dedup();
        let project = |f: &Factor| -> Vec<usize> {
            let strides = f.strides();
            vars.iter()
                .map(|v| match f.vars.iter().position(|x| x == v) {
                    Some(p) => strides[p],
                    None => 0,
                })
                .collect()
        };
        let sa = project(self);
        let sb = project(other);
        let n = vars.len();
        let size = 5usize.pow(n as u32);
        let mut table = Vec::with_capacity(size);
        let mut states = vec![0usize; n];
        let (mut ia, mut ib) = (0usize, 0usize);
        for _ in 0..size {
            table.push(self.table[ia] * other.table[ib]);
            // odometer increment, last variable fastest
            for d in (0..n).rev() {
                states[d] += 1;
                ia += sa[d];
                ib += sb[d];
                if states[d] < 5 {
                    break;
                }
                states[d] = 0;
                ia -= 5 * sa[d];
                ib -= 5 * sb[d];
            }
        }
        Self { vars, table }
    }

    pub fn sum_out(&self, var: usize) -> Self {
        let Some(pos) = self.vars.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let strides = self.strides();
        let stride = strides[pos];
        let vars: Vec<usize> = self.vars.iter().copied().filter(|&v| v != var).collect();
        let outer = 5usize.pow(pos as u32);
        let mut table = Vec::with_capacity(self.table.len() / 5);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * stride * 5 + inner;
                table.push((0..5).map(|k| self.table[base + k * stride]).sum());
            }
        }
        Self { vars, table }
    }
}

fn decode(mut idx: usize, states: &mut [usize]) {
    for s in states.iter_mut().rev() {
        *s = idx % 5;
        idx /= 5;
    }
}

/// Exact posterior marginals of every node given (possibly partial)
/// evidence. Evidence nodes come back as point masses.
pub fn infer_marginals(
    net: &NetworkSpec,
    cpts: &[Cpt],
    evidence: &BTreeMap<String, Level5>,
) -> Result<BTreeMap<String, DiscreteDistribution>, InputError> {
    let mut by_id = Vec::with_capacity(evidence.len());
    for (name, state) in evidence {
        let id = net
            .id(name)
            .ok_or_else(|| InputError::UnknownEvidenceNode(name.clone()))?;
        by_id.push((id, *state));
    }
    let mut out = BTreeMap::new();
    for id in 0..net.len() {
        out.insert(net.node(id).name.clone(), marginal(net, cpts, id, &by_id)?);
    }
    Ok(out)
}

/// Posterior marginal of `query` given evidence by node id.
pub(crate) fn marginal(
    net: &NetworkSpec,
    cpts: &[Cpt],
    query: usize,
    evidence: &[(usize, Level5)],
) -> Result<DiscreteDistribution, InputError> {
    if let Some((_, s)) = evidence.iter().find(|(id, _)| *id == query) {
        return Ok(DiscreteDistribution::point(*s));
    }

    // Nodes that are not ancestors of the query or of an observed node sum
    // out to one and can be dropped.
    let mut relevant = vec![false; net.len()];
    let mut stack: Vec<usize> = std::iter::once(query)
        .chain(evidence.iter().map(|(id, _)| *id))
        .collect();
    while let Some(n) = stack.pop() {
        if !relevant[n] {
            relevant[n] = true;
            stack.extend_from_slice(net.parents(n));
        }
    }

    let mut observed = vec![None; net.len()];
    for (id, s) in evidence {
        observed[*id] = Some(s.index());
    }
    let mut factors: Vec<Factor> = (0..net.len())
        .filter(|&n| relevant[n])
        .map(|n| Factor::from_cpt_given(n, net.parents(n), &cpts[n], &observed))
        .collect();

    let mut pending: Vec<usize> = (0..net.len())
        .filter(|&n| relevant[n] && n != query && observed[n].is_none())
        .collect();

    while !pending.is_empty() {
        // Greedy order: eliminate the variable whose combined factor is smallest.
        let (slot, var) = pending
            .iter()
            .enumerate()
            .map(|(slot, &v)| {
                let mut scope: Vec<usize> = factors
                    .iter()
                    .filter(|f| f.vars.contains(&v))
                    .flat_map(|f| f.vars.iter().copied())
                    .collect();
                scope.sort_unstable();
                scope.dedup();
                (scope.len(), slot, v)
            })
            .min()
            .map(|(_, slot, v)| (slot, v))
            .unwrap();
        pending.swap_remove(slot);

        let (touching, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.vars.contains(&var));
        factors = rest;
        let combined = touching
            .iter()
            .fold(Factor::scalar(1.0), |acc, f| acc.product(f));
        factors.push(combined.sum_out(var));
    }

    let joint = factors
        .iter()
        .fold(Factor::scalar(1.0), |acc, f| acc.product(f));
    debug_assert_eq!(joint.vars, vec![query]);
    let weights: [f64; 5] = joint.table.try_into().expect("factor over the query only");
    DiscreteDistribution::normalize(weights).ok_or(InputError::ImpossibleEvidence)
}
