//! Dense tables over variable scopes and sum-product variable elimination.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{Network, VarId};

/// A table over `scope`, laid out in mixed radix with the first scope
/// variable most significant (the CPD row convention).
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    scope: Vec<VarId>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

fn strides(cards: &[usize]) -> Vec<usize> {
    let mut out = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * cards[i + 1];
    }
    out
}

/// Advance a mixed-radix counter; returns false after the last state.
fn advance(counter: &mut [usize], cards: &[usize]) -> bool {
    for i in (0..counter.len()).rev() {
        counter[i] += 1;
        if counter[i] < cards[i] {
            return true;
        }
        counter[i] = 0;
    }
    false
}

impl Factor {
    pub fn new(scope: Vec<VarId>, cards: Vec<usize>, values: Vec<f64>) -> Self {
        assert_eq!(scope.len(), cards.len());
        assert_eq!(values.len(), cards.iter().product::<usize>());
        Factor { scope, cards, values }
    }

    pub fn scalar(value: f64) -> Self {
        Factor::new(Vec::new(), Vec::new(), vec![value])
    }

    pub fn constant(scope: Vec<VarId>, cards: Vec<usize>, value: f64) -> Self {
        let len = cards.iter().product();
        Factor::new(scope, cards, vec![value; len])
    }

    /// The CPD of `var` as a factor over `parents ++ [var]`.
    pub fn from_cpd(network: &Network, var: VarId) -> Self {
        let cpd = network.cpd(var).expect("validated network");
        let mut scope = cpd.parents.clone();
        scope.push(var);
        let cards = scope.iter().map(|&v| network.cardinality(v)).collect();
        let values = cpd.rows.iter().flatten().copied().collect();
        Factor::new(scope, cards, values)
    }

    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, assignment: &[usize]) -> f64 {
        let idx = assignment
            .iter()
            .zip(strides(&self.cards))
            .map(|(a, s)| a * s)
            .sum::<usize>();
        self.values[idx]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    fn position(&self, var: VarId) -> Option<usize> {
        self.scope.iter().position(|&v| v == var)
    }

    pub fn product(&self, other: &Factor) -> Factor {
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        for (i, &v) in other.scope.iter().enumerate() {
            if !scope.contains(&v) {
                scope.push(v);
                cards.push(other.cards[i]);
            }
        }
        let sa = strides(&self.cards);
        let sb = strides(&other.cards);
        let a_stride: Vec<usize> = scope
            .iter()
            .map(|&v| self.position(v).map_or(0, |p| sa[p]))
            .collect();
        let b_stride: Vec<usize> = scope
            .iter()
            .map(|&v| other.position(v).map_or(0, |p| sb[p]))
            .collect();
        let len: usize = cards.iter().product();
        let mut values = Vec::with_capacity(len);
        let mut counter = vec![0; scope.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        loop {
            values.push(self.values[ia] * other.values[ib]);
            // incremental index update mirrors `advance`
            let mut i = scope.len();
            loop {
                if i == 0 {
                    return Factor { scope, cards, values };
                }
                i -= 1;
                counter[i] += 1;
                ia += a_stride[i];
                ib += b_stride[i];
                if counter[i] < cards[i] {
                    break;
                }
                ia -= a_stride[i] * cards[i];
                ib -= b_stride[i] * cards[i];
                counter[i] = 0;
            }
        }
    }

    pub fn sum_out(&self, var: VarId) -> Factor {
        let Some(pos) = self.position(var) else {
            return self.clone();
        };
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        cards.remove(pos);
        let out_strides = strides(&cards);
        let mut values = vec![0.0; cards.iter().product()];
        let mut counter = vec![0; self.scope.len()];
        for &v in &self.values {
            let idx: usize = counter
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != pos)
                .zip(&out_strides)
                .map(|((_, c), s)| c * s)
                .sum();
            values[idx] += v;
            advance(&mut counter, &self.cards);
        }
        Factor { scope, cards, values }
    }

    /// Condition on `var = value`, dropping `var` from the scope.
    pub fn reduce(&self, var: VarId, value: usize) -> Factor {
        let Some(pos) = self.position(var) else {
            return self.clone();
        };
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        cards.remove(pos);
        let mut values = Vec::with_capacity(cards.iter().product());
        let mut counter = vec![0; self.scope.len()];
        for &v in &self.values {
            if counter[pos] == value {
                values.push(v);
            }
            advance(&mut counter, &self.cards);
        }
        Factor { scope, cards, values }
    }

    /// Same table with the scope permuted to `order` (a permutation of the
    /// current scope).
    pub fn reorder(&self, order: &[VarId]) -> Factor {
        assert_eq!(order.len(), self.scope.len());
        let src = strides(&self.cards);
        let stride: Vec<usize> = order
            .iter()
            .map(|&v| src[self.position(v).expect("reorder is a permutation")])
            .collect();
        let cards: Vec<usize> = order
            .iter()
            .map(|&v| self.cards[self.position(v).unwrap()])
            .collect();
        let mut values = Vec::with_capacity(self.values.len());
        let mut counter = vec![0; order.len()];
        loop {
            let idx: usize = counter.iter().zip(&stride).map(|(c, s)| c * s).sum();
            values.push(self.values[idx]);
            if !advance(&mut counter, &cards) {
                break;
            }
        }
        Factor { scope: order.to_vec(), cards, values }
    }

    pub fn add(&self, other: &Factor) -> Factor {
        let other = other.reorder(&self.scope);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Factor { scope: self.scope.clone(), cards: self.cards.clone(), values }
    }

    pub fn normalized(&self) -> Option<Factor> {
        let total = self.total();
        if total == 0.0 {
            return None;
        }
        let values = self.values.iter().map(|v| v / total).collect();
        Some(Factor { scope: self.scope.clone(), cards: self.cards.clone(), values })
    }
}

/// Sum out every variable not in `keep` from the product of `factors`.
///
/// Elimination order is greedy min-fill over the factor interaction graph,
/// ties going to the smallest variable id. The result has scope `keep` in
/// the given order; every kept variable must occur in some factor.
pub fn eliminate(mut factors: Vec<Factor>, keep: &[VarId]) -> Factor {
    let keep_set: BTreeSet<VarId> = keep.iter().copied().collect();
    loop {
        let candidates: BTreeSet<VarId> = factors
            .iter()
            .flat_map(|f| f.scope.iter().copied())
            .filter(|v| !keep_set.contains(v))
            .collect();
        let Some(var) = min_fill(&factors, &candidates) else {
            break;
        };
        let (touching, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.scope.contains(&var));
        factors = rest;
        let merged = touching
            .iter()
            .skip(1)
            .fold(touching[0].clone(), |acc, f| acc.product(f));
        factors.push(merged.sum_out(var));
    }
    let joint = factors
        .iter()
        .fold(Factor::scalar(1.0), |acc, f| acc.product(f));
    joint.reorder(keep)
}

fn min_fill(factors: &[Factor], candidates: &BTreeSet<VarId>) -> Option<VarId> {
    let mut best: Option<(usize, VarId)> = None;
    for &var in candidates {
        let neighbours: BTreeSet<VarId> = factors
            .iter()
            .filter(|f| f.scope.contains(&var))
            .flat_map(|f| f.scope.iter().copied())
            .filter(|&v| v != var)
            .collect();
        let nb: Vec<VarId> = neighbours.into_iter().collect();
        let mut fill = 0;
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                let adjacent = factors
                    .iter()
                    .any(|f| f.scope.contains(&nb[i]) && f.scope.contains(&nb[j]));
                if !adjacent {
                    fill += 1;
                }
            }
        }
        if best.is_none_or(|(b, _)| fill < b) {
            best = Some((fill, var));
        }
    }
    best.map(|(_, v)| v)
}
