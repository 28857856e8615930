use std::collections::{BTreeMap, HashMap};

use crate::{Graph, NumericsError, Result, Tensor, VarId};

/// Named gradient map produced by a backward sweep.
pub type Gradients = BTreeMap<String, Tensor>;

#[derive(Debug, Clone)]
pub(crate) struct ParamEntry {
    pub name: String,
    pub value: Tensor,
    pub m: Tensor,
    pub v: Tensor,
}

/// Named parameter tensors with stable insertion order and per-parameter
/// Adam moments.
#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    entries: Vec<ParamEntry>,
    index: HashMap<String, usize>,
    step: u64,
}

impl ParamStore {
    pub fn new() -> Self {
        ParamStore::default()
    }

    pub fn insert(&mut self, name: &str, value: Tensor) -> Result<()> {
        if self.index.contains_key(name) {
            return Err(NumericsError::DuplicateParam(name.to_string()));
        }
        let (r, c) = value.shape();
        self.index.insert(name.to_string(), self.entries.len());
        self.entries.push(ParamEntry {
            name: name.to_string(),
            value,
            m: Tensor::zeros(r, c),
            v: Tensor::zeros(r, c),
        });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.index.get(name).map(|&i| &self.entries[i].value)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Optimizer steps taken so far.
    pub fn step(&self) -> u64 {
        self.step
    }

    /// Parameters in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor)> {
        self.entries.iter().map(|e| (e.name.as_str(), &e.value))
    }

    /// Total number of scalar parameters.
    pub fn num_values(&self) -> usize {
        self.entries.iter().map(|e| e.value.len()).sum()
    }

    /// Replace a parameter's value; the shape must match.
    pub fn set_value(&mut self, name: &str, value: Tensor) -> Result<()> {
        let idx = *self
            .index
            .get(name)
            .ok_or_else(|| NumericsError::UnknownParam(name.to_string()))?;
        if value.shape() != self.entries[idx].value.shape() {
            return Err(NumericsError::shape(
                "set_value",
                format!(
                    "{:?} into parameter {name:?} of shape {:?}",
                    value.shape(),
                    self.entries[idx].value.shape()
                ),
            ));
        }
        self.entries[idx].value = value;
        Ok(())
    }

    /// Shift one scalar entry of a parameter; used by finite differences.
    pub fn perturb(&mut self, name: &str, flat_index: usize, delta: f64) -> Result<()> {
        let idx = *self
            .index
            .get(name)
            .ok_or_else(|| NumericsError::UnknownParam(name.to_string()))?;
        let data = self.entries[idx].value.data_mut();
        data[flat_index] += delta;
        Ok(())
    }

    pub(crate) fn entries(&self) -> &[ParamEntry] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut Vec<ParamEntry> {
        &mut self.entries
    }

    pub(crate) fn restore(entries: Vec<ParamEntry>, step: u64) -> Result<Self> {
        let mut store = ParamStore::new();
        for e in entries {
            if store.index.insert(e.name.clone(), store.entries.len()).is_some() {
                return Err(NumericsError::DuplicateParam(e.name));
            }
            store.entries.push(e);
        }
        store.step = step;
        Ok(store)
    }

    pub(crate) fn advance_step(&mut self) -> u64 {
        self.step += 1;
        self.step
    }
}

/// Tape handles for every parameter of a store, in insertion order.
pub struct ParamBinding {
    vars: Vec<(String, VarId)>,
    index: HashMap<String, usize>,
}

impl ParamBinding {
    pub fn var(&self, name: &str) -> Result<VarId> {
        self.index
            .get(name)
            .map(|&i| self.vars[i].1)
            .ok_or_else(|| NumericsError::UnknownParam(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, VarId)> {
        self.vars.iter().map(|(n, v)| (n.as_str(), *v))
    }
}

/// Insert every parameter value into the tape as an input leaf.
pub fn bind_params(graph: &mut Graph, store: &ParamStore) -> Result<ParamBinding> {
    let mut vars = Vec::with_capacity(store.len());
    let mut index = HashMap::with_capacity(store.len());
    for (name, value) in store.iter() {
        let var = graph.input(value.clone())?;
        index.insert(name.to_string(), vars.len());
        vars.push((name.to_string(), var));
    }
    Ok(ParamBinding { vars, index })
}

/// Gradients of every bound parameter after a backward sweep; parameters
/// the loss does not touch get zeros.
pub fn collect_gradients(graph: &Graph, binding: &ParamBinding) -> Gradients {
    let mut out = Gradients::new();
    for (name, var) in binding.iter() {
        let grad = match graph.grad(var) {
            Some(g) => g.clone(),
            None => {
                let (r, c) = graph.value(var).shape();
                Tensor::zeros(r, c)
            }
        };
        out.insert(name.to_string(), grad);
    }
    out
}
