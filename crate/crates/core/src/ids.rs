//! Interning of opaque user/item/descriptor ids to dense `u32` indices.
//!
//! Every model artifact persists its `IdMap` so dense indices never leak
//! across artifacts built from different inputs; alignment between artifacts
//! is always done by name.

use std::collections::HashMap;
use std::sync::Arc;

/// Append-only bidirectional map between opaque string ids and dense indices.
#[derive(Debug, Default, Clone)]
pub struct IdMap {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl IdMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the dense index for `name`, interning it if new.
    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = u32::try_from(self.names.len()).expect("id space exhausted");
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn into_shared(self) -> Arc<IdMap> {
        Arc::new(self)
    }
}

/// True when two maps name the same universe: same names, same dense order.
pub fn same_universe(a: &Arc<IdMap>, b: &Arc<IdMap>) -> bool {
    Arc::ptr_eq(a, b) || a.names == b.names
}
