//! Item descriptor catalogs for thematic (content-based) filtering.
//!
//! A descriptor is a Boolean (attribute, value) feature of an item — e.g.
//! `(genre, sci-fi)` — optionally carrying a confidence weight in `[0, 1]`.
//! Catalogs convert into a [`RatingsMatrix`] whose "users" are descriptors
//! and whose ratings are the weights, so the similarity machinery applies
//! unchanged; Jaccard is the sensible default there (with all-1 weights the
//! value-sensitive measures degenerate).

use std::collections::HashMap;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ids::IdMap;
use crate::ratings::{RatingScale, RatingsMatrix};

/// One (attribute, value) descriptor with its per-item weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptorRef {
    pub descriptor: u32,
    pub weight: f64,
}

/// Item → descriptor triples plus the descriptor/attribute dictionaries.
#[derive(Debug, Clone)]
pub struct DescriptorCatalog {
    items: Arc<IdMap>,
    /// Descriptor names are `attribute=value`; ids are stable per catalog.
    descriptors: Arc<IdMap>,
    /// Attribute of each descriptor, indexed by descriptor id.
    attribute_of: Vec<u32>,
    attributes: Arc<IdMap>,
    by_item: Vec<Vec<DescriptorRef>>,
    len: usize,
}

impl DescriptorCatalog {
    pub fn from_triples<I>(triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String, String, f64)>,
    {
        let mut items = IdMap::new();
        let mut descriptors = IdMap::new();
        let mut attributes = IdMap::new();
        let mut attribute_of: Vec<u32> = Vec::new();
        let mut weights: HashMap<(u32, u32), f64> = HashMap::new();
        let mut duplicates = 0usize;
        for (item, attribute, value, weight) in triples {
            if !(0.0..=1.0).contains(&weight) {
                return Err(Error::InvalidParam(format!(
                    "descriptor weight {weight} outside [0, 1] for ({item}, {attribute}, {value})"
                )));
            }
            let i = items.intern(&item);
            let a = attributes.intern(&attribute);
            let d = descriptors.intern(&format!("{attribute}={value}"));
            if d as usize == attribute_of.len() {
                attribute_of.push(a);
            }
            match weights.entry((i, d)) {
                std::collections::hash_map::Entry::Occupied(mut slot) => {
                    duplicates += 1;
                    // Duplicate (item, descriptor): keep the max weight.
                    if weight > *slot.get() {
                        slot.insert(weight);
                    }
                }
                std::collections::hash_map::Entry::Vacant(slot) => {
                    slot.insert(weight);
                }
            }
        }
        if duplicates > 0 {
            log::warn!("catalog: {duplicates} duplicate (item, descriptor) pairs, kept max weight");
        }
        let mut by_item: Vec<Vec<DescriptorRef>> = vec![Vec::new(); items.len()];
        for ((i, d), w) in weights {
            by_item[i as usize].push(DescriptorRef { descriptor: d, weight: w });
        }
        for row in &mut by_item {
            row.sort_unstable_by_key(|r| r.descriptor);
        }
        let len = by_item.iter().map(Vec::len).sum();
        Ok(DescriptorCatalog {
            items: items.into_shared(),
            descriptors: descriptors.into_shared(),
            attribute_of,
            attributes: attributes.into_shared(),
            by_item,
            len,
        })
    }

    pub fn items(&self) -> &Arc<IdMap> {
        &self.items
    }

    pub fn descriptors(&self) -> &Arc<IdMap> {
        &self.descriptors
    }

    pub fn attributes(&self) -> &Arc<IdMap> {
        &self.attributes
    }

    /// Attribute id of a descriptor (the `A(d)` function).
    pub fn attribute_of(&self, descriptor: u32) -> u32 {
        self.attribute_of[descriptor as usize]
    }

    /// Descriptors of one item, `D(i)`.
    pub fn item_descriptors(&self, item: u32) -> &[DescriptorRef] {
        &self.by_item[item as usize]
    }

    pub fn item_descriptors_by_name(&self, item: &str) -> &[DescriptorRef] {
        match self.items.get(item) {
            Some(i) => self.item_descriptors(i),
            None => &[],
        }
    }

    /// Number of (item, descriptor) pairs.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Recasts the catalog as an item×descriptor matrix over the catalog's
    /// own item universe (weights as ratings on a [0, 1] scale).
    pub fn to_matrix(&self) -> RatingsMatrix {
        self.to_matrix_impl(Arc::clone(&self.items), None)
    }

    /// Same, but over a caller-supplied item universe so the resulting
    /// similarity matrix aligns with a log matrix. Catalog entries for items
    /// absent from that universe are dropped (with a warning).
    pub fn to_matrix_with_items(&self, items: &Arc<IdMap>) -> RatingsMatrix {
        let map: Vec<Option<u32>> = (0..self.items.len() as u32)
            .map(|i| items.get(self.items.name(i)))
            .collect();
        self.to_matrix_impl(Arc::clone(items), Some(&map))
    }

    fn to_matrix_impl(&self, items: Arc<IdMap>, remap: Option<&[Option<u32>]>) -> RatingsMatrix {
        let mut triples = Vec::with_capacity(self.len);
        let mut dropped = 0usize;
        for (i, row) in self.by_item.iter().enumerate() {
            let target = match remap {
                None => Some(i as u32),
                Some(map) => map[i],
            };
            match target {
                Some(t) => {
                    for r in row {
                        // Matrix "users" are descriptors, "items" are items.
                        triples.push((r.descriptor, t, r.weight, None));
                    }
                }
                None => dropped += row.len(),
            }
        }
        if dropped > 0 {
            log::warn!("catalog: dropped {dropped} descriptor entries for items outside the target universe");
        }
        RatingsMatrix::from_parts(
            Arc::clone(&self.descriptors),
            items,
            triples,
            RatingScale::new(0.0, 1.0).expect("constant valid scale"),
        )
    }
}

/// Expert-supplied attribute weights `W(A)`; unlisted attributes weigh 1.
#[derive(Debug, Clone, Default)]
pub struct AttributeDictionary {
    weights: HashMap<String, f64>,
}

impl AttributeDictionary {
    pub fn uniform() -> Self {
        Self::default()
    }

    pub fn set(&mut self, attribute: impl Into<String>, weight: f64) -> Result<()> {
        if !(weight >= 0.0) {
            return Err(Error::InvalidParam(format!(
                "attribute weight must be non-negative, got {weight}"
            )));
        }
        self.weights.insert(attribute.into(), weight);
        Ok(())
    }

    pub fn weight(&self, attribute: &str) -> f64 {
        self.weights.get(attribute).copied().unwrap_or(1.0)
    }

    /// Loads `attribute<TAB>weight` lines (`#` comments skipped).
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let shown = path.display().to_string();
        let mut dict = AttributeDictionary::default();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split('\t');
            let (Some(attr), Some(raw)) = (fields.next(), fields.next()) else {
                return Err(Error::parse(&shown, idx + 1, "expected attribute<TAB>weight"));
            };
            let weight: f64 = raw
                .parse()
                .map_err(|_| Error::parse(&shown, idx + 1, format!("unparseable weight '{raw}'")))?;
            dict.set(attr, weight)
                .map_err(|e| Error::parse(&shown, idx + 1, e.to_string()))?;
        }
        Ok(dict)
    }
}

/// Loads `item<TAB>attribute<TAB>value[<TAB>weight]` records; missing weight
/// defaults to 1.
pub fn load_catalog(path: &Path) -> Result<DescriptorCatalog> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let shown = path.display().to_string();
    let mut triples = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = idx + 1;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() < 3 || fields.len() > 4 {
            return Err(Error::parse(
                &shown,
                lineno,
                format!("expected item, attribute, value[, weight] but found {} fields", fields.len()),
            ));
        }
        let weight = match fields.get(3) {
            None => 1.0,
            Some(raw) => raw.parse().map_err(|_| {
                Error::parse(&shown, lineno, format!("unparseable weight '{raw}'"))
            })?,
        };
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::parse(
                &shown,
                lineno,
                format!("descriptor weight {weight} outside [0, 1]"),
            ));
        }
        triples.push((
            fields[0].to_owned(),
            fields[1].to_owned(),
            fields[2].to_owned(),
            weight,
        ));
    }
    if triples.is_empty() {
        return Err(Error::EmptyInput { path: shown });
    }
    DescriptorCatalog::from_triples(triples)
}
