//! On-disk JSON formats: system documents and graph documents, with a
//! canonical serialization that round-trips byte-identically.
//!
//! Canonical form: map keys in sorted order (labels, atoms), every atom
//! array sorted by the algebra's atom order, empty theta images omitted.
//! The `atoms` and `labels` arrays keep their input order — that order is
//! semantic and fixes every downstream ordering.

use bdsk_core::dynamics::{Digraph, DynamicsError, RelativeGbds, SystemDescription};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub atoms: Vec<String>,
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub theta: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideals: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "J")]
    pub j: Option<Vec<String>>,
}

impl SystemDocument {
    pub fn to_description(&self) -> SystemDescription {
        let theta: HashMap<String, HashMap<String, Vec<String>>> = self
            .theta
            .iter()
            .map(|(l, m)| {
                (
                    l.clone(),
                    m.iter().map(|(a, v)| (a.clone(), v.clone())).collect(),
                )
            })
            .collect();
        SystemDescription {
            atoms: self.atoms.clone(),
            labels: self.labels.clone(),
            theta,
            ideal_tops: self
                .ideals
                .as_ref()
                .map(|m| m.iter().map(|(l, v)| (l.clone(), v.clone())).collect()),
            j_top: self.j.clone(),
        }
    }

    /// Validate and return the system together with the canonicalized
    /// document.
    pub fn validate(&self) -> Result<(RelativeGbds, SystemDocument), DynamicsError> {
        let sys = RelativeGbds::validate(&self.to_description())?;
        let canon = self.canonicalize(&sys);
        Ok((sys, canon))
    }

    /// Sort every atom array by atom order and drop empty theta images.
    pub fn canonicalize(&self, sys: &RelativeGbds) -> SystemDocument {
        let atom_key = |name: &String| sys.algebra().atom_index(name).unwrap_or(usize::MAX);
        let sort_atoms = |v: &[String]| {
            let mut v: Vec<String> = v.to_vec();
            v.sort_by_key(atom_key);
            v.dedup();
            v
        };
        let theta = self
            .theta
            .iter()
            .filter_map(|(l, m)| {
                let inner: BTreeMap<String, Vec<String>> = m
                    .iter()
                    .filter(|(_, img)| !img.is_empty())
                    .map(|(a, img)| (a.clone(), sort_atoms(img)))
                    .collect();
                (!inner.is_empty()).then_some((l.clone(), inner))
            })
            .collect();
        SystemDocument {
            atoms: self.atoms.clone(),
            labels: self.labels.clone(),
            theta,
            ideals: self
                .ideals
                .as_ref()
                .map(|m| m.iter().map(|(l, v)| (l.clone(), sort_atoms(v))).collect()),
            j: self.j.as_ref().map(|v| sort_atoms(v)),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}

/// Emit a validated system as a document, with its ideal data explicit.
pub fn system_to_document(sys: &RelativeGbds) -> SystemDocument {
    let mut theta = BTreeMap::new();
    for (li, label) in sys.labels().iter().enumerate() {
        let mut inner = BTreeMap::new();
        for a in 0..sys.algebra().atom_count() {
            let img = sys.actions().image_of_atom(li, a);
            if !img.is_empty() {
                inner.insert(sys.algebra().atom_name(a).to_string(), img.atom_names());
            }
        }
        if !inner.is_empty() {
            theta.insert(label.clone(), inner);
        }
    }
    let ideals = sys
        .labels()
        .iter()
        .enumerate()
        .map(|(li, l)| (l.clone(), sys.ideal_top(li).atom_names()))
        .collect();
    SystemDocument {
        atoms: sys.algebra().atoms().to_vec(),
        labels: sys.labels().to_vec(),
        theta,
        ideals: Some(ideals),
        j: Some(sys.j_top().atom_names()),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphEdge {
    pub name: String,
    pub source: String,
    pub range: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<String>,
    pub edges: Vec<GraphEdge>,
}

impl GraphDocument {
    pub fn to_digraph(&self) -> Result<Digraph, DynamicsError> {
        Digraph::from_names(
            self.vertices.clone(),
            self.edges
                .iter()
                .map(|e| (e.name.clone(), e.source.clone(), e.range.clone()))
                .collect(),
        )
    }
}
