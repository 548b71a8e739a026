//! Wire form of a kernel:
//! `{"source": space, "target": space, "rows": {"<element>": ["p/q", ...]}}`.
//!
//! Elements missing from `rows` are outside the domain.

use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{KernelError, PartialKernel};
use crate::rational;
use crate::space::FiniteSpace;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelJson {
    pub source: FiniteSpace,
    pub target: FiniteSpace,
    /// Kept in source-element order when written.
    #[serde(serialize_with = "ordered", deserialize_with = "unordered")]
    pub rows: Vec<(String, Vec<String>)>,
}

fn ordered<S: Serializer>(rows: &[(String, Vec<String>)], s: S) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(rows.len()))?;
    for (k, v) in rows {
        map.serialize_entry(k, v)?;
    }
    map.end()
}

fn unordered<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(String, Vec<String>)>, D::Error> {
    Ok(BTreeMap::<String, Vec<String>>::deserialize(d)?
        .into_iter()
        .collect())
}

impl KernelJson {
    pub fn into_kernel(self) -> Result<PartialKernel, KernelError> {
        let mut rows = BTreeMap::new();
        for (element, probs) in self.rows {
            let x = self.source.index_of(&element)?;
            let row = probs
                .iter()
                .map(|p| rational::parse(p))
                .collect::<Result<Vec<_>, _>>()?;
            rows.insert(x, row);
        }
        PartialKernel::new(self.source, self.target, rows)
    }
}

impl From<&PartialKernel> for KernelJson {
    fn from(k: &PartialKernel) -> Self {
        Self {
            source: k.source().clone(),
            target: k.target().clone(),
            rows: k
                .rows()
                .map(|(x, row)| {
                    (
                        k.source().name(x),
                        row.iter().map(rational::format).collect(),
                    )
                })
                .collect(),
        }
    }
}

impl PartialKernel {
    pub fn from_json(text: &str) -> Result<Self, KernelJsonError> {
        let raw: KernelJson = serde_json::from_str(text)?;
        Ok(raw.into_kernel()?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&KernelJson::from(self)).expect("kernel JSON is serializable")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum KernelJsonError {
    #[error("malformed kernel JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
