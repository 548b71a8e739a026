//! Finite measurable spaces.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("space {label:?} must have at least one element")]
    Empty { label: String },
    #[error("space {label:?} has {names} names for {size} elements")]
    NameCount {
        label: String,
        size: usize,
        names: usize,
    },
    #[error("space {label:?} has duplicate element name {name:?}")]
    DuplicateName { label: String, name: String },
    #[error("element {element:?} is not in space {label:?}")]
    UnknownElement { label: String, element: String },
}

/// A finite set with the discrete σ-algebra. Elements are identified with
/// indices `0..size`; names are optional labels for I/O.
///
/// Product spaces remember their two factors so that `swap` and the
/// marginal projections can be built from them. Element `(a, b)` of
/// `A × B` has index `a * |B| + b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct FiniteSpace {
    label: String,
    size: usize,
    names: Option<Vec<String>>,
    factors: Option<Box<(FiniteSpace, FiniteSpace)>>,
}

impl FiniteSpace {
    pub fn new(label: impl Into<String>, size: usize) -> Result<Self, SpaceError> {
        let label = label.into();
        if size == 0 {
            return Err(SpaceError::Empty { label });
        }
        Ok(Self {
            label,
            size,
            names: None,
            factors: None,
        })
    }

    pub fn named<S: Into<String>>(
        label: impl Into<String>,
        names: impl IntoIterator<Item = S>,
    ) -> Result<Self, SpaceError> {
        let label = label.into();
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut space = Self::new(label, names.len())?;
        space.set_names(names)?;
        Ok(space)
    }

    fn set_names(&mut self, names: Vec<String>) -> Result<(), SpaceError> {
        if names.len() != self.size {
            return Err(SpaceError::NameCount {
                label: self.label.clone(),
                size: self.size,
                names: names.len(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(SpaceError::DuplicateName {
                    label: self.label.clone(),
                    name: n.clone(),
                });
            }
        }
        self.names = Some(names);
        Ok(())
    }

    /// The monoidal unit `I = {∗}`.
    pub fn unit() -> Self {
        Self {
            label: "I".into(),
            size: 1,
            names: Some(vec!["*".into()]),
            factors: None,
        }
    }

    pub fn product(a: &FiniteSpace, b: &FiniteSpace) -> Self {
        let names = (a.names.is_some() || b.names.is_some()).then(|| {
            (0..a.size * b.size)
                .map(|i| format!("({},{})", a.name(i / b.size), b.name(i % b.size)))
                .collect()
        });
        Self {
            label: format!("{}×{}", a.label, b.label),
            size: a.size * b.size,
            names,
            factors: Some(Box::new((a.clone(), b.clone()))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn factors(&self) -> Option<(&FiniteSpace, &FiniteSpace)> {
        self.factors.as_deref().map(|(a, b)| (a, b))
    }

    pub fn is_product(&self) -> bool {
        self.factors.is_some()
    }

    /// Name of element `i`, falling back to its index.
    pub fn name(&self, i: usize) -> String {
        match &self.names {
            Some(names) => names[i].clone(),
            None => i.to_string(),
        }
    }

    /// Resolves an element by name, or by index when the space is unnamed
    /// (indices are also accepted for named spaces if no name matches).
    pub fn index_of(&self, element: &str) -> Result<usize, SpaceError> {
        if let Some(names) = &self.names {
            if let Some(i) = names.iter().position(|n| n == element) {
                return Ok(i);
            }
        }
        element
            .parse::<usize>()
            .ok()
            .filter(|&i| i < self.size)
            .ok_or_else(|| SpaceError::UnknownElement {
                label: self.label.clone(),
                element: element.to_string(),
            })
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }
}

/// Wire form: `{ "label", "size", "names"? , "factors"? }`.
#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    label: String,
    size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factors: Option<Box<(FiniteSpace, FiniteSpace)>>,
}

impl TryFrom<SpaceRepr> for FiniteSpace {
    type Error = SpaceError;

    fn try_from(r: SpaceRepr) -> Result<Self, SpaceError> {
        let mut space = match r.factors {
            Some(f) => {
                let product = FiniteSpace::product(&f.0, &f.1);
                if product.size != r.size {
                    return Err(SpaceError::NameCount {
                        label: r.label,
                        size: product.size,
                        names: r.size,
                    });
                }
                FiniteSpace {
                    label: r.label,
                    ..product
                }
            }
            None => FiniteSpace::new(r.label, r.size)?,
        };
        if let Some(names) = r.names {
            space.set_names(names)?;
        }
        Ok(space)
    }
}

impl From<FiniteSpace> for SpaceRepr {
    fn from(s: FiniteSpace) -> Self {
        SpaceRepr {
            label: s.label,
            size: s.size,
            names: s.names,
            factors: s.factors,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_bad_names() {
        assert!(FiniteSpace::new("X", 0).is_err());
        assert!(FiniteSpace::named("X", ["a", "a"]).is_err());
        let mut s = FiniteSpace::new("X", 2).unwrap();
        assert!(s.set_names(vec!["a".into()]).is_err());
    }

    #[test]
    fn product_indexing_and_names() {
        let a = FiniteSpace::named("A", ["a", "b"]).unwrap();
        let b = FiniteSpace::named("B", ["c", "d", "e"]).unwrap();
        let ab = FiniteSpace::product(&a, &b);
        assert_eq!(ab.size(), 6);
        assert_eq!(ab.name(4), "(b,d)");
        assert_eq!(ab.index_of("(a,e)").unwrap(), 2);
        assert_eq!(ab.factors().unwrap().1, &b);
    }

    #[test]
    fn json_round_trip_keeps_factors() {
        let a = FiniteSpace::named("A", ["a", "b"]).unwrap();
        let ab = FiniteSpace::product(&a, &FiniteSpace::new("B", 2).unwrap());
        let json = serde_json::to_string(&ab).unwrap();
        let back: FiniteSpace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ab);
        let bad = r#"{"label":"X","size":2,"names":["x"]}"#;
        assert!(serde_json::from_str::<FiniteSpace>(bad).is_err());
    }
}
