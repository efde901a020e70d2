//! In-memory tabular dataset shared by every classifier in the crate.
//!
//! A [`Dataset`] is a declared attribute schema plus a list of instances.
//! Nominal cells store an index into the attribute's declared value list,
//! which keeps training loops free of string comparisons. Datasets are
//! immutable after construction and safe to share across threads.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Attribute domain: a closed set of nominal labels or a real number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum AttributeKind {
    Nominal(Vec<String>),
    Numeric,
}

/// A named column of the dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn nominal<S, I, V>(name: S, values: I) -> Attribute
    where
        S: Into<String>,
        I: IntoIterator<Item = V>,
        V: Into<String>,
    {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Nominal(values.into_iter().map(Into::into).collect()),
        }
    }

    pub fn numeric<S: Into<String>>(name: S) -> Attribute {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Numeric,
        }
    }

    pub fn is_nominal(&self) -> bool {
        matches!(self.kind, AttributeKind::Nominal(_))
    }

    /// Declared nominal labels, or `None` for numeric attributes.
    pub fn values(&self) -> Option<&[String]> {
        match &self.kind {
            AttributeKind::Nominal(values) => Some(values),
            AttributeKind::Numeric => None,
        }
    }

    /// Index of `label` in the declared value list (case-sensitive).
    pub fn value_index(&self, label: &str) -> Option<usize> {
        self.values()?.iter().position(|v| v == label)
    }
}

/// One cell of an instance row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    /// Index into the owning nominal attribute's value list.
    Nominal(usize),
    Number(f64),
    Missing,
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }
}

/// One row; `cells` is aligned with `Dataset::attributes`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub cells: Vec<Cell>,
}

impl Instance {
    pub fn new(cells: Vec<Cell>) -> Instance {
        Instance { cells }
    }

    pub fn cell(&self, index: usize) -> &Cell {
        &self.cells[index]
    }
}

/// Attribute schema plus instance rows; the universal in-memory table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub relation: String,
    pub attributes: Vec<Attribute>,
    /// Index of the class attribute (must be nominal).
    pub class_index: usize,
    pub instances: Vec<Instance>,
}

impl Dataset {
    /// Builds a dataset with the class defaulting to the last attribute and
    /// checks every invariant.
    pub fn new(
        relation: impl Into<String>,
        attributes: Vec<Attribute>,
        instances: Vec<Instance>,
    ) -> Result<Dataset> {
        let class_index = attributes.len().saturating_sub(1);
        Dataset::with_class_index(relation, attributes, class_index, instances)
    }

    pub fn with_class_index(
        relation: impl Into<String>,
        attributes: Vec<Attribute>,
        class_index: usize,
        instances: Vec<Instance>,
    ) -> Result<Dataset> {
        let d = Dataset {
            relation: relation.into(),
            attributes,
            class_index,
            instances,
        };
        d.validate()?;
        Ok(d)
    }

    /// Re-checks all structural invariants.
    pub fn validate(&self) -> Result<()> {
        check_token(&self.relation, "relation name")?;
        if self.attributes.is_empty() {
            return Err(Error::InvalidDataset("no attributes declared".into()));
        }
        for (i, a) in self.attributes.iter().enumerate() {
            check_token(&a.name, "attribute name")?;
            if self.attributes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::InvalidDataset(format!(
                    "duplicate attribute name '{}'",
                    a.name
                )));
            }
            if let AttributeKind::Nominal(values) = &a.kind {
                if values.is_empty() {
                    return Err(Error::InvalidDataset(format!(
                        "attribute '{}' declares no nominal values",
                        a.name
                    )));
                }
                for (j, v) in values.iter().enumerate() {
                    check_token(v, "nominal value")?;
                    if values[..j].contains(v) {
                        return Err(Error::InvalidDataset(format!(
                            "attribute '{}' declares duplicate value '{}'",
                            a.name, v
                        )));
                    }
                }
            }
        }
        if self.class_index >= self.attributes.len() {
            return Err(Error::InvalidDataset(format!(
                "class index {} out of range",
                self.class_index
            )));
        }
        if !self.attributes[self.class_index].is_nominal() {
            return Err(Error::InvalidDataset(
                "class attribute must be nominal".into(),
            ));
        }
        for (row, inst) in self.instances.iter().enumerate() {
            if inst.cells.len() != self.attributes.len() {
                return Err(Error::InvalidDataset(format!(
                    "instance {} has {} cells, expected {}",
                    row,
                    inst.cells.len(),
                    self.attributes.len()
                )));
            }
            for (col, cell) in inst.cells.iter().enumerate() {
                match (cell, &self.attributes[col].kind) {
                    (Cell::Nominal(v), AttributeKind::Nominal(values)) => {
                        if *v >= values.len() {
                            return Err(Error::InvalidDataset(format!(
                                "instance {} cell '{}' indexes value {} of {}",
                                row,
                                self.attributes[col].name,
                                v,
                                values.len()
                            )));
                        }
                    }
                    (Cell::Number(x), AttributeKind::Numeric) => {
                        if !x.is_finite() {
                            return Err(Error::InvalidDataset(format!(
                                "instance {} cell '{}' is not finite",
                                row, self.attributes[col].name
                            )));
                        }
                    }
                    (Cell::Missing, _) => {}
                    (Cell::Nominal(_), AttributeKind::Numeric) => {
                        return Err(Error::InvalidDataset(format!(
                            "instance {} has a nominal cell under numeric attribute '{}'",
                            row, self.attributes[col].name
                        )));
                    }
                    (Cell::Number(_), AttributeKind::Nominal(_)) => {
                        return Err(Error::InvalidDataset(format!(
                            "instance {} has a numeric cell under nominal attribute '{}'",
                            row, self.attributes[col].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Moves the class designation to another nominal attribute.
    pub fn set_class_index(&mut self, index: usize) -> Result<()> {
        let old = self.class_index;
        self.class_index = index;
        if let Err(e) = self.validate() {
            self.class_index = old;
            return Err(e);
        }
        Ok(())
    }

    pub fn num_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn num_instances(&self) -> usize {
        self.instances.len()
    }

    pub fn class_attribute(&self) -> &Attribute {
        &self.attributes[self.class_index]
    }

    /// Labels of the class attribute, in declaration order.
    pub fn class_values(&self) -> &[String] {
        self.class_attribute().values().expect("class is nominal")
    }

    pub fn num_classes(&self) -> usize {
        self.class_values().len()
    }

    /// Class value index of instance `row`, `None` when the class cell is missing.
    pub fn class_of(&self, row: usize) -> Option<usize> {
        match self.instances[row].cells[self.class_index] {
            Cell::Nominal(v) => Some(v),
            _ => None,
        }
    }

    /// Instance counts per class value (missing class cells are skipped).
    pub fn class_distribution(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.num_classes()];
        for row in 0..self.instances.len() {
            if let Some(c) = self.class_of(row) {
                counts[c] += 1;
            }
        }
        counts
    }

    /// Digest of the attribute declarations and class index; two datasets
    /// with equal fingerprints are schema-compatible for prediction.
    pub fn schema_fingerprint(&self) -> String {
        schema_fingerprint(&self.attributes, self.class_index)
    }
}

/// Rejects names and labels the ARFF writer cannot round-trip.
fn check_token(s: &str, what: &str) -> Result<()> {
    if s.is_empty() {
        return Err(Error::InvalidDataset(format!("empty {what}")));
    }
    if s.contains('\'') || s.contains('\n') || s.contains('\r') {
        return Err(Error::InvalidDataset(format!(
            "{what} '{s}' contains a quote or line break"
        )));
    }
    Ok(())
}

/// SHA-256 over a canonical encoding of the attribute declarations.
pub fn schema_fingerprint(attributes: &[Attribute], class_index: usize) -> String {
    let mut hasher = Sha256::new();
    for a in attributes {
        hasher.update(a.name.as_bytes());
        hasher.update([0u8]);
        match &a.kind {
            AttributeKind::Numeric => hasher.update(b"numeric\0"),
            AttributeKind::Nominal(values) => {
                hasher.update(b"nominal\0");
                for v in values {
                    hasher.update(v.as_bytes());
                    hasher.update([1u8]);
                }
                hasher.update([0u8]);
            }
        }
    }
    hasher.update((class_index as u64).to_le_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_attr() -> Vec<Attribute> {
        vec![
            Attribute::nominal("color", ["red", "blue"]),
            Attribute::nominal("class", ["yes", "no"]),
        ]
    }

    #[test]
    fn class_defaults_to_last_attribute() {
        let d = Dataset::new("rel", two_attr(), vec![]).unwrap();
        assert_eq!(d.class_index, 1);
        assert_eq!(d.class_values(), &["yes", "no"]);
    }

    #[test]
    fn rejects_duplicate_attribute_names() {
        let attrs = vec![
            Attribute::nominal("a", ["x"]),
            Attribute::nominal("a", ["y"]),
        ];
        assert!(Dataset::new("rel", attrs, vec![]).is_err());
    }

    #[test]
    fn rejects_duplicate_nominal_values() {
        let attrs = vec![Attribute::nominal("a", ["x", "x"])];
        assert!(Dataset::new("rel", attrs, vec![]).is_err());
    }

    #[test]
    fn rejects_numeric_class() {
        let attrs = vec![Attribute::nominal("a", ["x"]), Attribute::numeric("y")];
        assert!(Dataset::new("rel", attrs, vec![]).is_err());
    }

    #[test]
    fn rejects_out_of_range_nominal_index() {
        let instances = vec![Instance::new(vec![Cell::Nominal(2), Cell::Nominal(0)])];
        assert!(Dataset::new("rel", two_attr(), instances).is_err());
    }

    #[test]
    fn rejects_cell_kind_mismatch() {
        let instances = vec![Instance::new(vec![Cell::Number(1.0), Cell::Nominal(0)])];
        assert!(Dataset::new("rel", two_attr(), instances).is_err());
    }

    #[test]
    fn rejects_non_finite_numbers() {
        let attrs = vec![Attribute::numeric("x"), Attribute::nominal("class", ["yes"])];
        let instances = vec![Instance::new(vec![
            Cell::Number(f64::INFINITY),
            Cell::Nominal(0),
        ])];
        assert!(Dataset::new("rel", attrs, instances).is_err());
    }

    #[test]
    fn missing_cells_are_valid_anywhere() {
        let instances = vec![Instance::new(vec![Cell::Missing, Cell::Missing])];
        let d = Dataset::new("rel", two_attr(), instances).unwrap();
        assert_eq!(d.class_of(0), None);
    }

    #[test]
    fn class_index_is_overridable_to_any_nominal_attribute() {
        let attrs = vec![
            Attribute::nominal("label", ["p", "q"]),
            Attribute::numeric("x"),
            Attribute::nominal("other", ["a"]),
        ];
        let mut d = Dataset::new(
            "rel",
            attrs,
            vec![Instance::new(vec![
                Cell::Nominal(1),
                Cell::Number(2.0),
                Cell::Nominal(0),
            ])],
        )
        .unwrap();
        assert_eq!(d.class_index, 2);
        d.set_class_index(0).unwrap();
        assert_eq!(d.class_values(), &["p", "q"]);
        assert_eq!(d.class_of(0), Some(1));
        // numeric attributes cannot be the class; the old index is kept
        assert!(d.set_class_index(1).is_err());
        assert_eq!(d.class_index, 0);
    }

    #[test]
    fn fingerprint_tracks_schema_not_rows() {
        let d1 = Dataset::new("a", two_attr(), vec![]).unwrap();
        let d2 = Dataset::new(
            "b",
            two_attr(),
            vec![Instance::new(vec![Cell::Nominal(0), Cell::Nominal(1)])],
        )
        .unwrap();
        assert_eq!(d1.schema_fingerprint(), d2.schema_fingerprint());

        let swapped = vec![
            Attribute::nominal("color", ["blue", "red"]),
            Attribute::nominal("class", ["yes", "no"]),
        ];
        let d3 = Dataset::new("a", swapped, vec![]).unwrap();
        assert_ne!(d1.schema_fingerprint(), d3.schema_fingerprint());
    }
}
