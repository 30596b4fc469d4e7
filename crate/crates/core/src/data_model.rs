//! Decision systems `(O, F, d, V, V_d)`.
//!
//! Feature values are opaque tokens compared by equality. Decisions are
//! finite reals. Objects are identified by their row index in the source
//! table, and that identity survives removal of other rows.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ObjectId(pub usize);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A `(feature, value)` pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Descriptor {
    pub feature: String,
    pub value: String,
}

impl Descriptor {
    pub fn new(feature: impl Into<String>, value: impl Into<String>) -> Self {
        Descriptor {
            feature: feature.into(),
            value: value.into(),
        }
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.feature, self.value)
    }
}

/// An object from outside the system, given by one descriptor per feature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct NewObject {
    descriptors: Vec<Descriptor>,
}

impl NewObject {
    /// Builds a new object; rejects repeated feature names.
    pub fn new(descriptors: Vec<Descriptor>) -> Result<Self> {
        let mut seen = HashSet::new();
        for d in &descriptors {
            if !seen.insert(d.feature.as_str()) {
                return Err(Error::Usage(format!(
                    "feature `{}` is given more than once",
                    d.feature
                )));
            }
        }
        Ok(NewObject { descriptors })
    }

    /// Parses the inline form `f1=v1,f2=v2`.
    pub fn parse_inline(text: &str) -> Result<Self> {
        let mut out = Vec::new();
        for (i, part) in text.split(',').enumerate() {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (f, v) = part.split_once('=').ok_or_else(|| {
                Error::Usage(format!(
                    "descriptor #{} `{part}` is not of the form f=v",
                    i + 1
                ))
            })?;
            out.push(Descriptor::new(f.trim(), v.trim()));
        }
        NewObject::new(out)
    }

    /// Reads a header row of feature names followed by exactly one row of
    /// values.
    pub fn from_reader<R: Read>(source: R, delimiter: u8) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .has_headers(true)
            .flexible(true)
            .from_reader(source);
        let header: Vec<String> = rdr
            .headers()?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let mut records = rdr.records();
        let record = match records.next() {
            Some(r) => r?,
            None => return Err(Error::Schema("new object file has no value row".into())),
        };
        if records.next().is_some() {
            return Err(Error::Schema(
                "new object file has more than one value row".into(),
            ));
        }
        let row = record.position().map(|p| p.line()).unwrap_or(2);
        if record.len() != header.len() {
            return Err(Error::Ragged {
                row,
                expected: header.len(),
                found: record.len(),
            });
        }
        let mut descriptors = Vec::with_capacity(header.len());
        for (f, v) in header.iter().zip(record.iter()) {
            let v = v.trim();
            if v.is_empty() {
                return Err(Error::MissingValue {
                    row,
                    column: f.clone(),
                });
            }
            descriptors.push(Descriptor::new(f.clone(), v));
        }
        NewObject::new(descriptors)
    }

    pub fn descriptors(&self) -> &[Descriptor] {
        &self.descriptors
    }

    pub fn value(&self, feature: &str) -> Option<&str> {
        self.descriptors
            .iter()
            .find(|d| d.feature == feature)
            .map(|d| d.value.as_str())
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }
}

/// Options for [`DecisionSystem::from_reader`].
#[derive(Clone, Debug)]
pub struct LoadOptions {
    pub delimiter: u8,
    /// Decision column name; the last column when `None`.
    pub decision_column: Option<String>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            delimiter: b',',
            decision_column: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecisionSystem {
    ids: Vec<ObjectId>,
    features: Vec<String>,
    table: Vec<Vec<String>>,
    decisions: Vec<f64>,
    decision_name: String,
    /// Index of the feature that copies the decision column, if any.
    synthetic: Option<usize>,
}

impl DecisionSystem {
    /// Builds a system with object ids `0..rows.len()`.
    pub fn new(
        features: Vec<String>,
        table: Vec<Vec<String>>,
        decisions: Vec<f64>,
        decision_name: impl Into<String>,
    ) -> Result<Self> {
        let ids = (0..table.len()).map(ObjectId).collect();
        Self::with_ids(ids, features, table, decisions, decision_name.into())
    }

    fn with_ids(
        ids: Vec<ObjectId>,
        features: Vec<String>,
        table: Vec<Vec<String>>,
        decisions: Vec<f64>,
        decision_name: String,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for f in &features {
            if !seen.insert(f.as_str()) {
                return Err(Error::Schema(format!("duplicate feature name `{f}`")));
            }
        }
        if seen.contains(decision_name.as_str()) {
            return Err(Error::Schema(format!(
                "decision column `{decision_name}` is also a feature"
            )));
        }
        if table.len() != decisions.len() || table.len() != ids.len() {
            return Err(Error::Schema(format!(
                "{} rows but {} decisions",
                table.len(),
                decisions.len()
            )));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != features.len() {
                return Err(Error::Ragged {
                    row: i as u64,
                    expected: features.len(),
                    found: row.len(),
                });
            }
        }
        if let Some(i) = decisions.iter().position(|d| !d.is_finite()) {
            return Err(Error::NotANumber {
                row: i as u64,
                column: decision_name,
                value: decisions[i].to_string(),
            });
        }
        Ok(DecisionSystem {
            ids,
            features,
            table,
            decisions,
            decision_name,
            synthetic: None,
        })
    }

    /// Reads a delimiter-separated table with a header row.
    ///
    /// Row numbers in errors count physical lines, header = 1.
    pub fn from_reader<R: Read>(source: R, opts: &LoadOptions) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(opts.delimiter)
            .has_headers(true)
            .flexible(true)
            .from_reader(source);
        let header: Vec<String> = rdr
            .headers()?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        if header.is_empty() || header.iter().all(|h| h.is_empty()) {
            return Err(Error::Schema("empty header row".into()));
        }
        let mut seen = HashSet::new();
        for h in &header {
            if h.is_empty() {
                return Err(Error::Schema("empty column name in header".into()));
            }
            if !seen.insert(h.as_str()) {
                return Err(Error::Schema(format!("duplicate column name `{h}`")));
            }
        }
        let decision_idx = match &opts.decision_column {
            Some(name) => header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Schema(format!("no decision column `{name}`")))?,
            None => header.len() - 1,
        };
        if header.len() < 2 {
            return Err(Error::Schema(
                "table needs at least one feature column besides the decision".into(),
            ));
        }
        let features: Vec<String> = header
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != decision_idx)
            .map(|(_, h)| h.clone())
            .collect();

        let mut table = Vec::new();
        let mut decisions = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let row = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != header.len() {
                return Err(Error::Ragged {
                    row,
                    expected: header.len(),
                    found: record.len(),
                });
            }
            let mut values = Vec::with_capacity(features.len());
            for (i, cell) in record.iter().enumerate() {
                let cell = cell.trim();
                if cell.is_empty() {
                    return Err(Error::MissingValue {
                        row,
                        column: header[i].clone(),
                    });
                }
                if i == decision_idx {
                    let d: f64 = cell
                        .parse()
                        .ok()
                        .filter(|d: &f64| d.is_finite())
                        .ok_or_else(|| Error::NotANumber {
                            row,
                            column: header[i].clone(),
                            value: cell.to_string(),
                        })?;
                    decisions.push(d);
                } else {
                    values.push(cell.to_string());
                }
            }
            table.push(values);
        }
        DecisionSystem::new(features, table, decisions, header[decision_idx].clone())
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        Self::from_reader(text.as_bytes(), &LoadOptions::default())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn objects(&self) -> &[ObjectId] {
        &self.ids
    }

    /// All features, including a synthetic decision copy if present.
    pub fn features(&self) -> &[String] {
        &self.features
    }

    /// Features a new object has to supply: everything except the
    /// synthetic decision copy.
    pub fn condition_features(&self) -> impl Iterator<Item = (usize, &str)> {
        let skip = self.synthetic;
        self.features
            .iter()
            .enumerate()
            .filter(move |&(i, _)| Some(i) != skip)
            .map(|(i, f)| (i, f.as_str()))
    }

    pub fn decision_name(&self) -> &str {
        &self.decision_name
    }

    pub fn is_consistentized(&self) -> bool {
        self.synthetic.is_some()
    }

    fn row_of(&self, o: ObjectId) -> Result<usize> {
        // ids are sorted ascending by construction
        self.ids.binary_search(&o).map_err(|_| Error::Lookup {
            what: "object",
            name: o.to_string(),
        })
    }

    fn feature_index(&self, name: &str) -> Result<usize> {
        self.features
            .iter()
            .position(|f| f == name)
            .ok_or_else(|| Error::Lookup {
                what: "feature",
                name: name.to_string(),
            })
    }

    pub fn decision(&self, o: ObjectId) -> Result<f64> {
        Ok(self.decisions[self.row_of(o)?])
    }

    pub fn value(&self, o: ObjectId, feature: &str) -> Result<&str> {
        let r = self.row_of(o)?;
        let f = self.feature_index(feature)?;
        Ok(&self.table[r][f])
    }

    pub(crate) fn row_values(&self, o: ObjectId) -> Result<&[String]> {
        Ok(&self.table[self.row_of(o)?])
    }

    /// `IND_H(o)`: objects agreeing with `o` on every feature of `h`.
    pub fn indiscernibility_class(&self, o: ObjectId, h: &[&str]) -> Result<BTreeSet<ObjectId>> {
        if h.is_empty() {
            return Err(Error::domain("feature subset must be non-empty"));
        }
        let r = self.row_of(o)?;
        let cols = h
            .iter()
            .map(|f| self.feature_index(f))
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .table
            .iter()
            .zip(&self.ids)
            .filter(|(row, _)| cols.iter().all(|&c| row[c] == self.table[r][c]))
            .map(|(_, &id)| id)
            .collect())
    }

    /// A pair with identical feature values and different decisions, if any.
    pub fn inconsistency_witness(&self) -> Option<(ObjectId, ObjectId)> {
        let mut first: HashMap<&[String], usize> = HashMap::new();
        for (i, row) in self.table.iter().enumerate() {
            match first.get(row.as_slice()) {
                Some(&j) => {
                    // every earlier row with these values shares row j's decision
                    if self.decisions[j] != self.decisions[i] {
                        return Some((self.ids[j], self.ids[i]));
                    }
                }
                None => {
                    first.insert(row.as_slice(), i);
                }
            }
        }
        None
    }

    /// True iff every `F`-indiscernibility class lies inside a decision class.
    pub fn is_consistent(&self) -> bool {
        self.inconsistency_witness().is_none()
    }

    /// Adds the decision as a discrete feature named after the decision
    /// column. A system that already carries the copy is returned unchanged.
    pub fn consistentize(&self) -> Result<DecisionSystem> {
        if self.synthetic.is_some() {
            return Ok(self.clone());
        }
        self.consistentize_as(&self.decision_name)
    }

    /// Like [`consistentize`](Self::consistentize) with an explicit name for
    /// the synthetic feature.
    pub fn consistentize_as(&self, name: &str) -> Result<DecisionSystem> {
        if self.features.iter().any(|f| f == name) {
            return Err(Error::Schema(format!(
                "synthetic decision feature `{name}` collides with an existing feature"
            )));
        }
        let mut out = self.clone();
        out.features.push(name.to_string());
        for (row, &d) in out.table.iter_mut().zip(&self.decisions) {
            row.push(decision_token(d));
        }
        out.synthetic = Some(out.features.len() - 1);
        Ok(out)
    }

    /// The system with object `o` removed; other ids are preserved.
    pub fn without(&self, o: ObjectId) -> Result<DecisionSystem> {
        let r = self.row_of(o)?;
        let mut out = self.clone();
        out.ids.remove(r);
        out.table.remove(r);
        out.decisions.remove(r);
        Ok(out)
    }

    /// The condition-feature descriptors of `o`, as a new object.
    pub fn as_new_object(&self, o: ObjectId) -> Result<NewObject> {
        let row = self.row_values(o)?;
        NewObject::new(
            self.condition_features()
                .map(|(i, f)| Descriptor::new(f, row[i].clone()))
                .collect(),
        )
    }

    /// Checks that `omega` supplies exactly one value per condition feature
    /// and returns its values in feature order.
    pub fn align(&self, omega: &NewObject) -> Result<Vec<(usize, String)>> {
        let mut out = Vec::new();
        for (i, f) in self.condition_features() {
            let v = omega.value(f).ok_or_else(|| {
                Error::Usage(format!("new object has no value for feature `{f}`"))
            })?;
            out.push((i, v.to_string()));
        }
        if omega.len() != out.len() {
            let extra = omega
                .descriptors()
                .iter()
                .find(|d| self.condition_features().all(|(_, f)| f != d.feature))
                .map(|d| d.feature.clone())
                .unwrap_or_default();
            return Err(Error::Usage(format!(
                "new object names feature `{extra}`, which the system does not have"
            )));
        }
        Ok(out)
    }
}

fn decision_token(d: f64) -> String {
    // -0.0 and 0.0 are the same decision
    if d == 0.0 {
        "0".into()
    } else {
        d.to_string()
    }
}
