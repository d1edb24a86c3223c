//! Reproducibility-obstacle attributes and formal-context export.
//!
//! Each attribute is a yes/no question phrased so that "yes" marks an
//! obstacle. Records list the attributes observed for a paper; a missing
//! attribute asserts nothing. Records plus the schema form a formal context
//! (papers x attributes) that exports to the Burmeister `.cxt` format.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    DataSetAvailability,
    DataSetTransformation,
    SoftwareEnvironment,
    SoftwareUsage,
    SoftwareSourceCode,
    ResultModel,
    ResultPredictions,
}

impl Category {
    pub fn path(self) -> &'static str {
        match self {
            Category::DataSetAvailability => "data set/availability",
            Category::DataSetTransformation => "data set/transformation",
            Category::SoftwareEnvironment => "software/environment",
            Category::SoftwareUsage => "software/usage",
            Category::SoftwareSourceCode => "software/source-code",
            Category::ResultModel => "result/model",
            Category::ResultPredictions => "result/predictions",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.path())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDef {
    pub id: &'static str,
    pub category: Category,
    pub question: &'static str,
}

use Category::*;

#[rustfmt::skip]
const SCHEMA: [(&str, Category, &str); 36] = [
    ("D1", DataSetAvailability, "Is the data set format not documented?"),
    ("D2", DataSetAvailability, "Was the data set version not set explicitly?"),
    ("D3", DataSetAvailability, "Was the data set not directly accessible?"),
    ("D4", DataSetAvailability, "Did the access not work at time of study?"),
    ("D5", DataSetAvailability, "Is the data set privacy restricted?"),
    ("D6", DataSetAvailability, "Does the data set require a restrictive license agreement for accessing?"),
    ("D7", DataSetAvailability, "Is the data set available on request only?"),
    ("D8", DataSetTransformation, "Are manual steps necessary for pre-processing?"),
    ("D9", DataSetTransformation, "Is there only an incomplete description for pre-processing steps?"),
    ("D10", DataSetTransformation, "Are the train, validation and test splits unclear?"),
    ("D11", DataSetTransformation, "Is the number of samples not documented?"),
    ("S1", SoftwareEnvironment, "Is the exact version of dependencies not documented?"),
    ("S2", SoftwareEnvironment, "Is the specified version of dependencies not available anymore?"),
    ("S3", SoftwareEnvironment, "Is necessary hardware unavailable?"),
    ("S4", SoftwareEnvironment, "Are any seeds for random number generators not set?"),
    ("S5", SoftwareEnvironment, "Are important variables unclear?"),
    ("S6", SoftwareUsage, "Is the documentation not up-to-date?"),
    ("S7", SoftwareUsage, "Are necessary arguments not clear?"),
    ("S8", SoftwareUsage, "Are there missing hyperparameters?"),
    ("S9", SoftwareUsage, "Are train/test scripts incomplete?"),
    ("S10", SoftwareUsage, "Is it unclear which version of scripts was used?"),
    ("S11", SoftwareSourceCode, "Is there a bug that was never fixed?"),
    ("S12", SoftwareSourceCode, "Are there issue solutions that were not applied?"),
    ("S13", SoftwareSourceCode, "Was a bug fix distributed through other channels?"),
    ("S14", SoftwareSourceCode, "Did the API change?"),
    ("S15", SoftwareSourceCode, "Did an out of memory error occur?"),
    ("S16", SoftwareSourceCode, "Are steps for one experiment missing?"),
    ("S17", SoftwareSourceCode, "Are steps for all experiments missing?"),
    ("S18", SoftwareSourceCode, "Is the hyperparameter search not included?"),
    ("S19", SoftwareSourceCode, "Is only the general idea (and no experiments) implemented?"),
    ("R1", ResultModel, "Are there no parameters (weights) of the obtained model provided?"),
    ("R2", ResultPredictions, "Are there small deviation to obtained model?"),
    ("R3", ResultPredictions, "Are strong differences in few experiments observed?"),
    ("R4", ResultPredictions, "Are strong differences in almost all experiments observed?"),
    ("R5", ResultPredictions, "Are the claimed results only supported by small sample size?"),
    ("R6", ResultPredictions, "Are there no predictions (outputs of classes or decisions) on the data sets?"),
];

/// The 36 attributes in D, S, R order.
pub fn builtin_schema() -> Vec<AttributeDef> {
    SCHEMA
        .iter()
        .map(|&(id, category, question)| AttributeDef {
            id,
            category,
            question,
        })
        .collect()
}

pub fn lookup<'a>(schema: &'a [AttributeDef], id: &str) -> Option<&'a AttributeDef> {
    schema.iter().find(|a| a.id == id)
}

/// Observed obstacles for one paper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReproRecord {
    pub label: String,
    pub attributes: BTreeSet<String>,
}

impl ReproRecord {
    pub fn new<I, S>(label: impl Into<String>, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            label: label.into(),
            attributes: ids.into_iter().map(Into::into).collect(),
        }
    }
}

/// Ids in `record` that the schema does not define.
pub fn validate_record(record: &ReproRecord, schema: &[AttributeDef]) -> Result<(), Vec<String>> {
    let unknown: Vec<String> = record
        .attributes
        .iter()
        .filter(|id| lookup(schema, id).is_none())
        .cloned()
        .collect();
    if unknown.is_empty() {
        Ok(())
    } else {
        Err(unknown)
    }
}

/// Parses `label: id, id, ...` lines. Blank lines and `#` comments are skipped.
pub fn parse_records(text: &str) -> Result<Vec<ReproRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, ids) = line.rsplit_once(':').ok_or_else(|| Error::Parse {
            path: "records".into(),
            line: i + 1,
            msg: format!("expected `label: id, ...`, got {line:?}"),
        })?;
        let label = label.trim();
        if label.is_empty() {
            return Err(Error::Parse {
                path: "records".into(),
                line: i + 1,
                msg: "empty paper label".into(),
            });
        }
        let ids = ids.split(',').map(str::trim).filter(|s| !s.is_empty());
        out.push(ReproRecord::new(label, ids));
    }
    Ok(out)
}

/// Renders records back to the line format, ids in schema order.
pub fn format_records(records: &[ReproRecord], schema: &[AttributeDef]) -> String {
    let mut out = String::new();
    for r in records {
        let ids: Vec<&str> = schema
            .iter()
            .map(|a| a.id)
            .filter(|id| r.attributes.contains(*id))
            .collect();
        out.push_str(&format!("{}: {}\n", r.label, ids.join(", ")));
    }
    out
}

/// The bundled records for the six surveyed GNN papers.
pub fn bundled_records() -> Vec<ReproRecord> {
    parse_records(include_str!("../data/survey_records.txt")).expect("bundled records parse")
}

/// Objects x attributes incidence table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalContext {
    pub objects: Vec<String>,
    pub attributes: Vec<String>,
    /// Row-major, `objects.len() x attributes.len()`.
    pub incidence: Vec<Vec<bool>>,
}

impl FormalContext {
    pub fn new(
        objects: Vec<String>,
        attributes: Vec<String>,
        incidence: Vec<Vec<bool>>,
    ) -> Result<Self> {
        if incidence.len() != objects.len() {
            return Err(Error::MalformedContext(format!(
                "{} incidence rows for {} objects",
                incidence.len(),
                objects.len()
            )));
        }
        if let Some(row) = incidence.iter().find(|r| r.len() != attributes.len()) {
            return Err(Error::MalformedContext(format!(
                "incidence row of length {} for {} attributes",
                row.len(),
                attributes.len()
            )));
        }
        Ok(Self {
            objects,
            attributes,
            incidence,
        })
    }

    /// Context over every schema attribute, in schema order.
    pub fn from_records(records: &[ReproRecord], schema: &[AttributeDef]) -> Result<Self> {
        let mut unknown = Vec::new();
        for r in records {
            if let Err(ids) = validate_record(r, schema) {
                unknown.extend(ids);
            }
        }
        if !unknown.is_empty() {
            return Err(Error::UnknownAttributes(unknown));
        }
        let attributes: Vec<String> = schema.iter().map(|a| a.id.to_string()).collect();
        let incidence = records
            .iter()
            .map(|r| {
                attributes
                    .iter()
                    .map(|a| r.attributes.contains(a))
                    .collect()
            })
            .collect();
        Self::new(
            records.iter().map(|r| r.label.clone()).collect(),
            attributes,
            incidence,
        )
    }
}

/// Burmeister `.cxt` bytes.
pub fn export_cxt(context: &FormalContext) -> Result<Vec<u8>> {
    for name in context.objects.iter().chain(&context.attributes) {
        if name.contains('\n') || name.contains('\r') {
            return Err(Error::NameWithNewline(name.clone()));
        }
    }
    let mut out = format!(
        "B\n\n{}\n{}\n\n",
        context.objects.len(),
        context.attributes.len()
    );
    for name in context.objects.iter().chain(&context.attributes) {
        out.push_str(name);
        out.push('\n');
    }
    for row in &context.incidence {
        out.extend(row.iter().map(|&x| if x { 'X' } else { '.' }));
        out.push('\n');
    }
    Ok(out.into_bytes())
}

/// Parses Burmeister `.cxt` bytes as written by [`export_cxt`].
pub fn parse_cxt(bytes: &[u8]) -> Result<FormalContext> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::MalformedContext(format!("not UTF-8: {e}")))?;
    let text = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l));
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::MalformedContext(format!("missing {what}")))
    };
    if next("header")? != "B" {
        return Err(Error::MalformedContext("first line must be `B`".into()));
    }
    let count = |s: &str, what: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::MalformedContext(format!("bad {what} count {s:?}")))
    };
    // context name, usually empty
    next("name line")?;
    let n_obj = count(next("object count")?, "object")?;
    let n_attr = count(next("attribute count")?, "attribute")?;
    if !next("blank line")?.is_empty() {
        return Err(Error::MalformedContext(
            "expected blank line after counts".into(),
        ));
    }
    let objects = (0..n_obj)
        .map(|_| next("object name").map(str::to_string))
        .collect::<Result<Vec<_>>>()?;
    let attributes = (0..n_attr)
        .map(|_| next("attribute name").map(str::to_string))
        .collect::<Result<Vec<_>>>()?;
    let incidence = (0..n_obj)
        .map(|_| {
            let row = next("incidence row")?;
            row.chars()
                .map(|c| match c {
                    'X' | 'x' => Ok(true),
                    '.' => Ok(false),
                    other => Err(Error::MalformedContext(format!(
                        "bad incidence mark {other:?}"
                    ))),
                })
                .collect::<Result<Vec<bool>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if lines.next().is_some() {
        return Err(Error::MalformedContext("trailing lines".into()));
    }
    FormalContext::new(objects, attributes, incidence)
}
