use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tree::sample::Sample;

/// A column addressed by header name or zero-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
    /// The rightmost column.
    Last,
}

impl FromStr for ColumnRef {
    type Err = std::convert::Infallible;

    /// All-digit strings are positions, anything else is a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(s.to_string()),
        })
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnRef::Index(i) => write!(f, "#{i}"),
            ColumnRef::Name(n) => write!(f, "{n:?}"),
            ColumnRef::Last => f.write_str("last column"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    pub has_header: bool,
    pub delimiter: u8,
    pub label: ColumnRef,
    /// Feature columns in order. Empty means every column except the label.
    pub features: Vec<ColumnRef>,
    /// Feature columns holding categories rather than numbers.
    pub categorical: Vec<ColumnRef>,
    /// Upper bound on the number of distinct labels.
    pub max_classes: Option<usize>,
    /// Take labels as literal class codes (`0`, `1`, ...) instead of coding
    /// them by first appearance. Keeps codes stable across files.
    pub numeric_labels: bool,
}

impl CsvSchema {
    pub fn new(label: ColumnRef) -> Self {
        Self {
            has_header: false,
            delimiter: b',',
            label,
            features: Vec::new(),
            categorical: Vec::new(),
            max_classes: None,
            numeric_labels: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvDataset<F> {
    pub samples: Vec<Sample<F>>,
    /// Original label text, indexed by class code.
    pub label_names: Vec<String>,
    pub feature_names: Vec<String>,
}

impl<F> CsvDataset<F> {
    pub fn dims(&self) -> usize {
        self.feature_names.len()
    }

    pub fn classes(&self) -> usize {
        self.label_names.len()
    }
}

/// First-appearance ordinal coding.
#[derive(Default)]
struct Codebook {
    codes: HashMap<String, usize>,
    names: Vec<String>,
}

impl Codebook {
    fn code(&mut self, value: &str) -> usize {
        if let Some(&c) = self.codes.get(value) {
            return c;
        }
        let c = self.names.len();
        self.codes.insert(value.to_string(), c);
        self.names.push(value.to_string());
        c
    }
}

enum Column {
    Numeric(usize),
    Categorical(usize, Codebook),
}

fn resolve(col: &ColumnRef, header: Option<&csv::StringRecord>, width: usize) -> Result<usize> {
    let idx = match col {
        ColumnRef::Index(i) => Some(*i),
        ColumnRef::Name(name) => header.and_then(|h| h.iter().position(|f| f.trim() == name)),
        ColumnRef::Last => width.checked_sub(1),
    };
    match idx {
        Some(i) if i < width => Ok(i),
        _ => Err(Error::MissingColumn(col.to_string())),
    }
}

/// Reads a delimited file into training samples, in file order.
pub fn load_csv<F: Scalar>(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<CsvDataset<F>> {
    let path = path.as_ref();
    let located = |line: u64, msg: String| Error::Csv {
        path: PathBuf::from(path),
        line,
        msg,
    };
    let file = File::open(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(schema.delimiter)
        .flexible(true)
        .from_reader(file);
    let mut records = reader.records();

    let mut header = None;
    let mut first = None;
    if schema.has_header {
        match records.next() {
            Some(rec) => header = Some(rec.map_err(|e| located(1, e.to_string()))?),
            None => return Err(located(1, "missing header row".into())),
        }
    } else {
        first = records
            .next()
            .transpose()
            .map_err(|e| located(1, e.to_string()))?;
    }
    let width = match (&header, &first) {
        (Some(h), _) => h.len(),
        (None, Some(r)) => r.len(),
        (None, None) => 0,
    };

    let label_idx = resolve(&schema.label, header.as_ref(), width)?;
    let feature_idx: Vec<usize> = if schema.features.is_empty() {
        (0..width).filter(|&i| i != label_idx).collect()
    } else {
        schema
            .features
            .iter()
            .map(|c| resolve(c, header.as_ref(), width))
            .collect::<Result<_>>()?
    };
    let categorical: Vec<usize> = schema
        .categorical
        .iter()
        .map(|c| resolve(c, header.as_ref(), width))
        .collect::<Result<_>>()?;
    let mut columns: Vec<Column> = feature_idx
        .iter()
        .map(|&i| {
            if categorical.contains(&i) {
                Column::Categorical(i, Codebook::default())
            } else {
                Column::Numeric(i)
            }
        })
        .collect();
    let feature_names = feature_idx
        .iter()
        .map(|&i| match &header {
            Some(h) => h[i].trim().to_string(),
            None => format!("c{i}"),
        })
        .collect();

    let mut labels = Codebook::default();
    let mut max_code: Option<usize> = None;
    let mut samples = Vec::new();
    for rec in first.into_iter().map(Ok).chain(records) {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            located(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        if rec.len() != width {
            return Err(located(
                line,
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        let mut features = Vec::with_capacity(columns.len());
        for col in columns.iter_mut() {
            let v = match col {
                Column::Numeric(i) => {
                    let raw = rec[*i].trim();
                    let x: F = raw.parse().map_err(|_| {
                        located(line, format!("column {i}: {raw:?} is not a number"))
                    })?;
                    if !x.is_finite() {
                        return Err(located(line, format!("column {i}: non-finite value")));
                    }
                    x
                }
                Column::Categorical(i, book) => F::of(book.code(rec[*i].trim()) as f64),
            };
            features.push(v);
        }
        let raw_label = rec[label_idx].trim();
        let label = if schema.numeric_labels {
            let code: usize = raw_label
                .parse()
                .map_err(|_| located(line, format!("label {raw_label:?} is not a class code")))?;
            max_code = max_code.max(Some(code));
            code
        } else {
            labels.code(raw_label)
        };
        if let Some(max) = schema.max_classes {
            let seen = max_code.map_or(labels.names.len(), |c| c + 1);
            if seen > max {
                return Err(located(
                    line,
                    format!(
                        "label {:?} exceeds the {max} allowed classes",
                        &rec[label_idx]
                    ),
                ));
            }
        }
        samples.push(Sample::train(features, label));
    }

    let label_names = match max_code {
        Some(c) => (0..=c).map(|k| k.to_string()).collect(),
        None => labels.names,
    };
    Ok(CsvDataset {
        samples,
        label_names,
        feature_names,
    })
}

/// Writes samples as headerless CSV rows: features, then the label code.
/// Floats use their shortest round-trip representation.
pub fn write_csv<F: Scalar>(path: impl AsRef<Path>, samples: &[Sample<F>]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path.as_ref())
        .map_err(csv_io)?;
    let mut row: Vec<String> = Vec::new();
    for s in samples {
        row.clear();
        row.extend(s.features.iter().map(|x| x.to_string()));
        row.push(s.label.to_string());
        writer.write_record(&row).map_err(csv_io)?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}
