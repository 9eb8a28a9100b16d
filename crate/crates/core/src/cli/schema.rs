//! CSV ingestion.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::{validate_dataset, Dataset, SaleObservation};
use crate::error::{Error, RecordIssue, Result};

/// Where painting size comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeColumns {
    Area(String),
    /// Area is `height × width`; the aspect ratio defaults to `height / width`.
    Dimensions {
        height: String,
        width: String,
    },
}

/// Column mapping and number format of an input file.
///
/// Without a header row, column names are 0-based column positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSchema {
    pub id: String,
    pub period: String,
    pub price: String,
    pub size: SizeColumns,
    pub aspect_ratio: Option<String>,
    #[serde(default)]
    pub extra: Vec<String>,
    pub delimiter: char,
    pub decimal_separator: char,
    pub has_header: bool,
    #[serde(default)]
    pub period_order: Option<Vec<String>>,
}

impl Default for InputSchema {
    /// Layout of the bundled auction fixture.
    fn default() -> Self {
        Self {
            id: "id".into(),
            period: "dataset".into(),
            price: "price_usd".into(),
            size: SizeColumns::Area("area_cm2".into()),
            aspect_ratio: Some("hw_ratio".into()),
            extra: Vec::new(),
            delimiter: ',',
            decimal_separator: '.',
            has_header: true,
            period_order: None,
        }
    }
}

impl InputSchema {
    fn validate(&self) -> Result<()> {
        if self.decimal_separator != '.' && self.decimal_separator != ',' {
            return Err(Error::InvalidArgument(format!(
                "decimal separator must be '.' or ',', got {:?}",
                self.decimal_separator
            )));
        }
        if self.decimal_separator == self.delimiter {
            return Err(Error::InvalidArgument(
                "decimal separator and field delimiter must differ".into(),
            ));
        }
        if !self.delimiter.is_ascii() {
            return Err(Error::InvalidArgument(
                "field delimiter must be ASCII".into(),
            ));
        }
        if matches!(self.size, SizeColumns::Area(_)) && self.aspect_ratio.is_none() {
            return Err(Error::InvalidArgument(
                "an aspect-ratio column is required when area is given directly".into(),
            ));
        }
        Ok(())
    }

    fn parse_number(&self, raw: &str) -> Option<f64> {
        let cleaned: String = raw
            .trim()
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .collect();
        let normalized = if self.decimal_separator == ',' {
            cleaned.replace('.', "").replace(',', ".")
        } else {
            cleaned.replace(',', "")
        };
        normalized.parse().ok()
    }
}

struct Columns {
    positions: HashMap<String, usize>,
}

impl Columns {
    fn find(&self, name: &str, path: &str) -> Result<usize> {
        self.positions
            .get(name)
            .copied()
            .ok_or_else(|| Error::Input {
                path: path.to_string(),
                message: format!("missing column {name:?}"),
            })
    }
}

/// Reads a sale-record CSV file and validates it.
pub fn load_csv(path: impl AsRef<Path>, schema: &InputSchema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    read_csv(file, schema, &path.display().to_string())
}

/// Like [`load_csv`] for any reader; `source` names it in errors.
pub fn read_csv(reader: impl Read, schema: &InputSchema, source: &str) -> Result<Dataset> {
    schema.validate()?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter as u8)
        .has_headers(schema.has_header)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let input_err = |message: String| Error::Input {
        path: source.to_string(),
        message,
    };

    let headers = if schema.has_header {
        Some(rdr.headers().map_err(|e| input_err(e.to_string()))?.clone())
    } else {
        None
    };
    let mut records = rdr.records().peekable();
    let positions: HashMap<String, usize> = if let Some(h) = headers {
        h.iter()
            .enumerate()
            .map(|(i, n)| (n.to_string(), i))
            .collect()
    } else {
        let width = match records.peek() {
            Some(Ok(r)) => r.len(),
            _ => 0,
        };
        (0..width).map(|i| (i.to_string(), i)).collect()
    };
    let cols = Columns { positions };

    let id_col = cols.find(&schema.id, source)?;
    let period_col = cols.find(&schema.period, source)?;
    let price_col = cols.find(&schema.price, source)?;
    let size_cols = match &schema.size {
        SizeColumns::Area(a) => (cols.find(a, source)?, None),
        SizeColumns::Dimensions { height, width } => {
            (cols.find(height, source)?, Some(cols.find(width, source)?))
        }
    };
    let ratio_col = match &schema.aspect_ratio {
        Some(r) => Some(cols.find(r, source)?),
        None => None,
    };
    let extra_cols: Vec<(String, usize)> = schema
        .extra
        .iter()
        .map(|n| cols.find(n, source).map(|i| (n.clone(), i)))
        .collect::<Result<_>>()?;

    let mut observations = Vec::new();
    let mut row_of_id: HashMap<String, usize> = HashMap::new();
    let mut issues = Vec::new();
    let header_lines = usize::from(schema.has_header);

    for (i, rec) in records.enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| input_err(format!("row {row}: {e}")))?;
        let cell = |col: usize| rec.get(col).unwrap_or("");
        let mut row_issues = Vec::new();
        let mut number = |col: usize, name: &str| -> f64 {
            match schema.parse_number(cell(col)) {
                Some(v) => v,
                None => {
                    row_issues.push(format!(
                        "row {row} (line {}), column {name}: cannot parse {:?} as a number",
                        row + header_lines,
                        cell(col)
                    ));
                    f64::NAN
                }
            }
        };

        let price = number(price_col, &schema.price);
        let (area, derived_ratio) = match (&schema.size, size_cols) {
            (SizeColumns::Area(name), (a, None)) => (number(a, name), None),
            (SizeColumns::Dimensions { height, width }, (h, Some(w))) => {
                let hv = number(h, height);
                let wv = number(w, width);
                (hv * wv, Some(hv / wv))
            }
            _ => unreachable!("size columns match the schema"),
        };
        let aspect_ratio = match (ratio_col, derived_ratio) {
            (Some(c), _) => number(c, schema.aspect_ratio.as_deref().unwrap_or("aspect_ratio")),
            (None, Some(r)) => r,
            (None, None) => unreachable!("schema validation requires a ratio source"),
        };
        let mut extra = BTreeMap::new();
        for (name, col) in &extra_cols {
            extra.insert(name.clone(), number(*col, name));
        }

        if !row_issues.is_empty() {
            issues.extend(row_issues.into_iter().map(|message| RecordIssue {
                id: None,
                row: None,
                message,
            }));
            continue;
        }
        let id = cell(id_col).to_string();
        row_of_id.entry(id.clone()).or_insert(row);
        observations.push(SaleObservation {
            id,
            period: cell(period_col).to_string(),
            price,
            area,
            aspect_ratio,
            extra,
        });
    }

    if !issues.is_empty() {
        return Err(Error::InvalidRecords(issues));
    }
    validate_dataset(observations, schema.period_order.as_deref()).map_err(|e| match e {
        Error::InvalidRecords(issues) => Error::InvalidRecords(
            issues
                .into_iter()
                .map(|mut issue| {
                    if issue.row.is_none() {
                        issue.row = issue.id.as_ref().and_then(|id| row_of_id.get(id).copied());
                    }
                    issue
                })
                .collect(),
        ),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "id,dataset,price_usd,area_cm2,hw_ratio\n\
                          1,A,100,10,1.0\n\
                          2,A,200,20,0.5\n\
                          3,B,abc,30,1.5\n";

    #[test]
    fn bad_number_names_row_and_column() {
        let err = read_csv(SAMPLE.as_bytes(), &InputSchema::default(), "sample.csv").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 3") && msg.contains("price_usd"), "{msg}");
    }

    #[test]
    fn dimensions_give_area_and_ratio() {
        let text = "code;when;hammer;h;w\nx1;1990;1.000,5;20;40\nx2;1991;2.500;30,5;10\n";
        let schema = InputSchema {
            id: "code".into(),
            period: "when".into(),
            price: "hammer".into(),
            size: SizeColumns::Dimensions {
                height: "h".into(),
                width: "w".into(),
            },
            aspect_ratio: None,
            delimiter: ';',
            decimal_separator: ',',
            ..InputSchema::default()
        };
        let ds = read_csv(text.as_bytes(), &schema, "dims.csv").unwrap();
        let first = &ds.observations()[0];
        assert_eq!(first.price, 1000.5);
        assert_eq!(first.area, 800.0);
        assert_eq!(first.aspect_ratio, 0.5);
        assert_eq!(ds.observations()[1].area, 305.0);
        assert_eq!(ds.periods(), ["1990", "1991"]);
    }

    #[test]
    fn missing_column_reported() {
        let text = "id,dataset,price_usd,hw_ratio\n1,A,3,1\n";
        let err = read_csv(text.as_bytes(), &InputSchema::default(), "x.csv").unwrap_err();
        assert!(
            err.to_string().contains("missing column \"area_cm2\""),
            "{err}"
        );
    }

    #[test]
    fn validation_errors_carry_rows() {
        let text = "id,dataset,price_usd,area_cm2,hw_ratio\n1,A,3,1,1\n2,A,-3,1,1\n1,B,3,1,1\n";
        match read_csv(text.as_bytes(), &InputSchema::default(), "x.csv").unwrap_err() {
            Error::InvalidRecords(issues) => {
                assert_eq!(issues[0].row, Some(2));
                assert!(issues.iter().any(|i| i.message.contains("duplicate")));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn headerless_uses_positions() {
        let text = "1,A,100,10,1\n2,B,300,10,1\n";
        let schema = InputSchema {
            id: "0".into(),
            period: "1".into(),
            price: "2".into(),
            size: SizeColumns::Area("3".into()),
            aspect_ratio: Some("4".into()),
            has_header: false,
            ..InputSchema::default()
        };
        let ds = read_csv(text.as_bytes(), &schema, "x.csv").unwrap();
        assert_eq!(ds.len(), 2);
    }

    #[test]
    fn extra_characteristics_loaded() {
        let text = "id,dataset,price_usd,area_cm2,hw_ratio,year_painted\n1,A,3,1,1,1880\n";
        let schema = InputSchema {
            extra: vec!["year_painted".into()],
            ..InputSchema::default()
        };
        let ds = read_csv(text.as_bytes(), &schema, "x.csv").unwrap();
        assert_eq!(ds.observations()[0].extra["year_painted"], 1880.0);
    }
}
