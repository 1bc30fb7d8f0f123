//! Structured output: verification reports and value tables, with text,
//! JSON and CSV renderings. JSON and CSV parse back to the same values.

use std::fmt;
use std::str::FromStr;

use gammacoh::AbelianGroup;
use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum CellValue {
    Group(AbelianGroup),
    Integer(i64),
    Flag(bool),
}

impl CellValue {
    pub fn kind(&self) -> &'static str {
        match self {
            CellValue::Group(_) => "group",
            CellValue::Integer(_) => "integer",
            CellValue::Flag(_) => "flag",
        }
    }

    pub fn parse(kind: &str, text: &str) -> Result<CellValue, CliError> {
        let bad =
            |e: &dyn fmt::Display| CliError::Output(format!("bad {kind} value {text:?}: {e}"));
        Ok(match kind {
            "group" => CellValue::Group(text.parse().map_err(|e| bad(&e))?),
            "integer" => CellValue::Integer(text.parse().map_err(|e| bad(&e))?),
            "flag" => CellValue::Flag(text.parse().map_err(|e| bad(&e))?),
            _ => return Err(CliError::Output(format!("unknown value kind {kind:?}"))),
        })
    }
}

impl From<AbelianGroup> for CellValue {
    fn from(g: AbelianGroup) -> Self {
        CellValue::Group(g)
    }
}

impl fmt::Display for CellValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellValue::Group(g) => write!(f, "{g}"),
            CellValue::Integer(i) => write!(f, "{i}"),
            CellValue::Flag(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Match,
    Mismatch,
    PaperDiscrepancyFlagged,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Match => "MATCH",
            Status::Mismatch => "MISMATCH",
            Status::PaperDiscrepancyFlagged => "PAPER_DISCREPANCY_FLAGGED",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Status, CliError> {
        match s {
            "MATCH" => Ok(Status::Match),
            "MISMATCH" => Ok(Status::Mismatch),
            "PAPER_DISCREPANCY_FLAGGED" => Ok(Status::PaperDiscrepancyFlagged),
            _ => Err(CliError::Output(format!("unknown status {s:?}"))),
        }
    }
}

/// Whether a disagreement is a failure or one of the known misprints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Exact,
    Documented,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub suite: String,
    pub m: Option<u64>,
    pub n: Option<u64>,
    pub p: Option<u64>,
    pub check: String,
    pub predicted: CellValue,
    pub computed: CellValue,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_us: Option<u64>,
}

impl Cell {
    pub fn new(
        suite: &str,
        (m, n, p): (Option<u64>, Option<u64>, Option<u64>),
        check: impl Into<String>,
        predicted: CellValue,
        computed: CellValue,
        expectation: Expectation,
    ) -> Cell {
        let status = match (predicted == computed, expectation) {
            (true, _) => Status::Match,
            (false, Expectation::Exact) => Status::Mismatch,
            (false, Expectation::Documented) => Status::PaperDiscrepancyFlagged,
        };
        Cell {
            suite: suite.to_string(),
            m,
            n,
            p,
            check: check.into(),
            predicted,
            computed,
            status,
            wall_us: None,
        }
    }

    fn location(&self) -> String {
        let mut parts = Vec::new();
        for (key, v) in [("m", self.m), ("n", self.n), ("p", self.p)] {
            if let Some(v) = v {
                parts.push(format!("{key}={v}"));
            }
        }
        if parts.is_empty() {
            "-".into()
        } else {
            parts.join(" ")
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub cells: usize,
    pub matched: usize,
    pub mismatched: usize,
    pub flagged: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub cells: Vec<Cell>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(cells: Vec<Cell>) -> VerificationReport {
        let count = |s: Status| cells.iter().filter(|c| c.status == s).count();
        let summary = Summary {
            cells: cells.len(),
            matched: count(Status::Match),
            mismatched: count(Status::Mismatch),
            flagged: count(Status::PaperDiscrepancyFlagged),
        };
        VerificationReport { cells, summary }
    }

    pub fn passed(&self) -> bool {
        self.summary.mismatched == 0
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Text => Ok(self.to_text()),
            Format::Json => to_json(self),
            Format::Csv => self.to_csv(),
        }
    }

    pub fn parse(format: Format, text: &str) -> Result<VerificationReport, CliError> {
        match format {
            Format::Json => serde_json::from_str(text).map_err(|e| CliError::Output(e.to_string())),
            Format::Csv => Self::from_csv(text),
            Format::Text => Err(CliError::Output("text output is not parsed".into())),
        }
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            out.push_str(&format!(
                "{:<18} {:<14} {:<34} predicted {} | computed {} | {}",
                c.suite,
                c.location(),
                c.check,
                c.predicted,
                c.computed,
                c.status
            ));
            if let Some(us) = c.wall_us {
                out.push_str(&format!(" | {us} us"));
            }
            out.push('\n');
        }
        let s = &self.summary;
        out.push_str(&format!(
            "summary: {} cells, {} MATCH, {} MISMATCH, {} PAPER_DISCREPANCY_FLAGGED\n",
            s.cells, s.matched, s.mismatched, s.flagged
        ));
        out
    }

    fn to_csv(&self) -> Result<String, CliError> {
        let rows = self.cells.iter().map(|c| CsvCell {
            suite: c.suite.clone(),
            m: c.m,
            n: c.n,
            p: c.p,
            check: c.check.clone(),
            predicted_kind: c.predicted.kind().into(),
            predicted: c.predicted.to_string(),
            computed_kind: c.computed.kind().into(),
            computed: c.computed.to_string(),
            status: c.status.to_string(),
            wall_us: c.wall_us,
        });
        write_csv(rows)
    }

    fn from_csv(text: &str) -> Result<VerificationReport, CliError> {
        let mut cells = Vec::new();
        for row in csv::Reader::from_reader(text.as_bytes()).deserialize::<CsvCell>() {
            let r = row.map_err(|e| CliError::Output(e.to_string()))?;
            cells.push(Cell {
                suite: r.suite,
                m: r.m,
                n: r.n,
                p: r.p,
                check: r.check,
                predicted: CellValue::parse(&r.predicted_kind, &r.predicted)?,
                computed: CellValue::parse(&r.computed_kind, &r.computed)?,
                status: r.status.parse()?,
                wall_us: r.wall_us,
            });
        }
        Ok(VerificationReport::new(cells))
    }
}

#[derive(Serialize, Deserialize)]
struct CsvCell {
    suite: String,
    m: Option<u64>,
    n: Option<u64>,
    p: Option<u64>,
    check: String,
    predicted_kind: String,
    predicted: String,
    computed_kind: String,
    computed: String,
    status: String,
    wall_us: Option<u64>,
}

/// One computed or predicted quantity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub group: String,
    pub m: Option<u64>,
    pub n: Option<u64>,
    pub p: Option<u64>,
    pub modulus: u64,
    pub quantity: String,
    pub value: CellValue,
}

/// Output of `compute` and `predict`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub rows: Vec<Row>,
}

impl Table {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Text => Ok(self.to_text()),
            Format::Json => to_json(self),
            Format::Csv => write_csv(self.rows.iter().map(|r| CsvRow {
                group: r.group.clone(),
                m: r.m,
                n: r.n,
                p: r.p,
                modulus: r.modulus,
                quantity: r.quantity.clone(),
                kind: r.value.kind().into(),
                value: r.value.to_string(),
            })),
        }
    }

    pub fn parse(format: Format, text: &str) -> Result<Table, CliError> {
        match format {
            Format::Json => serde_json::from_str(text).map_err(|e| CliError::Output(e.to_string())),
            Format::Csv => {
                let mut rows = Vec::new();
                for row in csv::Reader::from_reader(text.as_bytes()).deserialize::<CsvRow>() {
                    let r = row.map_err(|e| CliError::Output(e.to_string()))?;
                    rows.push(Row {
                        group: r.group,
                        m: r.m,
                        n: r.n,
                        p: r.p,
                        modulus: r.modulus,
                        quantity: r.quantity,
                        value: CellValue::parse(&r.kind, &r.value)?,
                    });
                }
                Ok(Table { rows })
            }
            Format::Text => Err(CliError::Output("text output is not parsed".into())),
        }
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&r.group);
            for (key, v) in [("m", r.m), ("n", r.n), ("p", r.p)] {
                if let Some(v) = v {
                    out.push_str(&format!(" {key}={v}"));
                }
            }
            if r.modulus != 0 {
                out.push_str(&format!(" mod {}", r.modulus));
            }
            out.push_str(&format!(" {} = {}\n", r.quantity, r.value));
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    group: String,
    m: Option<u64>,
    n: Option<u64>,
    p: Option<u64>,
    modulus: u64,
    quantity: String,
    kind: String,
    value: String,
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write_csv<T: Serialize>(rows: impl Iterator<Item = T>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| CliError::Output(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> VerificationReport {
        let g = |s: &str| CellValue::Group(s.parse().unwrap());
        VerificationReport::new(vec![
            Cell::new(
                "h1-torsion",
                (Some(2), Some(2), None),
                "torsion",
                g("Z/2 + Z/4 + Z/4"),
                g("Z/2 + Z/4 + Z/4"),
                Expectation::Exact,
            ),
            Cell::new(
                "h1-rank",
                (Some(2), Some(2), None),
                "rational rank",
                CellValue::Integer(0),
                CellValue::Integer(3),
                Expectation::Documented,
            ),
            Cell::new(
                "series",
                (None, Some(4), None),
                "identity",
                CellValue::Flag(true),
                CellValue::Flag(false),
                Expectation::Exact,
            ),
            Cell::new(
                "h1-torsion",
                (Some(3), Some(1), None),
                "torsion",
                g("0"),
                CellValue::Integer(0),
                Expectation::Exact,
            ),
        ])
    }

    #[test]
    fn statuses_and_summary() {
        let r = sample();
        let st: Vec<_> = r.cells.iter().map(|c| c.status).collect();
        assert_eq!(
            st,
            vec![
                Status::Match,
                Status::PaperDiscrepancyFlagged,
                Status::Mismatch,
                Status::Mismatch
            ]
        );
        assert_eq!(
            r.summary,
            Summary {
                cells: 4,
                matched: 1,
                mismatched: 2,
                flagged: 1
            }
        );
        assert!(!r.passed());
    }

    #[test]
    fn round_trips() {
        let mut r = sample();
        r.cells[0].wall_us = Some(17);
        for f in [Format::Json, Format::Csv] {
            assert_eq!(
                VerificationReport::parse(f, &r.render(f).unwrap()).unwrap(),
                r
            );
        }
        assert!(VerificationReport::parse(Format::Text, "").is_err());
    }

    #[test]
    fn json_schema() {
        let r = sample();
        let v: serde_json::Value = serde_json::from_str(&r.render(Format::Json).unwrap()).unwrap();
        let c = &v["cells"][0];
        assert_eq!(c["status"], "MATCH");
        assert_eq!(c["predicted"]["kind"], "group");
        assert_eq!(c["predicted"]["value"]["free_rank"], 0);
        assert_eq!(
            c["predicted"]["value"]["invariant_factors"],
            serde_json::json!([2, 4, 4])
        );
        assert!(c.get("wall_us").is_none());
    }

    #[test]
    fn text_lines() {
        let t = sample().render(Format::Text).unwrap();
        assert!(t.lines().next().unwrap().ends_with("| MATCH"));
        assert!(t.ends_with("summary: 4 cells, 1 MATCH, 2 MISMATCH, 1 PAPER_DISCREPANCY_FLAGGED\n"));
    }

    fn value() -> impl Strategy<Value = CellValue> {
        prop_oneof![
            any::<i64>().prop_map(CellValue::Integer),
            any::<bool>().prop_map(CellValue::Flag),
            (0usize..4, proptest::collection::vec(1u64..50, 0..4)).prop_map(|(r, ds)| {
                CellValue::Group(AbelianGroup::from_cyclic_orders(
                    r,
                    ds.into_iter().map(Into::into),
                ))
            }),
        ]
    }

    proptest! {
        #[test]
        fn table_round_trip(rows in proptest::collection::vec((value(), proptest::option::of(0u64..20), 0u64..5), 0..6)) {
            let t = Table {
                rows: rows
                    .into_iter()
                    .map(|(value, n, modulus)| Row {
                        group: "gamma".into(),
                        m: Some(3),
                        n,
                        p: None,
                        modulus,
                        quantity: "H^1, with comma".into(),
                        value,
                    })
                    .collect(),
            };
            for f in [Format::Json, Format::Csv] {
                prop_assert_eq!(&Table::parse(f, &t.render(f).unwrap()).unwrap(), &t);
            }
        }
    }
}
