use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Report schema identifier.
pub const SCHEMA: &str = "pru-lab/1";

/// CSV header, one row per check.
pub const CSV_COLUMNS: [&str; 9] = [
    "check_id", "n", "t", "dim_e", "measured", "bound", "pass", "seed", "wall_ms",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `measured <= bound`
    AtMost,
    /// `measured >= bound`
    AtLeast,
    /// `measured == bound` exactly (integer identities).
    Equal,
}

impl Relation {
    pub fn holds(self, measured: f64, bound: f64) -> bool {
        if !measured.is_finite() || !bound.is_finite() {
            return false;
        }
        match self {
            Relation::AtMost => measured <= bound,
            Relation::AtLeast => measured >= bound,
            Relation::Equal => measured == bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckParams {
    /// Qubits per register when `d` is a power of two.
    pub n: Option<usize>,
    pub d: usize,
    pub t: usize,
    pub dim_e: usize,
}

impl CheckParams {
    pub fn new(d: usize, t: usize, dim_e: usize) -> Self {
        Self {
            n: (d.is_power_of_two() && d > 1).then(|| d.trailing_zeros() as usize),
            d,
            t,
            dim_e,
        }
    }
}

/// One checked inequality or identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub params: CheckParams,
    pub measured: f64,
    pub bound: f64,
    pub relation: Relation,
    /// How `bound` is obtained.
    pub formula: String,
    /// The statement the check comes from.
    pub source: String,
    pub pass: bool,
    pub seed: Option<u64>,
    pub wall_ms: Option<f64>,
}

impl CheckRecord {
    pub fn new(
        check_id: impl Into<String>,
        params: CheckParams,
        measured: f64,
        bound: f64,
        relation: Relation,
        formula: impl Into<String>,
        source: impl Into<String>,
    ) -> Self {
        Self {
            check_id: check_id.into(),
            params,
            measured,
            bound,
            relation,
            formula: formula.into(),
            source: source.into(),
            pass: relation.holds(measured, bound),
            seed: None,
            wall_ms: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// A named computed value that is not itself a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub params: CheckParams,
    pub value: f64,
    pub formula: Option<String>,
}

/// Per-partition deficit `1 - Tr Λ^{(λ)} / dim W_λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeficitEntry {
    pub d: usize,
    pub t: usize,
    pub partition: crate::symgroup::Partition,
    /// Exact value as `num/den`.
    pub exact: String,
    pub value: f64,
    pub tr_distinct_block: u128,
    pub tr_weyl: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub quantities: Vec<Quantity>,
    pub deficits: Vec<DeficitEntry>,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
    pub wall_ms: Option<f64>,
}

impl ExperimentReport {
    pub fn new(command: impl Into<String>, config: serde_json::Value, seed: u64) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            command: command.into(),
            config,
            seed,
            quantities: Vec::new(),
            deficits: Vec::new(),
            checks: Vec::new(),
            passed: true,
            wall_ms: None,
        }
    }

    pub fn push_check(&mut self, check: CheckRecord) {
        self.passed &= check.pass;
        self.checks.push(check);
    }

    pub fn push_quantity(
        &mut self,
        name: impl Into<String>,
        params: CheckParams,
        value: f64,
        formula: Option<&str>,
    ) {
        self.quantities.push(Quantity {
            name: name.into(),
            params,
            value,
            formula: formula.map(str::to_string),
        });
    }

    /// Appends another report's records.
    pub fn absorb(&mut self, other: ExperimentReport) {
        self.quantities.extend(other.quantities);
        self.deficits.extend(other.deficits);
        for c in other.checks {
            self.push_check(c);
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// The same report with every timing field cleared.
    pub fn without_timings(mut self) -> Self {
        self.wall_ms = None;
        for c in &mut self.checks {
            c.wall_ms = None;
        }
        self
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| LabError::domain(format!("JSON encoding failed: {e}")))
    }

    /// One row per check with the columns in [`CSV_COLUMNS`]. Numbers are
    /// formatted exactly as in the JSON output.
    pub fn to_csv(&self) -> Result<String> {
        let err = |e: &dyn std::fmt::Display| LabError::domain(format!("CSV encoding failed: {e}"));
        let num = |x: f64| serde_json::to_string(&x).map_err(|e| err(&e));
        let opt = |x: Option<String>| x.unwrap_or_default();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS).map_err(|e| err(&e))?;
        for c in &self.checks {
            w.write_record([
                c.check_id.clone(),
                opt(c.params.n.map(|n| n.to_string())),
                c.params.t.to_string(),
                c.params.dim_e.to_string(),
                num(c.measured)?,
                num(c.bound)?,
                c.pass.to_string(),
                opt(c.seed.map(|s| s.to_string())),
                opt(c.wall_ms.map(num).transpose()?),
            ])
            .map_err(|e| err(&e))?;
        }
        let bytes = w.into_inner().map_err(|e| err(&e))?;
        String::from_utf8(bytes).map_err(|e| err(&e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_semantics() {
        assert!(Relation::AtMost.holds(1.0, 1.0));
        assert!(!Relation::AtMost.holds(f64::NAN, 1.0));
        assert!(Relation::AtLeast.holds(2.0, 1.0));
        assert!(!Relation::Equal.holds(1.0, 1.0 + 1e-15));
    }

    #[test]
    fn csv_matches_json_numerics() {
        let mut r = ExperimentReport::new("verify", serde_json::json!({}), 3);
        r.push_check(
            CheckRecord::new(
                "a",
                CheckParams::new(4, 2, 1),
                0.1 + 0.2,
                1e-8,
                Relation::AtMost,
                "f",
                "s",
            )
            .with_seed(3),
        );
        r.push_check(CheckRecord::new(
            "b",
            CheckParams::new(3, 2, 2),
            7.0,
            6.0,
            Relation::AtMost,
            "f",
            "s",
        ));
        assert!(!r.passed);
        let json: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        let csv = r.to_csv().unwrap();
        let mut rows = csv::Reader::from_reader(csv.as_bytes());
        for (row, check) in rows.records().zip(json["checks"].as_array().unwrap()) {
            let row = row.unwrap();
            assert_eq!(
                row[4].parse::<f64>().unwrap(),
                check["measured"].as_f64().unwrap()
            );
            assert_eq!(&row[4], serde_json::to_string(&check["measured"]).unwrap());
        }
        assert!(csv.starts_with("check_id,n,t,dim_e,measured,bound,pass,seed,wall_ms\n"));
        assert!(csv.contains("b,,2,2,7.0,6.0,false,,"));
    }
}
