//! JSON and CSV rendering of command results.

use num_bigint::BigInt;
use rubber_core::GClass;
use serde_json::{json, Number, Value};

/// A command result in both shapes: a JSON value for the `result` field and
/// a flat table for CSV.
#[derive(Clone, Debug)]
pub struct Report {
    pub result: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(result: Value, header: &[&'static str], rows: Vec<Vec<String>>) -> Self {
        Self { result, header: header.to_vec(), rows }
    }

    /// `{"command", "input", "result", "timing_ms"}` on one line.
    pub fn to_json(&self, command: &str, input: Value, timing_ms: f64) -> String {
        let body = json!({
            "command": command,
            "input": input,
            "result": self.result,
            "timing_ms": timing_ms,
        });
        format!("{body}\n")
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is built from UTF-8 strings"))
    }
}

/// An exact JSON number for an arbitrary-size integer.
pub fn big(n: &BigInt) -> Value {
    Value::Number(n.to_string().parse::<Number>().expect("decimal integers are valid JSON numbers"))
}

/// A class as its coefficient list, lowest degree first.
pub fn class_json(c: &GClass) -> Value {
    Value::Array(c.coeffs().iter().map(big).collect())
}

/// Inverse of [`class_json`].
pub fn class_from_json(v: &Value) -> Option<GClass> {
    let coeffs = v
        .as_array()?
        .iter()
        .map(|c| match c {
            Value::Number(n) => n.to_string().parse::<BigInt>().ok(),
            Value::String(s) => s.parse::<BigInt>().ok(),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()?;
    Some(GClass::from_coeffs(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_numbers_stay_exact() {
        let n: BigInt = "544879611875655894561850368".parse().unwrap();
        let s = big(&n).to_string();
        assert_eq!(s, "544879611875655894561850368");
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_string().parse::<BigInt>().unwrap(), n);
    }

    #[test]
    fn class_round_trip() {
        let c = GClass::from_i64(&[6, -5, 1]);
        assert_eq!(class_from_json(&class_json(&c)), Some(c));
        assert_eq!(class_from_json(&json!(["x"])), None);
    }

    #[test]
    fn csv_quotes_commas() {
        let r = Report::new(Value::Null, &["x", "euler"], vec![vec!["3,-1,-1,-1".into(), "2".into()]]);
        assert_eq!(r.to_csv().unwrap(), "x,euler\n\"3,-1,-1,-1\",2\n");
    }
}
