//! CSV and JSON rendering with a fixed nine-significant-digit number format.

use serde_json::{Map, Value};

/// `%.9g`-style rendering: shortest of fixed or scientific, trailing zeros trimmed,
/// always with '.' as the decimal separator.
pub fn fmt_g9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_g9(*v),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // Round-trip through the text form so both encodings carry the same value.
            Cell::Num(v) => num(*v),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

pub(crate) fn num(v: f64) -> Value {
    let rounded: f64 = fmt_g9(v).parse().unwrap_or(v);
    serde_json::Number::from_f64(rounded)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, meta: Map<String, Value>) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let mut data = Map::new();
        data.insert(
            "columns".into(),
            Value::Array(self.columns.iter().cloned().map(Value::from).collect()),
        );
        data.insert("rows".into(), Value::Array(rows));
        let mut top = Map::new();
        top.insert("meta".into(), Value::Object(meta));
        top.insert("data".into(), Value::Object(data));
        let mut s = Value::Object(top).to_string();
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_g9(0.0), "0");
        assert_eq!(fmt_g9(-0.0), "0");
        assert_eq!(fmt_g9(10.0), "10");
        assert_eq!(fmt_g9(0.808_616_517_465_501_8), "0.808616517");
        assert_eq!(fmt_g9(3.234_464_069_862_007), "3.23446407");
        assert_eq!(fmt_g9(-1.472_915_371_676_726), "-1.47291537");
        assert_eq!(fmt_g9(123_456_789.4), "123456789");
        assert_eq!(fmt_g9(1_234_567_891.0), "1.23456789e9");
        assert_eq!(fmt_g9(1.5e-7), "1.5e-7");
        assert_eq!(fmt_g9(0.000_123_4), "0.0001234");
        assert_eq!(fmt_g9(9.999_999_999), "10");
    }

    #[test]
    fn parse_back_is_within_half_ulp_of_nine_digits() {
        for v in [
            1.0 / 3.0,
            -2.0f64.sqrt() * 1e-12,
            6.02214076e23,
            0.1,
            4.2e-5,
        ] {
            let back: f64 = fmt_g9(v).parse().unwrap();
            assert!(((back - v) / v).abs() < 5e-9, "{v}");
        }
    }

    #[test]
    fn csv_and_json_carry_the_same_values() {
        let mut t = Table::new(vec!["n".into(), "parity".into(), "E".into()]);
        t.push(vec![
            Cell::Int(0),
            Cell::Text("even".into()),
            Cell::Num(0.808_616_517_465),
        ]);
        let csv = t.to_csv();
        assert_eq!(csv, "n,parity,E\n0,even,0.808616517\n");
        let json: Value = serde_json::from_str(&t.to_json(Map::new())).unwrap();
        assert_eq!(json["data"]["rows"][0][2].as_f64().unwrap(), 0.808616517);
    }
}
