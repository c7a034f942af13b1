//! Report documents.
//!
//! A report is an ordered list of `key value` fields with stable names. The
//! machine format is one field per line; the human format is the same fields
//! as an aligned table. Machine reports parse back losslessly, so golden
//! files can be diffed and regression-checked.

use std::fmt::Display;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    fields: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        let key = key.into();
        let value = value.to_string();
        debug_assert!(!key.contains(' '), "field keys must not contain spaces");
        debug_assert!(!value.contains('\n'), "field values must be single-line");
        self.fields.push((key, value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    /// One `key value` line per field.
    pub fn emit_machine(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.fields {
            out.push_str(k);
            if !v.is_empty() {
                out.push(' ');
                out.push_str(v);
            }
            out.push('\n');
        }
        out
    }

    /// The same fields, keys left-aligned.
    pub fn emit_human(&self) -> String {
        let width = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.fields {
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
        out
    }

    /// Parses a machine document back into a report.
    pub fn parse_machine(text: &str) -> Result<Report, String> {
        let mut fields = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match line.split_once(' ') {
                Some((k, v)) => fields.push((k.to_string(), v.to_string())),
                None => {
                    if line.contains(['\t']) {
                        return Err(format!("line {}: malformed field", i + 1));
                    }
                    fields.push((line.to_string(), String::new()));
                }
            }
        }
        Ok(Report { fields })
    }

    /// The machine document with the timing field removed, for golden
    /// comparisons.
    pub fn emit_machine_without_timing(&self) -> String {
        let mut copy = self.clone();
        copy.fields.retain(|(k, _)| k != "timing_ms");
        copy.emit_machine()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn machine_round_trip_is_exact() {
        let mut r = Report::new();
        r.push("qduo.version", "0.1.0");
        r.push("scenario.ring", "triangular 2 (gf 2 1)");
        r.push("verdict.quasi_duo", "yes");
        r.push("timing_ms", "1.234");
        let text = r.emit_machine();
        let back = Report::parse_machine(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.emit_machine(), text);
    }

    #[test]
    fn human_format_carries_the_same_fields() {
        let mut r = Report::new();
        r.push("a.key", "value one");
        r.push("longer.key.name", 42);
        let human = r.emit_human();
        assert!(human.contains("a.key"));
        assert!(human.contains("value one"));
        assert!(human.contains("42"));
    }

    #[test]
    fn timing_is_stripped_for_goldens() {
        let mut r = Report::new();
        r.push("x", 1);
        r.push("timing_ms", "9.9");
        assert_eq!(r.emit_machine_without_timing(), "x 1\n");
    }
}
