//! Run reports: one structured document per invocation.

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Violated,
    /// The check does not apply to this input (e.g. a precondition fails).
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub claim: String,
    pub method: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Certificate {
    pub fn new(claim: impl Into<String>, method: impl Into<String>, ok: bool) -> Self {
        Certificate { claim: claim.into(), method: method.into(), verdict: if ok { Verdict::Verified } else { Verdict::Violated }, detail: None }
    }

    pub fn skipped(claim: impl Into<String>, method: impl Into<String>, why: impl Into<String>) -> Self {
        Certificate { claim: claim.into(), method: method.into(), verdict: Verdict::Skipped, detail: Some(why.into()) }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub results: Vec<Value>,
    pub certificates: Vec<Certificate>,
    /// Wall-clock seconds; only present when requested, since it breaks byte-identical output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<f64>,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport { command, results: Vec::new(), certificates: Vec::new(), timing: None }
    }

    pub fn violated(&self) -> bool {
        self.certificates.iter().any(|c| c.verdict == Verdict::Violated)
    }

    pub fn exit_code(&self) -> i32 {
        if self.violated() {
            2
        } else {
            0
        }
    }

    pub fn to_record(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let words: Vec<String> = self.command.iter().map(|w| shell_word(w)).collect();
        let mut s = format!("$ stpart {}\n", words.join(" "));
        for r in &self.results {
            text_value(r, 0, &mut s);
        }
        for c in &self.certificates {
            let v = match c.verdict {
                Verdict::Verified => "verified",
                Verdict::Violated => "VIOLATED",
                Verdict::Skipped => "skipped",
            };
            s.push_str(&format!("[{}] {} ({})", v, c.claim, c.method));
            if let Some(d) = &c.detail {
                s.push_str(&format!(": {}", d));
            }
            s.push('\n');
        }
        if let Some(t) = self.timing {
            s.push_str(&format!("time: {:.3}s\n", t));
        }
        s
    }
}

fn text_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{}{}:\n", pad, k));
                        text_value(x, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{}{}: {}\n", pad, k, scalar(x))),
                }
            }
        }
        Value::Array(xs) => {
            for x in xs {
                match x {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{}-\n", pad));
                        text_value(x, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{}- {}\n", pad, scalar(x))),
                }
            }
        }
        x => out.push_str(&format!("{}{}\n", pad, scalar(x))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        x => x.to_string(),
    }
}

fn shell_word(w: &str) -> String {
    let plain = !w.is_empty() && w.chars().all(|c| c.is_ascii_alphanumeric() || "-_.,/:=+".contains(c));
    if plain {
        w.to_string()
    } else {
        format!("'{}'", w.replace('\'', "'\\''"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn exit_codes_follow_verdicts() {
        let mut r = RunReport::new(vec![String::from("st")]);
        r.results.push(json!({"st": "0 <= x"}));
        r.certificates.push(Certificate::new("closed", "closure check", true));
        assert_eq!(r.exit_code(), 0);
        r.certificates.push(Certificate::skipped("measure", "quadrature", "unbounded"));
        assert_eq!(r.exit_code(), 0);
        r.certificates.push(Certificate::new("refines", "common CAD", false));
        assert_eq!(r.exit_code(), 2);
        assert!(r.to_record().contains("\"verdict\": \"violated\""));
        assert!(!r.to_record().contains("timing"));
        assert!(r.to_text().contains("[VIOLATED] refines"));
    }
}
