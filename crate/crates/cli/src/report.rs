use serde::{Deserialize, Serialize};

use finmodel::k1::ClauseReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Human,
    Json,
    Csv,
}

/// The settings a run used, echoed into its report.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trunc_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surplus: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub clause: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub config: RunConfig,
    pub items: Vec<Item>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub data: serde_json::Value,
}

impl Report {
    pub fn new(command: Vec<String>, config: RunConfig) -> Self {
        Self {
            command,
            config,
            items: Vec::new(),
            data: serde_json::Value::Null,
        }
    }

    pub fn item(&mut self, clause: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.items.push(Item {
            clause: clause.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn clauses(&mut self, prefix: &str, rep: &ClauseReport) {
        for c in &rep.clauses {
            let name = if prefix.is_empty() { c.clause.clone() } else { format!("{prefix}{}", c.clause) };
            self.item(name, c.passed, c.detail.clone());
        }
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn render(&self, format: Format, human_body: Option<&str>) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Csv => {
                let mut s = String::from("clause,passed,detail\n");
                for i in &self.items {
                    s.push_str(&format!("{},{},\"{}\"\n", i.clause, i.passed, i.detail.replace('"', "\"\"")));
                }
                s
            }
            Format::Human => {
                let mut s = String::new();
                if let Some(b) = human_body {
                    s.push_str(b);
                }
                for i in &self.items {
                    let mark = if i.passed { "ok  " } else { "FAIL" };
                    if i.detail.is_empty() {
                        s.push_str(&format!("{mark} {}\n", i.clause));
                    } else {
                        s.push_str(&format!("{mark} {}: {}\n", i.clause, i.detail));
                    }
                }
                s.push_str(if self.passed() { "passed\n" } else { "FAILED\n" });
                s
            }
        }
    }
}
