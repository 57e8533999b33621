//! Deterministic CSV and JSON writers.
//!
//! Contract: '.' decimal separator, '\n' line endings, a header row on every
//! CSV table, every number serialized with 17 significant digits, and key
//! order fixed by insertion so identical runs are byte-identical (the
//! timestamp field is the one exception callers exclude from comparisons).

use std::io::Write;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits, locale-independent.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A table with a mandatory header row.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Ordered experiment output: metadata, scalar results, optional table.
pub struct ExperimentOutput {
    pub experiment: String,
    pub seed: u64,
    pub params: Vec<(String, f64)>,
    pub flags: Vec<(String, String)>,
    pub scalars: Vec<(String, f64)>,
    pub table: Option<Table>,
}

impl ExperimentOutput {
    pub fn new(experiment: &str, seed: u64, params: &[(String, f64)]) -> Self {
        Self {
            experiment: experiment.to_string(),
            seed,
            params: params.to_vec(),
            flags: Vec::new(),
            scalars: Vec::new(),
            table: None,
        }
    }

    pub fn scalar(&mut self, key: &str, value: f64) {
        self.scalars.push((key.to_string(), value));
    }

    pub fn flag(&mut self, key: &str, value: &str) {
        self.flags.push((key.to_string(), value.to_string()));
    }

    fn timestamp() -> String {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap_or_default();
        format!("{}.{:09}", now.as_secs(), now.subsec_nanos())
    }

    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "# experiment={}", self.experiment)?;
        writeln!(out, "# version={ARTIFACT_VERSION}")?;
        writeln!(out, "# seed={}", self.seed)?;
        for (k, v) in &self.params {
            writeln!(out, "# param.{k}={}", fmt_num(*v))?;
        }
        for (k, v) in &self.flags {
            writeln!(out, "# {k}={v}")?;
        }
        for (k, v) in &self.scalars {
            writeln!(out, "# result.{k}={}", fmt_num(*v))?;
        }
        writeln!(out, "# timestamp={}", Self::timestamp())?;
        match &self.table {
            Some(table) => {
                writeln!(out, "{}", table.header.join(","))?;
                for row in &table.rows {
                    let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
            }
            None => {
                writeln!(out, "key,value")?;
                for (k, v) in &self.scalars {
                    writeln!(out, "{k},{}", fmt_num(*v))?;
                }
            }
        }
        Ok(())
    }

    pub fn write_json(&self, mut out: impl Write) -> std::io::Result<()> {
        // Hand-rolled emitter: serde_json would re-shorten the numbers and
        // lose the 17-digit contract.
        let mut s = String::new();
        s.push_str("{\n  \"meta\": {\n");
        s.push_str(&format!("    \"experiment\": \"{}\",\n", self.experiment));
        s.push_str(&format!("    \"version\": \"{ARTIFACT_VERSION}\",\n"));
        s.push_str(&format!("    \"seed\": {},\n", self.seed));
        s.push_str("    \"params\": {");
        for (i, (k, v)) in self.params.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&format!("\n      \"{k}\": {}", fmt_num(*v)));
        }
        s.push_str("\n    },\n");
        for (k, v) in &self.flags {
            s.push_str(&format!("    \"{k}\": \"{v}\",\n"));
        }
        s.push_str(&format!("    \"timestamp\": \"{}\"\n", Self::timestamp()));
        s.push_str("  },\n  \"results\": {");
        for (i, (k, v)) in self.scalars.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&format!("\n    \"{k}\": {}", fmt_num(*v)));
        }
        s.push_str("\n  }");
        if let Some(table) = &self.table {
            s.push_str(",\n  \"table\": {\n    \"header\": [");
            for (i, h) in table.header.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                s.push_str(&format!("\"{h}\""));
            }
            s.push_str("],\n    \"rows\": [");
            for (i, row) in table.rows.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
                s.push_str(&format!("\n      [{}]", cells.join(", ")));
            }
            s.push_str("\n    ]\n  }");
        }
        s.push_str("\n}\n");
        out.write_all(s.as_bytes())
    }
}
