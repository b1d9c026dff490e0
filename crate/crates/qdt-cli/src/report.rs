//! Report documents: a machine block of `key<TAB>value` lines and a human
//! block of aligned table text. The machine block is deterministic and
//! round-trips through `parse_machine`; every floating-point value is
//! emitted with 12 significant digits.

/// Assembled output of one command.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    machine: Vec<(String, String)>,
    human: Vec<String>,
}

/// Which block(s) to print.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Machine,
    Human,
    Both,
}

/// 12 significant digits, scientific.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.11e}")
}

impl Report {
    pub fn new(command: &str, source: &str) -> Self {
        let mut r = Self::default();
        r.push_str("schema_version", "1");
        r.push_str("command", command);
        r.push_str("source", source);
        r
    }

    pub fn push_str(&mut self, key: &str, value: impl AsRef<str>) {
        let value = value.as_ref();
        debug_assert!(!key.contains(['\t', '\n']), "machine keys must be tab/newline free");
        debug_assert!(!value.contains(['\t', '\n']), "machine values must be tab/newline free");
        self.machine.push((key.to_string(), value.to_string()));
    }

    pub fn push_num(&mut self, key: &str, v: f64) {
        self.push_str(key, fmt_num(v));
    }

    pub fn push_int(&mut self, key: &str, v: usize) {
        self.push_str(key, v.to_string());
    }

    pub fn push_bool(&mut self, key: &str, v: bool) {
        self.push_str(key, if v { "true" } else { "false" });
    }

    pub fn human_line(&mut self, line: impl Into<String>) {
        self.human.push(line.into());
    }

    pub fn emit(&self, format: Format) -> String {
        let machine = || {
            self.machine
                .iter()
                .map(|(k, v)| format!("{k}\t{v}\n"))
                .collect::<String>()
        };
        let human = || {
            let mut s = self.human.join("\n");
            s.push('\n');
            s
        };
        match format {
            Format::Machine => machine(),
            Format::Human => human(),
            Format::Both => {
                let mut s = machine();
                s.push('\n');
                s.push_str(&human());
                s
            }
        }
    }
}

/// Parse a machine block back into its rows. The block ends at the first
/// empty line (the separator used by the combined format) or at end of input.
#[cfg(test)]
pub fn parse_machine(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.is_empty() {
            break;
        }
        let (k, v) = line
            .split_once('\t')
            .ok_or_else(|| format!("machine line without tab separator: {line:?}"))?;
        rows.push((k.to_string(), v.to_string()));
    }
    Ok(rows)
}
