//! Output plumbing: JSON documents on pipes, aligned text on terminals.

use std::io::IsTerminal;

use serde_json::Value as Json;

pub struct Sink {
    json: bool,
}

impl Sink {
    pub fn new(force_json: bool) -> Self {
        Sink { json: force_json || !std::io::stdout().is_terminal() }
    }

    pub fn is_json(&self) -> bool {
        self.json
    }

    /// One document per command: compact JSON, or the prepared text lines.
    pub fn emit(&self, doc: Json, human: Vec<String>) {
        if self.json {
            println!("{doc}");
        } else {
            for line in human {
                println!("{line}");
            }
        }
    }
}

/// Left-aligned columns, two spaces apart, trailing blanks trimmed.
pub fn table(rows: &[Vec<String>]) -> Vec<String> {
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    rows.iter()
        .map(|row| {
            let mut line = String::new();
            for (i, cell) in row.iter().enumerate() {
                if i + 1 == row.len() {
                    line.push_str(cell);
                } else {
                    let pad = widths[i].saturating_sub(cell.chars().count());
                    line.push_str(cell);
                    line.extend(std::iter::repeat(' ').take(pad + 2));
                }
            }
            line.trim_end().to_string()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_align() {
        let rows = vec![
            vec!["stage".into(), "reduction".into()],
            vec!["1".into(), "{1} × {Left}".into()],
        ];
        let lines = table(&rows);
        assert_eq!(lines[0], "stage  reduction");
        assert_eq!(lines[1], "1      {1} × {Left}");
    }
}
