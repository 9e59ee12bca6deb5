//! Report documents: titled sections of aligned text plus `#!` machine lines.
//!
//! A machine line is `#! <kind> <field> <field> ...`. A field is either
//! positional or `key=value`. Values never contain whitespace: spaces are
//! written as `_` and direct sums as `+`.

use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Default)]
pub struct Section {
    title: String,
    rows: Vec<Vec<String>>,
    notes: Vec<String>,
}

impl Section {
    pub fn new(title: impl Into<String>) -> Self {
        Section {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn row<I, S>(&mut self, cells: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.rows.push(cells.into_iter().map(|c| c.to_string()).collect());
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    fn render(&self, out: &mut String) {
        let _ = writeln!(out, "{}", self.title);
        let _ = writeln!(out, "{}", "-".repeat(self.title.chars().count()));
        let ncols = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let widths: Vec<usize> = (0..ncols)
            .map(|c| {
                self.rows
                    .iter()
                    .filter_map(|r| r.get(c))
                    .map(|s| s.chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        for r in &self.rows {
            let mut line = String::new();
            for (c, cell) in r.iter().enumerate() {
                if c > 0 {
                    line.push_str("  ");
                }
                let pad = widths[c] - cell.chars().count();
                line.push_str(cell);
                line.push_str(&" ".repeat(pad));
            }
            let _ = writeln!(out, "{}", line.trim_end());
        }
        for n in &self.notes {
            let _ = writeln!(out, "{n}");
        }
        out.push('\n');
    }
}

#[derive(Default)]
pub struct Report {
    sections: Vec<Section>,
    machine: Vec<String>,
}

impl Report {
    pub fn section(&mut self, s: Section) {
        self.sections.push(s);
    }

    pub fn machine(&mut self, kind: &str, fields: &[(&str, String)]) {
        let mut line = format!("#! {kind}");
        for (k, v) in fields {
            if k.is_empty() {
                let _ = write!(line, " {}", encode(v));
            } else {
                let _ = write!(line, " {k}={}", encode(v));
            }
        }
        self.machine.push(line);
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        if format == Format::Text {
            for s in &self.sections {
                s.render(&mut out);
            }
        }
        for m in &self.machine {
            let _ = writeln!(out, "{m}");
        }
        out
    }
}

pub fn encode(value: &str) -> String {
    let v = value.replace(" ⊕ ", "+").replace(" + ", "+").replace(' ', "_");
    if v.is_empty() {
        "-".to_string()
    } else {
        v
    }
}

#[cfg(test)]
pub fn decode(value: &str) -> String {
    if value == "-" {
        String::new()
    } else {
        value.replace('_', " ")
    }
}

#[cfg(test)]
/// Splits a machine line into its kind, positional fields and keyed fields.
pub fn parse_machine_line(line: &str) -> Option<(String, Vec<String>, Vec<(String, String)>)> {
    let rest = line.strip_prefix("#! ")?;
    let mut tokens = rest.split_whitespace();
    let kind = tokens.next()?.to_string();
    let mut positional = Vec::new();
    let mut keyed = Vec::new();
    for t in tokens {
        match t.split_once('=') {
            Some((k, v)) => keyed.push((k.to_string(), decode(v))),
            None => positional.push(decode(t)),
        }
    }
    Some((kind, positional, keyed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn machine_lines_round_trip() {
        let mut r = Report::default();
        r.machine("cofiber", &[("alpha", "nu3 + etaeps".into()), ("result", "Z/16 ⊕ Z/4".into())]);
        r.machine("cell", &[("", "7".into()), ("", "sigma".into())]);
        let text = r.render(Format::Machine);
        let lines: Vec<&str> = text.lines().collect();
        let (kind, pos, keyed) = parse_machine_line(lines[0]).unwrap();
        assert_eq!(kind, "cofiber");
        assert!(pos.is_empty());
        assert_eq!(keyed[0], ("alpha".to_string(), "nu3+etaeps".to_string()));
        assert_eq!(keyed[1].1, "Z/16+Z/4");
        let (kind, pos, _) = parse_machine_line(lines[1]).unwrap();
        assert_eq!((kind.as_str(), pos), ("cell", vec!["7".to_string(), "sigma".to_string()]));
    }

    #[test]
    fn text_is_aligned() {
        let mut r = Report::default();
        let mut s = Section::new("t");
        s.row(["a", "bb"]).row(["ccc", "d"]);
        r.section(s);
        assert_eq!(r.render(Format::Text), "t\n-\na    bb\nccc  d\n\n");
    }
}
