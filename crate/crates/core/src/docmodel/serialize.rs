//! Ground-truth serializers for the two supervision modes.
//!
//! Grammar (blocks joined by one blank line, no trailing newline):
//!
//! | block     | structure mode                         | default mode                 |
//! |-----------|----------------------------------------|------------------------------|
//! | heading   | `#`×level, space, text                 | same                         |
//! | paragraph | text lines                             | same                         |
//! | list item | two spaces × depth, `- `, text         | same                         |
//! | table     | `<table><tr><td ...>` on one line      | pipe table, spans duplicated |
//! | figure    | `<figure>description</figure>`         | description as plain text    |
//! | equation  | `$$` line, source, `$$` line           | same                         |
//!
//! A paragraph line that would otherwise read as another block, or that
//! starts with a backslash, is prefixed with one backslash. Default mode
//! also writes the `<` of any literal `<table`, `<figure` or `<td` in text
//! as `&lt;`, so its output never contains those tags.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::block::{ContentBlock, DocumentTree, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupervisionMode {
    /// Markdown only; no HTML, no figure tags.
    Default,
    /// Markdown for text, HTML tables, `<figure>` tags.
    #[default]
    Structure,
}

impl SupervisionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SupervisionMode::Default => "default",
            SupervisionMode::Structure => "structure",
        }
    }
}

impl fmt::Display for SupervisionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SupervisionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "default" => Ok(SupervisionMode::Default),
            "structure" => Ok(SupervisionMode::Structure),
            other => Err(format!("unknown supervision mode `{other}`")),
        }
    }
}

pub fn serialize(tree: &DocumentTree, mode: SupervisionMode) -> String {
    serialize_blocks(tree.blocks(), mode)
}

/// Serializes blocks without validating them. Used for corrupted copies
/// of documents that no longer form a valid tree.
pub fn serialize_blocks(blocks: &[ContentBlock], mode: SupervisionMode) -> String {
    let parts: Vec<String> = blocks.iter().map(|b| serialize_block(b, mode)).collect();
    let out = parts.join("\n\n");
    match mode {
        SupervisionMode::Structure => out,
        SupervisionMode::Default => neutralize_tags(&out),
    }
}

const STRUCTURE_TAGS: [&str; 3] = ["table", "figure", "td"];

fn neutralize_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(pos) = rest.find('<') {
        out.push_str(&rest[..pos]);
        let after = &rest[pos + 1..];
        let is_tag = STRUCTURE_TAGS.iter().any(|tag| {
            after
                .get(..tag.len())
                .is_some_and(|head| head.eq_ignore_ascii_case(tag))
        });
        out.push_str(if is_tag { "&lt;" } else { "<" });
        rest = after;
    }
    out.push_str(rest);
    out
}

fn serialize_block(block: &ContentBlock, mode: SupervisionMode) -> String {
    match block {
        ContentBlock::Heading { level, text } => {
            format!("{} {}", "#".repeat(*level as usize), text)
        }
        ContentBlock::Paragraph { text } => escape_paragraph(text),
        ContentBlock::ListItem { depth, text } => {
            format!("{}- {}", "  ".repeat(*depth as usize), text)
        }
        ContentBlock::Equation { source } => format!("$$\n{source}\n$$"),
        ContentBlock::Figure { description } => match mode {
            SupervisionMode::Structure => format!("<figure>{}</figure>", escape_html(description)),
            SupervisionMode::Default => escape_paragraph(description),
        },
        ContentBlock::Table(table) => match mode {
            SupervisionMode::Structure => html_table(table),
            SupervisionMode::Default => pipe_table(table),
        },
    }
}

fn html_table(table: &Table) -> String {
    let mut out = String::from("<table>");
    for row in &table.rows {
        out.push_str("<tr>");
        for cell in row {
            out.push_str("<td");
            if cell.colspan > 1 {
                out.push_str(&format!(" colspan=\"{}\"", cell.colspan));
            }
            if cell.rowspan > 1 {
                out.push_str(&format!(" rowspan=\"{}\"", cell.rowspan));
            }
            out.push('>');
            out.push_str(&escape_html(&cell.text));
            out.push_str("</td>");
        }
        out.push_str("</tr>");
    }
    out.push_str("</table>");
    out
}

fn pipe_table(table: &Table) -> String {
    // Valid trees always expand; fall back to the raw rows otherwise.
    let grid = table.expanded().unwrap_or_else(|_| {
        table
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.text.clone()).collect())
            .collect()
    });
    let mut lines = Vec::with_capacity(grid.len() + 1);
    for (i, row) in grid.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|c| escape_pipe(c)).collect();
        lines.push(format!("| {} |", cells.join(" | ")));
        if i == 0 {
            let rule = vec!["---"; row.len()].join(" | ");
            lines.push(format!("| {rule} |"));
        }
    }
    lines.join("\n")
}

pub(crate) fn escape_html(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out
}

fn escape_pipe(text: &str) -> String {
    text.replace('\\', "\\\\").replace('|', "\\|")
}

fn escape_paragraph(text: &str) -> String {
    text.lines()
        .map(|line| {
            if line_needs_escape(line) {
                format!("\\{line}")
            } else {
                line.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// True when a paragraph line would be read back as something else.
pub(crate) fn line_needs_escape(line: &str) -> bool {
    let t = line.trim_start();
    let lower_starts = |prefix: &str| {
        t.get(..prefix.len())
            .is_some_and(|head| head.eq_ignore_ascii_case(prefix))
    };
    t.starts_with('#')
        || t.starts_with('|')
        || t.starts_with('\\')
        || t.starts_with("$$")
        || lower_starts("<table")
        || lower_starts("<figure")
        || t.starts_with("- ")
        || t.starts_with("* ")
        || t.starts_with("+ ")
}
