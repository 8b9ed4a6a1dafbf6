//! Lenient reader for serialized ground truth and model output.
//!
//! The reader accepts any UTF-8 text. Recognized constructs are ATX
//! headings, `-`/`*`/`+` list items, `$$` fences, pipe tables, `<table>`
//! and `<figure>` HTML; anything else becomes paragraphs. Malformed
//! constructs are recovered and reported as diagnostics rather than errors.

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use super::block::{build_tree, ContentBlock, DocError, DocumentTree, Language, Table, TableCell};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    EmptyInput,
    UnclosedTable,
    UnclosedRow,
    UnclosedCell,
    StrayTableContent,
    RaggedTable,
    EmptyTable,
    UnclosedFigure,
    EmptyFigure,
    UnclosedEquation,
    EmptyEquation,
}

impl DiagnosticKind {
    pub fn is_table(&self) -> bool {
        matches!(
            self,
            DiagnosticKind::UnclosedTable
                | DiagnosticKind::UnclosedRow
                | DiagnosticKind::UnclosedCell
                | DiagnosticKind::StrayTableContent
                | DiagnosticKind::RaggedTable
                | DiagnosticKind::EmptyTable
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    /// 1-based line where the construct started.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParsedDocument {
    pub blocks: Vec<ContentBlock>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParsedDocument {
    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Validates the recovered blocks into a tree; the language is
    /// detected from the text when not given.
    pub fn into_tree(self, language: Option<Language>) -> Result<DocumentTree, DocError> {
        let language = language.unwrap_or_else(|| {
            let text: Vec<&str> = self.blocks.iter().flat_map(|b| b.texts()).collect();
            Language::detect(&text.join(" "))
        });
        build_tree(self.blocks, language)
    }
}

pub fn parse_structured(text: &str) -> ParsedDocument {
    let unified = text.replace("\r\n", "\n").replace('\r', "\n");
    let normalized: String = unified
        .split('\n')
        .map(sanitize_line)
        .collect::<Vec<_>>()
        .join("\n")
        .nfc()
        .collect();
    let mut parser = Parser {
        lines: normalized.split('\n').map(str::to_string).collect(),
        pos: 0,
        out: ParsedDocument::default(),
    };
    parser.run();
    if parser.out.blocks.is_empty() && parser.out.diagnostics.is_empty() {
        parser.out.diagnostics.push(Diagnostic {
            kind: DiagnosticKind::EmptyInput,
            line: 1,
            message: "empty input".into(),
        });
    }
    parser.out
}

/// Tabs become spaces; other control characters are dropped.
fn sanitize_line(line: &str) -> String {
    line.chars()
        .filter_map(|c| match c {
            '\t' => Some(' '),
            c if c.is_control() => None,
            c => Some(c),
        })
        .collect()
}

struct Parser {
    lines: Vec<String>,
    pos: usize,
    out: ParsedDocument,
}

impl Parser {
    fn diag(&mut self, kind: DiagnosticKind, line: usize, message: impl Into<String>) {
        self.out.diagnostics.push(Diagnostic {
            kind,
            line: line + 1,
            message: message.into(),
        });
    }

    fn run(&mut self) {
        while self.pos < self.lines.len() {
            let line = self.lines[self.pos].clone();
            if line.trim().is_empty() {
                self.pos += 1;
                continue;
            }
            let trimmed = line.trim_start();
            if let Some(block) = heading(&line) {
                self.out.blocks.push(block);
                self.pos += 1;
            } else if trimmed.starts_with("$$") {
                self.equation();
            } else if starts_with_ci(trimmed, "<table") {
                self.html_block("table");
            } else if starts_with_ci(trimmed, "<figure") {
                self.html_block("figure");
            } else if trimmed.starts_with('|') {
                self.pipe_table();
            } else if let Some(block) = list_item(&line) {
                self.out.blocks.push(block);
                self.pos += 1;
            } else {
                self.paragraph();
            }
        }
    }

    fn paragraph(&mut self) {
        let mut lines = Vec::new();
        while self.pos < self.lines.len() {
            let line = &self.lines[self.pos];
            if line.trim().is_empty() || (!lines.is_empty() && starts_block(line)) {
                break;
            }
            let text = line.strip_prefix('\\').unwrap_or(line).trim_end();
            if !text.trim().is_empty() {
                lines.push(text.to_string());
            }
            self.pos += 1;
        }
        let text = lines.join("\n");
        let text = text.trim();
        if !text.is_empty() {
            self.out.blocks.push(ContentBlock::paragraph(text));
        }
    }

    fn equation(&mut self) {
        let start = self.pos;
        let first = self.lines[start].trim().to_string();
        let after_open = first["$$".len()..].to_string();
        // Single-line form: `$$ source $$`.
        if after_open.trim_end().ends_with("$$") && after_open.trim().len() >= 2 {
            let inner = after_open.trim_end();
            let inner = inner[..inner.len() - 2].trim().to_string();
            self.pos += 1;
            self.push_equation(inner, start);
            return;
        }
        let mut body = Vec::new();
        if !after_open.trim().is_empty() {
            body.push(after_open.trim().to_string());
        }
        let close = (start + 1..self.lines.len()).find(|&i| self.lines[i].trim_end().ends_with("$$"));
        match close {
            Some(end) => {
                for i in start + 1..end {
                    body.push(self.lines[i].trim_end().to_string());
                }
                let last = self.lines[end].trim_end();
                let last = last[..last.len() - 2].trim();
                if !last.is_empty() {
                    body.push(last.to_string());
                }
                self.pos = end + 1;
            }
            None => {
                self.diag(DiagnosticKind::UnclosedEquation, start, "unclosed $$ fence");
                let mut i = start + 1;
                while i < self.lines.len() && !self.lines[i].trim().is_empty() {
                    body.push(self.lines[i].trim_end().to_string());
                    i += 1;
                }
                self.pos = i;
            }
        }
        let source = body.join("\n").trim().to_string();
        self.push_equation(source, start);
    }

    fn push_equation(&mut self, source: String, line: usize) {
        if source.is_empty() {
            self.diag(DiagnosticKind::EmptyEquation, line, "empty equation");
        } else {
            self.out.blocks.push(ContentBlock::equation(source));
        }
    }

    /// Gathers an HTML element that may span lines. Text after the closing
    /// tag is left in place as the start of the next block.
    fn html_block(&mut self, tag: &str) {
        let start = self.pos;
        let close_tag = format!("</{tag}>");
        let mut gathered = String::new();
        let mut i = start;
        let mut closed = false;
        while i < self.lines.len() {
            let line = self.lines[i].clone();
            if let Some(at) = find_ci(&line, &close_tag) {
                let end = at + close_tag.len();
                gathered.push_str(&line[..end]);
                let rest = line[end..].to_string();
                if rest.trim().is_empty() {
                    self.pos = i + 1;
                } else {
                    self.lines[i] = rest;
                    self.pos = i;
                }
                closed = true;
                break;
            }
            gathered.push_str(&line);
            gathered.push('\n');
            i += 1;
        }
        if !closed {
            // No closing tag anywhere: take the element up to the next blank line.
            gathered.clear();
            let mut j = start;
            while j < self.lines.len() && !self.lines[j].trim().is_empty() {
                gathered.push_str(&self.lines[j]);
                gathered.push('\n');
                j += 1;
            }
            self.pos = j;
            let kind = if tag == "table" {
                DiagnosticKind::UnclosedTable
            } else {
                DiagnosticKind::UnclosedFigure
            };
            self.diag(kind, start, format!("unclosed {tag}"));
        }
        if tag == "table" {
            self.html_table(&gathered, start);
        } else {
            let inner = strip_tags(&gathered);
            if inner.is_empty() {
                self.diag(DiagnosticKind::EmptyFigure, start, "empty figure");
            } else {
                self.out.blocks.push(ContentBlock::figure(inner));
            }
        }
    }

    fn html_table(&mut self, html: &str, line: usize) {
        let mut rows: Vec<Vec<TableCell>> = Vec::new();
        let mut row: Option<Vec<TableCell>> = None;
        let mut cell: Option<(String, u32, u32)> = None;
        let mut issues: Vec<(DiagnosticKind, String)> = Vec::new();

        fn close_cell(
            row: &mut Option<Vec<TableCell>>,
            cell: &mut Option<(String, u32, u32)>,
        ) {
            if let Some((text, colspan, rowspan)) = cell.take() {
                let text = clean_markup_text(&text);
                row.get_or_insert_with(Vec::new)
                    .push(TableCell::spanning(text, colspan, rowspan));
            }
        }

        for token in html_tokens(html) {
            match token {
                HtmlToken::Text(text) => match cell.as_mut() {
                    Some((buf, _, _)) => buf.push_str(text),
                    None if !text.trim().is_empty() => issues.push((
                        DiagnosticKind::StrayTableContent,
                        format!("text outside a cell: {:?}", text.trim()),
                    )),
                    None => {}
                },
                HtmlToken::Tag { name, closing, raw } => match (name.as_str(), closing) {
                    ("tr", false) => {
                        if cell.is_some() {
                            issues.push((DiagnosticKind::UnclosedCell, "unclosed cell".into()));
                            close_cell(&mut row, &mut cell);
                        }
                        if let Some(r) = row.take() {
                            issues.push((DiagnosticKind::UnclosedRow, "unclosed row".into()));
                            rows.push(r);
                        }
                        row = Some(Vec::new());
                    }
                    ("tr", true) => {
                        if cell.is_some() {
                            issues.push((DiagnosticKind::UnclosedCell, "unclosed cell".into()));
                            close_cell(&mut row, &mut cell);
                        }
                        if let Some(r) = row.take() {
                            rows.push(r);
                        }
                    }
                    ("td" | "th", false) => {
                        if cell.is_some() {
                            issues.push((DiagnosticKind::UnclosedCell, "unclosed cell".into()));
                            close_cell(&mut row, &mut cell);
                        }
                        if row.is_none() {
                            issues.push((DiagnosticKind::UnclosedRow, "cell outside a row".into()));
                            row = Some(Vec::new());
                        }
                        let colspan = span_attr(&raw, "colspan");
                        let rowspan = span_attr(&raw, "rowspan");
                        cell = Some((String::new(), colspan, rowspan));
                    }
                    ("td" | "th", true) => close_cell(&mut row, &mut cell),
                    ("br", _) => {
                        if let Some((buf, _, _)) = cell.as_mut() {
                            buf.push(' ');
                        }
                    }
                    _ => {}
                },
            }
        }
        if cell.is_some() {
            issues.push((DiagnosticKind::UnclosedCell, "unclosed cell".into()));
            close_cell(&mut row, &mut cell);
        }
        if let Some(r) = row.take() {
            issues.push((DiagnosticKind::UnclosedRow, "unclosed row".into()));
            rows.push(r);
        }
        for (kind, message) in issues {
            self.diag(kind, line, message);
        }
        self.push_table(Table { rows }, line);
    }

    fn pipe_table(&mut self) {
        let start = self.pos;
        let mut rows: Vec<Vec<String>> = Vec::new();
        while self.pos < self.lines.len() && self.lines[self.pos].trim_start().starts_with('|') {
            let cells = split_pipe_row(self.lines[self.pos].trim());
            if !is_separator_row(&cells) {
                rows.push(cells);
            }
            self.pos += 1;
        }
        let width = rows.iter().map(Vec::len).max().unwrap_or(0);
        if rows.iter().any(|r| r.len() != width) {
            self.diag(DiagnosticKind::RaggedTable, start, "ragged pipe table padded");
            for r in rows.iter_mut() {
                r.resize(width, String::new());
            }
        }
        self.push_table(Table::from_grid(rows), start);
    }

    fn push_table(&mut self, mut table: Table, line: usize) {
        for issue in table.repair() {
            self.diag(DiagnosticKind::RaggedTable, line, issue);
        }
        if table.rows.is_empty() {
            self.diag(DiagnosticKind::EmptyTable, line, "table without cells");
        } else {
            self.out.blocks.push(ContentBlock::Table(table));
        }
    }
}

fn starts_with_ci(text: &str, prefix: &str) -> bool {
    text.get(..prefix.len())
        .is_some_and(|head| head.eq_ignore_ascii_case(prefix))
}

fn find_ci(haystack: &str, needle: &str) -> Option<usize> {
    haystack
        .char_indices()
        .map(|(i, _)| i)
        .find(|&i| starts_with_ci(&haystack[i..], needle))
}

fn heading(line: &str) -> Option<ContentBlock> {
    let hashes = line.bytes().take_while(|b| *b == b'#').count();
    if !(1..=6).contains(&hashes) {
        return None;
    }
    let rest = &line[hashes..];
    if !rest.starts_with(' ') {
        return None;
    }
    let text = rest.trim();
    if text.is_empty() {
        return None;
    }
    Some(ContentBlock::heading(hashes as u8, text))
}

fn list_item(line: &str) -> Option<ContentBlock> {
    let indent = line.len() - line.trim_start_matches(' ').len();
    let rest = &line[indent..];
    let mut chars = rest.chars();
    let marker = chars.next()?;
    if !matches!(marker, '-' | '*' | '+') || chars.next() != Some(' ') {
        return None;
    }
    let text = rest[2..].trim();
    if text.is_empty() {
        return None;
    }
    Some(ContentBlock::list_item((indent / 2).min(4) as u8, text))
}

/// True if `line` opens a non-paragraph block.
fn starts_block(line: &str) -> bool {
    let t = line.trim_start();
    heading(line).is_some()
        || t.starts_with("$$")
        || t.starts_with('|')
        || starts_with_ci(t, "<table")
        || starts_with_ci(t, "<figure")
        || list_item(line).is_some()
}

fn split_pipe_row(line: &str) -> Vec<String> {
    let inner = line.strip_prefix('|').unwrap_or(line);
    let mut cells = Vec::new();
    let mut current = String::new();
    let mut chars = inner.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\\' if matches!(chars.peek(), Some('|') | Some('\\')) => {
                current.push(chars.next().unwrap_or('\\'));
            }
            '|' => cells.push(std::mem::take(&mut current)),
            _ => current.push(c),
        }
    }
    // Text after the last pipe is a cell only when the row is unterminated.
    if !current.trim().is_empty() {
        cells.push(current);
    }
    cells.into_iter().map(|c| collapse_ws(&c).nfc().collect()).collect()
}

fn is_separator_row(cells: &[String]) -> bool {
    !cells.is_empty()
        && cells.iter().all(|c| {
            let core = c.trim_start_matches(':').trim_end_matches(':');
            !core.is_empty() && core.chars().all(|ch| ch == '-')
        })
}

fn collapse_ws(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

enum HtmlToken<'a> {
    Text(&'a str),
    Tag {
        name: String,
        closing: bool,
        raw: String,
    },
}

fn html_tokens(html: &str) -> Vec<HtmlToken<'_>> {
    let mut tokens = Vec::new();
    let mut rest = html;
    while !rest.is_empty() {
        match rest.find('<') {
            Some(0) => match rest.find('>') {
                Some(end) => {
                    let raw = &rest[1..end];
                    let closing = raw.starts_with('/');
                    let name: String = raw
                        .trim_start_matches('/')
                        .chars()
                        .take_while(|c| c.is_ascii_alphanumeric())
                        .collect::<String>()
                        .to_ascii_lowercase();
                    tokens.push(HtmlToken::Tag {
                        name,
                        closing,
                        raw: raw.to_string(),
                    });
                    rest = &rest[end + 1..];
                }
                None => {
                    tokens.push(HtmlToken::Text(rest));
                    rest = "";
                }
            },
            Some(at) => {
                tokens.push(HtmlToken::Text(&rest[..at]));
                rest = &rest[at..];
            }
            None => {
                tokens.push(HtmlToken::Text(rest));
                rest = "";
            }
        }
    }
    tokens
}

fn span_attr(raw: &str, attr: &str) -> u32 {
    let Some(at) = find_ci(raw, attr) else {
        return 1;
    };
    let after = raw[at + attr.len()..].trim_start();
    let Some(value) = after.strip_prefix('=') else {
        return 1;
    };
    let digits: String = value
        .trim_start()
        .trim_start_matches(['"', '\''])
        .chars()
        .take_while(|c| c.is_ascii_digit())
        .collect();
    digits.parse::<u32>().ok().filter(|v| *v >= 1).unwrap_or(1).min(1000)
}

fn strip_tags(html: &str) -> String {
    let text: String = html_tokens(html)
        .into_iter()
        .map(|t| match t {
            HtmlToken::Text(s) => s.to_string(),
            HtmlToken::Tag { .. } => " ".to_string(),
        })
        .collect();
    clean_markup_text(&text)
}

/// Decodes entities, then restores NFC and drops any decoded control characters.
fn clean_markup_text(raw: &str) -> String {
    let decoded: String = unescape_html(raw)
        .chars()
        .map(|c| if c.is_control() { ' ' } else { c })
        .collect();
    collapse_ws(&decoded).nfc().collect()
}

fn unescape_html(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp..];
        let decoded = tail.find(';').filter(|&semi| semi <= 10).and_then(|semi| {
            let entity = &tail[1..semi];
            let ch = match entity {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" | "#39" => Some('\''),
                "nbsp" => Some(' '),
                _ => entity
                    .strip_prefix("#x")
                    .or_else(|| entity.strip_prefix("#X"))
                    .and_then(|hex| u32::from_str_radix(hex, 16).ok())
                    .or_else(|| entity.strip_prefix('#').and_then(|d| d.parse().ok()))
                    .and_then(char::from_u32),
            };
            ch.map(|c| (c, semi))
        });
        match decoded {
            Some((c, semi)) => {
                out.push(c);
                rest = &tail[semi + 1..];
            }
            None => {
                out.push('&');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::serialize::{serialize, SupervisionMode};

    #[test]
    fn heading_then_paragraph() {
        let doc = parse_structured("# A\n\nB");
        assert_eq!(
            doc.blocks,
            vec![ContentBlock::heading(1, "A"), ContentBlock::paragraph("B")]
        );
        assert!(doc.diagnostics.is_empty());
    }

    #[test]
    fn unclosed_table_recovers_single_cell() {
        let doc = parse_structured("<table><tr><td>x</td></tr>");
        assert_eq!(doc.diagnostics.len(), 1);
        assert_eq!(doc.diagnostics[0].kind, DiagnosticKind::UnclosedTable);
        assert_eq!(doc.diagnostics[0].message, "unclosed table");
        // Re-serialization oracle: the recovered block is a closed 1x1 table.
        let tree = doc.into_tree(None).unwrap();
        assert_eq!(
            serialize(&tree, SupervisionMode::Structure),
            "<table><tr><td>x</td></tr></table>"
        );
    }

    #[test]
    fn empty_input_reports_diagnostic() {
        for input in ["", "\n\n  \n"] {
            let doc = parse_structured(input);
            assert!(doc.blocks.is_empty());
            assert_eq!(doc.diagnostics.len(), 1);
            assert_eq!(doc.diagnostics[0].kind, DiagnosticKind::EmptyInput);
            assert_eq!(doc.diagnostics[0].message, "empty input");
        }
    }

    #[test]
    fn html_table_with_spans_and_entities() {
        let doc = parse_structured(
            "<TABLE>\n<tr><th colspan='2'>a &amp; b</th></tr>\n<tr><td>1</td><td> 2 </td></tr>\n</table>",
        );
        assert!(doc.diagnostics.is_empty(), "{:?}", doc.diagnostics);
        let ContentBlock::Table(t) = &doc.blocks[0] else {
            panic!("expected table");
        };
        assert_eq!(
            t.expanded().unwrap(),
            vec![vec!["a & b", "a & b"], vec!["1", "2"]]
        );
    }

    #[test]
    fn missing_cell_and_row_closers_are_diagnosed() {
        let doc = parse_structured("<table><tr><td>a<td>b<tr><td>c</td><td>d</table>");
        let kinds: Vec<_> = doc.diagnostics.iter().map(|d| d.kind).collect();
        assert!(kinds.contains(&DiagnosticKind::UnclosedCell));
        assert!(kinds.contains(&DiagnosticKind::UnclosedRow));
        let ContentBlock::Table(t) = &doc.blocks[0] else {
            panic!("expected table");
        };
        assert_eq!(t.expanded().unwrap(), vec![vec!["a", "b"], vec!["c", "d"]]);
    }

    #[test]
    fn ragged_html_table_is_padded() {
        let doc = parse_structured("<table><tr><td>a</td><td>b</td></tr><tr><td>c</td></tr></table>");
        assert!(doc.diagnostics.iter().any(|d| d.kind == DiagnosticKind::RaggedTable));
        let ContentBlock::Table(t) = &doc.blocks[0] else {
            panic!("expected table");
        };
        assert_eq!(t.expanded().unwrap(), vec![vec!["a", "b"], vec!["c", ""]]);
    }

    #[test]
    fn pipe_table_with_separator_and_escapes() {
        let doc = parse_structured("| h1 | h2 |\n|:---|---:|\n| a\\|b | c |");
        assert!(doc.diagnostics.is_empty());
        let ContentBlock::Table(t) = &doc.blocks[0] else {
            panic!("expected table");
        };
        assert_eq!(t.expanded().unwrap(), vec![vec!["h1", "h2"], vec!["a|b", "c"]]);
    }

    #[test]
    fn figure_and_trailing_text() {
        let doc = parse_structured("<figure><img src=x>ภาพ &lt;1&gt;</figure> after");
        assert_eq!(
            doc.blocks,
            vec![ContentBlock::figure("ภาพ <1>"), ContentBlock::paragraph("after")]
        );
    }

    #[test]
    fn equation_forms() {
        let doc = parse_structured("$$\na + b\n$$\n\n$$ x^2 $$\n\n$$y\n= z$$");
        assert_eq!(
            doc.blocks,
            vec![
                ContentBlock::equation("a + b"),
                ContentBlock::equation("x^2"),
                ContentBlock::equation("y\n= z"),
            ]
        );
        let unclosed = parse_structured("$$\nq\n\nrest");
        assert_eq!(unclosed.diagnostics[0].kind, DiagnosticKind::UnclosedEquation);
        assert_eq!(unclosed.blocks[0], ContentBlock::equation("q"));
        assert_eq!(unclosed.blocks[1], ContentBlock::paragraph("rest"));
    }

    #[test]
    fn lists_and_escaped_paragraph_lines() {
        let doc = parse_structured("- one\n    - two\n\n\\# literal\n\\- also literal");
        assert_eq!(
            doc.blocks,
            vec![
                ContentBlock::list_item(0, "one"),
                ContentBlock::list_item(2, "two"),
                ContentBlock::paragraph("# literal\n- also literal"),
            ]
        );
    }

    #[test]
    fn seven_hashes_is_a_paragraph() {
        let doc = parse_structured("####### x");
        assert_eq!(doc.blocks, vec![ContentBlock::paragraph("####### x")]);
    }

    #[test]
    fn control_characters_and_crlf_are_tolerated() {
        let doc = parse_structured("a\tb\u{0}\r\n\r\nc");
        assert_eq!(
            doc.blocks,
            vec![ContentBlock::paragraph("a b"), ContentBlock::paragraph("c")]
        );
    }
}
