use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::is_nfc;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DocError {
    #[error("document has no blocks")]
    EmptyDocument,
    #[error("block {block}: malformed table: {reason}")]
    MalformedTable { block: usize, reason: String },
    #[error("block {block}: heading level {level} outside 1..=6")]
    InvalidHeadingLevel { block: usize, level: u8 },
    #[error("block {block}: list depth {depth} outside 0..=4")]
    InvalidListDepth { block: usize, depth: u8 },
    #[error("block {block}: {reason}")]
    InvalidText { block: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Language {
    Thai,
    English,
    Mixed,
}

impl Language {
    /// Classifies text by the share of Thai letters among Thai and Latin
    /// letters: at least 90% Thai is `Thai`, at most 10% is `English`.
    pub fn detect(text: &str) -> Language {
        let (mut thai, mut latin) = (0usize, 0usize);
        for c in text.chars() {
            if is_thai(c) && c.is_alphabetic() {
                thai += 1;
            } else if c.is_ascii_alphabetic() {
                latin += 1;
            }
        }
        if thai + latin == 0 {
            return Language::English;
        }
        let share = thai as f64 / (thai + latin) as f64;
        if share >= 0.9 {
            Language::Thai
        } else if share <= 0.1 {
            Language::English
        } else {
            Language::Mixed
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Language::Thai => "thai",
            Language::English => "english",
            Language::Mixed => "mixed",
        }
    }
}

pub fn is_thai(c: char) -> bool {
    ('\u{0E00}'..='\u{0E7F}').contains(&c)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCell {
    pub text: String,
    #[serde(default = "one")]
    pub colspan: u32,
    #[serde(default = "one")]
    pub rowspan: u32,
}

fn one() -> u32 {
    1
}

impl TableCell {
    pub fn new(text: impl Into<String>) -> Self {
        Self::spanning(text, 1, 1)
    }

    pub fn spanning(text: impl Into<String>, colspan: u32, rowspan: u32) -> Self {
        Self {
            text: text.into(),
            colspan,
            rowspan,
        }
    }
}

/// Row-major table with HTML-style spans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub rows: Vec<Vec<TableCell>>,
}

/// Where each cell of a table landed after span expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellPlacement {
    pub row: usize,
    pub col: usize,
    pub rowspan: usize,
    pub colspan: usize,
}

impl Table {
    pub fn from_grid<S: Into<String>>(grid: Vec<Vec<S>>) -> Self {
        Self {
            rows: grid
                .into_iter()
                .map(|row| row.into_iter().map(TableCell::new).collect())
                .collect(),
        }
    }

    /// Positions of every cell (same order as `rows`, flattened) and the
    /// column count, or a reason the grid is not rectangular.
    pub fn layout(&self) -> Result<(Vec<CellPlacement>, usize), String> {
        let n_rows = self.rows.len();
        if n_rows == 0 {
            return Err("table has no rows".into());
        }
        let mut occupied: Vec<Vec<bool>> = vec![Vec::new(); n_rows];
        let mut placements = Vec::new();
        for (r, row) in self.rows.iter().enumerate() {
            let mut c = 0;
            for cell in row {
                if cell.colspan == 0 || cell.rowspan == 0 {
                    return Err(format!("row {r}: zero span"));
                }
                let (cs, rs) = (cell.colspan as usize, cell.rowspan as usize);
                if r + rs > n_rows {
                    return Err(format!("row {r}: rowspan {rs} runs past the last row"));
                }
                while occupied[r].get(c).copied().unwrap_or(false) {
                    c += 1;
                }
                for occ in occupied.iter_mut().skip(r).take(rs) {
                    if occ.len() < c + cs {
                        occ.resize(c + cs, false);
                    }
                    if occ[c..c + cs].iter().any(|o| *o) {
                        return Err(format!("row {r}: overlapping spans at column {c}"));
                    }
                    occ[c..c + cs].iter_mut().for_each(|o| *o = true);
                }
                placements.push(CellPlacement {
                    row: r,
                    col: c,
                    rowspan: rs,
                    colspan: cs,
                });
                c += cs;
            }
        }
        let width = occupied[0].len();
        for (r, occ) in occupied.iter().enumerate() {
            if occ.len() != width || occ.iter().any(|o| !*o) {
                let filled = occ.iter().filter(|o| **o).count();
                return Err(format!(
                    "row {r} expands to {filled} columns, expected {width}"
                ));
            }
        }
        if width == 0 {
            return Err("table has no cells".into());
        }
        Ok((placements, width))
    }

    pub fn column_count(&self) -> Option<usize> {
        self.layout().ok().map(|(_, w)| w)
    }

    /// Expanded grid: a spanning cell's text is repeated in every position
    /// it covers.
    pub fn expanded(&self) -> Result<Vec<Vec<String>>, String> {
        let (placements, width) = self.layout()?;
        let mut grid = vec![vec![String::new(); width]; self.rows.len()];
        let cells = self.rows.iter().flatten();
        for (cell, p) in cells.zip(&placements) {
            for row in grid.iter_mut().skip(p.row).take(p.rowspan) {
                for slot in row.iter_mut().skip(p.col).take(p.colspan) {
                    slot.clone_from(&cell.text);
                }
            }
        }
        Ok(grid)
    }

    /// Makes the table rectangular in place: zero spans become 1, spans
    /// that overrun or overlap are shrunk, and short rows are padded with
    /// empty cells. Returns one message per repair made.
    pub fn repair(&mut self) -> Vec<String> {
        let mut issues = Vec::new();
        self.rows.retain(|r| !r.is_empty());
        let n_rows = self.rows.len();
        if n_rows == 0 {
            return issues;
        }
        let mut occupied: Vec<Vec<bool>> = vec![Vec::new(); n_rows];
        for r in 0..n_rows {
            let mut c = 0;
            for cell in self.rows[r].iter_mut() {
                if cell.colspan == 0 || cell.rowspan == 0 {
                    issues.push(format!("row {r}: zero span reset to 1"));
                    cell.colspan = cell.colspan.max(1);
                    cell.rowspan = cell.rowspan.max(1);
                }
                if r + cell.rowspan as usize > n_rows {
                    issues.push(format!("row {r}: rowspan clamped to the last row"));
                    cell.rowspan = (n_rows - r) as u32;
                }
                while occupied[r].get(c).copied().unwrap_or(false) {
                    c += 1;
                }
                let is_free = |occ: &Vec<Vec<bool>>, rr: usize, cc: usize| {
                    !occ[rr].get(cc).copied().unwrap_or(false)
                };
                let mut cs = 1;
                while cs < cell.colspan as usize && is_free(&occupied, r, c + cs) {
                    cs += 1;
                }
                let mut rs = 1;
                while rs < cell.rowspan as usize
                    && (c..c + cs).all(|cc| is_free(&occupied, r + rs, cc))
                {
                    rs += 1;
                }
                if cs != cell.colspan as usize || rs != cell.rowspan as usize {
                    issues.push(format!("row {r}: overlapping span shrunk"));
                    cell.colspan = cs as u32;
                    cell.rowspan = rs as u32;
                }
                for occ in occupied.iter_mut().skip(r).take(rs) {
                    if occ.len() < c + cs {
                        occ.resize(c + cs, false);
                    }
                    occ[c..c + cs].iter_mut().for_each(|o| *o = true);
                }
                c += cs;
            }
        }
        let width = occupied.iter().map(Vec::len).max().unwrap_or(0);
        for r in 0..n_rows {
            let mut padded = 0;
            loop {
                let occ = &mut occupied[r];
                occ.resize(width, false);
                match occ.iter().position(|o| !*o) {
                    Some(pos) => {
                        occ[pos] = true;
                        self.rows[r].push(TableCell::new(""));
                        padded += 1;
                    }
                    None => break,
                }
            }
            if padded > 0 {
                issues.push(format!("row {r}: padded with {padded} empty cell(s)"));
            }
        }
        issues
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Heading,
    Paragraph,
    Table,
    Figure,
    Equation,
    ListItem,
}

impl BlockKind {
    pub const ALL: [BlockKind; 6] = [
        BlockKind::Heading,
        BlockKind::Paragraph,
        BlockKind::Table,
        BlockKind::Figure,
        BlockKind::Equation,
        BlockKind::ListItem,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContentBlock {
    Heading { level: u8, text: String },
    Paragraph { text: String },
    Table(Table),
    Figure { description: String },
    Equation { source: String },
    ListItem { depth: u8, text: String },
}

impl ContentBlock {
    pub fn heading(level: u8, text: impl Into<String>) -> Self {
        ContentBlock::Heading {
            level,
            text: text.into(),
        }
    }

    pub fn paragraph(text: impl Into<String>) -> Self {
        ContentBlock::Paragraph { text: text.into() }
    }

    pub fn figure(description: impl Into<String>) -> Self {
        ContentBlock::Figure {
            description: description.into(),
        }
    }

    pub fn equation(source: impl Into<String>) -> Self {
        ContentBlock::Equation {
            source: source.into(),
        }
    }

    pub fn list_item(depth: u8, text: impl Into<String>) -> Self {
        ContentBlock::ListItem {
            depth,
            text: text.into(),
        }
    }

    pub fn kind(&self) -> BlockKind {
        match self {
            ContentBlock::Heading { .. } => BlockKind::Heading,
            ContentBlock::Paragraph { .. } => BlockKind::Paragraph,
            ContentBlock::Table(_) => BlockKind::Table,
            ContentBlock::Figure { .. } => BlockKind::Figure,
            ContentBlock::Equation { .. } => BlockKind::Equation,
            ContentBlock::ListItem { .. } => BlockKind::ListItem,
        }
    }

    /// Every human-readable string carried by the block, in reading order.
    pub fn texts(&self) -> Vec<&str> {
        match self {
            ContentBlock::Heading { text, .. }
            | ContentBlock::Paragraph { text }
            | ContentBlock::ListItem { text, .. } => vec![text.as_str()],
            ContentBlock::Figure { description } => vec![description.as_str()],
            ContentBlock::Equation { source } => vec![source.as_str()],
            ContentBlock::Table(t) => t.rows.iter().flatten().map(|c| c.text.as_str()).collect(),
        }
    }

    /// Checks the block against the content-model invariants.
    pub fn validate(&self, index: usize) -> Result<(), DocError> {
        let text_err = |reason: String| DocError::InvalidText {
            block: index,
            reason,
        };
        match self {
            ContentBlock::Heading { level, text } => {
                if !(1..=6).contains(level) {
                    return Err(DocError::InvalidHeadingLevel {
                        block: index,
                        level: *level,
                    });
                }
                check_text(text, TextRule::SingleLine).map_err(text_err)
            }
            ContentBlock::Paragraph { text } => {
                check_text(text, TextRule::MultiLine).map_err(text_err)
            }
            ContentBlock::ListItem { depth, text } => {
                if *depth > 4 {
                    return Err(DocError::InvalidListDepth {
                        block: index,
                        depth: *depth,
                    });
                }
                check_text(text, TextRule::SingleLine).map_err(text_err)
            }
            ContentBlock::Figure { description } => {
                check_text(description, TextRule::SingleLine).map_err(text_err)
            }
            ContentBlock::Equation { source } => {
                check_text(source, TextRule::MultiLine).map_err(text_err)?;
                if source.lines().any(|l| l.trim().starts_with("$$") || l.trim().ends_with("$$")) {
                    return Err(text_err("equation source contains a $$ fence".into()));
                }
                Ok(())
            }
            ContentBlock::Table(table) => {
                table.layout().map_err(|reason| DocError::MalformedTable {
                    block: index,
                    reason,
                })?;
                for cell in table.rows.iter().flatten() {
                    check_text(&cell.text, TextRule::Cell).map_err(text_err)?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum TextRule {
    SingleLine,
    MultiLine,
    Cell,
}

fn check_text(text: &str, rule: TextRule) -> Result<(), String> {
    if text.is_empty() {
        return if rule == TextRule::Cell {
            Ok(())
        } else {
            Err("empty text".into())
        };
    }
    if !is_nfc(text) {
        return Err("text is not NFC-normalized".into());
    }
    if let Some(c) = text.chars().find(|c| c.is_control() && *c != '\n') {
        return Err(format!("control character U+{:04X}", c as u32));
    }
    if text.trim() != text {
        return Err("leading or trailing whitespace".into());
    }
    if rule != TextRule::MultiLine && text.contains('\n') {
        return Err("line break in single-line text".into());
    }
    if text.lines().any(|l| l.trim().is_empty() || l.trim_end() != l) {
        return Err("blank line or trailing whitespace inside text".into());
    }
    Ok(())
}

/// Validated content-block document. Sequence order is reading order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocumentTree {
    blocks: Vec<ContentBlock>,
    language: Language,
}

impl DocumentTree {
    pub fn blocks(&self) -> &[ContentBlock] {
        &self.blocks
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn into_blocks(self) -> Vec<ContentBlock> {
        self.blocks
    }

    /// Reading-order plain text with no markup: what a text layer of the
    /// page would contain. Table cells are joined by spaces, rows by lines.
    pub fn plain_text(&self) -> String {
        let mut parts = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            match block {
                ContentBlock::Table(t) => {
                    let rows: Vec<String> = t
                        .rows
                        .iter()
                        .map(|r| {
                            r.iter()
                                .map(|c| c.text.as_str())
                                .filter(|t| !t.is_empty())
                                .collect::<Vec<_>>()
                                .join(" ")
                        })
                        .collect();
                    parts.push(rows.join("\n"));
                }
                other => parts.push(other.texts().join(" ")),
            }
        }
        parts.join("\n\n")
    }
}

/// Validates `blocks` into a tree. Invalid blocks are rejected, never repaired.
pub fn build_tree(blocks: Vec<ContentBlock>, language: Language) -> Result<DocumentTree, DocError> {
    if blocks.is_empty() {
        return Err(DocError::EmptyDocument);
    }
    for (i, block) in blocks.iter().enumerate() {
        block.validate(i)?;
    }
    Ok(DocumentTree { blocks, language })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_thai_paragraph() {
        let tree = build_tree(vec![ContentBlock::paragraph("สวัสดี")], Language::Thai).unwrap();
        assert_eq!(tree.blocks().len(), 1);
    }

    #[test]
    fn empty_document_rejected() {
        assert_eq!(build_tree(vec![], Language::Thai), Err(DocError::EmptyDocument));
    }

    #[test]
    fn ragged_table_rejected() {
        let table = Table::from_grid(vec![
            vec!["a", "b", "c"],
            vec!["d", "e", "f"],
            vec!["g", "h"],
        ]);
        let err = build_tree(vec![ContentBlock::Table(table)], Language::English).unwrap_err();
        assert!(matches!(err, DocError::MalformedTable { block: 0, .. }), "{err}");
    }

    #[test]
    fn heading_level_seven_rejected() {
        let err = build_tree(vec![ContentBlock::heading(7, "x")], Language::English).unwrap_err();
        assert_eq!(err, DocError::InvalidHeadingLevel { block: 0, level: 7 });
    }

    #[test]
    fn list_depth_bound() {
        assert!(build_tree(vec![ContentBlock::list_item(4, "x")], Language::English).is_ok());
        let err = build_tree(vec![ContentBlock::list_item(5, "x")], Language::English).unwrap_err();
        assert_eq!(err, DocError::InvalidListDepth { block: 0, depth: 5 });
    }

    #[test]
    fn empty_paragraph_and_control_chars_rejected() {
        assert!(build_tree(vec![ContentBlock::paragraph("")], Language::Thai).is_err());
        assert!(build_tree(vec![ContentBlock::paragraph("a\tb")], Language::Thai).is_err());
        assert!(build_tree(vec![ContentBlock::paragraph("a\nb")], Language::Thai).is_ok());
        // Decomposed e + combining acute is not NFC.
        assert!(build_tree(vec![ContentBlock::paragraph("e\u{301}")], Language::Thai).is_err());
    }

    #[test]
    fn spans_expand_to_rectangle() {
        let table = Table {
            rows: vec![
                vec![TableCell::spanning("h", 2, 1), TableCell::spanning("side", 1, 2)],
                vec![TableCell::new("a"), TableCell::new("b")],
            ],
        };
        assert_eq!(
            table.expanded().unwrap(),
            vec![vec!["h", "h", "side"], vec!["a", "b", "side"]]
        );
    }

    #[test]
    fn rowspan_past_end_is_malformed() {
        let table = Table {
            rows: vec![vec![TableCell::spanning("x", 1, 2)]],
        };
        assert!(table.layout().is_err());
    }

    #[test]
    fn repair_pads_short_rows() {
        let mut table = Table::from_grid(vec![vec!["a", "b", "c"], vec!["d"]]);
        let issues = table.repair();
        assert_eq!(issues.len(), 1);
        assert_eq!(
            table.expanded().unwrap(),
            vec![vec!["a", "b", "c"], vec!["d", "", ""]]
        );
    }

    #[test]
    fn repair_clamps_rowspan_and_fills_holes() {
        let mut table = Table {
            rows: vec![
                vec![
                    TableCell::spanning("a", 1, 2),
                    TableCell::new("b"),
                    TableCell::spanning("c", 1, 5),
                ],
                vec![],
            ],
        };
        table.repair();
        // The empty second row is dropped, so every rowspan clamps to 1.
        assert_eq!(table.expanded().unwrap(), vec![vec!["a", "b", "c"]]);
    }

    #[test]
    fn language_detection() {
        assert_eq!(Language::detect("สวัสดีครับ"), Language::Thai);
        assert_eq!(Language::detect("hello world"), Language::English);
        assert_eq!(Language::detect("สวัสดี hello"), Language::Mixed);
    }
}
