//! Content-block document model, supervision-mode serializers, lenient
//! parser and text canonicalization.

mod block;
mod canonical;
mod parse;
mod serialize;

pub use block::{
    build_tree, is_thai, BlockKind, CellPlacement, ContentBlock, DocError, DocumentTree, Language,
    Table, TableCell,
};
pub use canonical::canonicalize;
pub use parse::{parse_structured, Diagnostic, DiagnosticKind, ParsedDocument};
pub use serialize::{serialize, serialize_blocks, SupervisionMode};
