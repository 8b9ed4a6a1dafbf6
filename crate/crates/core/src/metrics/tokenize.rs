use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use crate::docmodel::is_thai;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenMode {
    /// Latin words, Thai grapheme clusters, ASCII punctuation on its own.
    #[default]
    ScriptAware,
    Whitespace,
    /// Every extended grapheme cluster except whitespace.
    Grapheme,
}

impl TokenMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            TokenMode::ScriptAware => "script_aware",
            TokenMode::Whitespace => "whitespace",
            TokenMode::Grapheme => "grapheme",
        }
    }
}

impl FromStr for TokenMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "script_aware" => Ok(TokenMode::ScriptAware),
            "whitespace" => Ok(TokenMode::Whitespace),
            "grapheme" => Ok(TokenMode::Grapheme),
            other => Err(format!("unknown tokenization mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TokenizationPolicy {
    #[serde(default)]
    pub mode: TokenMode,
    #[serde(default)]
    pub lowercase: bool,
}

impl fmt::Display for TokenizationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.mode.as_str())?;
        if self.lowercase {
            f.write_str("+lowercase")?;
        }
        Ok(())
    }
}

/// Splits canonicalized text into tokens under `policy`.
pub fn tokenize(text: &str, policy: TokenizationPolicy) -> Vec<String> {
    token_spans(text, policy.mode)
        .into_iter()
        .map(|r| {
            let token = &text[r];
            if policy.lowercase {
                token.to_lowercase()
            } else {
                token.to_string()
            }
        })
        .collect()
}

/// Byte ranges of the tokens `tokenize` would return, before lowercasing.
pub fn token_spans(text: &str, mode: TokenMode) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    match mode {
        TokenMode::Whitespace => {
            for (start, word) in words(text) {
                out.push(start..start + word.len());
            }
        }
        TokenMode::Grapheme => {
            for (start, g) in text.grapheme_indices(true) {
                if !g.chars().all(char::is_whitespace) {
                    out.push(start..start + g.len());
                }
            }
        }
        TokenMode::ScriptAware => {
            for (start, word) in words(text) {
                if word.chars().any(is_thai) {
                    for (i, g) in word.grapheme_indices(true) {
                        out.push(start + i..start + i + g.len());
                    }
                } else {
                    split_punct(word, start, &mut out);
                }
            }
        }
    }
    out
}

fn words(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split_whitespace()
        .map(move |w| (w.as_ptr() as usize - text.as_ptr() as usize, w))
}

fn split_punct(word: &str, offset: usize, out: &mut Vec<Range<usize>>) {
    let mut start = 0;
    for (i, c) in word.char_indices() {
        if c.is_ascii_punctuation() {
            if start < i {
                out.push(offset + start..offset + i);
            }
            out.push(offset + i..offset + i + c.len_utf8());
            start = i + c.len_utf8();
        }
    }
    if start < word.len() {
        out.push(offset + start..offset + word.len());
    }
}
