//! Lexical tokenizer for JavaScript snippets.
//!
//! Words and punctuation are separated, with one exception: identifier
//! chains joined by the member operator (`this.bar`, `node.loc.end`) stay a
//! single token. String literals and decimal numbers are kept whole. Every
//! other non-whitespace character becomes its own token, so `===` yields
//! three `=` tokens.

use serde::{Deserialize, Serialize};

/// Tokens of one document, in source order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub doc_id: String,
    pub tokens: Vec<String>,
}

impl TokenSequence {
    pub fn from_text(doc_id: impl Into<String>, text: &str) -> Self {
        TokenSequence {
            doc_id: doc_id.into(),
            tokens: tokenize(text),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

fn is_quote(c: char) -> bool {
    matches!(c, '"' | '\'' | '`')
}

fn scan_while(chars: &[char], mut j: usize, pred: impl Fn(char) -> bool) -> usize {
    while j < chars.len() && pred(chars[j]) {
        j += 1;
    }
    j
}

/// Index one past the closing quote of the literal opening at `start`, or
/// `None` when the literal is not closed before the end of the line.
fn scan_string(chars: &[char], start: usize) -> Option<usize> {
    let quote = chars[start];
    let mut j = start + 1;
    while j < chars.len() {
        match chars[j] {
            '\n' => return None,
            '\\' if j + 1 < chars.len() && chars[j + 1] != '\n' => j += 2,
            c if c == quote => return Some(j + 1),
            _ => j += 1,
        }
    }
    None
}

/// Split `text` into tokens.
///
/// Total on every input. An unterminated string literal switches the rest of
/// its line to per-character emission. Whitespace inside a string literal is
/// dropped from the token, which keeps tokens whitespace-free and makes
/// concatenating the tokens equal to the input with all whitespace removed.
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut per_char = false;
    let mut i = 0;

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            if c == '\n' {
                per_char = false;
            }
            i += 1;
            continue;
        }
        if per_char {
            tokens.push(c.to_string());
            i += 1;
            continue;
        }

        let end = if is_ident_start(c) {
            let mut j = scan_while(&chars, i + 1, is_ident_continue);
            while j + 1 < chars.len() && chars[j] == '.' && is_ident_start(chars[j + 1]) {
                j = scan_while(&chars, j + 2, is_ident_continue);
            }
            j
        } else if c.is_ascii_digit() {
            let mut j = scan_while(&chars, i + 1, |c| c.is_ascii_digit());
            if j + 1 < chars.len() && chars[j] == '.' && chars[j + 1].is_ascii_digit() {
                j = scan_while(&chars, j + 2, |c| c.is_ascii_digit());
            }
            j
        } else if is_quote(c) {
            match scan_string(&chars, i) {
                Some(j) => j,
                None => {
                    per_char = true;
                    i + 1
                }
            }
        } else {
            i + 1
        };

        tokens.push(
            chars[i..end]
                .iter()
                .filter(|c| !c.is_whitespace())
                .collect(),
        );
        i = end;
    }
    tokens
}

/// Remove every whitespace character.
pub fn normalize_whitespace(text: &str) -> String {
    text.chars().filter(|c| !c.is_whitespace()).collect()
}
