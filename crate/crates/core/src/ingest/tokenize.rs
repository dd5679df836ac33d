//! Lowercasing tokenizer: any non-alphabetic character separates tokens.

/// Split `text` into lowercase purely-alphabetic tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_ascii_alphabetic())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_ascii_lowercase())
        .collect()
}
