use super::{ParseError, Position};

#[derive(Clone, Debug, PartialEq)]
pub(super) enum Tok {
    Word(String),
    Punct(char),
}

#[derive(Clone, Debug)]
pub(super) struct Token {
    pub tok: Tok,
    pub pos: Position,
}

pub(super) const PUNCTUATION: &[char] = &['{', '}', '[', ']', ',', ';', '|', '='];

/// Splits `text` into words and single punctuation characters. `#` starts
/// a comment that runs to the end of the line.
pub(super) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    for (l, line) in text.lines().enumerate() {
        let mut chars = line.chars().enumerate().peekable();
        while let Some(&(c, ch)) = chars.peek() {
            let pos = Position { line: l + 1, column: c + 1 };
            if ch == '#' {
                break;
            } else if ch.is_whitespace() {
                chars.next();
            } else if PUNCTUATION.contains(&ch) {
                tokens.push(Token { tok: Tok::Punct(ch), pos });
                chars.next();
            } else if ch.is_control() {
                return Err(ParseError::syntax(pos, format!("unexpected control character {ch:?}")));
            } else {
                let mut word = String::new();
                while let Some(&(_, ch)) = chars.peek() {
                    if ch.is_whitespace() || ch == '#' || PUNCTUATION.contains(&ch) {
                        break;
                    }
                    word.push(ch);
                    chars.next();
                }
                tokens.push(Token { tok: Tok::Word(word), pos });
            }
        }
    }
    Ok(tokens)
}
