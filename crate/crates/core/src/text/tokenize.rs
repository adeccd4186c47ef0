use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub text: String,
    pub lower: String,
    pub index: usize,
}

/// Characters that always form a token on their own.
pub fn is_punct(c: char) -> bool {
    matches!(c, '?' | '.' | ',' | '!' | '\'' | '"' | '<' | '>' | '=')
}

/// Splits on whitespace and isolates punctuation and comparison symbols.
/// A `.` between two digits stays inside the numeral.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut pieces: Vec<String> = Vec::new();
    for word in text.split_whitespace() {
        let chars: Vec<char> = word.chars().collect();
        let mut current = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let decimal_point = c == '.'
                && i > 0
                && chars[i - 1].is_ascii_digit()
                && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit());
            if is_punct(c) && !decimal_point {
                if !current.is_empty() {
                    pieces.push(std::mem::take(&mut current));
                }
                pieces.push(c.to_string());
            } else {
                current.push(c);
            }
        }
        if !current.is_empty() {
            pieces.push(current);
        }
    }
    pieces
        .into_iter()
        .enumerate()
        .map(|(index, text)| Token { lower: text.to_lowercase(), text, index })
        .collect()
}

/// Whitespace-collapsed text with no spaces next to punctuation; the form
/// that [`detokenize`] reproduces.
pub fn normalize_text(text: &str) -> String {
    let collapsed = text.split_whitespace().collect::<Vec<_>>().join(" ");
    let chars: Vec<char> = collapsed.chars().collect();
    let mut out = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c == ' ' {
            let prev = i.checked_sub(1).map(|j| chars[j]);
            let next = chars.get(i + 1).copied();
            if prev.is_some_and(is_punct) || next.is_some_and(is_punct) {
                continue;
            }
        }
        out.push(c);
    }
    out
}

/// Joins tokens with single spaces, dropping the spaces next to punctuation tokens.
pub fn detokenize(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        let punct = |t: &Token| t.text.chars().count() == 1 && t.text.chars().all(is_punct);
        if i > 0 && !punct(t) && !punct(&tokens[i - 1]) {
            out.push(' ');
        }
        out.push_str(&t.text);
    }
    out
}
