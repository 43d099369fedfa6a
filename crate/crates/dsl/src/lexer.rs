use crate::ast::Span;
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i64),
    Param,
    Var,
    Constraint,
    Relax,
    Forall,
    In,
    Sum,
    Hamming,
    Bool,
    IntKw,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Colon,
    DotDot,
    Le,
    Ge,
    EqEq,
    Plus,
    Minus,
    Star,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(n) => format!("name `{n}`"),
            Tok::Int(v) => format!("integer {v}"),
            Tok::Eof => "end of input".to_string(),
            other => format!("'{}'", other.text()),
        }
    }

    pub fn text(&self) -> &'static str {
        match self {
            Tok::Param => "param",
            Tok::Var => "var",
            Tok::Constraint => "constraint",
            Tok::Relax => "relax",
            Tok::Forall => "forall",
            Tok::In => "in",
            Tok::Sum => "sum",
            Tok::Hamming => "hamming",
            Tok::Bool => "bool",
            Tok::IntKw => "int",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::DotDot => "..",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::EqEq => "==",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
        }
    }
}

pub(crate) const KEYWORDS: &[&str] = &[
    "param",
    "var",
    "constraint",
    "relax",
    "forall",
    "in",
    "sum",
    "hamming",
    "bool",
    "int",
];

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "param" => Tok::Param,
        "var" => Tok::Var,
        "constraint" => Tok::Constraint,
        "relax" => Tok::Relax,
        "forall" => Tok::Forall,
        "in" => Tok::In,
        "sum" => Tok::Sum,
        "hamming" => Tok::Hamming,
        "bool" => Tok::Bool,
        "int" => Tok::IntKw,
        _ => return None,
    })
}

pub(crate) fn error_at(source: &str, span: Span, expected: &[&str], found: String) -> ParseError {
    let (line, column) = span.line_col(source);
    let mut expected: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
    expected.sort();
    expected.dedup();
    ParseError {
        span,
        line,
        column,
        expected,
        found,
    }
}

/// Splits `source` into tokens; `#` starts a comment running to the end of
/// the line. The last token is always `Eof`.
pub(crate) fn lex(source: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &source[start..i];
            let tok = keyword(word).unwrap_or_else(|| Tok::Ident(word.to_string()));
            out.push((tok, Span::new(start, i)));
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let span = Span::new(start, i);
            let value = source[start..i]
                .parse::<i64>()
                .map_err(|_| error_at(source, span, &["integer"], "an integer too large".into()))?;
            out.push((Tok::Int(value), span));
            continue;
        }
        let two = bytes.get(i + 1).copied();
        let (tok, len) = match (c, two) {
            (b'.', Some(b'.')) => (Tok::DotDot, 2),
            (b'<', Some(b'=')) => (Tok::Le, 2),
            (b'>', Some(b'=')) => (Tok::Ge, 2),
            (b'=', Some(b'=')) => (Tok::EqEq, 2),
            (b'[', _) => (Tok::LBracket, 1),
            (b']', _) => (Tok::RBracket, 1),
            (b'(', _) => (Tok::LParen, 1),
            (b')', _) => (Tok::RParen, 1),
            (b',', _) => (Tok::Comma, 1),
            (b':', _) => (Tok::Colon, 1),
            (b'+', _) => (Tok::Plus, 1),
            (b'-', _) => (Tok::Minus, 1),
            (b'*', _) => (Tok::Star, 1),
            (b'=' | b'<' | b'>', _) => {
                let want = match c {
                    b'=' => "'=='",
                    b'<' => "'<='",
                    _ => "'>='",
                };
                let span = Span::new(i, i + 1);
                return Err(error_at(source, span, &[want], format!("'{}'", c as char)));
            }
            _ => {
                let ch = source[i..].chars().next().expect("in bounds");
                let span = Span::new(i, i + ch.len_utf8());
                return Err(error_at(source, span, &["token"], format!("character {ch:?}")));
            }
        };
        out.push((tok, Span::new(start, start + len)));
        i += len;
    }
    out.push((Tok::Eof, Span::new(source.len(), source.len())));
    Ok(out)
}
