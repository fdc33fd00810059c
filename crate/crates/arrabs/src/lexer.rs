//! Tokenizer for the C subset. Comments and preprocessor lines are
//! stripped before tokens are produced.

use crate::ast::Span;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    KwStruct,
    KwInt,
    KwUnsigned,
    KwFor,
    KwIf,
    KwElse,
    KwAssert,
    KwMain,
    KwVoid,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Question,
    Colon,
    Assign,
    PlusPlus,
    MinusMinus,
    PlusAssign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Bang,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Int(v) => write!(f, "integer `{v}`"),
            TokenKind::KwStruct => write!(f, "`struct`"),
            TokenKind::KwInt => write!(f, "`int`"),
            TokenKind::KwUnsigned => write!(f, "`unsigned`"),
            TokenKind::KwFor => write!(f, "`for`"),
            TokenKind::KwIf => write!(f, "`if`"),
            TokenKind::KwElse => write!(f, "`else`"),
            TokenKind::KwAssert => write!(f, "`assert`"),
            TokenKind::KwMain => write!(f, "`main`"),
            TokenKind::KwVoid => write!(f, "`void`"),
            TokenKind::LBrace => write!(f, "`{{`"),
            TokenKind::RBrace => write!(f, "`}}`"),
            TokenKind::LParen => write!(f, "`(`"),
            TokenKind::RParen => write!(f, "`)`"),
            TokenKind::LBracket => write!(f, "`[`"),
            TokenKind::RBracket => write!(f, "`]`"),
            TokenKind::Semi => write!(f, "`;`"),
            TokenKind::Comma => write!(f, "`,`"),
            TokenKind::Dot => write!(f, "`.`"),
            TokenKind::Question => write!(f, "`?`"),
            TokenKind::Colon => write!(f, "`:`"),
            TokenKind::Assign => write!(f, "`=`"),
            TokenKind::PlusPlus => write!(f, "`++`"),
            TokenKind::MinusMinus => write!(f, "`--`"),
            TokenKind::PlusAssign => write!(f, "`+=`"),
            TokenKind::Plus => write!(f, "`+`"),
            TokenKind::Minus => write!(f, "`-`"),
            TokenKind::Star => write!(f, "`*`"),
            TokenKind::Slash => write!(f, "`/`"),
            TokenKind::Percent => write!(f, "`%`"),
            TokenKind::EqEq => write!(f, "`==`"),
            TokenKind::NotEq => write!(f, "`!=`"),
            TokenKind::Lt => write!(f, "`<`"),
            TokenKind::Le => write!(f, "`<=`"),
            TokenKind::Gt => write!(f, "`>`"),
            TokenKind::Ge => write!(f, "`>=`"),
            TokenKind::AndAnd => write!(f, "`&&`"),
            TokenKind::OrOr => write!(f, "`||`"),
            TokenKind::Bang => write!(f, "`!`"),
            TokenKind::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub span: Span,
    pub message: String,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

/// Removes `//` and `/* */` comments and `#`-directive lines, preserving
/// line/column positions of everything else.
fn strip_comments(source: &str) -> String {
    let mut out = String::with_capacity(source.len());
    let bytes: Vec<char> = source.chars().collect();
    let mut i = 0;
    let mut at_line_start = true;
    while i < bytes.len() {
        let c = bytes[i];
        if at_line_start && c == '#' {
            while i < bytes.len() && bytes[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && i + 1 < bytes.len() && bytes[i + 1] == '/' {
            while i < bytes.len() && bytes[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && i + 1 < bytes.len() && bytes[i + 1] == '*' {
            i += 2;
            while i + 1 < bytes.len() && !(bytes[i] == '*' && bytes[i + 1] == '/') {
                if bytes[i] == '\n' {
                    out.push('\n');
                } else {
                    out.push(' ');
                }
                i += 1;
            }
            i = (i + 2).min(bytes.len());
            out.push(' ');
            out.push(' ');
            continue;
        }
        if c == '\n' {
            at_line_start = true;
        } else if !c.is_whitespace() {
            at_line_start = false;
        }
        out.push(c);
        i += 1;
    }
    out
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let text = strip_comments(source);
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! push {
        ($kind:expr, $len:expr) => {{
            tokens.push(Token {
                kind: $kind,
                span: Span::new(line, col),
            });
            i += $len;
            col += $len as u32;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let two: Option<(char, char)> = chars.get(i + 1).map(|&n| (c, n));
        match two {
            Some(('+', '+')) => {
                push!(TokenKind::PlusPlus, 2);
                continue;
            }
            Some(('-', '-')) => {
                push!(TokenKind::MinusMinus, 2);
                continue;
            }
            Some(('+', '=')) => {
                push!(TokenKind::PlusAssign, 2);
                continue;
            }
            Some(('=', '=')) => {
                push!(TokenKind::EqEq, 2);
                continue;
            }
            Some(('!', '=')) => {
                push!(TokenKind::NotEq, 2);
                continue;
            }
            Some(('<', '=')) => {
                push!(TokenKind::Le, 2);
                continue;
            }
            Some(('>', '=')) => {
                push!(TokenKind::Ge, 2);
                continue;
            }
            Some(('&', '&')) => {
                push!(TokenKind::AndAnd, 2);
                continue;
            }
            Some(('|', '|')) => {
                push!(TokenKind::OrOr, 2);
                continue;
            }
            _ => {}
        }
        match c {
            '{' => push!(TokenKind::LBrace, 1),
            '}' => push!(TokenKind::RBrace, 1),
            '(' => push!(TokenKind::LParen, 1),
            ')' => push!(TokenKind::RParen, 1),
            '[' => push!(TokenKind::LBracket, 1),
            ']' => push!(TokenKind::RBracket, 1),
            ';' => push!(TokenKind::Semi, 1),
            ',' => push!(TokenKind::Comma, 1),
            '.' => push!(TokenKind::Dot, 1),
            '?' => push!(TokenKind::Question, 1),
            ':' => push!(TokenKind::Colon, 1),
            '=' => push!(TokenKind::Assign, 1),
            '+' => push!(TokenKind::Plus, 1),
            '-' => push!(TokenKind::Minus, 1),
            '*' => push!(TokenKind::Star, 1),
            '/' => push!(TokenKind::Slash, 1),
            '%' => push!(TokenKind::Percent, 1),
            '<' => push!(TokenKind::Lt, 1),
            '>' => push!(TokenKind::Gt, 1),
            '!' => push!(TokenKind::Bang, 1),
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let value: i64 = s.parse().map_err(|_| LexError {
                    span: Span::new(line, col),
                    message: format!("integer literal `{s}` out of range"),
                })?;
                tokens.push(Token {
                    kind: TokenKind::Int(value),
                    span: Span::new(line, col),
                });
                col += (i - start) as u32;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let kind = match s.as_str() {
                    "struct" => TokenKind::KwStruct,
                    "int" => TokenKind::KwInt,
                    "unsigned" => TokenKind::KwUnsigned,
                    "for" => TokenKind::KwFor,
                    "if" => TokenKind::KwIf,
                    "else" => TokenKind::KwElse,
                    "assert" => TokenKind::KwAssert,
                    "main" => TokenKind::KwMain,
                    "void" => TokenKind::KwVoid,
                    _ => TokenKind::Ident(s),
                };
                tokens.push(Token {
                    kind,
                    span: Span::new(line, col),
                });
                col += (i - start) as u32;
            }
            _ => {
                return Err(LexError {
                    span: Span::new(line, col),
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        span: Span::new(line, col),
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_directives_are_stripped() {
        let toks = tokenize("#include <assert.h>\nint x; // trailing\n/* block\n*/ x = 1;")
            .expect("lexes");
        let kinds: Vec<_> = toks.iter().map(|t| &t.kind).collect();
        assert!(kinds.contains(&&TokenKind::KwInt));
        assert!(!kinds.iter().any(|k| matches!(k, TokenKind::Ident(s) if s == "include")));
    }

    #[test]
    fn spans_track_lines_and_columns() {
        let toks = tokenize("int x;\nx = 5;").expect("lexes");
        let x_assign = toks
            .iter()
            .find(|t| matches!(t.kind, TokenKind::Assign))
            .unwrap();
        assert_eq!(x_assign.span, Span::new(2, 3));
    }

    #[test]
    fn two_char_operators_win_over_singles() {
        let toks = tokenize("i++; a <= b; c != d;").expect("lexes");
        let kinds: Vec<_> = toks.iter().map(|t| t.kind.clone()).collect();
        assert!(kinds.contains(&TokenKind::PlusPlus));
        assert!(kinds.contains(&TokenKind::Le));
        assert!(kinds.contains(&TokenKind::NotEq));
    }
}
