//! Tokenizer and s-expression tree builder with source spans.

use std::fmt;

/// Location of a token or form in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceSpan {
    /// Byte offset of the first byte.
    pub start: usize,
    /// Byte offset one past the last byte.
    pub end: usize,
    /// 1-based line of `start`.
    pub line: usize,
    /// 1-based column (in characters) of `start`.
    pub column: usize,
}

impl SourceSpan {
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        SourceSpan { end: other.end.max(self.end), ..self }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Semantic,
}

/// A parse failure, always carrying the span it refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub kind: ErrorKind,
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

impl SyntaxError {
    pub fn syntax(span: SourceSpan, message: impl Into<String>) -> Self {
        Self::build(ErrorKind::Syntax, span, message.into(), Vec::new())
    }

    pub fn semantic(span: SourceSpan, message: impl Into<String>) -> Self {
        Self::build(ErrorKind::Semantic, span, message.into(), Vec::new())
    }

    pub fn expected(span: SourceSpan, found: &str, expected: &[&str]) -> Self {
        let list = expected.join(", ");
        Self::build(
            ErrorKind::Syntax,
            span,
            format!("expected {list}, found {found}"),
            expected.iter().map(|s| s.to_string()).collect(),
        )
    }

    fn build(kind: ErrorKind, span: SourceSpan, message: String, expected: Vec<String>) -> Self {
        let message = if message.is_empty() { "parse error".to_string() } else { message };
        SyntaxError { kind, span, message, expected }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ErrorKind::Syntax => "syntax error",
            ErrorKind::Semantic => "error",
        };
        write!(f, "{} at {}: {}", kind, self.span, self.message)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SexpKind {
    Atom(String),
    List(Vec<Sexp>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sexp {
    pub kind: SexpKind,
    pub span: SourceSpan,
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match &self.kind {
            SexpKind::Atom(a) => Some(a),
            SexpKind::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match &self.kind {
            SexpKind::List(items) => Some(items),
            SexpKind::Atom(_) => None,
        }
    }

    /// Lower-cased head atom of a list form, if any.
    pub fn head(&self) -> Option<String> {
        self.list().and_then(|items| items.first()).and_then(|h| h.atom()).map(str::to_lowercase)
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            SexpKind::Atom(a) => format!("`{a}`"),
            SexpKind::List(items) => match items.first().and_then(|h| h.atom()) {
                Some(h) => format!("`({h} ...)`"),
                None if items.is_empty() => "`()`".to_string(),
                None => "a list".to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0, line: 1, column: 1 }
    }

    fn here(&self) -> SourceSpan {
        SourceSpan { start: self.pos, end: self.pos, line: self.line, column: self.column }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.src[self.pos..].chars().next()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next_token(&mut self) -> Option<(Token, SourceSpan)> {
        loop {
            match self.peek()? {
                c if c.is_whitespace() => {
                    self.bump();
                }
                ';' => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        let mut span = self.here();
        let tok = match self.bump()? {
            '(' => Token::Open,
            ')' => Token::Close,
            _ => {
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    self.bump();
                }
                Token::Atom(self.src[span.start..self.pos].to_string())
            }
        };
        span.end = self.pos;
        Some((tok, span))
    }
}

/// Reads every top-level form of `src`.
pub fn read_all(src: &str) -> Result<Vec<Sexp>, SyntaxError> {
    let mut lexer = Lexer::new(src);
    let mut stack: Vec<(SourceSpan, Vec<Sexp>)> = Vec::new();
    let mut top = Vec::new();
    while let Some((tok, span)) = lexer.next_token() {
        match tok {
            Token::Open => stack.push((span, Vec::new())),
            Token::Close => {
                let (open, items) = stack.pop().ok_or_else(|| SyntaxError::syntax(span, "unmatched `)`"))?;
                let form = Sexp { kind: SexpKind::List(items), span: open.to(span) };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(form),
                    None => top.push(form),
                }
            }
            Token::Atom(a) => {
                let form = Sexp { kind: SexpKind::Atom(a), span };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(form),
                    None => top.push(form),
                }
            }
        }
    }
    if let Some((open, _)) = stack.pop() {
        let eof = lexer.here();
        return Err(SyntaxError {
            kind: ErrorKind::Syntax,
            span: open.to(eof),
            message: format!("unclosed `(` opened at {open}"),
            expected: vec![")".to_string()],
        });
    }
    Ok(top)
}

/// Reads exactly one top-level form.
pub fn read_one(src: &str) -> Result<Sexp, SyntaxError> {
    let mut forms = read_all(src)?.into_iter();
    let first = forms.next().ok_or_else(|| {
        let end = src.len();
        let line = src.lines().count().max(1);
        SyntaxError::expected(SourceSpan { start: end, end, line, column: 1 }, "end of input", &["("])
    })?;
    if let Some(extra) = forms.next() {
        return Err(SyntaxError::syntax(
            extra.span,
            format!("unexpected {} after the top-level form", extra.describe()),
        ));
    }
    Ok(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_spans() {
        let forms = read_all("(a (b c)) ; trailing\n(d)").unwrap();
        assert_eq!(forms.len(), 2);
        let inner = &forms[0].list().unwrap()[1];
        assert_eq!(inner.span.start, 3);
        assert_eq!(inner.span.end, 8);
        assert_eq!(forms[1].span.line, 2);
        assert_eq!(forms[1].span.column, 1);
    }

    #[test]
    fn unbalanced_input_is_an_error() {
        let e = read_all("(a (b)").unwrap_err();
        assert!(e.message.contains("unclosed"));
        assert_eq!(e.expected, vec![")"]);
        let e = read_all("a)").unwrap_err();
        assert_eq!(e.span.start, 1);
    }

    #[test]
    fn multibyte_columns() {
        let forms = read_all("(é\n  ü)").unwrap();
        let u = &forms[0].list().unwrap()[1];
        assert_eq!((u.span.line, u.span.column), (2, 3));
    }
}
