use std::fmt;

use num_bigint::BigUint;

use super::lexer::{is_symbol_char, Span, SpannedToken, Token};
use super::ParseError;

#[derive(Debug, Clone)]
pub enum SExprKind {
    Symbol(String),
    Keyword(String),
    Numeral(BigUint),
    Decimal(String),
    Hexadecimal(String),
    Binary(String),
    Str(String),
    List(Vec<SExpr>),
}

/// An s-expression with the position of its first token.
///
/// Equality is structural: spans are ignored.
#[derive(Debug, Clone)]
pub struct SExpr {
    pub kind: SExprKind,
    pub span: Span,
}

impl PartialEq for SExprKind {
    fn eq(&self, other: &Self) -> bool {
        use SExprKind::*;
        match (self, other) {
            (Symbol(a), Symbol(b))
            | (Keyword(a), Keyword(b))
            | (Decimal(a), Decimal(b))
            | (Hexadecimal(a), Hexadecimal(b))
            | (Binary(a), Binary(b))
            | (Str(a), Str(b)) => a == b,
            (Numeral(a), Numeral(b)) => a == b,
            (List(a), List(b)) => a == b,
            _ => false,
        }
    }
}
impl Eq for SExprKind {}

impl PartialEq for SExpr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}
impl Eq for SExpr {}

impl SExpr {
    pub fn new(kind: SExprKind, span: Span) -> Self {
        SExpr { kind, span }
    }

    pub fn symbol(name: impl Into<String>) -> Self {
        SExpr::new(SExprKind::Symbol(name.into()), Span::default())
    }

    pub fn keyword(name: impl Into<String>) -> Self {
        SExpr::new(SExprKind::Keyword(name.into()), Span::default())
    }

    pub fn numeral(n: impl Into<BigUint>) -> Self {
        SExpr::new(SExprKind::Numeral(n.into()), Span::default())
    }

    pub fn list(items: Vec<SExpr>) -> Self {
        SExpr::new(SExprKind::List(items), Span::default())
    }

    /// `(head args...)` with a symbol head.
    pub fn app(head: &str, args: impl IntoIterator<Item = SExpr>) -> Self {
        let mut items = vec![SExpr::symbol(head)];
        items.extend(args);
        SExpr::list(items)
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match &self.kind {
            SExprKind::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match &self.kind {
            SExprKind::List(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_numeral(&self) -> Option<&BigUint> {
        match &self.kind {
            SExprKind::Numeral(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_symbol(&self, name: &str) -> bool {
        self.as_symbol() == Some(name)
    }

    /// Visits every symbol atom in the tree.
    pub fn for_each_symbol(&self, f: &mut impl FnMut(&str)) {
        match &self.kind {
            SExprKind::Symbol(s) => f(s),
            SExprKind::List(items) => items.iter().for_each(|i| i.for_each_symbol(f)),
            _ => {}
        }
    }

    fn flat_len(&self) -> usize {
        match &self.kind {
            SExprKind::List(items) => {
                2 + items.iter().map(SExpr::flat_len).sum::<usize>() + items.len().saturating_sub(1)
            }
            _ => self.to_string().len(),
        }
    }

    /// Deterministic layout: flat when it fits in `width` columns, otherwise the
    /// head and first argument stay on the opening line and the rest are indented.
    pub fn pretty(&self, width: usize) -> String {
        let mut out = String::new();
        self.pretty_into(&mut out, 0, width);
        out
    }

    fn pretty_into(&self, out: &mut String, indent: usize, width: usize) {
        let items = match &self.kind {
            SExprKind::List(items) if indent + self.flat_len() > width && items.len() > 2 => items,
            _ => {
                out.push_str(&self.to_string());
                return;
            }
        };
        out.push('(');
        let inner = indent + 2;
        let mut first = 0;
        if items[0].as_list().is_none() {
            out.push_str(&items[0].to_string());
            first = 1;
        }
        for (i, item) in items.iter().enumerate().skip(first) {
            if i > 0 || first == 1 {
                out.push('\n');
                out.push_str(&" ".repeat(inner));
            }
            item.pretty_into(out, inner, width);
        }
        out.push(')');
    }
}

fn needs_quotes(s: &str) -> bool {
    s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) || !s.chars().all(is_symbol_char)
}

/// Prints a symbol, adding `|...|` quotes when it is not a simple symbol.
pub fn quote_symbol(s: &str) -> String {
    if needs_quotes(s) {
        format!("|{s}|")
    } else {
        s.to_string()
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SExprKind::Symbol(s) => write!(f, "{}", quote_symbol(s)),
            SExprKind::Keyword(k) => write!(f, ":{k}"),
            SExprKind::Numeral(n) => write!(f, "{n}"),
            SExprKind::Decimal(d) => write!(f, "{d}"),
            SExprKind::Hexadecimal(h) => write!(f, "#x{h}"),
            SExprKind::Binary(b) => write!(f, "#b{b}"),
            SExprKind::Str(s) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            SExprKind::List(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Groups tokens into top-level s-expressions.
pub fn parse_sexprs(tokens: &[SpannedToken]) -> Result<Vec<SExpr>, ParseError> {
    let mut stack: Vec<(Span, Vec<SExpr>)> = Vec::new();
    let mut top = Vec::new();
    for tok in tokens {
        let kind = match &tok.token {
            Token::LParen => {
                stack.push((tok.span, Vec::new()));
                continue;
            }
            Token::RParen => {
                let (open, items) = stack.pop().ok_or_else(|| ParseError::Syntax {
                    span: tok.span,
                    message: "unbalanced `)`".into(),
                })?;
                let e = SExpr::new(SExprKind::List(items), open);
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(e),
                    None => top.push(e),
                }
                continue;
            }
            Token::Symbol(s) => SExprKind::Symbol(s.clone()),
            Token::Keyword(k) => SExprKind::Keyword(k.clone()),
            Token::Numeral(n) => SExprKind::Numeral(n.clone()),
            Token::Decimal(d) => SExprKind::Decimal(d.clone()),
            Token::Hexadecimal(h) => SExprKind::Hexadecimal(h.clone()),
            Token::Binary(b) => SExprKind::Binary(b.clone()),
            Token::StringLit(s) => SExprKind::Str(s.clone()),
        };
        let e = SExpr::new(kind, tok.span);
        match stack.last_mut() {
            Some((_, parent)) => parent.push(e),
            None => top.push(e),
        }
    }
    if let Some((open, _)) = stack.pop() {
        return Err(ParseError::Syntax {
            span: open,
            message: "unbalanced `(`: list is never closed".into(),
        });
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::super::lexer::tokenize;
    use super::*;

    fn parse(s: &str) -> Vec<SExpr> {
        parse_sexprs(&tokenize(s).unwrap()).unwrap()
    }

    #[test]
    fn nested_lists_and_spans() {
        let es = parse("(a (b c))\n(d)");
        assert_eq!(es.len(), 2);
        assert_eq!(es[1].span, Span::new(2, 1));
        assert_eq!(es[0].to_string(), "(a (b c))");
    }

    #[test]
    fn unbalanced() {
        let err = parse_sexprs(&tokenize("(a (b)").unwrap()).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { span, .. } if span == Span::new(1, 1)));
        let err = parse_sexprs(&tokenize("a)").unwrap()).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { span, .. } if span == Span::new(1, 2)));
    }

    #[test]
    fn quoting() {
        assert_eq!(quote_symbol("abc"), "abc");
        assert_eq!(quote_symbol("a b"), "|a b|");
        assert_eq!(quote_symbol("1x"), "|1x|");
        let e = parse("(|a b| \"q\"\"\")");
        assert_eq!(parse(&e[0].to_string()), e);
    }

    #[test]
    fn pretty_reparses() {
        let e = parse("(define-fun f ((x Int) (y Int)) Int (ite (> x y) (+ x (* 2 y)) (- y x)))").remove(0);
        let p = e.pretty(20);
        assert!(p.contains('\n'));
        assert_eq!(parse(&p).remove(0), e);
    }
}
