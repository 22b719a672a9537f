//! Lexing, parsing and printing of SMT-LIB v2.6 scripts extended with the
//! `declare-heap` command.
//!
//! Printing is semantic, not lexical: comments and original whitespace are
//! dropped, and `parse(print(cmds)) == cmds` holds for every command list.

mod command;
mod lexer;
mod sexpr;

pub use command::{Command, ConstructorDec, Dialect, HeapDeclSyntax, SelectorDec, SortDec, SortedVar};
pub use lexer::{tokenize, Span, SpannedToken, Token};
pub use sexpr::{parse_sexprs, quote_symbol, SExpr, SExprKind};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{span}: lexical error: {message}")]
    Lexical { span: Span, message: String },
    #[error("{span}: syntax error: {message}")]
    Syntax { span: Span, message: String },
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::Lexical { span, .. } | ParseError::Syntax { span, .. } => *span,
        }
    }
}

/// Line width used by [`print_script`].
pub const PRINT_WIDTH: usize = 100;

pub fn parse_script(tokens: &[SpannedToken]) -> Result<Vec<Command>, ParseError> {
    parse_script_in(tokens, Dialect::Heap)
}

pub fn parse_script_in(tokens: &[SpannedToken], dialect: Dialect) -> Result<Vec<Command>, ParseError> {
    parse_sexprs(tokens)?
        .iter()
        .map(|e| Command::from_sexpr(e, dialect))
        .collect()
}

/// Tokenizes and parses in one step.
pub fn parse_str(input: &str) -> Result<Vec<Command>, ParseError> {
    parse_script(&tokenize(input)?)
}

pub fn parse_str_in(input: &str, dialect: Dialect) -> Result<Vec<Command>, ParseError> {
    parse_script_in(&tokenize(input)?, dialect)
}

/// Parses a single term or sort.
pub fn parse_sexpr(input: &str) -> Result<SExpr, ParseError> {
    let mut es = parse_sexprs(&tokenize(input)?)?;
    match es.len() {
        1 => Ok(es.remove(0)),
        n => Err(ParseError::Syntax {
            span: es.get(1).map(|e| e.span).unwrap_or_default(),
            message: format!("expected exactly one s-expression, found {n}"),
        }),
    }
}

/// One command per line (long commands wrap with indentation), LF endings.
pub fn print_script(commands: &[Command]) -> String {
    let mut out = String::new();
    for c in commands {
        out.push_str(&c.to_sexpr().pretty(PRINT_WIDTH));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_script_prints_empty() {
        assert_eq!(print_script(&[]), "");
        assert_eq!(parse_str("  ; nothing\n").unwrap(), vec![]);
    }

    #[test]
    fn declare_heap_with_zero_sorts() {
        let cmds = parse_str("(declare-heap H A O (O_E) () ())").unwrap();
        let Command::DeclareHeap(h) = &cmds[0] else {
            panic!("not a heap declaration")
        };
        assert_eq!(h.heap_sort, "H");
        assert_eq!(h.addr_sort, "A");
        assert!(h.sort_decs.is_empty() && h.datatypes.is_empty());
    }

    #[test]
    fn declare_heap_count_mismatch() {
        let err = parse_str("(declare-heap H A O (O_E) ((X 0)) ())").unwrap_err();
        assert!(err.to_string().contains("1 sort declarations but 0 constructor lists"));
        assert_eq!(err.span(), Span::new(1, 1));
    }

    #[test]
    fn declare_heap_missing_default() {
        let err = parse_str("(declare-heap H A O ((X 0)) (((c))))").unwrap_err();
        assert!(err.to_string().contains("declare-heap"), "{err}");
    }

    #[test]
    fn plain_dialect_rejects_heaps() {
        assert!(parse_str_in("(declare-heap H A O (O_E) () ())", Dialect::Plain).is_err());
    }

    #[test]
    fn opaque_commands_pass_through() {
        let src = "(set-info :status sat)\n(set-option :produce-models true)\n";
        let cmds = parse_str(src).unwrap();
        assert!(matches!(cmds[0], Command::Opaque(_)));
        assert_eq!(print_script(&cmds), src);
    }

    #[test]
    fn par_is_rejected() {
        let err = parse_str("(declare-datatypes ((L 1)) ((par (T) ((nil) (cons (hd T) (tl (L T)))))))").unwrap_err();
        assert!(err.to_string().contains("par"));
    }

    #[test]
    fn error_spans_lie_in_input() {
        for src in ["(a", "(a))", "(assert)", "(declare-heap H)", "(x \"y"] {
            let err = parse_str(src).unwrap_err();
            let span = err.span();
            let lines: Vec<&str> = src.split('\n').collect();
            assert!(span.line >= 1 && (span.line as usize) <= lines.len());
            assert!(span.column >= 1 && (span.column as usize) <= lines[span.line as usize - 1].len());
        }
    }
}
