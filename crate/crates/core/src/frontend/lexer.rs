use std::fmt;

use num_bigint::BigUint;

use super::ParseError;

/// Line/column position of a token or s-expression, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub fn new(line: u32, column: u32) -> Self {
        Span { line, column }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    LParen,
    RParen,
    /// Simple or quoted symbol; quoting bars are stripped.
    Symbol(String),
    /// Keyword without the leading colon.
    Keyword(String),
    Numeral(BigUint),
    Decimal(String),
    /// Digits after `#x`.
    Hexadecimal(String),
    /// Digits after `#b`.
    Binary(String),
    /// String literal contents with `""` escapes resolved.
    StringLit(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannedToken {
    pub token: Token,
    pub span: Span,
}

pub(crate) fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c)
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span::new(self.line, self.column)
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }
}

/// Splits SMT-LIB text into tokens. Whitespace and `;` comments are dropped.
/// Parenthesis balance is not checked here.
pub fn tokenize(input: &str) -> Result<Vec<SpannedToken>, ParseError> {
    let mut cur = Cursor {
        chars: input.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    while let Some(c) = cur.peek() {
        let span = cur.span();
        let token = match c {
            c if c.is_whitespace() => {
                cur.bump();
                continue;
            }
            ';' => {
                cur.take_while(|c| c != '\n');
                continue;
            }
            '(' => {
                cur.bump();
                Token::LParen
            }
            ')' => {
                cur.bump();
                Token::RParen
            }
            '"' => {
                cur.bump();
                let mut s = String::new();
                loop {
                    match cur.bump() {
                        None => {
                            return Err(ParseError::Lexical {
                                span,
                                message: "unterminated string literal".into(),
                            })
                        }
                        Some('"') if cur.peek() == Some('"') => {
                            cur.bump();
                            s.push('"');
                        }
                        Some('"') => break,
                        Some(c) => s.push(c),
                    }
                }
                Token::StringLit(s)
            }
            '|' => {
                cur.bump();
                let mut s = String::new();
                loop {
                    match cur.bump() {
                        None => {
                            return Err(ParseError::Lexical {
                                span,
                                message: "unterminated quoted symbol".into(),
                            })
                        }
                        Some('|') => break,
                        Some('\\') => {
                            return Err(ParseError::Lexical {
                                span,
                                message: "backslash is not allowed in a quoted symbol".into(),
                            })
                        }
                        Some(c) => s.push(c),
                    }
                }
                Token::Symbol(s)
            }
            ':' => {
                cur.bump();
                let name = cur.take_while(is_symbol_char);
                if name.is_empty() {
                    return Err(ParseError::Lexical {
                        span,
                        message: "empty keyword".into(),
                    });
                }
                Token::Keyword(name)
            }
            '#' => {
                cur.bump();
                match cur.bump() {
                    Some('x') => {
                        let digits = cur.take_while(|c| c.is_ascii_hexdigit());
                        if digits.is_empty() {
                            return Err(ParseError::Lexical {
                                span,
                                message: "empty hexadecimal literal".into(),
                            });
                        }
                        Token::Hexadecimal(digits)
                    }
                    Some('b') => {
                        let digits = cur.take_while(|c| c == '0' || c == '1');
                        if digits.is_empty() {
                            return Err(ParseError::Lexical {
                                span,
                                message: "empty binary literal".into(),
                            });
                        }
                        Token::Binary(digits)
                    }
                    _ => {
                        return Err(ParseError::Lexical {
                            span,
                            message: "expected `#x` or `#b` literal".into(),
                        })
                    }
                }
            }
            c if c.is_ascii_digit() => {
                let int = cur.take_while(|c| c.is_ascii_digit());
                if cur.peek() == Some('.') {
                    cur.bump();
                    let frac = cur.take_while(|c| c.is_ascii_digit());
                    if frac.is_empty() {
                        return Err(ParseError::Lexical {
                            span,
                            message: "decimal literal without fractional digits".into(),
                        });
                    }
                    Token::Decimal(format!("{int}.{frac}"))
                } else {
                    Token::Numeral(int.parse().expect("ascii digits"))
                }
            }
            c if is_symbol_char(c) => Token::Symbol(cur.take_while(is_symbol_char)),
            other => {
                return Err(ParseError::Lexical {
                    span,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        tokens.push(SpannedToken { token, span });
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(input: &str) -> Vec<Token> {
        tokenize(input).unwrap().into_iter().map(|t| t.token).collect()
    }

    #[test]
    fn check_sat() {
        assert_eq!(
            kinds("(check-sat)"),
            vec![Token::LParen, Token::Symbol("check-sat".into()), Token::RParen]
        );
    }

    #[test]
    fn indexed_nth_address() {
        assert_eq!(
            kinds("(_ nthAddr 1)"),
            vec![
                Token::LParen,
                Token::Symbol("_".into()),
                Token::Symbol("nthAddr".into()),
                Token::Numeral(1u32.into()),
                Token::RParen
            ]
        );
    }

    #[test]
    fn unbalanced_input_still_lexes() {
        let toks = kinds("(declare-heap Heap Addr");
        assert_eq!(toks.len(), 4);
    }

    #[test]
    fn comments_and_spans() {
        let toks = tokenize("; hello\n  (a |b c| :k \"x\"\"y\" 1.5 #x1F)").unwrap();
        assert_eq!(toks[0].span, Span::new(2, 3));
        assert_eq!(toks[2].token, Token::Symbol("b c".into()));
        assert_eq!(toks[3].token, Token::Keyword("k".into()));
        assert_eq!(toks[4].token, Token::StringLit("x\"y".into()));
        assert_eq!(toks[5].token, Token::Decimal("1.5".into()));
        assert_eq!(toks[6].token, Token::Hexadecimal("1F".into()));
    }

    #[test]
    fn unterminated_literals() {
        let err = tokenize("(a \"oops").unwrap_err();
        assert!(matches!(err, ParseError::Lexical { span, .. } if span == Span::new(1, 4)));
        assert!(tokenize("|abc").is_err());
    }
}
