use thiserror::Error;

use super::formula::{Atom, Formula};

/// Syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Comma,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn next_token(&mut self) -> Result<(Token, u32, u32), ParseError> {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.bump();
        }
        let (line, col) = (self.line, self.col);
        let tok = match self.peek() {
            None => Token::Eof,
            Some(b'!') => {
                self.bump();
                Token::Not
            }
            Some(b'&') => {
                self.bump();
                Token::And
            }
            Some(b'|') => {
                self.bump();
                Token::Or
            }
            Some(b'(') => {
                self.bump();
                Token::LParen
            }
            Some(b')') => {
                self.bump();
                Token::RParen
            }
            Some(b',') => {
                self.bump();
                Token::Comma
            }
            Some(b'-') => {
                self.bump();
                if self.peek() == Some(b'>') {
                    self.bump();
                    Token::Implies
                } else {
                    return Err(self.error("expected '>' after '-'"));
                }
            }
            Some(b'<') => {
                self.bump();
                if self.peek() == Some(b'-') {
                    self.bump();
                    if self.peek() == Some(b'>') {
                        self.bump();
                        Token::Iff
                    } else {
                        return Err(self.error("expected '>' after '<-'"));
                    }
                } else {
                    return Err(self.error("expected '-' after '<'"));
                }
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.bump();
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match word {
                    "true" => Token::True,
                    "false" => Token::False,
                    _ => Token::Ident(word.to_string()),
                }
            }
            Some(c) => {
                return Err(self.error(format!("unexpected character {:?}", c as char)));
            }
        };
        Ok((tok, line, col))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Token,
    line: u32,
    col: u32,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let (tok, line, col) = lexer.next_token()?;
        Ok(Parser {
            lexer,
            tok,
            line,
            col,
        })
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let (tok, line, col) = self.lexer.next_token()?;
        self.tok = tok;
        self.line = line;
        self.col = col;
        Ok(())
    }

    fn eat(&mut self, expected: Token, what: &str) -> Result<(), ParseError> {
        if self.tok == expected {
            self.advance()
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    // iff := imp ("<->" imp)*, right-associative
    fn iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.imp()?;
        if self.tok == Token::Iff {
            self.advance()?;
            let rhs = self.iff()?;
            Ok(Formula::iff(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    // imp := or ("->" or)*, right-associative
    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if self.tok == Token::Implies {
            self.advance()?;
            let rhs = self.imp()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    // or := and ("|" and)*, left-associative
    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        while self.tok == Token::Or {
            self.advance()?;
            lhs = Formula::or(lhs, self.conj()?);
        }
        Ok(lhs)
    }

    // and := unary ("&" unary)*, left-associative
    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.tok == Token::And {
            self.advance()?;
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.tok.clone() {
            Token::Not => {
                self.advance()?;
                Ok(Formula::not(self.unary()?))
            }
            Token::LParen => {
                self.advance()?;
                let inner = self.iff()?;
                self.eat(Token::RParen, "')'")?;
                Ok(inner)
            }
            Token::True => {
                self.advance()?;
                Ok(Formula::Top)
            }
            Token::False => {
                self.advance()?;
                Ok(Formula::Bot)
            }
            Token::Ident(name) => {
                self.advance()?;
                let mut args = Vec::new();
                if self.tok == Token::LParen {
                    self.advance()?;
                    loop {
                        match self.tok.clone() {
                            Token::Ident(arg) => {
                                args.push(arg);
                                self.advance()?;
                            }
                            _ => return Err(self.error("expected constant identifier")),
                        }
                        match self.tok {
                            Token::Comma => self.advance()?,
                            Token::RParen => {
                                self.advance()?;
                                break;
                            }
                            _ => return Err(self.error("expected ',' or ')'")),
                        }
                    }
                }
                Ok(Formula::atom(Atom::new(name, args)))
            }
            _ => Err(self.error("expected formula")),
        }
    }
}

/// Parses a formula in the text grammar.
///
/// Precedence, strongest first: `!`, `&`, `|`, `->`, `<->`; the arrows are
/// right-associative, `&` and `|` left-associative. `true` and `false` are
/// reserved words.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser::new(text)?;
    let formula = parser.iff()?;
    if parser.tok != Token::Eof {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keywords() {
        assert_eq!(parse_formula("true").unwrap(), Formula::Top);
        assert_eq!(parse_formula("false").unwrap(), Formula::Bot);
    }

    #[test]
    fn precedence_forces_shape() {
        let f = parse_formula("!p & (q -> r)").unwrap();
        let expected = Formula::and(
            Formula::not(Formula::prop("p")),
            Formula::implies(Formula::prop("q"), Formula::prop("r")),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn parses_ground_atoms() {
        let f = parse_formula("is_legal_action(a1)").unwrap();
        assert_eq!(
            f,
            Formula::atom(Atom::new("is_legal_action", vec!["a1".into()]))
        );
    }

    #[test]
    fn arrow_is_right_associative() {
        let f = parse_formula("p -> q -> r").unwrap();
        let expected = Formula::implies(
            Formula::prop("p"),
            Formula::implies(Formula::prop("q"), Formula::prop("r")),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn and_binds_tighter_than_or() {
        let f = parse_formula("p | q & r").unwrap();
        let expected = Formula::or(
            Formula::prop("p"),
            Formula::and(Formula::prop("q"), Formula::prop("r")),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn reports_position() {
        let err = parse_formula("p &\n& q").unwrap_err();
        assert_eq!((err.line, err.col), (2, 1));
    }

    #[test]
    fn rejects_trailing_input() {
        assert!(parse_formula("p q").is_err());
        assert!(parse_formula("").is_err());
        assert!(parse_formula("p &").is_err());
    }
}
