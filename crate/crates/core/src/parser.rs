//! Recursive-descent parser for the ASCII formula language.
//!
//! ```text
//! formula := iff
//! iff     := implies ("<->" implies)*        left-associative
//! implies := or ("->" implies)?              right-associative
//! or      := and ("|" and)*
//! and     := not ("&" not)*
//! not     := "!" not | atom
//! atom    := IDENT | "true" | "false" | "(" formula ")"
//! IDENT   := [A-Za-z_][A-Za-z0-9_]*          except "true" / "false"
//! ```
//!
//! `#` starts a comment running to the end of the line.

use std::fmt;

use thiserror::Error;

use crate::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message} (found {found})")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub found: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
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
    Eof,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(name) => write!(f, "identifier `{name}`"),
            Token::True => f.write_str("`true`"),
            Token::False => f.write_str("`false`"),
            Token::Not => f.write_str("`!`"),
            Token::And => f.write_str("`&`"),
            Token::Or => f.write_str("`|`"),
            Token::Implies => f.write_str("`->`"),
            Token::Iff => f.write_str("`<->`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut line_start) = (0, 1, 0);

    while i < chars.len() {
        let c = chars[i];
        let column = i - line_start + 1;
        let (token, width) = match c {
            '\n' => {
                i += 1;
                line += 1;
                line_start = i;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '!' => (Token::Not, 1),
            '&' => (Token::And, 1),
            '|' => (Token::Or, 1),
            '(' => (Token::LParen, 1),
            ')' => (Token::RParen, 1),
            '-' if chars.get(i + 1) == Some(&'>') => (Token::Implies, 2),
            '<' if chars[i..].starts_with(&['<', '-', '>']) => (Token::Iff, 3),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let len = chars[i..]
                    .iter()
                    .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                    .count();
                let word: String = chars[i..i + len].iter().collect();
                let token = match word.as_str() {
                    "true" => Token::True,
                    "false" => Token::False,
                    _ => Token::Ident(word),
                };
                (token, len)
            }
            _ => {
                return Err(ParseError {
                    line,
                    column,
                    found: format!("`{c}`"),
                    message: "unexpected character".into(),
                })
            }
        };
        tokens.push(Spanned {
            token,
            line,
            column,
        });
        i += width;
    }
    tokens.push(Spanned {
        token: Token::Eof,
        line,
        column: i - line_start + 1,
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].token
    }

    fn bump(&mut self) -> Token {
        let token = self.tokens[self.pos].token.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        token
    }

    fn error(&self, message: &str) -> ParseError {
        let current = &self.tokens[self.pos];
        ParseError {
            line: current.line,
            column: current.column,
            found: current.token.to_string(),
            message: message.into(),
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implies()?;
        while *self.peek() == Token::Iff {
            self.bump();
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Token::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.and()?];
        while *self.peek() == Token::Or {
            self.bump();
            parts.push(self.and()?);
        }
        Ok(Formula::disj(parts))
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.not()?];
        while *self.peek() == Token::And {
            self.bump();
            parts.push(self.not()?);
        }
        Ok(Formula::conj(parts))
    }

    fn not(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Token::Not {
            self.bump();
            return Ok(Formula::not(self.not()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Token::Ident(name) => {
                self.bump();
                Ok(Formula::Atom(name))
            }
            Token::True => {
                self.bump();
                Ok(Formula::top())
            }
            Token::False => {
                self.bump();
                Ok(Formula::bottom())
            }
            Token::LParen => {
                self.bump();
                let inner = self.iff()?;
                if *self.peek() != Token::RParen {
                    return Err(self.error("expected `)`"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error("expected a variable, constant or `(`")),
        }
    }
}

/// Parses one formula; the whole input must be consumed.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
    };
    let formula = parser.iff()?;
    if *parser.peek() != Token::Eof {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(formula)
}

/// True when `name` is a legal variable identifier.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "true"
        && name != "false"
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn constants_and_chains() {
        assert_eq!(parse("true").unwrap(), Formula::Const(true));
        assert_eq!(
            parse("S & T & P").unwrap(),
            Formula::And(vec![atom("S"), atom("T"), atom("P")])
        );
    }

    #[test]
    fn pool_constraint() {
        let mu = parse("((S&T)|(S&P)|(T&P)) -> I").unwrap();
        let pair = |a, b| Formula::And(vec![atom(a), atom(b)]);
        assert_eq!(
            mu,
            Formula::implies(
                Formula::Or(vec![pair("S", "T"), pair("S", "P"), pair("T", "P")]),
                atom("I")
            )
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse("!a & b | c").unwrap(),
            Formula::Or(vec![
                Formula::And(vec![Formula::not(atom("a")), atom("b")]),
                atom("c")
            ])
        );
        assert_eq!(
            parse("a -> b -> c").unwrap(),
            Formula::implies(atom("a"), Formula::implies(atom("b"), atom("c")))
        );
        assert_eq!(
            parse("a <-> b <-> c").unwrap(),
            Formula::iff(Formula::iff(atom("a"), atom("b")), atom("c"))
        );
        assert_eq!(
            parse("a | b <-> c -> d").unwrap(),
            Formula::iff(
                Formula::Or(vec![atom("a"), atom("b")]),
                Formula::implies(atom("c"), atom("d"))
            )
        );
    }

    #[test]
    fn comments_and_whitespace() {
        let f = parse("p # first\n  &\tq # second").unwrap();
        assert_eq!(f, Formula::And(vec![atom("p"), atom("q")]));
    }

    #[test]
    fn errors_carry_position_and_token() {
        let err = parse("p &\n  )").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        assert_eq!(err.found, "`)`");

        let err = parse("p q").unwrap_err();
        assert_eq!((err.line, err.column), (1, 3));
        assert!(err.found.contains("`q`"));

        let err = parse("p $ q").unwrap_err();
        assert_eq!(err.column, 3);

        let err = parse("(p").unwrap_err();
        assert_eq!(err.found, "end of input");

        assert!(parse("").is_err());
        assert!(parse("p -").is_err());
    }

    #[test]
    fn identifier_rule() {
        assert!(is_identifier("_x1"));
        assert!(is_identifier("S"));
        assert!(!is_identifier("1x"));
        assert!(!is_identifier("true"));
        assert!(!is_identifier(""));
    }
}
