//! Parser for the `.ltlf` text format.
//!
//! Operators, loosest first: `<->`, `->`, `|`, `&`, the binary temporal
//! operators `U R S T`, then prefix operators `! X N F G Y Z O H`. Every
//! binary operator is right-associative. `#` starts a line comment.

use thiserror::Error;

use crate::formula::{is_reserved, Formula, Spec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: identifier `{name}` is reserved")]
    Reserved { line: usize, column: usize, name: String },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept `end`, activation and history variables. Used when reading
    /// back translated formulas.
    pub allow_reserved: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    LParen,
    RParen,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Unary(char),
    Binary(char),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let push = |out: &mut Vec<Token>, tok: Tok| out.push(Token { tok, line: start.0, column: start.1 });
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            '!' => push(&mut out, Tok::Not),
            '&' => push(&mut out, Tok::And),
            '|' => push(&mut out, Tok::Or),
            '-' if chars.get(i + 1) == Some(&'>') => {
                push(&mut out, Tok::Implies);
                i += 2;
                col += 2;
                continue;
            }
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push(&mut out, Tok::Iff);
                i += 3;
                col += 3;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" | "N" | "F" | "G" | "Y" | "Z" | "O" | "H" => Tok::Unary(c),
                    "U" | "R" | "S" | "T" => Tok::Binary(c),
                    _ => Tok::Ident(word),
                };
                push(&mut out, tok);
                col += j - i;
                i = j;
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    line,
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
        col += 1;
    }
    out.push(Token { tok: Tok::Eof, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    opts: ParseOptions,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError::Syntax { line: t.line, column: t.column, message: message.into() })
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implies()?;
        if self.peek().tok == Tok::Iff {
            self.bump();
            return Ok(Formula::iff(lhs, self.iff()?));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.peek().tok == Tok::Implies {
            self.bump();
            return Ok(Formula::implies(lhs, self.implies()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.and()?;
        if self.peek().tok == Tok::Or {
            self.bump();
            return Ok(Formula::or(lhs, self.or()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.temporal()?;
        if self.peek().tok == Tok::And {
            self.bump();
            return Ok(Formula::and(lhs, self.and()?));
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if let Tok::Binary(op) = self.peek().tok {
            self.bump();
            let rhs = self.temporal()?;
            return Ok(match op {
                'U' => Formula::until(lhs, rhs),
                'R' => Formula::release(lhs, rhs),
                'S' => Formula::since(lhs, rhs),
                _ => Formula::trigger(lhs, rhs),
            });
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().tok.clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Unary(op) => {
                self.bump();
                let arg = self.unary()?;
                Ok(match op {
                    'X' => Formula::next(arg),
                    'N' => Formula::weak_next(arg),
                    'F' => Formula::eventually(arg),
                    'G' => Formula::globally(arg),
                    'Y' => Formula::yesterday(arg),
                    'Z' => Formula::weak_yesterday(arg),
                    'O' => Formula::once(arg),
                    _ => Formula::historically(arg),
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) => {
                if !self.opts.allow_reserved && is_reserved(&name) {
                    return Err(ParseError::Reserved { line: t.line, column: t.column, name });
                }
                self.bump();
                Ok(Formula::Var(name))
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                if self.peek().tok != Tok::RParen {
                    return self.error("expected `)`");
                }
                self.bump();
                Ok(f)
            }
            Tok::Eof => self.error("unexpected end of input"),
            other => self.error(format!("unexpected token {}", describe(&other))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::True => "`true`".into(),
        Tok::False => "`false`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Not => "`!`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::Implies => "`->`".into(),
        Tok::Iff => "`<->`".into(),
        Tok::Unary(c) | Tok::Binary(c) => format!("`{c}`"),
        Tok::Eof => "end of input".into(),
    }
}

pub fn parse_formula_with(text: &str, opts: ParseOptions) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, opts };
    let f = p.iff()?;
    if p.peek().tok != Tok::Eof {
        let t = p.peek().tok.clone();
        return p.error(format!("trailing input starting at {}", describe(&t)));
    }
    Ok(f)
}

/// Parses a single user formula. Reserved identifiers are rejected.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_with(text, ParseOptions::default())
}

/// Parses a spec file: one formula whose top-level conjuncts become the
/// labelled conjuncts `c1..cN`.
pub fn parse_spec(text: &str, name: impl Into<String>) -> Result<Spec, ParseError> {
    let f = parse_formula(text)?;
    Ok(Spec::from_conjuncts(name, f.top_level_conjuncts()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Formula {
        Formula::var(n)
    }

    #[test]
    fn parses_globally_implies_next() {
        let f = parse_formula("G (a -> (X b))").unwrap();
        assert_eq!(f, Formula::globally(Formula::implies(v("a"), Formula::next(v("b")))));
    }

    #[test]
    fn single_variable() {
        assert_eq!(parse_formula("a").unwrap(), v("a"));
    }

    #[test]
    fn spec_split_on_top_level_and() {
        let s = parse_spec("(G a) & (F (! a))", "s").unwrap();
        assert_eq!(
            s.conjuncts,
            vec![
                ("c1".to_string(), Formula::globally(v("a"))),
                ("c2".to_string(), Formula::eventually(Formula::not(v("a")))),
            ]
        );
        assert_eq!(s.alphabet.names(), &["a"]);
    }

    #[test]
    fn precedence_and_associativity() {
        // unary > U > & > | > -> > <->
        let f = parse_formula("a | b & c -> d <-> e").unwrap();
        let expected = Formula::iff(
            Formula::implies(Formula::or(v("a"), Formula::and(v("b"), v("c"))), v("d")),
            v("e"),
        );
        assert_eq!(f, expected);
        assert_eq!(
            parse_formula("a U b U c").unwrap(),
            Formula::until(v("a"), Formula::until(v("b"), v("c")))
        );
        assert_eq!(
            parse_formula("! a U G b & c").unwrap(),
            Formula::and(Formula::until(Formula::not(v("a")), Formula::globally(v("b"))), v("c"))
        );
        assert_eq!(
            parse_formula("a -> b -> c").unwrap(),
            Formula::implies(v("a"), Formula::implies(v("b"), v("c")))
        );
    }

    #[test]
    fn comments_and_literals() {
        let f = parse_formula("# header\ntrue & # trailing\n false").unwrap();
        assert_eq!(f, Formula::and(Formula::True, Formula::False));
    }

    #[test]
    fn all_operators() {
        let f = parse_formula("(X a) & (N a) & (Y a) & (Z a) & (O a) & (H a) & (a R b) & (a T b)").unwrap();
        assert_eq!(f.top_level_conjuncts().len(), 8);
    }

    #[test]
    fn keywords_need_separation() {
        assert_eq!(parse_formula("Fa").unwrap(), v("Fa"));
        assert_eq!(parse_formula("F a").unwrap(), Formula::eventually(v("a")));
    }

    #[test]
    fn reserved_identifiers_rejected() {
        assert!(matches!(parse_formula("G end"), Err(ParseError::Reserved { .. })));
        assert!(matches!(parse_formula("a & _act_1"), Err(ParseError::Reserved { .. })));
        let opts = ParseOptions { allow_reserved: true };
        assert_eq!(parse_formula_with("end", opts).unwrap(), v("end"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_formula("a &\n  (b | )") {
            Err(ParseError::Syntax { line, column, .. }) => {
                assert_eq!((line, column), (2, 8));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_formula("").is_err());
        assert!(parse_formula("a b").is_err());
        assert!(parse_formula("a $ b").is_err());
    }
}
