//! Recursive-descent parser for the ASCII formula syntax.
//!
//! ```text
//! formula := orexpr
//! orexpr  := andexpr ("or" andexpr)*
//! andexpr := unary ("and" unary)*
//! unary   := "!" unary | "(" formula ")" | belief | atom
//! atom    := IDENT "=" VALUE
//! belief  := "Bel" "[" agent "," stage "]" ">=" prob "(" formula ")"
//!          | "BelCond" "[" agent "," stage "]" ">=" prob "(" formula "|" formula ")"
//! ```

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}: {}", self.position, self.message)
    }
}

impl core::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Bar,
    Bang,
    Eq,
    Ge,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Ge => f.write_str("`>=`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        let tok = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '|' => Tok::Bar,
            '!' => Tok::Bang,
            '=' => Tok::Eq,
            '>' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '=')) => Tok::Ge,
                    _ => {
                        return Err(ParseError {
                            position: pos,
                            message: "expected `>=` (strict thresholds are not supported)".into(),
                        })
                    }
                }
            }
            c if is_word_char(c) => {
                let mut word = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if !is_word_char(c) {
                        break;
                    }
                    word.push(c);
                    chars.next();
                }
                out.push((pos, Tok::Word(word)));
                continue;
            }
            other => {
                return Err(ParseError { position: pos, message: alloc::format!("unexpected character `{other}`") })
            }
        };
        chars.next();
        out.push((pos, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

fn is_ident(word: &str) -> bool {
    let mut chars = word.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_decimal(word: &str) -> bool {
    let (int, frac) = match word.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (word, None),
    };
    !int.is_empty()
        && int.bytes().all(|b| b.is_ascii_digit())
        && frac.is_none_or(|f| !f.is_empty() && f.bytes().all(|b| b.is_ascii_digit()))
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].1
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.at + offset).min(self.tokens.len() - 1);
        &self.tokens[i].1
    }

    fn position(&self) -> usize {
        self.tokens[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.at].1.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        tok
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.position(), message: message.into() })
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error(alloc::format!("expected {want}, found {}", self.peek()))
        }
    }

    fn word(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.bump();
                Ok(w)
            }
            other => self.error(alloc::format!("expected {what}, found {other}")),
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Word(w) if w == kw)
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.and_expr()?;
        while self.keyword("or") {
            self.bump();
            let right = self.and_expr()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while self.keyword("and") {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Word(w) if (w == "Bel" || w == "BelCond") && *self.peek_at(1) == Tok::LBracket => {
                self.bump();
                self.belief(w == "BelCond")
            }
            Tok::Word(_) => self.atom(),
            other => self.error(alloc::format!("expected a formula, found {other}")),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let pos = self.position();
        let var = self.word("a variable name")?;
        if !is_ident(&var) || var == "or" || var == "and" {
            return Err(ParseError { position: pos, message: alloc::format!("`{var}` is not a variable name") });
        }
        self.expect(Tok::Eq)?;
        let value = self.word("a value label")?;
        Ok(Formula::atom(var, value))
    }

    fn belief(&mut self, conditional: bool) -> Result<Formula, ParseError> {
        self.expect(Tok::LBracket)?;
        let pos = self.position();
        let agent = self.word("an agent name")?;
        if !is_ident(&agent) {
            return Err(ParseError { position: pos, message: alloc::format!("`{agent}` is not an agent name") });
        }
        self.expect(Tok::Comma)?;
        let pos = self.position();
        let stage_text = self.word("a stage number")?;
        let stage: usize = match stage_text.parse() {
            Ok(s) if s >= 1 && stage_text.bytes().all(|b| b.is_ascii_digit()) => s,
            _ => {
                return Err(ParseError {
                    position: pos,
                    message: alloc::format!("`{stage_text}` is not a positive stage number"),
                })
            }
        };
        self.expect(Tok::RBracket)?;
        self.expect(Tok::Ge)?;
        let pos = self.position();
        let prob_text = self.word("a probability")?;
        let threshold: f64 = match prob_text.parse() {
            Ok(p) if is_decimal(&prob_text) => p,
            _ => {
                return Err(ParseError {
                    position: pos,
                    message: alloc::format!("`{prob_text}` is not a decimal probability"),
                })
            }
        };
        self.expect(Tok::LParen)?;
        let body = self.formula()?;
        let condition = if conditional {
            self.expect(Tok::Bar)?;
            self.formula()?
        } else {
            Formula::truth()
        };
        self.expect(Tok::RParen)?;
        Ok(Formula::bel_cond(agent, stage, threshold, body, condition))
    }
}

/// Parse and normalize a formula. Agent, stage and threshold ranges are
/// checked later, when the formula is bound to a model.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser { tokens: lex(text)?, at: 0 };
    let formula = parser.formula()?;
    if *parser.peek() != Tok::End {
        return parser.error(alloc::format!("unexpected {} after formula", parser.peek()));
    }
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconditional_belief() {
        let f = parse_formula("Bel[i,4] >= 0.8 (C=high or C=medium)").unwrap();
        assert_eq!(
            f,
            Formula::bel_cond(
                "i",
                4,
                0.8,
                Formula::or(Formula::atom("C", "high"), Formula::atom("C", "medium")),
                Formula::truth()
            )
        );
    }

    #[test]
    fn nested_conditional_belief() {
        let f = parse_formula("BelCond[i,2] >= 0.3 (Bel[u,2] >= 0.9 (P=true) | B=true)").unwrap();
        let inner = Formula::bel("u", 2, 0.9, Formula::atom("P", "true"));
        assert_eq!(f, Formula::bel_cond("i", 2, 0.3, inner, Formula::atom("B", "true")));
        assert_eq!(f.belief_count(), 2);
    }

    #[test]
    fn tautology_shape() {
        let f = parse_formula("!(X=1) or X=1").unwrap();
        assert_eq!(f, Formula::or(Formula::not(Formula::atom("X", "1")), Formula::atom("X", "1")));
    }

    #[test]
    fn precedence() {
        let f = parse_formula("A=1 or B=1 and !C=1").unwrap();
        let expected = Formula::or(
            Formula::atom("A", "1"),
            Formula::and(Formula::atom("B", "1"), Formula::not(Formula::atom("C", "1"))),
        );
        assert_eq!(f, expected);
        let left_assoc = parse_formula("A=1 or B=1 or C=1").unwrap();
        assert_eq!(
            left_assoc,
            Formula::or(Formula::or(Formula::atom("A", "1"), Formula::atom("B", "1")), Formula::atom("C", "1"))
        );
    }

    #[test]
    fn printer_round_trips() {
        for text in [
            "Bel[i,4] >= 0.8 (C=high or C=medium)",
            "BelCond[i,2] >= 0.3 (Bel[u,2] >= 0.9 (P=true) | B=true)",
            "!(X=1) or X=1",
            "!!(X=1) and (Y=0 or !Bel[a,1] >= 1 (Y=1))",
            "BelCond[a,1] >= 0 (X=1 | !(X=1) and Y=0)",
        ] {
            let f = parse_formula(text).unwrap();
            let printed = f.to_string();
            assert_eq!(parse_formula(&printed).unwrap(), f, "{printed}");
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_formula("X=1 or").unwrap_err();
        assert_eq!(e.position, 6);
        let e = parse_formula("Bel[a,0] >= 0.5 (X=1)").unwrap_err();
        assert_eq!(e.position, 6);
        let e = parse_formula("Bel[a,1] > 0.5 (X=1)").unwrap_err();
        assert_eq!(e.position, 9);
        assert!(parse_formula("Bel[a,1] >= .5 (X=1)").is_err());
        assert!(parse_formula("X=1)").is_err());
        assert!(parse_formula("1X=1").is_err());
        assert!(parse_formula("BelCond[a,1] >= 0.5 (X=1)").is_err());
    }
}
