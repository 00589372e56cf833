use super::{BinaryOp, FilterExpr, Number, UnaryOp};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Real(f64),
    Text(String),
    Ident(String),
    And,
    Or,
    Not,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(i) => format!("number `{i}`"),
            Tok::Real(r) => format!("number `{r:?}`"),
            Tok::Text(t) => format!("text '{t}'"),
            Tok::Ident(n) => format!("identifier `{n}`"),
            Tok::And => "`and`".into(),
            Tok::Or => "`or`".into(),
            Tok::Not => "`not`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Ne => "`!=`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    fn comparison(&self) -> Option<BinaryOp> {
        Some(match self {
            Tok::Lt => BinaryOp::Lt,
            Tok::Le => BinaryOp::Le,
            Tok::Gt => BinaryOp::Gt,
            Tok::Ge => BinaryOp::Ge,
            Tok::EqEq => BinaryOp::Eq,
            Tok::Ne => BinaryOp::Ne,
            _ => return None,
        })
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::FilterSyntax {
        offset,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = |next: u8| bytes.get(i + 1) == Some(&next);
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'<' if two(b'=') => Tok::Le,
            b'<' => Tok::Lt,
            b'>' if two(b'=') => Tok::Ge,
            b'>' => Tok::Gt,
            b'=' if two(b'=') => Tok::EqEq,
            b'!' if two(b'=') => Tok::Ne,
            b'=' => return Err(syntax(start, "expected `==`, found `=`")),
            b'!' => return Err(syntax(start, "expected `!=`, found `!`")),
            b'\'' => {
                let body_start = i + 1;
                let end = src[body_start..]
                    .find('\'')
                    .ok_or_else(|| syntax(start, "unterminated text literal"))?;
                i = body_start + end + 1;
                out.push((
                    start,
                    Tok::Text(src[body_start..body_start + end].to_owned()),
                ));
                continue;
            }
            b'0'..=b'9' | b'.' => {
                let (tok, len) =
                    lex_number(&src[i..]).ok_or_else(|| syntax(start, "malformed number"))?;
                i += len;
                out.push((start, tok));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let len = bytes[i..]
                    .iter()
                    .take_while(|b| b.is_ascii_alphanumeric() || **b == b'_')
                    .count();
                let word = &src[i..i + len];
                i += len;
                let tok = match word {
                    "and" => Tok::And,
                    "or" => Tok::Or,
                    "not" => Tok::Not,
                    _ => Tok::Ident(word.to_owned()),
                };
                out.push((start, tok));
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        };
        i += match tok {
            Tok::Le | Tok::Ge | Tok::EqEq | Tok::Ne => 2,
            _ => 1,
        };
        out.push((start, tok));
    }
    out.push((src.len(), Tok::Eof));
    Ok(out)
}

/// Lexes `digits ['.' digits] [('e'|'E') ['+'|'-'] digits]`, or `.digits...`.
fn lex_number(s: &str) -> Option<(Tok, usize)> {
    let b = s.as_bytes();
    let digits = |from: usize| b[from..].iter().take_while(|c| c.is_ascii_digit()).count();
    let mut len = digits(0);
    let mut is_real = false;
    if b.get(len) == Some(&b'.') {
        let frac = digits(len + 1);
        if len == 0 && frac == 0 {
            return None;
        }
        len += 1 + frac;
        is_real = true;
    }
    if matches!(b.get(len), Some(b'e' | b'E')) {
        let mut j = len + 1;
        if matches!(b.get(j), Some(b'+' | b'-')) {
            j += 1;
        }
        let exp = digits(j);
        if exp == 0 {
            return None;
        }
        len = j + exp;
        is_real = true;
    }
    let text = &s[..len];
    if is_real {
        let v: f64 = text.parse().ok()?;
        v.is_finite().then_some((Tok::Real(v), len))
    } else {
        text.parse().ok().map(|v| (Tok::Int(v), len))
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn unexpected(&self, expected: &str) -> Error {
        syntax(
            self.offset(),
            format!("expected {expected}, found {}", self.peek().describe()),
        )
    }

    fn or(&mut self) -> Result<FilterExpr> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = FilterExpr::binary(BinaryOp::Or, lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<FilterExpr> {
        let mut lhs = self.not()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = FilterExpr::binary(BinaryOp::And, lhs, self.not()?);
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<FilterExpr> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(FilterExpr::unary(UnaryOp::Not, self.not()?));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<FilterExpr> {
        let lhs = self.additive()?;
        let Some(op) = self.peek().comparison() else {
            return Ok(lhs);
        };
        self.bump();
        let rhs = self.additive()?;
        if self.peek().comparison().is_some() {
            return Err(syntax(
                self.offset(),
                "comparison operators cannot be chained",
            ));
        }
        Ok(FilterExpr::binary(op, lhs, rhs))
    }

    fn additive(&mut self) -> Result<FilterExpr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = FilterExpr::binary(op, lhs, self.multiplicative()?);
        }
    }

    fn multiplicative(&mut self) -> Result<FilterExpr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = FilterExpr::binary(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<FilterExpr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(FilterExpr::unary(UnaryOp::Neg, self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<FilterExpr> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(FilterExpr::Number(Number::Integer(i)))
            }
            Tok::Real(r) => {
                self.bump();
                Ok(FilterExpr::Number(Number::Real(r)))
            }
            Tok::Text(t) => {
                self.bump();
                Ok(FilterExpr::Text(t))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(FilterExpr::Var(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.or()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

/// Parses filter source into an expression tree.
///
/// Errors carry the byte offset of the offending token; end of input is
/// reported at `source.len()`.
pub fn parse(source: &str) -> Result<FilterExpr> {
    if source.trim().is_empty() {
        return Err(syntax(0, "empty filter expression"));
    }
    let mut parser = Parser {
        toks: lex(source)?,
        pos: 0,
    };
    let expr = parser.or()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.unexpected("an operator or end of input"));
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{BinaryOp as B, FilterExpr as E, UnaryOp as U};

    fn offset_of(src: &str) -> usize {
        match parse(src) {
            Err(Error::FilterSyntax { offset, .. }) => offset,
            other => panic!("expected syntax error for {src:?}, got {other:?}"),
        }
    }

    #[test]
    fn simple_comparison() {
        assert_eq!(
            parse("x > y").unwrap(),
            E::binary(B::Gt, E::var("x"), E::var("y"))
        );
    }

    #[test]
    fn precedence_ladder() {
        let expected = E::binary(
            B::Or,
            E::binary(
                B::Lt,
                E::binary(B::Add, E::var("x"), E::int(1)),
                E::binary(B::Mul, E::int(2), E::var("y")),
            ),
            E::unary(U::Not, E::binary(B::Eq, E::var("z"), E::int(3))),
        );
        assert_eq!(parse("x + 1 < 2 * y or not (z == 3)").unwrap(), expected);
    }

    #[test]
    fn and_binds_tighter_than_or_and_left_assoc() {
        let e = parse("a or b and c").unwrap();
        assert_eq!(
            e,
            E::binary(
                B::Or,
                E::var("a"),
                E::binary(B::And, E::var("b"), E::var("c"))
            )
        );
        let e = parse("a - b - c").unwrap();
        assert_eq!(
            e,
            E::binary(
                B::Sub,
                E::binary(B::Sub, E::var("a"), E::var("b")),
                E::var("c")
            )
        );
        let e = parse("not a == 1").unwrap();
        assert_eq!(
            e,
            E::unary(U::Not, E::binary(B::Eq, E::var("a"), E::int(1)))
        );
        let e = parse("-x * 2").unwrap();
        assert_eq!(
            e,
            E::binary(B::Mul, E::unary(U::Neg, E::var("x")), E::int(2))
        );
    }

    #[test]
    fn literals() {
        assert_eq!(
            parse("x == 'abc'").unwrap(),
            E::binary(B::Eq, E::var("x"), E::Text("abc".into()))
        );
        assert_eq!(
            parse("x > 2.5").unwrap(),
            E::binary(B::Gt, E::var("x"), E::real(2.5))
        );
        assert_eq!(
            parse("x > 1e3").unwrap(),
            E::binary(B::Gt, E::var("x"), E::real(1000.0))
        );
        assert_eq!(
            parse("x > .5").unwrap(),
            E::binary(B::Gt, E::var("x"), E::real(0.5))
        );
        assert_eq!(
            parse("  x>2  ").unwrap(),
            E::binary(B::Gt, E::var("x"), E::int(2))
        );
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert_eq!(offset_of("x >"), 3);
        assert_eq!(offset_of("a < b < c"), 6);
        assert_eq!(offset_of("(x > 1"), 6);
        assert_eq!(offset_of("x = 1"), 2);
        assert_eq!(offset_of("x > 1 y"), 6);
        assert_eq!(offset_of("x > 'abc"), 4);
        assert_eq!(offset_of("x # 1"), 2);
        assert_eq!(offset_of("   "), 0);
        // keywords are lowercase only
        assert!(matches!(parse("x AND y"), Err(Error::FilterSyntax { .. })));
    }

    #[test]
    fn error_message_names_expectation() {
        let err = parse("x >").unwrap_err().to_string();
        assert!(err.contains("expected an expression"), "{err}");
        assert!(err.contains("offset 3"), "{err}");
    }
}
