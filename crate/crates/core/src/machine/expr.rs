//! Amplitude expressions: decimal literals, `pi`, `sqrt`, `sin`, `cos`, named
//! parameters, `+ - * /` and parentheses.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // optional exponent
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| format!("bad number literal `{text}`"))?;
            out.push(Token::Num(v));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/()".contains(ch) {
            out.push(Token::Op(ch));
            i += 1;
        } else {
            return Err(format!("unexpected character `{ch}`"));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    params: &'a BTreeMap<String, f64>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, op: char) -> Result<(), String> {
        match self.next() {
            Some(Token::Op(c)) if c == op => Ok(()),
            other => Err(format!("expected `{op}`, found {other:?}")),
        }
    }

    fn expr(&mut self) -> Result<f64, String> {
        let mut v = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            v = if op == '+' { v + rhs } else { v - rhs };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<f64, String> {
        let mut v = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            v = if op == '*' { v * rhs } else { v / rhs };
        }
        Ok(v)
    }

    fn unary(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<f64, String> {
        match self.next() {
            Some(Token::Num(v)) => Ok(v),
            Some(Token::Op('(')) => {
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(Token::Ident(name)) => {
                if let Some(f) = function(&name) {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(f(arg));
                }
                if name == "pi" {
                    return Ok(std::f64::consts::PI);
                }
                self.params
                    .get(&name)
                    .copied()
                    .ok_or_else(|| format!("unknown identifier `{name}`"))
            }
            other => Err(format!("unexpected token {other:?}")),
        }
    }
}

fn function(name: &str) -> Option<fn(f64) -> f64> {
    match name {
        "sqrt" => Some(f64::sqrt),
        "sin" => Some(f64::sin),
        "cos" => Some(f64::cos),
        _ => None,
    }
}

/// Evaluates `src` with the given named parameters.
pub fn evaluate(src: &str, params: &BTreeMap<String, f64>) -> Result<f64, String> {
    let mut p = Parser {
        tokens: tokenize(src)?,
        pos: 0,
        params,
    };
    let v = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(format!("trailing input in `{src}`"));
    }
    if !v.is_finite() {
        return Err(format!("`{src}` is not finite"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(s: &str) -> f64 {
        evaluate(s, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn grammar() {
        assert_eq!(eval("1 + 2 * 3"), 7.0);
        assert_eq!(eval("(1 + 2) * 3"), 9.0);
        assert_eq!(eval("-2 - -3"), 1.0);
        assert_eq!(eval("1/4"), 0.25);
        assert_eq!(eval("2.5e-1"), 0.25);
        assert_eq!(eval("sqrt(2)*pi"), 2f64.sqrt() * std::f64::consts::PI);
        assert_eq!(eval("cos(0) + sin(0)"), 1.0);
    }

    #[test]
    fn parameters() {
        let mut params = BTreeMap::new();
        params.insert("alpha".to_string(), 0.5);
        assert_eq!(evaluate("-sin(alpha)", &params).unwrap(), -(0.5f64.sin()));
    }

    #[test]
    fn errors() {
        for bad in ["1 +", "foo", "sqrt 2", "(1", "1 2", "2 ^ 3", "1/0"] {
            assert!(evaluate(bad, &BTreeMap::new()).is_err(), "{bad}");
        }
    }
}
