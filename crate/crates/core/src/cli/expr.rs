//! Activation expressions such as `cosmo(raised_cosine(T=1,beta=0.05),zeta=1)`.
//!
//! ```text
//! expr := name [ "(" [ arg { "," arg } ] ")" ]
//! arg  := expr | key "=" number
//! ```

use std::fmt;

use crate::activations::Activation;

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    /// Byte offset into the expression.
    pub pos: usize,
    pub message: String,
}

impl ParseError {
    /// The expression with a caret under the offending position.
    pub fn annotate(&self, src: &str) -> String {
        format!("{self}\n  {src}\n  {}^", " ".repeat(src[..self.pos.min(src.len())].chars().count()))
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.pos + 1, self.message)
    }
}

impl std::error::Error for ParseError {}

enum Arg {
    Expr(Activation, usize),
    Kw(String, f64, usize),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, pos: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..]
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.src.len() - start);
        if len == 0 || self.src[start..].starts_with(|c: char| c.is_ascii_digit()) {
            return match self.src[start..].chars().next() {
                None => self.err(start, "expected a name, found end of input"),
                Some(c) => self.err(start, format!("expected a name, found {c:?}")),
            };
        }
        self.pos += len;
        Ok((self.src[start..start + len].to_string(), start))
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..]
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-')))
            .unwrap_or(self.src.len() - start);
        let text = &self.src[start..start + len];
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos += len;
                Ok(v)
            }
            _ if text.is_empty() => self.err(start, "expected a number"),
            _ => self.err(start, format!("invalid number {text:?}")),
        }
    }

    fn arg(&mut self) -> Result<Arg, ParseError> {
        let save = self.pos;
        let (name, at) = self.ident()?;
        if self.eat('=') {
            let v = self.number()?;
            return Ok(Arg::Kw(name, v, at));
        }
        self.pos = save;
        let start = self.peek().map(|_| self.pos).unwrap_or(self.pos);
        Ok(Arg::Expr(self.expr()?, start))
    }

    fn expr(&mut self) -> Result<Activation, ParseError> {
        let (name, at) = self.ident()?;
        let mut args = Vec::new();
        if self.eat('(') && !self.eat(')') {
            loop {
                args.push(self.arg()?);
                if self.eat(',') {
                    continue;
                }
                if self.eat(')') {
                    break;
                }
                let p = self.pos;
                return match self.peek() {
                    None => self.err(p, "expected ',' or ')', found end of input"),
                    Some(c) => self.err(self.pos, format!("expected ',' or ')', found {c:?}")),
                };
            }
        }
        self.build(&name, at, args, self.pos)
    }

    fn build(&self, name: &str, at: usize, args: Vec<Arg>, end: usize) -> Result<Activation, ParseError> {
        let mut inner: Option<(Activation, usize)> = None;
        let mut kws: Vec<(String, f64, usize)> = Vec::new();
        for a in args {
            match a {
                Arg::Expr(e, p) => {
                    if inner.is_some() {
                        return self.err(p, "only one nested activation is allowed");
                    }
                    inner = Some((e, p));
                }
                Arg::Kw(k, v, p) => {
                    if kws.iter().any(|(seen, _, _)| *seen == k) {
                        return self.err(p, format!("duplicate argument {k:?}"));
                    }
                    kws.push((k, v, p));
                }
            }
        }
        let allowed: &[&str] = match name {
            "relu" => &[],
            "sine" => &["omega0"],
            "gaussian" | "sinc" => &["s"],
            "raised_cosine" => &["T", "beta"],
            "cosmo" => &["zeta"],
            _ => {
                return self.err(
                    at,
                    format!("unknown activation {name:?} (expected relu, sine, gaussian, sinc, raised_cosine, cosmo)"),
                )
            }
        };
        if let Some((k, _, p)) = kws.iter().find(|(k, _, _)| !allowed.contains(&k.as_str())) {
            return self.err(*p, format!("{name} takes no argument {k:?} (allowed: {})", allowed.join(", ")));
        }
        if name != "cosmo" {
            if let Some((_, p)) = inner {
                return self.err(p, format!("{name} does not wrap another activation"));
            }
        }
        let get = |k: &str| kws.iter().find(|(n, _, _)| n == k).map(|(_, v, _)| *v);
        let need = |k: &str| get(k).map_or_else(|| self.err(end, format!("{name} needs {k}=<number>")), Ok);
        let built = match name {
            "relu" => Ok(Activation::Relu),
            "sine" => Activation::sine(need("omega0")?),
            "gaussian" => Activation::gaussian(need("s")?),
            "sinc" => Activation::sinc(need("s")?),
            "raised_cosine" => Activation::raised_cosine(need("T")?, get("beta").unwrap_or(0.05)),
            _ => {
                let Some((base, p)) = inner else {
                    return self.err(end, "cosmo needs a base activation as its first argument");
                };
                if matches!(base, Activation::Cosmo { .. }) {
                    return self.err(p, "cosmo cannot wrap another cosmo");
                }
                Activation::cosmo(base, need("zeta")?)
            }
        };
        built.or_else(|e| self.err(at, e.to_string()))
    }
}

/// Parses an activation expression.
pub fn parse_activation(src: &str) -> Result<Activation, ParseError> {
    let mut p = Parser { src, pos: 0 };
    let act = p.expr()?;
    if let Some(c) = p.peek() {
        return p.err(p.pos, format!("unexpected {c:?} after the expression"));
    }
    Ok(act)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_family() {
        let cases = [
            "relu",
            "sine(omega0=30)",
            "gaussian(s=3)",
            "sinc(s=2.5)",
            "raised_cosine(T=1,beta=0.05)",
            "cosmo(raised_cosine(T=1,beta=0.05),zeta=1)",
            "cosmo(gaussian(s=1e-1),zeta=0.5)",
        ];
        for src in cases {
            let a = parse_activation(src).unwrap();
            // display form parses back to the same activation
            assert_eq!(parse_activation(&a.to_string()).unwrap(), a, "{src}");
        }
        assert_eq!(
            parse_activation(" cosmo ( raised_cosine( T = 2 ) , zeta = 1.5 ) ").unwrap(),
            Activation::cosmo(Activation::raised_cosine(2.0, 0.05).unwrap(), 1.5).unwrap()
        );
        assert_eq!(parse_activation("relu()").unwrap(), Activation::Relu);
    }

    #[test]
    fn errors_point_at_the_problem() {
        let at = |src: &str| parse_activation(src).unwrap_err().pos;
        assert_eq!(at("rleu"), 0);
        assert_eq!(at("sine(omega=3)"), 5);
        assert_eq!(at("sine(omega0=abc)"), 12);
        assert_eq!(at("gaussian(s=1"), 12);
        assert_eq!(at("gaussian(s=1) x"), 14);
        assert_eq!(at("cosmo(zeta=1)"), 13);
        assert_eq!(at("cosmo(cosmo(relu,zeta=1),zeta=1)"), 6);
        assert_eq!(at("gaussian(s=-1)"), 0);
        assert_eq!(at("sine(omega0=1,omega0=2)"), 14);
        let e = parse_activation("raised_cosine(T=1,beta=0.05").unwrap_err();
        let text = e.annotate("raised_cosine(T=1,beta=0.05");
        assert!(text.starts_with("column 28: expected ',' or ')'"), "{text}");
        assert!(text.ends_with(&format!("{}^", " ".repeat(29))), "{text}");
    }
}
