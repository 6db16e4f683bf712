//! Infix polynomial syntax: `c*x1^a1*...*xn^an` terms joined by `+`/`-`,
//! with `c` an integer or `p/q`. This is also what `Polynomial` prints.

use num::{BigInt, Zero};
use pvidim::{Polynomial, Rational};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

fn lex(s: &str) -> Result<Vec<Tok>, String> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(t) = single {
            out.push(t);
            i += 1;
            continue;
        }
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '0'..='9' => {
                let j = (i..b.len()).find(|&j| !b[j].is_ascii_digit()).unwrap_or(b.len());
                out.push(Tok::Num(s[i..j].parse().map_err(|e| format!("bad number {}: {e}", &s[i..j]))?));
                i = j;
            }
            'x' => {
                let j = (i + 1..b.len()).find(|&j| !b[j].is_ascii_digit()).unwrap_or(b.len());
                let idx: usize = s[i + 1..j].parse().map_err(|_| format!("variable needs an index at column {}", i + 1))?;
                if idx == 0 {
                    return Err("variables are numbered from x1".into());
                }
                out.push(Tok::Var(idx - 1));
                i = j;
            }
            _ => return Err(format!("unexpected character {c:?} at column {}", i + 1)),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    n: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn integer(&mut self) -> Result<BigInt, String> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(v),
            t => Err(format!("expected a number, found {t:?}")),
        }
    }

    fn factor(&mut self, coeff: &mut Rational, exps: &mut [u32]) -> Result<(), String> {
        match self.peek() {
            Some(Tok::Num(_)) => {
                let p = self.integer()?;
                let q = if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    self.integer()?
                } else {
                    BigInt::from(1)
                };
                if q.is_zero() {
                    return Err("zero denominator".into());
                }
                *coeff *= Rational::new(p, q);
            }
            Some(Tok::Var(i)) => {
                let i = *i;
                self.pos += 1;
                if i >= self.n {
                    return Err(format!("x{} used but n = {}", i + 1, self.n));
                }
                let e = if self.peek() == Some(&Tok::Caret) {
                    self.pos += 1;
                    u32::try_from(self.integer()?).map_err(|_| "exponent too large".to_string())?
                } else {
                    1
                };
                exps[i] += e;
            }
            t => return Err(format!("expected a number or variable, found {t:?}")),
        }
        Ok(())
    }
}

pub fn parse_polynomial(s: &str, n: usize) -> Result<Polynomial, String> {
    let mut p = Parser { toks: lex(s)?, pos: 0, n };
    if p.toks.is_empty() {
        return Err("empty polynomial".into());
    }
    let mut out = Polynomial::zero(n);
    loop {
        let mut sign = Rational::from_integer(1.into());
        while let Some(Tok::Plus | Tok::Minus) = p.peek() {
            if p.next() == Some(Tok::Minus) {
                sign = -sign;
            }
        }
        let mut coeff = sign;
        let mut exps = vec![0u32; n];
        p.factor(&mut coeff, &mut exps)?;
        while p.peek() == Some(&Tok::Star) {
            p.pos += 1;
            p.factor(&mut coeff, &mut exps)?;
        }
        out = &out + &Polynomial::from_terms(n, [(exps, coeff)]).map_err(|e| e.to_string())?;
        match p.peek() {
            None => return Ok(out),
            Some(Tok::Plus | Tok::Minus) => {}
            Some(t) => return Err(format!("unexpected {t:?}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pvidim::{int, rat};

    #[test]
    fn parses_the_cubic() {
        let p = parse_polynomial("x1^3 + x1 - x2", 2).unwrap();
        let x1 = Polynomial::var(2, 0);
        let x2 = Polynomial::var(2, 1);
        assert_eq!(p, &(&(&(&x1 * &x1) * &x1) + &x1) - &x2);
    }

    #[test]
    fn coefficients_and_signs() {
        let p = parse_polynomial("-1/2*x1*x2 + 3 - -x2^2", 2).unwrap();
        assert_eq!(p.eval(&[int(2), int(1)]).unwrap(), int(3));
        assert_eq!(parse_polynomial("2*3/4", 1).unwrap(), Polynomial::constant(1, rat(3, 2)));
        assert!(parse_polynomial("0", 3).unwrap().is_zero());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_polynomial("", 2).is_err());
        assert!(parse_polynomial("x3", 2).is_err());
        assert!(parse_polynomial("x0", 2).is_err());
        assert!(parse_polynomial("1/0", 2).is_err());
        assert!(parse_polynomial("x1 +", 2).is_err());
        assert!(parse_polynomial("x1 x2", 2).is_err());
        assert!(parse_polynomial("y", 2).is_err());
    }

    #[test]
    fn display_parses_back() {
        let p = parse_polynomial("3*x1^2*x2 - 5/7*x2 + 1/3", 2).unwrap();
        assert_eq!(parse_polynomial(&p.to_string(), 2).unwrap(), p);
    }
}
