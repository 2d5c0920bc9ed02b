//! Text syntax for module constructions.
//!
//! ```text
//! P := poly(x, y, ...) | laurent(s, ...) | elliptic
//! W := jets(n, order) | alpha(a) | <rep expression>
//! M := P | ring(P) | tensor(P, W) | delta([p, ...]) | delta([p, ...], W)
//!    | rudakov([p, ...], R) | gauge(elliptic) | gauge(elliptic, W)
//!    | charged(M, lambda) | dual(M) | mtensor(M, M) | localize(M, var)
//! ```

use crate::error::{Error, Result};
use crate::gl::{parse_rep_expr, Rep};
use crate::jets::JetRep;
use crate::poly::Poly;
use crate::rational::{parse_rational, Rational};
use crate::ring::{Ring, RingSpec};

use super::{
    av_dual, av_tensor, charged_twist, elliptic_gauge_data, gauge_module, minimal_differentiability, rudakov_module,
    tensor_module, AvModule, DeltaTensor, Differentiability, FreeModule, LocalizedModule,
};

const LOCALIZE_NMAX: u32 = 4;
const LOCALIZE_DEGREE: u32 = 4;

enum Fiber {
    Jets(JetRep),
    Alpha(Rational),
    Rep(Rep),
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos, msg: msg.into() })
    }

    fn ws(&mut self) {
        let b = self.text.as_bytes();
        while self.pos < b.len() && b[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.text.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(self.pos, format!("expected '{}'", c as char))
        }
    }

    fn try_eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(usize, String)> {
        self.ws();
        let b = self.text.as_bytes();
        let start = self.pos;
        while self.pos < b.len() && (b[self.pos].is_ascii_alphanumeric() || b[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err(start, "expected a name");
        }
        Ok((start, self.text[start..self.pos].to_string()))
    }

    fn number(&mut self) -> Result<Rational> {
        self.ws();
        let b = self.text.as_bytes();
        let start = self.pos;
        while self.pos < b.len() && (b[self.pos].is_ascii_digit() || b"-+/".contains(&b[self.pos])) {
            self.pos += 1;
        }
        let t = &self.text[start..self.pos];
        parse_rational(t).ok_or(Error::Parse { pos: start, msg: format!("invalid rational '{t}'") })
    }

    fn natural(&mut self) -> Result<usize> {
        let start = {
            self.ws();
            self.pos
        };
        let r = self.number()?;
        crate::rational::to_i64(&r)
            .filter(|v| *v >= 0)
            .map(|v| v as usize)
            .ok_or(Error::Parse { pos: start, msg: "expected a natural number".into() })
    }

    fn point(&mut self) -> Result<Vec<Rational>> {
        self.eat(b'[')?;
        let mut out = vec![self.number()?];
        while self.try_eat(b',') {
            out.push(self.number()?);
        }
        self.eat(b']')?;
        Ok(out)
    }

    /// Byte offset of the parenthesis closing the call starting at `self.pos`.
    fn call_end(&self) -> Result<usize> {
        let b = self.text.as_bytes();
        let mut depth = 0i32;
        for (k, &c) in b.iter().enumerate().skip(self.pos) {
            match c {
                b'(' | b'[' => depth += 1,
                b')' | b']' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(k + 1);
                    }
                    if depth < 0 {
                        break;
                    }
                }
                _ => {}
            }
        }
        self.err(self.pos, "unbalanced parentheses")
    }

    fn ring(&mut self) -> Result<Ring> {
        let (start, name) = self.ident()?;
        match name.as_str() {
            "elliptic" => Ok(RingSpec::elliptic()),
            "poly" | "laurent" => {
                self.eat(b'(')?;
                let mut vars = vec![self.ident()?.1];
                while self.try_eat(b',') {
                    vars.push(self.ident()?.1);
                }
                self.eat(b')')?;
                let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
                Ok(if name == "poly" { RingSpec::poly(&refs) } else { RingSpec::laurent(&refs) })
            }
            _ => self.err(start, format!("unknown ring '{name}'")),
        }
    }

    fn rep(&mut self) -> Result<Rep> {
        self.ws();
        let start = self.pos;
        let end = self.call_end()?;
        let expr = parse_rep_expr(&self.text[start..end]).map_err(|e| match e {
            Error::Parse { pos, msg } => Error::Parse { pos: pos + start, msg },
            other => other,
        })?;
        self.pos = end;
        Rep::build(&expr)
    }

    fn fiber(&mut self) -> Result<Fiber> {
        self.ws();
        let save = self.pos;
        let (_, name) = self.ident()?;
        match name.as_str() {
            "jets" => {
                self.eat(b'(')?;
                let n = self.natural()?;
                self.eat(b',')?;
                let order = self.natural()? as u32;
                self.eat(b')')?;
                Ok(Fiber::Jets(JetRep::truncated_polynomials(n, order)))
            }
            "alpha" => {
                self.eat(b'(')?;
                let a = self.number()?;
                self.eat(b')')?;
                Ok(Fiber::Alpha(a))
            }
            _ => {
                self.pos = save;
                Ok(Fiber::Rep(self.rep()?))
            }
        }
    }

    fn fiber_jet(f: Fiber) -> JetRep {
        match f {
            Fiber::Jets(j) => j,
            Fiber::Alpha(a) => JetRep::alpha(&a),
            Fiber::Rep(r) => JetRep::from_rep(&r),
        }
    }

    fn module(&mut self) -> Result<Box<dyn AvModule>> {
        self.ws();
        let save = self.pos;
        let (start, name) = self.ident()?;
        if matches!(name.as_str(), "poly" | "laurent" | "elliptic") {
            self.pos = save;
            return Ok(Box::new(FreeModule::ring_module(&self.ring()?)));
        }
        self.eat(b'(')?;
        let m: Box<dyn AvModule> = match name.as_str() {
            "ring" => Box::new(FreeModule::ring_module(&self.ring()?)),
            "tensor" => {
                let ring = self.ring()?;
                self.eat(b',')?;
                match self.fiber()? {
                    Fiber::Rep(r) => Box::new(FreeModule::from_rep(&ring, &r)?),
                    Fiber::Alpha(a) => Box::new(FreeModule::alpha_module(&ring, &a)?),
                    Fiber::Jets(j) => Box::new(tensor_module(&ring, &j)?),
                }
            }
            "delta" => {
                let p = self.point()?;
                let base = DeltaTensor::delta(&p)?;
                if self.try_eat(b',') {
                    let jet = Self::fiber_jet(self.fiber()?);
                    Box::new(DeltaTensor::new(base.ring(), &p, jet, None)?)
                } else {
                    Box::new(base)
                }
            }
            "rudakov" => {
                let p = self.point()?;
                self.eat(b',')?;
                let rep = self.rep()?;
                let ring = DeltaTensor::delta(&p)?.ring().clone();
                Box::new(rudakov_module(&ring, &p, &rep)?)
            }
            "gauge" => {
                let rpos = {
                    self.ws();
                    self.pos
                };
                let (_, r) = self.ident()?;
                if r != "elliptic" {
                    return self.err(rpos, "gauge modules are available on 'elliptic' only");
                }
                let jet = if self.try_eat(b',') { Self::fiber_jet(self.fiber()?) } else { JetRep::trivial(1) };
                Box::new(gauge_module(elliptic_gauge_data(false), &jet)?)
            }
            "charged" => {
                let inner = self.module()?;
                self.eat(b',')?;
                let l = self.number()?;
                Box::new(charged_twist(inner, &l))
            }
            "dual" => Box::new(av_dual(self.module()?.as_ref())?),
            "mtensor" => {
                let a = self.module()?;
                self.eat(b',')?;
                let b = self.module()?;
                Box::new(av_tensor(a.as_ref(), b.as_ref())?)
            }
            "localize" => {
                let inner = self.module()?;
                self.eat(b',')?;
                let (vpos, var) = self.ident()?;
                let ring = inner.ring().clone();
                let Some(i) = ring.vars().iter().position(|v| *v == var) else {
                    return self.err(vpos, format!("no variable '{var}' in {}", ring.name()));
                };
                let Some(free) = inner.as_any().downcast_ref::<FreeModule>() else {
                    return Err(Error::NotFree(inner.describe()));
                };
                let target = RingSpec::localized(&ring, Poly::var(ring.nvars(), i), None)?;
                match minimal_differentiability(free, LOCALIZE_NMAX, LOCALIZE_DEGREE)? {
                    Differentiability::Order(n) => Box::new(LocalizedModule::new(free, &target, n)?),
                    Differentiability::Unknown(n) => return Err(Error::UnknownDifferentiability(n)),
                }
            }
            _ => return self.err(start, format!("unknown module constructor '{name}'")),
        };
        self.eat(b')')?;
        Ok(m)
    }
}

/// Builds a module from its text description, e.g. `tensor(poly(x), det(2,1))`.
pub fn parse_module(text: &str) -> Result<Box<dyn AvModule>> {
    let mut p = Parser { text, pos: 0 };
    let m = p.module()?;
    p.ws();
    if p.pos != text.len() {
        return p.err(p.pos, "trailing input");
    }
    Ok(m)
}

/// Parses a ring description such as `laurent(s)`.
pub fn parse_ring(text: &str) -> Result<Ring> {
    let mut p = Parser { text, pos: 0 };
    let r = p.ring()?;
    p.ws();
    if p.pos != text.len() {
        return p.err(p.pos, "trailing input");
    }
    Ok(r)
}
