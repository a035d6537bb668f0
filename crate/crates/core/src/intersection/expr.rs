//! Piecewise affine functions written as max/min/sum expressions over affine leaves.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::rat::{dot, fmt_rat, is_zero_vec, parse_rat, rat, unit_vec, zero_vec, QVec, Rat};
use crate::error::{Error, Result};
use crate::polyhedral::map::AffineMap;
use crate::polyhedral::{Cell, Hyperplane};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Affine { linear: QVec, constant: Rat },
    Max(Vec<Expr>),
    Min(Vec<Expr>),
    Sum(Vec<Expr>),
    Scale(Rat, Box<Expr>),
}

/// Outcome of restricting an expression to a cell.
pub enum Restriction {
    Affine(QVec, Rat),
    /// The expression is not affine on the cell; splitting along this hyperplane separates
    /// two of its competing terms.
    Split(Hyperplane),
}

impl Expr {
    pub fn affine(linear: QVec, constant: Rat) -> Expr {
        Expr::Affine { linear, constant }
    }

    pub fn constant(n: usize, c: Rat) -> Expr {
        Expr::affine(zero_vec(n), c)
    }

    pub fn coordinate(n: usize, i: usize) -> Expr {
        Expr::affine(unit_vec(n, i), Rat::zero())
    }

    /// `max_{i in coords} (x_i - shift_i)`, optionally with the constant term `0` included.
    pub fn shifted_max(n: usize, coords: &[usize], shift: &[Rat], with_zero: bool) -> Expr {
        let mut terms: Vec<Expr> = coords.iter().zip(shift).map(|(&i, s)| Expr::affine(unit_vec(n, i), -s.clone())).collect();
        if with_zero {
            terms.push(Expr::constant(n, Rat::zero()));
        }
        Expr::Max(terms)
    }

    pub fn dim(&self) -> usize {
        match self {
            Expr::Affine { linear, .. } => linear.len(),
            Expr::Max(v) | Expr::Min(v) | Expr::Sum(v) => v.first().map_or(0, Expr::dim),
            Expr::Scale(_, e) => e.dim(),
        }
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        match self {
            Expr::Affine { linear, constant } => dot(linear, x) + constant,
            Expr::Max(v) => v.iter().map(|e| e.eval(x)).max().expect("nonempty max"),
            Expr::Min(v) => v.iter().map(|e| e.eval(x)).min().expect("nonempty min"),
            Expr::Sum(v) => v.iter().fold(Rat::zero(), |acc, e| acc + e.eval(x)),
            Expr::Scale(c, e) => c * e.eval(x),
        }
    }

    /// Composition with an affine map `g`: the expression `x -> self(g(x))`.
    pub fn compose(&self, g: &AffineMap) -> Expr {
        match self {
            Expr::Affine { linear, constant } => {
                let n = g.source_dim();
                let lin: QVec =
                    (0..n).map(|j| linear.iter().zip(&g.matrix).fold(Rat::zero(), |acc, (a, row)| acc + a * &row[j])).collect();
                Expr::affine(lin, dot(linear, &g.translation) + constant)
            }
            Expr::Max(v) => Expr::Max(v.iter().map(|e| e.compose(g)).collect()),
            Expr::Min(v) => Expr::Min(v.iter().map(|e| e.compose(g)).collect()),
            Expr::Sum(v) => Expr::Sum(v.iter().map(|e| e.compose(g)).collect()),
            Expr::Scale(c, e) => Expr::Scale(c.clone(), Box::new(e.compose(g))),
        }
    }

    /// The same expression on `R^(n + extra)`, ignoring the new trailing coordinates.
    pub fn extend(&self, extra: usize) -> Expr {
        match self {
            Expr::Affine { linear, constant } => {
                let mut l = linear.clone();
                l.extend(zero_vec(extra));
                Expr::affine(l, constant.clone())
            }
            Expr::Max(v) => Expr::Max(v.iter().map(|e| e.extend(extra)).collect()),
            Expr::Min(v) => Expr::Min(v.iter().map(|e| e.extend(extra)).collect()),
            Expr::Sum(v) => Expr::Sum(v.iter().map(|e| e.extend(extra)).collect()),
            Expr::Scale(c, e) => Expr::Scale(c.clone(), Box::new(e.extend(extra))),
        }
    }

    pub fn restrict(&self, cell: &Cell) -> Restriction {
        match self {
            Expr::Affine { linear, constant } => Restriction::Affine(linear.clone(), constant.clone()),
            Expr::Scale(c, e) => match e.restrict(cell) {
                Restriction::Affine(a, b) => Restriction::Affine(a.iter().map(|x| c * x).collect(), c * b),
                s => s,
            },
            Expr::Sum(v) => {
                let n = self.dim();
                let mut a = zero_vec(n);
                let mut b = Rat::zero();
                for e in v {
                    match e.restrict(cell) {
                        Restriction::Affine(ai, bi) => {
                            for (x, y) in a.iter_mut().zip(&ai) {
                                *x += y;
                            }
                            b += bi;
                        }
                        s => return s,
                    }
                }
                Restriction::Affine(a, b)
            }
            Expr::Max(v) | Expr::Min(v) => {
                let is_max = matches!(self, Expr::Max(_));
                let mut parts = Vec::with_capacity(v.len());
                for e in v {
                    match e.restrict(cell) {
                        Restriction::Affine(a, b) => parts.push((a, b)),
                        s => return s,
                    }
                }
                // Look for a term that dominates all others on the whole cell.
                for (j, (aj, bj)) in parts.iter().enumerate() {
                    let dominates = parts.iter().enumerate().all(|(i, (ai, bi))| {
                        i == j || {
                            let (da, db) = if is_max { (diff(aj, ai), bj - bi) } else { (diff(ai, aj), bi - bj) };
                            nonnegative_on(cell, &da, &db)
                        }
                    });
                    if dominates {
                        return Restriction::Affine(aj.clone(), bj.clone());
                    }
                }
                for i in 0..parts.len() {
                    for j in i + 1..parts.len() {
                        let da = diff(&parts[i].0, &parts[j].0);
                        let db = &parts[j].1 - &parts[i].1;
                        if let Some(h) = Hyperplane::new(&da, &db) {
                            if cell.is_crossed_by(&h) {
                                return Restriction::Split(h);
                            }
                        }
                    }
                }
                unreachable!("without a dominating term some pair of terms changes order on the cell")
            }
        }
    }

    pub fn to_string_with(&self, names: &dyn Fn(usize) -> String) -> String {
        match self {
            Expr::Affine { linear, constant } => {
                let mut s = String::new();
                for (i, c) in linear.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let sign = if c.is_negative() {
                        "-"
                    } else if s.is_empty() {
                        ""
                    } else {
                        "+"
                    };
                    let mag = c.abs();
                    let coef = if mag.is_one() { String::new() } else { format!("{}*", fmt_rat(&mag)) };
                    s.push_str(&format!("{sign}{coef}{}", names(i)));
                }
                if !constant.is_zero() || s.is_empty() {
                    if s.is_empty() {
                        s = fmt_rat(constant);
                    } else if constant.is_negative() {
                        s.push_str(&format!("-{}", fmt_rat(&constant.abs())));
                    } else {
                        s.push_str(&format!("+{}", fmt_rat(constant)));
                    }
                }
                s
            }
            Expr::Max(v) | Expr::Min(v) | Expr::Sum(v) => {
                let name = match self {
                    Expr::Max(_) => "max",
                    Expr::Min(_) => "min",
                    _ => "sum",
                };
                let parts: Vec<String> = v.iter().map(|e| e.to_string_with(names)).collect();
                format!("{name}({})", parts.join(", "))
            }
            Expr::Scale(c, e) => format!("{}*({})", fmt_rat(c), e.to_string_with(names)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with(&|i| format!("x{}", i + 1)))
    }
}

fn diff(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a . x + b >= 0` on the whole cell.
fn nonnegative_on(cell: &Cell, a: &[Rat], b: &Rat) -> bool {
    cell.vertices().iter().all(|v| !(dot(a, v) + b).is_negative())
        && cell.rays().iter().all(|r| !dot(a, r).is_negative())
        && cell.lineality().iter().all(|l| dot(a, l).is_zero())
}

/// Parser for expressions like `max(x1 - 1, 2*x2, 0)`, `min(x1, x3)` or `x1 + 3/2`.
/// Variables are `x1 .. xn`.
pub fn parse_expr(s: &str, n: usize) -> Result<Expr> {
    let mut p = Parser { s: s.as_bytes(), pos: 0, n };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at position {} in {:?}", self.pos, String::from_utf8_lossy(self.s)))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                let t = self.term()?;
                terms.push(Expr::Scale(rat(-1), Box::new(t)));
            } else {
                break;
            }
        }
        Ok(simplify_sum(terms, self.n))
    }

    fn term(&mut self) -> Result<Expr> {
        let f = self.factor()?;
        if self.eat(b'*') {
            let g = self.factor()?;
            return match (&f, &g) {
                (Expr::Affine { linear, constant }, _) if is_zero_vec(linear) => Ok(scale_expr(constant, g)),
                (_, Expr::Affine { linear, constant }) if is_zero_vec(linear) => Ok(scale_expr(constant, f)),
                _ => Err(self.error("products of non-constant terms are not piecewise affine")),
            };
        }
        Ok(f)
    }

    fn factor(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                let f = self.factor()?;
                Ok(scale_expr(&rat(-1), f))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'/') {
                    self.pos += 1;
                }
                let lit = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                Ok(Expr::constant(self.n, parse_rat(lit)?))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                match word {
                    "max" | "min" => {
                        if !self.eat(b'(') {
                            return Err(self.error("expected '(' after max/min"));
                        }
                        let mut args = vec![self.expr()?];
                        while self.eat(b',') {
                            args.push(self.expr()?);
                        }
                        if !self.eat(b')') {
                            return Err(self.error("expected ')'"));
                        }
                        Ok(if word == "max" { Expr::Max(args) } else { Expr::Min(args) })
                    }
                    w if w.starts_with('x') => {
                        let idx: usize = w[1..].parse().map_err(|_| self.error("bad variable name"))?;
                        if idx == 0 || idx > self.n {
                            return Err(self.error(&format!("variable {w} outside 1..{}", self.n)));
                        }
                        Ok(Expr::coordinate(self.n, idx - 1))
                    }
                    _ => Err(self.error(&format!("unknown identifier {word:?}"))),
                }
            }
            _ => Err(self.error("expected a term")),
        }
    }
}

fn scale_expr(c: &Rat, e: Expr) -> Expr {
    match e {
        Expr::Affine { linear, constant } => Expr::affine(linear.iter().map(|x| c * x).collect(), c * constant),
        other => Expr::Scale(c.clone(), Box::new(other)),
    }
}

/// Folds affine summands together; a single summand is returned unwrapped.
fn simplify_sum(terms: Vec<Expr>, n: usize) -> Expr {
    let mut lin = zero_vec(n);
    let mut cst = Rat::zero();
    let mut rest = Vec::new();
    let mut affine_count = 0;
    for t in terms {
        let t = match t {
            Expr::Scale(c, inner) => scale_expr(&c, *inner),
            other => other,
        };
        match t {
            Expr::Affine { linear, constant } => {
                affine_count += 1;
                for (x, y) in lin.iter_mut().zip(&linear) {
                    *x += y;
                }
                cst += constant;
            }
            other => rest.push(other),
        }
    }
    if rest.is_empty() {
        return Expr::affine(lin, cst);
    }
    if affine_count > 0 && !(is_zero_vec(&lin) && cst.is_zero()) {
        rest.push(Expr::affine(lin, cst));
    }
    if rest.len() == 1 {
        rest.pop().unwrap()
    } else {
        Expr::Sum(rest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{int_vec, ratio};

    #[test]
    fn parse_and_eval() {
        let e = parse_expr("max(x1 - 1, x2, 0)", 2).unwrap();
        assert_eq!(e.eval(&int_vec(&[3, 1])), rat(2));
        assert_eq!(e.eval(&int_vec(&[-3, -1])), rat(0));
        let f = parse_expr("3/2*x1 - min(x2, 2) + 1", 2).unwrap();
        assert_eq!(f.eval(&int_vec(&[2, 5])), rat(2));
        assert_eq!(parse_expr("-x1", 1).unwrap().eval(&int_vec(&[4])), rat(-4));
        assert!(parse_expr("x3", 2).is_err());
        assert!(parse_expr("max(x1", 2).is_err());
        assert!(parse_expr("x1*x2", 2).is_err());
    }

    #[test]
    fn display_round_trip() {
        let e = parse_expr("max(x1 - 1, 2*x2, 1/2)", 2).unwrap();
        let again = parse_expr(&e.to_string(), 2).unwrap();
        for p in [int_vec(&[0, 0]), int_vec(&[5, -2]), vec![ratio(1, 3), rat(7)]] {
            assert_eq!(e.eval(&p), again.eval(&p));
        }
    }

    #[test]
    fn restriction_finds_split() {
        let e = parse_expr("max(x1, 0)", 1).unwrap();
        let line = Cell::cone(1, vec![], vec![int_vec(&[1])]).unwrap();
        match e.restrict(&line) {
            Restriction::Split(h) => assert_eq!(h.rhs, rat(0)),
            Restriction::Affine(..) => panic!("max(x, 0) is not affine on R"),
        }
        let ray = Cell::cone(1, vec![int_vec(&[1])], vec![]).unwrap();
        match e.restrict(&ray) {
            Restriction::Affine(a, b) => {
                assert_eq!(a, int_vec(&[1]));
                assert_eq!(b, rat(0));
            }
            Restriction::Split(_) => panic!("affine on the positive ray"),
        }
    }

    #[test]
    fn composition() {
        let e = parse_expr("max(x1, x2, 0)", 2).unwrap();
        let g = AffineMap::from_ints(1, &[vec![1], vec![0]]).unwrap();
        let h = e.compose(&g);
        for t in [-2, 0, 3] {
            assert_eq!(h.eval(&int_vec(&[t])), rat(t.max(0)));
        }
    }
}
