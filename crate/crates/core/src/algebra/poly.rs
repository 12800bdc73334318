//! Sparse multivariate polynomials over arbitrary-precision integers.
//!
//! A [`Polynomial`] carries its own ordered list of indeterminate names.
//! Binary operations first unify the two name lists, so values in `Z[y]`
//! and `Z[u, v]` can be mixed freely: a constant has no indeterminates and
//! unifies with anything.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type Exponent = Vec<u32>;

#[derive(Clone, Debug, Default)]
pub struct Polynomial {
    vars: Vec<String>,
    terms: BTreeMap<Exponent, BigInt>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Self { vars: Vec::new(), terms }
    }

    /// The polynomial consisting of a single indeterminate.
    pub fn var(name: &str) -> Self {
        Self::monomial(&[name], &[1], 1)
    }

    pub fn monomial(names: &[&str], exps: &[u32], coeff: impl Into<BigInt>) -> Self {
        assert_eq!(names.len(), exps.len(), "one exponent per indeterminate");
        let mut p = Self::with_vars(names.iter().map(|s| s.to_string()).collect());
        let c = coeff.into();
        if !c.is_zero() {
            p.terms.insert(exps.to_vec(), c);
        }
        p
    }

    /// Builds `sum coeffs[k] * name^k`.
    pub fn univariate(name: &str, coeffs: &[i64]) -> Self {
        let mut p = Self::with_vars(vec![name.to_string()]);
        for (k, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                p.terms.insert(vec![k as u32], BigInt::from(c));
            }
        }
        p
    }

    fn with_vars(vars: Vec<String>) -> Self {
        Self { vars, terms: BTreeMap::new() }
    }

    /// Builds a polynomial from explicit terms. Zero coefficients are dropped
    /// and repeated exponents are summed.
    pub fn from_terms(
        vars: Vec<String>,
        terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>,
    ) -> Result<Self> {
        let mut seen = vars.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != vars.len() {
            return Err(Error::Parse(format!("repeated indeterminate in {vars:?}")));
        }
        let mut p = Self::with_vars(vars);
        for (exp, c) in terms {
            if exp.len() != p.vars.len() {
                return Err(Error::Parse(format!(
                    "exponent {exp:?} does not match {} indeterminates",
                    p.vars.len()
                )));
            }
            p.add_term(exp, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exp: Exponent, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterates over `(exponent, coefficient)` pairs in the current indeterminate order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// The constant term.
    pub fn constant_term(&self) -> BigInt {
        self.terms
            .get(&vec![0; self.vars.len()])
            .cloned()
            .unwrap_or_default()
    }

    /// Returns the value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigInt> {
        if self.terms.keys().all(|e| e.iter().all(|&x| x == 0)) {
            Some(self.constant_term())
        } else {
            None
        }
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Re-expresses `self` over `target`, which must contain every indeterminate
    /// that actually occurs in `self`.
    fn lift_to(&self, target: &[String]) -> Self {
        if self.vars == target {
            return self.clone();
        }
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| target.iter().position(|t| t == v))
            .collect();
        let mut out = Self::with_vars(target.to_vec());
        for (exp, c) in &self.terms {
            let mut e = vec![0u32; target.len()];
            for (i, &k) in exp.iter().enumerate() {
                if k > 0 {
                    let j = map[i].expect("indeterminate missing from target set");
                    e[j] = k;
                }
            }
            out.add_term(e, c.clone());
        }
        out
    }

    fn unified_vars(a: &[String], b: &[String]) -> Vec<String> {
        let mut vars = a.to_vec();
        for v in b {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars
    }

    fn unify(a: &Self, b: &Self) -> (Self, Self) {
        let vars = Self::unified_vars(&a.vars, &b.vars);
        (a.lift_to(&vars), b.lift_to(&vars))
    }

    /// Reorders or extends the indeterminate list; names not used by the
    /// polynomial may be dropped.
    pub fn with_indeterminates(&self, names: &[&str]) -> Result<Self> {
        let target: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        for (i, v) in self.vars.iter().enumerate() {
            let used = self.terms.keys().any(|e| e[i] > 0);
            if used && !target.contains(v) {
                return Err(Error::Parse(format!("indeterminate {v} is in use")));
            }
        }
        let stripped = self.strip_unused();
        Ok(stripped.lift_to(&target))
    }

    /// Drops indeterminates that do not occur in any term.
    pub fn strip_unused(&self) -> Self {
        let keep: Vec<usize> = (0..self.vars.len())
            .filter(|&i| self.terms.keys().any(|e| e[i] > 0))
            .collect();
        if keep.len() == self.vars.len() {
            return self.clone();
        }
        let mut out = Self::with_vars(keep.iter().map(|&i| self.vars[i].clone()).collect());
        for (e, c) in &self.terms {
            out.add_term(keep.iter().map(|&i| e[i]).collect(), c.clone());
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::with_vars(self.vars.clone());
        }
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Replaces the indeterminate `name` by `value`. Names absent from `self`
    /// leave it unchanged.
    pub fn substitute(&self, name: &str, value: &Polynomial) -> Self {
        let Some(idx) = self.var_index(name) else {
            return self.clone();
        };
        let max_deg = self.terms.keys().map(|e| e[idx]).max().unwrap_or(0);
        let mut powers = vec![Self::one()];
        for k in 1..=max_deg as usize {
            let next = &powers[k - 1] * value;
            powers.push(next);
        }
        let mut acc = Self::zero();
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            rest[idx] = 0;
            let mut term = Self::with_vars(self.vars.clone());
            term.terms.insert(rest, c.clone());
            acc = &acc + &(&term * &powers[e[idx] as usize]);
        }
        acc.remove_var(name)
    }

    fn remove_var(&self, name: &str) -> Self {
        let Some(idx) = self.var_index(name) else {
            return self.clone();
        };
        if self.terms.keys().any(|e| e[idx] > 0) {
            return self.clone();
        }
        let mut vars = self.vars.clone();
        vars.remove(idx);
        let mut out = Self::with_vars(vars);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e.remove(idx);
            out.add_term(e, c.clone());
        }
        out
    }

    /// Substitutes an integer for `name`.
    pub fn evaluate(&self, name: &str, value: impl Into<BigInt>) -> Self {
        self.substitute(name, &Self::constant(value))
    }

    /// Evaluates at integer values for every indeterminate.
    pub fn eval_all(&self, values: &[(&str, BigInt)]) -> Result<BigInt> {
        let mut p = self.clone();
        for (name, v) in values {
            p = p.evaluate(name, v.clone());
        }
        p.as_constant()
            .ok_or_else(|| Error::Parse(format!("unassigned indeterminate in {p}")))
    }

    fn total_degree(e: &[u32]) -> u32 {
        e.iter().sum()
    }

    /// Graded-lexicographic comparison: total degree first, then lexicographic
    /// in indeterminate order.
    fn grlex(a: &[u32], b: &[u32]) -> Ordering {
        Self::total_degree(a)
            .cmp(&Self::total_degree(b))
            .then_with(|| a.cmp(b))
    }

    fn leading(&self) -> Option<(&Exponent, &BigInt)> {
        self.terms.iter().max_by(|x, y| Self::grlex(x.0, y.0))
    }

    /// Exact division. Fails with [`Error::NotDivisible`] when `divisor` does
    /// not divide `self` in the integer polynomial ring.
    pub fn exact_div(&self, divisor: &Polynomial) -> Result<Self> {
        if divisor.is_zero() {
            return Err(Error::NotDivisible {
                dividend: self.to_string(),
                divisor: divisor.to_string(),
            });
        }
        let (mut rem, d) = Self::unify(self, divisor);
        let vars = rem.vars.clone();
        let (d_exp, d_coeff) = {
            let (e, c) = d.leading().unwrap();
            (e.clone(), c.clone())
        };
        let mut quotient = Self::with_vars(vars.clone());
        let fail = || Error::NotDivisible {
            dividend: self.to_string(),
            divisor: divisor.to_string(),
        };
        while let Some((r_exp, r_coeff)) = rem.leading().map(|(e, c)| (e.clone(), c.clone())) {
            if r_exp.iter().zip(&d_exp).any(|(r, d)| r < d) {
                return Err(fail());
            }
            let (q, r) = r_coeff.div_rem(&d_coeff);
            if !r.is_zero() {
                return Err(fail());
            }
            let q_exp: Exponent = r_exp.iter().zip(&d_exp).map(|(a, b)| a - b).collect();
            let mut t = Self::with_vars(vars.clone());
            t.terms.insert(q_exp.clone(), q.clone());
            rem = &rem - &(&t * &d);
            quotient.add_term(q_exp, q);
        }
        Ok(quotient)
    }

    /// Degree in a single indeterminate (zero if absent or if the polynomial is zero).
    pub fn degree_in(&self, name: &str) -> u32 {
        match self.var_index(name) {
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    fn sorted_terms(&self) -> Vec<(&Exponent, &BigInt)> {
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| Self::grlex(b.0, a.0));
        ts
    }

    /// Parses the canonical string form, e.g. `"t^2 - 3*t + 2"` or `"-y - 2"`.
    /// Indeterminates are collected in order of first appearance.
    pub fn parse(s: &str) -> Result<Self> {
        Parser::new(s).parse()
    }

    pub fn to_json(&self) -> PolynomialJson {
        let p = self.clone();
        PolynomialJson {
            indeterminates: p.vars.clone(),
            terms: p
                .sorted_terms()
                .into_iter()
                .map(|(e, c)| TermJson { exp: e.clone(), coeff: c.to_string() })
                .collect(),
        }
    }

    pub fn from_json(j: &PolynomialJson) -> Result<Self> {
        let terms = j
            .terms
            .iter()
            .map(|t| {
                t.coeff
                    .parse::<BigInt>()
                    .map(|c| (t.exp.clone(), c))
                    .map_err(|e| Error::Parse(format!("coefficient {:?}: {e}", t.coeff)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(j.indeterminates.clone(), terms)
    }
}

/// JSON form `{indeterminates: [...], terms: [{exp: [...], coeff: "..."}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub indeterminates: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coeff: String,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::unify(self, other);
        a.terms == b.terms
    }
}

impl Eq for Polynomial {}

impl From<i64> for Polynomial {
    fn from(c: i64) -> Self {
        Self::constant(c)
    }
}

impl From<BigInt> for Polynomial {
    fn from(c: BigInt) -> Self {
        Self::constant(c)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let (mut a, b) = Polynomial::unify(self, rhs);
        for (e, c) in b.terms {
            a.add_term(e, c);
        }
        a
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let (mut a, b) = Polynomial::unify(self, rhs);
        for (e, c) in b.terms {
            a.add_term(e, -c);
        }
        a
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let (a, b) = Polynomial::unify(self, rhs);
        let mut out = Polynomial::with_vars(a.vars.clone());
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&BigInt::from(-1))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::iter::Sum for Polynomial {
    fn sum<I: Iterator<Item = Polynomial>>(iter: I) -> Self {
        iter.fold(Polynomial::zero(), |acc, p| &acc + &p)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (exp, c)) in self.sorted_terms().into_iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono: Vec<String> = exp
                .iter()
                .zip(&self.vars)
                .filter(|(e, _)| **e > 0)
                .map(|(e, v)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect();
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{abs}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Polynomial::parse(&s).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self { chars: src.chars().peekable(), src }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("polynomial {:?}: {what}", self.src))
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn number(&mut self) -> Option<BigInt> {
        let mut digits = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        if digits.is_empty() {
            None
        } else {
            digits.parse().ok()
        }
    }

    fn ident(&mut self) -> Option<String> {
        let mut name = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_alphabetic() || c == '_' || (!name.is_empty() && c.is_ascii_digit()) {
                name.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        (!name.is_empty()).then_some(name)
    }

    fn sign(&mut self) -> Option<bool> {
        self.skip_ws();
        match self.chars.peek() {
            Some('+') => {
                self.chars.next();
                Some(false)
            }
            Some('-') | Some('\u{2212}') => {
                self.chars.next();
                Some(true)
            }
            _ => None,
        }
    }

    fn parse(mut self) -> Result<Polynomial> {
        let mut acc = Polynomial::zero();
        let mut first = true;
        loop {
            self.skip_ws();
            if self.chars.peek().is_none() {
                if first {
                    return Err(self.err("empty"));
                }
                break;
            }
            let negative = match self.sign() {
                Some(n) => n,
                None if first => false,
                None => return Err(self.err("expected + or -")),
            };
            first = false;
            let mut term = self.term()?;
            if negative {
                term = -&term;
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut term = Polynomial::one();
        let mut factors = 0;
        loop {
            self.skip_ws();
            if let Some(n) = self.number() {
                term = term.scale(&n);
            } else if let Some(name) = self.ident() {
                self.skip_ws();
                let mut e = 1u32;
                if self.chars.peek() == Some(&'^') {
                    self.chars.next();
                    self.skip_ws();
                    e = self
                        .number()
                        .and_then(|n| n.to_u32())
                        .ok_or_else(|| self.err("bad exponent"))?;
                }
                term = &term * &Polynomial::var(&name).pow(e);
            } else {
                return Err(self.err("expected a coefficient or indeterminate"));
            }
            factors += 1;
            self.skip_ws();
            if self.chars.peek() == Some(&'*') {
                self.chars.next();
            } else {
                break;
            }
        }
        debug_assert!(factors > 0);
        Ok(term)
    }
}
