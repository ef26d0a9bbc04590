//! Sparse polynomials with integer coefficients.
//!
//! [`BiPoly`] lives in `Z[x,y]` and carries the bigraded Poincare statistic of a
//! free module, the Kronholm polynomials and shift stories. [`UniPoly`] is a
//! Laurent polynomial in `x`, the target of the two substitution operators
//! `U: y -> 1` and `F: y -> 1/x`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Exponent pair `(i, j)` of the monomial `x^i y^j`.
pub type Exponent = (u32, u32);

/// A polynomial in `Z[x,y]` stored as a map from exponent pairs to nonzero
/// coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiPoly {
    terms: BTreeMap<Exponent, i64>,
}

/// A Laurent polynomial in a single variable `x`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct UniPoly {
    terms: BTreeMap<i64, i64>,
}

fn add_coeff<K: Ord>(map: &mut BTreeMap<K, i64>, key: K, c: i64) -> Result<()> {
    if c == 0 {
        return Ok(());
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let v = e.get().checked_add(c).ok_or(Error::Overflow("addition"))?;
            if v == 0 {
                e.remove();
            } else {
                *e.get_mut() = v;
            }
        }
    }
    Ok(())
}

/// Graded lexicographic order with `x > y`, highest term first.
fn grlex_desc(a: &Exponent, b: &Exponent) -> Ordering {
    (b.0 + b.1, b.0).cmp(&(a.0 + a.1, a.0))
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0, 0)
    }

    pub fn x() -> Self {
        Self::monomial(1, 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(1, 0, 1)
    }

    pub fn monomial(coeff: i64, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if coeff != 0 {
            terms.insert((i, j), coeff);
        }
        Self { terms }
    }

    /// Builds a polynomial from `(coefficient, i, j)` triples, collecting like
    /// terms.
    pub fn from_terms<I: IntoIterator<Item = (i64, u32, u32)>>(iter: I) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (c, i, j) in iter {
            add_coeff(&mut terms, (i, j), c)?;
        }
        Ok(Self { terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: u32, j: u32) -> i64 {
        self.terms.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in storage order (lexicographic on `(i, j)`).
    pub fn terms(&self) -> impl Iterator<Item = (Exponent, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    /// Terms in canonical graded-lex order, leading term first.
    pub fn terms_grlex(&self) -> Vec<(Exponent, i64)> {
        let mut v: Vec<_> = self.terms().collect();
        v.sort_by(|a, b| grlex_desc(&a.0, &b.0));
        v
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut terms = self.terms.clone();
        for (&e, &c) in &other.terms {
            add_coeff(&mut terms, e, c)?;
        }
        Ok(Self { terms })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut terms = self.terms.clone();
        for (&e, &c) in &other.terms {
            let neg = c.checked_neg().ok_or(Error::Overflow("negation"))?;
            add_coeff(&mut terms, e, neg)?;
        }
        Ok(Self { terms })
    }

    pub fn neg(&self) -> Result<Self> {
        Self::zero().sub(self)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (&(i1, j1), &c1) in &self.terms {
            for (&(i2, j2), &c2) in &other.terms {
                let c = c1.checked_mul(c2).ok_or(Error::Overflow("multiplication"))?;
                let i = i1.checked_add(i2).ok_or(Error::Overflow("exponent"))?;
                let j = j1.checked_add(j2).ok_or(Error::Overflow("exponent"))?;
                add_coeff(&mut terms, (i, j), c)?;
            }
        }
        Ok(Self { terms })
    }

    /// Multiplies by the monomial `x^i y^j`.
    pub fn shift(&self, i: u32, j: u32) -> Self {
        Self {
            terms: self.terms.iter().map(|(&(a, b), &c)| ((a + i, b + j), c)).collect(),
        }
    }

    /// Exact evaluation at an integer point.
    pub fn eval(&self, x0: i64, y0: i64) -> Result<i64> {
        let mut acc: i64 = 0;
        for (&(i, j), &c) in &self.terms {
            let xp = checked_pow(x0, i)?;
            let yp = checked_pow(y0, j)?;
            let t = c
                .checked_mul(xp)
                .and_then(|t| t.checked_mul(yp))
                .ok_or(Error::Overflow("evaluation"))?;
            acc = acc.checked_add(t).ok_or(Error::Overflow("evaluation"))?;
        }
        Ok(acc)
    }

    /// `U: f(x, y) -> f(x, 1)`.
    pub fn substitute_u(&self) -> UniPoly {
        let mut terms = BTreeMap::new();
        for (&(i, _), &c) in &self.terms {
            // overflow here would need |coefficients| near i64::MAX
            add_coeff(&mut terms, i as i64, c).expect("coefficient overflow in U");
        }
        UniPoly { terms }
    }

    /// `F: f(x, y) -> f(x, 1/x)`.
    pub fn substitute_f(&self) -> UniPoly {
        let mut terms = BTreeMap::new();
        for (&(i, j), &c) in &self.terms {
            add_coeff(&mut terms, i as i64 - j as i64, c).expect("coefficient overflow in F");
        }
        UniPoly { terms }
    }

    /// True iff no coefficient is negative. The zero polynomial qualifies.
    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|&c| c > 0)
    }

    /// Monomials with a negative coefficient, for diagnostics.
    pub fn negative_part(&self) -> BiPoly {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(_, &c)| c < 0)
                .map(|(&e, &c)| (e, c))
                .collect(),
        }
    }

    /// Exact quotient by `K_{1,1} = (1 - xy)(y - 1)`, or `None` when `f` is
    /// not in the ideal generated by `K_{1,1}`.
    ///
    /// Membership holds iff both `U(f)` and `F(f)` vanish. The quotient is
    /// found by dividing by `y - 1` one `x`-power at a time and then by
    /// `1 - xy` one diagonal `i - j = const` at a time.
    pub fn divide_by_k11(&self) -> Result<Option<BiPoly>> {
        if !self.substitute_u().is_zero() || !self.substitute_f().is_zero() {
            return Ok(None);
        }
        if self.is_zero() {
            return Ok(Some(Self::zero()));
        }

        // f = (y - 1) h. For each fixed power of x the column g(y) satisfies
        // g(1) = 0 and h_j = -(a_0 + ... + a_j).
        let mut columns: BTreeMap<u32, BTreeMap<u32, i64>> = BTreeMap::new();
        for (&(i, j), &c) in &self.terms {
            columns.entry(i).or_default().insert(j, c);
        }
        let mut h = BTreeMap::new();
        for (i, col) in columns {
            let top = *col.keys().next_back().unwrap();
            let mut prefix: i64 = 0;
            for j in 0..top {
                prefix = prefix
                    .checked_add(col.get(&j).copied().unwrap_or(0))
                    .ok_or(Error::Overflow("division"))?;
                add_coeff(&mut h, (i, j), -prefix)?;
            }
            let total = prefix + col.get(&top).copied().unwrap_or(0);
            if total != 0 {
                return Ok(None);
            }
        }

        // h = (1 - xy) q. Along a diagonal x^d (xy)^t (or y^d (xy)^t) the
        // coefficients b_t give q_t = b_0 + ... + b_t.
        let mut diagonals: BTreeMap<i64, BTreeMap<u32, i64>> = BTreeMap::new();
        for (&(i, j), &c) in &h {
            let t = i.min(j);
            diagonals.entry(i as i64 - j as i64).or_default().insert(t, c);
        }
        let mut q = BTreeMap::new();
        for (d, diag) in diagonals {
            let top = *diag.keys().next_back().unwrap();
            let mut prefix: i64 = 0;
            for t in 0..top {
                prefix = prefix
                    .checked_add(diag.get(&t).copied().unwrap_or(0))
                    .ok_or(Error::Overflow("division"))?;
                let (i, j) = if d >= 0 {
                    (t + d as u32, t)
                } else {
                    (t, t + (-d) as u32)
                };
                add_coeff(&mut q, (i, j), prefix)?;
            }
            if prefix + diag.get(&top).copied().unwrap_or(0) != 0 {
                return Ok(None);
            }
        }

        let q = BiPoly { terms: q };
        if q.mul(&kronholm_poly(1, 1)?)? != *self {
            // unreachable when U(f) = F(f) = 0
            return Ok(None);
        }
        Ok(Some(q))
    }
}

fn checked_pow(base: i64, exp: u32) -> Result<i64> {
    base.checked_pow(exp).ok_or(Error::Overflow("power"))
}

/// The Kronholm polynomial `K_{n,s} = (1 - x^n y^n)(y^s - 1)`.
pub fn kronholm_poly(n: u32, s: u32) -> Result<BiPoly> {
    if n == 0 || s == 0 {
        return Err(Error::InvalidParameters(format!(
            "Kronholm polynomial needs n >= 1 and s >= 1, got n={n}, s={s}"
        )));
    }
    BiPoly::from_terms([(1, 0, s), (-1, 0, 0), (-1, n, n + s), (1, n, n)])
}

impl UniPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, i64)>>(iter: I) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (c, e) in iter {
            add_coeff(&mut terms, e, c)?;
        }
        Ok(Self { terms })
    }

    /// Builds `c_0 + c_1 x + c_2 x^2 + ...` from a coefficient list.
    pub fn from_coeffs(coeffs: &[i64]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(e, &c)| (c, e as i64)))
            .expect("distinct exponents cannot overflow")
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: i64) -> i64 {
        self.terms.get(&e).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut terms = self.terms.clone();
        for (&e, &c) in &other.terms {
            add_coeff(&mut terms, e, c)?;
        }
        Ok(Self { terms })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (&e1, &c1) in &self.terms {
            for (&e2, &c2) in &other.terms {
                let c = c1.checked_mul(c2).ok_or(Error::Overflow("multiplication"))?;
                add_coeff(&mut terms, e1 + e2, c)?;
            }
        }
        Ok(Self { terms })
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, first: bool, c: i64, var_part: &str) -> fmt::Result {
    let mag = c.unsigned_abs();
    if first {
        if c < 0 {
            f.write_str("-")?;
        }
    } else if c < 0 {
        f.write_str(" - ")?;
    } else {
        f.write_str(" + ")?;
    }
    if var_part.is_empty() {
        write!(f, "{mag}")
    } else if mag == 1 {
        f.write_str(var_part)
    } else {
        write!(f, "{mag}{var_part}")
    }
}

fn var_power(name: &str, e: i64) -> String {
    match e {
        0 => String::new(),
        1 => name.to_string(),
        _ => format!("{name}^{e}"),
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, ((i, j), c)) in self.terms_grlex().into_iter().enumerate() {
            let vars = format!("{}{}", var_power("x", i as i64), var_power("y", j as i64));
            write_term(f, n == 0, c, &vars)?;
        }
        Ok(())
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (&e, &c)) in self.terms.iter().rev().enumerate() {
            let vars = match e {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{e}"),
            };
            write_term(f, n == 0, c, &vars)?;
        }
        Ok(())
    }
}

impl FromStr for BiPoly {
    type Err = Error;

    /// Parses the text grammar `[coef]["x"["^"int]]["y"["^"int]]` joined by
    /// `+`/`-`, with optional whitespace and `*`.
    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
        let err = |pos: usize, reason: &str| {
            let token: String = chars[pos.min(chars.len())..].iter().take(8).collect();
            Error::PolyParse {
                token: if token.is_empty() { "<end>".to_string() } else { token },
                reason: reason.to_string(),
            }
        };
        if chars.is_empty() {
            return Err(err(0, "empty input"));
        }

        let read_int = |pos: &mut usize| -> Option<u64> {
            let start = *pos;
            while *pos < chars.len() && chars[*pos].is_ascii_digit() {
                *pos += 1;
            }
            if *pos == start {
                return None;
            }
            chars[start..*pos].iter().collect::<String>().parse().ok()
        };

        let mut terms = BTreeMap::new();
        let mut pos = 0;
        let mut first = true;
        while pos < chars.len() {
            let mut sign = 1i64;
            match chars[pos] {
                '+' => pos += 1,
                '-' => {
                    sign = -1;
                    pos += 1
                }
                _ if first => {}
                _ => return Err(err(pos, "expected `+` or `-` between terms")),
            }
            first = false;
            let term_start = pos;
            let coeff = match read_int(&mut pos) {
                Some(c) => Some(i64::try_from(c).map_err(|_| err(term_start, "coefficient too large"))?),
                None => None,
            };
            let mut xe = 0u32;
            let mut ye = 0u32;
            let mut saw_var = false;
            for (var, slot) in [('x', &mut xe), ('y', &mut ye)] {
                if pos < chars.len() && chars[pos] == var {
                    pos += 1;
                    saw_var = true;
                    *slot = 1;
                    if pos < chars.len() && chars[pos] == '^' {
                        let var_pos = pos - 1;
                        pos += 1;
                        let e = read_int(&mut pos).ok_or_else(|| err(var_pos, "expected exponent after `^`"))?;
                        *slot = u32::try_from(e).map_err(|_| err(pos, "exponent too large"))?;
                    }
                }
            }
            if coeff.is_none() && !saw_var {
                return Err(err(term_start, "expected a term"));
            }
            if pos < chars.len() && chars[pos] != '+' && chars[pos] != '-' {
                return Err(err(pos, "unexpected character"));
            }
            add_coeff(&mut terms, (xe, ye), sign * coeff.unwrap_or(1))?;
        }
        Ok(BiPoly { terms })
    }
}
