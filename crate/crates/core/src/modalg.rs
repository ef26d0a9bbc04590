//! Free bigraded modules over the cohomology of a point, kept as multisets of
//! generator bidegrees, together with the Kronholm shift moves between them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bipoly::{kronholm_poly, BiPoly};
use crate::error::{Error, Result};

/// A bidegree `(a, b)`: topological degree `a`, weight `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bidegree {
    pub a: u32,
    pub b: u32,
}

impl Bidegree {
    pub const fn new(a: u32, b: u32) -> Self {
        Self { a, b }
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl From<(u32, u32)> for Bidegree {
    fn from((a, b): (u32, u32)) -> Self {
        Self { a, b }
    }
}

/// Positive and negative cones of the coefficient ring, as predicates on
/// bidegrees `(i, j)` where the ring is nonzero.
pub struct PointCone;

impl PointCone {
    /// The cone spanned by `tau` at `(0,1)` and `rho` at `(1,1)`.
    pub fn in_positive(i: i64, j: i64) -> bool {
        0 <= i && i <= j
    }

    /// The cone hanging below `theta` at `(0,-2)`.
    pub fn in_negative(i: i64, j: i64) -> bool {
        i <= 0 && j <= i - 2
    }

    pub fn is_nonzero(i: i64, j: i64) -> bool {
        Self::in_positive(i, j) || Self::in_negative(i, j)
    }
}

/// `⊕ Σ^{a_i,b_i} M2` as a sorted multiset of bidegrees.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeModule {
    gens: Vec<Bidegree>,
}

impl FreeModule {
    pub fn new<I: IntoIterator<Item = Bidegree>>(gens: I) -> Self {
        let mut gens: Vec<Bidegree> = gens.into_iter().collect();
        gens.sort_unstable();
        Self { gens }
    }

    pub fn from_pairs(pairs: &[(u32, u32)]) -> Self {
        Self::new(pairs.iter().map(|&p| Bidegree::from(p)))
    }

    /// Builds from `(a, b, count)` triples.
    pub fn from_counts<I: IntoIterator<Item = (u32, u32, u32)>>(iter: I) -> Self {
        Self::new(
            iter.into_iter()
                .flat_map(|(a, b, n)| std::iter::repeat_n(Bidegree::new(a, b), n as usize)),
        )
    }

    /// Generators in canonical order, with repetition.
    pub fn generators(&self) -> &[Bidegree] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn count(&self, d: Bidegree) -> usize {
        let lo = self.gens.partition_point(|g| *g < d);
        let hi = self.gens.partition_point(|g| *g <= d);
        hi - lo
    }

    pub fn contains(&self, d: Bidegree) -> bool {
        self.gens.binary_search(&d).is_ok()
    }

    /// `(bidegree, multiplicity)` pairs in canonical order.
    pub fn counts(&self) -> Vec<(Bidegree, u32)> {
        let mut out: Vec<(Bidegree, u32)> = Vec::new();
        for &g in &self.gens {
            match out.last_mut() {
                Some((d, n)) if *d == g => *n += 1,
                _ => out.push((g, 1)),
            }
        }
        out
    }

    pub fn direct_sum(&self, other: &FreeModule) -> FreeModule {
        Self::new(self.gens.iter().chain(other.gens.iter()).copied())
    }

    /// The bigraded Poincare polynomial `Σ x^a y^b`.
    pub fn poincare(&self) -> BiPoly {
        BiPoly::from_terms(self.counts().into_iter().map(|(d, n)| (n as i64, d.a, d.b)))
            .expect("generator counts fit in i64")
    }

    /// Inverse of [`FreeModule::poincare`] for polynomials with positive
    /// coefficients.
    pub fn from_poly(f: &BiPoly) -> Result<FreeModule> {
        let neg = f.negative_part();
        if !neg.is_zero() {
            return Err(Error::NegativeCoefficients(neg.to_string()));
        }
        Ok(Self::from_counts(f.terms().map(|((i, j), c)| (i, j, c as u32))))
    }

    /// `P(M)(1, 2)`.
    pub fn tension(&self) -> Result<i64> {
        self.poincare().eval(1, 2)
    }

    pub fn total_weight(&self) -> u64 {
        self.gens.iter().map(|g| g.b as u64).sum()
    }

    /// Performs a single Kronholm shift: one copy of `src = (a,b)` moves up to
    /// `(a, b+s)` and one copy of `tgt = (c,d)` moves down to `(c, b+n)`.
    pub fn apply_shift(&self, mv: &ShiftMove) -> Result<FreeModule> {
        let mut gens = self.gens.clone();
        for d in [mv.src, mv.tgt] {
            let idx = gens
                .binary_search(&d)
                .map_err(|_| Error::IllegalShift(format!("module has no generator in bidegree {d}")))?;
            gens.remove(idx);
        }
        let (up, down) = mv.outcome();
        gens.push(up);
        gens.push(down);
        Ok(Self::new(gens))
    }

    /// `(P(B) - P(A)) / K_{1,1}` when the quotient exists in `Z[x,y]`.
    pub fn shift_story(&self, to: &FreeModule) -> Result<Option<BiPoly>> {
        to.poincare().sub(&self.poincare())?.divide_by_k11()
    }

    /// Whether `to` is reachable from `self` by Kronholm shifts, as witnessed
    /// by a shift story with no negative coefficients.
    pub fn can_relax_to(&self, to: &FreeModule) -> bool {
        match self.shift_story(to) {
            Ok(Some(story)) => story.is_nonnegative(),
            // overflow needs astronomically large modules; treat as unrelated
            _ => false,
        }
    }

    /// Checks `0 <= b <= a` on every generator.
    pub fn check_cell_bounds(&self) -> Result<()> {
        match self.gens.iter().find(|g| g.b > g.a) {
            Some(g) => Err(Error::Module(format!("generator {g} has weight above its degree"))),
            None => Ok(()),
        }
    }

    /// Rank table: rows are weights (highest first), columns topological
    /// degrees, blank where no generator lives.
    pub fn render_rank_table(&self) -> String {
        if self.gens.is_empty() {
            return "(empty)\n".to_string();
        }
        let counts: BTreeMap<(u32, u32), u32> = self.counts().into_iter().map(|(d, n)| ((d.a, d.b), n)).collect();
        let max_a = self.gens.iter().map(|g| g.a).max().unwrap();
        let max_b = self.gens.iter().map(|g| g.b).max().unwrap();
        let max_count = counts.values().copied().max().unwrap();
        let width = max_count.to_string().len().max(max_a.to_string().len());
        let label = max_b.to_string().len();

        let mut out = String::new();
        for b in (0..=max_b).rev() {
            let mut line = format!("{b:>label$} |");
            for a in 0..=max_a {
                match counts.get(&(a, b)) {
                    Some(n) => line.push_str(&format!(" {n:>width$}")),
                    None => line.push_str(&" ".repeat(width + 1)),
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out.push_str(&format!(
            "{} +{}\n",
            " ".repeat(label),
            "-".repeat((max_a as usize + 1) * (width + 1))
        ));
        let mut axis = format!("{}  ", " ".repeat(label));
        for a in 0..=max_a {
            axis.push_str(&format!(" {a:>width$}"));
        }
        out.push_str(axis.trim_end());
        out.push('\n');
        out
    }
}

impl fmt::Display for FreeModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, (d, c)) in self.counts().into_iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            if c == 1 {
                write!(f, "{d}")?;
            } else {
                write!(f, "{d}x{c}")?;
            }
        }
        f.write_str("}")
    }
}

#[derive(Serialize, Deserialize)]
struct ModuleRepr {
    generators: Vec<[u32; 3]>,
}

impl Serialize for FreeModule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModuleRepr {
            generators: self.counts().into_iter().map(|(d, n)| [d.a, d.b, n]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FreeModule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ModuleRepr::deserialize(d)?;
        if let Some(g) = repr.generators.iter().find(|g| g[2] == 0) {
            return Err(serde::de::Error::custom(format!(
                "zero count for bidegree ({},{})",
                g[0], g[1]
            )));
        }
        Ok(FreeModule::from_counts(
            repr.generators.into_iter().map(|[a, b, n]| (a, b, n)),
        ))
    }
}

/// A Kronholm shift between generators at `src = (a,b)` and `tgt = (c,d)`
/// with `n = c - a >= 1` and `s = d - b - n >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ShiftMove {
    pub src: Bidegree,
    pub tgt: Bidegree,
}

impl ShiftMove {
    pub fn new(src: Bidegree, tgt: Bidegree) -> Result<Self> {
        let mv = Self { src, tgt };
        if Self::is_legal(src, tgt) {
            Ok(mv)
        } else {
            Err(Error::IllegalShift(format!(
                "{src} -> {tgt} needs c - a >= 1 and (d - b) - (c - a) >= 1"
            )))
        }
    }

    /// The bidegree condition for a possible differential. Equivalent to the
    /// supporting element at `(a + 1 - c, b - d)` lying in the negative cone.
    pub fn is_legal(src: Bidegree, tgt: Bidegree) -> bool {
        let n = tgt.a as i64 - src.a as i64;
        let s = tgt.b as i64 - src.b as i64 - n;
        n >= 1 && s >= 1
    }

    pub fn n(&self) -> u32 {
        self.tgt.a - self.src.a
    }

    pub fn s(&self) -> u32 {
        self.tgt.b - self.src.b - self.n()
    }

    /// The two generators replacing `src` and `tgt`.
    pub fn outcome(&self) -> (Bidegree, Bidegree) {
        (
            Bidegree::new(self.src.a, self.src.b + self.s()),
            Bidegree::new(self.tgt.a, self.src.b + self.n()),
        )
    }

    /// `x^a y^b K_{n,s}`, the change in Poincare polynomial.
    pub fn kronholm_change(&self) -> BiPoly {
        kronholm_poly(self.n(), self.s())
            .expect("legal move has n, s >= 1")
            .shift(self.src.a, self.src.b)
    }
}
