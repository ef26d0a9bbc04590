//! Schubert cells of `Gr_k(R^p)` and the E1 pages they produce for each
//! ordering of trivial and sign coordinates.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modalg::{Bidegree, FreeModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Trivial,
    Sign,
}

/// An ordered decomposition of `R^{p,q}` into one-dimensional pieces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignWord {
    signs: Vec<Sign>,
}

impl SignWord {
    pub fn new(signs: Vec<Sign>) -> Self {
        Self { signs }
    }

    pub fn p(&self) -> usize {
        self.signs.len()
    }

    pub fn q(&self) -> usize {
        self.signs.iter().filter(|&&s| s == Sign::Sign).count()
    }

    /// Letter at 1-based column `j`.
    pub fn letter(&self, j: usize) -> Sign {
        self.signs[j - 1]
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    /// The first `m` letters.
    pub fn prefix(&self, m: usize) -> SignWord {
        SignWord {
            signs: self.signs[..m].to_vec(),
        }
    }

    /// All `C(p, q)` words, ordered lexicographically by the positions of the
    /// sign letters.
    pub fn all(p: usize, q: usize) -> Vec<SignWord> {
        combinations(p, q)
            .into_iter()
            .map(|pos| {
                let mut signs = vec![Sign::Trivial; p];
                for c in pos {
                    signs[c as usize - 1] = Sign::Sign;
                }
                SignWord { signs }
            })
            .collect()
    }
}

impl FromStr for SignWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(Sign::Trivial),
                '-' => Ok(Sign::Sign),
                other => Err(Error::SignWord {
                    token: other.to_string(),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignWord::new)
    }
}

impl fmt::Display for SignWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.signs {
            f.write_str(match s {
                Sign::Trivial => "+",
                Sign::Sign => "-",
            })?;
        }
        Ok(())
    }
}

/// A Schubert cell, indexed by strictly increasing 1-based pivot columns.
/// Row `i` has its last nonzero entry (a 1) in column `c_i`; its free entries
/// sit in the columns left of `c_i` that are not pivots of earlier rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SchubertCell {
    pivots: Vec<u32>,
}

impl SchubertCell {
    pub fn new(pivots: Vec<u32>) -> Result<Self> {
        if pivots.first().is_some_and(|&c| c == 0) || pivots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameters(format!(
                "pivots must be strictly increasing and >= 1, got {pivots:?}"
            )));
        }
        Ok(Self { pivots })
    }

    pub fn pivots(&self) -> &[u32] {
        &self.pivots
    }

    pub fn max_pivot(&self) -> u32 {
        self.pivots.last().copied().unwrap_or(0)
    }

    /// Number of free entries, i.e. boxes of the Young diagram.
    pub fn dimension(&self) -> u32 {
        self.pivots.iter().enumerate().map(|(i, &c)| c - 1 - i as u32).sum()
    }

    /// Rows of the Young diagram, one per matrix row.
    pub fn young_rows(&self) -> Vec<u32> {
        self.pivots.iter().enumerate().map(|(i, &c)| c - 1 - i as u32).collect()
    }

    /// `(dimension, weight)` for the chosen sign word. A free entry in column
    /// `j` of a row with pivot `c` carries the sign action exactly when
    /// columns `j` and `c` have different letters.
    pub fn bidegree(&self, word: &SignWord) -> Bidegree {
        let mut a = 0;
        let mut b = 0;
        for (row, &c) in self.pivots.iter().enumerate() {
            let pivot_sign = word.letter(c as usize);
            let earlier = &self.pivots[..row];
            for j in 1..c {
                if earlier.contains(&j) {
                    continue;
                }
                a += 1;
                if word.letter(j as usize) != pivot_sign {
                    b += 1;
                }
            }
        }
        Bidegree::new(a, b)
    }
}

/// k-subsets of `1..=p` in lexicographic order.
fn combinations(p: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if k > p {
        return out;
    }
    let mut cur: Vec<u32> = (1..=k as u32).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| (cur[i] as usize) < p - (k - 1 - i)) else {
            return out;
        };
        cur[i] += 1;
        for t in i + 1..k {
            cur[t] = cur[t - 1] + 1;
        }
    }
}

pub fn enumerate_cells(k: usize, p: usize) -> Result<Vec<SchubertCell>> {
    if k > p {
        return Err(Error::InvalidParameters(format!("k = {k} exceeds p = {p}")));
    }
    Ok(combinations(p, k)
        .into_iter()
        .map(|pivots| SchubertCell { pivots })
        .collect())
}

pub fn e1_page(k: usize, word: &SignWord) -> Result<FreeModule> {
    Ok(FreeModule::new(
        enumerate_cells(k, word.p())?.iter().map(|c| c.bidegree(word)),
    ))
}

/// Summands of the E1 page coming from cells outside the sub-Grassmannian on
/// the first `m` coordinates.
pub fn e1_quotient_page(k: usize, word: &SignWord, m: usize) -> Result<FreeModule> {
    if m >= word.p() {
        if m == word.p() {
            return Ok(FreeModule::default());
        }
        return Err(Error::InvalidParameters(format!(
            "subspace size {m} exceeds p = {}",
            word.p()
        )));
    }
    Ok(FreeModule::new(
        enumerate_cells(k, word.p())?
            .iter()
            .filter(|c| c.max_pivot() as usize > m)
            .map(|c| c.bidegree(word)),
    ))
}

/// A distinct E1 page with one representative sign word producing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Page {
    pub module: FreeModule,
    pub tension: i64,
    pub word: SignWord,
    pub word_count: usize,
}

/// Distinct E1 pages over all `C(p, q)` sign words, lowest tension first
/// (ties by canonical module order).
pub fn unique_e1_pages(k: usize, p: usize, q: usize) -> Result<Vec<Page>> {
    if q > p || k > p {
        return Err(Error::InvalidParameters(format!(
            "need k <= p and q <= p, got k={k} p={p} q={q}"
        )));
    }
    let words = SignWord::all(p, q);
    let built: Vec<(FreeModule, SignWord)> = words
        .par_iter()
        .map(|w| e1_page(k, w).map(|m| (m, w.clone())))
        .collect::<Result<_>>()?;

    let mut seen: std::collections::BTreeMap<FreeModule, (SignWord, usize)> = Default::default();
    for (m, w) in built {
        // first word in enumeration order represents the page
        seen.entry(m).or_insert((w, 0)).1 += 1;
    }
    let mut pages = seen
        .into_iter()
        .map(|(module, (word, word_count))| {
            Ok(Page {
                tension: module.tension()?,
                module,
                word,
                word_count,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    pages.sort_by(|x, y| (x.tension, &x.module).cmp(&(y.tension, &y.module)));
    Ok(pages)
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `(p - q) q C(p - 2, k - 1)`.
pub fn total_weight_formula(k: usize, p: usize, q: usize) -> Result<u64> {
    if k < 1 || p < 2 || k > p - 1 || q > p {
        return Err(Error::InvalidParameters(format!(
            "total weight needs 1 <= k <= p-1 and 0 <= q <= p, got k={k} p={p} q={q}"
        )));
    }
    let (k, p, q) = (k as u64, p as u64, q as u64);
    Ok((p - q) * q * binomial(p - 2, k - 1))
}

/// Applies the dualities `Gr_k = Gr_{p-k}` and `R^{p,q} = R^{p,p-q}` to land in
/// `k, q <= p/2`.
pub fn normalize_params(k: usize, p: usize, q: usize) -> (usize, usize, usize) {
    (k.min(p - k), p, q.min(p - q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> SignWord {
        s.parse().unwrap()
    }

    fn m(pairs: &[(u32, u32)]) -> FreeModule {
        FreeModule::from_pairs(pairs)
    }

    #[test]
    fn cell_enumeration() {
        let cells = enumerate_cells(1, 3).unwrap();
        let pivots: Vec<_> = cells.iter().map(|c| c.pivots().to_vec()).collect();
        assert_eq!(pivots, vec![vec![1], vec![2], vec![3]]);
        assert_eq!(enumerate_cells(2, 4).unwrap().len(), 6);
        assert!(enumerate_cells(3, 7).unwrap().iter().any(|c| c.pivots() == [2, 5, 7]));
        assert!(enumerate_cells(4, 3).is_err());
        assert_eq!(enumerate_cells(0, 3).unwrap().len(), 1);
    }

    #[test]
    fn cell_bidegrees() {
        let omega = SchubertCell::new(vec![2, 5, 7]).unwrap();
        assert_eq!(omega.bidegree(&w("--++-++")), Bidegree::new(8, 3));
        assert_eq!(omega.young_rows(), vec![1, 3, 4]);
        let c = SchubertCell::new(vec![3]).unwrap();
        assert_eq!(c.bidegree(&w("++-")), Bidegree::new(2, 2));
        let top = SchubertCell::new(vec![1, 2, 3]).unwrap();
        assert_eq!(top.bidegree(&w("-+-+")), Bidegree::new(0, 0));
        assert!(SchubertCell::new(vec![2, 2]).is_err());
    }

    #[test]
    fn e1_examples() {
        assert_eq!(e1_page(1, &w("++-")).unwrap(), m(&[(0, 0), (1, 0), (2, 2)]));
        assert_eq!(
            e1_page(2, &w("++--")).unwrap(),
            m(&[(0, 0), (1, 1), (2, 1), (2, 1), (3, 1), (4, 4)])
        );
        assert_eq!(e1_page(1, &w("-+-")).unwrap(), m(&[(0, 0), (1, 1), (2, 1)]));
    }

    #[test]
    fn unique_pages() {
        assert_eq!(unique_e1_pages(3, 6, 3).unwrap().len(), 6);
        let pages = unique_e1_pages(1, 3, 1).unwrap();
        assert_eq!(pages.len(), 2);
        assert_eq!(pages[0].module, m(&[(0, 0), (1, 1), (2, 1)]));
        assert_eq!(pages[0].word_count + pages[1].word_count, 3);
        let trivial = unique_e1_pages(2, 5, 0).unwrap();
        assert_eq!(trivial.len(), 1);
        assert_eq!(trivial[0].module.total_weight(), 0);
    }

    #[test]
    fn quotient_pages() {
        let word = w("--+++-");
        let q = e1_quotient_page(3, &word, 5).unwrap();
        assert_eq!(q.len(), 10);
        assert!(e1_quotient_page(3, &word, 6).unwrap().is_empty());
        let whole = e1_page(3, &word).unwrap().poincare();
        let sub = e1_page(3, &word.prefix(5)).unwrap().poincare();
        assert_eq!(whole, sub.add(&q.poincare()).unwrap());
    }

    #[test]
    fn total_weight_examples() {
        assert_eq!(total_weight_formula(1, 3, 2).unwrap(), 2);
        assert_eq!(total_weight_formula(1, 3, 1).unwrap(), 2);
        assert_eq!(total_weight_formula(2, 4, 2).unwrap(), 8);
        assert!(total_weight_formula(0, 3, 1).is_err());
        assert!(total_weight_formula(3, 3, 1).is_err());
        assert!(total_weight_formula(1, 3, 4).is_err());
    }

    #[test]
    fn sign_word_parsing() {
        let word = w("--+++-");
        assert_eq!((word.p(), word.q()), (6, 3));
        assert_eq!(word.to_string(), "--+++-");
        assert_eq!("+-x".parse::<SignWord>(), Err(Error::SignWord { token: "x".into() }));
        let all = SignWord::all(3, 1);
        let shown: Vec<_> = all.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, vec!["-++", "+-+", "++-"]);
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_params(4, 6, 4), (2, 6, 2));
        assert_eq!(normalize_params(2, 6, 3), (2, 6, 3));
    }
}
