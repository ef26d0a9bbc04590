//! Enumeration of possible outcomes of a spectral sequence and the pruned
//! search that intersects them across E1 pages.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use indexmap::IndexSet;
use rayon::prelude::*;
use rustc_hash::{FxBuildHasher, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modalg::{Bidegree, FreeModule, ShiftMove};
use crate::schubert::unique_e1_pages;

/// A pair of generator bidegrees that could support a differential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DifferentialPair {
    pub src: Bidegree,
    pub tgt: Bidegree,
    /// Multiplicity of `src` in the module.
    pub src_count: u32,
    /// Multiplicity of `tgt` in the module.
    pub tgt_count: u32,
}

impl DifferentialPair {
    pub fn shift_move(&self) -> ShiftMove {
        ShiftMove {
            src: self.src,
            tgt: self.tgt,
        }
    }

    pub fn n(&self) -> u32 {
        self.shift_move().n()
    }

    pub fn s(&self) -> u32 {
        self.shift_move().s()
    }
}

/// All distinct bidegree pairs of `m` that satisfy the differential condition.
pub fn possible_differentials(m: &FreeModule) -> Vec<DifferentialPair> {
    let counts = m.counts();
    let mut out = Vec::new();
    for &(src, src_count) in &counts {
        for &(tgt, tgt_count) in &counts {
            if ShiftMove::is_legal(src, tgt) {
                out.push(DifferentialPair {
                    src,
                    tgt,
                    src_count,
                    tgt_count,
                });
            }
        }
    }
    out
}

/// How the set of possible outcomes of a page is generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Strategy {
    /// Every module reachable by a sequence of single shifts, re-deriving the
    /// possible differentials after each one. `max_depth` bounds the number of
    /// shifts.
    Closure { max_depth: Option<usize> },
    /// Simultaneous shifts along a set of differentials that uses each
    /// generator at most once.
    Matchings,
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::Closure { max_depth: None }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Closure { max_depth: None } => f.write_str("closure"),
            Strategy::Closure { max_depth: Some(d) } => write!(f, "closure:{d}"),
            Strategy::Matchings => f.write_str("matchings"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    /// `closure`, `closure:<depth>` or `matchings`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "closure" => Ok(Strategy::Closure { max_depth: None }),
            None if s == "matchings" => Ok(Strategy::Matchings),
            Some(("closure", d)) => d
                .parse()
                .map(|d| Strategy::Closure { max_depth: Some(d) })
                .map_err(|_| Error::InvalidParameters(format!("bad closure depth `{d}`"))),
            _ => Err(Error::InvalidParameters(format!("unknown strategy `{s}`"))),
        }
    }
}

/// Resource limits for candidate generation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of distinct intermediate modules.
    pub max_modules: usize,
    /// Approximate cap on memory held by stored modules.
    pub max_bytes: usize,
    pub time_limit: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_modules: 10_000_000,
            max_bytes: 2 << 30,
            time_limit: None,
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Self {
            max_modules: usize::MAX,
            max_bytes: usize::MAX,
            time_limit: None,
        }
    }

    pub fn with_max_modules(mut self, n: usize) -> Self {
        self.max_modules = n;
        self
    }

    pub fn with_time_limit(mut self, t: Duration) -> Self {
        self.time_limit = Some(t);
        self
    }
}

struct Meter {
    budget: Budget,
    start: Instant,
}

impl Meter {
    fn new(budget: Budget) -> Self {
        Self {
            budget,
            start: Instant::now(),
        }
    }

    fn check(&self, modules: usize, gens: usize) -> Result<()> {
        if modules > self.budget.max_modules {
            return Err(Error::Budget(format!(
                "more than {} intermediate modules",
                self.budget.max_modules
            )));
        }
        let bytes = modules.saturating_mul(2 * gens + 64);
        if bytes > self.budget.max_bytes {
            return Err(Error::Budget(format!(
                "stored modules would exceed {} bytes",
                self.budget.max_bytes
            )));
        }
        if let Some(limit) = self.budget.time_limit {
            if self.start.elapsed() > limit {
                return Err(Error::Budget(format!("time limit of {limit:?} exceeded")));
            }
        }
        Ok(())
    }
}

// Modules are packed as sorted `a << 8 | b` words while searching.
type Packed = Box<[u16]>;

fn pack(m: &FreeModule) -> Result<Packed> {
    m.generators()
        .iter()
        .map(|g| {
            if g.a < 256 && g.b < 256 {
                Ok(((g.a as u16) << 8) | g.b as u16)
            } else {
                Err(Error::Module(format!("bidegree {g} too large for the search")))
            }
        })
        .collect()
}

fn unpack(p: &[u16]) -> FreeModule {
    FreeModule::new(p.iter().map(|&w| Bidegree::new((w >> 8) as u32, (w & 0xff) as u32)))
}

fn packed_legal(src: u16, tgt: u16) -> bool {
    let (a, b) = ((src >> 8) as i32, (src & 0xff) as i32);
    let (c, d) = ((tgt >> 8) as i32, (tgt & 0xff) as i32);
    c - a >= 1 && (d - b) - (c - a) >= 1
}

fn packed_shift(m: &[u16], src: u16, tgt: u16) -> Packed {
    let (a, b) = (src >> 8, src & 0xff);
    let (c, d) = (tgt >> 8, tgt & 0xff);
    let n = c - a;
    let s = d - b - n;
    let up = (a << 8) | (b + s);
    let down = (c << 8) | (b + n);
    let mut v: Vec<u16> = Vec::with_capacity(m.len());
    let mut skip_src = true;
    let mut skip_tgt = true;
    for &g in m {
        if skip_src && g == src {
            skip_src = false;
        } else if skip_tgt && g == tgt {
            skip_tgt = false;
        } else {
            v.push(g);
        }
    }
    for g in [up, down] {
        let at = v.partition_point(|&x| x < g);
        v.insert(at, g);
    }
    v.into_boxed_slice()
}

fn successors(m: &[u16]) -> Vec<Packed> {
    let mut distinct: Vec<u16> = m.to_vec();
    distinct.dedup();
    let mut out = Vec::new();
    for &src in &distinct {
        for &tgt in &distinct {
            if packed_legal(src, tgt) {
                out.push(packed_shift(m, src, tgt));
            }
        }
    }
    out
}

const CHUNK: usize = 4096;

fn closure_outcomes(m: &FreeModule, max_depth: Option<usize>, meter: &Meter) -> Result<Vec<FreeModule>> {
    let gens = m.len();
    let mut seen: IndexSet<Packed, FxBuildHasher> = IndexSet::with_hasher(FxBuildHasher);
    seen.insert(pack(m)?);
    let mut layer = 0..1;
    let mut depth = 0;
    while !layer.is_empty() && max_depth.is_none_or(|d| depth < d) {
        let next_start = seen.len();
        let mut i = layer.start;
        while i < layer.end {
            let end = (i + CHUNK).min(layer.end);
            let found: Vec<Packed> = (i..end)
                .into_par_iter()
                .flat_map_iter(|idx| successors(&seen[idx]))
                .collect();
            for s in found {
                seen.insert(s);
            }
            meter.check(seen.len(), gens)?;
            i = end;
        }
        layer = next_start..seen.len();
        depth += 1;
    }
    let mut out: Vec<FreeModule> = seen.iter().map(|p| unpack(p)).collect();
    out.sort_unstable();
    Ok(out)
}

fn matching_outcomes(m: &FreeModule, meter: &Meter) -> Result<Vec<FreeModule>> {
    let inst = pack(m)?;
    let n = inst.len();
    let mut found: FxHashSet<Packed> = FxHashSet::default();
    let mut work = inst.to_vec();
    let mut used = vec![false; n];
    let mut leaves = 0usize;

    fn rec(
        i: usize,
        inst: &[u16],
        work: &mut Vec<u16>,
        used: &mut Vec<bool>,
        found: &mut FxHashSet<Packed>,
        leaves: &mut usize,
        meter: &Meter,
    ) -> Result<()> {
        let n = inst.len();
        let Some(i) = (i..n).find(|&t| !used[t]) else {
            let mut v = work.clone();
            v.sort_unstable();
            found.insert(v.into_boxed_slice());
            *leaves += 1;
            if leaves.is_multiple_of(CHUNK) {
                meter.check(*leaves, n)?;
            }
            return Ok(());
        };
        used[i] = true;
        rec(i + 1, inst, work, used, found, leaves, meter)?;
        for j in i + 1..n {
            if used[j] {
                continue;
            }
            for (s, t) in [(i, j), (j, i)] {
                if !packed_legal(inst[s], inst[t]) {
                    continue;
                }
                let (a, b) = (inst[s] >> 8, inst[s] & 0xff);
                let (c, d) = (inst[t] >> 8, inst[t] & 0xff);
                let nn = c - a;
                let ss = d - b - nn;
                let (old_s, old_t) = (work[s], work[t]);
                work[s] = (a << 8) | (b + ss);
                work[t] = (c << 8) | (b + nn);
                used[j] = true;
                rec(i + 1, inst, work, used, found, leaves, meter)?;
                used[j] = false;
                work[s] = old_s;
                work[t] = old_t;
            }
        }
        used[i] = false;
        Ok(())
    }

    rec(0, &inst, &mut work, &mut used, &mut found, &mut leaves, meter)?;
    meter.check(found.len(), n)?;
    let mut out: Vec<FreeModule> = found.iter().map(|p| unpack(p)).collect();
    out.sort_unstable();
    Ok(out)
}

/// The distinct modules the spectral sequence starting at `m` could converge
/// to, in canonical order. Always contains `m`.
pub fn candidate_outcomes(m: &FreeModule, strategy: Strategy, budget: Budget) -> Result<Vec<FreeModule>> {
    let meter = Meter::new(budget);
    match strategy {
        Strategy::Closure { max_depth } => closure_outcomes(m, max_depth, &meter),
        Strategy::Matchings => matching_outcomes(m, &meter),
    }
}

/// Indices of the pages that cannot relax to any other page in the list.
pub fn reduce_pages(pages: &[FreeModule]) -> Vec<usize> {
    (0..pages.len())
        .into_par_iter()
        .filter(|&i| {
            !pages
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && other != &pages[i] && pages[i].can_relax_to(other))
        })
        .collect()
}

/// Candidates that `start` can relax to.
pub fn relaxation_filter(cands: &[FreeModule], start: &FreeModule) -> Vec<FreeModule> {
    cands.par_iter().filter(|a| start.can_relax_to(a)).cloned().collect()
}

/// Keeps the candidates reachable from `h_sub ⊕ e1_q`.
pub fn subspace_filter(cands: &[FreeModule], h_sub: &FreeModule, e1_q: &FreeModule) -> Vec<FreeModule> {
    relaxation_filter(cands, &h_sub.direct_sum(e1_q))
}

/// Order in which the surviving pages filter the candidate set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterOrder {
    #[default]
    DescendingTension,
    AscendingTension,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub strategy: Strategy,
    pub budget: Budget,
    pub filter_order: FilterOrder,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageSummary {
    pub word: String,
    pub word_count: usize,
    pub tension: i64,
    pub poincare: String,
    pub module: FreeModule,
}

/// One filtering step: the page used and the candidates it removed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub page: usize,
    /// Indices into [`SolveReport::candidates`].
    pub removed: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "state")]
pub enum Status {
    Complete,
    Aborted { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub k: usize,
    pub p: usize,
    pub q: usize,
    pub strategy: Strategy,
    pub filter_order: FilterOrder,
    pub pages: Vec<PageSummary>,
    pub chosen_page: usize,
    /// Pages other than the chosen one that survive redundancy reduction.
    pub reduced_pages: Vec<usize>,
    pub candidates: Vec<FreeModule>,
    pub eliminations: Vec<Elimination>,
    pub survivors: Vec<FreeModule>,
    pub status: Status,
}

impl SolveReport {
    pub fn is_complete(&self) -> bool {
        self.status == Status::Complete
    }

    /// Re-applies the logged filters to the raw candidates.
    pub fn replay(&self) -> Vec<FreeModule> {
        let mut alive = vec![true; self.candidates.len()];
        for e in &self.eliminations {
            for &i in &e.removed {
                alive[i] = false;
            }
        }
        self.candidates
            .iter()
            .zip(alive)
            .filter(|(_, keep)| *keep)
            .map(|(c, _)| c.clone())
            .collect()
    }

    pub fn survivor_polys(&self) -> Vec<String> {
        self.survivors.iter().map(|m| m.poincare().to_string()).collect()
    }
}

pub fn check_grassmannian_params(k: usize, p: usize, q: usize) -> Result<()> {
    if k < 1 || k + 1 > p || q > p {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= k <= p-1 and 0 <= q <= p, got k={k} p={p} q={q}"
        )));
    }
    Ok(())
}

/// Runs the pruned search: build the distinct E1 pages, enumerate outcomes of
/// the lowest-tension page, drop redundant pages, and keep only the
/// candidates every remaining page can relax to.
pub fn solve(k: usize, p: usize, q: usize, opts: SolveOptions) -> Result<SolveReport> {
    check_grassmannian_params(k, p, q)?;
    let pages = unique_e1_pages(k, p, q)?;
    let summaries: Vec<PageSummary> = pages
        .iter()
        .map(|pg| PageSummary {
            word: pg.word.to_string(),
            word_count: pg.word_count,
            tension: pg.tension,
            poincare: pg.module.poincare().to_string(),
            module: pg.module.clone(),
        })
        .collect();
    let mut report = SolveReport {
        k,
        p,
        q,
        strategy: opts.strategy,
        filter_order: opts.filter_order,
        pages: summaries,
        chosen_page: 0,
        reduced_pages: Vec::new(),
        candidates: Vec::new(),
        eliminations: Vec::new(),
        survivors: Vec::new(),
        status: Status::Complete,
    };

    let others: Vec<FreeModule> = pages[1..].iter().map(|pg| pg.module.clone()).collect();
    report.reduced_pages = reduce_pages(&others).into_iter().map(|i| i + 1).collect();

    report.candidates = match candidate_outcomes(&pages[0].module, opts.strategy, opts.budget) {
        Ok(c) => c,
        Err(Error::Budget(reason)) => {
            report.status = Status::Aborted { reason };
            return Ok(report);
        }
        Err(e) => return Err(e),
    };

    let mut order = report.reduced_pages.clone();
    match opts.filter_order {
        // pages are sorted by ascending tension already
        FilterOrder::AscendingTension => {}
        FilterOrder::DescendingTension => order.reverse(),
    }

    let mut alive: Vec<usize> = (0..report.candidates.len()).collect();
    for page in order {
        let start = &pages[page].module;
        let (keep, removed): (Vec<usize>, Vec<usize>) = alive
            .par_iter()
            .partition(|&&i| start.can_relax_to(&report.candidates[i]));
        report.eliminations.push(Elimination { page, removed });
        alive = keep;
    }
    report.survivors = alive.into_iter().map(|i| report.candidates[i].clone()).collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(pairs: &[(u32, u32)]) -> FreeModule {
        FreeModule::from_pairs(pairs)
    }

    fn b(a: u32, w: u32) -> Bidegree {
        Bidegree::new(a, w)
    }

    #[test]
    fn differentials_from_bidegrees() {
        let d = possible_differentials(&m(&[(0, 0), (1, 0), (2, 2)]));
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].src, d[0].tgt), (b(1, 0), b(2, 2)));
        assert!(possible_differentials(&m(&[(0, 0), (1, 1), (2, 1)])).is_empty());
        let d = possible_differentials(&m(&[(0, 0), (1, 4)]));
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].s(), 3);
        assert_eq!(d[0].n(), 1);
        let d = possible_differentials(&m(&[(0, 0), (2, 4), (2, 4)]));
        assert_eq!(d[0].tgt_count, 2);
    }

    #[test]
    fn outcomes_of_small_pages() {
        let e1 = m(&[(0, 0), (1, 0), (2, 2)]);
        for strat in [Strategy::default(), Strategy::Matchings] {
            let c = candidate_outcomes(&e1, strat, Budget::default()).unwrap();
            assert_eq!(c, vec![e1.clone(), m(&[(0, 0), (1, 1), (2, 1)])]);
        }
        let relaxed = m(&[(0, 0), (1, 1), (2, 1)]);
        assert_eq!(
            candidate_outcomes(&relaxed, Strategy::default(), Budget::default()).unwrap(),
            vec![relaxed]
        );
    }

    #[test]
    fn closure_depth_bound() {
        let chain = crate::schubert::e1_page(3, &"-+-++-".parse().unwrap()).unwrap();
        let d1 = candidate_outcomes(&chain, Strategy::Closure { max_depth: Some(1) }, Budget::default()).unwrap();
        let full = candidate_outcomes(&chain, Strategy::default(), Budget::default()).unwrap();
        assert!(d1.len() < full.len());
        assert!(d1.iter().all(|c| full.contains(c)));
        assert!(
            candidate_outcomes(&chain, Strategy::Closure { max_depth: Some(0) }, Budget::default())
                .unwrap()
                .eq(std::slice::from_ref(&chain))
        );
    }

    #[test]
    fn budget_aborts() {
        let chain = m(&[(1, 0), (2, 2), (3, 3), (4, 4), (5, 5), (6, 6)]);
        let r = candidate_outcomes(&chain, Strategy::default(), Budget::default().with_max_modules(2));
        assert!(matches!(r, Err(Error::Budget(_))));
    }

    #[test]
    fn page_reduction() {
        let a = m(&[(0, 0), (1, 0), (2, 2)]);
        let c = m(&[(0, 0), (1, 1), (2, 1)]);
        assert_eq!(reduce_pages(&[a.clone(), c.clone()]), vec![1]);
        assert_eq!(reduce_pages(&[a]), vec![0]);
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("closure".parse::<Strategy>().unwrap(), Strategy::default());
        assert_eq!(
            "closure:3".parse::<Strategy>().unwrap(),
            Strategy::Closure { max_depth: Some(3) }
        );
        assert_eq!("matchings".parse::<Strategy>().unwrap(), Strategy::Matchings);
        assert!("bfs".parse::<Strategy>().is_err());
        assert_eq!(Strategy::Closure { max_depth: Some(3) }.to_string(), "closure:3");
    }

    #[test]
    fn solve_small() {
        let r = solve(1, 3, 1, SolveOptions::default()).unwrap();
        assert!(r.is_complete());
        assert_eq!(r.survivors, vec![m(&[(0, 0), (1, 1), (2, 1)])]);
        assert_eq!(r.replay(), r.survivors);
        assert!(solve(0, 3, 1, SolveOptions::default()).is_err());
        assert!(solve(3, 3, 1, SolveOptions::default()).is_err());
    }

    #[test]
    fn subspace_filter_trivial_cases() {
        let h = m(&[(0, 0), (1, 1)]);
        let q = m(&[(2, 2)]);
        let both = h.direct_sum(&q);
        assert_eq!(subspace_filter(std::slice::from_ref(&both), &h, &q), vec![both]);
        assert!(subspace_filter(&[], &h, &q).is_empty());
    }
}
