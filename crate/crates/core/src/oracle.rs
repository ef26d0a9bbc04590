//! Classical invariants used to cross-check the bigraded computations, and the
//! unpruned search.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::bipoly::UniPoly;
use crate::error::Result;
use crate::modalg::FreeModule;
use crate::schubert::{enumerate_cells, total_weight_formula, unique_e1_pages};
use crate::search::{candidate_outcomes, check_grassmannian_params, Budget, Strategy};

/// Poincare polynomial of `Gr_k(R^p)` with mod 2 coefficients, counted cell by
/// cell.
pub fn gaussian_binomial(p: usize, k: usize) -> Result<UniPoly> {
    let mut coeffs = vec![0i64; k * (p.saturating_sub(k)) + 1];
    for cell in enumerate_cells(k, p)? {
        coeffs[cell.dimension() as usize] += 1;
    }
    Ok(UniPoly::from_coeffs(&coeffs))
}

/// Poincare polynomial of the fixed set of `Gr_k(R^{p,q})`, which is the
/// disjoint union over `j` of `Gr_j(R^{p-q}) x Gr_{k-j}(R^q)`.
pub fn fixed_set_poincare(k: usize, p: usize, q: usize) -> Result<UniPoly> {
    let mut total = UniPoly::zero();
    for j in 0..=k {
        if j > p - q || k - j > q {
            continue;
        }
        let term = gaussian_binomial(p - q, j)?.mul(&gaussian_binomial(q, k - j)?)?;
        total = total.add(&term)?;
    }
    Ok(total)
}

/// Intersection of the possible outcomes of every distinct E1 page.
pub fn naive_solve(k: usize, p: usize, q: usize, strategy: Strategy, budget: Budget) -> Result<BTreeSet<FreeModule>> {
    check_grassmannian_params(k, p, q)?;
    let mut common: Option<BTreeSet<FreeModule>> = None;
    for page in unique_e1_pages(k, p, q)? {
        let outcomes: BTreeSet<FreeModule> = candidate_outcomes(&page.module, strategy, budget)?
            .into_iter()
            .collect();
        common = Some(match common {
            None => outcomes,
            Some(c) => c.intersection(&outcomes).cloned().collect(),
        });
    }
    Ok(common.unwrap_or_default())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub checks: Vec<Check>,
}

impl Diagnostics {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Compares the U-image, F-image and total weight of `m` with the values any
/// page or answer for `Gr_k(R^{p,q})` must have.
pub fn validate_page(m: &FreeModule, k: usize, p: usize, q: usize) -> Result<Diagnostics> {
    let poly = m.poincare();
    let mut checks = Vec::new();

    let u = poly.substitute_u();
    let expected_u = gaussian_binomial(p, k)?;
    checks.push(Check {
        name: "underlying",
        pass: u == expected_u,
        detail: format!("U(P) = {u}, expected {expected_u}"),
    });

    let f = poly.substitute_f();
    let expected_f = fixed_set_poincare(k, p, q)?;
    checks.push(Check {
        name: "fixed_set",
        pass: f == expected_f,
        detail: format!("F(P) = {f}, expected {expected_f}"),
    });

    if let Ok(t) = total_weight_formula(k, p, q) {
        let w = m.total_weight();
        checks.push(Check {
            name: "total_weight",
            pass: w == t,
            detail: format!("weight sum {w}, expected {t}"),
        });
    }
    Ok(Diagnostics { checks })
}
