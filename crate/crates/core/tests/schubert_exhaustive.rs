use kronholm::oracle::{fixed_set_poincare, gaussian_binomial};
use kronholm::schubert::{enumerate_cells, total_weight_formula};
use kronholm::{e1_page, SignWord};

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn total_weight_is_independent_of_the_word() {
    for p in 2..=8usize {
        for k in 1..p {
            for q in 0..=p {
                let expected = total_weight_formula(k, p, q).unwrap();
                for w in SignWord::all(p, q) {
                    assert_eq!(e1_page(k, &w).unwrap().total_weight(), expected, "k={k} word={w}");
                }
            }
        }
    }
}

#[test]
fn overcount_identity() {
    for p in 2..=8usize {
        for k in 1..p {
            for q in 1..p {
                let sum: u64 = SignWord::all(p, q)
                    .iter()
                    .map(|w| e1_page(k, w).unwrap().total_weight())
                    .sum();
                let (k, p, q) = (k as u64, p as u64, q as u64);
                assert_eq!(
                    sum,
                    binomial(p, k) * k * (p - k) * binomial(p - 2, q - 1),
                    "k={k} p={p} q={q}"
                );
            }
        }
    }
}

#[test]
fn pages_carry_the_classical_invariants() {
    for p in 1..=8usize {
        for k in 1..p {
            let underlying = gaussian_binomial(p, k).unwrap();
            for q in 0..=p {
                let fixed = fixed_set_poincare(k, p, q).unwrap();
                for w in SignWord::all(p, q) {
                    let page = e1_page(k, &w).unwrap();
                    let poly = page.poincare();
                    assert_eq!(poly.substitute_u(), underlying, "k={k} word={w}");
                    assert_eq!(poly.substitute_f(), fixed, "k={k} word={w}");
                    page.check_cell_bounds().unwrap();
                }
            }
        }
    }
}

#[test]
fn cell_dimensions() {
    for p in 1..=8usize {
        for k in 1..=p {
            let cells = enumerate_cells(k, p).unwrap();
            assert_eq!(cells.len() as u64, binomial(p as u64, k as u64));
            for c in &cells {
                assert_eq!(c.young_rows().iter().sum::<u32>(), c.dimension());
            }
            let top = cells.iter().map(|c| c.dimension()).max().unwrap();
            assert_eq!(top as usize, k * (p - k));
        }
    }
}
