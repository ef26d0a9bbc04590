use std::path::PathBuf;

use kronholm::cli::run_captured;
use kronholm::{solve, SolveOptions};

const SOLVED: [(usize, usize, usize); 10] = [
    (3, 6, 2),
    (2, 6, 3),
    (2, 7, 3),
    (2, 8, 3),
    (2, 8, 4),
    (2, 9, 4),
    (2, 10, 5),
    (2, 11, 5),
    (2, 12, 6),
    (2, 13, 6),
];

fn golden(k: usize, p: usize, q: usize) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("tests/golden/gr_{k}_{p}_{q}.txt"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn unique_answers_match_rank_tables() {
    for (k, p, q) in SOLVED {
        let report = solve(k, p, q, SolveOptions::default()).unwrap();
        assert_eq!(report.survivors.len(), 1, "k={k} p={p} q={q}");
        assert_eq!(
            report.survivors[0].render_rank_table(),
            golden(k, p, q),
            "k={k} p={p} q={q}"
        );
    }
}

#[test]
fn resolved_answer_is_among_the_survivors() {
    let report = solve(3, 6, 3, SolveOptions::default()).unwrap();
    let tables: Vec<String> = report.survivors.iter().map(|m| m.render_rank_table()).collect();
    assert!(tables.contains(&golden(3, 6, 3)));
}

#[test]
fn cli_prints_the_golden_table() {
    let args = [
        "kronholm",
        "solve",
        "--k",
        "3",
        "--p",
        "6",
        "--q",
        "2",
        "--format",
        "table",
        "--no-cache",
    ];
    let (code, out, err) = run_captured(args);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, golden(3, 6, 2));
}
