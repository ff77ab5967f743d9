use std::fmt::Write;
use std::path::PathBuf;

use citeproj::nullmodel::randomize_degree_preserving;

mod common;
use common::pair;

/// Two directed 5-cliques joined by a single citation.
fn two_clique_pair() -> Vec<(usize, usize)> {
    let clique = |off: usize| (0..5).flat_map(move |i| (i + 1..5).map(move |j| (off + i, off + j)));
    clique(0).chain(clique(5)).chain([(4, 5)]).collect()
}

#[test]
fn two_clique_pair_seed_42_matches_golden() {
    let p = pair(10, &two_clique_pair());
    let r = randomize_degree_preserving(&p, 42, 100);
    let mut text = String::new();
    for (a, b) in &r.edges {
        writeln!(text, "{a}\t{b}").unwrap();
    }
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/two_clique_seed42.tsv");
    if std::env::var_os("CITEPROJ_BLESS").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let golden = std::fs::read_to_string(&path).expect("golden file present");
    assert_eq!(text, golden);
    assert_ne!(r.edges, p.gp_edges());
}
