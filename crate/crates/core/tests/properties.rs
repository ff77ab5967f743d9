use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use citeproj::graph::{CitationGraph, GraphBuilder, PaperMeta};
use citeproj::impact::{normalized_impact, CohortMode, ImpactRecord, Stratum};
use citeproj::metrics::{metric_vector, ConstraintVariant, Metric, MetricVector, UndirectedView};
use citeproj::nullmodel::randomize_degree_preserving;
use citeproj::stats::{group_means_table, mean, normalized_histogram, welch_t_test};
use citeproj::{project, PaperId};

mod common;
use common::{oracle_vector, pair, Dense};

fn pid(i: usize) -> PaperId {
    PaperId::new(format!("p{i:03}")).unwrap()
}

fn local_graph(max_nodes: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1..=max_nodes).prop_flat_map(|n| {
        let pairs = proptest::collection::vec((0..n, 0..n), 0..=n * n);
        (Just(n), pairs.prop_map(|es| es.into_iter().filter(|(a, b)| a != b).collect()))
    })
}

fn citation_graph(max_nodes: usize) -> impl Strategy<Value = CitationGraph> {
    local_graph(max_nodes).prop_map(|(n, edges)| {
        let mut b = GraphBuilder::new();
        for i in 0..n {
            b.add_paper(pid(i), PaperMeta::new(2000 + (i % 3) as i32, ["CS", "NS"][i % 2]).unwrap());
        }
        for (u, v) in edges {
            b.add_edge(pid(u), pid(v));
        }
        b.build().0
    })
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-100.0..100.0f64, 2..30)
}

proptest! {
    #[test]
    fn metrics_are_bounded((n, edges) in local_graph(25)) {
        let v = metric_vector(&pair(n, &edges), ConstraintVariant::StandardBurt);
        for m in Metric::ALL {
            let x = v.get(m);
            if m.is_unit_fraction() {
                prop_assert!((0.0..=1.0).contains(&x), "{} = {}", m, x);
            } else {
                prop_assert!(x >= 0.0);
            }
        }
    }

    #[test]
    fn brandes_matches_path_enumeration((n, edges) in local_graph(8)) {
        let fast = UndirectedView::from_edges(n, &edges).normalized_betweenness();
        let slow = Dense::new(n, &edges).betweenness();
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() < 1e-9, "{:?} vs {:?}", fast, slow);
        }
    }

    #[test]
    fn metric_vector_matches_oracles((n, edges) in local_graph(6)) {
        let p = pair(n, &edges);
        let got = metric_vector(&p, ConstraintVariant::AsPrinted);
        let want = oracle_vector(&p, false);
        for m in Metric::ALL {
            prop_assert!((got.get(m) - want.get(m)).abs() < 1e-9, "{}", m);
        }
    }

    #[test]
    fn histogram_is_permutation_invariant(mut values in proptest::collection::vec(0.0..=1.0f64, 0..60), seed in any::<u64>()) {
        let h1 = normalized_histogram(&values, 20, 0.0, 1.0).unwrap();
        let k = (seed as usize) % values.len().max(1);
        values.rotate_left(k);
        values.reverse();
        let h2 = normalized_histogram(&values, 20, 0.0, 1.0).unwrap();
        prop_assert_eq!(h1, h2);
    }

    #[test]
    fn histogram_masses_sum_to_one(values in proptest::collection::vec(-0.5..=1.5f64, 1..60)) {
        let h = normalized_histogram(&values, 20, 0.0, 1.0).unwrap();
        prop_assert!((h.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn welch_is_antisymmetric(a in samples(), b in samples()) {
        let ab = welch_t_test(&a, &b).unwrap();
        let ba = welch_t_test(&b, &a).unwrap();
        prop_assert_eq!(ab.t_statistic, -ba.t_statistic);
        prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab.p_value));
    }

    #[test]
    fn separation_never_raises_p(a in samples(), b in samples(), step in 0.1..10.0f64) {
        let p_at = |shift: f64| {
            let shifted: Vec<f64> = b.iter().map(|x| x + shift).collect();
            welch_t_test(&a, &shifted).unwrap().p_value
        };
        let base = mean(&b) - mean(&a);
        let dir = if base >= 0.0 { 1.0 } else { -1.0 };
        let near = p_at(0.0);
        let far = p_at(dir * step);
        prop_assert!(far <= near + 1e-12, "{} then {}", near, far);
    }

    #[test]
    fn impact_is_scale_invariant(counts in proptest::collection::vec(0usize..6, 1..12), k in 2usize..4) {
        let build = |scale: usize| {
            let mut b = GraphBuilder::new();
            for (i, &c) in counts.iter().enumerate() {
                b.add_paper(pid(i), PaperMeta::new(2000 + (i % 2) as i32, "CS").unwrap());
                for j in 0..c * scale {
                    b.add_edge(PaperId::new(format!("k{i}_{j}")).unwrap(), pid(i));
                }
            }
            normalized_impact(&b.build().0, CohortMode::Inclusive).records
        };
        let once = build(1);
        let scaled = build(k);
        for (x, y) in once.iter().zip(&scaled) {
            prop_assert!((x.impact - y.impact).abs() < 1e-12);
        }
    }

    #[test]
    fn eligibility_is_monotone(g in citation_graph(15), a in 0usize..6, b in 0usize..6) {
        let (lo, hi) = (a.min(b), a.max(b));
        let strict: BTreeSet<_> = g.eligible_focal_papers(hi).into_iter().collect();
        let loose: BTreeSet<_> = g.eligible_focal_papers(lo).into_iter().collect();
        prop_assert!(strict.is_subset(&loose));
    }

    #[test]
    fn projection_matches_edge_filter(g in citation_graph(12)) {
        for focal in g.ids() {
            let p = project(&g, focal).unwrap();
            let cited: BTreeSet<&PaperId> = p.cited().iter().collect();
            let mut want: Vec<(PaperId, PaperId)> = g
                .edges()
                .map(|(u, v)| (g.id(u).clone(), g.id(v).clone()))
                .filter(|(u, v)| u != focal && v != focal && cited.contains(u) && cited.contains(v))
                .collect();
            want.sort();
            let mut got: Vec<(PaperId, PaperId)> = p
                .gp_edges()
                .iter()
                .map(|&(a, b)| (p.cited()[a].clone(), p.cited()[b].clone()))
                .collect();
            got.sort();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn randomization_preserves_degrees((n, edges) in local_graph(15), seed in any::<u64>()) {
        let p = pair(n, &edges);
        let r = randomize_degree_preserving(&p, seed, 20);
        let degrees = |es: &[(usize, usize)]| {
            let mut out = vec![0; n];
            let mut inc = vec![0; n];
            for &(a, b) in es {
                out[a] += 1;
                inc[b] += 1;
            }
            (out, inc)
        };
        prop_assert_eq!(degrees(&r.edges), degrees(p.gp_edges()));
        let uniq: BTreeSet<_> = r.edges.iter().collect();
        prop_assert_eq!(uniq.len(), r.edges.len());
        prop_assert!(r.edges.iter().all(|&(a, b)| a != b));
        let undirected = |es: &[(usize, usize)]| UndirectedView::from_edges(n, es).edge_count();
        prop_assert_eq!(undirected(&r.edges), undirected(p.gp_edges()));
    }

    #[test]
    fn group_means_match_direct_recomputation(
        rows in proptest::collection::vec((0..3usize, 0..2usize, 0.0..1.0f64), 1..40)
    ) {
        let strata = [Stratum::High, Stratum::Mid, Stratum::Low];
        let areas = ["CS", "NS"];
        let mut vectors = BTreeMap::new();
        let mut records = Vec::new();
        for (i, &(s, a, x)) in rows.iter().enumerate() {
            let v = MetricVector { density: x, clustering: x / 2.0, ..MetricVector::default() };
            vectors.insert(pid(i), v);
            records.push(ImpactRecord {
                paper: pid(i),
                year: 2000,
                area: areas[a].into(),
                raw_citations: 1,
                cohort_mean: 1.0,
                impact: 1.0,
                stratum: strata[s],
            });
        }
        let table = group_means_table(&vectors, &records);
        for row in &table.rows {
            let direct = |s: Stratum| {
                let xs: Vec<f64> = records
                    .iter()
                    .filter(|r| r.area == row.area && r.stratum == s)
                    .map(|r| vectors[&r.paper].get(row.metric))
                    .collect();
                mean(&xs)
            };
            if row.available {
                prop_assert!((row.mean_high.unwrap() - direct(Stratum::High)).abs() < 1e-12);
                prop_assert!((row.mean_mid.unwrap() - direct(Stratum::Mid)).abs() < 1e-12);
                prop_assert!((row.mean_low.unwrap() - direct(Stratum::Low)).abs() < 1e-12);
            }
        }
    }
}
