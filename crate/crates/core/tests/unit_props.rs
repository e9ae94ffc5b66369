//! Randomized checks of the unit arithmetic on the explicit backend, and of
//! agreement between the two backends.

use makerforge_core::tree::VertexId;
use makerforge_core::unit_calculus::pipeline::{Pipeline, Start, Step};
use makerforge_core::unit_calculus::{Route, SplitPlan, UnitBackend, UnitShape, UnitTree};
use proptest::prelude::*;

const BUDGET: u64 = 1 << 16;

/// A staircase of height `r` below a fresh root; returns one of its leaves.
fn staircase(log_d: u32, r: u32, pick: usize) -> (UnitTree, VertexId) {
    let (mut t, root) = UnitTree::root(log_d, BUDGET).unwrap();
    let leaves = t.extend(&root, r).unwrap();
    let leaf = leaves[pick % leaves.len()];
    (t, leaf)
}

/// Every open leaf's units, measured from the edges, satisfy the length
/// equation; the measured shapes match the backend's own profile. With
/// `degree_safe`, no degree exceeds `2d`.
fn check_all(t: &UnitTree, degree_safe: bool) -> Result<(), TestCaseError> {
    for leaf in t.leaves() {
        if t.is_terminal(leaf) {
            continue;
        }
        let m = t.measure(leaf).map_err(|e| TestCaseError::fail(e.to_string()))?;
        for s in &m {
            prop_assert_eq!(s.length + s.card_log, t.log_d() + 1 + s.power, "{:?}", s);
        }
        prop_assert_eq!(&m, &t.profile(&vec![leaf]).unwrap());
    }
    if degree_safe {
        let two_d = 2u64 << t.log_d();
        prop_assert!(t.hypergraph().max_degree() <= two_d);
    }
    Ok(())
}

fn sorted(mut v: Vec<UnitShape>) -> Vec<UnitShape> {
    v.sort();
    v
}

fn route_strategy() -> impl Strategy<Value = Route> {
    prop_oneof![Just(Route::First), Just(Route::Second), Just(Route::Halve), Just(Route::Drop)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn split_follows_the_plan(log_d in 2u32..=4, r in 1u32..=5, pick in any::<usize>(), routes in prop::collection::vec(route_strategy(), 6), singletons in any::<bool>()) {
        let r = r.min(log_d + 1);
        let (mut t, leaf) = staircase(log_d, r, pick);
        let before = t.measure(leaf).unwrap();
        let plan = SplitPlan { routes: routes[..before.len()].to_vec(), singletons };
        let Ok([a, b]) = t.split_leaf(leaf, &plan) else {
            // only halving a single edge can fail here
            prop_assert!(plan.routes.iter().zip(&before).any(|(r, s)| *r == Route::Halve && s.card_log == 0));
            return Ok(());
        };
        // an arbitrary plan may route whole units next to the singletons
        check_all(&t, false)?;
        let single = UnitShape { length: 1, power: 0, card_log: log_d };
        let mut want = [Vec::new(), Vec::new()];
        if singletons {
            want[0].push(single);
            want[1].push(single);
        }
        for (s, route) in before.iter().zip(&plan.routes) {
            let routed = UnitShape { length: s.length + 1, power: s.power + 1, card_log: s.card_log };
            match route {
                Route::First => want[0].push(routed),
                Route::Second => want[1].push(routed),
                Route::Halve => {
                    let halved = UnitShape { length: s.length + 1, power: s.power, card_log: s.card_log - 1 };
                    want[0].push(halved);
                    want[1].push(halved);
                }
                Route::Drop => {}
            }
        }
        prop_assert_eq!(t.measure(a).unwrap(), want[0].clone());
        prop_assert_eq!(t.measure(b).unwrap(), want[1].clone());
    }

    #[test]
    fn increase_split_child_degree(log_d in 2u32..=4, r in 1u32..=5, pick in any::<usize>()) {
        let r = r.min(log_d);
        let (mut t, leaf) = staircase(log_d, r, pick);
        let deg_u = t.hypergraph().degree(leaf).unwrap();
        let [a, b] = t.unit_increase_split(leaf).unwrap();
        check_all(&t, true)?;
        let d = 1u64 << log_d;
        for c in [a, b] {
            let deg = t.hypergraph().degree(c).unwrap();
            prop_assert!(2 * deg <= 2 * d + deg_u, "child {} vs parent {}", deg, deg_u);
        }
    }

    #[test]
    fn extend_adds_a_staircase(log_d in 2u32..=4, r in 1u32..=5, more in 1u32..=3, pick in any::<usize>()) {
        let r = r.min(log_d);
        let more = more.min(log_d + 1 - r);
        let (mut t, leaf) = staircase(log_d, r, pick);
        let before = t.measure(leaf).unwrap();
        let leaves = t.extend(&vec![leaf], more).unwrap();
        check_all(&t, true)?;
        prop_assert_eq!(leaves.len(), 1 << more);
        let mut want: Vec<UnitShape> = (1..=more).map(|l| UnitShape { length: l, power: 0, card_log: log_d + 1 - l }).collect();
        want.extend(before.iter().map(|s| UnitShape { length: s.length + more, power: s.power, card_log: s.card_log - more }));
        for l in leaves {
            prop_assert_eq!(sorted(t.measure(l).unwrap()), sorted(want.clone()));
        }
    }

    #[test]
    fn repartition_halves_powers(log_d in 2u32..=4, r in 1u32..=5, pick in any::<usize>(), cut in 0usize..6) {
        let r = r.min(log_d + 1);
        let (mut t, leaf) = staircase(log_d, r, pick);
        let n = t.measure(leaf).unwrap().len();
        let [a, _] = t.split_leaf(leaf, &SplitPlan::cut(n, cut.min(n))).unwrap();
        let before = t.measure(a).unwrap();
        let res = t.repartition(&vec![a]);
        if before.iter().any(|s| s.power == 0 || s.card_log == 0) {
            prop_assert!(res.is_err());
            return Ok(());
        }
        res.unwrap();
        check_all(&t, true)?;
        let want: Vec<UnitShape> = before.iter().flat_map(|s| {
            let h = UnitShape { length: s.length, power: s.power - 1, card_log: s.card_log - 1 };
            [h, h]
        }).collect();
        prop_assert_eq!(sorted(t.measure(a).unwrap()), sorted(want));
    }

    #[test]
    fn merge_routes_one_unit_per_branch(log_d in 3u32..=4, pick in any::<usize>(), t_log in 0u32..=2) {
        let (mut t, leaf) = staircase(log_d, log_d, pick);
        let units = t.measure(leaf).unwrap();
        let count = 1usize << t_log;
        prop_assume!(count <= units.len());
        let indices: Vec<usize> = (0..count).collect();
        let groups = t.merge_units(leaf, &indices).unwrap();
        check_all(&t, true)?;
        prop_assert_eq!(groups.len(), count);
        for (j, g) in groups.iter().enumerate() {
            let s = units[j];
            for &l in g {
                prop_assert_eq!(t.measure(l).unwrap(), vec![UnitShape { length: s.length + t_log, power: s.power + t_log, card_log: s.card_log }]);
            }
        }
    }

    #[test]
    fn halve_drops_the_rest(log_d in 2u32..=4, r in 1u32..=5, pick in any::<usize>(), unit in 0usize..6) {
        let r = r.min(log_d + 1);
        let (mut t, leaf) = staircase(log_d, r, pick);
        let units = t.measure(leaf).unwrap();
        let j = unit % units.len();
        let res = t.halve_unit(leaf, j);
        if units[j].card_log == 0 {
            prop_assert!(res.is_err());
            return Ok(());
        }
        let kids = res.unwrap();
        check_all(&t, true)?;
        let s = units[j];
        for k in kids {
            prop_assert_eq!(t.measure(k).unwrap(), vec![UnitShape { length: s.length + 1, power: s.power, card_log: s.card_log - 1 }]);
        }
    }

    #[test]
    fn collapse_gives_uniform_edges(log_d in 2u32..=4, r in 1u32..=5, pick in any::<usize>(), target in 0u32..=2) {
        let r = r.min(log_d + 1);
        let (mut t, leaf) = staircase(log_d, r, pick);
        let units = t.measure(leaf).unwrap();
        let res = t.collapse(&vec![leaf], target);
        // collapse needs 2^(target-k) units of some power k <= target
        let possible = (0..=target).any(|k| units.iter().filter(|s| s.power == k).count() >= 1 << (target - k));
        prop_assert_eq!(res.is_ok(), possible);
        if possible {
            check_all(&t, true)?;
            let h = t.finalize();
            prop_assert_eq!(h.uniform_size(), Some(log_d + 1 + target));
        }
    }
}

fn step_strategy() -> impl Strategy<Value = Step> {
    prop_oneof![
        (1u32..=3).prop_map(Step::Extend),
        (0usize..5).prop_map(|cut| Step::Route { cut }),
        Just(Step::Repartition),
        Just(Step::Sort),
        (0usize..5).prop_map(Step::Truncate),
        (1usize..=4).prop_map(|count| Step::Merge { count }),
        (0usize..4).prop_map(|unit| Step::Halve { unit }),
        (0u32..=2).prop_map(|target| Step::Collapse { target }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn backends_agree(log_d in 1u32..=4, lemma in any::<bool>(), steps in prop::collection::vec(step_strategy(), 0..6)) {
        let p = Pipeline { log_d, start: if lemma { Start::LemmaFirst } else { Start::Root }, steps };
        let sym = p.symbolic();
        prop_assume!(sym.snapshot.vertices <= (1u32 << 14).into());
        let exp = p.explicit(1 << 14).unwrap();
        prop_assert_eq!(sym, exp);
    }
}

#[test]
fn weak_pipeline_backends_agree() {
    use makerforge_core::unit_calculus::weak::{weak_explicit_snapshot, weak_symbolic};
    for n in [4, 8] {
        assert_eq!(weak_symbolic(n).unwrap().snapshot, weak_explicit_snapshot(n, 1 << 20).unwrap());
    }
}
