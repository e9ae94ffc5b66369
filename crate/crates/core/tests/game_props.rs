mod common;

use std::sync::Arc;

use common::{random_full_paths, random_paths};
use makerforge_core::constructions::es_extremal_tree;
use makerforge_core::game::{
    minimax_value, play_match, replay, Board, BreakerOptimal, BreakerPotential, BreakerRandom, GameError, GameState, MakerTree, Player, Status,
    Strategy, MINIMAX_BUDGET,
};
use makerforge_core::tree::{audit_branches, random::random_uniform, TreeHypergraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Plays to the end, checking the state after every ply. Strategy errors
/// end the game early and are returned.
fn referee(h: &TreeHypergraph, maker: &mut dyn Strategy, breaker: &mut dyn Strategy, seed: u64) -> Result<Option<GameError>, TestCaseError> {
    let board = Arc::new(Board::new(h).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = GameState::new(board);
    while s.status() == Status::Ongoing {
        let who = s.to_move();
        let pick = match who {
            Player::Maker => maker.choose(&s, &mut rng),
            Player::Breaker => breaker.choose(&s, &mut rng),
        };
        let v = match pick {
            Ok(v) => v,
            Err(e) => return Ok(Some(e)),
        };
        prop_assert!(s.is_unclaimed(v));
        s.claim(v).unwrap();
        s.check_invariants().map_err(TestCaseError::fail)?;
        let (m, b) = (s.set_of(Player::Maker).len(), s.set_of(Player::Breaker).len());
        prop_assert!(m == b || m == b + 1);
    }
    Ok(None)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn referee_safety(seed in any::<u64>(), v in 1usize..40, e in 0usize..20) {
        let h = random_paths(seed, v, e);
        prop_assert_eq!(referee(&h, &mut BreakerRandom, &mut BreakerRandom, seed)?, None);
        prop_assert_eq!(referee(&h, &mut BreakerRandom, &mut BreakerPotential, seed)?, None);
        let board = Arc::new(Board::new(&h).unwrap());
        let t = play_match(&board, &mut BreakerRandom, &mut BreakerPotential, seed).unwrap();
        let s = replay(&board, &t).unwrap();
        prop_assert_eq!(s.status().winner(), Some(t.winner));
        prop_assert!(t.moves.len() <= h.vertex_count());
    }

    #[test]
    fn walk_never_blocked(seed in any::<u64>(), v in 1usize..60, e in 0usize..30) {
        let h = random_full_paths(seed, v, e);
        let covered = audit_branches(&h).every_branch_covered;
        for breaker in [&mut BreakerRandom as &mut dyn Strategy, &mut BreakerPotential] {
            let err = referee(&h, &mut MakerTree, breaker, seed)?;
            prop_assert!(!matches!(err, Some(GameError::NoSafeChild(_))), "{:?}", err);
            if covered {
                prop_assert_eq!(err, None);
            }
        }
        if covered {
            let board = Arc::new(Board::new(&h).unwrap());
            let t = play_match(&board, &mut MakerTree, &mut BreakerRandom, seed).unwrap();
            prop_assert_eq!(t.winner, Player::Maker);
        }
    }
}

#[test]
fn walk_is_blocked_below_a_unary_vertex() {
    // root - a - b, edge {root, a, b}: Breaker takes a
    let mut h = TreeHypergraph::new();
    let r = h.add_vertex(None).unwrap();
    let a = h.add_vertex(Some(r)).unwrap();
    let b = h.add_vertex(Some(a)).unwrap();
    h.add_path_edge(r, b, 1).unwrap();
    let board = Arc::new(Board::new(&h).unwrap());
    let mut s = GameState::new(board);
    s.claim(r).unwrap();
    s.claim(a).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert_eq!(MakerTree.choose(&s, &mut rng), Err(GameError::NoSafeChild(r)));
}

#[test]
fn erdos_selfridge_breaker() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 3..=5u32 {
        for k in 0..100u64 {
            use rand::Rng;
            let edges = rng.random_range(1..(1usize << (n - 1)));
            let vertices = rng.random_range(n as usize..=20);
            let h = random_uniform(n, vertices, edges, &mut rng);
            assert_eq!(minimax_value(&h, MINIMAX_BUDGET).unwrap(), Player::Breaker, "n = {n}, instance {k}");
            let board = Arc::new(Board::new(&h).unwrap());
            for seed in 0..20 {
                let t = play_match(&board, &mut BreakerRandom, &mut BreakerPotential, seed).unwrap();
                assert_eq!(t.winner, Player::Breaker, "n = {n}, instance {k}, seed {seed}");
            }
            match play_match(&board, &mut MakerTree, &mut BreakerPotential, 0) {
                Ok(t) => assert_eq!(t.winner, Player::Breaker),
                Err(GameError::WalkEnded(_) | GameError::NoSafeChild(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn extremal_minus_one_edge_against_random_makers() {
    let full = es_extremal_tree(3).unwrap();
    for skip in 0..full.edge_count() {
        let mut h = full.clone();
        h.remove_edge(makerforge_core::EdgeId(skip as u32)).unwrap();
        let board = Arc::new(Board::new(&h).unwrap());
        for seed in 0..200 {
            let t = play_match(&board, &mut BreakerRandom, &mut BreakerPotential, seed).unwrap();
            assert_eq!(t.winner, Player::Breaker);
        }
    }
}

#[test]
fn oracle_consistency_on_small_boards() {
    let mut checked = 0;
    for seed in 0..3000u64 {
        // the walk needs two children below every inner vertex
        let v = 3 + (seed % 13) as usize;
        let h = random_full_paths(seed, v, 2 + (seed % 9) as usize);
        if !audit_branches(&h).every_branch_covered || minimax_value(&h, MINIMAX_BUDGET).unwrap() != Player::Maker {
            continue;
        }
        checked += 1;
        let board = Arc::new(Board::new(&h).unwrap());
        let mut opt = BreakerOptimal::new(&GameState::new(Arc::clone(&board)), MINIMAX_BUDGET).unwrap();
        let t = play_match(&board, &mut MakerTree, &mut opt, seed).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert_eq!(t.winner, Player::Maker, "seed {seed}");
    }
    assert!(checked >= 100, "only {checked} boards");
}

#[test]
fn strategies_are_seed_deterministic() {
    let h = random_paths(11, 40, 25);
    let board = Arc::new(Board::new(&h).unwrap());
    let a = play_match(&board, &mut BreakerRandom, &mut BreakerRandom, 5).unwrap();
    let b = play_match(&board, &mut BreakerRandom, &mut BreakerRandom, 5).unwrap();
    assert_eq!(a, b);
}
