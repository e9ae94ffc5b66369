use std::collections::HashMap;

use super::{Board, GameError, GameState, Player};
use crate::tree::TreeHypergraph;

/// Default vertex limit for the exact solver.
pub const MINIMAX_BUDGET: usize = 24;

/// Exact game values by memoized search over `(maker, breaker)` bitsets.
#[derive(Clone, Debug)]
pub struct Solver {
    edges: Vec<u64>,
    full: u64,
    memo: HashMap<(u64, u64), bool>,
}

impl Solver {
    pub fn new(board: &Board, budget: usize) -> Result<Self, GameError> {
        let n = board.vertex_count();
        if n > budget.min(64) {
            return Err(GameError::TooLarge { vertices: n, budget });
        }
        let edges = board
            .supports()
            .iter()
            .map(|s| s.iter().fold(0u64, |m, &v| m | (1 << v)))
            .collect();
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Ok(Self {
            edges,
            full,
            memo: HashMap::new(),
        })
    }

    pub fn masks(state: &GameState) -> (u64, u64) {
        let (mut m, mut b) = (0u64, 0u64);
        for mv in state.moves() {
            match mv.player {
                Player::Maker => m |= 1 << mv.vertex.0,
                Player::Breaker => b |= 1 << mv.vertex.0,
            }
        }
        (m, b)
    }

    /// Positions stored so far.
    pub fn states(&self) -> usize {
        self.memo.len()
    }

    /// Whether Maker wins from the position under optimal play; the player
    /// to move follows from the counts.
    pub fn maker_wins(&mut self, maker: u64, breaker: u64) -> bool {
        if self.edges.iter().any(|&e| e & !maker == 0) {
            return true;
        }
        // only vertices of Breaker-free edges matter: an extra vertex never
        // hurts the player who claims it
        let mut relevant = 0u64;
        let mut one_short = false;
        for &e in &self.edges {
            if e & breaker == 0 {
                let missing = e & !maker;
                relevant |= missing;
                one_short |= missing.count_ones() == 1;
            }
        }
        let free = self.full & !(maker | breaker);
        if relevant == 0 || free == 0 {
            return false;
        }
        let maker_turn = maker.count_ones() == breaker.count_ones();
        if maker_turn && one_short {
            return true;
        }
        if let Some(&v) = self.memo.get(&(maker, breaker)) {
            return v;
        }
        let mut moves = relevant & free;
        let value = if maker_turn {
            let mut win = false;
            while moves != 0 {
                let bit = moves & moves.wrapping_neg();
                moves ^= bit;
                if self.maker_wins(maker | bit, breaker) {
                    win = true;
                    break;
                }
            }
            win
        } else {
            let mut win = true;
            while moves != 0 {
                let bit = moves & moves.wrapping_neg();
                moves ^= bit;
                if !self.maker_wins(maker, breaker | bit) {
                    win = false;
                    break;
                }
            }
            win
        };
        self.memo.insert((maker, breaker), value);
        value
    }
}

/// The winner under optimal play with Maker moving first.
pub fn minimax_value(h: &TreeHypergraph, budget: usize) -> Result<Player, GameError> {
    let board = Board::new(h)?;
    let mut s = Solver::new(&board, budget)?;
    Ok(if s.maker_wins(0, 0) { Player::Maker } else { Player::Breaker })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::es_extremal_tree;
    use crate::tree::{EdgeId, VertexId};

    #[test]
    fn extremal_tree_values() {
        let h = es_extremal_tree(3).unwrap();
        assert_eq!(minimax_value(&h, MINIMAX_BUDGET).unwrap(), Player::Maker);
        for e in 0..4 {
            let mut g = h.clone();
            g.remove_edge(EdgeId(e)).unwrap();
            assert_eq!(minimax_value(&g, MINIMAX_BUDGET).unwrap(), Player::Breaker);
        }
    }

    #[test]
    fn single_root_edge() {
        let mut h = TreeHypergraph::new();
        let r = h.add_vertex(None).unwrap();
        h.add_path_edge(r, r, 1).unwrap();
        assert_eq!(minimax_value(&h, 1).unwrap(), Player::Maker);
        assert_eq!(h.root(), Some(VertexId(0)));
    }

    #[test]
    fn budget_guard() {
        let h = es_extremal_tree(5).unwrap();
        assert!(matches!(minimax_value(&h, MINIMAX_BUDGET), Err(GameError::TooLarge { vertices: 31, .. })));
    }
}
