use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::minimax::Solver;
use super::{GameError, GameState, Player};
use crate::tree::VertexId;

/// Picks the next vertex for the player to move.
pub trait Strategy: Send {
    fn name(&self) -> String;

    fn choose(&mut self, state: &GameState, rng: &mut ChaCha8Rng) -> Result<VertexId, GameError>;
}

/// Maker's walk: the root first, then a child of the last Maker vertex
/// whose subtree holds no Breaker vertex, the left one when both qualify.
#[derive(Clone, Copy, Debug, Default)]
pub struct MakerTree;

impl Strategy for MakerTree {
    fn name(&self) -> String {
        "maker_tree".into()
    }

    fn choose(&mut self, state: &GameState, _rng: &mut ChaCha8Rng) -> Result<VertexId, GameError> {
        let board = state.board();
        let last = state.moves().iter().rev().find(|m| m.player == Player::Maker);
        let Some(last) = last else {
            let root = board.root();
            return if state.is_unclaimed(root) {
                Ok(root)
            } else {
                Err(GameError::NoSafeChild(root))
            };
        };
        let mut children = board.children(last.vertex).peekable();
        if children.peek().is_none() {
            return Err(GameError::WalkEnded(last.vertex));
        }
        children
            .find(|&c| state.breaker_below(c) == 0 && state.is_unclaimed(c))
            .ok_or(GameError::NoSafeChild(last.vertex))
    }
}

/// A uniformly random unclaimed vertex.
#[derive(Clone, Copy, Debug, Default)]
pub struct BreakerRandom;

impl Strategy for BreakerRandom {
    fn name(&self) -> String {
        "breaker_random".into()
    }

    fn choose(&mut self, state: &GameState, rng: &mut ChaCha8Rng) -> Result<VertexId, GameError> {
        let free = state.unclaimed();
        if free.is_empty() {
            return Err(GameError::EmptyBoard);
        }
        Ok(VertexId(free[rng.random_range(0..free.len())]))
    }
}

/// The potential rule: maximize the summed danger `2^-(unclaimed)` of the
/// Breaker-free edges through the vertex; lowest id on ties.
#[derive(Clone, Copy, Debug, Default)]
pub struct BreakerPotential;

impl BreakerPotential {
    /// Danger of every vertex, scaled by `2^(max edge size)` so that all
    /// weights are integers.
    pub fn weights(state: &GameState) -> Result<Vec<u128>, GameError> {
        let board = state.board();
        let top = board.max_edge_size();
        let mut w = vec![0u128; board.vertex_count()];
        if top >= 120 {
            return Err(GameError::PotentialOverflow);
        }
        for (j, s) in board.supports().iter().enumerate() {
            let (m, b) = state.hits(j);
            if b > 0 {
                continue;
            }
            let free = s.len() - m as usize;
            let weight = 1u128 << (top - free);
            for &v in s {
                if state.is_unclaimed(VertexId(v)) {
                    w[v as usize] = w[v as usize].checked_add(weight).ok_or(GameError::PotentialOverflow)?;
                }
            }
        }
        Ok(w)
    }
}

impl Strategy for BreakerPotential {
    fn name(&self) -> String {
        "breaker_potential".into()
    }

    fn choose(&mut self, state: &GameState, _rng: &mut ChaCha8Rng) -> Result<VertexId, GameError> {
        let w = Self::weights(state)?;
        let mut best: Option<(u128, u32)> = None;
        for v in 0..w.len() as u32 {
            if !state.is_unclaimed(VertexId(v)) {
                continue;
            }
            if best.is_none_or(|(bw, _)| w[v as usize] > bw) {
                best = Some((w[v as usize], v));
            }
        }
        best.map(|(_, v)| VertexId(v)).ok_or(GameError::EmptyBoard)
    }
}

/// Breaker guided by the exact solver: the lowest vertex after which
/// Maker cannot force a win, else the lowest unclaimed vertex.
#[derive(Debug)]
pub struct BreakerOptimal {
    solver: Solver,
}

impl BreakerOptimal {
    pub fn new(state: &GameState, budget: usize) -> Result<Self, GameError> {
        Ok(Self {
            solver: Solver::new(state.board(), budget)?,
        })
    }
}

impl Strategy for BreakerOptimal {
    fn name(&self) -> String {
        "breaker_optimal".into()
    }

    fn choose(&mut self, state: &GameState, _rng: &mut ChaCha8Rng) -> Result<VertexId, GameError> {
        let (maker, breaker) = Solver::masks(state);
        let mut free: Vec<u32> = state.unclaimed().to_vec();
        free.sort_unstable();
        let first = *free.first().ok_or(GameError::EmptyBoard)?;
        for &v in &free {
            if !self.solver.maker_wins(maker, breaker | (1 << v)) {
                return Ok(VertexId(v));
            }
        }
        Ok(VertexId(first))
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;

    use super::*;
    use crate::constructions::es_extremal_tree;
    use crate::game::Board;

    fn state(n: u32) -> GameState {
        GameState::new(Arc::new(Board::new(&es_extremal_tree(n).unwrap()).unwrap()))
    }

    #[test]
    fn maker_walk_avoids_breaker() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut s = state(3);
        assert_eq!(MakerTree.choose(&s, &mut rng).unwrap(), VertexId(0));
        s.claim(VertexId(0)).unwrap();
        // Breaker inside the left subtree
        s.claim(VertexId(3)).unwrap();
        assert_eq!(MakerTree.choose(&s, &mut rng).unwrap(), VertexId(2));
    }

    #[test]
    fn maker_walk_prefers_left() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut s = state(4);
        s.claim(VertexId(0)).unwrap();
        s.claim(VertexId(1)).unwrap();
        s.claim(VertexId(2)).unwrap();
        // reply outside Maker's subtree
        s.claim(VertexId(3)).unwrap();
        assert_eq!(MakerTree.choose(&s, &mut rng).unwrap(), VertexId(5));
        s.claim(VertexId(5)).unwrap();
        s.claim(VertexId(11)).unwrap();
        assert_eq!(MakerTree.choose(&s, &mut rng).unwrap(), VertexId(12));
    }

    #[test]
    fn random_breaker_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut s = state(2);
        s.claim(VertexId(0)).unwrap();
        s.claim(VertexId(1)).unwrap();
        assert_eq!(BreakerRandom.choose(&s, &mut rng).unwrap(), VertexId(2));
        s.claim(VertexId(2)).unwrap();
        assert_eq!(BreakerRandom.choose(&s, &mut rng), Err(GameError::EmptyBoard));
    }

    #[test]
    fn potential_blocks_the_threat() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut s = state(3);
        // fresh board: every edge passes the root
        assert_eq!(BreakerPotential.choose(&s, &mut rng).unwrap(), VertexId(0));
        s.claim(VertexId(0)).unwrap();
        s.claim(VertexId(6)).unwrap();
        s.claim(VertexId(1)).unwrap();
        // edges {0,1,3} and {0,1,4} each miss one vertex; tie goes to 3
        assert_eq!(BreakerPotential.choose(&s, &mut rng).unwrap(), VertexId(3));
    }
}
