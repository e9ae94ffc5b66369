//! The Maker/Breaker game on a tree hypergraph.
//!
//! Players alternately claim one unclaimed vertex, Maker first. Maker wins
//! by owning every vertex of some edge; Breaker wins once the board is full
//! without that happening. Multiplicities do not matter for play, so a
//! [`Board`] keeps each distinct edge support once.

mod minimax;
mod referee;
mod strategy;

pub use minimax::{minimax_value, Solver, MINIMAX_BUDGET};
pub use referee::{play_match, replay, verify_maker_wins, Adversary, AdversaryRow, MoveRecord, Transcript, VerifyReport};
pub use strategy::{BreakerOptimal, BreakerPotential, BreakerRandom, MakerTree, Strategy};

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{validate_class_c, EdgeId, TreeHypergraph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Maker,
    Breaker,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Maker => Player::Breaker,
            Player::Breaker => Player::Maker,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum Status {
    Ongoing,
    /// Maker owns the support of `edge` (the first record with that support).
    MakerWin { edge: EdgeId },
    BreakerWin,
}

impl Status {
    pub fn winner(self) -> Option<Player> {
        match self {
            Status::Ongoing => None,
            Status::MakerWin { .. } => Some(Player::Maker),
            Status::BreakerWin => Some(Player::Breaker),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("illegal move {vertex}: {reason}")]
    IllegalMove { vertex: VertexId, reason: String },
    #[error("no unclaimed vertex left")]
    EmptyBoard,
    #[error("the game is over")]
    GameOver,
    #[error("both subtrees below {0} contain Breaker vertices")]
    NoSafeChild(VertexId),
    #[error("Maker's walk reached the leaf {0} without completing an edge")]
    WalkEnded(VertexId),
    #[error("not a tree-path hypergraph ({0} violations)")]
    NotClassC(usize),
    #[error("the board has no vertices")]
    NoVertices,
    #[error("edge weights do not fit 128 bits")]
    PotentialOverflow,
    #[error("{vertices} vertices exceed the budget of {budget}")]
    TooLarge { vertices: usize, budget: usize },
}

/// The playing field derived from a hypergraph.
#[derive(Clone, Debug)]
pub struct Board {
    parent: Vec<Option<u32>>,
    children: Vec<Vec<u32>>,
    /// Distinct edge supports, each sorted.
    edges: Vec<Vec<u32>>,
    edge_origin: Vec<EdgeId>,
    /// Support indices containing each vertex.
    incidence: Vec<Vec<u32>>,
    max_edge_size: usize,
}

impl Board {
    pub fn new(h: &TreeHypergraph) -> Result<Self, GameError> {
        if h.is_empty() {
            return Err(GameError::NoVertices);
        }
        let violations = validate_class_c(h);
        if !violations.is_empty() {
            return Err(GameError::NotClassC(violations.len()));
        }
        let n = h.vertex_count();
        let mut parent = Vec::with_capacity(n);
        let mut children = Vec::with_capacity(n);
        for v in h.vertices() {
            parent.push(h.parent(v).expect("own vertex").map(|p| p.0));
            children.push(h.children(v).expect("own vertex").map(|c| c.0).collect());
        }
        let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_origin = Vec::new();
        for e in h.edge_ids() {
            let mut support: Vec<u32> = h.path_vertices(e).expect("validated path").iter().map(|v| v.0).collect();
            support.sort_unstable();
            if !seen.contains_key(&support) {
                seen.insert(support.clone(), edges.len());
                edges.push(support);
                edge_origin.push(e);
            }
        }
        let mut incidence = vec![Vec::new(); n];
        for (j, s) in edges.iter().enumerate() {
            for &v in s {
                incidence[v as usize].push(j as u32);
            }
        }
        let max_edge_size = edges.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self {
            parent,
            children,
            edges,
            edge_origin,
            incidence,
            max_edge_size,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> VertexId {
        VertexId(0)
    }

    pub fn children(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.children[v.index()].iter().map(|&c| VertexId(c))
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v.index()].map(VertexId)
    }

    pub fn supports(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn support_origin(&self, j: usize) -> EdgeId {
        self.edge_origin[j]
    }

    pub fn incident(&self, v: VertexId) -> &[u32] {
        &self.incidence[v.index()]
    }

    pub fn max_edge_size(&self) -> usize {
        self.max_edge_size
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub player: Player,
    pub vertex: VertexId,
}

/// A position, with the counters the referee and the strategies need.
#[derive(Clone, Debug)]
pub struct GameState {
    board: Arc<Board>,
    owner: Vec<Option<Player>>,
    moves: Vec<Move>,
    maker_hits: Vec<u32>,
    breaker_hits: Vec<u32>,
    /// Breaker vertices in the subtree of each vertex.
    breaker_below: Vec<u32>,
    unclaimed: Vec<u32>,
    slot: Vec<usize>,
    status: Status,
}

const CLAIMED: usize = usize::MAX;

impl GameState {
    pub fn new(board: Arc<Board>) -> Self {
        let n = board.vertex_count();
        let e = board.edges.len();
        Self {
            owner: vec![None; n],
            moves: Vec::new(),
            maker_hits: vec![0; e],
            breaker_hits: vec![0; e],
            breaker_below: vec![0; n],
            unclaimed: (0..n as u32).collect(),
            slot: (0..n).collect(),
            status: Status::Ongoing,
            board,
        }
    }

    pub fn board(&self) -> &Arc<Board> {
        &self.board
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn to_move(&self) -> Player {
        if self.moves.len() % 2 == 0 {
            Player::Maker
        } else {
            Player::Breaker
        }
    }

    pub fn owner(&self, v: VertexId) -> Option<Player> {
        self.owner.get(v.index()).copied().flatten()
    }

    /// Unclaimed vertices, in an order fixed by the move history.
    pub fn unclaimed(&self) -> &[u32] {
        &self.unclaimed
    }

    pub fn is_unclaimed(&self, v: VertexId) -> bool {
        v.index() < self.owner.len() && self.owner[v.index()].is_none()
    }

    pub fn set_of(&self, p: Player) -> Vec<VertexId> {
        self.moves.iter().filter(|m| m.player == p).map(|m| m.vertex).collect()
    }

    pub fn breaker_below(&self, v: VertexId) -> u32 {
        self.breaker_below[v.index()]
    }

    /// How many vertices of support `j` each player owns.
    pub fn hits(&self, j: usize) -> (u32, u32) {
        (self.maker_hits[j], self.breaker_hits[j])
    }

    /// Claims `v` for the player to move.
    pub fn claim(&mut self, v: VertexId) -> Result<(), GameError> {
        if self.status != Status::Ongoing {
            return Err(GameError::GameOver);
        }
        if v.index() >= self.owner.len() {
            return Err(GameError::IllegalMove {
                vertex: v,
                reason: "unknown vertex".into(),
            });
        }
        if let Some(p) = self.owner[v.index()] {
            return Err(GameError::IllegalMove {
                vertex: v,
                reason: format!("already claimed by {p:?}"),
            });
        }
        let player = self.to_move();
        self.owner[v.index()] = Some(player);
        self.moves.push(Move { player, vertex: v });
        let k = self.slot[v.index()];
        self.unclaimed.swap_remove(k);
        if let Some(&moved) = self.unclaimed.get(k) {
            self.slot[moved as usize] = k;
        }
        self.slot[v.index()] = CLAIMED;

        let board = Arc::clone(&self.board);
        match player {
            Player::Maker => {
                for &j in board.incident(v) {
                    let j = j as usize;
                    self.maker_hits[j] += 1;
                    if self.maker_hits[j] as usize == board.edges[j].len() && self.status == Status::Ongoing {
                        self.status = Status::MakerWin { edge: board.edge_origin[j] };
                    }
                }
            }
            Player::Breaker => {
                for &j in board.incident(v) {
                    self.breaker_hits[j as usize] += 1;
                }
                let mut u = Some(v);
                while let Some(x) = u {
                    self.breaker_below[x.index()] += 1;
                    u = board.parent(x);
                }
            }
        }
        if self.status == Status::Ongoing && self.unclaimed.is_empty() {
            self.status = Status::BreakerWin;
        }
        Ok(())
    }

    /// Recomputes everything from the move list and compares.
    pub fn check_invariants(&self) -> Result<(), String> {
        let maker = self.moves.iter().filter(|m| m.player == Player::Maker).count();
        let breaker = self.moves.len() - maker;
        if maker != breaker && maker != breaker + 1 {
            return Err(format!("{maker} Maker moves against {breaker} Breaker moves"));
        }
        let mut owner = vec![None; self.owner.len()];
        for m in &self.moves {
            if owner[m.vertex.index()].replace(m.player).is_some() {
                return Err(format!("{} claimed twice", m.vertex));
            }
        }
        if owner != self.owner {
            return Err("owner table out of sync".into());
        }
        let complete = self
            .board
            .edges
            .iter()
            .position(|s| s.iter().all(|&v| owner[v as usize] == Some(Player::Maker)));
        let full = owner.iter().all(Option::is_some);
        let ok = match self.status {
            Status::Ongoing => complete.is_none() && !full,
            Status::MakerWin { edge } => complete.is_some() && {
                let j = self.board.edge_origin.iter().position(|&e| e == edge);
                j.is_some_and(|j| self.board.edges[j].iter().all(|&v| owner[v as usize] == Some(Player::Maker)))
            },
            Status::BreakerWin => complete.is_none() && full,
        };
        if !ok {
            return Err(format!("status {:?} does not match the position", self.status));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::es_extremal_tree;

    #[test]
    fn claims_and_win() {
        let b = Arc::new(Board::new(&es_extremal_tree(2).unwrap()).unwrap());
        let mut s = GameState::new(b);
        s.claim(VertexId(0)).unwrap();
        assert!(matches!(s.claim(VertexId(0)), Err(GameError::IllegalMove { .. })));
        s.claim(VertexId(1)).unwrap();
        s.claim(VertexId(2)).unwrap();
        assert_eq!(s.status().winner(), Some(Player::Maker));
        s.check_invariants().unwrap();
        assert_eq!(s.claim(VertexId(1)), Err(GameError::GameOver));
    }

    #[test]
    fn single_vertex_board() {
        let mut h = TreeHypergraph::new();
        let r = h.add_vertex(None).unwrap();
        h.add_path_edge(r, r, 3).unwrap();
        let mut s = GameState::new(Arc::new(Board::new(&h).unwrap()));
        s.claim(r).unwrap();
        assert_eq!(s.status(), Status::MakerWin { edge: EdgeId(0) });
    }

    #[test]
    fn supports_are_deduplicated() {
        let mut h = es_extremal_tree(2).unwrap();
        h.add_path_edge(VertexId(0), VertexId(1), 1).unwrap();
        assert_eq!(Board::new(&h).unwrap().supports().len(), 2);
    }
}
