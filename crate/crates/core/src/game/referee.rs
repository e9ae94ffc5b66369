use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::strategy::{BreakerOptimal, BreakerPotential, BreakerRandom, MakerTree, Strategy};
use super::{Board, GameError, GameState, Player, Status};
use crate::tree::{audit_branches, EdgeId, TreeHypergraph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub ply: usize,
    pub player: Player,
    pub vertex: VertexId,
}

/// A strategy's move that the referee refused; the game goes to the
/// other player.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Forfeit {
    pub player: Player,
    pub vertex: VertexId,
    pub reason: String,
}

/// Replayable record of one match.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub seed: u64,
    pub maker: String,
    pub breaker: String,
    pub moves: Vec<MoveRecord>,
    pub winner: Player,
    pub winning_edge: Option<EdgeId>,
    pub forfeit: Option<Forfeit>,
}

impl Transcript {
    pub fn maker_moves(&self) -> usize {
        self.moves.iter().filter(|m| m.player == Player::Maker).count()
    }
}

/// Plays until the game ends. Strategy errors other than an illegal move
/// are returned as errors.
pub fn play_match(board: &Arc<Board>, maker: &mut dyn Strategy, breaker: &mut dyn Strategy, seed: u64) -> Result<Transcript, GameError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = GameState::new(Arc::clone(board));
    let mut forfeit = None;
    while state.status() == Status::Ongoing {
        let player = state.to_move();
        let strategy: &mut dyn Strategy = match player {
            Player::Maker => &mut *maker,
            Player::Breaker => &mut *breaker,
        };
        let v = strategy.choose(&state, &mut rng)?;
        match state.claim(v) {
            Ok(()) => {}
            Err(GameError::IllegalMove { vertex, reason }) => {
                forfeit = Some(Forfeit { player, vertex, reason });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let (winner, winning_edge) = match (&forfeit, state.status()) {
        (Some(f), _) => (f.player.other(), None),
        (None, Status::MakerWin { edge }) => (Player::Maker, Some(edge)),
        _ => (Player::Breaker, None),
    };
    Ok(Transcript {
        seed,
        maker: maker.name(),
        breaker: breaker.name(),
        moves: state
            .moves()
            .iter()
            .enumerate()
            .map(|(ply, m)| MoveRecord {
                ply,
                player: m.player,
                vertex: m.vertex,
            })
            .collect(),
        winner,
        winning_edge,
        forfeit,
    })
}

/// Replays a transcript and checks its recorded outcome.
pub fn replay(board: &Arc<Board>, t: &Transcript) -> Result<GameState, GameError> {
    let mut state = GameState::new(Arc::clone(board));
    for m in &t.moves {
        if m.player != state.to_move() {
            return Err(GameError::IllegalMove {
                vertex: m.vertex,
                reason: format!("ply {} is not {:?}'s turn", m.ply, m.player),
            });
        }
        state.claim(m.vertex)?;
    }
    let consistent = match (&t.forfeit, state.status()) {
        (Some(f), Status::Ongoing) => t.winner == f.player.other(),
        (None, Status::MakerWin { edge }) => t.winner == Player::Maker && t.winning_edge == Some(edge),
        (None, Status::BreakerWin) => t.winner == Player::Breaker,
        _ => false,
    };
    if !consistent {
        return Err(GameError::IllegalMove {
            vertex: t.moves.last().map_or(VertexId(0), |m| m.vertex),
            reason: "recorded outcome differs from the replay".into(),
        });
    }
    Ok(state)
}

/// Breaker opponents for verification runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adversary {
    /// One match per trial seed.
    Random,
    /// One match; the rule is deterministic.
    Potential,
    /// One match against the exact solver (small boards only).
    Optimal,
}

impl Adversary {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "random" => Some(Adversary::Random),
            "potential" => Some(Adversary::Potential),
            "optimal" | "minimax" => Some(Adversary::Optimal),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversaryRow {
    pub adversary: Adversary,
    pub matches: usize,
    pub maker_wins: usize,
    pub min_plies: usize,
    pub max_plies: usize,
    pub mean_plies: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// Result of the branch audit; when false, losses are possible and are
    /// reported rather than treated as errors.
    pub every_branch_covered: bool,
    pub rows: Vec<AdversaryRow>,
    pub all_won: bool,
}

fn row(adversary: Adversary, ts: &[Transcript]) -> AdversaryRow {
    let plies: Vec<usize> = ts.iter().map(|t| t.moves.len()).collect();
    AdversaryRow {
        adversary,
        matches: ts.len(),
        maker_wins: ts.iter().filter(|t| t.winner == Player::Maker).count(),
        min_plies: plies.iter().copied().min().unwrap_or(0),
        max_plies: plies.iter().copied().max().unwrap_or(0),
        mean_plies: if plies.is_empty() {
            0.0
        } else {
            plies.iter().sum::<usize>() as f64 / plies.len() as f64
        },
    }
}

/// Maker's walk against each adversary; random Breakers play seeds
/// `0..trials`.
pub fn verify_maker_wins(h: &TreeHypergraph, adversaries: &[Adversary], trials: usize, parallel: bool) -> Result<VerifyReport, GameError> {
    let covered = audit_branches(h).every_branch_covered;
    let board = Arc::new(Board::new(h)?);
    let mut rows = Vec::new();
    for &a in adversaries {
        let ts: Vec<Transcript> = match a {
            Adversary::Random => {
                let one = |seed: u64| play_match(&board, &mut MakerTree, &mut BreakerRandom, seed);
                if parallel {
                    use rayon::prelude::*;
                    (0..trials as u64).into_par_iter().map(one).collect::<Result<_, _>>()?
                } else {
                    (0..trials as u64).map(one).collect::<Result<_, _>>()?
                }
            }
            Adversary::Potential => vec![play_match(&board, &mut MakerTree, &mut BreakerPotential, 0)?],
            Adversary::Optimal => {
                let mut opt = BreakerOptimal::new(&GameState::new(Arc::clone(&board)), super::MINIMAX_BUDGET)?;
                vec![play_match(&board, &mut MakerTree, &mut opt, 0)?]
            }
        };
        rows.push(row(a, &ts));
    }
    let all_won = rows.iter().all(|r| r.maker_wins == r.matches);
    Ok(VerifyReport {
        every_branch_covered: covered,
        rows,
        all_won,
    })
}
