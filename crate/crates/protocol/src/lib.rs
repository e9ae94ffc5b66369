//! Bodies of the game service, mounted under [`PREFIX`]. Vertices are the
//! dense ids of the `treehg/1` document returned at creation.

use serde::{Deserialize, Serialize};

pub const PREFIX: &str = "/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Maker,
    Breaker,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameStatus {
    Ongoing,
    MakerWin,
    BreakerWin,
}

impl GameStatus {
    pub fn is_over(self) -> bool {
        self != GameStatus::Ongoing
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreateGame {
    /// `es`, `theorem1`, `weak` or `strong`.
    pub construction: String,
    pub n: u32,
    #[serde(default)]
    pub seed: u64,
    /// Constant of the strong construction, as `p/q` or a decimal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameCreated {
    pub game_id: String,
    pub tree: serde_json::Value,
    pub maker_first_move: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakerMove {
    pub vertex: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub vertex: u32,
    pub by: Side,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveResult {
    /// `None` when Breaker's move ended the game.
    pub maker_reply: Option<u32>,
    pub status: GameStatus,
    /// Every claim so far, in move order.
    pub claimed: Vec<Claim>,
}

/// The edge Maker completed: its index in the tree document and its
/// vertices from top to bottom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinningEdge {
    pub edge: u32,
    pub vertices: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameView {
    pub game_id: String,
    pub construction: String,
    pub n: u32,
    pub seed: u64,
    pub tree: serde_json::Value,
    pub status: GameStatus,
    pub to_move: Option<Side>,
    pub claimed: Vec<Claim>,
    pub winning_edge: Option<WinningEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}
