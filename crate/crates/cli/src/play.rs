use std::fmt::Write as _;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use makerforge_client::Client;
use makerforge_core::game::{Board, BreakerOptimal, BreakerPotential, BreakerRandom, GameState, MakerTree, Player, Status, Strategy};
use makerforge_core::io::from_value;
use makerforge_core::tree::{TreeHypergraph, VertexId};
use makerforge_protocol::{CreateGame, GameStatus};

use crate::commands::{construction_of, game_error};
use crate::{BreakerArg, CliError, Io, Outcome, Source};

/// Breaker's side of a match: a strategy, or a person at the terminal.
enum Breaker {
    Auto(Box<dyn Strategy>),
    Human,
}

impl Breaker {
    fn new(arg: BreakerArg, state: &GameState, minimax_budget: usize) -> Result<Self, CliError> {
        Ok(match arg {
            BreakerArg::Random => Breaker::Auto(Box::new(BreakerRandom)),
            BreakerArg::Potential => Breaker::Auto(Box::new(BreakerPotential)),
            BreakerArg::Optimal => Breaker::Auto(Box::new(BreakerOptimal::new(state, minimax_budget).map_err(|e| CliError::Usage(e.to_string()))?)),
            BreakerArg::Human => Breaker::Human,
        })
    }

    fn choose(&mut self, state: &GameState, rng: &mut ChaCha8Rng, io: &mut Io) -> Result<VertexId, CliError> {
        match self {
            Breaker::Auto(s) => s.choose(state, rng).map_err(|e| CliError::Usage(e.to_string())),
            Breaker::Human => loop {
                let _ = write!(io.err, "breaker> ");
                let _ = io.err.flush();
                let mut line = String::new();
                let read = io.input.read_line(&mut line).map_err(|e| CliError::Usage(e.to_string()))?;
                if read == 0 {
                    return Err(CliError::Usage("input ended before the game did".into()));
                }
                match line.trim().parse::<u32>() {
                    Ok(v) if state.is_unclaimed(VertexId(v)) => return Ok(VertexId(v)),
                    Ok(v) => {
                        let _ = writeln!(io.err, "vertex {v} is claimed or not on the board");
                    }
                    Err(_) => {
                        let _ = writeln!(io.err, "enter a vertex id");
                    }
                }
            },
        }
    }
}

fn name(p: Player) -> &'static str {
    match p {
        Player::Maker => "maker",
        Player::Breaker => "breaker",
    }
}

fn report(tree: &TreeHypergraph, state: &GameState, extra: serde_json::Value) -> Outcome {
    let mut text = String::new();
    for m in state.moves() {
        let _ = writeln!(text, "{} {}", name(m.player), m.vertex.0);
    }
    let (winner, edge) = match state.status() {
        Status::MakerWin { edge } => {
            let path: Vec<u32> = tree.path_vertices(edge).map(|p| p.into_iter().map(|v| v.0).collect()).unwrap_or_default();
            (Player::Maker, Some((edge.0, path)))
        }
        _ => (Player::Breaker, None),
    };
    match &edge {
        Some((e, path)) => {
            let _ = writeln!(text, "winner: maker, edge {e}: {path:?}");
        }
        None => {
            let _ = writeln!(text, "winner: breaker");
        }
    }
    let moves: Vec<_> = state.moves().iter().map(|m| json!({ "player": m.player, "vertex": m.vertex.0 })).collect();
    let mut json = json!({
        "moves": moves,
        "winner": winner,
        "winning_edge": edge.map(|(e, path)| json!({ "edge": e, "vertices": path })),
    });
    if let (Some(obj), serde_json::Value::Object(more)) = (json.as_object_mut(), extra) {
        obj.extend(more);
    }
    // the walk is meant to win, so a Breaker win is reported as a failure
    Outcome {
        ok: winner == Player::Maker,
        json,
        text,
    }
}

pub fn local(tree: &TreeHypergraph, breaker: BreakerArg, seed: u64, minimax_budget: usize, io: &mut Io) -> Result<Outcome, CliError> {
    let board = Arc::new(Board::new(tree).map_err(|e| CliError::Usage(e.to_string()))?);
    let mut state = GameState::new(board);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Breaker::new(breaker, &state, minimax_budget)?;
    while state.status() == Status::Ongoing {
        let v = match state.to_move() {
            Player::Maker => MakerTree.choose(&state, &mut rng).map_err(game_error)?,
            Player::Breaker => b.choose(&state, &mut rng, io)?,
        };
        state.claim(v).map_err(|e| CliError::Usage(e.to_string()))?;
        if matches!(b, Breaker::Human) && state.to_move() == Player::Breaker {
            let _ = writeln!(io.err, "maker claims {}", v.0);
        }
    }
    Ok(report(tree, &state, json!({ "seed": seed })))
}

/// Plays Breaker against a running service; the server's Maker answers.
pub fn remote(url: &str, source: &Source, breaker: BreakerArg, seed: u64, minimax_budget: usize, io: &mut Io) -> Result<Outcome, CliError> {
    let Some(kind) = source.construction else {
        return Err(CliError::Usage("a served game needs --construction and --n".into()));
    };
    let n = source.n.ok_or_else(|| CliError::Usage("--n is required with --construction".into()))?;
    let rt = tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let client = Client::new(url);
    let remote = |e: makerforge_client::ClientError| CliError::Usage(format!("{url}: {e}"));
    let created = rt
        .block_on(client.create_game(&CreateGame {
            construction: construction_of(kind).name().to_string(),
            n,
            seed,
            c: source.c.clone(),
        }))
        .map_err(remote)?;
    let tree = from_value(created.tree.clone()).map_err(|e| CliError::Usage(format!("server sent a bad tree: {e}")))?;
    let board = Arc::new(Board::new(&tree).map_err(|e| CliError::Usage(e.to_string()))?);
    let mut state = GameState::new(board);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mirror = |state: &mut GameState, v: u32| state.claim(VertexId(v)).map_err(|e| CliError::Usage(format!("server move {v} does not replay: {e}")));
    mirror(&mut state, created.maker_first_move)?;
    let mut b = Breaker::new(breaker, &state, minimax_budget)?;
    if matches!(b, Breaker::Human) {
        let _ = writeln!(io.err, "game {}; maker claims {}", created.game_id, created.maker_first_move);
    }
    let mut status = GameStatus::Ongoing;
    while status == GameStatus::Ongoing {
        let v = b.choose(&state, &mut rng, io)?;
        let r = match rt.block_on(client.breaker_move(&created.game_id, v.0)) {
            Ok(r) => r,
            Err(e) if e.status() == Some(409) && matches!(b, Breaker::Human) => {
                let _ = writeln!(io.err, "{e}");
                continue;
            }
            Err(e) => return Err(remote(e)),
        };
        mirror(&mut state, v.0)?;
        if let Some(m) = r.maker_reply {
            mirror(&mut state, m)?;
            if matches!(b, Breaker::Human) {
                let _ = writeln!(io.err, "maker claims {m}");
            }
        }
        status = r.status;
    }
    let agree = matches!(
        (status, state.status()),
        (GameStatus::MakerWin, Status::MakerWin { .. }) | (GameStatus::BreakerWin, Status::BreakerWin)
    );
    if !agree {
        return Err(CliError::Usage(format!("server reports {status:?}, the replay gives {:?}", state.status())));
    }
    Ok(report(&tree, &state, json!({ "seed": seed, "game_id": created.game_id, "server": url })))
}
