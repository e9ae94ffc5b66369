//! The `/v1` game service. Breaker is played by the caller; Maker answers
//! every move with the tree walk. Games live in memory only.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use makerforge_core::budget::explicit_budget;
use makerforge_core::constructions::{build_construction, BuildError, Construction};
use makerforge_core::game::{Board, GameError, GameState, MakerTree, Player, Status, Strategy};
use makerforge_core::io::to_value;
use makerforge_core::tree::{TreeHypergraph, VertexId};
use makerforge_core::unit_calculus::Q;
use makerforge_protocol::{BreakerMove, Claim, CreateGame, ErrorBody, GameCreated, GameStatus, GameView, MoveResult, Side, WinningEdge};

/// Largest board a game may be created on.
pub const DEFAULT_MAX_VERTICES: u64 = 1 << 16;

#[derive(Clone, Copy, Debug)]
pub struct ServiceConfig {
    pub max_vertices: u64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            max_vertices: DEFAULT_MAX_VERTICES.min(explicit_budget()),
        }
    }
}

struct Game {
    id: String,
    construction: Construction,
    n: u32,
    seed: u64,
    tree: TreeHypergraph,
    doc: serde_json::Value,
    state: GameState,
    rng: ChaCha8Rng,
}

impl Game {
    fn claimed(&self) -> Vec<Claim> {
        self.state
            .moves()
            .iter()
            .map(|m| Claim {
                vertex: m.vertex.0,
                by: side(m.player),
            })
            .collect()
    }

    fn status(&self) -> GameStatus {
        match self.state.status() {
            Status::Ongoing => GameStatus::Ongoing,
            Status::MakerWin { .. } => GameStatus::MakerWin,
            Status::BreakerWin => GameStatus::BreakerWin,
        }
    }

    /// Maker's walk; a position the walk cannot handle (only possible on
    /// trees with unary vertices) falls back to the lowest unclaimed vertex.
    fn maker_move(&mut self) -> Result<u32, GameError> {
        let v = match MakerTree.choose(&self.state, &mut self.rng) {
            Ok(v) => v,
            Err(GameError::NoSafeChild(_) | GameError::WalkEnded(_)) => {
                let v = self.state.unclaimed().iter().copied().min().ok_or(GameError::EmptyBoard)?;
                tracing::warn!(game = %self.id, vertex = v, "maker walk blocked, claiming the lowest free vertex");
                VertexId(v)
            }
            Err(e) => return Err(e),
        };
        self.state.claim(v)?;
        Ok(v.0)
    }

    fn view(&self) -> GameView {
        let winning_edge = match self.state.status() {
            Status::MakerWin { edge } => Some(WinningEdge {
                edge: edge.0,
                vertices: self.tree.path_vertices(edge).map(|p| p.into_iter().map(|v| v.0).collect()).unwrap_or_default(),
            }),
            _ => None,
        };
        let status = self.status();
        GameView {
            game_id: self.id.clone(),
            construction: self.construction.name().to_string(),
            n: self.n,
            seed: self.seed,
            tree: self.doc.clone(),
            status,
            to_move: (!status.is_over()).then(|| side(self.state.to_move())),
            claimed: self.claimed(),
            winning_edge,
        }
    }
}

fn side(p: Player) -> Side {
    match p {
        Player::Maker => Side::Maker,
        Player::Breaker => Side::Breaker,
    }
}

/// The game table. Lookups take the table lock briefly; moves lock only
/// their own game.
pub struct AppState {
    config: ServiceConfig,
    games: RwLock<HashMap<String, Arc<Mutex<Game>>>>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Arc<Self> {
        Arc::new(Self {
            config,
            games: RwLock::new(HashMap::new()),
        })
    }

    pub fn game_count(&self) -> usize {
        self.games.read().expect("game table").len()
    }

    fn game(&self, id: &str) -> Result<Arc<Mutex<Game>>, ApiError> {
        self.games
            .read()
            .expect("game table")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown_game", format!("no game with id {id:?}")))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, error: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                error: error.to_string(),
                message: message.into(),
            },
        }
    }

    fn bad_parameters(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "bad_parameters", message)
    }

    fn illegal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, "illegal_move", message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        Self::bad_parameters(r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let v1 = Router::new()
        .route("/health", get(health))
        .route("/games", post(create_game))
        .route("/games/{id}", get(get_game).delete(delete_game))
        .route("/games/{id}/breaker-move", post(breaker_move));
    Router::new().nest(makerforge_protocol::PREFIX, v1).with_state(state)
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn create_game(State(app): State<Arc<AppState>>, body: Result<Json<CreateGame>, JsonRejection>) -> Result<(StatusCode, Json<GameCreated>), ApiError> {
    let Json(req) = body?;
    let construction: Construction = req.construction.parse().map_err(|e: BuildError| ApiError::bad_parameters(e.to_string()))?;
    let c = match &req.c {
        Some(s) => Some(s.parse::<Q>().map_err(ApiError::bad_parameters)?.0),
        None => None,
    };
    let tree = build_construction(construction, req.n, c, app.config.max_vertices)
        .map_err(|e| ApiError::bad_parameters(e.to_string()))?
        .canonicalize();
    let board = Board::new(&tree).map_err(|e| ApiError::bad_parameters(e.to_string()))?;
    let id = uuid::Uuid::new_v4().to_string();
    let mut game = Game {
        id: id.clone(),
        construction,
        n: req.n,
        seed: req.seed,
        doc: to_value(&tree),
        tree,
        state: GameState::new(Arc::new(board)),
        rng: ChaCha8Rng::seed_from_u64(req.seed),
    };
    let first = game.maker_move().map_err(|e| ApiError::internal(e.to_string()))?;
    let created = GameCreated {
        game_id: id.clone(),
        tree: game.doc.clone(),
        maker_first_move: first,
    };
    tracing::info!(game = %id, construction = construction.name(), n = req.n, "game created");
    app.games.write().expect("game table").insert(id, Arc::new(Mutex::new(game)));
    Ok((StatusCode::CREATED, Json(created)))
}

async fn get_game(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<GameView>, ApiError> {
    let game = app.game(&id)?;
    let g = game.lock().expect("game lock");
    Ok(Json(g.view()))
}

async fn delete_game(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    match app.games.write().expect("game table").remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError::new(StatusCode::NOT_FOUND, "unknown_game", format!("no game with id {id:?}"))),
    }
}

async fn breaker_move(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<BreakerMove>, JsonRejection>,
) -> Result<Json<MoveResult>, ApiError> {
    let game = app.game(&id)?;
    let Json(mv) = body?;
    let mut g = game.lock().expect("game lock");
    if g.status().is_over() {
        return Err(ApiError::illegal(format!("the game is over ({:?})", g.status())));
    }
    if g.state.to_move() != Player::Breaker {
        return Err(ApiError::internal("Maker has not replied"));
    }
    let v = VertexId(mv.vertex);
    if !g.tree.contains_vertex(v) {
        return Err(ApiError::illegal(format!("vertex {} is not on the board", mv.vertex)));
    }
    if !g.state.is_unclaimed(v) {
        return Err(ApiError::illegal(format!("vertex {} is already claimed", mv.vertex)));
    }
    g.state.claim(v).map_err(|e| ApiError::illegal(e.to_string()))?;
    let maker_reply = if g.status().is_over() {
        None
    } else {
        Some(g.maker_move().map_err(|e| ApiError::internal(e.to_string()))?)
    };
    Ok(Json(MoveResult {
        maker_reply,
        status: g.status(),
        claimed: g.claimed(),
    }))
}

/// Binds `addr` and serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "serving {}", makerforge_protocol::PREFIX);
    serve_on(listener, config, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
}

/// Serves on an already bound listener until `shutdown` resolves.
pub async fn serve_on(
    listener: tokio::net::TcpListener,
    config: ServiceConfig,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(AppState::new(config))).with_graceful_shutdown(shutdown).await
}
