//! Thin async client for the `/v1` game service.

use makerforge_protocol::{BreakerMove, CreateGame, ErrorBody, GameCreated, GameView, MoveResult, PREFIX};
use reqwest::{Method, StatusCode};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    /// The service answered with an error status.
    #[error("{status}: {} ({})", body.message, body.error)]
    Api { status: u16, body: ErrorBody },
    #[error(transparent)]
    Transport(#[from] reqwest::Error),
}

impl ClientError {
    pub fn status(&self) -> Option<u16> {
        match self {
            ClientError::Api { status, .. } => Some(*status),
            ClientError::Transport(e) => e.status().map(|s| s.as_u16()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base` is the server root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: &str) -> Self {
        Self {
            base: format!("{}{PREFIX}", base.trim_end_matches('/')),
            http: reqwest::Client::new(),
        }
    }

    async fn send<B: Serialize, T: DeserializeOwned>(&self, method: Method, path: &str, body: Option<&B>) -> Result<Option<T>, ClientError> {
        let mut req = self.http.request(method, format!("{}{path}", self.base));
        if let Some(b) = body {
            req = req.json(b);
        }
        let resp = req.send().await?;
        let status = resp.status();
        if !status.is_success() {
            let body = match resp.json::<ErrorBody>().await {
                Ok(b) => b,
                Err(_) => ErrorBody {
                    error: "http".into(),
                    message: status.canonical_reason().unwrap_or("error").into(),
                },
            };
            return Err(ClientError::Api { status: status.as_u16(), body });
        }
        if status == StatusCode::NO_CONTENT {
            return Ok(None);
        }
        Ok(Some(resp.json().await?))
    }

    pub async fn create_game(&self, req: &CreateGame) -> Result<GameCreated, ClientError> {
        Ok(self.send(Method::POST, "/games", Some(req)).await?.expect("201 has a body"))
    }

    pub async fn breaker_move(&self, game_id: &str, vertex: u32) -> Result<MoveResult, ClientError> {
        let body = BreakerMove { vertex };
        Ok(self.send(Method::POST, &format!("/games/{game_id}/breaker-move"), Some(&body)).await?.expect("200 has a body"))
    }

    pub async fn game(&self, game_id: &str) -> Result<GameView, ClientError> {
        Ok(self.send::<(), _>(Method::GET, &format!("/games/{game_id}"), None).await?.expect("200 has a body"))
    }

    pub async fn delete_game(&self, game_id: &str) -> Result<(), ClientError> {
        self.send::<(), serde::de::IgnoredAny>(Method::DELETE, &format!("/games/{game_id}"), None).await?;
        Ok(())
    }
}
