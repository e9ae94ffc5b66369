use makerforge_client::Client;
use makerforge_protocol::{CreateGame, GameStatus};
use makerforge_service::{serve_on, ServiceConfig};

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn plays_against_a_live_server() {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(serve_on(listener, ServiceConfig::default(), std::future::pending()));
    let client = Client::new(&format!("http://{addr}/"));
    let g = client
        .create_game(&CreateGame {
            construction: "es".into(),
            n: 3,
            seed: 0,
            c: None,
        })
        .await
        .unwrap();
    assert_eq!(g.maker_first_move, 0);
    let err = client.breaker_move(&g.game_id, 0).await.unwrap_err();
    assert_eq!(err.status(), Some(409));
    // Breaker always takes the highest free vertex
    let mut status = GameStatus::Ongoing;
    while status == GameStatus::Ongoing {
        let view = client.game(&g.game_id).await.unwrap();
        let taken: Vec<u32> = view.claimed.iter().map(|c| c.vertex).collect();
        let v = (0..7).rev().find(|v| !taken.contains(v)).unwrap();
        status = client.breaker_move(&g.game_id, v).await.unwrap().status;
    }
    assert_eq!(status, GameStatus::MakerWin);
    client.delete_game(&g.game_id).await.unwrap();
    assert_eq!(client.game(&g.game_id).await.unwrap_err().status(), Some(404));
    let bad = CreateGame {
        construction: "theorem1".into(),
        n: 2,
        seed: 0,
        c: None,
    };
    assert_eq!(client.create_game(&bad).await.unwrap_err().status(), Some(422));
}
