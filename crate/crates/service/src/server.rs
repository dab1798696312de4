//! WebSocket transport.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;

use crate::session::Service;

/// `/ws` carries one JSON envelope per text frame; `/health` answers `ok`.
pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/ws", get(upgrade))
        .route("/health", get(|| async { "ok" }))
        .with_state(service)
}

async fn upgrade(ws: WebSocketUpgrade, State(service): State<Arc<Service>>) -> Response {
    ws.on_upgrade(move |socket| connection(socket, service))
}

async fn connection(mut socket: WebSocket, service: Arc<Service>) {
    while let Some(Ok(msg)) = socket.recv().await {
        let text = match msg {
            Message::Text(t) => t.to_string(),
            Message::Close(_) => break,
            _ => continue,
        };
        // search calls block for up to the decision budget
        let svc = service.clone();
        let Ok(reply) = tokio::task::spawn_blocking(move || svc.handle_text(&text)).await else {
            break;
        };
        if socket.send(Message::Text(reply.into())).await.is_err() {
            break;
        }
    }
}

pub async fn serve(service: Arc<Service>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(service)).await
}
