#![allow(dead_code)]

use std::time::Duration;

use futures::StreamExt;
use gateway::{spawn, Config, EventRecord, RunningGateway};
use reqwest::{Client, Response, StatusCode};
use serde_json::{json, Value};

pub async fn start() -> RunningGateway {
    let config = Config {
        listen: "127.0.0.1:0".parse().unwrap(),
        paused: true,
        ..Config::default()
    };
    spawn(&config).await.unwrap()
}

pub struct Api {
    pub gw: RunningGateway,
    pub http: Client,
}

impl Api {
    pub async fn new() -> Api {
        Api {
            gw: start().await,
            http: Client::new(),
        }
    }

    pub async fn send(
        &self,
        method: reqwest::Method,
        path: &str,
        body: Option<Value>,
    ) -> (StatusCode, Value) {
        let mut req = self.http.request(method, self.gw.url(path));
        if let Some(b) = body {
            req = req.json(&b);
        }
        let resp = req.send().await.unwrap();
        let status = resp.status();
        let text = resp.text().await.unwrap();
        (status, serde_json::from_str(&text).unwrap_or(Value::String(text)))
    }

    pub async fn get(&self, path: &str) -> (StatusCode, Value) {
        self.send(reqwest::Method::GET, path, None).await
    }

    pub async fn post(&self, path: &str, body: Value) -> (StatusCode, Value) {
        self.send(reqwest::Method::POST, path, Some(body)).await
    }

    pub async fn put(&self, path: &str, body: Value) -> (StatusCode, Value) {
        self.send(reqwest::Method::PUT, path, Some(body)).await
    }

    pub async fn delete(&self, path: &str) -> (StatusCode, Value) {
        self.send(reqwest::Method::DELETE, path, None).await
    }

    pub async fn create(&self, kind: &str, id: &str) {
        let (status, body) = self.post("/nodes", json!({"kind": kind, "id": id})).await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
    }

    pub async fn program(&self, id: &str, program: &str, subscribers: &[&str]) -> Value {
        let (status, body) = self
            .put(
                &format!("/nodes/{id}"),
                json!({"program": program, "subscribers": subscribers}),
            )
            .await;
        assert_eq!(status, StatusCode::OK, "{body}");
        body
    }

    pub async fn events(&self, since: u64) -> Response {
        self.http
            .get(self.gw.url(&format!("/events?since={since}")))
            .send()
            .await
            .unwrap()
    }
}

/// Reads server-sent records until `n` arrived or `wait` passed without
/// any new one. Returns `None` in place of the list if the stream ended.
pub async fn read_records(resp: Response, n: usize, wait: Duration) -> (Vec<EventRecord>, bool) {
    let mut stream = resp.bytes_stream();
    let mut buf = String::new();
    let mut records = Vec::new();
    while records.len() < n {
        match tokio::time::timeout(wait, stream.next()).await {
            Err(_) => return (records, false),
            Ok(None) => return (records, true),
            Ok(Some(chunk)) => buf.push_str(std::str::from_utf8(&chunk.unwrap()).unwrap()),
        }
        while let Some(end) = buf.find("\n\n") {
            let frame: String = buf.drain(..end + 2).collect();
            for line in frame.lines() {
                if let Some(data) = line.strip_prefix("data:") {
                    records.push(serde_json::from_str(data.trim()).unwrap());
                }
            }
        }
    }
    (records, false)
}
