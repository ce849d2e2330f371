//! A live service on a free port plus a small HTTP client.

use std::path::Path;

use geox::api::{spawn, RunningService, ServiceConfig};
use reqwest::{Method, StatusCode};
use serde_json::Value;

pub const TOKEN: &str = "test-token";

pub struct Live {
    pub running: RunningService,
    client: reqwest::Client,
}

pub struct Reply {
    pub status: StatusCode,
    pub text: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.text).unwrap_or_else(|e| panic!("{e}: {}", self.text))
    }
}

impl Live {
    pub async fn start(data_dir: &Path, token: Option<&str>) -> Live {
        let config = ServiceConfig {
            data_dir: data_dir.to_path_buf(),
            admin_token: token.map(str::to_string),
            port: 0,
            ..ServiceConfig::default()
        };
        let running = spawn(&config).await.expect("service starts");
        Live { running, client: reqwest::Client::new() }
    }

    pub async fn stop(self) {
        self.running.shutdown().await.unwrap();
    }

    pub async fn send(&self, method: Method, path: &str, token: Option<&str>, body: Option<Value>) -> Reply {
        let mut req = self.client.request(method, self.running.url(path));
        if let Some(t) = token {
            req = req.bearer_auth(t);
        }
        if let Some(b) = body {
            req = req.json(&b);
        }
        let resp = req.send().await.expect("request completes");
        let status = resp.status();
        Reply { status, text: resp.text().await.unwrap() }
    }

    pub async fn get(&self, path: &str) -> Reply {
        self.send(Method::GET, path, None, None).await
    }

    pub async fn admin(&self, method: Method, path: &str, body: Option<Value>) -> Reply {
        self.send(method, path, Some(TOKEN), body).await
    }
}

pub fn ids(reply: &Reply) -> Vec<String> {
    reply.json().as_array().unwrap().iter().map(|v| v["id"].as_str().unwrap().to_string()).collect()
}

pub fn new_dataset(name: &str, health: &str) -> Value {
    serde_json::json!({
        "name": name,
        "providers": [{"name": "Google", "category": "commercial", "region": "america"}],
        "first_available_year": 2010,
        "cost": {"access": "free"},
        "coverage": {"region": "global", "areas": ["Global"]},
        "url": "https://example.org/new",
        "health_applications": [health],
    })
}
