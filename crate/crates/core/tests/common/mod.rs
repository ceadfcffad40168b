//! Shared helpers for integration tests: a minimal HTTP/1.1 mock of the
//! GitHub issues API and small fixture builders.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use tdlens::pipeline::{train_pipeline, HierarchySource, PipelineConfig, PipelineModel};
use tdlens::synth::{keyword_corpus, SynthConfig};
use tdlens::{ClassifierSpec, LabeledSentence};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub struct Response {
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: String,
}

impl Response {
    pub fn json(body: String) -> Self {
        Response {
            status: 200,
            headers: vec![("Content-Type".into(), "application/json".into())],
            body,
        }
    }

    pub fn status(status: u16, body: &str) -> Self {
        Response {
            status,
            headers: vec![],
            body: body.to_string(),
        }
    }

    pub fn header(mut self, k: &str, v: &str) -> Self {
        self.headers.push((k.to_string(), v.to_string()));
        self
    }
}

type Handler = dyn Fn(&str, &str) -> Response + Send + Sync;

/// One listener thread; each connection is answered once and closed.
pub struct MockServer {
    addr: String,
    stop: Arc<AtomicBool>,
    log: Arc<Mutex<Vec<String>>>,
    thread: Option<JoinHandle<()>>,
}

impl MockServer {
    /// `handler(path_and_query, base_url)` builds every response.
    pub fn start<F>(handler: F) -> Self
    where
        F: Fn(&str, &str) -> Response + Send + Sync + 'static,
    {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind");
        let addr = format!("http://{}", listener.local_addr().unwrap());
        let stop = Arc::new(AtomicBool::new(false));
        let log = Arc::new(Mutex::new(Vec::new()));
        let handler: Arc<Handler> = Arc::new(handler);
        let (s, l, base) = (stop.clone(), log.clone(), addr.clone());
        let thread = std::thread::spawn(move || {
            for conn in listener.incoming() {
                if s.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(conn) = conn else { continue };
                let (h, l, base) = (handler.clone(), l.clone(), base.clone());
                std::thread::spawn(move || serve(conn, &*h, &l, &base));
            }
        });
        MockServer {
            addr,
            stop,
            log,
            thread: Some(thread),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.addr
    }

    /// Request targets in arrival order.
    pub fn requests(&self) -> Vec<String> {
        self.log.lock().unwrap().clone()
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr.trim_start_matches("http://"));
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

fn serve(mut conn: TcpStream, handler: &Handler, log: &Mutex<Vec<String>>, base: &str) {
    let mut reader = BufReader::new(conn.try_clone().expect("clone"));
    let mut line = String::new();
    if reader.read_line(&mut line).is_err() {
        return;
    }
    let target = line.split_whitespace().nth(1).unwrap_or("/").to_string();
    loop {
        let mut h = String::new();
        match reader.read_line(&mut h) {
            Ok(0) | Err(_) => break,
            Ok(_) if h == "\r\n" || h == "\n" => break,
            Ok(_) => {}
        }
    }
    log.lock().unwrap().push(target.clone());
    let resp = handler(&target, base);
    let mut head = format!(
        "HTTP/1.1 {} X\r\nContent-Length: {}\r\nConnection: close\r\n",
        resp.status,
        resp.body.len()
    );
    for (k, v) in &resp.headers {
        head.push_str(&format!("{k}: {v}\r\n"));
    }
    head.push_str("\r\n");
    let _ = conn.write_all(head.as_bytes());
    let _ = conn.write_all(resp.body.as_bytes());
    let _ = conn.flush();
}

/// Query parameters of a request target.
pub fn query(target: &str) -> BTreeMap<String, String> {
    let q = target.split_once('?').map(|(_, q)| q).unwrap_or("");
    q.split('&')
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// Scripted behavior of the fake GitHub repository.
#[derive(Clone, Debug, Default)]
pub struct FakeRepo {
    pub issues: u64,
    pub per_page: u64,
    pub comments_per_issue: u64,
    /// Answer the first request for this issues page number with a 429.
    pub rate_limit_issue_page: Option<u64>,
    /// This issue's comment page is not valid JSON.
    pub malformed_comments_for: Option<u64>,
}

impl FakeRepo {
    pub fn handler(self) -> impl Fn(&str, &str) -> Response + Send + Sync + 'static {
        let limited = Mutex::new(false);
        move |target: &str, base: &str| {
            let path = target.split('?').next().unwrap_or("");
            let q = query(target);
            let page: u64 = q.get("page").and_then(|p| p.parse().ok()).unwrap_or(1);
            let parts: Vec<&str> = path.trim_matches('/').split('/').collect();
            match parts.as_slice() {
                ["repos", _, _, "issues"] => {
                    if Some(page) == self.rate_limit_issue_page {
                        let mut done = limited.lock().unwrap();
                        if !*done {
                            *done = true;
                            return Response::status(429, "{\"message\":\"slow down\"}")
                                .header("Retry-After", "1");
                        }
                    }
                    let lo = (page - 1) * self.per_page + 1;
                    let hi = (page * self.per_page).min(self.issues);
                    let items: Vec<String> = (lo..=hi)
                        .map(|n| format!(r#"{{"number":{n},"title":"pkg{n}: package number {n}","labels":[{{"name":"approved"}}]}}"#))
                        .collect();
                    let mut r = Response::json(format!("[{}]", items.join(",")));
                    if hi < self.issues {
                        let next = format!(
                            "{base}{path}?labels=approved&state=all&per_page={}&page={}",
                            self.per_page,
                            page + 1
                        );
                        r = r.header("Link", &format!("<{next}>; rel=\"next\""));
                    }
                    r
                }
                ["repos", _, _, "issues", n, "comments"] => {
                    let n: u64 = n.parse().unwrap_or(0);
                    if n == 0 || n > self.issues {
                        return Response::status(404, "{}");
                    }
                    if Some(n) == self.malformed_comments_for {
                        return Response::json("[{\"id\": 1, oops".into());
                    }
                    let items: Vec<String> = (0..self.comments_per_issue)
                        .map(|j| {
                            let id = n * 1000 + j;
                            format!(
                                r#"{{"id":{id},"created_at":"2019-0{}-1{}T10:00:00Z","body":"Comment {j} on issue {n}. Please add a vignette.","html_url":"https://github.com/o/r/issues/{n}#issuecomment-{id}"}}"#,
                                1 + n % 9,
                                j % 10
                            )
                        })
                        .collect();
                    Response::json(format!("[{}]", items.join(",")))
                }
                _ => Response::status(404, "{}"),
            }
        }
    }
}

/// Small separable dataset and a linear-learner pipeline trained on it.
pub fn small_dataset(per_label: usize, seed: u64) -> Vec<LabeledSentence> {
    keyword_corpus(&SynthConfig {
        per_label,
        seed,
        ..SynthConfig::default()
    })
}

pub fn small_model(per_label: usize, seed: u64) -> PipelineModel {
    let cfg = PipelineConfig::new(
        ClassifierSpec::linear(seed),
        HierarchySource::Induce { k_max: 9, folds: 5 },
        seed,
    );
    train_pipeline(&small_dataset(per_label, seed), &cfg).expect("train")
}
