//! Crawls a throwaway local server that speaks just enough of the GitHub
//! issues API (two pages of issues, one comment page each).
//!
//! Against the real API: `CrawlConfig::new("ropensci/software-review".parse()?, ...)`
//! with `token` taken from an environment variable.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;

use tdlens::corpus::crawl::{CrawlConfig, Crawler};

fn respond(target: &str, base: &str) -> (String, String) {
    let page2 = target.contains("page=2");
    if target.contains("/comments") {
        let n: u64 = target.split('/').nth(5).and_then(|s| s.parse().ok()).unwrap_or(0);
        let body = format!(
            r#"[{{"id":{id},"created_at":"2020-05-0{n}T12:00:00Z","body":"The README lacks examples. Nice package!","html_url":"https://github.com/o/r/issues/{n}#issuecomment-{id}"}}]"#,
            id = 500 + n
        );
        return (body, String::new());
    }
    let (lo, hi) = if page2 { (3, 4) } else { (1, 2) };
    let items: Vec<String> = (lo..=hi)
        .map(|n| format!(r#"{{"number":{n},"title":"Submission: pkg{n}"}}"#))
        .collect();
    let link = if page2 {
        String::new()
    } else {
        format!("Link: <{base}/repos/o/r/issues?page=2>; rel=\"next\"\r\n")
    };
    (format!("[{}]", items.join(",")), link)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let base = format!("http://{}", listener.local_addr()?);
    let server_base = base.clone();
    std::thread::spawn(move || {
        for mut conn in listener.incoming().flatten() {
            let mut line = String::new();
            let mut reader = BufReader::new(conn.try_clone().unwrap());
            reader.read_line(&mut line).ok();
            loop {
                let mut h = String::new();
                if reader.read_line(&mut h).map_or(true, |n| n == 0) || h.trim().is_empty() {
                    break;
                }
            }
            let target = line.split_whitespace().nth(1).unwrap_or("/");
            let (body, extra) = respond(target, &server_base);
            let _ = write!(
                conn,
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\n{extra}Connection: close\r\n\r\n{body}",
                body.len()
            );
        }
    });

    let mut cfg = CrawlConfig::new("o/r".parse()?, "ropensci", "approved");
    cfg.api_base = base;
    let report = Crawler::new(cfg).crawl()?;
    println!(
        "{} issues, {} comments, {} requests, partial: {}",
        report.issues_visited,
        report.comments.len(),
        report.requests,
        report.is_partial()
    );
    for c in &report.comments {
        println!("  #{} {} {} {}", c.issue_number, c.package, c.created_at, c.url);
    }
    Ok(())
}
