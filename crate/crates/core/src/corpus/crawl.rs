//! GitHub REST v3 crawler for peer-review issue threads.
//!
//! Issues carrying the approval label are listed with `Link`-header
//! pagination, then each issue's comments are fetched by a bounded pool of
//! worker threads. Output is ordered by `(issue_number, comment position)`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use chrono::{DateTime, Utc};
use log::{debug, warn};
use regex::Regex;
use serde_json::Value;

use super::RawComment;

pub const DEFAULT_API_BASE: &str = "https://api.github.com";

/// Matches titles such as `rtweet: Collecting Twitter data`,
/// `Submission: tidyqpcr` or a bare `SCOPE`.
pub const DEFAULT_TITLE_REGEX: &str =
    r"^\s*(?:\[?[Ss]ubmission\]?\s*:?\s*)?([A-Za-z][A-Za-z0-9._]*)";

#[derive(Debug, thiserror::Error)]
pub enum CrawlError {
    #[error("rate limited; retry after {}s", retry_after.as_secs_f64())]
    RateLimited { retry_after: Duration },
    #[error("authentication failed (HTTP {status})")]
    AuthFailed { status: u16 },
    #[error("repository not found: {0}")]
    NotFound(String),
    #[error("malformed page: {0}")]
    MalformedPage(String),
    #[error("HTTP {status} from {url}")]
    Http { url: String, status: u16 },
    #[error("transport error for {url}: {message}")]
    Transport { url: String, message: String },
    #[error("invalid repository coordinate {0:?} (expected owner/name)")]
    InvalidRepo(String),
    #[error("invalid package title regex: {0}")]
    InvalidRegex(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepoCoordinate {
    pub owner: String,
    pub name: String,
}

impl FromStr for RepoCoordinate {
    type Err = CrawlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().split_once('/') {
            Some((o, n)) if !o.is_empty() && !n.is_empty() && !n.contains('/') => {
                Ok(RepoCoordinate {
                    owner: o.to_string(),
                    name: n.to_string(),
                })
            }
            _ => Err(CrawlError::InvalidRepo(s.to_string())),
        }
    }
}

impl fmt::Display for RepoCoordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.owner, self.name)
    }
}

#[derive(Clone, Debug)]
pub struct CrawlConfig {
    pub api_base: String,
    pub repo: RepoCoordinate,
    pub platform: String,
    pub approved_label: String,
    pub token: Option<String>,
    pub package_title_regex: Regex,
    pub per_page: u32,
    pub concurrency: usize,
    pub max_retries: u32,
    /// Upper bound on a single rate-limit sleep.
    pub max_backoff: Duration,
    pub timeout: Duration,
}

impl CrawlConfig {
    pub fn new(repo: RepoCoordinate, platform: &str, approved_label: &str) -> Self {
        CrawlConfig {
            api_base: DEFAULT_API_BASE.to_string(),
            repo,
            platform: platform.to_string(),
            approved_label: approved_label.to_string(),
            token: None,
            package_title_regex: Regex::new(DEFAULT_TITLE_REGEX).expect("default regex"),
            per_page: 100,
            concurrency: 4,
            max_retries: 5,
            max_backoff: Duration::from_secs(900),
            timeout: Duration::from_secs(60),
        }
    }

    pub fn with_title_regex(mut self, pattern: &str) -> Result<Self, CrawlError> {
        self.package_title_regex =
            Regex::new(pattern).map_err(|e| CrawlError::InvalidRegex(e.to_string()))?;
        Ok(self)
    }
}

/// One rate-limit wait performed by the crawler.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Backoff {
    pub url: String,
    pub retry_after: Duration,
    pub slept: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct CrawlReport {
    pub comments: Vec<RawComment>,
    pub issues_visited: usize,
    pub requests: usize,
    /// URLs of pages whose body could not be parsed; their items were skipped.
    pub skipped_pages: Vec<String>,
    pub backoffs: Vec<Backoff>,
}

impl CrawlReport {
    pub fn is_partial(&self) -> bool {
        !self.skipped_pages.is_empty()
    }
}

#[derive(Default)]
struct Stats {
    requests: usize,
    skipped_pages: Vec<String>,
    backoffs: Vec<Backoff>,
}

struct Page {
    items: Option<Vec<Value>>,
    next: Option<String>,
}

struct IssueRef {
    number: u64,
    package: String,
}

pub struct Crawler {
    config: CrawlConfig,
    agent: ureq::Agent,
    stats: Mutex<Stats>,
}

impl Crawler {
    pub fn new(config: CrawlConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(config.timeout))
            .user_agent("tdlens/0.1")
            .build()
            .into();
        Crawler {
            config,
            agent,
            stats: Mutex::new(Stats::default()),
        }
    }

    /// Crawls every comment of every issue with the approval label.
    pub fn crawl(&self) -> Result<CrawlReport, CrawlError> {
        let issues = self.list_issues()?;
        let issues_visited = issues.len();
        let per_issue = self.fetch_all_comments(&issues)?;

        let stats = std::mem::take(&mut *self.stats.lock().unwrap());
        Ok(CrawlReport {
            comments: per_issue.into_iter().flatten().collect(),
            issues_visited,
            requests: stats.requests,
            skipped_pages: stats.skipped_pages,
            backoffs: stats.backoffs,
        })
    }

    fn issues_url(&self) -> String {
        let base = format!(
            "{}/repos/{}/{}/issues",
            self.config.api_base.trim_end_matches('/'),
            self.config.repo.owner,
            self.config.repo.name
        );
        let per_page = self.config.per_page.to_string();
        url::Url::parse_with_params(
            &base,
            [
                ("labels", self.config.approved_label.as_str()),
                ("state", "all"),
                ("per_page", per_page.as_str()),
            ],
        )
        .map(String::from)
        .unwrap_or(base)
    }

    fn comments_url(&self, number: u64) -> String {
        format!(
            "{}/repos/{}/{}/issues/{}/comments?per_page={}",
            self.config.api_base.trim_end_matches('/'),
            self.config.repo.owner,
            self.config.repo.name,
            number,
            self.config.per_page
        )
    }

    fn list_issues(&self) -> Result<Vec<IssueRef>, CrawlError> {
        let mut issues = Vec::new();
        for items in self.paginate(self.issues_url())? {
            for item in items {
                if item.get("pull_request").is_some() {
                    continue;
                }
                let number = item.get("number").and_then(Value::as_u64);
                let title = item.get("title").and_then(Value::as_str);
                match (number, title) {
                    (Some(number), Some(title)) => issues.push(IssueRef {
                        number,
                        package: self.package_from_title(title),
                    }),
                    _ => warn!("skipping issue without number/title"),
                }
            }
        }
        issues.sort_by_key(|i| i.number);
        issues.dedup_by_key(|i| i.number);
        Ok(issues)
    }

    pub fn package_from_title(&self, title: &str) -> String {
        self.config
            .package_title_regex
            .captures(title)
            .and_then(|c| c.get(1).or_else(|| c.get(0)))
            .map(|m| m.as_str().trim().to_string())
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| title.trim().to_string())
    }

    fn fetch_all_comments(&self, issues: &[IssueRef]) -> Result<Vec<Vec<RawComment>>, CrawlError> {
        let next = AtomicUsize::new(0);
        let results: Mutex<Vec<(usize, Result<Vec<RawComment>, CrawlError>)>> =
            Mutex::new(Vec::with_capacity(issues.len()));
        let workers = self.config.concurrency.clamp(1, issues.len().max(1));

        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(issue) = issues.get(i) else { break };
                    let r = self.issue_comments(issue);
                    let failed = r.is_err();
                    results.lock().unwrap().push((i, r));
                    if failed {
                        // stop handing out new work to this worker
                        break;
                    }
                });
            }
        });

        let mut results = results.into_inner().unwrap();
        results.sort_by_key(|(i, _)| *i);
        results.into_iter().map(|(_, r)| r).collect()
    }

    fn issue_comments(&self, issue: &IssueRef) -> Result<Vec<RawComment>, CrawlError> {
        let mut out = Vec::new();
        let url = self.comments_url(issue.number);
        for items in self.paginate(url.clone())? {
            let parsed: Option<Vec<RawComment>> = items
                .iter()
                .map(|v| self.to_comment(v, issue))
                .collect();
            match parsed {
                Some(comments) => out.extend(comments),
                None => self.skip_page(&url),
            }
        }
        Ok(out)
    }

    fn to_comment(&self, v: &Value, issue: &IssueRef) -> Option<RawComment> {
        let id = match v.get("id")? {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            _ => return None,
        };
        let created_at: DateTime<Utc> = v.get("created_at")?.as_str()?.parse().ok()?;
        Some(RawComment {
            platform: self.config.platform.clone(),
            package: issue.package.clone(),
            issue_number: issue.number,
            comment_id: id,
            created_at,
            body: v
                .get("body")
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string(),
            url: v
                .get("html_url")
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string(),
        })
    }

    fn skip_page(&self, url: &str) {
        warn!("{}", CrawlError::MalformedPage(url.to_string()));
        self.stats.lock().unwrap().skipped_pages.push(url.to_string());
    }

    /// Follows `rel="next"` links from `first`, returning the parsed item
    /// arrays of every well-formed page.
    fn paginate(&self, first: String) -> Result<Vec<Vec<Value>>, CrawlError> {
        let mut pages = Vec::new();
        let mut visited = HashSet::new();
        let mut url = Some(first);
        while let Some(current) = url.take() {
            if !visited.insert(current.clone()) {
                warn!("pagination loop at {current}");
                break;
            }
            let page = self.fetch_page(&current)?;
            match page.items {
                Some(items) => pages.push(items),
                None => self.skip_page(&current),
            }
            url = page.next;
        }
        Ok(pages)
    }

    fn fetch_page(&self, url: &str) -> Result<Page, CrawlError> {
        let mut attempt = 0u32;
        loop {
            self.stats.lock().unwrap().requests += 1;
            let mut req = self
                .agent
                .get(url)
                .header("Accept", "application/vnd.github+json")
                .header("X-GitHub-Api-Version", "2022-11-28");
            if let Some(token) = &self.config.token {
                req = req.header("Authorization", format!("Bearer {token}"));
            }
            let mut resp = req.call().map_err(|e| CrawlError::Transport {
                url: url.to_string(),
                message: e.to_string(),
            })?;
            let status = resp.status().as_u16();
            let header = |name: &str| {
                resp.headers()
                    .get(name)
                    .and_then(|v| v.to_str().ok())
                    .map(str::to_string)
            };
            let link = header("link");
            let retry_after = header("retry-after");
            let remaining = header("x-ratelimit-remaining");
            let reset = header("x-ratelimit-reset");
            debug!("GET {url} -> {status}");

            let rate_limited = status == 429 || (status == 403 && remaining.as_deref() == Some("0"));
            if rate_limited {
                let wait = retry_delay(retry_after.as_deref(), reset.as_deref());
                if attempt >= self.config.max_retries {
                    return Err(CrawlError::RateLimited { retry_after: wait });
                }
                attempt += 1;
                let slept = wait.min(self.config.max_backoff);
                warn!("rate limited on {url}; sleeping {}s", slept.as_secs_f64());
                std::thread::sleep(slept);
                self.stats.lock().unwrap().backoffs.push(Backoff {
                    url: url.to_string(),
                    retry_after: wait,
                    slept,
                });
                continue;
            }
            match status {
                200..=299 => {}
                401 | 403 => return Err(CrawlError::AuthFailed { status }),
                404 => return Err(CrawlError::NotFound(self.config.repo.to_string())),
                _ => {
                    return Err(CrawlError::Http {
                        url: url.to_string(),
                        status,
                    })
                }
            }
            let body = resp.body_mut().read_to_string().ok();
            let items = body
                .and_then(|b| serde_json::from_str::<Value>(&b).ok())
                .and_then(|v| match v {
                    Value::Array(items) => Some(items),
                    _ => None,
                });
            return Ok(Page {
                items,
                next: link.as_deref().and_then(next_link),
            });
        }
    }
}

/// Delay requested by a rate-limited response: `Retry-After` seconds, else
/// time until `X-RateLimit-Reset`, else one minute.
pub fn retry_delay(retry_after: Option<&str>, reset_epoch: Option<&str>) -> Duration {
    if let Some(secs) = retry_after.and_then(|s| s.trim().parse::<u64>().ok()) {
        return Duration::from_secs(secs);
    }
    if let Some(reset) = reset_epoch.and_then(|s| s.trim().parse::<u64>().ok()) {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        return Duration::from_secs(reset.saturating_sub(now));
    }
    Duration::from_secs(60)
}

/// Extracts the `rel="next"` target of a `Link` header.
pub fn next_link(header: &str) -> Option<String> {
    header.split(',').find_map(|part| {
        let mut segments = part.split(';');
        let target = segments.next()?.trim();
        let is_next = segments.any(|p| {
            let p = p.trim();
            p == "rel=\"next\"" || p == "rel=next"
        });
        (is_next && target.starts_with('<') && target.ends_with('>'))
            .then(|| target[1..target.len() - 1].to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_link_header() {
        let h = r#"<https://api.github.com/repositories/1/issues?page=2>; rel="next", <https://api.github.com/repositories/1/issues?page=3>; rel="last""#;
        assert_eq!(
            next_link(h).as_deref(),
            Some("https://api.github.com/repositories/1/issues?page=2")
        );
        let last = r#"<https://x/issues?page=1>; rel="prev", <https://x/issues?page=1>; rel="first""#;
        assert_eq!(next_link(last), None);
        assert_eq!(next_link(""), None);
    }

    #[test]
    fn retry_delay_prefers_retry_after() {
        assert_eq!(retry_delay(Some("7"), Some("1")), Duration::from_secs(7));
        assert_eq!(retry_delay(None, Some("0")), Duration::ZERO);
        assert_eq!(retry_delay(None, None), Duration::from_secs(60));
    }

    #[test]
    fn repo_coordinates() {
        let r: RepoCoordinate = "ropensci/software-review".parse().unwrap();
        assert_eq!(r.owner, "ropensci");
        assert_eq!(r.to_string(), "ropensci/software-review");
        assert!("nope".parse::<RepoCoordinate>().is_err());
        assert!("a/b/c".parse::<RepoCoordinate>().is_err());
    }

    #[test]
    fn package_names_from_titles() {
        let c = Crawler::new(CrawlConfig::new(
            "a/b".parse().unwrap(),
            "ropensci",
            "approved",
        ));
        assert_eq!(c.package_from_title("rtweet: Collecting Twitter Data"), "rtweet");
        assert_eq!(c.package_from_title("Submission: tidyqpcr"), "tidyqpcr");
        assert_eq!(c.package_from_title("SCOPE"), "SCOPE");
        assert_eq!(c.package_from_title("data.table2 - fast"), "data.table2");
        assert_eq!(c.package_from_title("  ???  "), "???");
    }
}
