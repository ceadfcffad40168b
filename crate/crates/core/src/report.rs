//! Per-package TD reports as JSON or a single static HTML page.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::corpus::{RawComment, TdType};
use crate::pipeline::{classify_comments, PipelineModel, TdInstance};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TdReport {
    pub package: String,
    pub platform: String,
    pub generated_at: DateTime<Utc>,
    pub totals: BTreeMap<TdType, u64>,
    pub instances: Vec<TdInstance>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Html,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "html" => Ok(ReportFormat::Html),
            other => Err(format!("unknown report format {other:?} (json|html)")),
        }
    }
}

impl TdReport {
    /// Builds a report from instances, sorting them and recomputing totals.
    pub fn new(
        package: &str,
        platform: &str,
        generated_at: DateTime<Utc>,
        mut instances: Vec<TdInstance>,
    ) -> Self {
        instances.sort_by(|a, b| a.comment_id.cmp(&b.comment_id).then(a.position.cmp(&b.position)));
        let mut totals: BTreeMap<TdType, u64> = TdType::ALL.iter().map(|&t| (t, 0)).collect();
        for i in &instances {
            *totals.entry(i.td_type).or_default() += 1;
        }
        TdReport {
            package: package.to_string(),
            platform: platform.to_string(),
            generated_at,
            totals,
            instances,
        }
    }

    /// Totals agree with the instances and the instances are ordered.
    pub fn is_consistent(&self) -> bool {
        let rebuilt = TdReport::new(&self.package, &self.platform, self.generated_at, self.instances.clone());
        rebuilt == *self
    }

    pub fn total(&self) -> u64 {
        self.totals.values().sum()
    }
}

/// Classifies every comment of `package`. `generated_at` defaults to the
/// newest comment timestamp so identical inputs give identical reports.
pub fn build_report(
    model: &PipelineModel,
    comments: &[RawComment],
    package: &str,
    generated_at: Option<DateTime<Utc>>,
) -> TdReport {
    let own: Vec<RawComment> = comments.iter().filter(|c| c.package == package).cloned().collect();
    let mut platforms: Vec<&str> = own.iter().map(|c| c.platform.as_str()).collect();
    platforms.sort();
    platforms.dedup();
    let stamp = generated_at
        .or_else(|| own.iter().map(|c| c.created_at).max())
        .unwrap_or_default();
    let instances = classify_comments(model, &own, 4);
    TdReport::new(package, &platforms.join(","), stamp, instances)
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// Only http(s) links become anchors; anything else is shown as text.
fn safe_href(url: &str) -> Option<String> {
    (url.starts_with("https://") || url.starts_with("http://")).then(|| escape(url))
}

const STYLE: &str = "body{font-family:sans-serif;max-width:60em;margin:2em auto;color:#222}\
table{border-collapse:collapse}td,th{border:1px solid #bbb;padding:.25em .6em;text-align:left}\
td.n{text-align:right}li{margin:.35em 0}.meta{color:#666;font-size:.9em}";

fn render_html(r: &TdReport) -> String {
    let mut h = String::new();
    let title = format!("TD report: {}", r.package);
    let _ = write!(
        h,
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{}</title>\n<style>{STYLE}</style>\n</head>\n<body>\n",
        escape(&title)
    );
    let _ = writeln!(h, "<h1>{}</h1>", escape(&title));
    let _ = writeln!(
        h,
        "<p class=\"meta\">platform: {} | generated: {} | instances: {}</p>",
        escape(&r.platform),
        r.generated_at.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        r.total()
    );
    h.push_str("<h2>Totals</h2>\n<table>\n<tr><th>type</th><th>count</th></tr>\n");
    for (t, n) in &r.totals {
        let _ = writeln!(h, "<tr><td>{}</td><td class=\"n\">{n}</td></tr>", t.name());
    }
    h.push_str("</table>\n");
    for (t, n) in &r.totals {
        if *n == 0 {
            continue;
        }
        let _ = writeln!(h, "<h2 id=\"{0}\">{0} ({n})</h2>\n<ul>", t.name());
        for i in r.instances.iter().filter(|i| i.td_type == *t) {
            let link = match safe_href(&i.url) {
                Some(href) => format!("<a href=\"{href}\">comment {}</a>", escape(&i.comment_id)),
                None => format!("comment {}", escape(&i.comment_id)),
            };
            let _ = writeln!(
                h,
                "<li>{} <span class=\"meta\">[{}; {}]</span></li>",
                escape(&i.sentence),
                escape(&i.cluster),
                link
            );
        }
        h.push_str("</ul>\n");
    }
    h.push_str("</body>\n</html>\n");
    h
}

/// Serializes a report. Both formats are deterministic for equal input.
pub fn render_report(report: &TdReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s.into_bytes()
        }
        ReportFormat::Html => render_html(report).into_bytes(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::StageScores;

    fn inst(id: &str, pos: usize, t: TdType, url: &str) -> TdInstance {
        TdInstance {
            sentence: format!("sentence <{id}> & {pos}"),
            td_type: t,
            cluster: "Cluster-1".into(),
            scores: StageScores {
                gate: [("non_td".to_string(), -1.0), ("td".to_string(), 0.5)].into_iter().collect(),
                router: None,
                leaf: None,
            },
            comment_id: id.into(),
            url: url.into(),
            platform: "ropensci".into(),
            package: "pkg".into(),
            created_at: None,
            position: pos,
        }
    }

    fn fixture() -> TdReport {
        TdReport::new(
            "pkg",
            "ropensci",
            DateTime::<Utc>::default(),
            vec![
                inst("b", 0, TdType::Code, "https://github.com/o/r/issues/1#issuecomment-2"),
                inst("a", 2, TdType::Test, "https://github.com/o/r/issues/1#issuecomment-1"),
                inst("a", 1, TdType::Code, "https://github.com/o/r/issues/1#issuecomment-1"),
            ],
        )
    }

    #[test]
    fn ordering_and_totals() {
        let r = fixture();
        let keys: Vec<(&str, usize)> = r.instances.iter().map(|i| (i.comment_id.as_str(), i.position)).collect();
        assert_eq!(keys, vec![("a", 1), ("a", 2), ("b", 0)]);
        assert_eq!(r.totals[&TdType::Code], 2);
        assert!(r.is_consistent());
    }

    #[test]
    fn empty_report_renders() {
        let r = TdReport::new("none", "", DateTime::<Utc>::default(), vec![]);
        let html = String::from_utf8(render_report(&r, ReportFormat::Html)).unwrap();
        assert!(html.contains("<td>versioning</td><td class=\"n\">0</td>"));
        let back: TdReport = serde_json::from_slice(&render_report(&r, ReportFormat::Json)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn html_links_and_escaping() {
        let r = fixture();
        let html = String::from_utf8(render_report(&r, ReportFormat::Html)).unwrap();
        assert_eq!(html.matches("<a href=").count(), 3);
        assert!(html.contains("href=\"https://github.com/o/r/issues/1#issuecomment-2\""));
        assert!(html.contains("sentence &lt;a&gt; &amp; 1"));
        assert_eq!(render_report(&r, ReportFormat::Html), render_report(&r, ReportFormat::Html));
    }

    #[test]
    fn json_round_trip() {
        let r = fixture();
        let back: TdReport = serde_json::from_slice(&render_report(&r, ReportFormat::Json)).unwrap();
        assert_eq!(back, r);
    }
}
