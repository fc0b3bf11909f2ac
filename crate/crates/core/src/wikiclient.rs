//! Wikidata entity and English-Wikipedia intro fetching.
//!
//! Two backends implement [`KnowledgeSource`]:
//!
//! - [`HttpSource`] talks to the live MediaWiki APIs with a request-rate
//!   limit, a cap on requests in flight, and bounded retries with
//!   exponential backoff on HTTP 429 / 5xx and transport failures.
//! - [`FixtureSource`] answers from `entities.jsonl` / `intros.jsonl` in a
//!   local directory and never touches the network.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const WIKIDATA_API: &str = "https://www.wikidata.org/w/api.php";
pub const WIKIPEDIA_API: &str = "https://en.wikipedia.org/w/api.php";
/// Upper end of the numeric id range drawn from during random collection.
pub const MAX_NUMERIC_ID: u64 = 99_000_000;

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("malformed response: {0}")]
    Malformed(String),
}

/// A Wikidata item identifier, `Q` followed by a positive number without
/// leading zeros.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Qid(u64);

impl Qid {
    pub fn new(number: u64) -> Option<Qid> {
        (number > 0).then_some(Qid(number))
    }

    pub fn number(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Qid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}", self.0)
    }
}

impl FromStr for Qid {
    type Err = FetchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FetchError::NotFound(format!("invalid entity identifier {s:?}"));
        let digits = s.strip_prefix('Q').ok_or_else(bad)?;
        if digits.is_empty()
            || digits.starts_with('0')
            || !digits.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        digits.parse().map(Qid).map_err(|_| bad())
    }
}

impl Serialize for Qid {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Qid {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityRecord {
    pub qid: Qid,
    pub label: String,
    #[serde(default)]
    pub description: String,
    /// Labels of the `P31` (instance of) values in source order.
    #[serde(default)]
    pub instances: Vec<String>,
    #[serde(default)]
    pub sitelink_title: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleIntro {
    /// The title that was requested.
    pub title: String,
    pub first_paragraph: String,
    pub is_redirect: bool,
    /// Title of the page that actually answered, when it differs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved_title: Option<String>,
}

/// The set of numeric ids a source can be sampled from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdUniverse {
    /// Every id in `1..=max`.
    Range { max: u64 },
    /// A finite list of known ids, sorted ascending.
    Finite(Vec<u64>),
}

pub trait KnowledgeSource: Sync {
    fn fetch_entity(&self, qid: Qid) -> Result<EntityRecord, FetchError>;

    fn fetch_article_intro(&self, title: &str) -> Result<ArticleIntro, FetchError>;

    fn id_universe(&self) -> IdUniverse;

    /// Number of concurrent requests callers may usefully issue.
    fn max_in_flight(&self) -> usize {
        1
    }

    /// Parses `qid` and fetches it; malformed identifiers are `NotFound`.
    fn fetch_entity_str(&self, qid: &str) -> Result<EntityRecord, FetchError> {
        self.fetch_entity(qid.parse()?)
    }
}

// ---------------------------------------------------------------------------
// fixtures

/// Offline source backed by `entities.jsonl` and `intros.jsonl`.
#[derive(Debug, Clone, Default)]
pub struct FixtureSource {
    entities: BTreeMap<Qid, EntityRecord>,
    intros: HashMap<String, ArticleIntro>,
}

impl FixtureSource {
    pub fn new(
        entities: impl IntoIterator<Item = EntityRecord>,
        intros: impl IntoIterator<Item = ArticleIntro>,
    ) -> Self {
        FixtureSource {
            entities: entities.into_iter().map(|e| (e.qid, e)).collect(),
            intros: intros.into_iter().map(|i| (i.title.clone(), i)).collect(),
        }
    }

    /// Loads a fixture directory. A missing `intros.jsonl` is treated as empty.
    pub fn load(dir: &Path) -> Result<Self, FetchError> {
        let entities = read_jsonl::<EntityRecord>(&dir.join("entities.jsonl"))?;
        let intros_path = dir.join("intros.jsonl");
        let intros = if intros_path.exists() {
            read_jsonl::<ArticleIntro>(&intros_path)?
        } else {
            Vec::new()
        };
        Ok(FixtureSource::new(entities, intros))
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, FetchError> {
    let text = fs::read_to_string(path)
        .map_err(|e| FetchError::Malformed(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| FetchError::Malformed(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect()
}

impl KnowledgeSource for FixtureSource {
    fn fetch_entity(&self, qid: Qid) -> Result<EntityRecord, FetchError> {
        self.entities
            .get(&qid)
            .cloned()
            .ok_or_else(|| FetchError::NotFound(qid.to_string()))
    }

    fn fetch_article_intro(&self, title: &str) -> Result<ArticleIntro, FetchError> {
        if title.is_empty() {
            return Err(FetchError::NotFound("empty title".into()));
        }
        self.intros
            .get(title)
            .cloned()
            .ok_or_else(|| FetchError::NotFound(title.to_owned()))
    }

    fn id_universe(&self) -> IdUniverse {
        IdUniverse::Finite(self.entities.keys().map(|q| q.number()).collect())
    }
}

// ---------------------------------------------------------------------------
// HTTP

#[derive(Debug, Clone)]
pub struct HttpConfig {
    pub wikidata_endpoint: String,
    pub wikipedia_endpoint: String,
    /// Total attempts per request, including the first.
    pub max_attempts: u32,
    pub max_in_flight: usize,
    pub requests_per_second: f64,
    /// Backoff before retry `k` (1-based) is `base_backoff * 2^(k-1)`.
    pub base_backoff: Duration,
    pub timeout: Duration,
    pub user_agent: String,
}

impl Default for HttpConfig {
    fn default() -> Self {
        HttpConfig {
            wikidata_endpoint: WIKIDATA_API.to_owned(),
            wikipedia_endpoint: WIKIPEDIA_API.to_owned(),
            max_attempts: 3,
            max_in_flight: 8,
            requests_per_second: 10.0,
            base_backoff: Duration::from_millis(500),
            timeout: Duration::from_secs(30),
            user_agent: concat!("shortdesc/", env!("CARGO_PKG_VERSION")).to_owned(),
        }
    }
}

/// Counting semaphore bounding concurrent requests.
#[derive(Debug)]
struct InFlight {
    cap: usize,
    state: Mutex<(usize, usize)>,
    freed: Condvar,
}

struct Permit<'a>(&'a InFlight);

impl InFlight {
    fn new(cap: usize) -> Self {
        InFlight {
            cap: cap.max(1),
            state: Mutex::new((0, 0)),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut state = self.state.lock().unwrap();
        while state.0 >= self.cap {
            state = self.freed.wait(state).unwrap();
        }
        state.0 += 1;
        state.1 = state.1.max(state.0);
        Permit(self)
    }

    fn peak(&self) -> usize {
        self.state.lock().unwrap().1
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut state = self.0.state.lock().unwrap();
        state.0 -= 1;
        self.0.freed.notify_one();
    }
}

/// Spaces request start times at least `1 / rate` apart.
#[derive(Debug)]
struct RateLimiter {
    interval: Duration,
    next: Mutex<Instant>,
}

impl RateLimiter {
    fn new(requests_per_second: f64) -> Self {
        let interval = if requests_per_second > 0.0 && requests_per_second.is_finite() {
            Duration::from_secs_f64(1.0 / requests_per_second)
        } else {
            Duration::ZERO
        };
        RateLimiter {
            interval,
            next: Mutex::new(Instant::now()),
        }
    }

    fn wait(&self) {
        let slot = {
            let mut next = self.next.lock().unwrap();
            let now = Instant::now();
            let slot = (*next).max(now);
            *next = slot + self.interval;
            slot
        };
        let now = Instant::now();
        if slot > now {
            thread::sleep(slot - now);
        }
    }
}

/// Live MediaWiki client. Safe to share between threads.
pub struct HttpSource {
    config: HttpConfig,
    client: reqwest::blocking::Client,
    in_flight: InFlight,
    limiter: RateLimiter,
}

impl fmt::Debug for HttpSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HttpSource")
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl HttpSource {
    pub fn new(config: HttpConfig) -> Result<Self, FetchError> {
        let client = reqwest::blocking::Client::builder()
            .user_agent(config.user_agent.clone())
            .timeout(config.timeout)
            .build()
            .map_err(|e| FetchError::Transport(e.to_string()))?;
        Ok(HttpSource {
            in_flight: InFlight::new(config.max_in_flight),
            limiter: RateLimiter::new(config.requests_per_second),
            config,
            client,
        })
    }

    pub fn config(&self) -> &HttpConfig {
        &self.config
    }

    /// Highest number of simultaneous requests observed so far.
    pub fn peak_in_flight(&self) -> usize {
        self.in_flight.peak()
    }

    fn get_json(&self, endpoint: &str, params: &[(&str, &str)]) -> Result<Value, FetchError> {
        let _permit = self.in_flight.acquire();
        let attempts = self.config.max_attempts.max(1);
        let mut last_error = String::new();
        for attempt in 1..=attempts {
            if attempt > 1 {
                let backoff = self.config.base_backoff * 2u32.pow(attempt - 2);
                log::debug!("retry {attempt}/{attempts} after {backoff:?}: {last_error}");
                thread::sleep(backoff);
            }
            self.limiter.wait();
            let response = match self.client.get(endpoint).query(params).send() {
                Ok(r) => r,
                Err(e) => {
                    last_error = e.to_string();
                    continue;
                }
            };
            let status = response.status();
            if status.as_u16() == 429 || status.is_server_error() {
                last_error = format!("HTTP {status}");
                continue;
            }
            if !status.is_success() {
                return Err(FetchError::Transport(format!("HTTP {status}")));
            }
            let body = response
                .text()
                .map_err(|e| FetchError::Transport(e.to_string()))?;
            return serde_json::from_str(&body).map_err(|e| FetchError::Malformed(e.to_string()));
        }
        Err(FetchError::Transport(format!(
            "giving up after {attempts} attempts: {last_error}"
        )))
    }

    fn fetch_labels(&self, ids: &[String]) -> Result<HashMap<String, String>, FetchError> {
        let mut labels = HashMap::new();
        // wbgetentities accepts at most 50 ids per call
        for chunk in ids.chunks(50) {
            let joined = chunk.join("|");
            let body = self.get_json(
                &self.config.wikidata_endpoint,
                &[
                    ("action", "wbgetentities"),
                    ("ids", &joined),
                    ("props", "labels"),
                    ("languages", "en"),
                    ("format", "json"),
                ],
            )?;
            labels.extend(parse_labels(&body));
        }
        Ok(labels)
    }
}

impl KnowledgeSource for HttpSource {
    fn fetch_entity(&self, qid: Qid) -> Result<EntityRecord, FetchError> {
        let id = qid.to_string();
        let body = self.get_json(
            &self.config.wikidata_endpoint,
            &[
                ("action", "wbgetentities"),
                ("ids", &id),
                ("props", "labels|descriptions|claims|sitelinks"),
                ("languages", "en"),
                ("sitefilter", "enwiki"),
                ("format", "json"),
            ],
        )?;
        let raw = parse_entity(&body, qid)?;
        let labels = if raw.instance_ids.is_empty() {
            HashMap::new()
        } else {
            self.fetch_labels(&raw.instance_ids)?
        };
        Ok(raw.resolve(&labels))
    }

    fn fetch_article_intro(&self, title: &str) -> Result<ArticleIntro, FetchError> {
        if title.is_empty() {
            return Err(FetchError::NotFound("empty title".into()));
        }
        let body = self.get_json(
            &self.config.wikipedia_endpoint,
            &[
                ("action", "query"),
                ("prop", "extracts"),
                ("exintro", "1"),
                ("explaintext", "1"),
                ("redirects", "1"),
                ("titles", title),
                ("format", "json"),
                ("formatversion", "2"),
            ],
        )?;
        parse_intro(&body, title)
    }

    fn id_universe(&self) -> IdUniverse {
        IdUniverse::Range {
            max: MAX_NUMERIC_ID,
        }
    }

    fn max_in_flight(&self) -> usize {
        self.config.max_in_flight.max(1)
    }
}

/// An entity whose `P31` values are still ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEntity {
    pub qid: Qid,
    pub label: String,
    pub description: String,
    pub instance_ids: Vec<String>,
    pub sitelink_title: Option<String>,
}

impl RawEntity {
    /// Replaces instance ids with labels; ids without an English label are kept verbatim.
    pub fn resolve(self, labels: &HashMap<String, String>) -> EntityRecord {
        EntityRecord {
            qid: self.qid,
            label: self.label,
            description: self.description,
            instances: self
                .instance_ids
                .into_iter()
                .map(|id| labels.get(&id).cloned().unwrap_or(id))
                .collect(),
            sitelink_title: self.sitelink_title,
        }
    }
}

fn api_error(body: &Value) -> Option<(String, String)> {
    let error = body.get("error")?;
    Some((
        error.get("code")?.as_str().unwrap_or_default().to_owned(),
        error
            .get("info")
            .and_then(Value::as_str)
            .unwrap_or_default()
            .to_owned(),
    ))
}

/// Parses a `wbgetentities` response for one entity.
pub fn parse_entity(body: &Value, qid: Qid) -> Result<RawEntity, FetchError> {
    let id = qid.to_string();
    if let Some((code, info)) = api_error(body) {
        return Err(match code.as_str() {
            "no-such-entity" => FetchError::NotFound(id),
            _ => FetchError::Malformed(format!("API error {code}: {info}")),
        });
    }
    let entity = body
        .get("entities")
        .and_then(|e| e.get(&id))
        .ok_or_else(|| FetchError::Malformed(format!("no entity {id} in response")))?;
    if entity.get("missing").is_some() {
        return Err(FetchError::NotFound(id));
    }
    let en_value = |field: &str| {
        entity
            .get(field)
            .and_then(|m| m.get("en"))
            .and_then(|v| v.get("value"))
            .and_then(Value::as_str)
            .unwrap_or_default()
            .to_owned()
    };
    let instance_ids = match entity.get("claims").and_then(|c| c.get("P31")) {
        None => Vec::new(),
        Some(Value::Array(claims)) => claims
            .iter()
            .filter_map(|claim| {
                claim
                    .pointer("/mainsnak/datavalue/value/id")
                    .and_then(Value::as_str)
                    .map(str::to_owned)
            })
            .collect(),
        Some(_) => return Err(FetchError::Malformed("P31 claims are not a list".into())),
    };
    let sitelink_title = entity
        .pointer("/sitelinks/enwiki/title")
        .and_then(Value::as_str)
        .map(str::to_owned);
    Ok(RawEntity {
        qid,
        label: en_value("labels"),
        description: en_value("descriptions"),
        instance_ids,
        sitelink_title,
    })
}

/// Parses a labels-only `wbgetentities` response into id → English label.
pub fn parse_labels(body: &Value) -> HashMap<String, String> {
    let mut out = HashMap::new();
    if let Some(Value::Object(entities)) = body.get("entities") {
        for (id, entity) in entities {
            if let Some(label) = entity.pointer("/labels/en/value").and_then(Value::as_str) {
                out.insert(id.clone(), label.to_owned());
            }
        }
    }
    out
}

/// Parses a `query&prop=extracts` response (formatversion 2).
///
/// A page is a redirect when the response carries a `redirects` entry; the
/// API's `normalized` entries (case or underscore fixes) are not redirects.
pub fn parse_intro(body: &Value, requested: &str) -> Result<ArticleIntro, FetchError> {
    if let Some((code, info)) = api_error(body) {
        return Err(FetchError::Malformed(format!("API error {code}: {info}")));
    }
    let query = body
        .get("query")
        .ok_or_else(|| FetchError::Malformed("missing query object".into()))?;
    let page = query
        .get("pages")
        .and_then(Value::as_array)
        .and_then(|p| p.first())
        .ok_or_else(|| FetchError::Malformed("missing pages".into()))?;
    let truthy = |v: Option<&Value>| match v {
        None | Some(Value::Null) | Some(Value::Bool(false)) => false,
        Some(_) => true,
    };
    if truthy(page.get("missing")) || truthy(page.get("invalid")) {
        return Err(FetchError::NotFound(requested.to_owned()));
    }
    let redirect_target = query
        .get("redirects")
        .and_then(Value::as_array)
        .and_then(|r| r.last())
        .and_then(|r| r.get("to"))
        .and_then(Value::as_str);
    let page_title = page.get("title").and_then(Value::as_str);
    let extract = page
        .get("extract")
        .and_then(Value::as_str)
        .unwrap_or_default();
    let first_paragraph = extract
        .split('\n')
        .map(str::trim)
        .find(|l| !l.is_empty())
        .unwrap_or_default()
        .to_owned();
    Ok(ArticleIntro {
        title: requested.to_owned(),
        first_paragraph,
        is_redirect: redirect_target.is_some(),
        resolved_title: page_title.filter(|t| *t != requested).map(str::to_owned),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn qid_parsing() {
        assert_eq!("Q1497".parse::<Qid>().unwrap().number(), 1497);
        for bad in ["Q0", "Q", "q12", "Q012", "Q12a", "1497", ""] {
            assert!(
                matches!(bad.parse::<Qid>(), Err(FetchError::NotFound(_))),
                "{bad}"
            );
        }
        assert_eq!(Qid::new(7).unwrap().to_string(), "Q7");
        assert!(Qid::new(0).is_none());
    }

    fn mississippi() -> Value {
        json!({"entities": {"Q1497": {
            "id": "Q1497",
            "labels": {"en": {"language": "en", "value": "Mississippi River"}},
            "descriptions": {"en": {"language": "en", "value": "river system in North America"}},
            "claims": {"P31": [
                {"mainsnak": {"datavalue": {"value": {"id": "Q4022"}}}},
                {"mainsnak": {"snaktype": "novalue"}}
            ]},
            "sitelinks": {"enwiki": {"site": "enwiki", "title": "Mississippi River"}}
        }}})
    }

    #[test]
    fn parses_entity() {
        let raw = parse_entity(&mississippi(), "Q1497".parse().unwrap()).unwrap();
        assert_eq!(raw.description, "river system in North America");
        assert_eq!(raw.sitelink_title.as_deref(), Some("Mississippi River"));
        assert_eq!(raw.instance_ids, ["Q4022"]);
        let labels =
            parse_labels(&json!({"entities": {"Q4022": {"labels": {"en": {"value": "river"}}}}}));
        assert_eq!(raw.resolve(&labels).instances, ["river"]);
    }

    #[test]
    fn instance_order_is_preserved() {
        let body = json!({"entities": {"Q4986155": {
            "labels": {"en": {"value": "Bugema University"}},
            "claims": {"P31": [
                {"mainsnak": {"datavalue": {"value": {"id": "Q3918"}}}},
                {"mainsnak": {"datavalue": {"value": {"id": "Q5087267"}}}}
            ]}
        }}});
        let raw = parse_entity(&body, "Q4986155".parse().unwrap()).unwrap();
        let labels: HashMap<_, _> = [
            ("Q5087267".to_owned(), "church college".to_owned()),
            ("Q3918".to_owned(), "university".to_owned()),
        ]
        .into();
        let rec = raw.resolve(&labels);
        assert_eq!(rec.instances, ["university", "church college"]);
        assert_eq!(rec.description, "");
        assert_eq!(rec.sitelink_title, None);
    }

    #[test]
    fn missing_entities_are_not_found() {
        let q = "Q123".parse().unwrap();
        let missing = json!({"entities": {"Q123": {"id": "Q123", "missing": ""}}});
        assert!(matches!(
            parse_entity(&missing, q),
            Err(FetchError::NotFound(_))
        ));
        let err = json!({"error": {"code": "no-such-entity", "info": "x"}});
        assert!(matches!(
            parse_entity(&err, q),
            Err(FetchError::NotFound(_))
        ));
        assert!(matches!(
            parse_entity(&json!({}), q),
            Err(FetchError::Malformed(_))
        ));
    }

    #[test]
    fn parses_intro_and_redirects() {
        let body = json!({"batchcomplete": true, "query": {"pages": [{
            "pageid": 1, "title": "Mississippi River",
            "extract": "The Mississippi River is the second-longest river.\nSecond paragraph."
        }]}});
        let intro = parse_intro(&body, "Mississippi River").unwrap();
        assert!(!intro.is_redirect);
        assert_eq!(
            intro.first_paragraph,
            "The Mississippi River is the second-longest river."
        );
        assert_eq!(intro.resolved_title, None);

        let redirect = json!({"query": {
            "redirects": [{"from": "Dong Nguyen", "to": ".Gears"}],
            "pages": [{"pageid": 2, "title": ".Gears", "extract": ".Gears is a game studio."}]
        }});
        let intro = parse_intro(&redirect, "Dong Nguyen").unwrap();
        assert!(intro.is_redirect);
        assert_eq!(intro.resolved_title.as_deref(), Some(".Gears"));

        let normalized = json!({"query": {
            "normalized": [{"from": "mississippi River", "to": "Mississippi River"}],
            "pages": [{"title": "Mississippi River", "extract": "Text."}]
        }});
        assert!(
            !parse_intro(&normalized, "mississippi River")
                .unwrap()
                .is_redirect
        );

        let missing = json!({"query": {"pages": [{"title": "Nope", "missing": true}]}});
        assert!(matches!(
            parse_intro(&missing, "Nope"),
            Err(FetchError::NotFound(_))
        ));
        assert!(matches!(
            parse_intro(&json!({"x": 1}), "Nope"),
            Err(FetchError::Malformed(_))
        ));
    }

    #[test]
    fn fixture_source_answers_offline() {
        let src = FixtureSource::new(
            [EntityRecord {
                qid: "Q1497".parse().unwrap(),
                label: "Mississippi River".into(),
                description: "river system in North America".into(),
                instances: vec!["river".into()],
                sitelink_title: Some("Mississippi River".into()),
            }],
            [ArticleIntro {
                title: "Mississippi River".into(),
                first_paragraph: "The Mississippi River is ...".into(),
                is_redirect: false,
                resolved_title: None,
            }],
        );
        assert_eq!(
            src.fetch_entity_str("Q1497").unwrap().label,
            "Mississippi River"
        );
        assert!(matches!(
            src.fetch_entity_str("Q0"),
            Err(FetchError::NotFound(_))
        ));
        assert!(matches!(
            src.fetch_entity_str("Q2"),
            Err(FetchError::NotFound(_))
        ));
        assert!(matches!(
            src.fetch_article_intro(""),
            Err(FetchError::NotFound(_))
        ));
        assert_eq!(src.id_universe(), IdUniverse::Finite(vec![1497]));
    }

    #[test]
    fn rate_limiter_spaces_requests() {
        let limiter = RateLimiter::new(200.0);
        let start = Instant::now();
        for _ in 0..5 {
            limiter.wait();
        }
        // first slot is immediate, the other four are 5 ms apart
        assert!(start.elapsed() >= Duration::from_millis(19));
    }
}
