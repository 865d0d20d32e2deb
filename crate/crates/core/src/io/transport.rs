//! Fetching curve data over HTTP, with a verbatim on-disk cache.
//!
//! The network is behind the `Transport` trait so tests inject canned or
//! recording transports; offline mode provably never constructs a request.
//! Payloads are cached byte-for-byte next to a digest sidecar, and cache
//! writes go through write-temp-then-rename so a crash cannot leave a
//! half-written payload behind.

use crate::error::{Error, Result};
use crate::frey::CurveTable;
use crate::io::curves::parse_curve_payload;
use crate::io::report::sha256_hex;
use std::collections::BTreeSet;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_VAR: &str = "SEXTIC_CACHE_DIR";
/// Environment variable overriding the curve-database endpoint.
pub const ENDPOINT_VAR: &str = "SEXTIC_ENDPOINT";

/// A way to issue GET requests.
pub trait Transport {
    fn get(&self, url: &str) -> Result<Vec<u8>>;
}

/// Plain-HTTP JSON GET client.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new() -> Self {
        HttpTransport {
            agent: ureq::AgentBuilder::new()
                .timeout(std::time::Duration::from_secs(30))
                .build(),
        }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new()
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>> {
        let response = self
            .agent
            .get(url)
            .call()
            .map_err(|e| Error::NetworkUnavailable(format!("GET {url}: {e}")))?;
        let mut body = Vec::new();
        response
            .into_reader()
            .read_to_end(&mut body)
            .map_err(|e| Error::NetworkUnavailable(format!("GET {url}: read: {e}")))?;
        Ok(body)
    }
}

/// Never talks to anything; every request is a `NetworkUnavailable`.
pub struct OfflineTransport;

impl Transport for OfflineTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>> {
        Err(Error::NetworkUnavailable(format!("offline mode: refusing to fetch {url}")))
    }
}

/// Serves canned responses by exact URL (tests and the fixture generator).
#[derive(Default)]
pub struct StaticTransport {
    responses: std::collections::BTreeMap<String, Vec<u8>>,
}

impl StaticTransport {
    pub fn with(mut self, url: impl Into<String>, body: Vec<u8>) -> Self {
        self.responses.insert(url.into(), body);
        self
    }
}

impl Transport for StaticTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>> {
        self.responses
            .get(url)
            .cloned()
            .ok_or_else(|| Error::NetworkUnavailable(format!("no canned response for {url}")))
    }
}

/// Wraps another transport and logs every URL it is asked for, so a test
/// can assert the network was (or was not) touched.
pub struct RecordingTransport<T> {
    inner: T,
    log: Mutex<Vec<String>>,
}

impl<T> RecordingTransport<T> {
    pub fn new(inner: T) -> Self {
        RecordingTransport { inner, log: Mutex::new(Vec::new()) }
    }

    pub fn requests(&self) -> Vec<String> {
        self.log.lock().expect("transport log").clone()
    }
}

impl<T: Transport> Transport for RecordingTransport<T> {
    fn get(&self, url: &str) -> Result<Vec<u8>> {
        self.log.lock().expect("transport log").push(url.to_string());
        self.inner.get(url)
    }
}

/// Where and how to fetch.
pub struct FetchOptions<'a> {
    pub cache_dir: PathBuf,
    pub endpoint: String,
    pub offline: bool,
    pub transport: &'a dyn Transport,
}

impl<'a> FetchOptions<'a> {
    /// Offline against a cache directory only.
    pub fn offline(cache_dir: impl Into<PathBuf>) -> FetchOptions<'static> {
        FetchOptions {
            cache_dir: cache_dir.into(),
            endpoint: String::new(),
            offline: true,
            transport: &OfflineTransport,
        }
    }
}

/// Builds the request URL for a conductor list.
fn curves_url(endpoint: &str, conductors: &BTreeSet<u64>) -> String {
    let list: Vec<String> = conductors.iter().map(|c| c.to_string()).collect();
    format!("{}/curves?conductors={}", endpoint.trim_end_matches('/'), list.join(","))
}

fn cache_paths(cache_dir: &Path, url: &str) -> (PathBuf, PathBuf) {
    let key = &sha256_hex(url.as_bytes())[..16];
    (cache_dir.join(format!("curves-{key}.json")), cache_dir.join(format!("curves-{key}.sha256")))
}

/// Fetches the complete curve lists for a set of conductors.
///
/// Cache-first: a cached payload (digest-verified) is used without touching
/// the network at all, so repeated runs are deterministic and offline runs
/// work from a warm cache. On a cache miss the transport is asked, the
/// verbatim payload is stored with its digest, and only then parsed.
pub fn fetch_curves(conductors: &BTreeSet<u64>, opts: &FetchOptions) -> Result<CurveTable> {
    if conductors.is_empty() {
        return Ok(CurveTable::default());
    }
    let url = curves_url(&opts.endpoint, conductors);
    let (payload_path, digest_path) = cache_paths(&opts.cache_dir, &url);
    if let Some(bytes) = read_cache(&payload_path, &digest_path)? {
        return parse_curve_payload(&bytes, &payload_path.display().to_string());
    }
    if opts.offline {
        return Err(Error::NetworkUnavailable(format!(
            "offline mode: no cached copy of {url} under {}",
            opts.cache_dir.display()
        )));
    }
    let bytes = opts.transport.get(&url)?;
    write_cache(&payload_path, &digest_path, &bytes)?;
    parse_curve_payload(&bytes, &url)
}

fn read_cache(payload_path: &Path, digest_path: &Path) -> Result<Option<Vec<u8>>> {
    let bytes = match std::fs::read(payload_path) {
        Ok(bytes) => bytes,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let expected = match std::fs::read_to_string(digest_path) {
        Ok(text) => text.trim().to_string(),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::SchemaMismatch(format!(
                "cached payload {} has no digest sidecar",
                payload_path.display()
            )))
        }
        Err(e) => return Err(e.into()),
    };
    let actual = sha256_hex(&bytes);
    if actual != expected {
        return Err(Error::SchemaMismatch(format!(
            "cached payload {} fails its digest (stored {expected}, computed {actual})",
            payload_path.display()
        )));
    }
    Ok(Some(bytes))
}

/// Atomic cache write: temp file in the same directory, then rename.
fn write_cache(payload_path: &Path, digest_path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = payload_path.parent().expect("cache paths have a parent");
    std::fs::create_dir_all(dir)?;
    let digest = sha256_hex(bytes);
    for (path, content) in [(payload_path, bytes), (digest_path, digest.as_bytes())] {
        let tmp = path.with_extension(format!("tmp-{}", std::process::id()));
        std::fs::write(&tmp, content)?;
        std::fs::rename(&tmp, path)?;
    }
    Ok(())
}
