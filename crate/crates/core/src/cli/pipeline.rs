use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::Context;
use rayon::prelude::*;

use super::config::{ProviderKind, ToolConfig};
use crate::augment::{
    build_prompt, filter_warnings, parse_response, resolve_columns, InFlightLimiter, LlmResponse, OfflineProvider,
    Provider, ProviderError, ProviderRequest, RemoteProvider, ReplayProvider,
};
use crate::baseline::Baseline;
use crate::cache::{cache_key, CacheEntry, Lookup, ProviderIdentity, ResponseCache};
use crate::extractor::{ImmutableTypes, SourceModel};
use crate::finding::{Descriptor, Finding};
use crate::naming::SegmentationLexicon;
use crate::report::{merge_findings, AuditRecord, RunReport};

/// A source file and the path it is reported under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub display: String,
    pub path: PathBuf,
}

fn display_path(p: &Path) -> String {
    let s = p.to_string_lossy().replace('\\', "/");
    s.strip_prefix("./").map(str::to_string).unwrap_or(s)
}

fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> io::Result<()> {
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            walk(&path, out)?;
        } else if path.extension().is_some_and(|e| e == "java") {
            out.push(path);
        }
    }
    Ok(())
}

/// Expands files and directories into `.java` files, sorted by display path
/// and deduplicated.
pub fn collect_sources(paths: &[PathBuf]) -> io::Result<Vec<SourceFile>> {
    let mut found = Vec::new();
    for p in paths {
        if p.is_dir() {
            walk(p, &mut found)?;
        } else if p.is_file() {
            found.push(p.clone());
        } else {
            return Err(io::Error::new(
                io::ErrorKind::NotFound,
                format!("{}: no such file or directory", p.display()),
            ));
        }
    }
    let mut files: Vec<SourceFile> = found
        .into_iter()
        .map(|path| SourceFile {
            display: display_path(&path),
            path,
        })
        .collect();
    files.sort_by(|a, b| a.display.cmp(&b.display));
    files.dedup_by(|a, b| a.display == b.display);
    Ok(files)
}

/// Result of analyzing one file.
#[derive(Debug, Clone, PartialEq)]
pub struct FileOutcome {
    pub findings: Vec<Finding>,
    pub audit: Option<AuditRecord>,
    /// Provider response text, when a provider ran.
    pub raw_output: Option<String>,
}

pub struct Pipeline {
    baseline: Baseline,
    provider: Option<Arc<dyn Provider>>,
    identity: ProviderIdentity,
    cache: Option<ResponseCache>,
    show_warnings: bool,
    allowlist: Arc<ImmutableTypes>,
    limiter: InFlightLimiter,
    jobs: usize,
}

pub fn load_lexicon(cfg: &ToolConfig) -> anyhow::Result<Arc<SegmentationLexicon>> {
    Ok(Arc::new(match &cfg.lexicon_path {
        Some(p) => {
            SegmentationLexicon::bundled_with_file(p).with_context(|| format!("loading lexicon {}", p.display()))?
        }
        None => SegmentationLexicon::bundled(),
    }))
}

pub fn load_allowlist(cfg: &ToolConfig) -> anyhow::Result<Arc<ImmutableTypes>> {
    Ok(Arc::new(match &cfg.allowlist_path {
        Some(p) => ImmutableTypes::with_file(p).with_context(|| format!("loading allowlist {}", p.display()))?,
        None => ImmutableTypes::bundled(),
    }))
}

impl Pipeline {
    /// Builds the provider named by the configuration. A disabled check
    /// yields a baseline-only pipeline that never constructs a provider.
    pub fn from_config(cfg: &ToolConfig) -> anyhow::Result<Self> {
        let allowlist = load_allowlist(cfg)?;
        let provider: Option<Arc<dyn Provider>> = if !cfg.provider.enabled {
            None
        } else {
            Some(match cfg.provider_kind {
                ProviderKind::Offline => Arc::new(OfflineProvider::new(load_lexicon(cfg)?, allowlist.clone())),
                ProviderKind::Replay => {
                    let dir = cfg
                        .replay_dir
                        .clone()
                        .context("replay provider needs a fixture directory")?;
                    Arc::new(ReplayProvider::new(dir))
                }
                ProviderKind::Remote => Arc::new(RemoteProvider::new(cfg.provider.clone())),
            })
        };
        Self::with_provider(cfg, provider)
    }

    pub fn with_provider(cfg: &ToolConfig, provider: Option<Arc<dyn Provider>>) -> anyhow::Result<Self> {
        Ok(Pipeline {
            baseline: Baseline::new(&cfg.baseline)?,
            provider,
            identity: ProviderIdentity::from(&cfg.provider),
            cache: Some(ResponseCache::new(&cfg.cache_dir)),
            show_warnings: cfg.provider.show_warnings,
            allowlist: load_allowlist(cfg)?,
            limiter: InFlightLimiter::new(cfg.max_in_flight),
            jobs: 0,
        })
    }

    pub fn without_cache(mut self) -> Self {
        self.cache = None;
        self
    }

    /// Worker threads; 0 uses one per CPU.
    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    fn invoke(&self, display: &str, source: &str, bytes: &[u8]) -> Result<LlmResponse, ProviderError> {
        let provider = self.provider.as_ref().expect("provider present");
        let prompt = build_prompt(source);
        let key = cache_key(bytes, &prompt.prompt_version, &self.identity);
        let cache = self.cache.as_ref().filter(|_| provider.cacheable());
        if let Some(cache) = cache {
            let started = Instant::now();
            if let Lookup::Hit(entry) = cache.get(&key) {
                return Ok(LlmResponse {
                    raw_text: entry.raw_text,
                    input_tokens: entry.input_tokens,
                    output_tokens: entry.output_tokens,
                    latency_seconds: started.elapsed().as_secs_f64(),
                    from_cache: true,
                });
            }
        }
        let request = ProviderRequest {
            file_name: display,
            source,
            prompt: &prompt,
            cache_key: &key,
        };
        let response = {
            let _permit = self.limiter.acquire();
            provider.complete(&request)?
        };
        if let Some(cache) = cache {
            let entry = CacheEntry::from_response(&key, &response, &self.identity.model, &prompt.prompt_version);
            if let Err(e) = cache.put(&entry) {
                log::warn!("{display}: could not store cache entry: {e}");
            }
        }
        Ok(response)
    }

    /// Extract, run baseline checks, consult the provider, merge and filter.
    /// With a provider, capitalization is judged by the provider alone, so
    /// baseline abbreviation findings are dropped.
    pub fn analyze(&self, display: &str, bytes: &[u8]) -> Result<FileOutcome, ProviderError> {
        let source = String::from_utf8_lossy(bytes);
        let model = SourceModel::parse(&source, &self.allowlist);
        if model.malformed {
            log::warn!("{display}: source did not fully parse; some declarations may be missed");
        }
        let baseline = self.baseline.check(&model);
        let Some(provider) = &self.provider else {
            return Ok(FileOutcome {
                findings: filter_warnings(baseline, self.show_warnings),
                audit: None,
                raw_output: None,
            });
        };
        let response = self.invoke(display, &source, bytes)?;
        let baseline: Vec<Finding> = baseline
            .into_iter()
            .filter(|f| f.descriptor != Descriptor::AbbreviationAsWordInName)
            .collect();
        let (mut augmented, diagnostics) = parse_response(&response.raw_text);
        for d in &diagnostics {
            log::warn!("{display}: response line {} ignored: {}", d.response_line, d.reason);
        }
        let line_count = source.lines().count().max(1) as u32;
        augmented.retain(|f| {
            let ok = f.line <= line_count;
            if !ok {
                log::warn!("{display}: response names line {} beyond end of file", f.line);
            }
            ok
        });
        let origin = provider.origin();
        for f in &mut augmented {
            f.origin = origin;
        }
        resolve_columns(&mut augmented, &model);
        let merged = merge_findings(baseline, augmented);
        Ok(FileOutcome {
            findings: filter_warnings(merged, self.show_warnings),
            audit: Some(AuditRecord {
                latency_seconds: response.latency_seconds,
                input_tokens: response.input_tokens,
                output_tokens: response.output_tokens,
                from_cache: response.from_cache,
                diagnostics: diagnostics.len(),
            }),
            raw_output: Some(response.raw_text),
        })
    }

    /// Analyzes every file in parallel; per-file failures are recorded, not fatal.
    pub fn run(&self, files: &[SourceFile]) -> (RunReport, BTreeMap<String, String>) {
        let analyze = || {
            files
                .par_iter()
                .map(|f| {
                    let outcome = std::fs::read(&f.path)
                        .map_err(ProviderError::Io)
                        .and_then(|bytes| self.analyze(&f.display, &bytes));
                    (f.display.clone(), outcome)
                })
                .collect::<Vec<_>>()
        };
        let results = match rayon::ThreadPoolBuilder::new().num_threads(self.jobs).build() {
            Ok(pool) => pool.install(analyze),
            Err(_) => analyze(),
        };
        let mut per_file = BTreeMap::new();
        let mut audit = BTreeMap::new();
        let mut failures = BTreeMap::new();
        let mut raw = BTreeMap::new();
        for (display, outcome) in results {
            match outcome {
                Ok(o) => {
                    if let Some(a) = o.audit {
                        audit.insert(display.clone(), a);
                    }
                    if let Some(r) = o.raw_output {
                        raw.insert(display.clone(), r);
                    }
                    per_file.insert(display, o.findings);
                }
                Err(e) => {
                    log::error!("{display}: {e}");
                    failures.insert(display, e.to_string());
                }
            }
        }
        (RunReport::new(per_file, audit, failures), raw)
    }
}
