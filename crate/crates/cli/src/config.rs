//! `key = value` config files merged under command-line flags.

use crate::Opts;
use anyhow::{bail, Context, Result};
use std::collections::HashMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Settings {
    pub max_t: Option<i32>,
    pub max_f: Option<usize>,
    pub max_s: Option<i32>,
    pub module: Option<String>,
    pub target: Option<String>,
    pub algebra: Option<String>,
    pub out: Option<PathBuf>,
    pub compare: Option<String>,
    pub threads: Option<usize>,
    pub cache_dir: Option<PathBuf>,
}

const KEYS: &[&str] = &["max-t", "max-f", "max-s", "module", "target", "algebra", "out", "compare", "threads", "cache-dir"];

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// `_` in keys is read as `-`.
pub fn parse(text: &str) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else { bail!("line {}: expected key = value", n + 1) };
        let k = k.trim().replace('_', "-");
        if !KEYS.contains(&k.as_str()) {
            bail!("line {}: unknown key {k:?}", n + 1);
        }
        out.insert(k, v.trim().trim_matches('"').to_string());
    }
    Ok(out)
}

impl Settings {
    pub fn resolve(opts: &Opts) -> Result<Settings> {
        let file = match &opts.config {
            Some(p) => Self::read(p)?,
            None => HashMap::new(),
        };
        fn num<T: std::str::FromStr>(file: &HashMap<String, String>, k: &str) -> Result<Option<T>> {
            file.get(k).map(|v| v.parse::<T>().ok().with_context(|| format!("config: {k} = {v:?} is not a number"))).transpose()
        }
        let s = Settings {
            max_t: opts.max_t.map_or_else(|| num(&file, "max-t"), |v| Ok(Some(v)))?,
            max_f: opts.max_f.map_or_else(|| num(&file, "max-f"), |v| Ok(Some(v)))?,
            max_s: opts.max_s.map_or_else(|| num(&file, "max-s"), |v| Ok(Some(v)))?,
            threads: opts.threads.map_or_else(|| num(&file, "threads"), |v| Ok(Some(v)))?,
            module: opts.module.clone().or_else(|| file.get("module").cloned()),
            target: opts.target.clone().or_else(|| file.get("target").cloned()),
            algebra: opts.algebra.clone().or_else(|| file.get("algebra").cloned()),
            out: opts.out.clone().or_else(|| file.get("out").map(PathBuf::from)),
            compare: opts.compare.clone().or_else(|| file.get("compare").cloned()),
            cache_dir: opts.cache_dir.clone().or_else(|| file.get("cache-dir").map(PathBuf::from)),
        };
        if s.max_t.is_some_and(|t| t < 0) || s.max_s.is_some_and(|t| t < 0) || s.threads == Some(0) {
            bail!("bounds and thread counts must be positive");
        }
        Ok(s)
    }

    fn read(path: &Path) -> Result<HashMap<String, String>> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        parse(&text).with_context(|| format!("config {}", path.display()))
    }
}
