//! On-disk pattern-system cache.
//!
//! A cache file is one JSON header line followed by the JSON body. The
//! header records the format version, the tube, the build flags and the
//! SHA-256 digest of the body bytes, so a stale or damaged file is rejected
//! before it is parsed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tubepoly::patterns::DEFAULT_PATTERN_CAP;
use tubepoly::transfer::{build_transfer_matrix, strongly_connected_components};
use tubepoly::{PatternSystem, StateSpace, TubeSpec};

pub const FORMAT_VERSION: u32 = 1;
pub const CACHE_DIR_ENV: &str = "TUBEPOLY_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheHeader {
    pub format_version: u32,
    pub l: u32,
    pub m: u32,
    pub full_only: bool,
    pub state_space: StateSpace,
    pub pattern_count: usize,
    pub digest: String,
}

#[derive(Serialize, Deserialize)]
struct CacheBody {
    system: PatternSystem,
    /// Strongly connected component of every pattern.
    scc_labels: Vec<u32>,
}

/// Cache directory from the flag, falling back to the environment.
pub fn resolve_dir(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

pub fn file_name(spec: TubeSpec, full_only: bool, space: StateSpace) -> String {
    let class = if full_only { "full" } else { "general" };
    let space = match space {
        StateSpace::Realizable => "realizable",
        StateSpace::AllMatchings => "all-matchings",
    };
    format!("{spec}-{class}-{space}.v{FORMAT_VERSION}.json")
}

pub fn save(path: &Path, system: &PatternSystem) -> Result<()> {
    let scc = strongly_connected_components(&build_transfer_matrix(system));
    let body = serde_json::to_vec(&CacheBody {
        system: system.clone(),
        scc_labels: scc.component,
    })?;
    let header = CacheHeader {
        format_version: FORMAT_VERSION,
        l: system.spec.l(),
        m: system.spec.m(),
        full_only: system.full_only,
        state_space: system.state_space,
        pattern_count: system.len(),
        digest: hex::encode(Sha256::digest(&body)),
    };
    let dir = path.parent().context("cache path has no parent directory")?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    {
        let mut file = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        serde_json::to_writer(&mut file, &header)?;
        file.write_all(b"\n")?;
        file.write_all(&body)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<(CacheHeader, PatternSystem)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let split = bytes
        .iter()
        .position(|&b| b == b'\n')
        .with_context(|| format!("{}: missing cache header", path.display()))?;
    let header: CacheHeader = serde_json::from_slice(&bytes[..split])
        .with_context(|| format!("{}: malformed cache header", path.display()))?;
    if header.format_version != FORMAT_VERSION {
        bail!(
            "{}: cache format version {} does not match {}",
            path.display(),
            header.format_version,
            FORMAT_VERSION
        );
    }
    let body = &bytes[split + 1..];
    if hex::encode(Sha256::digest(body)) != header.digest {
        bail!("{}: cache digest mismatch", path.display());
    }
    let body: CacheBody = serde_json::from_slice(body)?;
    let system = body.system;
    if system.spec.l() != header.l
        || system.spec.m() != header.m
        || system.full_only != header.full_only
        || system.state_space != header.state_space
        || system.len() != header.pattern_count
        || body.scc_labels.len() != system.len()
    {
        bail!("{}: cache header does not describe its body", path.display());
    }
    Ok((header, system))
}

/// Loads the system from `dir` when present, otherwise builds and stores it.
pub fn load_or_build(
    dir: Option<&Path>,
    spec: TubeSpec,
    full_only: bool,
    space: StateSpace,
) -> Result<PatternSystem> {
    let build = || PatternSystem::build_with(spec, full_only, space, DEFAULT_PATTERN_CAP);
    let Some(dir) = dir else {
        return Ok(build()?);
    };
    let path = dir.join(file_name(spec, full_only, space));
    if path.exists() {
        let (_, system) = load(&path)?;
        if system.spec != spec {
            bail!("{}: cached tube {} is not {spec}", path.display(), system.spec);
        }
        return Ok(system);
    }
    let system = build()?;
    save(&path, &system)?;
    Ok(system)
}
