//! Download client for the SuiteSparse Matrix Collection.
//!
//! Archives are fetched as gzipped tarballs, the `.mtx` member is
//! extracted and parsed once, and the result is cached under
//! `<cache_dir>/<group>/<name>/<name>.mtx`. A cache hit never touches the
//! network.

use std::fs::{self, File};
use std::io::{self, BufReader, Read};
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;

use crate::error::{Error, Result};
use crate::matrix::mtx::load_matrix_market;

pub const DEFAULT_URL_TEMPLATE: &str =
    "https://suitesparse-collection-website.herokuapp.com/MM/{group}/{name}.tar.gz";

#[derive(Debug, Clone)]
pub struct FetchConfig {
    /// URL with `{group}` and `{name}` placeholders. `file://` URLs are read
    /// from the local filesystem.
    pub url_template: String,
    pub cache_dir: PathBuf,
}

impl FetchConfig {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        Self {
            url_template: DEFAULT_URL_TEMPLATE.to_string(),
            cache_dir: cache_dir.into(),
        }
    }

    pub fn url_for(&self, group: &str, name: &str) -> String {
        self.url_template
            .replace("{group}", group)
            .replace("{name}", name)
    }

    pub fn cached_path(&self, group: &str, name: &str) -> PathBuf {
        self.cache_dir
            .join(group)
            .join(name)
            .join(format!("{name}.mtx"))
    }
}

fn check_component(s: &str) -> Result<()> {
    if s.is_empty() || s.contains(['/', '\\']) || s == "." || s == ".." {
        return Err(Error::Download {
            url: s.to_string(),
            msg: "group and name must be plain path components".into(),
        });
    }
    Ok(())
}

/// Returns the path of the cached `.mtx` file, downloading it first if needed.
pub fn fetch_suitesparse(group: &str, name: &str, cfg: &FetchConfig) -> Result<PathBuf> {
    check_component(group)?;
    check_component(name)?;
    let target = cfg.cached_path(group, name);
    if target.is_file() {
        return Ok(target);
    }

    let url = cfg.url_for(group, name);
    fs::create_dir_all(&cfg.cache_dir)?;
    let staging = cfg.cache_dir.join(format!(
        ".staging-{group}-{name}-{}.mtx",
        std::process::id()
    ));
    let result = download_and_extract(&url, name, &staging)
        .and_then(|()| load_matrix_market(&staging).map(|_| ()));
    if let Err(e) = result {
        let _ = fs::remove_file(&staging);
        return Err(e);
    }
    fs::create_dir_all(target.parent().expect("cached path has a parent"))?;
    fs::rename(&staging, &target)?;
    Ok(target)
}

fn open_url(url: &str) -> Result<Box<dyn Read>> {
    if let Some(path) = url.strip_prefix("file://") {
        let file = File::open(path).map_err(|e| Error::Download {
            url: url.to_string(),
            msg: e.to_string(),
        })?;
        return Ok(Box::new(BufReader::new(file)));
    }
    let response = ureq::get(url).call().map_err(|e| Error::Download {
        url: url.to_string(),
        msg: e.to_string(),
    })?;
    Ok(Box::new(response.into_body().into_reader()))
}

/// Streams the tarball and writes its `.mtx` member to `dest`. A member
/// named `<name>.mtx` wins over other `.mtx` members (auxiliary vectors).
fn download_and_extract(url: &str, name: &str, dest: &Path) -> Result<()> {
    let reader = open_url(url)?;
    let mut archive = tar::Archive::new(GzDecoder::new(reader));
    let wanted = format!("{name}.mtx");
    let mut fallback_written = false;
    let entries = archive.entries().map_err(|e| archive_err(url, e))?;
    for entry in entries {
        let mut entry = entry.map_err(|e| archive_err(url, e))?;
        let path = entry.path().map_err(|e| archive_err(url, e))?.into_owned();
        let file_name = path.file_name().and_then(|f| f.to_str()).unwrap_or("");
        if !file_name.ends_with(".mtx") {
            continue;
        }
        if file_name == wanted {
            io::copy(&mut entry, &mut File::create(dest)?)?;
            return Ok(());
        }
        if !fallback_written {
            io::copy(&mut entry, &mut File::create(dest)?)?;
            fallback_written = true;
        }
    }
    if fallback_written {
        Ok(())
    } else {
        Err(Error::MissingMtxMember(PathBuf::from(url)))
    }
}

fn archive_err(url: &str, e: io::Error) -> Error {
    Error::Download {
        url: url.to_string(),
        msg: format!("unreadable archive: {e}"),
    }
}
