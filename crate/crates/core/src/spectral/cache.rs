use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{EigenSystem, SpectralError, SystemRecord};

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "TRAPFPT_CACHE_DIR";

/// Directory of JSON eigen-system files, one per
/// (κ to 12 significant digits, count, root_tol, quad_tol).
#[derive(Debug, Clone)]
pub struct EigenCache {
    dir: PathBuf,
}

impl EigenCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        EigenCache { dir: dir.into() }
    }

    /// The directory named by `TRAPFPT_CACHE_DIR`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).map(|d| EigenCache::new(PathBuf::from(d)))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, kappa: f64, count: usize, root_tol: f64, quad_tol: f64) -> PathBuf {
        self.dir
            .join(format!("eigen_k{kappa:.11e}_n{count}_r{root_tol:e}_q{quad_tol:e}.json"))
    }

    /// `Ok(None)` when no file exists; `CacheCorrupt` when one exists but does
    /// not parse or was built for different parameters.
    pub fn load(&self, kappa: f64, count: usize, root_tol: f64, quad_tol: f64) -> Result<Option<EigenSystem>, SpectralError> {
        let path = self.path_for(kappa, count, root_tol, quad_tol);
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(err) if err.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(err) => return Err(err.into()),
        };
        let corrupt = |reason: String| SpectralError::CacheCorrupt {
            path: path.display().to_string(),
            reason,
        };
        let record: SystemRecord = serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;
        let same_kappa = format!("{:.11e}", record.kappa) == format!("{kappa:.11e}");
        if !same_kappa || record.count != count || record.root_tol != root_tol || record.quad_tol != quad_tol {
            return Err(corrupt("parameters do not match the file name".into()));
        }
        let ordered = record.modes.iter().enumerate().all(|(i, m)| m.n == i + 1)
            && record.modes.windows(2).all(|w| w[0].alpha < w[1].alpha);
        if record.modes.len() != count || !ordered || record.modes.iter().any(|m| !(m.norm > 0.0)) {
            return Err(corrupt("mode table is malformed".into()));
        }
        EigenSystem::from_record(record).map(Some)
    }

    /// Writes through a temporary file and an atomic rename.
    pub fn store(&self, system: &EigenSystem) -> Result<PathBuf, SpectralError> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(system.kappa, system.len(), system.root_tol, system.quad_tol);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        let json = serde_json::to_string_pretty(&system.to_record()).expect("records always serialize");
        tmp.write_all(json.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(path)
    }
}
