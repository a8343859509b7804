//! Flat `key = value` run configuration with dotted section prefixes.
//! Unknown keys are rejected so typos cannot silently change a run.

use std::collections::BTreeMap;
use std::path::Path;

use membrane::geometry::DomainSpec;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

const KNOWN_KEYS: &[&str] = &[
    "domain.shape",
    "domain.cx",
    "domain.cy",
    "domain.radius",
    "domain.half_width",
    "domain.half_height",
    "domain.a",
    "domain.b",
    "domain.half_length",
    "domain.vertices",
    "grid.n",
    "grid.nx",
    "grid.ny",
    "grid.margin_frac",
    "solver.alpha",
    "solver.area",
    "solver.area_frac",
    "solver.area_list",
    "solver.area_frac_list",
    "solver.init",
    "solver.seed",
    "solver.seeds",
    "solver.tol",
    "solver.max_iter",
    "eigen.tol",
    "weiss.gamma",
    "weiss.tol_w",
    "weiss.radii_cells",
    "weiss.center",
    "weiss.mode",
    "blowup.r_max_cells",
    "blowup.levels",
    "blowup.center",
    "diag.tau",
    "diag.eps_list",
    "diag.x0_list",
    "diag.slope_probe",
    "diag.input_dir",
    "exact.kind",
    "exact.f0",
    "exact.g0",
    "exact.a",
    "exact.n",
    "exact.radii",
    "output.dir",
];

/// Parsed run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&raw)
    }

    pub fn parse(raw: &str) -> Result<RunConfig, ConfigError> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in raw.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(ConfigError(format!("unknown key '{key}'")));
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(ConfigError(format!("duplicate key '{key}'")));
            }
        }
        Ok(RunConfig { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn f64_at(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(key)
            .map(|s| s.parse::<f64>().map_err(|_| ConfigError(format!("{key}: bad number '{s}'"))))
            .transpose()
    }

    pub fn f64_req(&self, key: &str) -> Result<f64, ConfigError> {
        self.f64_at(key)?.ok_or_else(|| ConfigError(format!("missing required key '{key}'")))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64_at(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s.parse().map_err(|_| ConfigError(format!("{key}: bad integer '{s}'"))),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s.parse().map_err(|_| ConfigError(format!("{key}: bad integer '{s}'"))),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.get(key)
            .map(|s| {
                s.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| ConfigError(format!("{key}: bad number '{t}'")))
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn u64_list(&self, key: &str) -> Result<Option<Vec<u64>>, ConfigError> {
        self.get(key)
            .map(|s| {
                s.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<u64>()
                            .map_err(|_| ConfigError(format!("{key}: bad integer '{t}'")))
                    })
                    .collect()
            })
            .transpose()
    }

    /// `"x,y; x,y; ..."` point list.
    pub fn points(&self, key: &str) -> Result<Option<Vec<(f64, f64)>>, ConfigError> {
        self.get(key)
            .map(|s| {
                s.split(';')
                    .map(|pair| {
                        let mut it = pair.split(',').map(|t| t.trim().parse::<f64>());
                        match (it.next(), it.next()) {
                            (Some(Ok(x)), Some(Ok(y))) => Ok((x, y)),
                            _ => Err(ConfigError(format!("{key}: bad point '{pair}'"))),
                        }
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn domain(&self) -> Result<DomainSpec, ConfigError> {
        let shape = self
            .get("domain.shape")
            .ok_or_else(|| ConfigError("missing required key 'domain.shape'".into()))?;
        let cx = self.f64_or("domain.cx", 0.0)?;
        let cy = self.f64_or("domain.cy", 0.0)?;
        let build = match shape {
            "disk" => DomainSpec::disk(cx, cy, self.f64_req("domain.radius")?),
            "rectangle" => DomainSpec::rectangle(
                cx,
                cy,
                self.f64_req("domain.half_width")?,
                self.f64_req("domain.half_height")?,
            ),
            "ellipse" => DomainSpec::ellipse(cx, cy, self.f64_req("domain.a")?, self.f64_req("domain.b")?),
            "stadium" => DomainSpec::stadium(
                cx,
                cy,
                self.f64_req("domain.half_length")?,
                self.f64_req("domain.radius")?,
            ),
            "polygon" => {
                let pts = self
                    .points("domain.vertices")?
                    .ok_or_else(|| ConfigError("missing required key 'domain.vertices'".into()))?;
                DomainSpec::polygon(pts)
            }
            other => return Err(ConfigError(format!("domain.shape: unknown shape '{other}'"))),
        };
        build.map_err(|e| ConfigError(format!("domain: {e}")))
    }

    /// Grid node counts and bbox with margin around the shape.
    pub fn grid_dims(&self, spec: &DomainSpec) -> Result<((f64, f64, f64, f64), usize, usize), ConfigError> {
        let n = self.usize_or("grid.n", 256)?;
        let nx = self.usize_or("grid.nx", n)?;
        let ny = self.usize_or("grid.ny", n)?;
        let margin_frac = self.f64_or("grid.margin_frac", 0.04)?;
        let (xmin, xmax, ymin, ymax) = spec.bbox();
        let m = margin_frac * (xmax - xmin).max(ymax - ymin);
        Ok(((xmin - m, xmax + m, ymin - m, ymax + m), nx, ny))
    }

    /// FNV-1a 64 hash of the canonicalized entries, for the manifest.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for (k, v) in &self.entries {
            for b in k.bytes().chain([b'='].into_iter()).chain(v.bytes()).chain([b'\n']) {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_unknown_keys() {
        let ok = RunConfig::parse("domain.shape = disk\ndomain.radius = 1 # unit\n\n").unwrap();
        assert_eq!(ok.get("domain.shape"), Some("disk"));
        assert!(ok.domain().is_ok());
        let err = RunConfig::parse("domain.shap = disk\n").unwrap_err();
        assert!(err.0.contains("domain.shap"), "{}", err.0);
        assert!(RunConfig::parse("domain.shape = disk\ndomain.shape = disk\n").is_err());
    }

    #[test]
    fn hash_is_order_insensitive_and_value_sensitive() {
        let a = RunConfig::parse("solver.alpha = 10\ndomain.shape = disk\n").unwrap();
        let b = RunConfig::parse("domain.shape = disk\nsolver.alpha = 10\n").unwrap();
        let c = RunConfig::parse("domain.shape = disk\nsolver.alpha = 11\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }
}
