//! Output writers: CSV, 8-bit PGM rasters, and the run manifest.

use std::io::Write;
use std::path::{Path, PathBuf};

use membrane::geometry::{g17, DomainMask, ScalarField};

pub struct OutDir {
    pub path: PathBuf,
    /// `(file, min, max)` scaling records for every PGM written.
    pub pgm_scales: Vec<(String, f64, f64)>,
}

impl OutDir {
    pub fn create(path: &Path) -> std::io::Result<OutDir> {
        std::fs::create_dir_all(path)?;
        Ok(OutDir { path: path.to_path_buf(), pgm_scales: Vec::new() })
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.path.join(name)
    }

    pub fn write_text(&self, name: &str, content: &str) -> std::io::Result<()> {
        std::fs::write(self.file(name), content)
    }

    /// Min-max scaled binary PGM; the scale is recorded for the manifest.
    pub fn write_pgm(&mut self, name: &str, field: &ScalarField) -> std::io::Result<()> {
        let g = field.grid();
        let (mn, mx) = field.min_max_active();
        let span = if mx > mn { mx - mn } else { 1.0 };
        let mut data = Vec::with_capacity(g.nx * g.ny + 64);
        data.extend_from_slice(format!("P5\n{} {}\n255\n", g.nx, g.ny).as_bytes());
        // Top row first so the image is not vertically flipped.
        for j in (0..g.ny).rev() {
            for i in 0..g.nx {
                let v = ((field.at(i, j) - mn) / span * 255.0).clamp(0.0, 255.0);
                data.push(v as u8);
            }
        }
        std::fs::write(self.file(name), data)?;
        self.pgm_scales.push((name.to_string(), mn, mx));
        Ok(())
    }

    /// Region indicator raster (cell weights resampled to nodes).
    pub fn write_mask_pgm(&mut self, name: &str, mask: &DomainMask) -> std::io::Result<()> {
        let field = ScalarField::from_fn(&DomainMask::full(mask.grid().clone()), |_, _| 0.0);
        let g = mask.grid().clone();
        let mut vals = field.values().to_vec();
        for j in 0..g.ny - 1 {
            for i in 0..g.nx - 1 {
                let f = mask.cell_fraction(g.cell_idx(i, j)) / 4.0;
                for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    vals[g.idx(i + di, j + dj)] += f;
                }
            }
        }
        let full = DomainMask::full(g);
        let field = ScalarField::from_values(&full, vals);
        self.write_pgm(name, &field)
    }
}

pub fn fmt(v: f64) -> String {
    g17(v)
}

/// Hand-rolled manifest with a fixed key order, so identical runs produce
/// byte-identical files.
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str, config_hash: u64) -> Manifest {
        let mut m = Manifest { entries: Vec::new() };
        m.push_str("command", command);
        m.push_str("config_hash", &format!("{config_hash:016x}"));
        m.push_str(
            "vminus_convention",
            "W integrand |grad v|^2 + 2(f v+ + g v-), v- = max(-v,0); surface term 2 r^-(n+3) * circle integral of v^2",
        );
        m
    }

    pub fn push_str(&mut self, key: &str, value: &str) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn push_num(&mut self, key: &str, value: f64) {
        self.entries.push((key.to_string(), g17(value)));
    }

    pub fn push_int(&mut self, key: &str, value: i64) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn write(&self, out: &OutDir) -> std::io::Result<()> {
        let file = std::fs::File::create(out.file("manifest.json"))?;
        let mut w = std::io::BufWriter::new(file);
        writeln!(w, "{{")?;
        let mut first = true;
        for (k, v) in &self.entries {
            if !first {
                writeln!(w, ",")?;
            }
            first = false;
            // Numbers that survive a parse round-trip are emitted bare.
            if v.parse::<f64>().is_ok() {
                write!(w, "  \"{k}\": {v}")?;
            } else {
                write!(w, "  \"{k}\": \"{}\"", v.replace('"', "'"))?;
            }
        }
        for (name, mn, mx) in &out.pgm_scales {
            writeln!(w, ",")?;
            write!(w, "  \"pgm_scale_{}\": [{}, {}]", name.replace('.', "_"), g17(*mn), g17(*mx))?;
        }
        writeln!(w, "\n}}")?;
        Ok(())
    }
}
