//! File writers shared by the commands.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Collects the files written by one run.
pub struct Sink {
    dir: PathBuf,
    stem: String,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, stem: &str) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Sink { dir: dir.to_path_buf(), stem: stem.to_string(), written: Vec::new() })
    }

    /// Opens `<stem><suffix>` in the output directory and hands it to `body`.
    pub fn file(&mut self, suffix: &str, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
        let path = self.dir.join(format!("{}{suffix}", self.stem));
        let io_err = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
        let mut w = BufWriter::new(File::create(&path).map_err(io_err)?);
        body(&mut w).and_then(|_| w.flush()).map_err(io_err)?;
        self.written.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, suffix: &str, value: &T) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        self.file(suffix, |w| writeln!(w, "{text}"))
    }
}

/// Writes a header line and one comma-separated row per record.
pub fn write_table(w: &mut dyn Write, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> std::io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                w.write_all(b",")?;
            }
            write!(w, "{v}")?;
            first = false;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Binary PGM of a small-integer label grid, `values[iy][ix]`, largest y on
/// top; labels spread evenly over the grey range.
pub fn write_label_pgm(w: &mut dyn Write, values: &[Vec<u8>], max_label: u8) -> std::io::Result<()> {
    let rows = values.len();
    let cols = values.first().map_or(0, Vec::len);
    write!(w, "P5\n{cols} {rows}\n255\n")?;
    let scale = 254.0 / f64::from(max_label.max(1));
    for row in values.iter().rev() {
        let bytes: Vec<u8> = row.iter().map(|&v| (f64::from(v) * scale).round() as u8).collect();
        w.write_all(&bytes)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let mut buf = Vec::new();
        write_table(&mut buf, &["a", "b"], [vec![1.0, 0.5], vec![-2.0, f64::NAN]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,0.5\n-2,NaN\n");
    }

    #[test]
    fn pgm_is_flipped_and_scaled() {
        let mut buf = Vec::new();
        write_label_pgm(&mut buf, &[vec![1, 2], vec![3, 3]], 3).unwrap();
        let header = b"P5\n2 2\n255\n";
        assert_eq!(&buf[..header.len()], header);
        assert_eq!(&buf[header.len()..], &[254, 254, 85, 169]);
    }
}
