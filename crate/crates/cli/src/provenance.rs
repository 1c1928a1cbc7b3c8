//! Provenance lines written into every output.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

/// Collects the inputs of one run and renders the provenance line.
pub struct Provenance {
    command: String,
    hasher: Sha256,
    reproducible: bool,
}

/// Options whose value names an output and so stays out of the inputs hash.
const OUTPUT_FLAGS: [&str; 2] = ["--out", "--export"];

impl Provenance {
    pub fn new(args: &[String], reproducible: bool) -> Self {
        let mut hasher = Sha256::new();
        let mut skip = false;
        for a in args {
            if skip {
                skip = false;
                continue;
            }
            if OUTPUT_FLAGS.contains(&a.as_str()) {
                skip = true;
                continue;
            }
            if OUTPUT_FLAGS.iter().any(|f| a.starts_with(&format!("{f}="))) || a == "--reproducible" {
                continue;
            }
            hasher.update(a.as_bytes());
            hasher.update([0]);
        }
        Self { command: args.join(" "), hasher, reproducible }
    }

    pub fn add_file(&mut self, path: &Path) -> std::io::Result<()> {
        let bytes = fs::read(path)?;
        self.hasher.update(path.file_name().map(|n| n.as_encoded_bytes()).unwrap_or_default());
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        Ok(())
    }

    /// Hashes the regular files of `dir` in name order.
    pub fn add_dir(&mut self, dir: &Path) -> std::io::Result<()> {
        let mut names: Vec<_> = fs::read_dir(dir)?
            .filter_map(|e| e.ok())
            .filter(|e| e.file_type().map(|t| t.is_file()).unwrap_or(false))
            .map(|e| e.path())
            .filter(|p| p.file_name().is_some_and(|n| n != "provenance.txt"))
            .collect();
        names.sort();
        for p in names {
            self.add_file(&p)?;
        }
        Ok(())
    }

    pub fn inputs_hash(&self) -> String {
        hex::encode(self.hasher.clone().finalize())
    }

    /// `mimo-bounds <version>; command: ...; inputs: sha256:...[; time: ...]`
    pub fn line(&self) -> String {
        let mut out = format!(
            "mimo-bounds {}; command: {}; inputs: sha256:{}",
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.inputs_hash()
        );
        if !self.reproducible {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            out += &format!("; time: {secs}");
        }
        out
    }

    /// The provenance line as a `#` comment, newline-terminated.
    pub fn header(&self) -> String {
        format!("# {}\n", self.line())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn output_paths_do_not_change_the_hash() {
        let a = Provenance::new(&args("bound --rho 1,2 --out a.json"), true);
        let b = Provenance::new(&args("bound --rho 1,2 --out=b.json --reproducible"), true);
        let c = Provenance::new(&args("bound --rho 1,3"), true);
        assert_eq!(a.inputs_hash(), b.inputs_hash());
        assert_ne!(a.inputs_hash(), c.inputs_hash());
    }

    #[test]
    fn reproducible_line_has_no_time() {
        let p = Provenance::new(&args("geom"), true);
        assert!(!p.line().contains("time:"));
        assert!(Provenance::new(&args("geom"), false).line().contains("time:"));
        assert!(p.header().starts_with("# mimo-bounds "));
    }

    #[test]
    fn file_contents_enter_the_hash() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("x.txt");
        fs::write(&f, "one").unwrap();
        let mut a = Provenance::new(&[], true);
        a.add_file(&f).unwrap();
        fs::write(&f, "two").unwrap();
        let mut b = Provenance::new(&[], true);
        b.add_file(&f).unwrap();
        assert_ne!(a.inputs_hash(), b.inputs_hash());
    }
}
