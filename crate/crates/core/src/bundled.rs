//! Data files compiled into the library, with checksum verification against
//! `data/MANIFEST.sha256`.

use std::path::{Component, Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::scenario::Loader;

macro_rules! bundle {
    ($($path:literal),* $(,)?) => {
        /// `(path relative to the repository root, contents)` of every bundled file.
        pub const FILES: &[(&str, &str)] = &[
            $(($path, include_str!(concat!("../../../", $path)))),*
        ];
    };
}

bundle!(
    "data/j1.ctb",
    "data/j2.ctb",
    "data/l2_11.ctb",
    "data/11_10.ctb",
    "data/a5.ctb",
    "data/u3_3.ctb",
    "data/l3_2_2.ctb",
    "data/j1.prm",
    "data/j2_100.prm",
    "data/l2_11.prm",
    "data/l2_11_12.prm",
    "data/a5.prm",
    "scenarios/j1_all.scn",
    "scenarios/j1_involutions.scn",
    "scenarios/j2_557.scn",
);

pub const MANIFEST: &str = include_str!("../../../data/MANIFEST.sha256");

/// Contents of a bundled file by its repository-relative path.
pub fn file(path: &str) -> Option<&'static str> {
    let want = normalize(Path::new(path));
    FILES
        .iter()
        .find(|(p, _)| Path::new(p) == want)
        .map(|(_, c)| *c)
}

/// Lexically resolves `.` and `..` components.
fn normalize(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in path.components() {
        match c {
            Component::ParentDir => {
                out.pop();
            }
            Component::CurDir => {}
            other => out.push(other),
        }
    }
    out
}

/// A loader that reads from the bundled files instead of the disk.
pub fn loader() -> Loader {
    Loader::new(Box::new(|p: &Path| {
        file(&p.to_string_lossy())
            .map(str::to_string)
            .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::NotFound, "not a bundled file"))
    }))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `(repository-relative path, expected digest)` pairs from a manifest whose
/// entries are relative to `data/`.
pub fn manifest_entries(manifest: &str) -> Vec<(PathBuf, String)> {
    manifest
        .lines()
        .filter_map(|l| {
            let (digest, name) = l.trim().split_once(char::is_whitespace)?;
            let name = name.trim().trim_start_matches('*');
            Some((normalize(&Path::new("data").join(name)), digest.to_string()))
        })
        .collect()
}

/// Files whose digest disagrees with the manifest, or that the manifest
/// does not list.
pub fn verify_bundled() -> Vec<String> {
    let entries = manifest_entries(MANIFEST);
    let mut bad = Vec::new();
    for (path, contents) in FILES {
        match entries.iter().find(|(p, _)| p == Path::new(path)) {
            Some((_, d)) if *d == sha256_hex(contents.as_bytes()) => {}
            Some(_) => bad.push(format!("{path}: checksum mismatch")),
            None => bad.push(format!("{path}: not in manifest")),
        }
    }
    bad
}

/// Checks the files under a repository root against its manifest.
pub fn verify_dir(root: &Path) -> Vec<String> {
    let manifest = match std::fs::read_to_string(root.join("data/MANIFEST.sha256")) {
        Ok(m) => m,
        Err(e) => return vec![format!("data/MANIFEST.sha256: {e}")],
    };
    let mut bad = Vec::new();
    for (path, digest) in manifest_entries(&manifest) {
        match std::fs::read(root.join(&path)) {
            Ok(bytes) if sha256_hex(&bytes) == digest => {}
            Ok(_) => bad.push(format!("{}: checksum mismatch", path.display())),
            Err(e) => bad.push(format!("{}: {e}", path.display())),
        }
    }
    bad
}
