use std::fs;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use super::table::{asri_direct, asri_modified, taylor_ms, taylor_wl, SchemeKind, SchemeTable};
use crate::error::Result;
use crate::word::{Alphabet, Grading};

/// Disk cache of generated tables keyed by a hash of the alphabet and the
/// scheme parameters.
#[derive(Clone, Debug)]
pub struct SchemeCache {
    dir: PathBuf,
}

/// Builds a table without caching.
pub fn generate(kind: SchemeKind, grading: Grading, n: usize, alphabet: &Alphabet) -> Result<SchemeTable> {
    match (kind, grading) {
        (SchemeKind::Taylor, Grading::WordLength) => Ok(taylor_wl(n, alphabet)),
        (SchemeKind::Taylor, Grading::MeanSquare) => Ok(taylor_ms(n, alphabet)),
        (SchemeKind::Asri, _) => asri_direct(n, alphabet),
        (SchemeKind::Masri, _) => asri_modified(n, alphabet),
    }
}

impl SchemeCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    fn key(kind: SchemeKind, grading: Grading, n: usize, alphabet: &Alphabet) -> String {
        let desc = format!("{kind}|{grading:?}|{n}|{}", alphabet.descriptor());
        let digest = Sha256::digest(desc.as_bytes());
        digest.iter().take(16).map(|b| format!("{b:02x}")).collect()
    }

    pub fn get_or_build(&self, kind: SchemeKind, grading: Grading, n: usize, alphabet: &Alphabet) -> Result<SchemeTable> {
        let path = self.dir.join(format!("{}.scheme", Self::key(kind, grading, n, alphabet)));
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(t) = text.parse::<SchemeTable>() {
                return Ok(t);
            }
        }
        let t = generate(kind, grading, n, alphabet)?;
        fs::create_dir_all(&self.dir)?;
        fs::write(&path, t.serialize())?;
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn cache_hit_returns_same_table() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SchemeCache::new(dir.path());
        let a = Alphabet::standard(1, &[q(2)], 3).unwrap();
        let t1 = cache.get_or_build(SchemeKind::Asri, Grading::WordLength, 2, &a).unwrap();
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        let t2 = cache.get_or_build(SchemeKind::Asri, Grading::WordLength, 2, &a).unwrap();
        assert_eq!(t1, t2);
        let b = Alphabet::standard(1, &[q(3)], 3).unwrap();
        cache.get_or_build(SchemeKind::Asri, Grading::WordLength, 2, &b).unwrap();
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
    }
}
