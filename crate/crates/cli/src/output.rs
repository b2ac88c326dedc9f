use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Files are rendered in memory first and only written once every one of
/// them is ready. A failed write removes whatever this set already wrote.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: &str, contents: Vec<u8>) {
        self.files.push((name.to_string(), contents));
    }

    pub fn commit(self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, contents) in self.files {
            let path = dir.join(&name);
            if let Err(e) = fs::write(&path, &contents) {
                for p in written.iter().chain(std::iter::once(&path)) {
                    let _ = fs::remove_file(p);
                }
                return Err(e);
            }
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut set = OutputSet::new();
        set.add("a.csv", b"x\n".to_vec());
        set.add("b.csv", b"y\n".to_vec());
        let paths = set.commit(dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(fs::read(dir.path().join("b.csv")).unwrap(), b"y\n");
    }

    #[test]
    fn failed_write_removes_earlier_files() {
        let dir = tempfile::tempdir().unwrap();
        // A directory in the way makes the second write fail.
        fs::create_dir(dir.path().join("b.csv")).unwrap();
        let mut set = OutputSet::new();
        set.add("a.csv", b"x\n".to_vec());
        set.add("b.csv", b"y\n".to_vec());
        assert!(set.commit(dir.path()).is_err());
        assert!(!dir.path().join("a.csv").exists());
    }
}
