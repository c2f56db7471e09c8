use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// Templates stored as `<name>.json` pipeline documents in one directory.
pub struct TemplateStore {
    dir: PathBuf,
}

pub enum SaveError {
    Exists,
    Io(io::Error),
}

/// `[A-Za-z0-9_-]{1,64}`
pub fn valid_name(name: &str) -> bool {
    (1..=64).contains(&name.len())
        && name
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

impl TemplateStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(format!("{name}.json"))
    }

    pub fn list(&self) -> io::Result<Vec<String>> {
        let entries = match std::fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e),
        };
        let mut names = Vec::new();
        for entry in entries {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "json") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    if valid_name(stem) {
                        names.push(stem.to_owned());
                    }
                }
            }
        }
        names.sort();
        Ok(names)
    }

    /// `None` when no template has this name. `name` must be valid.
    pub fn load(&self, name: &str) -> io::Result<Option<String>> {
        match std::fs::read_to_string(self.path(name)) {
            Ok(text) => Ok(Some(text)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Writes a new template. The file appears complete or not at all, and
    /// an existing template is never replaced.
    pub fn save(&self, name: &str, document: &str) -> Result<(), SaveError> {
        std::fs::create_dir_all(&self.dir).map_err(SaveError::Io)?;
        let tmp = self
            .dir
            .join(format!(".{name}.{}.tmp", uuid::Uuid::new_v4().simple()));
        let write = || -> io::Result<()> {
            let mut f = std::fs::File::create_new(&tmp)?;
            f.write_all(document.as_bytes())?;
            f.sync_all()
        };
        let result = write().map_err(SaveError::Io).and_then(|()| {
            std::fs::hard_link(&tmp, self.path(name)).map_err(|e| match e.kind() {
                io::ErrorKind::AlreadyExists => SaveError::Exists,
                _ => SaveError::Io(e),
            })
        });
        let _ = std::fs::remove_file(&tmp);
        result
    }
}
