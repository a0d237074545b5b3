use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Serialize;

/// Output directory for one command run. Creation checks up front that
/// none of the files the command will write already exist, unless forced.
#[derive(Debug)]
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn claim(root: &Path, force: bool, files: &[&str]) -> anyhow::Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        if !force {
            if let Some(f) = files.iter().find(|f| root.join(f).exists()) {
                bail!("{} already exists; pass --force to overwrite", root.join(f).display());
            }
        }
        Ok(OutDir { root: root.to_owned() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn json(&self, name: &str, value: &impl Serialize) -> anyhow::Result<()> {
        self.text(name, &to_json(value)?)
    }

    pub fn text(&self, name: &str, contents: &str) -> anyhow::Result<()> {
        let path = self.path(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
    }
}

/// Pretty JSON with object keys sorted, newline-terminated.
pub fn to_json(value: &impl Serialize) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(&serde_json::to_value(value)?)?;
    text.push('\n');
    Ok(text)
}
