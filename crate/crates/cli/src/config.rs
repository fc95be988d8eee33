//! `key = value` configuration.
//!
//! Lookup order, later wins: built-in defaults, the config file, the
//! `QK_KEYSTORE` / `QK_PORTAL` environment variables, command-line flags.
//! The config file is `--config <path>`, else `$QK_CONFIG`, else
//! `$HOME/.socialkey/config` when it exists.
//!
//! | key | default |
//! |---|---|
//! | `keystore` | `$HOME/.socialkey/keystore.qks` (`./socialkey.qks` without `HOME`) |
//! | `portal` | `http://127.0.0.1:8750` |
//! | `user` | the only local identity in the keystore |
//! | `key_bits` | `256` |
//! | `pinning` | `on` |
//! | `kdf_iterations` | `100000` |
//! | `profile.max_dimension` | `1024` |
//! | `profile.jpeg_quality` | `75` |
//! | `profile.strip_metadata` | `true` |
//! | `profile.truncate_after_eof` | `true` |
//! | `profile.force_jpeg` | `true` |

use std::path::{Path, PathBuf};

use socialkey_core::imagepipe::OptimizationProfile;
use socialkey_core::keystore::DEFAULT_KDF_ITERATIONS;

use crate::error::CliError;

pub const DEFAULT_PORTAL: &str = "http://127.0.0.1:8750";
pub const DEFAULT_PORT: u16 = 8750;
pub const CONFIG_ENV: &str = "QK_CONFIG";
pub const KEYSTORE_ENV: &str = "QK_KEYSTORE";
pub const PORTAL_ENV: &str = "QK_PORTAL";

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub keystore: PathBuf,
    pub portal: String,
    pub user: Option<String>,
    pub key_bits: usize,
    pub pinning: bool,
    pub kdf_iterations: u32,
    pub profile: OptimizationProfile,
}

fn home() -> Option<PathBuf> {
    std::env::var_os("HOME").filter(|h| !h.is_empty()).map(PathBuf::from)
}

impl Default for Config {
    fn default() -> Self {
        Config {
            keystore: home().map_or_else(|| PathBuf::from("socialkey.qks"), |h| h.join(".socialkey/keystore.qks")),
            portal: DEFAULT_PORTAL.to_string(),
            user: None,
            key_bits: 256,
            pinning: true,
            kdf_iterations: DEFAULT_KDF_ITERATIONS,
            profile: OptimizationProfile::default(),
        }
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: expected on/off, got {v:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Config(format!("{key}: not a number: {v:?}")))
}

impl Config {
    /// Applies `key = value` lines. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        self.profile.validate().map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key {
            "keystore" => self.keystore = PathBuf::from(v),
            "portal" => self.portal = v.to_string(),
            "user" => self.user = Some(v.to_string()),
            "key_bits" => {
                self.key_bits = match v {
                    "128" | "256" => parse_num(key, v)?,
                    _ => return Err(CliError::Config(format!("key_bits: must be 128 or 256, got {v}"))),
                }
            }
            "pinning" => self.pinning = parse_bool(key, v)?,
            "kdf_iterations" => self.kdf_iterations = parse_num(key, v)?,
            "profile.max_dimension" => self.profile.max_dimension = parse_num(key, v)?,
            "profile.jpeg_quality" => self.profile.jpeg_quality = parse_num(key, v)?,
            "profile.strip_metadata" => self.profile.strip_metadata = parse_bool(key, v)?,
            "profile.truncate_after_eof" => self.profile.truncate_after_eof = parse_bool(key, v)?,
            "profile.force_jpeg" => self.profile.force_jpeg = parse_bool(key, v)?,
            _ => return Err(CliError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Defaults, then the config file, then environment overrides.
    pub fn load(explicit: Option<&Path>) -> Result<Self, CliError> {
        let mut cfg = Config::default();
        let path = match explicit {
            Some(p) => Some(p.to_path_buf()),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) => Some(PathBuf::from(p)),
                None => home().map(|h| h.join(".socialkey/config")).filter(|p| p.exists()),
            },
        };
        if let Some(path) = path {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        if let Some(v) = std::env::var_os(KEYSTORE_ENV).filter(|v| !v.is_empty()) {
            cfg.keystore = PathBuf::from(v);
        }
        if let Ok(v) = std::env::var(PORTAL_ENV) {
            if !v.is_empty() {
                cfg.portal = v;
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let mut c = Config::default();
        c.apply_text(
            "# comment\nkeystore = /tmp/k.qks\nportal=http://h:1\nuser = bob\nkey_bits = 128\npinning = off\n\
             kdf_iterations = 10\nprofile.max_dimension = 800\nprofile.jpeg_quality = 60\n\
             profile.strip_metadata = false\nprofile.truncate_after_eof = no\nprofile.force_jpeg = 0\n",
        )
        .unwrap();
        assert_eq!(c.keystore, PathBuf::from("/tmp/k.qks"));
        assert_eq!(c.portal, "http://h:1");
        assert_eq!(c.user.as_deref(), Some("bob"));
        assert_eq!((c.key_bits, c.pinning, c.kdf_iterations), (128, false, 10));
        assert_eq!((c.profile.max_dimension, c.profile.jpeg_quality), (800, 60));
        assert!(!c.profile.strip_metadata && !c.profile.truncate_after_eof && !c.profile.force_jpeg);
    }

    #[test]
    fn rejects_bad_lines() {
        for bad in ["nonsense", "colour = red", "key_bits = 192", "pinning = maybe", "profile.jpeg_quality = 0"] {
            let err = Config::default().apply_text(bad).unwrap_err();
            assert_eq!(err.category(), "config", "{bad}");
        }
    }
}
