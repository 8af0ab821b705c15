//! Optional `key=value` defaults file. Keys are long flag names; the
//! resulting flags are inserted right after the subcommand so that flags on
//! the command line, which come later, override them.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use crate::CliError;

/// Location of `--config` in raw arguments, if any.
fn config_path(args: &[OsString]) -> Result<Option<PathBuf>, CliError> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            let p = it.next().ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
            return Ok(Some(PathBuf::from(p)));
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Ok(Some(PathBuf::from(p)));
        }
    }
    Ok(None)
}

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Raw arguments with the config file's flags spliced in after the
/// subcommand.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args)? else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let pairs = parse_config(&text)?;
    // the subcommand is the first argument that is not a flag or the
    // value of --config
    let mut idx = 1;
    while idx < args.len() {
        let s = args[idx].to_string_lossy();
        if s == "--config" {
            idx += 2;
        } else if s.starts_with('-') {
            idx += 1;
        } else {
            break;
        }
    }
    if idx >= args.len() {
        return Ok(args);
    }
    let mut out: Vec<OsString> = args[..=idx].to_vec();
    for (k, v) in pairs {
        out.push(format!("--{k}").into());
        out.push(v.into());
    }
    out.extend_from_slice(&args[idx + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_underscores() {
        let pairs = parse_config("# defaults\ndomain = disc\n\nz_min=-5\n").unwrap();
        assert_eq!(pairs, vec![("domain".into(), "disc".into()), ("z-min".into(), "-5".into())]);
        assert!(parse_config("nonsense").is_err());
    }
}
