//! Flat `key=value` config file, merged under the command line.

use std::path::Path;

use clap::Command;

pub const CONFIG_ENV: &str = "FRONTRUN_CONFIG";

#[derive(Debug)]
pub struct ConfigError(pub String);

fn parse_lines(text: &str, origin: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("{}:{}: expected key=value", origin.display(), n + 1)))?;
        pairs.push((key.trim().replace('_', "-"), value.trim().to_string()));
    }
    Ok(pairs)
}

fn is_true(value: &str) -> Option<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Some(true),
        "false" | "0" | "no" | "off" => Some(false),
        _ => None,
    }
}

/// Splices config entries in front of the user's own flags, so that the
/// command line wins. Entries the chosen subcommand does not accept are
/// skipped; entries no subcommand accepts are an error.
pub fn merge_config(cmd: &Command, args: Vec<String>, path: &Path) -> Result<Vec<String>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    let pairs = parse_lines(&text, path)?;

    let Some(pos) = args.iter().skip(1).position(|a| !a.starts_with('-')).map(|p| p + 1) else {
        return Ok(args);
    };
    let Some(sub) = cmd.find_subcommand(&args[pos]) else {
        return Ok(args);
    };

    let mut injected = Vec::new();
    for (key, value) in pairs {
        let known_anywhere = cmd
            .get_subcommands()
            .flat_map(|s| s.get_arguments())
            .chain(cmd.get_arguments())
            .any(|a| a.get_long() == Some(key.as_str()));
        if !known_anywhere {
            return Err(ConfigError(format!("unknown config key '{key}'")));
        }
        let Some(arg) = sub
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()))
        else {
            continue;
        };
        if arg.get_action().takes_values() {
            injected.push(format!("--{key}={value}"));
        } else {
            match is_true(&value) {
                Some(true) => injected.push(format!("--{key}")),
                Some(false) => {}
                None => return Err(ConfigError(format!("config key '{key}' expects true/false, got '{value}'"))),
            }
        }
    }

    let mut merged = args[..=pos].to_vec();
    merged.extend(injected);
    merged.extend_from_slice(&args[pos + 1..]);
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let pairs = parse_lines("# c\n\ntheta_1 = 2\nseed=3\n", Path::new("x")).unwrap();
        assert_eq!(pairs, vec![("theta-1".into(), "2".into()), ("seed".into(), "3".into())]);
        assert!(parse_lines("oops\n", Path::new("x")).is_err());
    }

    #[test]
    fn booleans() {
        assert_eq!(is_true("Yes"), Some(true));
        assert_eq!(is_true("0"), Some(false));
        assert_eq!(is_true("maybe"), None);
    }
}
