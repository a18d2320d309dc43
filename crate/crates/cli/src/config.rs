//! `key=value` config files and the effective-config log line.

use std::ffi::OsString;
use std::path::Path;

use clap::{ArgAction, ArgMatches, Command};

/// Splits `text` into `(line, key, value)` triples. Keys may use `_` or `-`.
pub fn parse(origin: &str, text: &str) -> Result<Vec<(usize, String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{origin} line {}: expected key=value, got {line:?}", i + 1))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(format!("{origin} line {}: empty key", i + 1));
        }
        out.push((i + 1, key, value.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut iter = args.iter();
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return iter.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

fn given(args: &[OsString], long: &str) -> bool {
    let flag = format!("--{long}");
    let prefix = format!("--{long}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&prefix)
    })
}

/// Appends the settings of the `--config` file, if any, as flags. Settings
/// whose flag already appears in `argv` are skipped, so the command line wins.
pub fn expand(argv: Vec<OsString>, command: &Command) -> Result<Vec<OsString>, String> {
    let Some(name) = argv.get(1).map(|s| s.to_string_lossy().into_owned()) else {
        return Ok(argv);
    };
    let Some(sub) = command.find_subcommand(&name) else {
        return Ok(argv);
    };
    let Some(path) = config_path(&argv[2..]) else {
        return Ok(argv);
    };
    let path = Path::new(&path);
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| format!("{origin}: {e}"))?;
    let mut extra = Vec::new();
    for (line, key, value) in parse(&origin, &text)? {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .filter(|_| key != "config" && key != "help")
            .ok_or_else(|| format!("{origin} line {line}: `{name}` has no setting {key:?}"))?;
        if given(&argv, &key) {
            continue;
        }
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.as_str() {
                "true" => extra.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => return Err(format!("{origin} line {line}: {key} takes true or false, got {value:?}")),
            }
        } else {
            extra.push(OsString::from(format!("--{key}={value}")));
        }
    }
    let mut out = argv;
    out.extend(extra);
    Ok(out)
}

/// Every setting of the subcommand with its resolved value, one `key=value`
/// per line, in a form `--config` reads back.
pub fn effective(command: &Command, matches: &ArgMatches) -> String {
    let mut out = String::new();
    for arg in command.get_arguments() {
        let Some(long) = arg.get_long() else { continue };
        if long == "config" || long == "help" || long == "version" {
            continue;
        }
        let id = arg.get_id().as_str();
        if let Ok(Some(values)) = matches.try_get_raw(id) {
            let joined: Vec<String> = values.map(|v| v.to_string_lossy().into_owned()).collect();
            out.push_str(&format!("{long}={}\n", joined.join(",")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::{Arg, ArgAction};

    fn cmd() -> Command {
        Command::new("t").subcommand(
            Command::new("run")
                .arg(Arg::new("config").long("config"))
                .arg(Arg::new("train_size").long("train-size").default_value("5"))
                .arg(Arg::new("efws").long("efws").action(ArgAction::SetTrue)),
        )
    }

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_comments_and_underscores() {
        let rows = parse("f", "# c\n\ntrain_size = 7\nefws=true\n").unwrap();
        assert_eq!(rows, vec![(3, "train-size".into(), "7".into()), (4, "efws".into(), "true".into())]);
        assert!(parse("f", "nonsense").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        std::fs::write(&path, "train-size=7\nefws=true\n").unwrap();
        let p = path.to_str().unwrap();
        let out = expand(os(&["t", "run", "--config", p, "--train-size", "9"]), &cmd()).unwrap();
        assert_eq!(out, os(&["t", "run", "--config", p, "--train-size", "9", "--efws"]));
        let m = cmd().try_get_matches_from(out).unwrap();
        let (_, sub) = m.subcommand().unwrap();
        assert_eq!(sub.get_one::<String>("train_size").unwrap(), "9");
        assert!(sub.get_flag("efws"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        std::fs::write(&path, "bogus=1\n").unwrap();
        let err = expand(os(&["t", "run", "--config", path.to_str().unwrap()]), &cmd()).unwrap_err();
        assert!(err.contains("bogus"), "{err}");
    }

    #[test]
    fn effective_config_lists_defaults() {
        let c = cmd();
        let m = c.clone().try_get_matches_from(["t", "run"]).unwrap();
        let sub = c.find_subcommand("run").unwrap();
        let text = effective(sub, m.subcommand_matches("run").unwrap());
        assert_eq!(text, "train-size=5\nefws=false\n");
    }
}
