//! Flat `key = value` configuration files and built-in presets, merged into
//! the argument list ahead of the user's own flags so that flags win.

use std::ffi::OsString;
use std::fmt;

use clap::{ArgAction, Command};

pub const PRESETS: [(&str, &str); 8] = [
    (
        "table1_sim_deep_cls",
        include_str!("../presets/table1_sim_deep_cls.conf"),
    ),
    (
        "table1_sim_deep_reg",
        include_str!("../presets/table1_sim_deep_reg.conf"),
    ),
    (
        "table1_sim_shallow_cls",
        include_str!("../presets/table1_sim_shallow_cls.conf"),
    ),
    (
        "table1_sim_shallow_reg",
        include_str!("../presets/table1_sim_shallow_reg.conf"),
    ),
    (
        "fig_mdi_leaf_size",
        include_str!("../presets/fig_mdi_leaf_size.conf"),
    ),
    (
        "fig_mdi_depth",
        include_str!("../presets/fig_mdi_depth.conf"),
    ),
    (
        "fig_mdi_oob_leaf_size",
        include_str!("../presets/fig_mdi_oob_leaf_size.conf"),
    ),
    (
        "inverse_leaf_probe",
        include_str!("../presets/inverse_leaf_probe.conf"),
    ),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

/// Which subcommand a preset belongs to.
pub fn preset_command(text: &str) -> &'static str {
    if text.lines().any(|l| l.trim_start().starts_with("axis")) {
        "sweep"
    } else {
        "bench"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub source: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{line}: {}", self.source, self.message),
            None => write!(f, "{}: {}", self.source, self.message),
        }
    }
}

/// Parse `text` against the flags of `cmd`, returning equivalent arguments.
pub fn to_args(text: &str, source: &str, cmd: &Command) -> Result<Vec<OsString>, ConfigError> {
    let err = |line, message: String| ConfigError {
        source: source.to_owned(),
        line: Some(line),
        message,
    };
    // Same flags with nothing required, for checking one value at a time.
    let probe = cmd
        .clone()
        .mut_args(|a| a.required(false))
        .subcommand_required(false)
        .arg_required_else_help(false);
    let mut seen: Vec<String> = Vec::new();
    let mut args = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(
                line_no,
                format!("expected `key = value`, got {line:?}"),
            ));
        };
        let (key, value) = (key.trim(), value.trim());
        if matches!(
            key,
            "config" | "preset" | "help" | "version" | "list-presets"
        ) {
            return Err(err(
                line_no,
                format!("key {key:?} is not allowed in a config file"),
            ));
        }
        let Some(arg) = cmd.get_arguments().find(|a| a.get_long() == Some(key)) else {
            return Err(err(
                line_no,
                format!("unknown key {key:?} for `{}`", cmd.get_name()),
            ));
        };
        if seen.iter().any(|k| k == key) {
            return Err(err(line_no, format!("duplicate key {key:?}")));
        }
        seen.push(key.to_owned());
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value {
                "true" => args.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => {
                    return Err(err(
                        line_no,
                        format!("{key} expects true or false, got {value:?}"),
                    ))
                }
            }
            continue;
        }
        probe
            .clone()
            .try_get_matches_from([cmd.get_name(), &format!("--{key}"), value])
            .map_err(|e| {
                let msg = e.to_string();
                let first = msg
                    .lines()
                    .next()
                    .unwrap_or("")
                    .trim_start_matches("error: ");
                err(line_no, first.to_owned())
            })?;
        args.push(OsString::from(format!("--{key}")));
        args.push(OsString::from(value));
    }
    Ok(args)
}

/// Find `--name value` or `--name=value` in `args`.
fn flag_value(args: &[OsString], name: &str) -> Option<OsString> {
    let long = format!("--{name}");
    let prefix = format!("--{name}=");
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == long {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix(&prefix) {
            return Some(OsString::from(v));
        }
    }
    None
}

/// Expand `--preset` and `--config` of the invoked subcommand into plain
/// flags. Preset values come first, then the config file, then the command
/// line, so later sources override earlier ones.
pub fn expand(argv: Vec<OsString>, root: &Command) -> Result<Vec<OsString>, ConfigError> {
    let Some(sub_name) = argv.get(1).map(|a| a.to_string_lossy().into_owned()) else {
        return Ok(argv);
    };
    let Some(sub) = root.find_subcommand(&sub_name) else {
        return Ok(argv);
    };
    let rest = &argv[2..];
    let mut merged: Vec<OsString> = argv[..2].to_vec();
    if let Some(name) = flag_value(rest, "preset") {
        let name = name.to_string_lossy().into_owned();
        let text = preset(&name).ok_or_else(|| ConfigError {
            source: "--preset".into(),
            line: None,
            message: format!(
                "unknown preset {name:?}; available: {}",
                PRESETS
                    .iter()
                    .map(|(n, _)| *n)
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        })?;
        if preset_command(text) != sub_name {
            return Err(ConfigError {
                source: "--preset".into(),
                line: None,
                message: format!("preset {name:?} is for `rfimp {}`", preset_command(text)),
            });
        }
        merged.extend(to_args(text, &format!("preset {name}"), sub)?);
    }
    if let Some(path) = flag_value(rest, "config") {
        let display = path.to_string_lossy().into_owned();
        let text = std::fs::read_to_string(&path).map_err(|e| ConfigError {
            source: display.clone(),
            line: None,
            message: e.to_string(),
        })?;
        merged.extend(to_args(&text, &display, sub)?);
    }
    merged.extend(rest.iter().cloned());
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::Cli;
    use clap::CommandFactory;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn presets_parse_for_their_command() {
        let root = Cli::command();
        for (name, text) in PRESETS {
            let sub = root.find_subcommand(preset_command(text)).unwrap();
            to_args(text, name, sub).unwrap_or_else(|e| panic!("{e}"));
        }
    }

    #[test]
    fn unknown_key_names_the_line() {
        let root = Cli::command();
        let sub = root.find_subcommand("bench").unwrap();
        let e = to_args("# c\ntrees = 5\nbogus = 1\n", "f.conf", sub).unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.to_string().starts_with("f.conf:3: unknown key"));
    }

    #[test]
    fn bad_values_and_syntax_name_the_line() {
        let root = Cli::command();
        let sub = root.find_subcommand("bench").unwrap();
        assert_eq!(to_args("trees = x", "f", sub).unwrap_err().line, Some(1));
        assert_eq!(to_args("\n\ntrees", "f", sub).unwrap_err().line, Some(3));
        assert_eq!(
            to_args("methods = mdi,nope", "f", sub).unwrap_err().line,
            Some(1)
        );
        assert_eq!(
            to_args("fixed-relevant-set = maybe", "f", sub)
                .unwrap_err()
                .line,
            Some(1)
        );
        assert_eq!(
            to_args("trees = 1\ntrees = 2", "f", sub).unwrap_err().line,
            Some(2)
        );
        assert_eq!(to_args("config = x", "f", sub).unwrap_err().line, Some(1));
    }

    #[test]
    fn flags_follow_config_values() {
        let root = Cli::command();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.conf");
        std::fs::write(&path, "trees = 5\nfixed-relevant-set = true\n").unwrap();
        let argv = os(&[
            "rfimp",
            "bench",
            "--config",
            path.to_str().unwrap(),
            "--trees",
            "7",
        ]);
        let out = expand(argv, &root).unwrap();
        let s: Vec<String> = out
            .iter()
            .map(|a| a.to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            &s[..5],
            &["rfimp", "bench", "--trees", "5", "--fixed-relevant-set"]
        );
        assert_eq!(s.last().unwrap(), "7");
    }

    #[test]
    fn preset_must_match_command() {
        let root = Cli::command();
        let argv = os(&["rfimp", "sweep", "--preset", "table1_sim_deep_cls"]);
        assert!(expand(argv, &root).is_err());
        let argv = os(&["rfimp", "bench", "--preset", "nope"]);
        assert!(expand(argv, &root).is_err());
    }
}
