//! Flat `key = value` run configuration files with `#` comments.

use std::path::Path;

use crate::error::{io_error, Result, SascError};

/// Ordered `(key, value)` pairs; later duplicates override earlier ones when
/// turned into flags.
pub fn parse_config_str(text: &str, source_name: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| SascError::Parse {
            source_name: source_name.into(),
            line: i + 1,
            message: format!("expected 'key = value', got '{line}'"),
        })?;
        let key = k.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(SascError::Parse {
                source_name: source_name.into(),
                line: i + 1,
                message: format!("invalid key '{key}'"),
            });
        }
        out.push((key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse_config_str(&text, &path.display().to_string())
}

/// Converts pairs to long flags: `alpha0 = auto` becomes `--alpha0 auto`,
/// underscores become dashes, and `true`/`false` values become a bare flag
/// or nothing.
pub fn config_to_flags(pairs: &[(String, String)]) -> Vec<String> {
    let mut flags = Vec::new();
    for (k, v) in pairs {
        let flag = format!("--{}", k.replace('_', "-"));
        match v.as_str() {
            "true" => flags.push(flag),
            "false" => {}
            _ => {
                flags.push(flag);
                flags.push(v.clone());
            }
        }
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let p = parse_config_str(
            "# run\nalpha0 = auto\n\nomega=2 # growth\nno_timing = true\n",
            "c",
        )
        .unwrap();
        assert_eq!(
            p,
            vec![
                ("alpha0".into(), "auto".into()),
                ("omega".into(), "2".into()),
                ("no_timing".into(), "true".into())
            ]
        );
        assert_eq!(
            config_to_flags(&p),
            vec!["--alpha0", "auto", "--omega", "2", "--no-timing"]
        );
    }

    #[test]
    fn malformed_line_reports_position() {
        let e = parse_config_str("a = 1\nbroken\n", "c.cfg").unwrap_err();
        assert!(matches!(e, SascError::Parse { line: 2, .. }));
        assert!(parse_config_str("two words = 1", "c").is_err());
    }
}
