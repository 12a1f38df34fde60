//! Run configuration: sequence description plus shared settings.
//!
//! A config file is flat `key = value` text (`#` starts a comment). Flags
//! override the file; `TAKAGI_OUT_DIR` overrides the file's `out` but not
//! the `--out` flag.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use takagi::rational::parse_rational;
use takagi::{CoefficientSequence, Limits, Rational, SignRule};

use crate::error::{CliError, CliResult};

pub const OUT_DIR_ENV: &str = "TAKAGI_OUT_DIR";

const KNOWN_KEYS: &[&str] = &[
    "base",
    "kind",
    "a",
    "signs",
    "head",
    "tail_ratio",
    "out",
    "workers",
    "mem_cap",
    "seed",
];

/// Raw `key → value` pairs from a config file.
#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Sequence flags as given on the command line; all optional.
#[derive(Debug, Default, Clone)]
pub struct SequenceArgs {
    pub base: Option<String>,
    pub kind: Option<String>,
    pub a: Option<String>,
    pub signs: Option<String>,
    pub head: Option<String>,
    pub tail_ratio: Option<String>,
}

#[derive(Debug, Default, Clone)]
pub struct CommonArgs {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub mem_cap: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seq: CoefficientSequence,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub limits: Limits,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 0x7a6a_2024;

fn parse_u64(key: &str, text: &str) -> CliResult<u64> {
    text.trim().parse().map_err(|_| {
        CliError::Config(format!(
            "`{key}` must be a nonnegative integer, got `{text}`"
        ))
    })
}

fn parse_list(text: &str) -> Vec<&str> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn parse_signs(text: &str) -> CliResult<SignRule> {
    let t = text.trim();
    if t == "alternating" {
        return Ok(SignRule::Alternating);
    }
    if let Some(seed) = t.strip_prefix("seeded:") {
        return Ok(SignRule::Seeded(parse_u64("signs", seed)?));
    }
    let signs = parse_list(t)
        .into_iter()
        .map(|s| match s {
            "1" | "+1" | "+" => Ok(1),
            "-1" | "-" => Ok(-1),
            other => Err(CliError::Config(format!(
                "bad sign `{other}` (use 1/-1, +/-)"
            ))),
        })
        .collect::<CliResult<Vec<i8>>>()?;
    Ok(SignRule::Cyclic(signs))
}

pub fn parse_head(text: &str) -> CliResult<Vec<Rational>> {
    parse_list(text)
        .into_iter()
        .map(|s| parse_rational(s).map_err(CliError::from))
        .collect()
}

impl RunConfig {
    pub fn resolve(
        file: Option<&FileConfig>,
        seq: &SequenceArgs,
        common: &CommonArgs,
    ) -> CliResult<Self> {
        let empty = FileConfig::default();
        let file = file.unwrap_or(&empty);
        let pick = |flag: &Option<String>, key: &str| {
            flag.clone().or_else(|| file.get(key).map(str::to_string))
        };

        let base = match pick(&seq.base, "base") {
            Some(b) => parse_u64("base", &b)?,
            None => 2,
        };
        let a = pick(&seq.a, "a");
        let signs = pick(&seq.signs, "signs");
        let head = pick(&seq.head, "head");
        let tail_ratio = pick(&seq.tail_ratio, "tail_ratio");
        let kind = pick(&seq.kind, "kind").unwrap_or_else(|| {
            if signs.is_some() {
                "signed".into()
            } else if head.is_some() {
                "explicit".into()
            } else {
                "geometric".into()
            }
        });
        let sequence = match kind.as_str() {
            "geometric" => {
                let a = match a {
                    Some(a) => parse_rational(&a)?,
                    None => Rational::new(1.into(), (base as i64).into()),
                };
                CoefficientSequence::geometric(base, a)?
            }
            "signed" | "signed_power" => {
                let rule = parse_signs(signs.as_deref().unwrap_or("alternating"))?;
                CoefficientSequence::signed_power(base, rule)?
            }
            "explicit" => {
                let head = parse_head(head.as_deref().unwrap_or(""))?;
                let tail = match tail_ratio {
                    Some(t) => parse_rational(&t)?,
                    None => Rational::from_integer(0.into()),
                };
                CoefficientSequence::explicit(base, head, tail)?
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown kind `{other}` (geometric, signed, explicit)"
                )))
            }
        };

        let out = common
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .or_else(|| file.get("out").map(PathBuf::from));
        let workers = match (common.workers, file.get("workers")) {
            (Some(w), _) => Some(w),
            (None, Some(w)) => Some(parse_u64("workers", w)? as usize),
            (None, None) => None,
        };
        let mut limits = Limits::default();
        if let Some(cap) = common.mem_cap {
            limits.max_grid_points = cap;
        } else if let Some(cap) = file.get("mem_cap") {
            limits.max_grid_points = parse_u64("mem_cap", cap)?;
        }
        let seed = match (common.seed, file.get("seed")) {
            (Some(s), _) => s,
            (None, Some(s)) => parse_u64("seed", s)?,
            (None, None) => DEFAULT_SEED,
        };
        Ok(Self {
            seq: sequence,
            out,
            workers,
            limits,
            seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use takagi::SequenceKind;

    #[test]
    fn file_parsing_and_precedence() {
        let file =
            FileConfig::parse("# classical\nbase = 2\na = 1/4  # comment\nseed = 5\n").unwrap();
        let flags = SequenceArgs {
            a: Some("1/2".into()),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(Some(&file), &flags, &CommonArgs::default()).unwrap();
        assert_eq!(cfg.seq, CoefficientSequence::classical());
        assert_eq!(cfg.seed, 5);
        let cfg = RunConfig::resolve(
            Some(&file),
            &SequenceArgs::default(),
            &CommonArgs {
                seed: Some(9),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(cfg.seq.coeff(1), Rational::new(1.into(), 4.into()));
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(FileConfig::parse("base 2").is_err());
        assert!(FileConfig::parse("colour = red").is_err());
        let file = FileConfig::parse("a = 0.5.1").unwrap();
        assert!(RunConfig::resolve(
            Some(&file),
            &SequenceArgs::default(),
            &CommonArgs::default()
        )
        .is_err());
    }

    #[test]
    fn kind_inference() {
        let signed = SequenceArgs {
            signs: Some("seeded:3".into()),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(None, &signed, &CommonArgs::default()).unwrap();
        assert_eq!(
            cfg.seq.kind(),
            &SequenceKind::SignedPower {
                signs: SignRule::Seeded(3)
            }
        );
        let explicit = SequenceArgs {
            head: Some("[1, 0, 1/4]".into()),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(None, &explicit, &CommonArgs::default()).unwrap();
        assert_eq!(cfg.seq.coeff(2), Rational::new(1.into(), 4.into()));
        let vdw = SequenceArgs {
            base: Some("10".into()),
            ..Default::default()
        };
        assert_eq!(
            RunConfig::resolve(None, &vdw, &CommonArgs::default())
                .unwrap()
                .seq,
            CoefficientSequence::generalized(10).unwrap()
        );
    }

    #[test]
    fn sign_lists() {
        assert_eq!(
            parse_signs("[1,-1, -1]").unwrap(),
            SignRule::Cyclic(vec![1, -1, -1])
        );
        assert_eq!(parse_signs("+,-").unwrap(), SignRule::Cyclic(vec![1, -1]));
        assert!(parse_signs("1,2").is_err());
    }
}
