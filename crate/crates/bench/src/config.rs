//! Experiment configuration: a flat `key = value` text file plus CLI
//! overrides (overrides win). See `configs/` for commented examples.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use okmeans::dataset::Objective;
use okmeans::robust::MethodKind;

use crate::BenchError;

type Result<T> = std::result::Result<T, BenchError>;

/// Where the dataset comes from.
#[derive(Debug, Clone)]
pub enum DatasetSource {
    /// CSV on disk.
    Path {
        path: PathBuf,
        has_labels: bool,
        has_mask: bool,
        skip_header: bool,
    },
    /// Gaussian blobs plus far planted outliers.
    Planted {
        gen_seed: u64,
        dim: usize,
        clusters: usize,
        cluster_size: usize,
        outliers: usize,
        separation: f64,
        spread: f64,
    },
    /// Labeled Gaussian classes (class index = label).
    Classes {
        gen_seed: u64,
        dim: usize,
        class_sizes: Vec<usize>,
        separation: f64,
        spread: f64,
    },
}

/// Synthetic outlier injection settings.
#[derive(Debug, Clone, Copy)]
pub struct InjectSpec {
    pub fraction: f64,
    pub xi: f64,
    pub seed: u64,
}

/// Outlier budget: explicit or derived from the ground-truth mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZSpec {
    Fixed(usize),
    Auto,
}

/// One method entry, optionally with its own coreset size.
#[derive(Debug, Clone, Copy)]
pub struct MethodSpec {
    pub kind: MethodKind<f64>,
    pub coreset: Option<usize>,
}

/// Fully parsed experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub source: DatasetSource,
    pub normalize: bool,
    pub inject: Option<InjectSpec>,
    pub outlier_classes: Option<Vec<i64>>,
    pub k: usize,
    pub z: ZSpec,
    pub objective: Objective,
    pub methods: Vec<MethodSpec>,
    /// Global coreset size (entries may override); `None` disables.
    pub coreset_size: Option<usize>,
    pub seeds: Vec<u64>,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub restarts: usize,
    /// When false, time columns are reported as zero so that repeated runs
    /// produce byte-identical output.
    pub timing: bool,
}

const KNOWN_KEYS: &[&str] = &[
    "name",
    "dataset",
    "path",
    "has_labels",
    "has_mask",
    "skip_header",
    "gen_seed",
    "dim",
    "clusters",
    "cluster_size",
    "planted_outliers",
    "separation",
    "spread",
    "class_sizes",
    "class_separation",
    "class_spread",
    "normalize",
    "inject_fraction",
    "inject_xi",
    "inject_seed",
    "outlier_classes",
    "k",
    "z",
    "objective",
    "methods",
    "coreset_size",
    "seeds",
    "max_iters",
    "rel_tol",
    "restarts",
    "timing",
];

fn bad(msg: impl Into<String>) -> BenchError {
    BenchError::Config(msg.into())
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_kv_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("line {}: expected 'key = value'", lineno + 1)))?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(bad(format!("line {}: empty key", lineno + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

/// Applies `KEY=VALUE` override strings on top of the parsed file.
pub fn apply_overrides(
    map: &mut BTreeMap<String, String>,
    overrides: &[String],
) -> Result<()> {
    for item in overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| bad(format!("override '{item}' is not KEY=VALUE")))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(())
}

struct Keys<'a>(&'a BTreeMap<String, String>);

impl<'a> Keys<'a> {
    fn get(&self, key: &str) -> Option<&'a str> {
        self.0.get(key).map(|s| s.as_str())
    }

    fn required(&self, key: &str) -> Result<&'a str> {
        self.get(key)
            .ok_or_else(|| bad(format!("missing required key '{key}'")))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| bad(format!("key '{key}': cannot parse '{v}'"))),
        }
    }

    fn parse_required<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let v = self.required(key)?;
        v.parse()
            .map_err(|_| bad(format!("key '{key}': cannot parse '{v}'")))
    }

    fn bool(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(v) => Err(bad(format!("key '{key}': expected true/false, got '{v}'"))),
        }
    }

    fn int_list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let v = self.required(key)?;
        v.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| bad(format!("key '{key}': bad list entry '{s}'")))
            })
            .collect()
    }
}

/// Splits on commas that sit outside parentheses.
fn split_top_level(text: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in text.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(current.trim().to_string());
                current.clear();
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        parts.push(current.trim().to_string());
    }
    parts
}

/// Parses one method entry: `okmeans(c=3)`, `okmeans2(c=4, m=5000)`,
/// `constant_k(K=5)`, or `kmeanspp`.
pub fn parse_method(entry: &str) -> Result<MethodSpec> {
    let entry = entry.trim();
    let (name, args) = match entry.find('(') {
        Some(open) => {
            if !entry.ends_with(')') {
                return Err(bad(format!("method '{entry}': unbalanced parentheses")));
            }
            (
                entry[..open].trim(),
                entry[open + 1..entry.len() - 1].trim(),
            )
        }
        None => (entry, ""),
    };
    let mut c: Option<f64> = None;
    let mut big_k: Option<usize> = None;
    let mut coreset: Option<usize> = None;
    for pair in args.split(',').filter(|s| !s.trim().is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| bad(format!("method '{entry}': bad parameter '{pair}'")))?;
        let value = value.trim();
        match key.trim() {
            "c" => {
                c = Some(
                    value
                        .parse()
                        .map_err(|_| bad(format!("method '{entry}': bad c '{value}'")))?,
                )
            }
            "K" | "k" => {
                big_k = Some(
                    value
                        .parse()
                        .map_err(|_| bad(format!("method '{entry}': bad K '{value}'")))?,
                )
            }
            "m" => {
                coreset = Some(
                    value
                        .parse()
                        .map_err(|_| bad(format!("method '{entry}': bad m '{value}'")))?,
                )
            }
            other => return Err(bad(format!("method '{entry}': unknown parameter '{other}'"))),
        }
    }
    let kind = match name {
        "okmeans" => MethodKind::OKMeans {
            c: c.ok_or_else(|| bad(format!("method '{entry}': needs c")))?,
        },
        "okmeans2" => MethodKind::OKMeans2 {
            c: c.ok_or_else(|| bad(format!("method '{entry}': needs c")))?,
        },
        "constant_k" => MethodKind::ConstantK {
            k: big_k.ok_or_else(|| bad(format!("method '{entry}': needs K")))?,
        },
        "kmeanspp" => MethodKind::KMeansPP,
        other => return Err(bad(format!("unknown method '{other}'"))),
    };
    Ok(MethodSpec { kind, coreset })
}

/// Builds the typed config from a parsed key-value map.
pub fn build_config(map: &BTreeMap<String, String>, default_name: &str) -> Result<ExperimentConfig> {
    for key in map.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(bad(format!("unknown config key '{key}'")));
        }
    }
    let keys = Keys(map);

    let source = match keys.required("dataset")? {
        "path" => DatasetSource::Path {
            path: PathBuf::from(keys.required("path")?),
            has_labels: keys.bool("has_labels", false)?,
            has_mask: keys.bool("has_mask", false)?,
            skip_header: keys.bool("skip_header", false)?,
        },
        "planted" => DatasetSource::Planted {
            gen_seed: keys.parse("gen_seed", 1u64)?,
            dim: keys.parse_required("dim")?,
            clusters: keys.parse_required("clusters")?,
            cluster_size: keys.parse_required("cluster_size")?,
            outliers: keys.parse("planted_outliers", 0usize)?,
            separation: keys.parse_required("separation")?,
            spread: keys.parse("spread", 1.0f64)?,
        },
        "classes" => DatasetSource::Classes {
            gen_seed: keys.parse("gen_seed", 1u64)?,
            dim: keys.parse_required("dim")?,
            class_sizes: keys.int_list("class_sizes")?,
            separation: keys.parse_required("class_separation")?,
            spread: keys.parse("class_spread", 1.0f64)?,
        },
        other => return Err(bad(format!("unknown dataset source '{other}'"))),
    };

    let inject = match keys.get("inject_fraction") {
        None => None,
        Some(v) => {
            let fraction: f64 = v
                .parse()
                .map_err(|_| bad(format!("inject_fraction: cannot parse '{v}'")))?;
            if fraction == 0.0 {
                None
            } else {
                Some(InjectSpec {
                    fraction,
                    xi: keys.parse_required("inject_xi")?,
                    seed: keys.parse("inject_seed", 1u64)?,
                })
            }
        }
    };

    let outlier_classes = match keys.get("outlier_classes") {
        None => None,
        Some(_) => Some(keys.int_list("outlier_classes")?),
    };
    if inject.is_some() && outlier_classes.is_some() {
        return Err(bad(
            "inject_fraction and outlier_classes are mutually exclusive".to_string(),
        ));
    }

    let z = match keys.required("z")? {
        "auto" => ZSpec::Auto,
        v => ZSpec::Fixed(
            v.parse()
                .map_err(|_| bad(format!("key 'z': expected integer or 'auto', got '{v}'")))?,
        ),
    };

    let objective: Objective = keys
        .required("objective")?
        .parse()
        .map_err(|e: okmeans::Error| bad(e.to_string()))?;

    let methods: Vec<MethodSpec> = split_top_level(keys.required("methods")?)
        .iter()
        .map(|entry| parse_method(entry))
        .collect::<Result<_>>()?;
    if methods.is_empty() {
        return Err(bad("methods list is empty".to_string()));
    }

    let coreset_size = match keys.parse("coreset_size", 0usize)? {
        0 => None,
        m => Some(m),
    };

    let seeds: Vec<u64> = keys.int_list("seeds")?;
    if seeds.is_empty() {
        return Err(bad("seeds list is empty".to_string()));
    }

    Ok(ExperimentConfig {
        name: keys.get("name").unwrap_or(default_name).to_string(),
        source,
        normalize: keys.bool("normalize", false)?,
        inject,
        outlier_classes,
        k: keys.parse_required("k")?,
        z,
        objective,
        methods,
        coreset_size,
        seeds,
        max_iters: keys.parse("max_iters", 100usize)?,
        rel_tol: keys.parse("rel_tol", 1e-6f64)?,
        restarts: keys.parse("restarts", 3usize)?,
        timing: keys.bool("timing", true)?,
    })
}

/// Loads a config file and applies overrides.
pub fn load_config(path: impl AsRef<Path>, overrides: &[String]) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    let mut map = parse_kv_text(&text)?;
    apply_overrides(&mut map, overrides)?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".to_string());
    build_config(&map, &stem)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_text() -> &'static str {
        "\
# demo config
name = demo
dataset = planted
dim = 2
clusters = 2
cluster_size = 20
planted_outliers = 2
separation = 20
spread = 1.0
k = 2
z = auto
objective = kmeans
methods = okmeans(c=3), okmeans2(c=3, m=30), kmeanspp
seeds = 1,2,3
"
    }

    #[test]
    fn parses_demo_config() {
        let map = parse_kv_text(demo_text()).unwrap();
        let cfg = build_config(&map, "fallback").unwrap();
        assert_eq!(cfg.name, "demo");
        assert_eq!(cfg.k, 2);
        assert_eq!(cfg.z, ZSpec::Auto);
        assert_eq!(cfg.methods.len(), 3);
        assert_eq!(cfg.methods[1].coreset, Some(30));
        assert!(matches!(cfg.methods[2].kind, MethodKind::KMeansPP));
        assert_eq!(cfg.seeds, vec![1, 2, 3]);
        assert!(cfg.timing);
    }

    #[test]
    fn overrides_win() {
        let mut map = parse_kv_text(demo_text()).unwrap();
        apply_overrides(&mut map, &["k=5".to_string(), "seeds=9".to_string()]).unwrap();
        let cfg = build_config(&map, "fallback").unwrap();
        assert_eq!(cfg.k, 5);
        assert_eq!(cfg.seeds, vec![9]);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let mut map = parse_kv_text(demo_text()).unwrap();
        map.insert("tyop".to_string(), "1".to_string());
        assert!(build_config(&map, "x").is_err());
    }

    #[test]
    fn method_parsing_errors() {
        assert!(parse_method("okmeans").is_err()); // needs c
        assert!(parse_method("okmeans(c=oops)").is_err());
        assert!(parse_method("mystery(c=3)").is_err());
        assert!(parse_method("okmeans(c=3").is_err());
        let m = parse_method("constant_k(K=5)").unwrap();
        assert!(matches!(m.kind, MethodKind::ConstantK { k: 5 }));
    }

    #[test]
    fn inject_and_label_outliers_conflict() {
        let mut map = parse_kv_text(demo_text()).unwrap();
        map.insert("inject_fraction".to_string(), "0.01".to_string());
        map.insert("inject_xi".to_string(), "5".to_string());
        map.insert("outlier_classes".to_string(), "1".to_string());
        assert!(build_config(&map, "x").is_err());
    }

    #[test]
    fn z_fixed_parses() {
        let mut map = parse_kv_text(demo_text()).unwrap();
        map.insert("z".to_string(), "17".to_string());
        let cfg = build_config(&map, "x").unwrap();
        assert_eq!(cfg.z, ZSpec::Fixed(17));
    }
}
