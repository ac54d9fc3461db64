//! Benchmark suite files: a JSON array of instance descriptions.

use boxview_core::models::{InstanceSpec, Metric, ModelVariant};
use serde::Deserialize;

/// One suite entry. Fields not used by the given problem are rejected only
/// when required ones are missing.
#[derive(Clone, Debug, Deserialize)]
pub struct SuiteEntry {
    pub problem: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub d: Option<i64>,
    #[serde(default)]
    pub c: Option<usize>,
    #[serde(default)]
    pub a: Option<usize>,
    #[serde(default)]
    pub a1: Option<usize>,
    #[serde(default)]
    pub a2: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub w: Option<usize>,
    #[serde(default)]
    pub g: Option<usize>,
    #[serde(default)]
    pub s: Option<usize>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub length: Option<i64>,
    #[serde(default)]
    pub alphabet: Option<i64>,
    #[serde(default)]
    pub strings: Option<usize>,
    #[serde(default)]
    pub len: Option<usize>,
    #[serde(default)]
    pub dist: Option<i64>,
    #[serde(default)]
    pub metric: Option<String>,
    /// Restrict this entry to the listed variants (default: all allowed).
    #[serde(default)]
    pub variants: Option<Vec<String>>,
}

impl SuiteEntry {
    pub fn to_spec(&self) -> Result<InstanceSpec, String> {
        let need = |v: Option<usize>, name: &str| {
            v.ok_or_else(|| format!("{}: missing field {name}", self.problem))
        };
        let need_i = |v: Option<i64>, name: &str| {
            v.ok_or_else(|| format!("{}: missing field {name}", self.problem))
        };
        match self.problem.as_str() {
            "linear" => Ok(InstanceSpec::Linear {
                n: need(self.n, "n")?,
                d: need_i(self.d, "d")?,
                c: need(self.c, "c")?,
                a: need(self.a, "a")?,
                seed: self.seed.unwrap_or(1),
            }),
            "nonlinear" => Ok(InstanceSpec::Nonlinear {
                n: need(self.n, "n")?,
                d: need_i(self.d, "d")?,
                c: need(self.c, "c")?,
                a1: need(self.a1, "a1")?,
                a2: need(self.a2, "a2")?,
                seed: self.seed.unwrap_or(1),
            }),
            "golfers" => Ok(InstanceSpec::Golfers {
                w: need(self.w, "w")?,
                g: need(self.g, "g")?,
                s: need(self.s, "s")?,
            }),
            "golomb" => Ok(InstanceSpec::Golomb {
                m: need(self.m, "m")?,
                length: need_i(self.length, "length")?,
            }),
            "labs" => Ok(InstanceSpec::Labs { n: need(self.n, "n")? }),
            "ecc" => {
                let metric = match self.metric.as_deref() {
                    Some("hamming") | None => Metric::Hamming,
                    Some("lee") => Metric::Lee,
                    Some(other) => return Err(format!("unknown metric {other}")),
                };
                Ok(InstanceSpec::Ecc {
                    a: need_i(self.alphabet, "alphabet")?,
                    n: need(self.strings, "strings")?,
                    l: need(self.len, "len")?,
                    d: need_i(self.dist, "dist")?,
                    metric,
                })
            }
            other => Err(format!("unknown problem {other}")),
        }
    }

    pub fn variants(&self, spec: &InstanceSpec) -> Result<Vec<ModelVariant>, String> {
        let allowed = spec.allowed_variants();
        match &self.variants {
            None => Ok(allowed),
            Some(names) => names
                .iter()
                .map(|n| {
                    let v = ModelVariant::parse(n).ok_or_else(|| format!("unknown variant {n}"))?;
                    if allowed.contains(&v) {
                        Ok(v)
                    } else {
                        Err(format!("{} does not support {n}", spec.id()))
                    }
                })
                .collect(),
        }
    }
}

pub fn parse_suite(json: &str) -> Result<Vec<SuiteEntry>, String> {
    serde_json::from_str(json).map_err(|e| format!("suite file: {e}"))
}

/// The shipped benchmark suite. Random-system seeds were calibrated by
/// experiment (the generation protocol leaves difficulty to the seed, so
/// trivially infeasible draws were skipped). The default shapes keep
/// runtimes in fractions of a second per variant; `full` switches to the
/// larger shapes with runtimes up to minutes.
pub fn default_suite(full: bool) -> Vec<InstanceSpec> {
    if full {
        vec![
            InstanceSpec::Linear { n: 14, d: 5, c: 9, a: 4, seed: 3 },
            InstanceSpec::Nonlinear { n: 20, d: 20, c: 10, a1: 4, a2: 2, seed: 10 },
            InstanceSpec::Nonlinear { n: 50, d: 5, c: 20, a1: 4, a2: 3, seed: 1 },
            InstanceSpec::Nonlinear { n: 14, d: 5, c: 6, a1: 4, a2: 2, seed: 3 },
            InstanceSpec::Golfers { w: 5, g: 3, s: 2 },
            InstanceSpec::Golomb { m: 9, length: 44 },
            InstanceSpec::Golomb { m: 10, length: 55 },
            InstanceSpec::Labs { n: 15 },
            InstanceSpec::Labs { n: 16 },
            InstanceSpec::Ecc { a: 4, n: 8, l: 6, d: 5, metric: Metric::Hamming },
            InstanceSpec::Ecc { a: 3, n: 4, l: 4, d: 4, metric: Metric::Lee },
        ]
    } else {
        vec![
            InstanceSpec::Linear { n: 10, d: 4, c: 6, a: 3, seed: 2 },
            InstanceSpec::Nonlinear { n: 12, d: 6, c: 4, a1: 4, a2: 2, seed: 14 },
            InstanceSpec::Nonlinear { n: 12, d: 6, c: 4, a1: 4, a2: 2, seed: 18 },
            InstanceSpec::Nonlinear { n: 13, d: 5, c: 5, a1: 4, a2: 2, seed: 10 },
            InstanceSpec::Nonlinear { n: 14, d: 5, c: 6, a1: 4, a2: 2, seed: 17 },
            InstanceSpec::Golfers { w: 5, g: 3, s: 2 },
            InstanceSpec::Golomb { m: 8, length: 34 },
            InstanceSpec::Golomb { m: 9, length: 44 },
            InstanceSpec::Labs { n: 13 },
            InstanceSpec::Labs { n: 14 },
            InstanceSpec::Ecc { a: 4, n: 8, l: 6, d: 5, metric: Metric::Hamming },
            InstanceSpec::Ecc { a: 4, n: 5, l: 5, d: 6, metric: Metric::Lee },
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries_for_every_problem() {
        let json = r#"[
            {"problem":"linear","n":4,"d":3,"c":2,"a":2,"seed":5},
            {"problem":"nonlinear","n":4,"d":2,"c":1,"a1":2,"a2":2},
            {"problem":"golfers","w":2,"g":2,"s":2},
            {"problem":"golomb","m":5,"length":11,"variants":["views-static","vars"]},
            {"problem":"labs","n":5},
            {"problem":"ecc","alphabet":2,"strings":2,"len":3,"dist":2,"metric":"lee"}
        ]"#;
        let entries = parse_suite(json).unwrap();
        assert_eq!(entries.len(), 6);
        for e in &entries {
            let spec = e.to_spec().unwrap();
            let variants = e.variants(&spec).unwrap();
            assert!(!variants.is_empty());
        }
    }

    #[test]
    fn missing_fields_are_reported() {
        let entries = parse_suite(r#"[{"problem":"golomb","m":5}]"#).unwrap();
        assert!(entries[0].to_spec().is_err());
    }
}
