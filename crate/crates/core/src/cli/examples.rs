//! Bundled example fixtures. Each carries an `[expect]` table that
//! `reproduce-example` checks.

use super::config::{parse_config, AnalysisConfig, ConfigErrors};
use super::report::Report;
use super::run::{run, RunOptions};
use crate::operators::Setting;

pub struct Fixture {
    pub name: &'static str,
    /// Example numbers this fixture belongs to.
    pub example: &'static str,
    pub text: &'static str,
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "product_split",
        example: "3.9",
        text: include_str!("../../fixtures/product_split.toml"),
    },
    Fixture {
        name: "exp_power_interval",
        example: "3.10",
        text: include_str!("../../fixtures/exp_power_interval.toml"),
    },
    Fixture {
        name: "log_atoms",
        example: "3.11",
        text: include_str!("../../fixtures/log_atoms.toml"),
    },
    Fixture {
        name: "range_interval",
        example: "3.12",
        text: include_str!("../../fixtures/range_interval.toml"),
    },
    Fixture {
        name: "range_rational",
        example: "3.12",
        text: include_str!("../../fixtures/range_rational.toml"),
    },
];

/// Fixtures selected by example number, fixture name or `all`.
pub fn select(name: &str) -> Vec<&'static Fixture> {
    FIXTURES
        .iter()
        .filter(|f| name == "all" || f.example == name || f.name == name)
        .collect()
}

pub fn known_names() -> Vec<&'static str> {
    let mut v: Vec<&str> = FIXTURES.iter().flat_map(|f| [f.example, f.name]).collect();
    v.dedup();
    v.push("all");
    v
}

impl Fixture {
    pub fn config(&self) -> Result<AnalysisConfig, ConfigErrors> {
        parse_config(self.text)
    }

    /// Runs the fixture with `adjust` applied to its settings.
    pub fn run_with(&self, adjust: impl FnOnce(Setting) -> Setting, opts: &RunOptions) -> Result<Report, ConfigErrors> {
        let mut cfg = self.config()?;
        cfg.setting = adjust(cfg.setting);
        let mut rep = run(&cfg, opts);
        rep.name = Some(self.name.to_string());
        Ok(rep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        for f in FIXTURES {
            let c = f.config().unwrap_or_else(|e| panic!("{}: {e}", f.name));
            assert!(!c.expect.is_empty(), "{}", f.name);
        }
        assert_eq!(select("3.12").len(), 2);
        assert_eq!(select("all").len(), FIXTURES.len());
        assert!(select("9.99").is_empty());
    }

    #[test]
    fn interval_fixture_has_the_catalog_triple() {
        let c = select("3.10")[0].config().unwrap();
        let s = c.space.as_ref().unwrap();
        let k = s.continuum().unwrap();
        assert_eq!((k.a, k.b), (2.0, 3.0));
        let super::super::config::Request::CheckMult { phi1, phi2, phi3, .. } = &c.requests[2].request else {
            panic!()
        };
        assert_eq!(phi1.value.name(), "exp_power{p=2}");
        assert_eq!(phi2.value.name(), "power{p=2}");
        assert_eq!(phi3.as_ref().unwrap().value.name(), "l_log_l{p=2}");
    }
}
