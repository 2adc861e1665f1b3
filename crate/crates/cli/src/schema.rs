//! Input documents. Every object rejects unknown fields.
//!
//! Complex numbers are written as `[re, im]`.

use serde::{Deserialize, Serialize};

pub const INPUT_SCHEMA: &str = "smero.input/1";
pub const RESULT_SCHEMA: &str = "smero.result/1";

pub type ComplexPair = [f64; 2];

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDoc {
    pub schema: String,
    #[serde(default)]
    pub potential: Option<PotentialInput>,
    #[serde(default)]
    pub space: Option<SpaceInput>,
    #[serde(default)]
    pub lattice: Option<LatticeInput>,
    #[serde(default)]
    pub check: Option<CheckInput>,
    #[serde(default)]
    pub basis: Option<BasisInput>,
    #[serde(default)]
    pub ip: Option<IpInput>,
    #[serde(default)]
    pub count: Option<CountInput>,
    #[serde(default)]
    pub evolve: Option<EvolveInput>,
    #[serde(default)]
    pub bloch: Option<BlochInput>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialInput {
    Rational {
        poles: Vec<PoleInput>,
        #[serde(default)]
        regular: Vec<f64>,
    },
    Soliton {
        k: Vec<f64>,
        phase: Vec<f64>,
        sign: Vec<i8>,
        #[serde(default)]
        time: f64,
    },
    Elliptic {
        omega1: f64,
        omega2: ComplexPair,
        n: u32,
        #[serde(default)]
        shift: f64,
    },
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PoleInput {
    pub position: f64,
    pub r: u32,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceInput {
    pub poles: Vec<PoleInput>,
    pub mode: ModeInput,
    #[serde(default)]
    pub detour_radius: Option<f64>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeInput {
    Compact { a: f64, b: f64 },
    Bloch { period: f64, kappa: ComplexPair },
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeInput {
    pub omega1: f64,
    pub omega2: ComplexPair,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckInput {
    pub window: [f64; 2],
    #[serde(default = "default_order")]
    pub order: i32,
    #[serde(default)]
    pub alphas: Option<Vec<ComplexPair>>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisInput {
    pub center: ComplexPair,
    pub alpha: ComplexPair,
    #[serde(default = "default_order")]
    pub order: i32,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IpInput {
    pub f: ElementInput,
    pub g: ElementInput,
    #[serde(default)]
    pub orientation: OrientationInput,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum OrientationInput {
    #[default]
    Upper,
    Lower,
}

/// A linear combination of built-in admissible elements.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementInput {
    pub terms: Vec<TermInput>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TermInput {
    /// Windowed `(x - x_j)^degree` at pole `pole`.
    Monomial {
        pole: usize,
        degree: i32,
        #[serde(default = "one")]
        coeff: ComplexPair,
    },
    Bump {
        center: f64,
        width: f64,
        #[serde(default)]
        freq: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default = "one")]
        coeff: ComplexPair,
    },
    /// Random admissible element drawn from `--seed` plus `offset`.
    Random {
        #[serde(default)]
        offset: u64,
        #[serde(default = "one")]
        coeff: ComplexPair,
    },
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountInput {
    #[serde(default)]
    pub basis_size: Option<usize>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveInput {
    pub t_range: [f64; 2],
    pub t_steps: usize,
    pub window: [f64; 2],
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochInput {
    pub kappa: ComplexPair,
    #[serde(default = "default_pole_shift")]
    pub pole_shift: f64,
    #[serde(default = "default_bloch_count")]
    pub count: usize,
}

fn default_order() -> i32 {
    12
}

fn one() -> ComplexPair {
    [1.0, 0.0]
}

fn default_pole_shift() -> f64 {
    0.3
}

fn default_bloch_count() -> usize {
    12
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> serde_json::Result<InputDoc> {
        serde_json::from_str(text)
    }

    #[test]
    fn defaults_fill_optional_fields() {
        let doc = parse(
            r#"{"schema":"smero.input/1",
                "potential":{"kind":"elliptic","omega1":1,"omega2":[0,1],"n":1},
                "basis":{"center":[0,0],"alpha":[1,0]}}"#,
        )
        .unwrap();
        assert!(matches!(doc.potential, Some(PotentialInput::Elliptic { shift, .. }) if shift == 0.0));
        assert_eq!(doc.basis.unwrap().order, 12);
    }

    #[test]
    fn unknown_fields_are_rejected_at_every_level() {
        for text in [
            r#"{"schema":"smero.input/1","extra":0}"#,
            r#"{"schema":"smero.input/1","lattice":{"omega1":1,"omega2":[0,1],"tau":2}}"#,
            r#"{"schema":"smero.input/1","potential":{"kind":"rational","poles":[],"scale":1}}"#,
            r#"{"schema":"smero.input/1","space":{"poles":[],"mode":{"kind":"compact","a":0,"b":1,"c":2}}}"#,
        ] {
            assert!(parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn element_terms_are_tagged() {
        let e: ElementInput = serde_json::from_str(
            r#"{"terms":[{"kind":"random","offset":2},{"kind":"monomial","pole":0,"degree":-1,"coeff":[0,1]}]}"#,
        )
        .unwrap();
        assert!(matches!(
            e.terms[0],
            TermInput::Random {
                offset: 2,
                coeff: [1.0, 0.0]
            }
        ));
        assert!(matches!(
            e.terms[1],
            TermInput::Monomial {
                degree: -1,
                coeff: [0.0, 1.0],
                ..
            }
        ));
    }
}
