//! JSON input schemas. Rationals are accepted as integers or `"p/q"`
//! strings; unknown fields are rejected so typos surface with a pointer.

use std::fmt;
use std::sync::Arc;

use normvol::hypersurface::{Family, WeightedHypersurface};
use normvol::ideals::MonomialIdeal;
use normvol::rational::{parse_rational, Rational};
use normvol::toric::ToricSingularity;
use normvol::{Error, Lattice, RationalVector};
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

/// A rational literal: JSON integer or `"p/q"` string.
#[derive(Clone, Debug, PartialEq)]
pub struct Q(pub Rational);

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Q;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a rational string \"p/q\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
                Ok(Q(Rational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
                Ok(Q(Rational::from_integer(v.into())))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
                parse_rational(v).map(Q).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

fn vector(v: &[Q]) -> RationalVector {
    RationalVector::new(v.iter().map(|q| q.0.clone()).collect())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CyclicQuotient {
    pub r: u64,
    pub a: Vec<i64>,
}

/// `{"cone_rays": [...], "lattice": [...]}` or `{"cyclic_quotient": {...}}`.
/// `lattice` lists generators of `N` and defaults to the standard lattice.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToricInput {
    pub lattice: Option<Vec<Vec<Q>>>,
    pub cone_rays: Option<Vec<Vec<Q>>>,
    pub cyclic_quotient: Option<CyclicQuotient>,
}

impl ToricInput {
    pub fn build(&self) -> Result<ToricSingularity, Error> {
        match (&self.cone_rays, &self.cyclic_quotient) {
            (Some(rays), None) => {
                let rays: Vec<RationalVector> = rays.iter().map(|r| vector(r)).collect();
                let dim = rays.first().map(|r| r.dim()).ok_or_else(|| Error::InvalidInput("cone_rays is empty".into()))?;
                let lattice = match &self.lattice {
                    Some(gens) => Lattice::generated_by(dim, &gens.iter().map(|g| vector(g)).collect::<Vec<_>>())?,
                    None => Lattice::standard(dim),
                };
                ToricSingularity::new(lattice, &rays)
            }
            (None, Some(q)) => {
                if self.lattice.is_some() {
                    return Err(Error::InvalidInput("lattice cannot be combined with cyclic_quotient".into()));
                }
                ToricSingularity::from_cyclic_quotient(q.r, &q.a)
            }
            _ => Err(Error::InvalidInput("give exactly one of cone_rays or cyclic_quotient".into())),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothAmbient {
    pub smooth: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Ambient {
    Smooth(SmoothAmbient),
    Toric(ToricInput),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealInput {
    pub generators: Vec<Vec<Q>>,
    pub ambient: Option<Ambient>,
}

impl IdealInput {
    pub fn build(&self) -> Result<MonomialIdeal, Error> {
        let gens: Vec<RationalVector> = self.generators.iter().map(|g| vector(g)).collect();
        let first = gens.first().ok_or_else(|| Error::InvalidInput("generators is empty".into()))?;
        let ambient = match &self.ambient {
            None => ToricSingularity::smooth(first.dim()),
            Some(Ambient::Smooth(s)) => ToricSingularity::smooth(s.smooth),
            Some(Ambient::Toric(t)) => t.build()?,
        };
        MonomialIdeal::new(Arc::new(ambient), gens)
    }
}

/// A term is either a bare exponent list or `{"exponents": [...],
/// "coefficient": ...}`; coefficients are not used.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Term {
    Bare(Vec<u32>),
    WithCoefficient {
        exponents: Vec<u32>,
        #[allow(dead_code)]
        coefficient: serde_json::Value,
    },
}

impl Term {
    fn exponents(&self) -> &[u32] {
        match self {
            Term::Bare(e) | Term::WithCoefficient { exponents: e, .. } => e,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperInput {
    pub ambient_dim: Option<usize>,
    pub terms: Option<Vec<Term>>,
    #[serde(default)]
    pub nondegenerate: bool,
    pub family: Option<Family>,
}

impl HyperInput {
    /// Builds the hypersurface and returns any warnings for stderr.
    pub fn build(&self) -> Result<(WeightedHypersurface, Vec<String>), Error> {
        let mut warnings = Vec::new();
        let terms: Option<Vec<Vec<u32>>> = self.terms.as_ref().map(|ts| ts.iter().map(|t| t.exponents().to_vec()).collect());
        if self.terms.iter().flatten().any(|t| matches!(t, Term::WithCoefficient { .. })) {
            warnings.push("coefficients are ignored; only the exponents enter the computation".to_string());
        }
        let h = match (self.family, terms) {
            (Some(f), given) => {
                let h = WeightedHypersurface::from_family(f)?;
                if let Some(mut t) = given {
                    let mut expected = h.terms().to_vec();
                    t.sort();
                    expected.sort();
                    if t != expected {
                        return Err(Error::InvalidInput(format!("terms do not match the {f} family")));
                    }
                }
                if let Some(n) = self.ambient_dim {
                    if n != h.ambient_dim() {
                        return Err(Error::DimensionMismatch { expected: h.ambient_dim(), found: n });
                    }
                }
                h
            }
            (None, Some(t)) => {
                let n = self.ambient_dim.or_else(|| t.first().map(|x| x.len())).unwrap_or(0);
                WeightedHypersurface::new(n, t, self.nondegenerate)?
            }
            (None, None) => return Err(Error::InvalidInput("give terms or a family".into())),
        };
        Ok((h, warnings))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KstabInput {
    pub fano_fan_rays: Vec<Vec<i64>>,
    pub r: Q,
}

impl KstabInput {
    pub fn rays(&self) -> Vec<RationalVector> {
        self.fano_fan_rays.iter().map(|r| RationalVector::from_i64s(r)).collect()
    }
}

/// Parses JSON into `T`, reporting failures with a JSON pointer to the
/// offending field.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, (String, String)> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let mut pointer = String::new();
        for seg in e.path().iter() {
            match seg {
                serde_path_to_error::Segment::Seq { index } => pointer.push_str(&format!("/{index}")),
                serde_path_to_error::Segment::Map { key } => {
                    pointer.push('/');
                    pointer.push_str(&key.replace('~', "~0").replace('/', "~1"));
                }
                serde_path_to_error::Segment::Enum { variant } => pointer.push_str(&format!("/{variant}")),
                serde_path_to_error::Segment::Unknown => pointer.push_str("/?"),
            }
        }
        (pointer, e.into_inner().to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointer_names_the_bad_entry() {
        let err = parse::<ToricInput>(r#"{"cone_rays": [[1, 0], [0, "x"]]}"#).unwrap_err();
        assert_eq!(err.0, "/cone_rays/1/1");
        let err = parse::<ToricInput>(r#"{"cone_ray": []}"#).unwrap_err();
        assert!(err.1.contains("unknown field"));
    }

    #[test]
    fn rationals_from_strings_and_integers() {
        let t: ToricInput = parse(r#"{"cone_rays": [[1, 0], ["1/2", 1]]}"#).unwrap();
        assert_eq!(t.cone_rays.unwrap()[1][0].0, Rational::new(1.into(), 2.into()));
    }

    #[test]
    fn family_terms_must_match() {
        let h: HyperInput = parse(r#"{"family": {"name": "A_k", "dim": 2, "k": 2}, "terms": [[2,0,0],[0,2,0],[0,0,3]]}"#).unwrap();
        assert!(h.build().is_err());
        let h: HyperInput =
            parse(r#"{"terms": [{"exponents": [2,0], "coefficient": 1}, [0,3]], "nondegenerate": true}"#).unwrap();
        let (h, warnings) = h.build().unwrap();
        assert_eq!(h.ambient_dim(), 2);
        assert_eq!(warnings.len(), 1);
    }
}
