//! JSON problem documents.
//!
//! Polynomials are either term lists `[[numerator, denominator, [e1, …, en]], …]`
//! or infix strings such as `"x1^3 + x1 - x2"`.

use num::{BigInt, Signed};
use pvidim::model::{AcqAssertion, ConstraintSet, ProblemKind, ProblemSpec};
use pvidim::poly::Degree;
use pvidim::{Polynomial, Rational};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::infix::parse_polynomial;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyText {
    Terms(Vec<(i64, i64, Vec<u32>)>),
    Infix(String),
}

impl PolyText {
    pub fn to_polynomial(&self, n: usize) -> Result<Polynomial, CliError> {
        match self {
            PolyText::Infix(s) => parse_polynomial(s, n).map_err(|e| CliError::Input(format!("{s:?}: {e}"))),
            PolyText::Terms(ts) => {
                let mut terms = Vec::with_capacity(ts.len());
                for (p, q, e) in ts {
                    if *q <= 0 {
                        return Err(CliError::Input(format!("denominator {q} must be positive")));
                    }
                    if e.len() != n {
                        return Err(CliError::Input(format!("exponent vector {e:?} should have length {n}")));
                    }
                    terms.push((e.clone(), Rational::new(BigInt::from(*p), BigInt::from(*q))));
                }
                Ok(Polynomial::from_terms(n, terms)?)
            }
        }
    }

    /// Term-list form. Coefficients must fit in `i64`.
    pub fn from_polynomial(p: &Polynomial) -> Result<Self, CliError> {
        let mut ts = Vec::new();
        for (m, c) in p.terms() {
            let num = i64::try_from(c.numer()).map_err(|_| CliError::Input(format!("coefficient {c} is too large")))?;
            let den = i64::try_from(c.denom()).map_err(|_| CliError::Input(format!("coefficient {c} is too large")))?;
            ts.push((num, den, m.exponents().to_vec()));
        }
        Ok(PolyText::Terms(ts))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindText {
    Pvi,
    Pcp,
    Fracopt,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertions {
    /// Every `g_i` is convex.
    #[serde(default)]
    pub convex: bool,
    /// `q > 0` on `K`.
    #[serde(default)]
    pub q_positive: bool,
    /// Abadie's constraint qualification holds on `K`.
    #[serde(default)]
    pub acq: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub face_budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minor_budget: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub schema_version: u32,
    pub kind: KindText,
    pub n: usize,
    pub m: usize,
    pub l: usize,
    /// Maximal degree of the data.
    pub d: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub field: Vec<PolyText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<PolyText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<PolyText>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub g: Vec<PolyText>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub h: Vec<PolyText>,
    /// Marks `g` as the box `[0, δ]ⁿ` with this width.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_width: Option<String>,
    #[serde(default)]
    pub assertions: Assertions,
    #[serde(default)]
    pub config: ConfigOverrides,
}

fn degree(p: &Polynomial) -> usize {
    match p.degree() {
        Degree::NegInfinity => 0,
        Degree::Finite(d) => d as usize,
    }
}

impl ProblemDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let doc: ProblemDocument = serde_json::from_str(text).map_err(|e| CliError::Input(format!("problem file: {e}")))?;
        doc.to_spec()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    fn polys(&self, ps: &[PolyText]) -> Result<Vec<Polynomial>, CliError> {
        ps.iter().map(|p| p.to_polynomial(self.n)).collect()
    }

    /// Validate and build the problem.
    pub fn to_spec(&self) -> Result<ProblemSpec, CliError> {
        let bad = |m: String| Err(CliError::Input(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        let field = self.polys(&self.field)?;
        let g = self.polys(&self.g)?;
        let h = self.polys(&self.h)?;
        let pq = match (&self.p, &self.q) {
            (Some(p), Some(q)) => Some((p.to_polynomial(self.n)?, q.to_polynomial(self.n)?)),
            (None, None) => None,
            _ => return bad("p and q must be given together".into()),
        };
        let mut all: Vec<&Polynomial> = field.iter().chain(&g).chain(&h).collect();
        if let Some((p, q)) = &pq {
            all.extend([p, q]);
        }
        if let Some(big) = all.iter().find(|p| degree(p) > self.d) {
            return bad(format!("{big} has degree above d = {}", self.d));
        }
        let spec = match self.kind {
            KindText::Pvi | KindText::Pcp if pq.is_some() => return bad("p and q belong to fracopt problems".into()),
            KindText::Fracopt if !field.is_empty() => return bad("fracopt problems take p and q, not field".into()),
            KindText::Pcp => {
                if self.m != self.n || self.l != 0 || !g.is_empty() || !h.is_empty() {
                    return bad("pcp problems have m = n, l = 0 and no explicit constraints".into());
                }
                if field.len() != self.n {
                    return bad(format!("field has {} components, expected {}", field.len(), self.n));
                }
                ProblemSpec::pcp(field)?
            }
            KindText::Pvi | KindText::Fracopt => {
                if g.len() != self.m || h.len() != self.l {
                    return bad(format!("declared m = {}, l = {} but found {} and {}", self.m, self.l, g.len(), h.len()));
                }
                if g.iter().any(|p| !p.is_affine()) && !self.assertions.convex {
                    return bad("non-affine g requires assertions.convex".into());
                }
                let mut k = ConstraintSet::new(self.n, g, h)?;
                if let Some(w) = &self.box_width {
                    k = k.with_box_marker(parse_rational(w)?);
                }
                if self.kind == KindText::Pvi {
                    if field.len() != self.n {
                        return bad(format!("field has {} components, expected {}", field.len(), self.n));
                    }
                    ProblemSpec::pvi(k, field)?
                } else {
                    let Some((p, q)) = pq else { return bad("fracopt problems need p and q".into()) };
                    if !self.assertions.q_positive {
                        return bad("fracopt problems require assertions.q_positive".into());
                    }
                    ProblemSpec::fracopt(k, p, q)?
                }
            }
        };
        Ok(if self.assertions.acq { spec.with_acq(AcqAssertion::UserAsserted) } else { spec })
    }

    /// Term-list document for a problem with `i64` coefficients.
    pub fn from_spec(spec: &ProblemSpec) -> Result<Self, CliError> {
        let k = &spec.constraints;
        let n = spec.n();
        let texts = |ps: &[Polynomial]| ps.iter().map(PolyText::from_polynomial).collect::<Result<Vec<_>, _>>();
        let mut all: Vec<&Polynomial> = spec.field.iter().chain(k.g()).chain(k.h()).collect();
        let (kind, field, g, h, p, q) = match spec.kind {
            ProblemKind::Pvi => (KindText::Pvi, texts(&spec.field)?, texts(k.g())?, texts(k.h())?, None, None),
            ProblemKind::Pcp => (KindText::Pcp, texts(&spec.field)?, vec![], vec![], None, None),
            ProblemKind::FracOpt => {
                let fr = spec.fraction.as_ref().expect("fractional programs carry p and q");
                all = k.g().iter().chain(k.h()).chain([&fr.p, &fr.q]).collect();
                let p = Some(PolyText::from_polynomial(&fr.p)?);
                let q = Some(PolyText::from_polynomial(&fr.q)?);
                (KindText::Fracopt, vec![], texts(k.g())?, texts(k.h())?, p, q)
            }
        };
        let d = all.iter().map(|p| degree(p)).max().unwrap_or(0);
        let convex = k.g().iter().any(|p| !p.is_affine());
        Ok(ProblemDocument {
            schema_version: SCHEMA_VERSION,
            kind,
            n,
            m: k.m(),
            l: k.l(),
            d,
            field,
            p,
            q,
            g,
            h,
            box_width: k.delta_box().map(|d| d.to_string()),
            assertions: Assertions {
                convex,
                q_positive: spec.kind == ProblemKind::FracOpt,
                acq: spec.acq == AcqAssertion::UserAsserted,
            },
            config: ConfigOverrides::default(),
        })
    }
}

/// A coordinate given as an integer, `p/q`, or a decimal such as `-0.25`.
pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let s = s.trim();
    let bad = || CliError::Input(format!("cannot read {s:?} as a number"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if !q.is_positive() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let v = Rational::new(digits, BigInt::from(10).pow(frac.len() as u32));
    Ok(if neg { -v } else { v })
}

pub fn parse_point(s: &str) -> Result<Vec<Rational>, CliError> {
    s.split(',').map(parse_rational).collect()
}
