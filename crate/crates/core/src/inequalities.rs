//! Registry of the inequalities and equalities under test. Each check
//! evaluates its two sides from a context and operands, and carries the
//! optimizers' gaps through to a one-sided tolerance.
//!
//! Every radius term is a pair `(value, gap)` where the true quantity lies in
//! `[value, value + gap]`. A check's certified gap is the total amount by
//! which moving single terms to the top of their intervals could change the
//! verdict: for `<=` relations only moves that decrease the slack count,
//! which in practice are the terms on the larger side.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, I};
use crate::numerics::svd;
use crate::oracle::{buzano_sample, OracleConfig};
use crate::radii::{self, RadiiConfig, RadiusResult};
use crate::semihilbert::AContext;

/// Relative part of the pass tolerance.
pub const REL_TOL: f64 = 1e-7;

macro_rules! check_ids {
    ($($v:ident => $name:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum CheckId {
            $(#[serde(rename = $name)] $v,)*
        }

        impl CheckId {
            pub const ALL: &'static [CheckId] = &[$(CheckId::$v,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(CheckId::$v => $name,)*
                }
            }
        }

        impl FromStr for CheckId {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                let up: String = s.chars().map(|c| if c == '-' { '_' } else { c.to_ascii_uppercase() }).collect();
                match up.as_str() {
                    $($name => Ok(CheckId::$v),)*
                    _ => Err(Error::BadParameter("unknown check id")),
                }
            }
        }
    };
}

check_ids! {
    Th1Lower => "TH1_LOWER",
    Th1Upper => "TH1_UPPER",
    CorSelfadjLower => "COR_SELFADJ_LOWER",
    CorPcor => "COR_PCOR",
    CorCor1 => "COR_COR1",
    ThProduct => "TH_PRODUCT",
    PropRankone => "PROP_RANKONE",
    LemBuzano => "LEM_BUZANO",
    ThTheorem1 => "TH_THEOREM1",
    CorTheorem1T => "COR_THEOREM1_T",
    Th3 => "TH3",
    Th3Alpha2 => "TH3_ALPHA2",
    Th3Single => "TH3_SINGLE",
    Th2 => "TH2",
    Cor2 => "COR2",
    Eq5 => "EQ5",
    Th4Lower => "TH4_LOWER",
    Th4Upper => "TH4_UPPER",
    RemarkChain => "REMARK_CHAIN",
    BohrScalar => "BOHR_SCALAR",
    Sandwich => "SANDWICH",
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Operands a check consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Signature {
    /// `(ctx, B, C)`
    Pair,
    /// `(ctx, T)`, passed as `B`
    Single,
    /// `(ctx)` only
    Context,
}

impl Signature {
    pub fn describe(self) -> &'static str {
        match self {
            Signature::Pair => "(ctx, B, C)",
            Signature::Single => "(ctx, T)",
            Signature::Context => "(ctx)",
        }
    }
}

/// Parameter a check sweeps over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParamDomain {
    None,
    /// Nonzero complex `alpha`.
    NonzeroComplex,
    /// `alpha` in `[0, 1]` (the `t` parameter).
    UnitInterval,
    /// Nonnegative reals and an exponent `r >= 1`.
    BohrScalars,
}

impl ParamDomain {
    pub fn describe(self) -> &'static str {
        match self {
            ParamDomain::None => "none",
            ParamDomain::NonzeroComplex => "alpha in C \\ {0}",
            ParamDomain::UnitInterval => "alpha in [0, 1]",
            ParamDomain::BohrScalars => "a_i >= 0, r >= 1",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckInfo {
    pub id: CheckId,
    pub description: &'static str,
    pub signature: Signature,
    pub domain: ParamDomain,
}

impl CheckId {
    pub fn signature(self) -> Signature {
        use CheckId::*;
        match self {
            CorPcor | CorCor1 | PropRankone | CorTheorem1T | Th3Single | BohrScalar | Sandwich => Signature::Single,
            LemBuzano => Signature::Context,
            _ => Signature::Pair,
        }
    }

    pub fn domain(self) -> ParamDomain {
        use CheckId::*;
        match self {
            PropRankone | LemBuzano | ThTheorem1 | CorTheorem1T | Th3 | Th3Single => ParamDomain::NonzeroComplex,
            Th4Lower | Th4Upper => ParamDomain::UnitInterval,
            BohrScalar => ParamDomain::BohrScalars,
            _ => ParamDomain::None,
        }
    }

    pub fn description(self) -> &'static str {
        use CheckId::*;
        match self {
            Th1Lower => "w(B^2+C^2)/2 + max{w(B),w(C)} |w(B+C) - w(B-C)|/2 <= w_e^2(B,C)",
            Th1Upper => "w_e^2(B,C) <= w((B#B + C#C) + i(BB# + CC#)) / sqrt 2",
            CorSelfadjLower => "selfadjoint B, C: ||B^2+C^2||/2 + max{||B||,||C||} | ||B+C|| - ||B-C|| |/2 <= w_e^2(B,C)",
            CorPcor => "||T#T+TT#||/4 + (a/2) max{||Re T||,||Im T||} <= w^2(T) <= ||TT#+T#T||/2, a = | ||Re T+Im T|| - ||Re T-Im T|| |",
            CorCor1 => "||Re(T^2)||/2 + w(T) | ||Re T|| - ||Im T|| |/2 <= w^2(T)",
            ThProduct => "||B+C||^4/8 <= w_e(B#B, C#C) w_e(BB#, CC#)",
            PropRankone => "T = x (x)_A*, ||x||_A = 1: |alpha-1| <= ||alpha T - I|| <= max{1,|alpha-1|}, equality when |alpha-1| >= 1",
            LemBuzano => "|<x,e><e,y>| <= (|<x,y>| + max{1,|alpha-1|} ||x|| ||y||)/|alpha| for ||e|| = 1",
            ThTheorem1 => "w_e^2(B,C) <= (max{1,|1-alpha|} ||(B,C)||_e ||(B#,C#)||_e + w(B^2) + w(C^2))/|alpha|",
            CorTheorem1T => "w^2(T) <= (max{1,|1-alpha|} ||T||^2 + w(T^2))/|alpha|",
            Th3 => "w_e^2(B,C) <= min{w^2(B-C), w^2(B+C)} + (max{1,|1-alpha|} ||C#C+BB#|| + 2w(BC))/|alpha|",
            Th3Alpha2 => "w_e^2(B,C) <= min{w^2(B-C), w^2(B+C)} + (||C#C+BB#|| + 2w(BC))/2",
            Th3Single => "w^2(T) <= (max{1,|1-alpha|} ||T#T+TT#||/2 + w(T^2))/|alpha|",
            Th2 => "max{w^2(B+C) + c^2(B-C), w^2(B-C) + c^2(B+C)}/2 <= w_e^2(B,C)",
            Cor2 => "max{w^2(B) + c^2(C), w^2(C) + c^2(B)} <= w_e^2(B,C)",
            Eq5 => "w_e^2(B+C, B-C) = 2 w_e^2(B,C)",
            Th4Lower => "w^2(sqrt(a) B +- sqrt(1-a) C) <= w_e^2(B,C), a in [0,1]",
            Th4Upper => "w_e^2(B,C) <= w^2(sqrt(a) B + sqrt(1-a) C) + w^2(sqrt(1-a) B - sqrt(a) C); the '+' variant is reported alongside",
            RemarkChain => "w_e^2 >= max_a w^2(sqrt(a)B +- sqrt(1-a)C) >= max w^2(B+-C)/2 >= w(B^2+C^2)/2 and w^2(T) >= max ||Re T +- Im T||^2/2 >= ||T#T+TT#||/4",
            BohrScalar => "(sum a_i)^r <= k^{r-1} sum a_i^r",
            Sandwich => "w(T) <= ||T|| <= 2 w(T)",
        }
    }

    fn default_alpha(self) -> Complex64 {
        Complex64::new(2.0, 0.0)
    }
}

/// Complete catalog in stable order.
pub fn list_checks() -> Vec<CheckInfo> {
    CheckId::ALL
        .iter()
        .map(|&id| CheckInfo { id, description: id.description(), signature: id.signature(), domain: id.domain() })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

/// Check parameters; absent entries take per-check defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Complex `alpha` of the parametrized upper bounds and of the rank-one
    /// proposition (default 2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Complex64>,
    /// Interpolation weight of the two-sided bounds, in `[0, 1]` (default 1/2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Scalars for the Bohr check (default: singular values of the reduced `T`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bohr_values: Option<Vec<f64>>,
    /// Exponent `r >= 1` for the Bohr check (default 2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bohr_exponent: Option<f64>,
    /// Seed of the sampling check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Number of sampled triples for the sampling check (default 4000).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl Params {
    pub fn with_alpha(alpha: Complex64) -> Self {
        Self { alpha: Some(alpha), ..Self::default() }
    }

    pub fn with_t(t: f64) -> Self {
        Self { t: Some(t), ..Self::default() }
    }
}

/// A named scalar or complex value in a report's parameter map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Count(u64),
    Real(f64),
    Complex([f64; 2]),
    List(Vec<f64>),
}

/// One relation inside a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartReport {
    pub name: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub certified_gap: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Informational parts do not affect the check's verdict.
    pub gating: bool,
}

impl PartReport {
    /// Distance from the pass boundary; negative means failure.
    pub fn margin(&self) -> f64 {
        match self.relation {
            Relation::Le => self.slack + self.certified_gap + self.tolerance,
            Relation::Eq => self.certified_gap + self.tolerance - self.slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundReport {
    pub check: CheckId,
    pub params: BTreeMap<String, ParamValue>,
    pub relation: Relation,
    /// Sides of the binding (smallest-margin) gating part.
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub certified_gap: f64,
    pub pass: bool,
    pub parts: Vec<PartReport>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn margin(&self) -> f64 {
        self.parts.iter().filter(|p| p.gating).map(PartReport::margin).fold(f64::INFINITY, f64::min)
    }

    pub fn part(&self, name: &str) -> Option<&PartReport> {
        self.parts.iter().find(|p| p.name == name)
    }

    /// Recomputes pass flags with a different relative tolerance.
    pub fn rejudge(&mut self, rel_tol: f64) {
        for p in &mut self.parts {
            p.tolerance = rel_tol * scale_of(p.lhs, p.rhs);
            let ok = match p.relation {
                Relation::Le => p.slack >= -(p.certified_gap + p.tolerance),
                Relation::Eq => p.slack <= p.certified_gap + p.tolerance,
            };
            p.pass = ok && p.lhs.is_finite() && p.rhs.is_finite();
        }
        self.pass = self.parts.iter().filter(|p| p.gating).all(|p| p.pass);
    }
}

/// A computed quantity whose true value lies in `[value, value + gap]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub value: f64,
    pub gap: f64,
}

impl Term {
    pub fn exact(value: f64) -> Self {
        Term { value, gap: 0.0 }
    }

    fn from_radius(r: &RadiusResult) -> Self {
        Term { value: r.value, gap: r.certified_gap }
    }
}

fn scale_of(lhs: f64, rhs: f64) -> f64 {
    1f64.max(lhs.abs()).max(rhs.abs())
}

/// Evaluates `f` (term values to `(lhs, rhs)`) and the one-sided gap.
fn make_part(name: &str, rel: Relation, gating: bool, terms: &[Term], f: impl Fn(&[f64]) -> (f64, f64)) -> PartReport {
    let values: Vec<f64> = terms.iter().map(|t| t.value).collect();
    let (lhs, rhs) = f(&values);
    let diff = rhs - lhs;
    let mut gap = 0.0;
    let mut shifted = values.clone();
    for (i, t) in terms.iter().enumerate() {
        if t.gap > 0.0 {
            shifted[i] = t.value + t.gap;
            let (l2, r2) = f(&shifted);
            let d2 = r2 - l2;
            gap += match rel {
                Relation::Le => (diff - d2).max(0.0),
                Relation::Eq => (diff - d2).abs(),
            };
            shifted[i] = t.value;
        }
    }
    let tolerance = REL_TOL * scale_of(lhs, rhs);
    let (slack, pass) = match rel {
        Relation::Le => (diff, diff >= -(gap + tolerance)),
        Relation::Eq => (diff.abs(), diff.abs() <= gap + tolerance),
    };
    let pass = pass && lhs.is_finite() && rhs.is_finite();
    PartReport { name: name.to_owned(), relation: rel, lhs, rhs, slack, certified_gap: gap, tolerance, pass, gating }
}

fn le(name: &str, terms: &[Term], f: impl Fn(&[f64]) -> (f64, f64)) -> PartReport {
    make_part(name, Relation::Le, true, terms, f)
}

fn eq(name: &str, terms: &[Term], f: impl Fn(&[f64]) -> (f64, f64)) -> PartReport {
    make_part(name, Relation::Eq, true, terms, f)
}

fn info(mut p: PartReport) -> PartReport {
    p.gating = false;
    p
}

/// Bit pattern of a matrix, used as a cache key.
fn key_of(kind: u8, ms: &[&ComplexMatrix]) -> Vec<u64> {
    let mut k = vec![kind as u64];
    for m in ms {
        k.push(m.rows() as u64);
        k.extend(m.data().iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]));
    }
    k
}

const Q_W: u8 = 0;
const Q_C: u8 = 1;
const Q_N: u8 = 2;
const Q_WE: u8 = 3;
const Q_NE: u8 = 4;

/// Evaluates checks against one context, memoizing radius computations on
/// the reduced matrices so that checks sharing a term compute it once.
/// Results are identical with or without the cache.
pub struct Evaluator<'a> {
    ctx: &'a AContext,
    cfg: RadiiConfig,
    cache: RefCell<BTreeMap<Vec<u64>, Term>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(ctx: &'a AContext) -> Self {
        Self::with_config(ctx, RadiiConfig::default())
    }

    pub fn with_config(ctx: &'a AContext, cfg: RadiiConfig) -> Self {
        Self { ctx, cfg, cache: RefCell::new(BTreeMap::new()) }
    }

    pub fn context(&self) -> &AContext {
        self.ctx
    }

    fn memo(&self, key: Vec<u64>, f: impl FnOnce() -> Result<Term>) -> Result<Term> {
        if let Some(t) = self.cache.borrow().get(&key) {
            return Ok(*t);
        }
        let t = f()?;
        self.cache.borrow_mut().insert(key, t);
        Ok(t)
    }

    /// `w_A(T)`.
    pub fn w(&self, t: &ComplexMatrix) -> Result<Term> {
        let m = self.ctx.reduce(t)?;
        self.memo(key_of(Q_W, &[&m]), || Ok(Term::from_radius(&radii::numerical_radius_with(&m, &self.cfg)?)))
    }

    /// `c_A(T)`.
    pub fn c(&self, t: &ComplexMatrix) -> Result<Term> {
        let m = self.ctx.reduce(t)?;
        self.memo(key_of(Q_C, &[&m]), || Ok(Term::from_radius(&radii::crawford_with(&m, &self.cfg)?)))
    }

    /// `||T||_A`.
    pub fn norm(&self, t: &ComplexMatrix) -> Result<Term> {
        let m = self.ctx.reduce(t)?;
        self.memo(key_of(Q_N, &[&m]), || Ok(Term::exact(radii::op_norm(&m)?.value)))
    }

    /// `w_{A,e}(B, C)`.
    pub fn we(&self, b: &ComplexMatrix, c: &ComplexMatrix) -> Result<Term> {
        let mb = self.ctx.reduce(b)?;
        let mc = self.ctx.reduce(c)?;
        self.memo(key_of(Q_WE, &[&mb, &mc]), || {
            Ok(Term::from_radius(&radii::euclidean_radius_with(&mb, &mc, &self.cfg)?))
        })
    }

    /// `||(B, C)||_{A,e}`.
    pub fn ne(&self, b: &ComplexMatrix, c: &ComplexMatrix) -> Result<Term> {
        let mb = self.ctx.reduce(b)?;
        let mc = self.ctx.reduce(c)?;
        self.memo(key_of(Q_NE, &[&mb, &mc]), || Ok(Term::exact(radii::euclidean_norm_pair(&mb, &mc)?)))
    }

    pub fn sharp(&self, t: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.ctx.a_adjoint(t)
    }

    /// Evaluates one check.
    pub fn evaluate(&self, check: CheckId, b: &ComplexMatrix, c: Option<&ComplexMatrix>, params: &Params) -> Result<BoundReport> {
        let n = self.ctx.dim();
        for m in core::iter::once(b).chain(c) {
            m.ensure_finite()?;
            let d = m.ensure_square()?;
            if d != n {
                return Err(Error::DimensionMismatch { expected: n, found: d });
            }
        }
        let need_c = || c.ok_or(Error::BadParameter("check needs a second operand C"));
        let mut out = Out::default();
        use CheckId::*;
        match check {
            Th1Lower => self.th1_lower(b, need_c()?, &mut out)?,
            Th1Upper => self.th1_upper(b, need_c()?, &mut out)?,
            CorSelfadjLower => self.cor_selfadj_lower(b, need_c()?, &mut out)?,
            CorPcor => self.cor_pcor(b, &mut out)?,
            CorCor1 => self.cor_cor1(b, &mut out)?,
            ThProduct => self.th_product(b, need_c()?, &mut out)?,
            PropRankone => self.prop_rankone(b, alpha_of(check, params, &mut out)?, &mut out)?,
            LemBuzano => self.lem_buzano(alpha_of(check, params, &mut out)?, params, &mut out)?,
            ThTheorem1 => self.th_theorem1(b, need_c()?, alpha_of(check, params, &mut out)?, &mut out)?,
            CorTheorem1T => self.cor_theorem1_t(b, alpha_of(check, params, &mut out)?, &mut out)?,
            Th3 => self.th3(b, need_c()?, alpha_of(check, params, &mut out)?, &mut out)?,
            Th3Alpha2 => {
                let two = Complex64::new(2.0, 0.0);
                out.param("alpha", ParamValue::Complex([2.0, 0.0]));
                self.th3(b, need_c()?, two, &mut out)?
            }
            Th3Single => self.th3_single(b, alpha_of(check, params, &mut out)?, &mut out)?,
            Th2 => self.th2(b, need_c()?, &mut out)?,
            Cor2 => self.cor2(b, need_c()?, &mut out)?,
            Eq5 => self.eq5(b, need_c()?, &mut out)?,
            Th4Lower => self.th4_lower(b, need_c()?, t_of(params, &mut out)?, &mut out)?,
            Th4Upper => self.th4_upper(b, need_c()?, t_of(params, &mut out)?, &mut out)?,
            RemarkChain => self.remark_chain(b, need_c()?, &mut out)?,
            BohrScalar => self.bohr(b, params, &mut out)?,
            Sandwich => self.sandwich(b, &mut out)?,
        }
        Ok(out.finish(check))
    }

    fn th1_lower(&self, b: &ComplexMatrix, c: &ComplexMatrix, out: &mut Out) -> Result<()> {
        let b2c2 = &(b * b) + &(c * c);
        let terms = [
            self.w(&b2c2)?,
            self.w(b)?,
            self.w(c)?,
            self.w(&(b + c))?,
            self.w(&(b - c))?,
            self.we(b, c)?,
        ];
        let lower = |v: &[f64]| 0.5 * v[0] + 0.5 * v[1].max(v[2]) * (v[3] - v[4]).abs();
        out.push(le("main", &terms, |v| (lower(v), v[5] * v[5])));
        out.push(le("refines_half_w_b2_plus_c2", &terms, |v| (0.5 * v[0], lower(v))));
        let premise = terms[5].value.powi(2) - 0.5 * terms[0].value;
        out.diag("equality_premise_gap", premise);
        out.diag("abs_w_sum_minus_w_diff", (terms[3].value - terms[4].value).abs());
        Ok(())
    }

    fn th1_upper(&self, b: &ComplexMatrix, c: &ComplexMatrix, out: &mut Out) -> Result<()> {
        let (bs, cs) = (self.sharp(b)?, self.sharp(c)?);
        let x = &(&bs * b) + &(&cs * c);
        let y = &(b * &bs) + &(c * &cs);
        let z = &x + &y.scale(I);
        let terms = [self.we(b, c)?, self.w(&z)?, self.norm(&x)?, self.norm(&y)?];
        out.push(le("main", &terms, |v| (v[0] * v[0], FRAC_1_SQRT_2 * v[1])));
        out.push(le("refines_norm_bound", &terms, |v| (FRAC_1_SQRT_2 * v[1], FRAC_1_SQRT_2 * (v[2] * v[2] + v[3] * v[3]).sqrt())));
        if terms[3].value <= terms[2].value {
            out.diag("prior_upper_bound", terms[3].value);
        }
        Ok(())
    }

    fn cor_selfadj_lower(&self, b: &ComplexMatrix, c: &ComplexMatrix, out: &mut Out) -> Result<()> {
        for m in [b, c] {
            let r = self.ctx.selfadjoint_residual(m)?;
            if r > self.ctx.residual_tol() {
                return Err(Error::NotASelfadjoint(r));
            }
        }
        let b2c2 = &(b * b) + &(c * c);
        let terms = [
            self.norm(&b2c2)?,
            self.norm(b)?,
            self.norm(c)?,
            self.norm(&(b + c))?,
            self.norm(&(b - c))?,
            self.we(b, c)?,
        ];
        out.push(le("main", &terms, |v| (0.5 * v[0] + 0.5 * v[1].max(v[2]) * (v[3] - v[4]).abs(), v[5] * v[5])));
        Ok(())
    }

    fn cor_pcor(&self, t: &ComplexMatrix, out: &mut Out) -> Result<()> {
        let ts = self.sharp(t)?;
        let (re, im) = self.ctx.cartesian(t)?;
        let sum = &(&ts * t) + &(t * &ts);
        let terms = [
            self.norm(&sum)?,
            self.norm(&(&re + &im))?,
            self.norm(&(&re - &im))?,
            self.norm(&re)?,
            self.norm(&im)?,
            self.w(t)?,
        ];
        out.push(le("lower", &terms, |v| (0.25 * v[0] + 0.5 * (v[1] - v[2]).abs() * v[3].max(v[4]), v[5] * v[5])));
        out.push(le("upper", &terms, |v| (v[5] * v[5], 0.5 * v[0])));
        Ok(())
    }

    fn cor_cor1(&self, t: &ComplexMatrix, out: &mut Out) -> Result<()> {
        let (re, im) = self.ctx.cartesian(t)?;
        let (re_sq, _) = self.ctx.cartesian(&(t * t))?;
        let terms = [self.norm(&re_sq)?, self.w(t)?, self.norm(&re)?, self.norm(&im)?];
        out.push(le("main", &terms, |v| (0.5 * v[0] + 0.5 * v[1] * (v[2] - v[3]).abs(), v[1] * v[1])));
        Ok(())
    }

    fn th_product(&self, b: &ComplexMatrix, c: &ComplexMatrix, out: &mut Out) -> Result<()> {
        let (bs, cs) = (self.sharp(b)?, self.sharp(c)?);
        let terms = [
            self.norm(&(b + c))?,
            self.we(&(&bs * b), &(&cs * c))?,
            self.we(&(b * &bs), &(c * &cs))?,
        ];
        out.push(le("main", &terms, |v| (v[0].powi(4) / 8.0, v[1] * v[2])));
        Ok(())
    }

    fn prop_rankone(&self, t: &ComplexMatrix, alpha: Complex64, out: &mut Out) -> Result<()> {
        // The reduced operator of x (x)_A* with ||x||_A = 1 is an orthogonal
        // rank-one projection.
        let m = self.ctx.reduce(t)?;
        let defect = (&(&m * &m) - &m).frobenius_norm() + (&m - &m.adjoint()).frobenius_norm() + (m.trace() - 1.0).norm();
        if defect > 1e-8 {
            return Err(Error::BadParameter("PROP_RANKONE needs T = x (Ax)* with ||x||_A = 1"));
        }
        let n = self.ctx.dim();
        let op = &t.scale(alpha) - &ComplexMatrix::identity(n);
        let terms = [self.norm(&op)?];
        let d = (alpha - 1.0).norm();
        let top = 1f64.max(d);
        out.push(le("lower", &terms, |v| (d, v[0])));
        out.push(le("upper", &terms, |v| (v[0], top)));
        if d >= 1.0 {
            out.push(eq("equality_branch", &terms, |v| (v[0], d)));
        }
        if self.ctx.rank() >= 2 {
            out.push(eq("exact_value", &terms, |v| (v[0], top)));
        }
        Ok(())
    }

    fn lem_buzano(&self, alpha: Complex64, params: &Params, out: &mut Out) -> Result<()> {
        let seed = params.seed.unwrap_or(0);
        let samples = params.samples.unwrap_or(4000);
        out.param("seed", ParamValue::Count(seed));
        out.param("samples", ParamValue::Count(samples as u64));
        let cfg = OracleConfig { n_restarts: 8.min(samples.max(1)), n_samples: samples.max(1), ascent_steps: 1, step_init: 0.1, seed };
        let slack = buzano_sample(self.ctx, &cfg, alpha)?;
        let terms = [Term::exact(slack)];
        out.push(le("min_sampled_slack", &terms, |v| (0.0, v[0])));
        Ok(())
    }

    fn th_theorem1(&self, b: &ComplexMatrix, c: &ComplexMatrix, alpha: Complex64, out: &mut Out) -> Result<()> {
        let (bs, cs) = (self.sharp(b)?, self.sharp(c)?);
        let terms = [
            self.we(b, c)?,
            self.ne(b, c)?,
            self.ne(&bs, &cs)?,
            self.w(&(b * b))?,
            self.w(&(c * c))?,
        ];
        let m = 1f64.max((1.0 - alpha).norm());
        let a = alpha.norm();
        out.push(le("main", &terms, |v| (v[0] * v[0], (m * v[1] * v[2] + v[3] + v[4]) / a)));
        Ok(())
    }

    fn cor_theorem1_t(&self, t: &ComplexMatrix, alpha: Complex64, out: &mut Out) -> Result<()> {
        let terms = [self.w(t)?, self.norm(t)?, self.w(&(t * t))?];
        let m = 1f64.max((1.0 - alpha).norm());
        let a = alpha.norm();
        out.push(le("main", &terms, |v| (v[0] * v[0], (m * v[1] * v[1] + v[2]) / a)));
        Ok(())
    }

    fn th3(&self, b: &ComplexMatrix, c: &ComplexMatrix, alpha: Complex64, out: &mut Out) -> Result<()> {
        let (bs, cs) = (self.sharp(b)?, self.sharp(c)?);
        let mixed = &(&cs * c) + &(b * &bs);
        let terms = [
            self.we(b, c)?,
            self.w(&(b - c))?,
            self.w(&(b + c))?,
            self.norm(&mixed)?,
            self.w(&(b * c))?,
        ];
        let m = 1f64.max((1.0 - alpha).norm());
        let a = alpha.norm();
        out.push(le("main", &terms, |v| (v[0] * v[0], (v[1] * v[1]).min(v[2] * v[2]) + (m * v[3] + 2.0 * v[4]) / a)));
        Ok(())
    }

    fn th3_single(&self, t: &ComplexMatrix, alpha: Complex64, out: &mut Out) -> Result<()> {
        let ts = self.sharp(t)?;
        let sum = &(&ts * t) + &(t * &ts);
        let terms = [self.w(t)?, self.norm(&sum)?, self.w(&(t * t))?];
        let m = 1f64.max((1.0 - alpha).norm());
        let a = alpha.norm();
        out.push(le("main", &terms, |v| (v[0] * v[0], (0.5 * m * v[1] + v[2]) / a)));
        Ok(())
    }

    fn th2(&self, b: &ComplexMatrix, c: &ComplexMatrix, out: &mut Out) -> Result<()> {
        let (p, m) = (b + c, b - c);
        let terms = [self.w(&p)?, self.c(&m)?, self.w(&m)?, self.c(&p)?, self.we(b, c)?];
        out.push(le("main", &terms, |v| {
            (0.5 * (v[0] * v[0] + v[1] * v[1]).max(v[2] * v[2] + v[3] * v[3]), v[4] * v[4])
        }));
        Ok(())
    }

    fn cor2(&self, b: &ComplexMatrix, c: &ComplexMatrix, out: &mut Out) -> Result<()> {
        let terms = [self.w(b)?, self.c(c)?, self.w(c)?, self.c(b)?, self.we(b, c)?];
        out.push(le("main", &terms, |v| ((v[0] * v[0] + v[1] * v[1]).max(v[2] * v[2] + v[3] * v[3]), v[4] * v[4])));
        Ok(())
    }

    fn eq5(&self, b: &ComplexMatrix, c: &ComplexMatrix, out: &mut Out) -> Result<()> {
        let terms = [self.we(&(b + c), &(b - c))?, self.we(b, c)?];
        out.push(eq("main", &terms, |v| (v[0] * v[0], 2.0 * v[1] * v[1])));
        Ok(())
    }

    fn th4_lower(&self, b: &ComplexMatrix, c: &ComplexMatrix, t: f64, out: &mut Out) -> Result<()> {
        let (p, q) = (t.sqrt(), (1.0 - t).sqrt());
        let terms = [self.w(&mix(b, c, p, q))?, self.w(&mix(b, c, p, -q))?, self.we(b, c)?];
        out.push(le("main", &terms, |v| (v[0].max(v[1]).powi(2), v[2] * v[2])));
        out.push(le("plus_sign", &terms, |v| (v[0] * v[0], v[2] * v[2])));
        out.push(le("minus_sign", &terms, |v| (v[1] * v[1], v[2] * v[2])));
        Ok(())
    }

    fn th4_upper(&self, b: &ComplexMatrix, c: &ComplexMatrix, t: f64, out: &mut Out) -> Result<()> {
        let (p, q) = (t.sqrt(), (1.0 - t).sqrt());
        let terms = [
            self.we(b, c)?,
            self.w(&mix(b, c, p, q))?,
            self.w(&mix(b, c, q, -p))?,
            self.w(&mix(b, c, q, p))?,
        ];
        out.push(le("minus_variant", &terms, |v| (v[0] * v[0], v[1] * v[1] + v[2] * v[2])));
        out.push(info(le("plus_variant", &terms, |v| (v[0] * v[0], v[1] * v[1] + v[3] * v[3]))));
        if t == 0.0 || t == 1.0 {
            let ends = [self.w(b)?, self.w(c)?];
            out.diag("endpoint_sum_w2", ends[0].value.powi(2) + ends[1].value.powi(2));
            out.diag("endpoint_minus_rhs", terms[1].value.powi(2) + terms[2].value.powi(2));
        }
        Ok(())
    }

    fn remark_chain(&self, b: &ComplexMatrix, c: &ComplexMatrix, out: &mut Out) -> Result<()> {
        let we = self.we(b, c)?;
        // t-grid of step 1/10, which contains t = 1/2.
        let mut grid = Vec::with_capacity(22);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let (p, q) = (t.sqrt(), (1.0 - t).sqrt());
            grid.push(self.w(&mix(b, c, p, q))?);
            grid.push(self.w(&mix(b, c, p, -q))?);
        }
        let mut terms = grid.clone();
        terms.push(we);
        let g = grid.len();
        let grid_max = |v: &[f64]| v[..g].iter().fold(0f64, |m, &x| m.max(x * x));
        out.push(le("grid_max_le_we2", &terms, |v| (grid_max(v), v[g] * v[g])));

        let wp = self.w(&(b + c))?;
        let wm = self.w(&(b - c))?;
        let mut terms2 = grid;
        terms2.push(wp);
        terms2.push(wm);
        out.push(le("half_max_pm_le_grid_max", &terms2, |v| (0.5 * v[g].max(v[g + 1]).powi(2), grid_max(v))));

        let b2c2 = self.w(&(&(b * b) + &(c * c)))?;
        let terms3 = [b2c2, wp, wm];
        out.push(le("half_w_b2c2_le_half_max_pm", &terms3, |v| (0.5 * v[0], 0.5 * v[1].max(v[2]).powi(2))));

        // Second chain with T = B.
        let (re, im) = self.ctx.cartesian(b)?;
        let bs = self.sharp(b)?;
        let terms4 = [
            self.w(b)?,
            self.norm(&(&re + &im))?,
            self.norm(&(&re - &im))?,
            self.norm(&(&(&bs * b) + &(b * &bs)))?,
            self.norm(&re)?,
            self.norm(&im)?,
        ];
        out.push(le("t_half_max_re_pm_im_le_w2", &terms4, |v| (0.5 * v[1].max(v[2]).powi(2), v[0] * v[0])));
        out.push(le("t_quarter_sum_le_half_max", &terms4, |v| (0.25 * v[3], 0.5 * v[1].max(v[2]).powi(2))));
        let v: Vec<f64> = terms4.iter().map(|t| t.value).collect();
        out.diag("t_quarter_sum", 0.25 * v[3]);
        out.diag("t_pcor_lower", 0.25 * v[3] + 0.5 * (v[1] - v[2]).abs() * v[4].max(v[5]));
        Ok(())
    }

    fn bohr(&self, t: &ComplexMatrix, params: &Params, out: &mut Out) -> Result<()> {
        let values = match &params.bohr_values {
            Some(v) => v.clone(),
            None => svd(&self.ctx.reduce(t)?)?.singular_values,
        };
        let r = params.bohr_exponent.unwrap_or(2.0);
        if values.is_empty() || values.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(Error::BadParameter("Bohr scalars must be finite and non-negative"));
        }
        if !(r >= 1.0) || !r.is_finite() {
            return Err(Error::BadParameter("Bohr exponent must be >= 1"));
        }
        out.param("bohr_exponent", ParamValue::Real(r));
        out.param("bohr_values", ParamValue::List(values.clone()));
        let k = values.len() as f64;
        let lhs = values.iter().sum::<f64>().powf(r);
        let rhs = k.powf(r - 1.0) * values.iter().map(|a| a.powf(r)).sum::<f64>();
        let first = values[0];
        let all_equal = values.iter().all(|a| (a - first).abs() <= 1e-12 * first.abs().max(1.0));
        out.push(le("main", &[], |_| (lhs, rhs)));
        out.diag("all_equal", if all_equal { 1.0 } else { 0.0 });
        out.diag("printed_equality_defect", (rhs - lhs).abs());
        Ok(())
    }

    fn sandwich(&self, t: &ComplexMatrix, out: &mut Out) -> Result<()> {
        let terms = [self.w(t)?, self.norm(t)?];
        out.push(le("w_le_norm", &terms, |v| (v[0], v[1])));
        out.push(le("norm_le_2w", &terms, |v| (v[1], 2.0 * v[0])));
        Ok(())
    }
}

fn mix(b: &ComplexMatrix, c: &ComplexMatrix, p: f64, q: f64) -> ComplexMatrix {
    ComplexMatrix::linear_combination(&[(Complex64::new(p, 0.0), b), (Complex64::new(q, 0.0), c)])
}

fn alpha_of(check: CheckId, params: &Params, out: &mut Out) -> Result<Complex64> {
    let alpha = params.alpha.unwrap_or_else(|| check.default_alpha());
    if !alpha.is_finite() || alpha.norm() == 0.0 {
        return Err(Error::BadParameter("alpha must be a finite nonzero complex number"));
    }
    out.param("alpha", ParamValue::Complex([alpha.re, alpha.im]));
    Ok(alpha)
}

fn t_of(params: &Params, out: &mut Out) -> Result<f64> {
    let t = params.t.unwrap_or(0.5);
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::BadParameter("alpha must lie in [0, 1] for the interpolation bounds"));
    }
    out.param("t", ParamValue::Real(t));
    Ok(t)
}

#[derive(Default)]
struct Out {
    params: BTreeMap<String, ParamValue>,
    parts: Vec<PartReport>,
    diagnostics: BTreeMap<String, f64>,
}

impl Out {
    fn push(&mut self, p: PartReport) {
        self.parts.push(p);
    }

    fn param(&mut self, k: &str, v: ParamValue) {
        self.params.insert(k.to_owned(), v);
    }

    fn diag(&mut self, k: &str, v: f64) {
        self.diagnostics.insert(k.to_owned(), v);
    }

    fn finish(self, check: CheckId) -> BoundReport {
        let binding = self
            .parts
            .iter()
            .filter(|p| p.gating)
            .min_by(|a, b| a.margin().total_cmp(&b.margin()))
            .expect("every check has a gating part")
            .clone();
        let pass = self.parts.iter().filter(|p| p.gating).all(|p| p.pass);
        BoundReport {
            check,
            params: self.params,
            relation: binding.relation,
            lhs: binding.lhs,
            rhs: binding.rhs,
            slack: binding.slack,
            certified_gap: binding.certified_gap,
            pass,
            parts: self.parts,
            diagnostics: self.diagnostics,
        }
    }
}

/// Evaluates one check with a fresh [`Evaluator`].
pub fn evaluate(check: CheckId, ctx: &AContext, b: &ComplexMatrix, c: Option<&ComplexMatrix>, params: &Params) -> Result<BoundReport> {
    Evaluator::new(ctx).evaluate(check, b, c, params)
}

/// Fixed part of the complex parameter grid.
pub fn fixed_alpha_grid() -> [Complex64; 6] {
    [
        Complex64::new(0.5, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(1.0, 1.0),
        Complex64::new(-2.0, 0.0),
        Complex64::from_polar(3.0, FRAC_PI_4),
    ]
}

/// Fixed grid plus 8 random values with modulus in `[0.1, 4]` and uniform phase.
pub fn alpha_grid<R: Rng + ?Sized>(rng: &mut R) -> Vec<Complex64> {
    let mut g = fixed_alpha_grid().to_vec();
    for _ in 0..8 {
        let r: f64 = rng.random_range(0.1..4.0);
        let phi: f64 = rng.random_range(0.0..core::f64::consts::TAU);
        g.push(Complex64::from_polar(r, phi));
    }
    g
}

/// `{0, 1/4, 1/2, 3/4, 1}` plus 4 uniform draws.
pub fn t_grid<R: Rng + ?Sized>(rng: &mut R) -> Vec<f64> {
    let mut g = vec![0.0, 0.25, 0.5, 0.75, 1.0];
    for _ in 0..4 {
        g.push(rng.random_range(0.0..=1.0));
    }
    g
}

/// Parameter sets a campaign evaluates for one check.
pub fn parameter_grid<R: Rng + ?Sized>(check: CheckId, rng: &mut R, seed: u64) -> Vec<Params> {
    match check.domain() {
        ParamDomain::NonzeroComplex => {
            let mut grid: Vec<Params> = alpha_grid(rng).into_iter().map(Params::with_alpha).collect();
            if check == CheckId::LemBuzano {
                for (i, p) in grid.iter_mut().enumerate() {
                    p.seed = Some(seed.wrapping_add(i as u64));
                    p.samples = Some(500);
                }
            }
            grid
        }
        ParamDomain::UnitInterval => t_grid(rng).into_iter().map(Params::with_t).collect(),
        ParamDomain::BohrScalars => [1.0, 2.0, 3.5]
            .into_iter()
            .map(|r| Params { bohr_exponent: Some(r), ..Params::default() })
            .collect(),
        ParamDomain::None => vec![Params::default()],
    }
}

/// Result of sweeping one check over its parameter grid.
#[derive(Debug, Clone)]
pub struct GridOutcome {
    /// Report with the smallest margin.
    pub worst: BoundReport,
    pub params: Params,
    /// Every report, in grid order.
    pub reports: Vec<BoundReport>,
    pub evaluations: usize,
    pub all_pass: bool,
}

impl Evaluator<'_> {
    /// Evaluates `check` at every parameter set and keeps the worst report.
    pub fn evaluate_grid(&self, check: CheckId, b: &ComplexMatrix, c: Option<&ComplexMatrix>, grid: &[Params]) -> Result<GridOutcome> {
        let mut reports = Vec::with_capacity(grid.len());
        for p in grid {
            reports.push(self.evaluate(check, b, c, p)?);
        }
        let k = (0..reports.len())
            .min_by(|&i, &j| reports[i].margin().total_cmp(&reports[j].margin()))
            .ok_or(Error::BadParameter("empty parameter grid"))?;
        Ok(GridOutcome {
            worst: reports[k].clone(),
            params: grid[k].clone(),
            evaluations: grid.len(),
            all_pass: reports.iter().all(|r| r.pass),
            reports,
        })
    }
}
