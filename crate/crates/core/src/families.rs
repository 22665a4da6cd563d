//! Constructors for the named families of scattered q-polynomials.

use serde::{Deserialize, Serialize};

use crate::codes::RankCode;
use crate::error::{Error, Result};
use crate::field::{gcd, FieldContext, FieldElement};
use crate::qpoly::QPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// x^(q^s)
    G,
    /// η x^(q^s) + x^(q^((n-1)s))
    H2,
    /// x^q + x^(q^3) + ζ x^(q^5), n = 6
    Z6,
    /// δ x^(q^s) + x^(q^(s+n/2)), n ∈ {6, 8}
    K,
    /// x^q + x^(q^(t-1)) - x^(q^(t+1)) + x^(q^(2t-1))
    LZ,
    /// the h-deformation of `LZ`
    LMTZ,
    /// the (h, s) family on support {s, s(t-1), s(t+1), s(2t-1)}
    NSZ,
    /// three-term standard form of the t = 3 member of `NSZ`
    #[serde(rename = "H_std")]
    HStd,
    /// h^(q-1) x^q - h^(q^2-1) x^(q^2) + x^(q^4) + x^(q^5), n = 6
    BZZ,
}

/// Two readings of the third coefficient of the `NSZ` polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NszVariant {
    /// h^(1+q^s)
    #[serde(rename = "EQ5")]
    Eq5,
    /// -h^(1-q^(s(t+1)))
    #[serde(rename = "SEC4")]
    Sec4,
}

impl NszVariant {
    pub const ALL: [NszVariant; 2] = [NszVariant::Eq5, NszVariant::Sec4];

    pub fn tag(self) -> &'static str {
        match self {
            NszVariant::Eq5 => "EQ5",
            NszVariant::Sec4 => "SEC4",
        }
    }
}

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Constraint(msg.into()))
    }
}

fn require_odd_q(ctx: &FieldContext) -> Result<()> {
    require(ctx.p() != 2, "q must be odd")
}

fn require_coprime(s: i64, m: u32) -> Result<()> {
    require(gcd(s.rem_euclid(m as i64) as u64, m as u64) == 1, format!("gcd({s}, {m}) must be 1"))
}

fn require_fiber(ctx: &FieldContext, h: FieldElement) -> Result<()> {
    let norm = ctx.norm(h, ctx.t())?;
    require(norm == ctx.neg_one(), "h must have norm -1 over F_(q^t)")
}

fn code(f: QPoly) -> Result<RankCode> {
    RankCode::new(f)
}

pub fn gabidulin(ctx: &FieldContext, s: i64) -> Result<RankCode> {
    require_coprime(s, ctx.n())?;
    code(QPoly::monomial(ctx, ctx.one(), s))
}

pub fn twisted_gabidulin(ctx: &FieldContext, s: i64, eta: FieldElement) -> Result<RankCode> {
    require_coprime(s, ctx.n())?;
    let norm = ctx.norm(eta, 1)?;
    require(!norm.is_zero() && norm != ctx.one(), "N(η) must not be 0 or 1")?;
    let n = ctx.n() as i64;
    code(QPoly::from_terms(ctx, &[(s, eta), ((n - 1) * s, ctx.one())]))
}

/// Roots of z^2 + z - 1, canonical order.
pub fn z6_parameters(ctx: &FieldContext) -> Vec<FieldElement> {
    ctx.elements().filter(|&z| ctx.add(ctx.mul(z, z), z) == ctx.one()).collect()
}

pub fn z6(ctx: &FieldContext, zeta: FieldElement) -> Result<RankCode> {
    require(ctx.n() == 6, "Z6 needs n = 6")?;
    require_odd_q(ctx)?;
    require(ctx.add(ctx.mul(zeta, zeta), zeta) == ctx.one(), "ζ^2 + ζ must be 1")?;
    code(QPoly::from_terms(ctx, &[(1, ctx.one()), (3, ctx.one()), (5, zeta)]))
}

/// With `assert_mrd`, instances that are not MRD are rejected.
pub fn csajbok_k(ctx: &FieldContext, s: i64, delta: FieldElement, assert_mrd: bool) -> Result<RankCode> {
    let n = ctx.n();
    require(n == 6 || n == 8, "K needs n ∈ {6, 8}")?;
    require_coprime(s, n / 2)?;
    let norm = ctx.norm(delta, n / 2)?;
    require(!norm.is_zero() && norm != ctx.one(), "N(δ) must not be 0 or 1")?;
    let c = code(QPoly::from_terms(ctx, &[(s, delta), (s + n as i64 / 2, ctx.one())]))?;
    if assert_mrd && !c.is_mrd(ctx) {
        return Err(Error::Constraint("this K instance is not MRD".into()));
    }
    Ok(c)
}

pub fn lz_code(ctx: &FieldContext) -> Result<RankCode> {
    require_odd_q(ctx)?;
    let t = ctx.t() as i64;
    require(t % 2 == 0 || ctx.q() % 4 == 1, "odd t needs q ≡ 1 (mod 4)")?;
    let one = ctx.one();
    code(QPoly::from_terms(
        ctx,
        &[(1, one), (t - 1, one), (t + 1, ctx.neg_one()), (2 * t - 1, one)],
    ))
}

pub fn lmtz_code(ctx: &FieldContext, h: FieldElement) -> Result<RankCode> {
    require_odd_q(ctx)?;
    require(!ctx.is_in_subfield(h, ctx.t()), "h must not lie in F_(q^t)")?;
    require_fiber(ctx, h)?;
    let t = ctx.t() as i64;
    let one = ctx.one();
    let c3 = ctx.neg(ctx.qpow(h, &[(1, 0), (-1, t + 1)])?);
    let c4 = ctx.qpow(h, &[(1, 0), (-1, 2 * t - 1)])?;
    code(QPoly::from_terms(ctx, &[(1, one), (t - 1, one), (t + 1, c3), (2 * t - 1, c4)]))
}

pub fn nsz_code(ctx: &FieldContext, h: FieldElement, s: i64, variant: NszVariant) -> Result<RankCode> {
    require_odd_q(ctx)?;
    require_coprime(s, ctx.n())?;
    require_fiber(ctx, h)?;
    let t = ctx.t() as i64;
    let one = ctx.one();
    let c3 = match variant {
        NszVariant::Eq5 => ctx.qpow(h, &[(1, 0), (1, s)])?,
        NszVariant::Sec4 => ctx.neg(ctx.qpow(h, &[(1, 0), (-1, s * (t + 1))])?),
    };
    let c4 = ctx.qpow(h, &[(1, 0), (-1, s * (2 * t - 1))])?;
    code(QPoly::from_terms(
        ctx,
        &[(s, one), (s * (t - 1), one), (s * (t + 1), c3), (s * (2 * t - 1), c4)],
    ))
}

pub fn h_standard_form(ctx: &FieldContext, h: FieldElement, s: i64) -> Result<RankCode> {
    require(ctx.t() == 3, "the standard form H needs t = 3")?;
    require_odd_q(ctx)?;
    require_coprime(s, 6)?;
    require_fiber(ctx, h)?;
    let h_1_2s = ctx.qpow(h, &[(1, 0), (1, 2 * s)])?;
    let c1 = ctx.sub(ctx.one(), h_1_2s);
    let c3 = ctx.add(h, ctx.mul(h, h));
    let c5 = ctx.mul(h_1_2s, ctx.add(h, ctx.frobenius(h, s)));
    code(QPoly::from_terms(ctx, &[(s, c1), (3 * s, c3), (5 * s, c5)]))
}

pub fn bzz_code(ctx: &FieldContext, h: FieldElement) -> Result<RankCode> {
    require(ctx.n() == 6, "BZZ needs n = 6")?;
    require_odd_q(ctx)?;
    require_fiber(ctx, h)?;
    let c1 = ctx.qpow(h, &[(1, 1), (-1, 0)])?;
    let c2 = ctx.neg(ctx.qpow(h, &[(1, 2), (-1, 0)])?);
    code(QPoly::from_terms(ctx, &[(1, c1), (2, c2), (4, ctx.one()), (5, ctx.one())]))
}

/// Serializable description of a family member; field elements are given by
/// their F_p coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub t: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<i64>,
    /// η, ζ, δ or h, depending on the family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<NszVariant>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub assert_mrd: bool,
}

impl FamilySpec {
    pub fn new(family: Family, t: u32) -> Self {
        FamilySpec { family, t, s: None, param: None, variant: None, assert_mrd: false }
    }

    pub fn with_s(mut self, s: i64) -> Self {
        self.s = Some(s);
        self
    }

    pub fn with_param(mut self, ctx: &FieldContext, e: FieldElement) -> Self {
        self.param = Some(ctx.coords(e));
        self
    }

    pub fn with_variant(mut self, v: NszVariant) -> Self {
        self.variant = Some(v);
        self
    }

    pub fn build(&self, ctx: &FieldContext) -> Result<RankCode> {
        if self.t != ctx.t() {
            return Err(Error::Constraint(format!("spec has t = {} but the field has t = {}", self.t, ctx.t())));
        }
        let s = || self.s.ok_or_else(|| Error::Constraint("missing s".into()));
        let param = || -> Result<FieldElement> {
            let coords = self.param.as_ref().ok_or_else(|| Error::Constraint("missing parameter".into()))?;
            ctx.from_coords(coords)
        };
        match self.family {
            Family::G => gabidulin(ctx, s()?),
            Family::H2 => twisted_gabidulin(ctx, s()?, param()?),
            Family::Z6 => z6(ctx, param()?),
            Family::K => csajbok_k(ctx, s()?, param()?, self.assert_mrd),
            Family::LZ => lz_code(ctx),
            Family::LMTZ => lmtz_code(ctx, param()?),
            Family::NSZ => {
                let variant = self.variant.ok_or_else(|| Error::Constraint("missing variant".into()))?;
                nsz_code(ctx, param()?, s()?, variant)
            }
            Family::HStd => h_standard_form(ctx, param()?, s()?),
            Family::BZZ => bzz_code(ctx, param()?),
        }
    }
}
