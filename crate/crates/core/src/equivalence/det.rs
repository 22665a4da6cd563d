//! The determinant identities behind the antidiagonal cases of the
//! equivalence criterion at t = 3 and t = 4.
//!
//! Each case is a square linear system in the unknowns b^(q^s), b^(q^(3s)),
//! ... whose determinant has a closed form in h and k. The matrices are built
//! entry by entry and their determinants compared with the closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldElement};
use crate::linalg::{self, Matrix};

/// Which system: at t = 3 the plain or primed one, at t = 4 the congruence
/// class of s against ℓ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DetCase {
    #[serde(rename = "A")]
    Plain,
    #[serde(rename = "A'")]
    Primed,
    #[serde(rename = "s")]
    Same,
    #[serde(rename = "-s")]
    Negated,
    #[serde(rename = "3s")]
    Triple,
    #[serde(rename = "5s")]
    Quintuple,
}

impl DetCase {
    pub const T3: [DetCase; 2] = [DetCase::Plain, DetCase::Primed];
    pub const T4: [DetCase; 4] = [DetCase::Same, DetCase::Negated, DetCase::Triple, DetCase::Quintuple];

    pub fn t(self) -> u32 {
        match self {
            DetCase::Plain | DetCase::Primed => 3,
            _ => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetCheck {
    pub case: DetCase,
    pub matrix: Matrix<FieldElement>,
    pub determinant: FieldElement,
    pub closed_form: FieldElement,
    /// determinant = -closed_form.
    pub negated: bool,
}

impl DetCheck {
    pub fn holds(&self) -> bool {
        self.determinant == self.closed_form
    }
}

/// Builds the system for `case` and evaluates both sides.
pub fn det_check(ctx: &FieldContext, case: DetCase, h: FieldElement, k: FieldElement, s: i64) -> Result<DetCheck> {
    if ctx.t() != case.t() {
        return Err(Error::Constraint(format!("case {:?} needs t = {}", case, case.t())));
    }
    if h.is_zero() || k.is_zero() {
        return Err(Error::Constraint("h and k must be nonzero".into()));
    }
    let (matrix, closed_form) = if case.t() == 3 { t3(ctx, case, h, k, s)? } else { t4(ctx, case, h, k, s)? };
    let determinant = linalg::determinant(ctx, &matrix);
    let negated = ctx.add(determinant, closed_form).is_zero();
    Ok(DetCheck { case, matrix, determinant, closed_form, negated })
}

/// Powers of a fixed element with exponents Σ c_i q^(e_i s).
struct Powers<'a> {
    ctx: &'a FieldContext,
    base: FieldElement,
    s: i64,
}

impl Powers<'_> {
    fn at(&self, terms: &[(i64, i64)]) -> FieldElement {
        let scaled: Vec<(i64, i64)> = terms.iter().map(|&(c, e)| (c, e * self.s)).collect();
        self.ctx.qpow(self.base, &scaled).expect("nonzero base")
    }
}

type System = (Matrix<FieldElement>, FieldElement);

fn t3(ctx: &FieldContext, case: DetCase, h: FieldElement, k: FieldElement, s: i64) -> Result<System> {
    let hp = Powers { ctx, base: h, s };
    let kp = Powers { ctx, base: k, s };
    let add = |a, b| ctx.add(a, b);
    let sub = |a, b| ctx.sub(a, b);
    let mul = |a, b| ctx.mul(a, b);
    let one = ctx.one();

    let h12 = hp.at(&[(1, 0), (1, 2)]);
    let c1 = sub(one, h12);
    let c3 = add(h, mul(h, h));
    let c5 = mul(h12, add(h, hp.at(&[(1, 1)])));
    let k1 = |e: i64| kp.at(&[(1, e)]);
    let k2 = |e: i64| kp.at(&[(2, e)]);
    let kk = |a: i64, b: i64| kp.at(&[(1, a), (1, b)]);

    let matrix = match case {
        DetCase::Plain => vec![
            vec![
                mul(kk(1, 3), mul(c1, add(k1(1), k1(2)))),
                mul(c3, add(k1(3), k2(3))),
                mul(c5, sub(one, kk(5, 1))),
            ],
            vec![
                mul(c1, add(k1(1), k2(1))),
                mul(c3, sub(one, kk(3, 5))),
                mul(kk(5, 1), mul(c5, add(k1(5), k))),
            ],
            vec![
                mul(c1, sub(one, kk(1, 3))),
                mul(kk(3, 5), mul(c3, add(k1(3), k1(4)))),
                mul(c5, add(k1(5), k2(5))),
            ],
        ],
        DetCase::Primed => vec![
            vec![
                mul(c1, sub(one, kk(1, 5))),
                mul(c3, add(k1(3), k2(3))),
                mul(kk(5, 3), mul(c5, add(k1(5), k1(4)))),
            ],
            vec![
                mul(kk(1, 5), mul(c1, add(k1(1), k))),
                mul(c3, sub(one, kk(3, 1))),
                mul(c5, add(k1(5), k2(5))),
            ],
            vec![
                mul(c1, add(k1(1), k2(1))),
                mul(kk(3, 1), mul(c3, add(k1(3), k1(2)))),
                mul(c5, sub(one, kk(5, 3))),
            ],
        ],
        _ => unreachable!(),
    };
    let cube_base = add(kp.at(&[(1, 1), (1, 3), (1, 5)]), one);
    let cube = mul(cube_base, mul(cube_base, cube_base));
    let closed = [h12, sub(h12, one), c3, add(h, hp.at(&[(1, 1)])), cube]
        .into_iter()
        .fold(one, |acc, x| mul(acc, x));
    Ok((matrix, closed))
}

fn t4(ctx: &FieldContext, case: DetCase, h: FieldElement, k: FieldElement, s: i64) -> Result<System> {
    let hp = Powers { ctx, base: h, s };
    let kp = Powers { ctx, base: k, s };
    let mul = |a, b| ctx.mul(a, b);
    let neg = |a| ctx.neg(a);
    let one = ctx.one();
    let h5 = hp.at(&[(1, 0), (-1, 5)]);
    let h7 = hp.at(&[(1, 0), (-1, 7)]);
    // k^(q^(a s) - q^(b s))
    let kd = |a: i64, b: i64| kp.at(&[(1, a), (-1, b)]);
    // k^(q^(a s) - 1)
    let km1 = |a: i64| ctx.qpow(k, &[(1, a * s), (-1, 0)]).expect("nonzero");

    let matrix = match case {
        DetCase::Same => vec![
            vec![one, kd(3, 2), mul(h5, kd(5, 2)), h7],
            vec![one, one, neg(mul(kd(5, 4), h5)), neg(mul(h7, kd(7, 4)))],
            vec![neg(kd(1, 6)), one, neg(h5), mul(h7, kd(7, 6))],
            vec![km1(1), neg(km1(3)), neg(h5), h7],
        ],
        DetCase::Negated => vec![
            vec![one, neg(kd(3, 6)), neg(mul(h5, kd(5, 6))), h7],
            vec![one, one, mul(km1(5), h5), mul(h7, km1(7))],
            vec![kd(1, 2), one, neg(h5), neg(mul(h7, kd(7, 2)))],
            vec![neg(kd(1, 4)), kd(3, 4), neg(h5), h7],
        ],
        DetCase::Triple => vec![
            vec![one, neg(kd(3, 2)), neg(mul(h5, kd(5, 2))), h7],
            vec![one, one, mul(kd(5, 4), h5), mul(h7, kd(7, 4))],
            vec![kd(1, 6), one, neg(h5), neg(mul(h7, kd(7, 6)))],
            vec![neg(km1(1)), km1(3), neg(h5), h7],
        ],
        DetCase::Quintuple => vec![
            vec![one, kd(3, 6), mul(h5, kd(5, 6)), h7],
            vec![one, one, neg(mul(km1(5), h5)), neg(mul(h7, km1(7)))],
            vec![neg(kd(1, 2)), one, neg(h5), mul(h7, kd(7, 2))],
            vec![kd(1, 4), neg(kd(3, 4)), neg(h5), h7],
        ],
        _ => unreachable!(),
    };
    let trace = trace_term(ctx, k, s)?;
    let scale = hp.at(&[(2, 0), (-1, 5), (-1, 7)]);
    let closed = mul(trace, scale);
    let closed = if case == DetCase::Triple { closed } else { neg(closed) };
    Ok((matrix, closed))
}

/// Tr_(q^8/q)(k^(q^s + 1) + k^(q^(3s) + 1)).
pub fn trace_term(ctx: &FieldContext, k: FieldElement, s: i64) -> Result<FieldElement> {
    let a = ctx.qpow(k, &[(1, s), (1, 0)])?;
    let b = ctx.qpow(k, &[(1, 3 * s), (1, 0)])?;
    ctx.trace(ctx.add(a, b), 1)
}

/// Tr_(q^8/q^2)(k)^(q^s + 1), the other expression for [`trace_term`].
pub fn trace_term_alt(ctx: &FieldContext, k: FieldElement, s: i64) -> Result<FieldElement> {
    let tr = ctx.trace(k, 2)?;
    if tr.is_zero() {
        return Ok(tr);
    }
    ctx.qpow(tr, &[(1, s), (1, 0)])
}
