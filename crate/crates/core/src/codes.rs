//! Two-dimensional F_{q^n}-linear codes ⟨x, f(x)⟩.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldElement};
use crate::linalg::{self, Matrix, PrimeField};
use crate::qpoly::{power_basis, QPoly};

#[derive(Debug)]
pub struct RankCode {
    f: QPoly,
    min_distance: OnceLock<u32>,
}

impl Clone for RankCode {
    fn clone(&self) -> Self {
        let cell = OnceLock::new();
        if let Some(&d) = self.min_distance.get() {
            let _ = cell.set(d);
        }
        RankCode { f: self.f.clone(), min_distance: cell }
    }
}

impl RankCode {
    pub fn new(f: QPoly) -> Result<Self> {
        if !f.coeff(0).is_zero() {
            return Err(Error::Constraint("the x coefficient of f must be zero".into()));
        }
        if f.is_zero() {
            return Err(Error::Constraint("f must not be a multiple of x".into()));
        }
        Ok(RankCode { f, min_distance: OnceLock::new() })
    }

    pub fn f(&self) -> &QPoly {
        &self.f
    }

    /// a x + b f(x).
    pub fn codeword(&self, ctx: &FieldContext, a: FieldElement, b: FieldElement) -> Result<QPoly> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::Constraint("codeword coefficients are both zero".into()));
        }
        Ok(QPoly::scalar(ctx, a).add(ctx, &self.f.scale(ctx, b)))
    }

    pub fn min_distance(&self, ctx: &FieldContext) -> u32 {
        *self.min_distance.get_or_init(|| min_distance(ctx, &self.f))
    }

    pub fn is_mrd(&self, ctx: &FieldContext) -> bool {
        self.min_distance(ctx) == ctx.n() - 1
    }

    pub fn is_scattered(&self, ctx: &FieldContext) -> bool {
        is_scattered(ctx, &self.f)
    }

    pub fn right_idealizer(&self, ctx: &FieldContext) -> IdealizerReport {
        idealizer(ctx, &self.f, Side::Right)
    }

    pub fn left_idealizer(&self, ctx: &FieldContext) -> IdealizerReport {
        idealizer(ctx, &self.f, Side::Left)
    }
}

fn min_distance(ctx: &FieldContext, f: &QPoly) -> u32 {
    let basis = power_basis(ctx);
    let images: Vec<FieldElement> = basis.iter().map(|&b| f.evaluate(ctx, b)).collect();
    let dd = ctx.degree() as usize;
    let r = ctx.params().r;
    let k = PrimeField(ctx.p());
    // the codeword x alone has full rank n
    let others = ctx
        .elements()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|a| {
            let mut m: Matrix<u32> = vec![vec![0; dd]; dd];
            for j in 0..dd {
                let v = ctx.add(ctx.mul(a, basis[j]), images[j]);
                ctx.write_coords(v, &mut m[j]);
            }
            linalg::row_reduce(&k, &mut m).len() as u32 / r
        })
        .min()
        .unwrap_or(ctx.n());
    others.min(ctx.n())
}

/// Weight criterion: f is scattered iff every point ⟨(x, f(x))⟩ is hit by
/// exactly q - 1 nonzero x.
pub fn is_scattered(ctx: &FieldContext, f: &QPoly) -> bool {
    let q = ctx.q() as u32;
    let mut counts = vec![0u32; ctx.order() as usize];
    for x in ctx.nonzero_elements() {
        let ratio = ctx.div(f.evaluate(ctx, x), x).expect("x is nonzero");
        let slot = &mut counts[ctx.index(ratio) as usize];
        *slot += 1;
        if *slot >= q {
            return false;
        }
    }
    true
}

/// Direct check: f(κy) = κ f(y) with y ≠ 0 forces κ ∈ F_q.
pub fn is_scattered_by_definition(ctx: &FieldContext, f: &QPoly) -> bool {
    let values: Vec<FieldElement> = ctx.elements().map(|e| f.evaluate(ctx, e)).collect();
    let value = |e: FieldElement| values[ctx.index(e) as usize];
    ctx.nonzero_elements().all(|y| {
        let fy = value(y);
        ctx.elements()
            .filter(|&k| !ctx.is_in_subfield(k, 1))
            .all(|k| value(ctx.mul(k, y)) != ctx.mul(k, fy))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealizerReport {
    pub side: Side,
    /// Dimension over F_q.
    pub dimension: u32,
    /// An F_q-basis; the first element is x.
    pub basis: Vec<QPoly>,
    /// Whether the idealizer is {α x : α ∈ F_(q^m)} with m the dimension.
    pub is_scalar_field: bool,
    pub closed_under_composition: bool,
}

/// Projection onto a complement of span{x, f}: zero exactly on the code.
pub(crate) struct CodeQuotient {
    f: QPoly,
    pivot: usize,
    pivot_inv: FieldElement,
}

impl CodeQuotient {
    pub(crate) fn new(ctx: &FieldContext, f: &QPoly) -> Self {
        let pivot = (1..f.n()).find(|&i| !f.coeff(i).is_zero()).expect("f has a nonzero term");
        let pivot_inv = ctx.inv(f.coeff(pivot)).expect("nonzero");
        CodeQuotient { f: f.clone(), pivot, pivot_inv }
    }

    /// Returns (c, d, residue) with g = c x + d f + residue.
    pub(crate) fn split(&self, ctx: &FieldContext, g: &QPoly) -> (FieldElement, FieldElement, QPoly) {
        let c = g.coeff(0);
        let d = ctx.mul(g.coeff(self.pivot), self.pivot_inv);
        let residue = g.sub(ctx, &QPoly::scalar(ctx, c)).sub(ctx, &self.f.scale(ctx, d));
        (c, d, residue)
    }

    pub(crate) fn contains(&self, ctx: &FieldContext, g: &QPoly) -> bool {
        self.split(ctx, g).2.is_zero()
    }

    fn residue_digits(&self, ctx: &FieldContext, g: &QPoly, out: &mut Vec<u32>) {
        let dd = ctx.degree() as usize;
        for &e in self.split(ctx, g).2.coeffs() {
            let start = out.len();
            out.resize(start + dd, 0);
            ctx.write_coords(e, &mut out[start..]);
        }
    }
}

fn idealizer(ctx: &FieldContext, f: &QPoly, side: Side) -> IdealizerReport {
    let quotient = CodeQuotient::new(ctx, f);
    let basis = power_basis(ctx);
    let dd = basis.len();
    let phi_of = |alpha: FieldElement, beta: FieldElement| {
        QPoly::scalar(ctx, alpha).add(ctx, &f.scale(ctx, beta))
    };
    let conditions = |phi: &QPoly| -> Vec<u32> {
        let mut out = Vec::new();
        match side {
            Side::Right => quotient.residue_digits(ctx, &f.compose(ctx, phi), &mut out),
            Side::Left => {
                for &b in &basis {
                    quotient.residue_digits(ctx, &phi.compose(ctx, &QPoly::scalar(ctx, b)), &mut out);
                }
                quotient.residue_digits(ctx, &phi.compose(ctx, f), &mut out);
            }
        }
        out
    };
    // columns: images of the F_p-basis (θ^k, 0), (0, θ^k) of pairs (α, β)
    let columns: Vec<Vec<u32>> = (0..2 * dd)
        .map(|c| {
            let (alpha, beta) =
                if c < dd { (basis[c], ctx.zero()) } else { (ctx.zero(), basis[c - dd]) };
            conditions(&phi_of(alpha, beta))
        })
        .collect();
    let rows = columns[0].len();
    let m: Matrix<u32> = (0..rows).map(|i| columns.iter().map(|col| col[i]).collect()).collect();
    let kernel = linalg::kernel(&PrimeField(ctx.p()), &m, 2 * dd);

    let from_digits = |digits: &[u32]| ctx.from_coords(digits).expect("valid digits");
    let candidates = std::iter::once((ctx.one(), ctx.zero())).chain(
        kernel.iter().map(|v| (from_digits(&v[..dd]), from_digits(&v[dd..]))),
    );
    let pairs = fq_independent_pairs(ctx, candidates);
    let dimension = pairs.len() as u32;
    let basis_polys: Vec<QPoly> = pairs.iter().map(|&(a, b)| phi_of(a, b)).collect();

    let is_scalar_field = ctx.n() % dimension == 0
        && pairs.iter().all(|&(a, b)| b.is_zero() && ctx.is_in_subfield(a, dimension));
    let member = |phi: &QPoly| {
        let in_code = quotient.contains(ctx, phi);
        in_code
            && match side {
                Side::Right => quotient.contains(ctx, &f.compose(ctx, phi)),
                Side::Left => {
                    quotient.contains(ctx, &phi.compose(ctx, f))
                        && basis
                            .iter()
                            .all(|&b| quotient.contains(ctx, &phi.compose(ctx, &QPoly::scalar(ctx, b))))
                }
            }
    };
    let closed_under_composition = basis_polys
        .iter()
        .all(|a| basis_polys.iter().all(|b| member(&a.compose(ctx, b))));

    IdealizerReport { side, dimension, basis: basis_polys, is_scalar_field, closed_under_composition }
}

/// Greedily keeps the candidates that are F_q-independent of the ones kept so
/// far, in the order given.
fn fq_independent_pairs(
    ctx: &FieldContext,
    candidates: impl Iterator<Item = (FieldElement, FieldElement)>,
) -> Vec<(FieldElement, FieldElement)> {
    let dd = ctx.degree() as usize;
    let r = ctx.params().r as usize;
    let k = PrimeField(ctx.p());
    let zeta = ctx.pow_u(ctx.generator(), (ctx.order() - 1) / (ctx.q() - 1));
    let mut kept = Vec::new();
    let mut rows: Matrix<u32> = Vec::new();
    for (a, b) in candidates {
        let mut trial = rows.clone();
        for i in 0..r {
            let z = ctx.pow_u(zeta, i as u64);
            let mut row = vec![0; 2 * dd];
            ctx.write_coords(ctx.mul(z, a), &mut row[..dd]);
            ctx.write_coords(ctx.mul(z, b), &mut row[dd..]);
            trial.push(row);
        }
        if linalg::rank(&k, &trial) == rows.len() + r {
            rows = trial;
            kept.push((a, b));
        }
    }
    kept
}

/// A 2 x 2 matrix ((a, b), (c, d)).
pub type Mat2 = [FieldElement; 4];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerReport {
    pub order: u64,
    /// Sorted by the canonical indices of (a, b).
    pub elements: Vec<Mat2>,
    pub all_diagonal: bool,
    /// When every element is diag(α, α^(q^s)), the least such s.
    pub field_exponent: Option<u32>,
}

/// Enumerates every invertible ((a,b),(c,d)) with f(a y + b f(y)) =
/// c y + d f(y).
pub fn stabilizer(ctx: &FieldContext, f: &QPoly, budget: u128) -> Result<StabilizerReport> {
    let needed = (ctx.order() as u128).pow(2);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let quotient = CodeQuotient::new(ctx, f);
    let elements: Vec<FieldElement> = ctx.elements().collect();
    let f_scaled: Vec<QPoly> =
        elements.iter().map(|&a| f.compose(ctx, &QPoly::scalar(ctx, a))).collect();
    let f_of_f: Vec<QPoly> =
        elements.iter().map(|&b| f.compose(ctx, &f.scale(ctx, b))).collect();
    let mut found: Vec<Mat2> = (0..elements.len())
        .into_par_iter()
        .flat_map_iter(|ia| {
            let quotient = &quotient;
            let elements = &elements;
            let f_scaled = &f_scaled;
            let f_of_f = &f_of_f;
            (0..elements.len()).filter_map(move |ib| {
                let (a, b) = (elements[ia], elements[ib]);
                let g = f_scaled[ia].add(ctx, &f_of_f[ib]);
                let (c, d, residue) = quotient.split(ctx, &g);
                let det = ctx.sub(ctx.mul(a, d), ctx.mul(b, c));
                (residue.is_zero() && !det.is_zero()).then_some([a, b, c, d])
            })
        })
        .collect();
    found.sort_by_key(|m| (ctx.index(m[0]), ctx.index(m[1])));
    let all_diagonal = found.iter().all(|m| m[1].is_zero() && m[2].is_zero());
    let field_exponent = if all_diagonal {
        (0..ctx.n()).find(|&s| found.iter().all(|m| ctx.frobenius(m[0], s as i64) == m[3]))
    } else {
        None
    };
    Ok(StabilizerReport { order: found.len() as u64, elements: found, all_diagonal, field_exponent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;

    fn ctx(p: u32, r: u32, t: u32) -> FieldContext {
        FieldContext::new(FieldParams::new(p, r, t).unwrap()).unwrap()
    }

    fn brute_min_distance(c: &FieldContext, f: &QPoly) -> u32 {
        let code = RankCode::new(f.clone()).unwrap();
        let mut best = code.codeword(c, c.one(), c.zero()).unwrap().rank(c);
        for a in c.elements() {
            best = best.min(code.codeword(c, a, c.one()).unwrap().rank(c));
        }
        best
    }

    #[test]
    fn gabidulin_distance() {
        let c = ctx(3, 1, 3);
        for s in [1, 5] {
            let code = RankCode::new(QPoly::monomial(&c, c.one(), s)).unwrap();
            assert_eq!(code.min_distance(&c), 5);
            assert!(code.is_mrd(&c));
            assert!(code.is_scattered(&c));
        }
    }

    #[test]
    fn distance_matches_brute_force() {
        let c = ctx(3, 1, 3);
        let f = QPoly::from_terms(&c, &[(1, c.one()), (2, c.one())]);
        let code = RankCode::new(f.clone()).unwrap();
        assert_eq!(code.min_distance(&c), brute_min_distance(&c, &f));
        let g = QPoly::from_terms(&c, &[(1, c.one()), (3, c.one())]);
        let code = RankCode::new(g.clone()).unwrap();
        assert_eq!(code.min_distance(&c), brute_min_distance(&c, &g));
        assert_eq!(code.is_mrd(&c), code.is_scattered(&c));
    }

    #[test]
    fn codeword_rules() {
        let c = ctx(3, 1, 3);
        let f = QPoly::monomial(&c, c.one(), 1);
        let code = RankCode::new(f.clone()).unwrap();
        assert_eq!(code.codeword(&c, c.one(), c.zero()).unwrap(), QPoly::identity(&c));
        assert_eq!(code.codeword(&c, c.zero(), c.one()).unwrap(), f);
        assert!(code.codeword(&c, c.zero(), c.zero()).is_err());
        assert!(RankCode::new(QPoly::identity(&c)).is_err());
        assert!(RankCode::new(QPoly::zero(&c)).is_err());
    }

    #[test]
    fn scatteredness() {
        let c = ctx(3, 1, 3);
        let non = QPoly::monomial(&c, c.one(), 2);
        assert!(!is_scattered(&c, &non));
        assert!(!is_scattered_by_definition(&c, &non));
        let mono = QPoly::monomial(&c, c.one(), 1);
        assert!(is_scattered_by_definition(&c, &mono));
        let mixed = QPoly::from_terms(&c, &[(1, c.one()), (2, c.one())]);
        assert_eq!(is_scattered(&c, &mixed), is_scattered_by_definition(&c, &mixed));
    }

    #[test]
    fn gabidulin_idealizers() {
        let c = ctx(3, 1, 3);
        let code = RankCode::new(QPoly::monomial(&c, c.one(), 1)).unwrap();
        for rep in [code.right_idealizer(&c), code.left_idealizer(&c)] {
            assert_eq!(rep.dimension, 6);
            assert!(rep.is_scalar_field);
            assert!(rep.closed_under_composition);
            assert_eq!(rep.basis[0], QPoly::identity(&c));
        }
    }

    #[test]
    fn idealizer_matches_enumeration() {
        let c = ctx(3, 1, 3);
        // F_{q^2}-semilinear: support {1, 3, 5}
        let g = c.generator();
        let f = QPoly::from_terms(&c, &[(1, c.one()), (3, g), (5, c.one())]);
        let code = RankCode::new(f.clone()).unwrap();
        let rep = code.right_idealizer(&c);
        let quotient = CodeQuotient::new(&c, &f);
        let mut count = 0u64;
        for a in c.elements() {
            for b in c.elements() {
                let phi = QPoly::scalar(&c, a).add(&c, &f.scale(&c, b));
                if quotient.contains(&c, &f.compose(&c, &phi)) {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 3u64.pow(rep.dimension));
        assert!(rep.dimension >= 2);
    }

    #[test]
    fn monomial_stabilizer() {
        let c = ctx(3, 1, 3);
        let f = QPoly::monomial(&c, c.one(), 1);
        let rep = stabilizer(&c, &f, u128::MAX).unwrap();
        assert_eq!(rep.order, 728);
        assert!(rep.all_diagonal);
        assert_eq!(rep.field_exponent, Some(1));
        assert!(matches!(stabilizer(&c, &f, 1000), Err(Error::BudgetExceeded { .. })));
    }
}
