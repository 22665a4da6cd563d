//! q-polynomials Σ c_i x^(q^i) reduced modulo x^(q^n) - x.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{gcd, FieldContext, FieldElement};
use crate::linalg::{self, Matrix, PrimeField};

/// Coefficients c_0, ..., c_{n-1}. Values are tied to the context that
/// built them; every operation takes that context explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<FieldElement>,
}

/// Textual form: nonzero terms as (exponent index, F_p coordinates).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QPolyTerms(pub Vec<(u32, Vec<u32>)>);

impl QPoly {
    pub fn zero(ctx: &FieldContext) -> Self {
        QPoly { coeffs: vec![FieldElement::ZERO; ctx.n() as usize] }
    }

    /// The map x ↦ a x.
    pub fn scalar(ctx: &FieldContext, a: FieldElement) -> Self {
        Self::monomial(ctx, a, 0)
    }

    pub fn identity(ctx: &FieldContext) -> Self {
        Self::scalar(ctx, ctx.one())
    }

    /// c x^(q^i), with i reduced mod n.
    pub fn monomial(ctx: &FieldContext, c: FieldElement, i: i64) -> Self {
        let mut f = Self::zero(ctx);
        f.coeffs[i.rem_euclid(ctx.n() as i64) as usize] = c;
        f
    }

    /// Sum of c_j x^(q^(i_j)); repeated exponents (mod n) accumulate.
    pub fn from_terms(ctx: &FieldContext, terms: &[(i64, FieldElement)]) -> Self {
        let mut f = Self::zero(ctx);
        let n = ctx.n() as i64;
        for &(i, c) in terms {
            let slot = &mut f.coeffs[i.rem_euclid(n) as usize];
            *slot = ctx.add(*slot, c);
        }
        f
    }

    pub fn from_coeffs(ctx: &FieldContext, coeffs: Vec<FieldElement>) -> Result<Self> {
        if coeffs.len() != ctx.n() as usize {
            return Err(Error::BadCoordinates(format!(
                "expected {} coefficients, got {}",
                ctx.n(),
                coeffs.len()
            )));
        }
        Ok(QPoly { coeffs })
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs[i]
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.coeffs[i].is_zero()).collect()
    }

    pub fn add(&self, ctx: &FieldContext, g: &QPoly) -> QPoly {
        QPoly { coeffs: self.coeffs.iter().zip(&g.coeffs).map(|(&a, &b)| ctx.add(a, b)).collect() }
    }

    pub fn sub(&self, ctx: &FieldContext, g: &QPoly) -> QPoly {
        QPoly { coeffs: self.coeffs.iter().zip(&g.coeffs).map(|(&a, &b)| ctx.sub(a, b)).collect() }
    }

    /// λ f(x).
    pub fn scale(&self, ctx: &FieldContext, lambda: FieldElement) -> QPoly {
        QPoly { coeffs: self.coeffs.iter().map(|&c| ctx.mul(lambda, c)).collect() }
    }

    pub fn evaluate(&self, ctx: &FieldContext, x: FieldElement) -> FieldElement {
        if x.is_zero() {
            return x;
        }
        let mut acc = ctx.zero();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = ctx.add(acc, ctx.mul(c, ctx.frobenius(x, i as i64)));
            }
        }
        acc
    }

    /// self ∘ g.
    pub fn compose(&self, ctx: &FieldContext, g: &QPoly) -> QPoly {
        let n = self.n();
        let mut out = vec![ctx.zero(); n];
        for (i, &ci) in self.coeffs.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, &gj) in g.coeffs.iter().enumerate() {
                if gj.is_zero() {
                    continue;
                }
                let k = (i + j) % n;
                out[k] = ctx.add(out[k], ctx.mul(ci, ctx.frobenius(gj, i as i64)));
            }
        }
        QPoly { coeffs: out }
    }

    /// Applies e ↦ e^(p^j) to every coefficient.
    pub fn twist(&self, ctx: &FieldContext, j: i64) -> QPoly {
        QPoly { coeffs: self.coeffs.iter().map(|&c| ctx.p_automorphism(c, j)).collect() }
    }

    /// Rank as an F_q-linear map.
    pub fn rank(&self, ctx: &FieldContext) -> u32 {
        let images: Vec<FieldElement> =
            power_basis(ctx).into_iter().map(|b| self.evaluate(ctx, b)).collect();
        fp_rank_of_images(ctx, &images) / ctx.params().r
    }

    /// gcd of all pairwise support differences together with n.
    pub fn standard_form_gcd(&self) -> Result<u32> {
        let support = self.support();
        if support.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        let n = self.n() as u64;
        let base = support[0] as u64;
        Ok(support.iter().fold(n, |g, &i| gcd(g, i as u64 - base)) as u32)
    }

    /// The common residue of the support modulo the standard-form gcd.
    pub fn standard_form_offset(&self) -> Result<u32> {
        let m = self.standard_form_gcd()?;
        if m <= 1 {
            return Err(Error::NotStandardForm);
        }
        Ok(self.support()[0] as u32 % m)
    }

    pub fn to_terms(&self, ctx: &FieldContext) -> QPolyTerms {
        QPolyTerms(self.support().into_iter().map(|i| (i as u32, ctx.coords(self.coeffs[i]))).collect())
    }

    pub fn from_text(ctx: &FieldContext, terms: &QPolyTerms) -> Result<QPoly> {
        let mut f = Self::zero(ctx);
        for (i, coords) in &terms.0 {
            if *i >= ctx.n() {
                return Err(Error::BadCoordinates(format!("exponent index {i} out of range")));
            }
            f.coeffs[*i as usize] = ctx.from_coords(coords)?;
        }
        Ok(f)
    }
}

/// θ^0, ..., θ^(D-1) for a root θ of the modulus: the elements whose
/// canonical indices are powers of p.
pub fn power_basis(ctx: &FieldContext) -> Vec<FieldElement> {
    let p = ctx.p() as u64;
    (0..ctx.degree()).map(|j| ctx.from_index(p.pow(j)).expect("in range")).collect()
}

/// F_p-rank of the span of `images`.
pub(crate) fn fp_rank_of_images(ctx: &FieldContext, images: &[FieldElement]) -> u32 {
    let dd = ctx.degree() as usize;
    let mut m: Matrix<u32> = images
        .iter()
        .map(|&e| {
            let mut row = vec![0; dd];
            ctx.write_coords(e, &mut row);
            row
        })
        .collect();
    linalg::row_reduce(&PrimeField(ctx.p()), &mut m).len() as u32
}

/// The power basis 1, β, ..., β^(n-1) of F_{q^n} over F_q for the smallest
/// β (canonical order) whose powers are F_q-independent.
#[derive(Clone, Debug)]
pub struct FqBasis {
    elements: Vec<FieldElement>,
    /// F_p-basis 1, ζ, ..., ζ^(r-1) of F_q
    fq_basis: Vec<FieldElement>,
    /// inverse of the D x D matrix whose column i r + k holds the digits of
    /// ζ^k β^i
    inverse: Matrix<u32>,
}

impl FqBasis {
    pub fn new(ctx: &FieldContext) -> Self {
        let n = ctx.n() as usize;
        let r = ctx.params().r as usize;
        let dd = ctx.degree() as usize;
        let zeta = ctx.pow_u(ctx.generator(), (ctx.order() - 1) / (ctx.q() - 1));
        let fq_basis: Vec<FieldElement> = (0..r).map(|k| ctx.pow_u(zeta, k as u64)).collect();
        let k = PrimeField(ctx.p());
        for beta in ctx.nonzero_elements() {
            let mut cols = Vec::with_capacity(dd);
            for i in 0..n {
                let bi = ctx.pow_u(beta, i as u64);
                for &z in &fq_basis {
                    cols.push(ctx.coords(ctx.mul(z, bi)));
                }
            }
            let m: Matrix<u32> = (0..dd).map(|row| cols.iter().map(|c| c[row]).collect()).collect();
            if let Some(inverse) = linalg::inverse(&k, &m) {
                let elements = (0..n).map(|i| ctx.pow_u(beta, i as u64)).collect();
                return FqBasis { elements, fq_basis, inverse };
            }
        }
        unreachable!("a primitive element always generates F_(q^n) over F_q")
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    /// F_q-coordinates of `e` (each an element of the subfield F_q).
    pub fn coordinates(&self, ctx: &FieldContext, e: FieldElement) -> Vec<FieldElement> {
        let r = self.fq_basis.len();
        let digits = ctx.coords(e);
        let a = linalg::mat_vec(&PrimeField(ctx.p()), &self.inverse, &digits);
        a.chunks(r)
            .map(|chunk| {
                chunk.iter().zip(&self.fq_basis).fold(ctx.zero(), |acc, (&d, &z)| {
                    ctx.add(acc, ctx.mul(ctx.from_int(d as i64), z))
                })
            })
            .collect()
    }

    pub fn from_coordinates(&self, ctx: &FieldContext, coords: &[FieldElement]) -> FieldElement {
        coords
            .iter()
            .zip(&self.elements)
            .fold(ctx.zero(), |acc, (&c, &b)| ctx.add(acc, ctx.mul(c, b)))
    }

    /// n x n matrix over F_q; column j holds the coordinates of f(β^j).
    pub fn to_matrix(&self, ctx: &FieldContext, f: &QPoly) -> Matrix<FieldElement> {
        let n = self.elements.len();
        let cols: Vec<Vec<FieldElement>> =
            self.elements.iter().map(|&b| self.coordinates(ctx, f.evaluate(ctx, b))).collect();
        (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(p: u32, r: u32, t: u32) -> FieldContext {
        FieldContext::new(FieldParams::new(p, r, t).unwrap()).unwrap()
    }

    fn random_poly(c: &FieldContext, rng: &mut ChaCha8Rng) -> QPoly {
        QPoly::from_coeffs(c, (0..c.n()).map(|_| c.random(rng)).collect()).unwrap()
    }

    #[test]
    fn evaluation_basics() {
        let c = ctx(3, 1, 3);
        let f = QPoly::monomial(&c, c.one(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let e = c.random(&mut rng);
            assert_eq!(f.evaluate(&c, e), c.frobenius(e, 1));
            let g = random_poly(&c, &mut rng);
            let a = c.random(&mut rng);
            assert_eq!(g.evaluate(&c, c.add(a, e)), c.add(g.evaluate(&c, a), g.evaluate(&c, e)));
            assert_eq!(g.evaluate(&c, c.zero()), c.zero());
        }
    }

    #[test]
    fn composition() {
        let c = ctx(3, 1, 3);
        let xa = QPoly::monomial(&c, c.one(), 4);
        let xb = QPoly::monomial(&c, c.one(), 5);
        assert_eq!(xa.compose(&c, &xb), QPoly::monomial(&c, c.one(), 3));
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let f = random_poly(&c, &mut rng);
            let g = random_poly(&c, &mut rng);
            let e = c.random(&mut rng);
            assert_eq!(f.compose(&c, &QPoly::identity(&c)), f);
            assert_eq!(f.compose(&c, &g).evaluate(&c, e), f.evaluate(&c, g.evaluate(&c, e)));
        }
    }

    #[test]
    fn twist_semilinearity() {
        let c = ctx(3, 2, 3);
        let d = c.degree() as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for j in 0..d {
            let f = random_poly(&c, &mut rng);
            let e = c.random(&mut rng);
            assert_eq!(f.twist(&c, 0), f);
            assert_eq!(f.twist(&c, j).twist(&c, d - j), f);
            assert_eq!(
                f.twist(&c, j).evaluate(&c, c.p_automorphism(e, j)),
                c.p_automorphism(f.evaluate(&c, e), j)
            );
        }
    }

    #[test]
    fn ranks() {
        let c = ctx(3, 1, 3);
        assert_eq!(QPoly::monomial(&c, c.one(), 2).rank(&c), 6);
        let trace = QPoly::from_terms(&c, &(0..6).map(|i| (i, c.one())).collect::<Vec<_>>());
        assert_eq!(trace.rank(&c), 1);
        assert_eq!(QPoly::zero(&c).rank(&c), 0);
    }

    #[test]
    fn rank_matches_kernel_count() {
        let c = ctx(3, 1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let polys = [
            random_poly(&c, &mut rng),
            QPoly::from_terms(&c, &[(0, c.neg_one()), (2, c.one())]),
            QPoly::from_terms(&c, &[(0, c.neg_one()), (3, c.one())]),
            QPoly::from_terms(&c, &[(1, c.one()), (4, c.one())]),
        ];
        for f in &polys {
            let kernel = c.elements().filter(|&e| f.evaluate(&c, e).is_zero()).count() as u64;
            let mut log = 0;
            while 3u64.pow(log) < kernel {
                log += 1;
            }
            assert_eq!(3u64.pow(log), kernel);
            assert_eq!(f.rank(&c), 6 - log);
        }
    }

    #[test]
    fn matrix_representation() {
        for c in [ctx(3, 1, 3), ctx(3, 2, 3)] {
            let basis = FqBasis::new(&c);
            let n = c.n() as usize;
            let id = basis.to_matrix(&c, &QPoly::identity(&c));
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(id[i][j], if i == j { c.one() } else { c.zero() });
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            for _ in 0..20 {
                let f = random_poly(&c, &mut rng);
                let g = random_poly(&c, &mut rng);
                let fg = basis.to_matrix(&c, &f.compose(&c, &g));
                let prod = linalg::mat_mul(&c, &basis.to_matrix(&c, &f), &basis.to_matrix(&c, &g));
                assert_eq!(fg, prod);
                let mf = basis.to_matrix(&c, &f);
                assert!(mf.iter().flatten().all(|&e| c.is_in_subfield(e, 1)));
                assert_eq!(linalg::rank(&c, &mf) as u32, f.rank(&c));
                let e = c.random(&mut rng);
                assert_eq!(basis.from_coordinates(&c, &basis.coordinates(&c, e)), e);
            }
            let alpha = c.random_nonzero(&mut rng);
            let m = basis.to_matrix(&c, &QPoly::scalar(&c, alpha));
            assert!(!linalg::determinant(&c, &m).is_zero());
        }
    }

    #[test]
    fn standard_form() {
        let c = ctx(3, 1, 4);
        let mono = QPoly::monomial(&c, c.one(), 3);
        assert_eq!(mono.standard_form_gcd().unwrap(), 8);
        let f = QPoly::from_terms(&c, &[(3, c.one()), (1, c.one()), (7, c.one()), (5, c.one())]);
        assert_eq!(f.standard_form_gcd().unwrap(), 2);
        assert_eq!(f.standard_form_offset().unwrap(), 1);
        let g = QPoly::from_terms(&c, &[(1, c.one()), (2, c.one())]);
        assert_eq!(g.standard_form_gcd().unwrap(), 1);
        assert_eq!(g.standard_form_offset(), Err(Error::NotStandardForm));
        assert_eq!(QPoly::zero(&c).standard_form_gcd(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn standard_form_semilinearity() {
        // support {1, 3, 5} at n = 6: F_{q^2}-semilinear with offset 1
        let c = ctx(3, 1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let f = QPoly::from_terms(
            &c,
            &[(1, c.random_nonzero(&mut rng)), (3, c.random_nonzero(&mut rng)), (5, c.one())],
        );
        let s = f.standard_form_offset().unwrap() as i64;
        for alpha in c.subfield_elements(2).unwrap() {
            for e in c.elements() {
                assert_eq!(
                    f.evaluate(&c, c.mul(alpha, e)),
                    c.mul(c.frobenius(alpha, s), f.evaluate(&c, e))
                );
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let c = ctx(5, 1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let f = random_poly(&c, &mut rng);
        assert_eq!(QPoly::from_text(&c, &f.to_terms(&c)).unwrap(), f);
    }
}
