//! Deciding equivalence of codes ⟨x, f⟩ with a nontrivial right idealizer.
//!
//! A witness (ρ, A) with ρ: e ↦ e^(p^j) and A = ((a, b), (c, d)) invertible
//! *links* F1 to F2 when A maps U_(F2) = {(y, F2(y))} onto U_(F1^ρ), that is
//!
//! ```text
//! F1^ρ(a x + b F2(x)) = c x + d F2(x).
//! ```
//!
//! Diagonal witnesses read d F2(x) = F1^ρ(a x), antidiagonal ones
//! F1^ρ(b F2(x)) = c x. Every equivalence between codes is a link in this
//! sense, and links compose and invert.

pub mod census;
pub mod det;

use serde::{Deserialize, Serialize};

use crate::codes::{CodeQuotient, Mat2, RankCode};
use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::field::{ContextDescriptor, FieldContext, FieldElement};
use crate::linalg::{self, Matrix, PrimeField};
use crate::qpoly::{power_basis, FqBasis, QPoly, QPolyTerms};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Diagonal,
    Antidiagonal,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub shape: Shape,
    /// ρ is e ↦ e^(p^rho).
    pub rho: u32,
    pub matrix: Mat2,
}

impl EquivalenceWitness {
    pub fn identity(ctx: &FieldContext) -> Self {
        Self::from_matrix(0, [ctx.one(), ctx.zero(), ctx.zero(), ctx.one()])
    }

    pub fn diagonal(rho: u32, a: FieldElement, d: FieldElement) -> Self {
        EquivalenceWitness { shape: Shape::Diagonal, rho, matrix: [a, FieldElement::ZERO, FieldElement::ZERO, d] }
    }

    pub fn antidiagonal(rho: u32, b: FieldElement, c: FieldElement) -> Self {
        EquivalenceWitness { shape: Shape::Antidiagonal, rho, matrix: [FieldElement::ZERO, b, c, FieldElement::ZERO] }
    }

    /// Classifies the shape from the zero pattern.
    pub fn from_matrix(rho: u32, m: Mat2) -> Self {
        let shape = if m[1].is_zero() && m[2].is_zero() {
            Shape::Diagonal
        } else if m[0].is_zero() && m[3].is_zero() {
            Shape::Antidiagonal
        } else {
            Shape::General
        };
        EquivalenceWitness { shape, rho, matrix: m }
    }

    /// Given self linking F1 to F2 and `next` linking F2 to F3, the link from
    /// F1 to F3.
    pub fn then(&self, ctx: &FieldContext, next: &EquivalenceWitness) -> Self {
        let lifted = twist_matrix(ctx, &self.matrix, next.rho as i64);
        let rho = (self.rho + next.rho) % ctx.degree();
        Self::from_matrix(rho, mat2_mul(ctx, &lifted, &next.matrix))
    }

    /// The link from F2 back to F1.
    pub fn inverse(&self, ctx: &FieldContext) -> Self {
        let inv = mat2_inverse(ctx, &self.matrix).expect("witness matrices are invertible");
        let back = (ctx.degree() - self.rho) % ctx.degree();
        Self::from_matrix(back, twist_matrix(ctx, &inv, back as i64))
    }
}

/// JSON form of a witness; field elements as F_p coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub shape: Shape,
    pub rho: u32,
    /// a, b, c, d.
    pub matrix: [Vec<u32>; 4],
}

impl EquivalenceWitness {
    pub fn to_record(&self, ctx: &FieldContext) -> WitnessRecord {
        WitnessRecord { shape: self.shape, rho: self.rho, matrix: self.matrix.map(|e| ctx.coords(e)) }
    }

    pub fn from_record(ctx: &FieldContext, rec: &WitnessRecord) -> Result<Self> {
        let mut m = [ctx.zero(); 4];
        for (slot, coords) in m.iter_mut().zip(&rec.matrix) {
            *slot = ctx.from_coords(coords)?;
        }
        Ok(EquivalenceWitness { shape: rec.shape, rho: rec.rho, matrix: m })
    }
}

fn twist_matrix(ctx: &FieldContext, m: &Mat2, j: i64) -> Mat2 {
    m.map(|e| ctx.p_automorphism(e, j))
}

fn mat2_mul(ctx: &FieldContext, x: &Mat2, y: &Mat2) -> Mat2 {
    let dot = |a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement| {
        ctx.add(ctx.mul(a, b), ctx.mul(c, d))
    };
    [
        dot(x[0], y[0], x[1], y[2]),
        dot(x[0], y[1], x[1], y[3]),
        dot(x[2], y[0], x[3], y[2]),
        dot(x[2], y[1], x[3], y[3]),
    ]
}

fn mat2_det(ctx: &FieldContext, m: &Mat2) -> FieldElement {
    ctx.sub(ctx.mul(m[0], m[3]), ctx.mul(m[1], m[2]))
}

fn mat2_inverse(ctx: &FieldContext, m: &Mat2) -> Option<Mat2> {
    let inv = ctx.inv(mat2_det(ctx, m)).ok()?;
    Some([
        ctx.mul(inv, m[3]),
        ctx.neg(ctx.mul(inv, m[1])),
        ctx.neg(ctx.mul(inv, m[2])),
        ctx.mul(inv, m[0]),
    ])
}

/// Exact check of F1^ρ(a x + b F2) = c x + d F2 with A invertible and the
/// shape consistent with the matrix.
pub fn verify_witness(ctx: &FieldContext, f1: &QPoly, f2: &QPoly, w: &EquivalenceWitness) -> bool {
    let [a, b, c, d] = w.matrix;
    if mat2_det(ctx, &w.matrix).is_zero() || w.rho >= ctx.degree() {
        return false;
    }
    let shape_ok = match w.shape {
        Shape::Diagonal => b.is_zero() && c.is_zero(),
        Shape::Antidiagonal => a.is_zero() && d.is_zero(),
        Shape::General => true,
    };
    if !shape_ok {
        return false;
    }
    let inner = QPoly::scalar(ctx, a).add(ctx, &f2.scale(ctx, b));
    let lhs = f1.twist(ctx, w.rho as i64).compose(ctx, &inner);
    let rhs = QPoly::scalar(ctx, c).add(ctx, &f2.scale(ctx, d));
    lhs == rhs
}

fn require_standard(f: &QPoly) -> Result<()> {
    if f.standard_form_gcd()? > 1 {
        Ok(())
    } else {
        Err(Error::NotStandardForm)
    }
}

/// Searches diagonal witnesses over all ρ, then antidiagonal ones, and
/// returns the least in (shape, ρ, canonical index of a or b) order.
pub fn standard_form_equiv(ctx: &FieldContext, f1: &QPoly, f2: &QPoly) -> Result<Option<EquivalenceWitness>> {
    require_standard(f1)?;
    require_standard(f2)?;
    for j in 0..ctx.degree() {
        if let Some(w) = diagonal_at(ctx, f1, f2, j) {
            return Ok(Some(w));
        }
    }
    for j in 0..ctx.degree() {
        if let Some(w) = antidiagonal_at(ctx, f1, f2, j) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// d F2(x) = G(a x) with G = F1^ρ: the supports must agree, and a is pinned
/// by a^(q^i - q^(i0)) = (G_(i0) F2_i) / (F2_(i0) G_i) on each support index.
fn diagonal_at(ctx: &FieldContext, f1: &QPoly, f2: &QPoly, j: u32) -> Option<EquivalenceWitness> {
    let g = f1.twist(ctx, j as i64);
    let support = g.support();
    if support != f2.support() || support.is_empty() {
        return None;
    }
    let i0 = support[0];
    let ratio = |i: usize| {
        let num = ctx.mul(g.coeff(i0), f2.coeff(i));
        let den = ctx.mul(f2.coeff(i0), g.coeff(i));
        ctx.div(num, den).expect("support coefficients are nonzero")
    };
    let candidates = match support.get(1) {
        None => vec![ctx.one()],
        Some(&i1) => {
            let q = ctx.q();
            let exponent = q.pow(i1 as u32) - q.pow(i0 as u32);
            ctx.power_preimage(exponent, ratio(i1))
        }
    };
    candidates.into_iter().filter(|a| !a.is_zero()).find_map(|a| {
        let d = ctx
            .div(ctx.mul(g.coeff(i0), ctx.frobenius(a, i0 as i64)), f2.coeff(i0))
            .expect("nonzero");
        let w = EquivalenceWitness::diagonal(j, a, d);
        verify_witness(ctx, f1, f2, &w).then_some(w)
    })
}

/// G(b F2(x)) = c x with G = F1^ρ: the map b ↦ (coefficients 1..n-1 of
/// G ∘ b F2) is F_p-linear, and its kernel is enumerated.
fn antidiagonal_at(ctx: &FieldContext, f1: &QPoly, f2: &QPoly, j: u32) -> Option<EquivalenceWitness> {
    let g = f1.twist(ctx, j as i64);
    let basis = power_basis(ctx);
    let dd = basis.len();
    let n = ctx.n() as usize;
    let columns: Vec<Vec<u32>> = basis
        .iter()
        .map(|&b| {
            let h = g.compose(ctx, &f2.scale(ctx, b));
            let mut col = vec![0; (n - 1) * dd];
            for i in 1..n {
                ctx.write_coords(h.coeff(i), &mut col[(i - 1) * dd..i * dd]);
            }
            col
        })
        .collect();
    let m: Matrix<u32> = (0..(n - 1) * dd).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let kernel = linalg::kernel(&PrimeField(ctx.p()), &m, dd);
    let mut best: Option<(u32, EquivalenceWitness)> = None;
    for b in span_elements(ctx, &kernel) {
        if b.is_zero() {
            continue;
        }
        let c = g.compose(ctx, &f2.scale(ctx, b)).coeff(0);
        if c.is_zero() {
            continue;
        }
        let key = ctx.index(b);
        if best.as_ref().map_or(true, |(k, _)| key < *k) {
            best = Some((key, EquivalenceWitness::antidiagonal(j, b, c)));
        }
    }
    best.map(|(_, w)| w).filter(|w| verify_witness(ctx, f1, f2, w))
}

/// All F_p-combinations of the given digit vectors, as field elements.
fn span_elements(ctx: &FieldContext, vectors: &[Vec<u32>]) -> Vec<FieldElement> {
    let p = ctx.p();
    let dd = ctx.degree() as usize;
    let mut out = vec![vec![0u32; dd]];
    for v in vectors {
        let mut next = Vec::with_capacity(out.len() * p as usize);
        for base in &out {
            for coef in 0..p {
                next.push(base.iter().zip(v).map(|(&x, &y)| (x + coef * y) % p).collect::<Vec<u32>>());
            }
        }
        out = next;
    }
    out.iter().map(|d| ctx.from_coords(d).expect("valid digits")).collect()
}

/// The same search by brute force: every ρ, every a (then every b) in
/// canonical order.
pub fn standard_form_equiv_exhaustive(
    ctx: &FieldContext,
    f1: &QPoly,
    f2: &QPoly,
) -> Result<Option<EquivalenceWitness>> {
    require_standard(f1)?;
    require_standard(f2)?;
    let i0 = f2.support()[0];
    for j in 0..ctx.degree() {
        let g = f1.twist(ctx, j as i64);
        for a in ctx.nonzero_elements() {
            let ga = g.compose(ctx, &QPoly::scalar(ctx, a));
            let d = ctx.div(ga.coeff(i0), f2.coeff(i0)).expect("nonzero");
            if !d.is_zero() && ga == f2.scale(ctx, d) {
                return Ok(Some(EquivalenceWitness::diagonal(j, a, d)));
            }
        }
    }
    for j in 0..ctx.degree() {
        let g = f1.twist(ctx, j as i64);
        for b in ctx.nonzero_elements() {
            let h = g.compose(ctx, &f2.scale(ctx, b));
            let c = h.coeff(0);
            if !c.is_zero() && h == QPoly::scalar(ctx, c) {
                return Ok(Some(EquivalenceWitness::antidiagonal(j, b, c)));
            }
        }
    }
    Ok(None)
}

/// A standard form F together with a witness linking F to the input.
#[derive(Clone, Debug)]
pub struct Standardization {
    pub form: QPoly,
    pub link: EquivalenceWitness,
    pub right_idealizer_dim: u32,
}

/// Brings f to standard form by diagonalizing a non-scalar element of its
/// stabilizer. Codes whose right idealizer is F_q have no standard form.
pub fn standardize(ctx: &FieldContext, f: &QPoly) -> Result<Standardization> {
    let code = RankCode::new(f.clone())?;
    let ideal = code.right_idealizer(ctx);
    if ideal.dimension <= 1 {
        return Err(Error::NoStandardization("the right idealizer is F_q".into()));
    }
    if f.standard_form_gcd()? > 1 {
        return Ok(Standardization {
            form: f.clone(),
            link: EquivalenceWitness::identity(ctx),
            right_idealizer_dim: ideal.dimension,
        });
    }
    let phi = &ideal.basis[1];
    let (alpha, beta) = (phi.coeff(0), beta_of(ctx, f, phi));
    let quotient = CodeQuotient::new(ctx, f);
    let (c, d, residue) = quotient.split(ctx, &f.compose(ctx, phi));
    debug_assert!(residue.is_zero());
    let m: Mat2 = [alpha, beta, c, d];
    let eigen = eigenvalues(ctx, &m)
        .ok_or_else(|| Error::NoStandardization("stabilizer element has no distinct eigenvalues".into()))?;
    let rows: Vec<[FieldElement; 2]> = eigen.iter().map(|&l| left_eigenvector(ctx, &m, l)).collect();
    let basis = FqBasis::new(ctx);
    for order in [[0usize, 1], [1, 0]] {
        let p_mat: Mat2 = [rows[order[0]][0], rows[order[0]][1], rows[order[1]][0], rows[order[1]][1]];
        let l1 = QPoly::scalar(ctx, p_mat[0]).add(ctx, &f.scale(ctx, p_mat[1]));
        let l2 = QPoly::scalar(ctx, p_mat[2]).add(ctx, &f.scale(ctx, p_mat[3]));
        if l1.rank(ctx) != ctx.n() {
            continue;
        }
        let form = solve_right_factor(ctx, &basis, &l1, &l2)?;
        let link = EquivalenceWitness::from_matrix(0, p_mat);
        if form.standard_form_gcd()? > 1 && form.coeff(0).is_zero() && verify_witness(ctx, &form, f, &link) {
            return Ok(Standardization { form, link, right_idealizer_dim: ideal.dimension });
        }
    }
    Err(Error::NoStandardization("no eigenbasis gives a graph subspace".into()))
}

/// The β with φ = α x + β f, read off the lowest nonzero index of f.
fn beta_of(ctx: &FieldContext, f: &QPoly, phi: &QPoly) -> FieldElement {
    let pivot = (1..f.n()).find(|&i| !f.coeff(i).is_zero()).expect("nonzero f");
    ctx.div(phi.coeff(pivot), f.coeff(pivot)).expect("nonzero")
}

/// Distinct eigenvalues of a 2 x 2 matrix, canonical order.
fn eigenvalues(ctx: &FieldContext, m: &Mat2) -> Option<[FieldElement; 2]> {
    let trace = ctx.add(m[0], m[3]);
    let det = mat2_det(ctx, m);
    let mut roots: Vec<FieldElement> = if ctx.p() == 2 {
        ctx.elements()
            .filter(|&l| ctx.add(ctx.sub(ctx.mul(l, l), ctx.mul(trace, l)), det).is_zero())
            .collect()
    } else {
        let disc = ctx.sub(ctx.mul(trace, trace), ctx.mul(ctx.from_int(4), det));
        let half = ctx.inv(ctx.from_int(2)).ok()?;
        ctx.sqrt_all(disc)
            .into_iter()
            .map(|r| ctx.mul(half, ctx.add(trace, r)))
            .collect()
    };
    roots.sort_by_key(|&e| ctx.index(e));
    roots.dedup();
    (roots.len() == 2).then(|| [roots[0], roots[1]])
}

fn left_eigenvector(ctx: &FieldContext, m: &Mat2, lambda: FieldElement) -> [FieldElement; 2] {
    let u = [m[2], ctx.sub(lambda, m[0])];
    if !(u[0].is_zero() && u[1].is_zero()) {
        return u;
    }
    [ctx.sub(lambda, m[3]), m[1]]
}

/// The F with F ∘ l1 = l2, for bijective l1.
fn solve_right_factor(ctx: &FieldContext, basis: &FqBasis, l1: &QPoly, l2: &QPoly) -> Result<QPoly> {
    let n = ctx.n() as usize;
    let ys: Vec<FieldElement> = basis.elements().iter().map(|&b| l1.evaluate(ctx, b)).collect();
    let rhs: Vec<FieldElement> = basis.elements().iter().map(|&b| l2.evaluate(ctx, b)).collect();
    let moore: Matrix<FieldElement> =
        ys.iter().map(|&y| (0..n).map(|i| ctx.frobenius(y, i as i64)).collect()).collect();
    let coeffs = linalg::solve(ctx, &moore, &rhs)
        .ok_or_else(|| Error::NoStandardization("singular Moore system".into()))?;
    QPoly::from_coeffs(ctx, coeffs)
}

/// Decides equivalence of ⟨x, f⟩ and ⟨x, g⟩ through standard forms and
/// returns a witness linking f to g.
pub fn code_equiv(ctx: &FieldContext, f: &QPoly, g: &QPoly) -> Result<Option<EquivalenceWitness>> {
    let dim_f = RankCode::new(f.clone())?.right_idealizer(ctx).dimension;
    let dim_g = RankCode::new(g.clone())?.right_idealizer(ctx).dimension;
    if dim_f != dim_g {
        return Ok(None);
    }
    let sf = standardize(ctx, f)?;
    let sg = standardize(ctx, g)?;
    code_equiv_standardized(ctx, &sf, &sg)
}

/// [`code_equiv`] on inputs already brought to standard form.
pub fn code_equiv_standardized(
    ctx: &FieldContext,
    sf: &Standardization,
    sg: &Standardization,
) -> Result<Option<EquivalenceWitness>> {
    if sf.right_idealizer_dim != sg.right_idealizer_dim {
        return Ok(None);
    }
    let Some(mid) = standard_form_equiv(ctx, &sf.form, &sg.form)? else {
        return Ok(None);
    };
    Ok(Some(sf.link.inverse(ctx).then(ctx, &mid).then(ctx, &sg.link)))
}

/// Independent decision by linear algebra over every ρ: the pairs (a, b)
/// with F1^ρ(a x + b F2) ∈ ⟨x, F1^ρ⟩ form an F_p-space, which is scanned
/// for an invertible completion. Works for any pair of codes.
pub fn gl_equiv_search(ctx: &FieldContext, f1: &QPoly, f2: &QPoly) -> Option<EquivalenceWitness> {
    let basis = power_basis(ctx);
    let dd = basis.len();
    for j in 0..ctx.degree() {
        let g = f1.twist(ctx, j as i64);
        let quotient = CodeQuotient::new(ctx, &g);
        let image = |a: FieldElement, b: FieldElement| {
            g.compose(ctx, &QPoly::scalar(ctx, a).add(ctx, &f2.scale(ctx, b)))
        };
        let columns: Vec<Vec<u32>> = (0..2 * dd)
            .map(|c| {
                let (a, b) = if c < dd { (basis[c], ctx.zero()) } else { (ctx.zero(), basis[c - dd]) };
                let (_, _, residue) = quotient.split(ctx, &image(a, b));
                let mut col = Vec::new();
                for &e in residue.coeffs() {
                    let start = col.len();
                    col.resize(start + dd, 0);
                    ctx.write_coords(e, &mut col[start..]);
                }
                col
            })
            .collect();
        let rows = columns[0].len();
        let m: Matrix<u32> = (0..rows).map(|i| columns.iter().map(|col| col[i]).collect()).collect();
        let kernel = linalg::kernel(&PrimeField(ctx.p()), &m, 2 * dd);
        let a_parts: Vec<Vec<u32>> = kernel.iter().map(|v| v[..dd].to_vec()).collect();
        let b_parts: Vec<Vec<u32>> = kernel.iter().map(|v| v[dd..].to_vec()).collect();
        let a_span = span_elements(ctx, &a_parts);
        let b_span = span_elements(ctx, &b_parts);
        for (&a, &b) in a_span.iter().zip(&b_span) {
            let (c, d, _) = quotient.split(ctx, &image(a, b));
            let w = EquivalenceWitness::from_matrix(j, [a, b, c, d]);
            if !mat2_det(ctx, &w.matrix).is_zero() && verify_witness(ctx, f1, f2, &w) {
                return Some(w);
            }
        }
    }
    None
}

/// The closed-form equivalence criterion for the (h, s) family at t ∈ {3, 4}.
pub fn nsz_equiv_predicate(
    ctx: &FieldContext,
    h: FieldElement,
    s: i64,
    k: FieldElement,
    l: i64,
) -> Result<bool> {
    let t = ctx.t() as i64;
    if t != 3 && t != 4 {
        return Err(Error::Constraint(format!("the criterion covers t ∈ {{3, 4}}, not t = {t}")));
    }
    let n = 2 * t;
    let congruent = |m: i64| (s - m * l).rem_euclid(n) == 0;
    let k_inv = ctx.inv(k)?;
    let same = congruent(1) || (t == 4 && congruent(3));
    let inverse = congruent(-1) || (t == 4 && congruent(5));
    let orbit_hits = |target: FieldElement| {
        let neg = ctx.neg(target);
        (0..ctx.degree() as i64).any(|j| {
            let image = ctx.p_automorphism(h, j);
            image == target || image == neg
        })
    };
    Ok((same && orbit_hits(k)) || (inverse && orbit_hits(k_inv)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScreenVerdict {
    InequivalentByIdealizer { side: crate::codes::Side, dims: (u32, u32) },
    InequivalentBySearch,
    Equivalent(EquivalenceWitness),
    Inconclusive(String),
}

/// Separates f from a known family member by idealizers first and by
/// standard-form search when both sides admit standard forms.
pub fn inequivalence_screen(ctx: &FieldContext, f: &QPoly, known: &FamilySpec) -> Result<ScreenVerdict> {
    screen_pair(ctx, f, known.build(ctx)?.f())
}

pub fn screen_pair(ctx: &FieldContext, f: &QPoly, g: &QPoly) -> Result<ScreenVerdict> {
    use crate::codes::Side;
    let cf = RankCode::new(f.clone())?;
    let cg = RankCode::new(g.clone())?;
    let right = (cf.right_idealizer(ctx).dimension, cg.right_idealizer(ctx).dimension);
    if right.0 != right.1 {
        return Ok(ScreenVerdict::InequivalentByIdealizer { side: Side::Right, dims: right });
    }
    let left = (cf.left_idealizer(ctx).dimension, cg.left_idealizer(ctx).dimension);
    if left.0 != left.1 {
        return Ok(ScreenVerdict::InequivalentByIdealizer { side: Side::Left, dims: left });
    }
    if right.0 <= 1 {
        return Ok(ScreenVerdict::Inconclusive("right idealizers are F_q on both sides".into()));
    }
    Ok(match code_equiv(ctx, f, g)? {
        Some(w) => ScreenVerdict::Equivalent(w),
        None => ScreenVerdict::InequivalentBySearch,
    })
}

pub const WITNESS_SCHEMA_VERSION: u32 = 1;

/// A self-contained claim that ⟨x, f1⟩ and ⟨x, f2⟩ are linked by a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub schema_version: u32,
    pub field: ContextDescriptor,
    pub f1: QPolyTerms,
    pub f2: QPolyTerms,
    pub witness: WitnessRecord,
}

impl WitnessFile {
    pub fn new(ctx: &FieldContext, f1: &QPoly, f2: &QPoly, w: &EquivalenceWitness) -> Self {
        WitnessFile {
            schema_version: WITNESS_SCHEMA_VERSION,
            field: ctx.descriptor(),
            f1: f1.to_terms(ctx),
            f2: f2.to_terms(ctx),
            witness: w.to_record(ctx),
        }
    }

    /// Rebuilds the field from the descriptor and re-checks the identity.
    pub fn verify(&self) -> Result<bool> {
        if self.schema_version != WITNESS_SCHEMA_VERSION {
            return Err(Error::Serde(format!("unsupported witness schema {}", self.schema_version)));
        }
        let ctx = FieldContext::from_descriptor(&self.field)?;
        let f1 = QPoly::from_text(&ctx, &self.f1)?;
        let f2 = QPoly::from_text(&ctx, &self.f2)?;
        let w = EquivalenceWitness::from_record(&ctx, &self.witness)?;
        Ok(verify_witness(&ctx, &f1, &f2, &w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{self, NszVariant};
    use crate::field::FieldParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(p: u32, r: u32, t: u32) -> FieldContext {
        FieldContext::new(FieldParams::new(p, r, t).unwrap()).unwrap()
    }

    fn fiber(c: &FieldContext) -> Vec<FieldElement> {
        c.norm_fiber(c.neg_one(), c.t()).unwrap()
    }

    fn psi(c: &FieldContext, h: FieldElement, s: i64) -> QPoly {
        families::nsz_code(c, h, s, NszVariant::Sec4).unwrap().f().clone()
    }

    fn hstd(c: &FieldContext, h: FieldElement, s: i64) -> QPoly {
        families::h_standard_form(c, h, s).unwrap().f().clone()
    }

    #[test]
    fn identity_witness() {
        let c = ctx(3, 1, 3);
        let h = fiber(&c)[0];
        let f = hstd(&c, h, 1);
        assert!(verify_witness(&c, &f, &f, &EquivalenceWitness::identity(&c)));
        let w = standard_form_equiv(&c, &f, &f).unwrap().unwrap();
        assert_eq!(w, EquivalenceWitness::diagonal(0, c.one(), c.one()));
    }

    #[test]
    fn negated_parameter_is_equivalent() {
        let c = ctx(3, 1, 3);
        for &h in fiber(&c).iter().take(6) {
            let f1 = hstd(&c, h, 1);
            let f2 = hstd(&c, c.neg(h), 1);
            let w = standard_form_equiv(&c, &f1, &f2).unwrap().expect("equivalent");
            assert!(verify_witness(&c, &f1, &f2, &w));
            let mut bad = w;
            bad.matrix[0] = c.add(bad.matrix[0], c.one());
            if bad.shape == Shape::Diagonal && !bad.matrix[0].is_zero() {
                assert!(!verify_witness(&c, &f1, &f2, &bad));
            }
        }
    }

    #[test]
    fn fast_and_exhaustive_searches_agree() {
        let c = ctx(3, 1, 3);
        let fib = fiber(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..12 {
            let h = fib[rand::Rng::gen_range(&mut rng, 0..fib.len())];
            let k = fib[rand::Rng::gen_range(&mut rng, 0..fib.len())];
            let s = if rand::Rng::gen_bool(&mut rng, 0.5) { 1 } else { 5 };
            let f1 = hstd(&c, h, 1);
            let f2 = hstd(&c, k, s);
            let fast = standard_form_equiv(&c, &f1, &f2).unwrap();
            let slow = standard_form_equiv_exhaustive(&c, &f1, &f2).unwrap();
            assert_eq!(fast.is_some(), slow.is_some());
            if let (Some(a), Some(b)) = (fast, slow) {
                assert_eq!((a.shape, a.rho), (b.shape, b.rho));
                assert!(verify_witness(&c, &f1, &f2, &b));
            }
        }
    }

    #[test]
    fn requires_standard_form() {
        let c = ctx(3, 1, 3);
        let h = fiber(&c)[0];
        let f = psi(&c, h, 1);
        assert_eq!(standard_form_equiv(&c, &f, &f), Err(Error::NotStandardForm));
    }

    #[test]
    fn composition_and_inverse() {
        let c = ctx(3, 1, 3);
        let fib = fiber(&c);
        let h = fib[4];
        let (a, b, d) = (psi(&c, h, 1), hstd(&c, h, 1), psi(&c, c.neg(h), 1));
        let w1 = code_equiv(&c, &a, &b).unwrap().expect("psi and H are equivalent");
        let w2 = code_equiv(&c, &b, &d).unwrap().expect("H_h and psi_-h are equivalent");
        assert!(verify_witness(&c, &a, &b, &w1));
        assert!(verify_witness(&c, &b, &d, &w2));
        assert!(verify_witness(&c, &a, &d, &w1.then(&c, &w2)));
        assert!(verify_witness(&c, &b, &a, &w1.inverse(&c)));
        let twisted = EquivalenceWitness::from_matrix(3, w1.matrix);
        let f = psi(&c, h, 1);
        let g = f.twist(&c, -3);
        let id = EquivalenceWitness::from_matrix(3, [c.one(), c.zero(), c.zero(), c.one()]);
        assert!(verify_witness(&c, &f, &g, &id));
        assert!(verify_witness(&c, &g, &f, &id.inverse(&c)));
        let _ = twisted;
    }

    #[test]
    fn standardization_of_psi() {
        let c = ctx(3, 1, 3);
        for &h in fiber(&c).iter().step_by(5) {
            for s in [1, 5] {
                let f = psi(&c, h, s);
                let st = standardize(&c, &f).unwrap();
                assert_eq!(st.form.standard_form_gcd().unwrap(), 2);
                assert!(verify_witness(&c, &st.form, &f, &st.link));
                assert!(RankCode::new(st.form.clone()).unwrap().is_mrd(&c));
            }
        }
    }

    #[test]
    fn gl_search_agrees_with_code_equiv() {
        let c = ctx(3, 1, 3);
        let fib = fiber(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..10 {
            let h = fib[rand::Rng::gen_range(&mut rng, 0..fib.len())];
            let k = fib[rand::Rng::gen_range(&mut rng, 0..fib.len())];
            let f = psi(&c, h, 1);
            let g = psi(&c, k, 5);
            let a = code_equiv(&c, &f, &g).unwrap();
            let b = gl_equiv_search(&c, &f, &g);
            assert_eq!(a.is_some(), b.is_some());
            if let Some(w) = a {
                assert!(verify_witness(&c, &f, &g, &w));
            }
        }
    }

    #[test]
    fn predicate_examples() {
        let c3 = ctx(3, 1, 3);
        let h = fiber(&c3)[2];
        assert!(nsz_equiv_predicate(&c3, h, 1, c3.neg(h), 1).unwrap());
        let c4 = ctx(3, 1, 4);
        let h4 = fiber(&c4)[7];
        let inv = c4.inv(h4).unwrap();
        assert!(nsz_equiv_predicate(&c4, h4, 1, inv, 5).unwrap());
        let c5 = ctx(3, 1, 5);
        assert!(nsz_equiv_predicate(&c5, c5.one(), 1, c5.one(), 1).is_err());
    }

    #[test]
    fn witness_file_round_trip() {
        let c = ctx(3, 1, 3);
        let h = fiber(&c)[6];
        let (f, g) = (psi(&c, h, 1), psi(&c, c.neg(h), 1));
        let w = code_equiv(&c, &f, &g).unwrap().unwrap();
        let file = WitnessFile::new(&c, &f, &g, &w);
        let text = serde_json::to_string(&file).unwrap();
        let back: WitnessFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        assert!(back.verify().unwrap());
        let mut tampered = back;
        tampered.witness.rho = (tampered.witness.rho + 1) % 6;
        assert!(!tampered.verify().unwrap());
    }

    #[test]
    fn scaling_invariance() {
        let c = ctx(3, 1, 3);
        let fib = fiber(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..6 {
            let h = fib[rand::Rng::gen_range(&mut rng, 0..fib.len())];
            let k = fib[rand::Rng::gen_range(&mut rng, 0..fib.len())];
            let lambda = c.random_nonzero(&mut rng);
            let f1 = hstd(&c, h, 1);
            let f2 = hstd(&c, k, 1);
            let plain = standard_form_equiv(&c, &f1, &f2).unwrap();
            let scaled = standard_form_equiv(&c, &f1, &f2.scale(&c, lambda)).unwrap();
            assert_eq!(plain.is_some(), scaled.is_some());
        }
    }
}
