//! Linear sets of PG(1, q^n), and the subgeometry picture in PG(7, q^8):
//! the canonical subgeometry Σ, the collineation σ̂, the vertex Γ_s and the
//! projection of Σ from it.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{gcd, FieldContext, FieldElement};
use crate::linalg::{self, Matrix};
use crate::qpoly::QPoly;

/// A point of a projective space over F_(q^n), scaled so that its first
/// nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjPoint(Vec<FieldElement>);

impl ProjPoint {
    pub fn new(ctx: &FieldContext, coords: Vec<FieldElement>) -> Result<Self> {
        let lead = coords
            .iter()
            .copied()
            .find(|c| !c.is_zero())
            .ok_or_else(|| Error::Geometry("the zero vector is not a point".into()))?;
        let inv = ctx.inv(lead)?;
        Ok(ProjPoint(coords.into_iter().map(|c| ctx.mul(c, inv)).collect()))
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.0
    }

    /// Canonical indices of the coordinates.
    pub fn indices(&self, ctx: &FieldContext) -> Vec<u32> {
        self.0.iter().map(|&c| ctx.index(c)).collect()
    }

    pub fn from_indices(ctx: &FieldContext, idx: &[u32]) -> Result<Self> {
        let coords = idx.iter().map(|&i| ctx.from_index(i as u64)).collect::<Result<Vec<_>>>()?;
        ProjPoint::new(ctx, coords)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub point: Vec<u32>,
    pub weight: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSetRecord {
    /// Sorted by point.
    pub points: Vec<WeightedPoint>,
    pub point_count: usize,
    pub scattered: bool,
}

impl LinearSetRecord {
    /// Builds the record from fiber counts q^w - 1 per point.
    fn from_counts(ctx: &FieldContext, counts: HashMap<ProjPoint, u64>) -> Result<Self> {
        let q = ctx.q();
        let mut sorted = BTreeMap::new();
        for (p, count) in counts {
            let mut w = 0;
            let mut size = 1u64;
            while size - 1 < count {
                size *= q;
                w += 1;
            }
            if size - 1 != count {
                return Err(Error::Geometry(format!("fiber of size {count} is not q^w - 1")));
            }
            sorted.insert(p.indices(ctx), w);
        }
        let points: Vec<WeightedPoint> =
            sorted.into_iter().map(|(point, weight)| WeightedPoint { point, weight }).collect();
        let scattered = points.iter().all(|p| p.weight == 1);
        Ok(LinearSetRecord { point_count: points.len(), points, scattered })
    }

    /// Σ (q^w - 1) over the points.
    pub fn weight_sum(&self, q: u64) -> u64 {
        self.points.iter().map(|p| q.pow(p.weight) - 1).sum()
    }

    pub fn point_set(&self) -> HashSet<Vec<u32>> {
        self.points.iter().map(|p| p.point.clone()).collect()
    }
}

fn count_points<I>(ctx: &FieldContext, xs: I, map: impl Fn(FieldElement) -> Result<Vec<FieldElement>> + Sync) -> Result<HashMap<ProjPoint, u64>>
where
    I: ParallelIterator<Item = FieldElement>,
{
    xs.map(|x| ProjPoint::new(ctx, map(x)?))
        .try_fold(HashMap::new, |mut acc, p| {
            *acc.entry(p?).or_insert(0u64) += 1;
            Ok::<_, Error>(acc)
        })
        .try_reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok(a)
        })
}

fn nonzero_par(ctx: &FieldContext) -> impl ParallelIterator<Item = FieldElement> + '_ {
    (0..ctx.order() - 1).into_par_iter().map(move |k| ctx.from_log(k))
}

/// L_f = {⟨(x, f(x))⟩ : x ≠ 0} with weights.
pub fn linear_set(ctx: &FieldContext, f: &QPoly) -> Result<LinearSetRecord> {
    let counts = count_points(ctx, nonzero_par(ctx), |x| Ok(vec![x, f.evaluate(ctx, x)]))?;
    LinearSetRecord::from_counts(ctx, counts)
}

fn require_n8(ctx: &FieldContext) -> Result<()> {
    if ctx.n() == 8 {
        Ok(())
    } else {
        Err(Error::Geometry(format!("needs n = 8, not n = {}", ctx.n())))
    }
}

fn sigma_vector(ctx: &FieldContext, x: FieldElement) -> Vec<FieldElement> {
    (0..ctx.n() as i64).map(|i| ctx.frobenius(x, i)).collect()
}

/// The distinct points ⟨(x, x^q, ..., x^(q^7))⟩ of Σ.
pub fn sigma_subgeometry(ctx: &FieldContext) -> Result<Vec<ProjPoint>> {
    require_n8(ctx)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for x in ctx.nonzero_elements() {
        let p = ProjPoint::new(ctx, sigma_vector(ctx, x))?;
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    Ok(out)
}

/// σ̂^u: coordinate i of the image is v_(i-u)^(q^u).
pub fn sigma_hat(ctx: &FieldContext, v: &[FieldElement], u: i64) -> Vec<FieldElement> {
    let len = v.len() as i64;
    (0..len).map(|i| ctx.frobenius(v[(i - u).rem_euclid(len) as usize], u)).collect()
}

/// A subspace of PG(len - 1, q^n) given by linear forms, kept in reduced
/// row echelon form so equal subspaces compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjSubspace {
    ambient: usize,
    forms: Matrix<FieldElement>,
}

impl ProjSubspace {
    pub fn from_forms(ctx: &FieldContext, ambient: usize, forms: Matrix<FieldElement>) -> Result<Self> {
        if forms.iter().any(|f| f.len() != ambient) {
            return Err(Error::Geometry("form length differs from the ambient dimension".into()));
        }
        let mut work = forms;
        let rank = linalg::row_reduce(ctx, &mut work).len();
        work.truncate(rank);
        Ok(ProjSubspace { ambient, forms: work })
    }

    pub fn forms(&self) -> &Matrix<FieldElement> {
        &self.forms
    }

    /// Projective dimension; -1 for the empty subspace.
    pub fn dimension(&self) -> i64 {
        self.ambient as i64 - 1 - self.forms.len() as i64
    }

    pub fn contains(&self, ctx: &FieldContext, v: &[FieldElement]) -> bool {
        linalg::mat_vec(ctx, &self.forms, v).iter().all(|e| e.is_zero())
    }

    pub fn intersect(&self, ctx: &FieldContext, other: &ProjSubspace) -> Result<ProjSubspace> {
        let mut forms = self.forms.clone();
        forms.extend(other.forms.iter().cloned());
        ProjSubspace::from_forms(ctx, self.ambient, forms)
    }

    /// The image under σ̂^u: a form Σ a_j x_j becomes Σ a_j^(q^u) x_(j+u).
    pub fn image_under_sigma(&self, ctx: &FieldContext, u: i64) -> Result<ProjSubspace> {
        let forms = self.forms.iter().map(|f| sigma_hat(ctx, f, u)).collect();
        ProjSubspace::from_forms(ctx, self.ambient, forms)
    }
}

fn check_gamma_params(ctx: &FieldContext, h: FieldElement, s: i64) -> Result<()> {
    require_n8(ctx)?;
    if gcd(s.rem_euclid(8) as u64, 8) != 1 {
        return Err(Error::Constraint(format!("s = {s} is not coprime to 8")));
    }
    if ctx.norm(h, 4)? != ctx.neg_one() {
        return Err(Error::Constraint("h must have norm -1 over F_(q^4)".into()));
    }
    Ok(())
}

/// Γ_s: x_0 = 0 and x_s + x_3s - h^(1 - q^5s) x_5s + h^(1 - q^7s) x_7s = 0.
pub fn gamma_s(ctx: &FieldContext, h: FieldElement, s: i64) -> Result<ProjSubspace> {
    check_gamma_params(ctx, h, s)?;
    let idx = |m: i64| (m * s).rem_euclid(8) as usize;
    let mut first = vec![ctx.zero(); 8];
    first[0] = ctx.one();
    let mut second = vec![ctx.zero(); 8];
    second[idx(1)] = ctx.one();
    second[idx(3)] = ctx.one();
    second[idx(5)] = ctx.neg(ctx.qpow(h, &[(1, 0), (-1, 5 * s)])?);
    second[idx(7)] = ctx.qpow(h, &[(1, 0), (-1, 7 * s)])?;
    ProjSubspace::from_forms(ctx, 8, vec![first, second])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionRecord {
    /// u ↦ dim(Γ ∩ Γ^(σ̂^u)).
    pub pairwise: BTreeMap<u32, i64>,
    /// u ↦ dim(Γ ∩ Γ^(σ̂^u) ∩ Γ^(σ̂^(2u))).
    pub triple: BTreeMap<u32, i64>,
    /// u ↦ least γ > 0 with dim(Γ ∩ ... ∩ Γ^(σ̂^(γu))) > 5 - 2γ.
    pub gamma: BTreeMap<u32, u32>,
    pub gamma_exponent: u32,
}

/// Dimensions of the iterated intersections for u ∈ {s, 3s, 5s, 7s}.
pub fn intersect_dims(ctx: &FieldContext, h: FieldElement, s: i64) -> Result<IntersectionRecord> {
    let gamma = gamma_s(ctx, h, s)?;
    let mut rec = IntersectionRecord {
        pairwise: BTreeMap::new(),
        triple: BTreeMap::new(),
        gamma: BTreeMap::new(),
        gamma_exponent: u32::MAX,
    };
    for m in [1, 3, 5, 7] {
        let u = (m * s).rem_euclid(8);
        let mut acc = gamma.clone();
        let mut dims = Vec::new();
        let mut least = None;
        for g in 1..=8i64 {
            acc = acc.intersect(ctx, &gamma.image_under_sigma(ctx, g * u)?)?;
            dims.push(acc.dimension());
            if least.is_none() && acc.dimension() > 5 - 2 * g {
                least = Some(g as u32);
            }
        }
        let key = u as u32;
        rec.pairwise.insert(key, dims[0]);
        rec.triple.insert(key, dims[1]);
        let least = least.expect("the bound is eventually negative");
        rec.gamma.insert(key, least);
        rec.gamma_exponent = rec.gamma_exponent.min(least);
    }
    Ok(rec)
}

/// Projects Σ from Γ_s onto the line x_2s = ... = x_7s = 0, read in the
/// coordinates (x_0, x_s).
pub fn project_from_gamma(ctx: &FieldContext, h: FieldElement, s: i64) -> Result<LinearSetRecord> {
    let gamma = gamma_s(ctx, h, s)?;
    let forms = gamma.forms();
    let s_idx = s.rem_euclid(8) as usize;
    // forms restricted to the line, inverted once
    let restricted: Matrix<FieldElement> = forms.iter().map(|f| vec![f[0], f[s_idx]]).collect();
    let inv = linalg::inverse(ctx, &restricted)
        .ok_or_else(|| Error::Geometry("Γ_s meets the target line".into()))?;
    let counts = count_points(ctx, nonzero_par(ctx), |x| {
        let image = linalg::mat_vec(ctx, forms, &sigma_vector(ctx, x));
        if image.iter().all(|e| e.is_zero()) {
            return Err(Error::Geometry("Γ_s meets Σ".into()));
        }
        Ok(linalg::mat_vec(ctx, &inv, &image))
    })?;
    LinearSetRecord::from_counts(ctx, counts)
}

/// An element of PΓL(2, q^n): ⟨v⟩ ↦ ⟨A v^ρ⟩ with ρ: e ↦ e^(p^rho).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollineationRecord {
    pub rho: u32,
    /// a, b, c, d as canonical indices.
    pub matrix: [u32; 4],
}

/// |PGL(2, q^n)| times the automorphism count.
pub fn pgammal_cost(ctx: &FieldContext) -> u128 {
    let order = ctx.order() as u128;
    order * (order * order - 1) * ctx.degree() as u128
}

/// Exhaustive search for a collineation of PG(1, q^n) mapping the point set
/// of `l1` onto that of `l2`.
pub fn pgammal_equiv_bruteforce(
    ctx: &FieldContext,
    l1: &LinearSetRecord,
    l2: &LinearSetRecord,
    budget: u128,
) -> Result<Option<CollineationRecord>> {
    let needed = pgammal_cost(ctx);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    if l1.point_count != l2.point_count {
        return Ok(None);
    }
    let decode = |l: &LinearSetRecord| -> Result<Vec<ProjPoint>> {
        l.points.iter().map(|p| ProjPoint::from_indices(ctx, &p.point)).collect()
    };
    let source = decode(l1)?;
    let target: HashSet<ProjPoint> = decode(l2)?.into_iter().collect();
    let nonzero: Vec<FieldElement> = {
        let mut v: Vec<FieldElement> = ctx.nonzero_elements().collect();
        v.sort_by_key(|&e| ctx.index(e));
        v
    };
    let all: Vec<FieldElement> = std::iter::once(ctx.zero()).chain(nonzero.iter().copied()).collect();
    for rho in 0..ctx.degree() {
        let twisted: Vec<[FieldElement; 2]> = source
            .iter()
            .map(|p| [ctx.p_automorphism(p.coords()[0], rho as i64), ctx.p_automorphism(p.coords()[1], rho as i64)])
            .collect();
        let maps_onto = |m: &[FieldElement; 4]| {
            twisted.iter().all(|v| {
                let x = ctx.add(ctx.mul(m[0], v[0]), ctx.mul(m[1], v[1]));
                let y = ctx.add(ctx.mul(m[2], v[0]), ctx.mul(m[3], v[1]));
                ProjPoint::new(ctx, vec![x, y]).map_or(false, |p| target.contains(&p))
            })
        };
        // representatives: (a b; 0 1) with a ≠ 0, then (a b; 1 d) with ad ≠ b
        let upper = nonzero.par_iter().find_map_first(|&a| {
            all.iter().find_map(|&b| {
                let m = [a, b, ctx.zero(), ctx.one()];
                maps_onto(&m).then_some(m)
            })
        });
        let found = upper.or_else(|| {
            all.par_iter().find_map_first(|&a| {
                all.iter().find_map(|&b| {
                    all.iter().find_map(|&d| {
                        if ctx.mul(a, d) == b {
                            return None;
                        }
                        let m = [a, b, ctx.one(), d];
                        maps_onto(&m).then_some(m)
                    })
                })
            })
        });
        if let Some(m) = found {
            return Ok(Some(CollineationRecord { rho, matrix: m.map(|e| ctx.index(e)) }));
        }
    }
    Ok(None)
}
