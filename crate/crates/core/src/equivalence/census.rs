//! Classification of the (h, s) family at t ∈ {3, 4} into equivalence
//! classes, computed and predicted independently.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    code_equiv_standardized, gl_equiv_search, nsz_equiv_predicate, standard_form_equiv_exhaustive, standardize,
    verify_witness, EquivalenceWitness, Standardization, WitnessRecord,
};
use crate::error::{Error, Result};
use crate::families::{nsz_code, NszVariant};
use crate::field::{gcd, ContextDescriptor, FieldContext, FieldElement, FieldParams};
use crate::qpoly::QPoly;

pub const CENSUS_SCHEMA_VERSION: u32 = 1;

/// Sampled cross-class pairs re-checked by exhaustive search.
pub const MIN_CROSS_CHECKS: usize = 50;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusPair {
    /// Position of h in the canonically ordered norm fiber.
    pub h_index: usize,
    pub h: Vec<u32>,
    pub s: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessEdge {
    pub from: usize,
    pub to: usize,
    pub witness: WitnessRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusClass {
    pub representative: usize,
    pub members: Vec<usize>,
    /// One edge from the representative to each other member.
    pub witnesses: Vec<WitnessEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub schema_version: u32,
    pub field: ContextDescriptor,
    pub t: u32,
    pub variant: String,
    pub pairs: Vec<CensusPair>,
    pub classes: Vec<CensusClass>,
    pub predicted: Vec<Vec<usize>>,
    pub agreement: bool,
    pub class_count: usize,
    pub lower_bound: u64,
    /// Cross-class pairs confirmed inequivalent by exhaustive search.
    pub cross_checks: usize,
    /// Residues r with ℓ ≡ r s (mod n) among equivalent pairs.
    pub observed_congruences: Vec<i64>,
    /// Observed residues outside those the criterion allows.
    pub unexpected_congruences: Vec<i64>,
}

/// What halts a census: the two verdicts for one pair disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reproducer {
    pub schema_version: u32,
    pub field: ContextDescriptor,
    pub variant: String,
    pub first: CensusPair,
    pub second: CensusPair,
    pub predicted_equivalent: bool,
    pub computed_equivalent: bool,
}

fn totient(n: u64) -> u64 {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
}

/// ⌊φ(t)(q^t + 1) / (8 r t)⌋.
pub fn class_lower_bound(params: FieldParams) -> u64 {
    let t = params.t as u64;
    totient(t) * (params.q().pow(params.t) + 1) / (8 * params.r as u64 * t)
}

/// Pair comparisons a census performs, for budget checks.
pub fn census_cost(params: FieldParams) -> Result<u128> {
    let ctx_order = params.order();
    let q = params.q() as u128;
    let fiber = (q.pow(params.t) + 1) as u128;
    let svals = totient(2 * params.t as u64) as u128;
    let pairs = fiber * svals;
    Ok(pairs * pairs * params.degree() as u128 + pairs * ctx_order as u128)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = x;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Blocks sorted by least member, members ascending.
fn blocks(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut slot = std::collections::HashMap::new();
    for (i, &l) in labels.iter().enumerate() {
        let idx = *slot.entry(l).or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[idx].push(i);
    }
    out
}

pub fn census(params: FieldParams, variant: NszVariant, budget: u128, seed: u64) -> Result<CensusRecord> {
    params.validate()?;
    if params.t != 3 && params.t != 4 {
        return Err(Error::Constraint(format!("the census covers t ∈ {{3, 4}}, not t = {}", params.t)));
    }
    if params.p == 2 {
        return Err(Error::Constraint("the census needs odd q".into()));
    }
    let needed = census_cost(params)?;
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let ctx = FieldContext::new(params)?;
    let t = params.t;
    let n = ctx.n() as i64;
    let fiber = ctx.norm_fiber(ctx.neg_one(), t)?;
    let svals: Vec<i64> = (1..n).filter(|&s| gcd(s as u64, n as u64) == 1).collect();
    let mut pairs = Vec::new();
    let mut members: Vec<(FieldElement, i64)> = Vec::new();
    for (hi, &h) in fiber.iter().enumerate() {
        for &s in &svals {
            pairs.push(CensusPair { h_index: hi, h: ctx.coords(h), s });
            members.push((h, s));
        }
    }

    let polys: Vec<QPoly> = members
        .iter()
        .map(|&(h, s)| nsz_code(&ctx, h, s, variant).map(|c| c.f().clone()))
        .collect::<Result<_>>()?;
    let standard: Vec<Standardization> =
        polys.par_iter().map(|f| standardize(&ctx, f)).collect::<Result<_>>()?;

    // computational partition: compare each pair with the representatives so far
    let mut reps: Vec<usize> = Vec::new();
    let mut computed = vec![0usize; pairs.len()];
    let mut links: Vec<Option<EquivalenceWitness>> = vec![None; pairs.len()];
    for i in 0..pairs.len() {
        let hit = reps.par_iter().enumerate().find_map_first(|(ci, &r)| {
            match code_equiv_standardized(&ctx, &standard[r], &standard[i]) {
                Ok(Some(w)) => Some(Ok((ci, w))),
                Ok(None) => None,
                Err(e) => Some(Err(e)),
            }
        });
        match hit.transpose()? {
            Some((ci, w)) => {
                computed[i] = ci;
                links[i] = Some(w);
            }
            None => {
                computed[i] = reps.len();
                reps.push(i);
            }
        }
    }

    // predicted partition
    let verdicts: Vec<Vec<usize>> = (0..pairs.len())
        .into_par_iter()
        .map(|i| {
            let (h, s) = members[i];
            (i + 1..pairs.len())
                .filter(|&j| {
                    let (k, l) = members[j];
                    nsz_equiv_predicate(&ctx, h, s, k, l).expect("t checked above")
                })
                .collect()
        })
        .collect();
    let mut uf = UnionFind((0..pairs.len()).collect());
    for (i, js) in verdicts.iter().enumerate() {
        for &j in js {
            uf.union(i, j);
        }
    }
    let predicted_labels: Vec<usize> = (0..pairs.len()).map(|i| uf.find(i)).collect();
    let predicted = blocks(&predicted_labels);
    let computed_blocks = blocks(&computed);

    let reproducer = |i: usize, j: usize, predicted_equivalent: bool, computed_equivalent: bool| {
        let rep = Reproducer {
            schema_version: CENSUS_SCHEMA_VERSION,
            field: ctx.descriptor(),
            variant: variant.tag().to_string(),
            first: pairs[i].clone(),
            second: pairs[j].clone(),
            predicted_equivalent,
            computed_equivalent,
        };
        Error::Disagreement(serde_json::to_string(&rep).expect("serializable"))
    };

    if predicted != computed_blocks {
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                let p = predicted_labels[i] == predicted_labels[j];
                let c = computed[i] == computed[j];
                if p != c {
                    return Err(reproducer(i, j, p, c));
                }
            }
        }
    }

    let mut classes: Vec<CensusClass> = reps
        .iter()
        .map(|&r| CensusClass { representative: r, members: vec![r], witnesses: Vec::new() })
        .collect();
    for i in 0..pairs.len() {
        let Some(w) = links[i] else { continue };
        let class = &mut classes[computed[i]];
        let r = class.representative;
        if !verify_witness(&ctx, &polys[r], &polys[i], &w) {
            return Err(Error::Disagreement(format!("witness from pair {r} to pair {i} does not verify")));
        }
        class.members.push(i);
        class.witnesses.push(WitnessEdge { from: r, to: i, witness: w.to_record(&ctx) });
    }

    // sampled cross-class pairs must resist both exhaustive searches
    let mut cross_checks = 0;
    if reps.len() > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut candidates: Vec<(usize, usize)> = Vec::new();
        while candidates.len() < MIN_CROSS_CHECKS {
            let a = rand::Rng::gen_range(&mut rng, 0..pairs.len());
            let b = rand::Rng::gen_range(&mut rng, 0..pairs.len());
            if computed[a] != computed[b] {
                candidates.push((a, b));
            }
        }
        candidates.shuffle(&mut rng);
        let found: Vec<Option<(usize, usize)>> = candidates
            .par_iter()
            .map(|&(a, b)| {
                let by_scan = standard_form_equiv_exhaustive(&ctx, &standard[a].form, &standard[b].form)?;
                let by_gl = gl_equiv_search(&ctx, &polys[a], &polys[b]);
                Ok((by_scan.is_some() || by_gl.is_some()).then_some((a, b)))
            })
            .collect::<Result<_>>()?;
        if let Some(&(a, b)) = found.iter().flatten().next() {
            return Err(reproducer(a, b, predicted_labels[a] == predicted_labels[b], true));
        }
        cross_checks = candidates.len();
    }

    let allowed: &[i64] = if t == 3 { &[1, n - 1] } else { &[1, 3, 5, 7] };
    let mut observed = std::collections::BTreeSet::new();
    for class in &classes {
        for &i in &class.members {
            for &j in &class.members {
                let (s, l) = (members[i].1, members[j].1);
                let r = (0..n).find(|&r| (l - r * s).rem_euclid(n) == 0).expect("s is a unit");
                observed.insert(r);
            }
        }
    }
    let unexpected = observed.iter().copied().filter(|r| !allowed.contains(r)).collect();

    Ok(CensusRecord {
        schema_version: CENSUS_SCHEMA_VERSION,
        field: ctx.descriptor(),
        t,
        variant: variant.tag().to_string(),
        class_count: classes.len(),
        pairs,
        classes,
        predicted,
        agreement: true,
        lower_bound: class_lower_bound(params),
        cross_checks,
        observed_congruences: observed.into_iter().collect(),
        unexpected_congruences: unexpected,
    })
}
