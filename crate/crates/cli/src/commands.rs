use std::collections::BTreeMap;
use std::fs;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use mrdlab_core::equivalence::census::{census, Reproducer};
use mrdlab_core::equivalence::det::{det_check, DetCase};
use mrdlab_core::equivalence::{screen_pair, ScreenVerdict, WitnessFile};
use mrdlab_core::families::{Family, FamilySpec};
use mrdlab_core::geometry::{intersect_dims, linear_set, project_from_gamma};
use mrdlab_core::{Error, FieldContext, FieldElement, FieldParams};

use crate::args::*;

/// What a command hands back to the envelope writer.
pub struct Outcome {
    pub field: Option<mrdlab_core::field::ContextDescriptor>,
    pub payload: Value,
    pub verified: bool,
}

pub type CmdResult = Result<Outcome, Error>;

pub struct Env<'a> {
    pub cache_dir: Option<&'a std::path::Path>,
}

impl Env<'_> {
    fn context(&self, f: FieldArgs) -> Result<FieldContext, Error> {
        crate::cache::load_context(FieldParams::new(f.p, f.r, f.t)?, self.cache_dir)
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn field(env: &Env, args: &FieldArgs) -> CmdResult {
    let ctx = env.context(*args)?;
    let mut fibers = BTreeMap::new();
    for d in (1..ctx.n()).filter(|d| ctx.n() % d == 0) {
        fibers.insert(d.to_string(), ctx.norm_fiber(ctx.neg_one(), d)?.len());
    }
    Ok(Outcome {
        field: Some(ctx.descriptor()),
        payload: json!({
            "q": ctx.q(),
            "n": ctx.n(),
            "degree": ctx.degree(),
            "order": ctx.order(),
            "automorphisms": ctx.degree(),
            "norm_fiber_sizes": fibers,
        }),
        verified: true,
    })
}

fn parse_family(name: &str) -> Result<Family, Error> {
    serde_json::from_value(Value::String(name.to_string()))
        .map_err(|_| Error::Constraint(format!("unknown family {name}")))
}

/// Resolves the parameter flags into a family spec.
pub fn resolve_spec(ctx: &FieldContext, code: &CodeArgs) -> Result<FamilySpec, Error> {
    let family = parse_family(&code.family)?;
    let mut spec = FamilySpec::new(family, ctx.t());
    spec.s = code.s;
    spec.assert_mrd = code.assert_mrd;
    if family == Family::NSZ {
        spec.variant = Some(code.variant.unwrap_or(VariantArg::Sec4).into());
    }
    let given = [code.h_index.is_some(), code.h_coords.is_some(), code.param_index.is_some()];
    if given.iter().filter(|&&g| g).count() > 1 {
        return Err(Error::Constraint("give at most one of h-index, h-coords, param-index".into()));
    }
    let param: Option<FieldElement> = if let Some(i) = code.h_index {
        let fiber = ctx.norm_fiber(ctx.neg_one(), ctx.t())?;
        Some(*fiber.get(i).ok_or_else(|| {
            Error::Constraint(format!("h-index {i} is outside the fiber of size {}", fiber.len()))
        })?)
    } else if let Some(text) = &code.h_coords {
        let digits = text
            .split(':')
            .map(|d| d.trim().parse::<u32>().map_err(|_| Error::BadCoordinates(text.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Some(ctx.from_coords(&digits)?)
    } else if let Some(i) = code.param_index {
        Some(ctx.from_index(i)?)
    } else {
        None
    };
    if let Some(e) = param {
        spec = spec.with_param(ctx, e);
    }
    Ok(spec)
}

/// key=value pairs separated by commas.
pub fn parse_code_text(text: &str) -> Result<CodeArgs, Error> {
    let mut code = CodeArgs::default();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part.split_once('=').unwrap_or((part, "true"));
        let bad = || Error::Constraint(format!("cannot read '{part}'"));
        match key {
            "family" => code.family = value.to_string(),
            "s" => code.s = Some(value.parse().map_err(|_| bad())?),
            "h-index" => code.h_index = Some(value.parse().map_err(|_| bad())?),
            "h-coords" => code.h_coords = Some(value.to_string()),
            "param-index" => code.param_index = Some(value.parse().map_err(|_| bad())?),
            "variant" => {
                code.variant = Some(match value.to_ascii_uppercase().as_str() {
                    "EQ5" => VariantArg::Eq5,
                    "SEC4" => VariantArg::Sec4,
                    _ => return Err(bad()),
                })
            }
            "assert-mrd" => code.assert_mrd = value.parse().map_err(|_| bad())?,
            _ => return Err(Error::Constraint(format!("unknown key '{key}'"))),
        }
    }
    if code.family.is_empty() {
        return Err(Error::Constraint(format!("'{text}' names no family")));
    }
    Ok(code)
}

pub fn check(env: &Env, args: &CheckArgs) -> CmdResult {
    let ctx = env.context(args.field)?;
    let spec = resolve_spec(&ctx, &args.code)?;
    let code = spec.build(&ctx)?;
    let f = code.f();
    let right = code.right_idealizer(&ctx);
    let left = code.left_idealizer(&ctx);
    Ok(Outcome {
        field: Some(ctx.descriptor()),
        payload: json!({
            "spec": spec,
            "polynomial": f.to_terms(&ctx),
            "min_distance": code.min_distance(&ctx),
            "mrd": code.is_mrd(&ctx),
            "scattered": code.is_scattered(&ctx),
            "standard_form_gcd": f.standard_form_gcd()?,
            "right_idealizer": { "dimension": right.dimension, "scalar_field": right.is_scalar_field },
            "left_idealizer": { "dimension": left.dimension, "scalar_field": left.is_scalar_field },
        }),
        verified: true,
    })
}

pub fn equiv(env: &Env, args: &EquivArgs) -> CmdResult {
    let ctx = env.context(args.field)?;
    let spec_a = resolve_spec(&ctx, &parse_code_text(&args.a)?)?;
    let spec_b = resolve_spec(&ctx, &parse_code_text(&args.b)?)?;
    let f = spec_a.build(&ctx)?.f().clone();
    let g = spec_b.build(&ctx)?.f().clone();
    let verdict = screen_pair(&ctx, &f, &g)?;
    let (tag, detail, witness) = match &verdict {
        ScreenVerdict::Equivalent(w) => ("equivalent", Value::Null, Some(WitnessFile::new(&ctx, &f, &g, w))),
        ScreenVerdict::InequivalentByIdealizer { side, dims } => {
            ("inequivalent_by_idealizer", json!({ "side": side, "dimensions": [dims.0, dims.1] }), None)
        }
        ScreenVerdict::InequivalentBySearch => ("inequivalent_by_search", Value::Null, None),
        ScreenVerdict::Inconclusive(why) => ("inconclusive", json!(why), None),
    };
    let mut verified = true;
    if let Some(file) = &witness {
        verified = file.verify()?;
        if let Some(path) = &args.witness_out {
            write_json(path, file)?;
        }
    }
    Ok(Outcome {
        field: Some(ctx.descriptor()),
        payload: json!({ "a": spec_a, "b": spec_b, "verdict": tag, "detail": detail, "witness": witness }),
        verified,
    })
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n").map_err(|e| Error::Serde(format!("{}: {e}", path.display())))
}

pub fn census_cmd(env: &Env, args: &CensusArgs) -> CmdResult {
    let params = FieldParams::new(args.field.p, args.field.r, args.field.t)?;
    let descriptor = env.context(args.field)?.descriptor();
    match census(params, args.variant.into(), args.budget, args.seed) {
        Ok(rec) => Ok(Outcome { field: Some(descriptor), payload: to_value(&rec), verified: rec.agreement }),
        Err(Error::Disagreement(text)) => {
            let payload = match serde_json::from_str::<Reproducer>(&text) {
                Ok(rep) => {
                    write_json(&args.reproducer, &rep)?;
                    json!({ "reproducer": args.reproducer, "disagreement": rep })
                }
                Err(_) => json!({ "disagreement": text }),
            };
            Ok(Outcome { field: Some(descriptor), payload, verified: false })
        }
        Err(e) => Err(e),
    }
}

#[derive(Serialize)]
struct SweepRow {
    h_index: usize,
    s: i64,
    u: u32,
    pairwise_dim: i64,
    triple_dim: i64,
    gamma: u32,
}

pub fn geometry(env: &Env, args: &GeometryArgs) -> CmdResult {
    let ctx = env.context(args.field)?;
    let fiber = ctx.norm_fiber(ctx.neg_one(), 4)?;
    if let Some(i) = args.h_index {
        let h = *fiber.get(i).ok_or_else(|| Error::Constraint(format!("h-index {i} out of range")))?;
        let s = args.s.unwrap_or(1);
        let rec = intersect_dims(&ctx, h, s)?;
        let projected = project_from_gamma(&ctx, h, s)?;
        let psi = mrdlab_core::families::nsz_code(&ctx, h, s, mrdlab_core::families::NszVariant::Sec4)?;
        let matches = projected == linear_set(&ctx, psi.f())?;
        return Ok(Outcome {
            field: Some(ctx.descriptor()),
            payload: json!({
                "h_index": i,
                "s": s,
                "intersections": rec,
                "projected_points": projected.point_count,
                "projected_scattered": projected.scattered,
                "projection_matches_linear_set": matches,
            }),
            verified: matches,
        });
    }
    let svals: Vec<i64> = match args.s {
        Some(s) => vec![s],
        None => vec![1, 3, 5, 7],
    };
    let mut rows = Vec::new();
    for (i, &h) in fiber.iter().enumerate() {
        for &s in &svals {
            let rec = intersect_dims(&ctx, h, s)?;
            for (&u, &pairwise) in &rec.pairwise {
                rows.push(SweepRow { h_index: i, s, u, pairwise_dim: pairwise, triple_dim: rec.triple[&u], gamma: rec.gamma[&u] });
            }
        }
    }
    if let Some(path) = &args.csv {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Serde(e.to_string()))?;
        for row in &rows {
            w.serialize(row).map_err(|e| Error::Serde(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Serde(e.to_string()))?;
    }
    let pairwise: std::collections::BTreeSet<i64> = rows.iter().map(|r| r.pairwise_dim).collect();
    let triple: std::collections::BTreeSet<i64> = rows.iter().map(|r| r.triple_dim).collect();
    let min_gamma = rows.iter().map(|r| r.gamma).min();
    Ok(Outcome {
        field: Some(ctx.descriptor()),
        payload: json!({
            "instances": rows.len(),
            "pairwise_dims": pairwise,
            "triple_dims": triple,
            "min_gamma": min_gamma,
        }),
        verified: true,
    })
}

#[derive(Serialize, Default)]
struct DetTally {
    samples: usize,
    equal: usize,
    negated: usize,
    zero_determinant: usize,
}

pub fn det(env: &Env, args: &DetArgs) -> CmdResult {
    let ctx = env.context(args.field)?;
    let t = ctx.t();
    let cases: &[DetCase] = match t {
        3 => &DetCase::T3,
        4 => &DetCase::T4,
        _ => return Err(Error::Constraint("determinant identities exist for t ∈ {3, 4}".into())),
    };
    let fiber = ctx.norm_fiber(ctx.neg_one(), t)?;
    let svals: Vec<i64> = (1..2 * t as i64).filter(|&s| gcd(s, 2 * t as i64) == 1).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut tallies = BTreeMap::new();
    let mut all_equal = true;
    for &case in cases {
        let mut tally = DetTally::default();
        for _ in 0..args.samples {
            let h = *fiber.choose(&mut rng).expect("nonempty fiber");
            let k = *fiber.choose(&mut rng).expect("nonempty fiber");
            let s = *svals.choose(&mut rng).expect("units exist");
            let chk = det_check(&ctx, case, h, k, s)?;
            tally.samples += 1;
            tally.equal += chk.holds() as usize;
            tally.negated += chk.negated as usize;
            tally.zero_determinant += chk.determinant.is_zero() as usize;
        }
        all_equal &= tally.equal == tally.samples && tally.zero_determinant == 0;
        tallies.insert(to_value(&case).as_str().expect("string tag").to_string(), tally);
    }
    Ok(Outcome {
        field: Some(ctx.descriptor()),
        payload: json!({ "cases": tallies, "all_equal": all_equal }),
        verified: all_equal,
    })
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn verify(_env: &Env, args: &VerifyArgs) -> CmdResult {
    let text = fs::read_to_string(&args.file).map_err(|e| Error::Serde(format!("{}: {e}", args.file.display())))?;
    let file: WitnessFile = serde_json::from_str(&text).map_err(|e| Error::Serde(e.to_string()))?;
    let valid = file.verify()?;
    Ok(Outcome { field: Some(file.field.clone()), payload: json!({ "valid": valid }), verified: valid })
}
