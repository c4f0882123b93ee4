use std::fmt;
use std::fs;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use enda_core::bijection::{
    all_elements, classify, twist_power_identity, verify_derivative_isomorphism, BijectionError, BijectionRecipe,
};
use enda_core::endo::{find_standard_base, image_family, Endo, EndoFamily};
use enda_core::gsolve::{g_algebra, reflection_check, solve_g_system, verify_candidate};
use enda_core::matrix::{
    conjugate_matrix_units, dedekind_c, dedekind_m, dedekind_report, matrix_from_json, parse_matrix, r1mf_factorize,
    Matrix, MatrixError, R1mfOutcome,
};
use enda_core::ncpoly::{parse_poly, print_poly, Algebra, NcPoly};
use enda_core::selftest;
use enda_core::{parse_ring, Ring, RingAutomorphism};

use crate::{
    AlgebraInput, Cli, Command, DedekindCommand, EndoCommand, MatrixInput, PolyCommand, Rank1Command, RecipeCommand,
    TauCommand, TwistInput,
};

#[derive(Debug)]
pub enum CliError {
    /// Malformed input: exit status 2.
    Usage(String),
    /// The computation itself failed: exit status 1.
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) | CliError::Failed(s) => f.write_str(s),
        }
    }
}

fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn failed(e: impl fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

pub struct Report {
    pub ok: bool,
    pub text: String,
    pub json: Value,
}

type Res = Result<Report, CliError>;

/// Color `PASS`/`FAIL` markers for terminals.
pub fn paint(text: &str, color: bool) -> String {
    if !color {
        return text.to_string();
    }
    text.replace("PASS", "\x1b[32mPASS\x1b[0m").replace("FAIL", "\x1b[31mFAIL\x1b[0m")
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn run(cli: &Cli) -> Res {
    match &cli.command {
        Command::Rank1(Rank1Command::Factor(m)) => rank1_factor(m),
        Command::Rank1(Rank1Command::Rank(m)) => rank1_rank(m),
        Command::ConjugateUnits { ring, matrix } => conjugate_units(ring, matrix),
        Command::Dedekind(DedekindCommand::Report) => dedekind(),
        Command::Gsolve { ring, m } => gsolve(ring, *m),
        Command::Gverify { ring, m, poly } => gverify(ring, *m, poly),
        Command::Tau(TauCommand::Build(t)) => tau_build(t),
        Command::Tau(TauCommand::Verify { input, samples }) => tau_verify(input, *samples, cli.seed),
        Command::Endo(EndoCommand::StandardBase { recipe, family, algebra }) => {
            standard_base(recipe.as_deref(), family.as_deref(), algebra)
        }
        Command::Recipe(RecipeCommand::Classify { recipe, algebra, samples }) => {
            recipe_classify(recipe, algebra, *samples, cli.seed)
        }
        Command::Poly(PolyCommand::Eval { poly, algebra, recipe, inverse }) => {
            poly_eval(poly, algebra, recipe.as_deref(), *inverse)
        }
        Command::Selftest { only, timings } => run_selftest(only, *timings, cli.seed),
    }
}

fn ring(text: &str) -> Result<Ring, CliError> {
    parse_ring(text).map_err(usage)
}

fn input_matrix(m: &MatrixInput) -> Result<Matrix, CliError> {
    if m.paper_m {
        return Ok(dedekind_m());
    }
    if m.paper_c {
        return Ok(dedekind_c());
    }
    let text = m.matrix.as_deref().ok_or_else(|| usage("give --matrix, --paper-m or --paper-c"))?;
    parse_matrix(&ring(&m.ring)?, text).map_err(usage)
}

fn algebra(a: &AlgebraInput) -> Result<Arc<Algebra>, CliError> {
    let r = ring(a.ring.as_deref().ok_or_else(|| usage("--ring is required"))?)?;
    if a.n == 0 {
        return Err(usage("--n must be positive"));
    }
    Ok(match a.m {
        Some(m) if m < 2 => return Err(usage("--m must be at least 2")),
        Some(m) => Algebra::nilpotent(r, a.n, m),
        None => Algebra::free(r, a.n),
    })
}

fn read_json(path: &str) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{path}: {e}")))
}

/// Input errors in a recipe are usage errors; failed validations are not.
fn recipe_error(e: BijectionError) -> CliError {
    match e {
        BijectionError::Syntax(_) | BijectionError::Ring(_) | BijectionError::Poly(_) | BijectionError::Endo(_) => usage(e),
        other => failed(other),
    }
}

fn load_recipe(path: &str, a: &AlgebraInput) -> Result<BijectionRecipe, CliError> {
    let v = read_json(path)?;
    let alg = if v.get("algebra").is_some() { None } else { Some(algebra(a)?) };
    BijectionRecipe::from_json(&v, alg.as_ref()).map_err(recipe_error)
}

fn rank1_factor(m: &MatrixInput) -> Res {
    let a = input_matrix(m)?;
    match r1mf_factorize(&a) {
        Ok(R1mfOutcome::Factored(f)) => {
            let ok = f.product() == a;
            let text = format!("column: {}\nrow: {}", f.column.to_literal(), f.row.to_literal());
            Ok(Report { ok, text, json: f.to_json() })
        }
        Ok(outcome @ R1mfOutcome::NotFactorable(_)) => {
            let R1mfOutcome::NotFactorable(c) = &outcome else { unreachable!() };
            let mut text = format!(
                "no column x row factorization: every divisor of row {} with norm dividing {} fails\n",
                c.pivot_row + 1,
                c.norm_gcd
            );
            for r in &c.rejected {
                text.push_str(&format!("  {}: {}\n", r.candidate, r.reason));
            }
            Ok(Report { ok: false, text, json: outcome.to_json() })
        }
        Err(e @ MatrixError::RankNotOne(_)) => Err(failed(e)),
        Err(e) => Err(usage(e)),
    }
}

fn rank1_rank(m: &MatrixInput) -> Res {
    let a = input_matrix(m)?;
    let rank = a.rank();
    Ok(Report { ok: true, text: rank.to_string(), json: json!({ "rank": rank }) })
}

fn conjugate_units(ring_text: &str, text: &str) -> Res {
    let r = ring(ring_text)?;
    let v: Value = serde_json::from_str(text).map_err(usage)?;
    let rows = v.as_array().ok_or_else(|| usage("expected an n x n array of matrices"))?;
    let family: Vec<Vec<Matrix>> = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| usage("expected an n x n array of matrices"))?
                .iter()
                .map(|m| matrix_from_json(&r, m).map_err(usage))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    match conjugate_matrix_units(&family) {
        Ok(u) => {
            let n = family.len();
            let ok = (0..n).all(|i| {
                (0..n).all(|j| {
                    u.rho.mul(&family[i][j]).and_then(|p| p.mul(&u.rho_inverse)).ok() == Some(Matrix::unit(&r, n, i, j))
                })
            });
            let text = format!("rho = {}\nrho^-1 = {}", u.rho.to_literal(), u.rho_inverse.to_literal());
            let json = json!({ "rho": u.rho.to_json(), "rhoInverse": u.rho_inverse.to_json(), "probe": u.probe + 1, "verified": ok });
            Ok(Report { ok, text, json })
        }
        Err(MatrixError::NotMatrixUnits(why)) => Ok(Report {
            ok: false,
            text: format!("not a matrix-unit family: {why}"),
            json: json!({ "verified": false, "counterexample": why }),
        }),
        Err(e) => Err(failed(e)),
    }
}

fn dedekind() -> Res {
    let rep = dedekind_report().map_err(failed)?;
    let text = rep
        .items
        .iter()
        .map(|i| format!("{} ({}) {}", mark(i.holds), i.id, i.claim))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Report { ok: rep.all_hold(), text, json: serde_json::to_value(&rep).unwrap() })
}

fn gsolve(ring_text: &str, m: usize) -> Res {
    let r = ring(ring_text)?;
    let space = solve_g_system(&r, m).map_err(usage)?;
    let mut text = format!("{r}, m = {m}: dimension {}", space.dimension());
    for g in &space.basis {
        text.push_str(&format!("\n  {}", print_poly(g)));
    }
    Ok(Report { ok: true, text, json: space.to_json() })
}

fn gverify(ring_text: &str, m: usize, poly: &str) -> Res {
    let r = ring(ring_text)?;
    if m < 2 {
        return Err(usage("--m must be at least 2"));
    }
    let g = parse_poly(poly, &g_algebra(&r, m)).map_err(usage)?;
    let verdict = verify_candidate(&g, m).map_err(usage)?;
    let mut text = format!("{} {}", mark(verdict.ok), verdict.witness.as_deref().unwrap_or("symmetric cocycle with g(x1,-x1) = 0"));
    // the reflection identities are consequences, only meaningful for solutions
    let refl = if verdict.ok { Some(reflection_check(&g, m).map_err(failed)?) } else { None };
    if let Some(r) = &refl {
        text.push_str(&format!("\n{} reflection {}, parity {}, shear {}", mark(r.all()), r.reflection, r.parity, r.shear));
    }
    let ok = verdict.ok && refl.as_ref().is_some_and(|r| r.all());
    let json = json!({
        "ok": ok,
        "poly": print_poly(&g),
        "witness": verdict.witness,
        "reflection": refl.map(|r| json!({ "reflection": r.reflection, "parity": r.parity, "shear": r.shear })),
    });
    Ok(Report { ok, text, json })
}

fn twist_recipe(t: &TwistInput) -> Result<BijectionRecipe, CliError> {
    if let Some(path) = &t.recipe {
        return load_recipe(path, &t.algebra);
    }
    let (alg, g) = if t.paper_f2 {
        let alg = Algebra::nilpotent(Ring::PrimeField(2), 2, 3);
        let g = parse_poly("x1*x2 + x2*x1", &alg).unwrap();
        (alg, g)
    } else {
        if t.algebra.m.is_none() {
            return Err(usage("twists need --m"));
        }
        let alg = algebra(&t.algebra)?;
        let text = t.poly.as_deref().ok_or_else(|| usage("give --poly, --paper-f2 or --recipe"))?;
        let g = parse_poly(text, &alg).map_err(usage)?;
        (alg, g)
    };
    let gamma = alg.ring.parse_elem(&t.gamma).map_err(usage)?;
    let one = alg.ring.one();
    BijectionRecipe::new(&alg, one, RingAutomorphism::Identity, Endo::identity(&alg), t.mirror, Some((g, gamma)))
        .map_err(recipe_error)
}

fn tau_build(t: &TwistInput) -> Res {
    let s = twist_recipe(t)?;
    let class = classify(&s).map_err(failed)?;
    let text = format!("{}\nclass: {class}", serde_json::to_string(&s.to_json()).unwrap());
    Ok(Report { ok: true, text, json: json!({ "recipe": s.to_json(), "class": class.to_string() }) })
}

fn tau_verify(t: &TwistInput, samples: usize, seed: u64) -> Res {
    let s = twist_recipe(t)?;
    let class = classify(&s).map_err(failed)?;
    let powers = twist_power_identity(&s).map_err(failed)?;
    let p = powers.p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // s^order = id with order p, or 2p once the mirror is in play
    let order = if s.mirror { 2 * p } else { p };
    let (elements, exhaustive) = match all_elements(&s.algebra).filter(|e| e.len() <= 1 << 16) {
        Some(all) => (all, true),
        None => ((0..samples).map(|_| NcPoly::random(&s.algebra, &mut rng, 8, 4)).collect(), false),
    };
    let mut moved = None;
    for x in &elements {
        let mut y = x.clone();
        for _ in 0..order {
            y = s.evaluate(&y).map_err(failed)?;
        }
        if y != *x {
            moved = Some(print_poly(x));
            break;
        }
    }
    let deriv = verify_derivative_isomorphism(&s, samples, &mut rng).map_err(failed)?;
    let ok = powers.passed() && moved.is_none() && deriv.passed();
    let mut text = format!("class: {class}\n");
    for (r, holds) in &powers.power_laws {
        text.push_str(&format!("{} power law r = {r}\n", mark(*holds)));
    }
    text.push_str(&format!("{} inverse law with {} gamma\n", mark(powers.inverse_law), p - 1));
    text.push_str(&format!(
        "{} s^{order} = id on {} {} elements{}\n",
        mark(moved.is_none()),
        elements.len(),
        if exhaustive { "(all)" } else { "sampled" },
        moved.as_ref().map(|m| format!(", moves {m}")).unwrap_or_default()
    ));
    text.push_str(&format!("{} derivative identities on {} samples", mark(deriv.passed()), deriv.samples));
    if let Some(f) = deriv.failures.first() {
        text.push_str(&format!("\n  {}: a = {}, b = {}: {} != {}", f.identity, f.a, f.b, f.lhs, f.rhs));
    }
    let json = json!({
        "ok": ok,
        "class": class.to_string(),
        "p": p,
        "powerLaws": powers.power_laws.iter().map(|(r, h)| json!({ "r": r, "holds": h })).collect::<Vec<_>>(),
        "inverseLaw": powers.inverse_law,
        "order": order,
        "checked": elements.len(),
        "exhaustive": exhaustive,
        "counterexample": moved,
        "derivative": derivative_json(&deriv),
    });
    Ok(Report { ok, text, json })
}

fn derivative_json(d: &enda_core::bijection::DerivativeReport) -> Value {
    json!({
        "samples": d.samples,
        "passed": d.passed(),
        "failures": d.failures.iter().take(5).map(|f| json!({
            "identity": f.identity, "a": f.a, "b": f.b, "lhs": f.lhs, "rhs": f.rhs,
        })).collect::<Vec<_>>(),
    })
}

fn standard_base(recipe: Option<&str>, family: Option<&str>, a: &AlgebraInput) -> Res {
    let fam = match (recipe, family) {
        (Some(path), _) => image_family(&load_recipe(path, a)?).map_err(failed)?,
        (None, Some(path)) => EndoFamily::from_json(&read_json(path)?).map_err(usage)?,
        (None, None) => return Err(usage("give --recipe or --family")),
    };
    match find_standard_base(&fam) {
        Ok(Some(b)) => {
            let sigma: Vec<usize> = b.sigma.iter().map(|i| i + 1).collect();
            let z: Vec<String> = b.z.iter().map(print_poly).collect();
            let y: Vec<String> = b.y.iter().map(print_poly).collect();
            let mut text = format!("sigma = {sigma:?}\nrho = {}", b.rho.to_literal());
            for (i, zi) in z.iter().enumerate() {
                text.push_str(&format!("\nz{} = {zi}", i + 1));
            }
            let json = json!({ "sigma": sigma, "rho": b.rho.to_json(), "y": y, "z": z });
            Ok(Report { ok: true, text, json })
        }
        Ok(None) => Ok(Report {
            ok: false,
            text: "no base on which the family acts by the standard maps".into(),
            json: json!({ "found": false }),
        }),
        Err(e) => Err(failed(e)),
    }
}

fn recipe_classify(path: &str, a: &AlgebraInput, samples: usize, seed: u64) -> Res {
    let s = load_recipe(path, a)?;
    let class = classify(&s).map_err(failed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let deriv = verify_derivative_isomorphism(&s, samples, &mut rng).map_err(failed)?;
    let mut text = format!("class: {class}\n{} derivative identities on {} samples", mark(deriv.passed()), samples);
    if let Some(f) = deriv.failures.first() {
        text.push_str(&format!("\n  {}: a = {}, b = {}: {} != {}", f.identity, f.a, f.b, f.lhs, f.rhs));
    }
    let json = json!({ "class": class.to_string(), "derivative": derivative_json(&deriv) });
    Ok(Report { ok: deriv.passed(), text, json })
}

fn poly_eval(poly: &str, a: &AlgebraInput, recipe: Option<&str>, inverse: bool) -> Res {
    let (alg, s) = match recipe {
        Some(path) => {
            let s = load_recipe(path, a)?;
            (s.algebra.clone(), Some(s))
        }
        None => (algebra(a)?, None),
    };
    let p = parse_poly(poly, &alg).map_err(usage)?;
    let out = match (&s, inverse) {
        (Some(s), false) => s.evaluate(&p).map_err(failed)?,
        (Some(s), true) => s.evaluate_inverse(&p).map_err(failed)?,
        (None, _) => p,
    };
    let text = print_poly(&out);
    Ok(Report { ok: true, json: json!({ "poly": text, "algebra": alg.to_json() }), text })
}

fn run_selftest(only: &[usize], timings: bool, seed: u64) -> Res {
    let ids: Vec<usize> = if only.is_empty() { (1..=selftest::TITLES.len()).collect() } else { only.to_vec() };
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > selftest::TITLES.len()) {
        return Err(usage(format!("no suite {bad}; suites are 1-{}", selftest::TITLES.len())));
    }
    let outcomes: Vec<_> = ids.iter().map(|&id| selftest::run(id, seed)).collect();
    let mut text = String::new();
    for o in &outcomes {
        text.push_str(&format!("{} {:>2} {}", mark(o.passed()), o.id, o.title));
        if timings {
            text.push_str(&format!(" ({:.3?})", o.elapsed));
        }
        text.push('\n');
        for f in o.failures.iter().take(3) {
            text.push_str(&format!("     {f}\n"));
        }
    }
    let ok = outcomes.iter().all(|o| o.passed());
    let json = json!({
        "seed": seed,
        "passed": ok,
        "suites": outcomes.iter().map(|o| {
            let mut v = json!({ "id": o.id, "title": o.title, "passed": o.passed(), "failures": o.failures });
            if timings {
                v["seconds"] = json!(o.elapsed.as_secs_f64());
            }
            v
        }).collect::<Vec<_>>(),
    });
    Ok(Report { ok, text, json })
}
