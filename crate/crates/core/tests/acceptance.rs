//! Acceptance suite. Every criterion prints one `[PASS]`/`[FAIL]` line; the test
//! fails at the end if any criterion failed. Run with `--nocapture` to see the lines.
//!
//! Tolerances: every identity is checked exactly (zero residual coefficients as
//! rational functions). Random inputs come from ChaCha8 with the fixed seed
//! below. Runtime targets are measured wall-clock and count towards the verdict.

use std::error::Error as StdError;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use dynrmat::cli::TwistFile;
use dynrmat::dynr::{
    cdybe_residual, closed_form, construct_r, det_a, equivariance_residual, levi_decomposition, BaseStructure, ClosedForm, DynamicalR,
};
use dynrmat::exact::{int, rat, Poly, RatFn, Rational, SamplePoints, ZeroTest};
use dynrmat::exterior::Multivector;
use dynrmat::liealg::{builtin, BuiltinName, BuiltinName::*, Decomposition, LieAlgebra};
use dynrmat::pbw::poisson;
use dynrmat::qdybe::{solve_twist_order, AnsatzTerm, DynTensor, TensorAlgebra};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_260_518;
const ORDER: usize = 4;
const CRITERION_1_BUDGET: Duration = Duration::from_secs(10);
const CRITERION_5_BUDGET: Duration = Duration::from_secs(60);

type Outcome = Result<String, Box<dyn StdError>>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+).into());
        }
    };
}

fn dec(name: BuiltinName) -> Decomposition {
    builtin(name).decomposition
}

/// Exact zero test on every coefficient of a classical residual.
fn mv_zero(m: &Multivector) -> bool {
    m.verdicts(ZeroTest::exact()).iter().all(|(_, v)| v.zero)
}

fn tensor_zero(t: &DynTensor) -> bool {
    t.verdicts(ZeroTest::exact()).iter().all(|(_, _, v)| v.zero)
}

fn classical_residuals_vanish(r: &DynamicalR) -> Result<bool, Box<dyn StdError>> {
    let base = BaseStructure::new(r.decomposition());
    let mut ok = mv_zero(&cdybe_residual(r));
    for i in 0..r.decomposition().rank() {
        ok &= mv_zero(&equivariance_residual(r, &base, i)?);
    }
    Ok(ok)
}

/// Pairs `(e_α, e_{−α})` read off the labels `e..`/`f..` of a simple builtin.
fn root_pairs(alg: &LieAlgebra) -> Vec<(usize, usize)> {
    alg.labels()
        .iter()
        .enumerate()
        .filter_map(|(i, l)| l.strip_prefix('e').and_then(|s| alg.index_of(&format!("f{s}"))).map(|j| (i, j)))
        .collect()
}

/// `(λ, α)` as `<λ, [e_α, e_{−α}]>` restricted to the Cartan coordinates `cartan`.
fn root_pairing(alg: &LieAlgebra, d: &Decomposition, e: usize, f: usize, cartan: &[usize]) -> Poly {
    let mut p = Poly::zero();
    for &h in cartan {
        let c = alg.constant(e, f, h);
        let pos = d.base_position(h).expect("cartan element in base");
        p = &p + &Poly::var(pos).scale(&c);
    }
    p
}

fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, max_deg: u32) -> Poly {
    let mut p = Poly::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let mut m = vec![0u32; nvars];
        for _ in 0..rng.gen_range(0..=max_deg) {
            m[rng.gen_range(0..nvars)] += 1;
        }
        p = &p + &Poly::from_terms([(m, int(rng.gen_range(-3..=3)))]);
    }
    p
}

fn abelian_ctx(order: usize) -> TensorAlgebra {
    TensorAlgebra::new(dec(Abelian(3)), order)
}

/// `F = 1` plus three exponential twists `exp(ℏ Σ c x_a ⊗ x_b)` over the abelian base of `abelian(3)`.
fn twist_corpus(ctx: &TensorAlgebra) -> Vec<(String, DynTensor)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut corpus = vec![("F=1".to_string(), ctx.one(2))];
    for t in 0..3 {
        let pairs: Vec<(Rational, usize, usize)> = (0..rng.gen_range(1..=2))
            .map(|_| (rat(rng.gen_range(-4..=4), rng.gen_range(1..=3)), rng.gen_range(1..=2), rng.gen_range(1..=2)))
            .collect();
        corpus.push((format!("exp#{t}"), ctx.exponential_twist(&pairs).unwrap()));
    }
    corpus
}

fn perturbed_twist(ctx: &TensorAlgebra) -> DynTensor {
    let mut f = ctx.one(2);
    f.add_term(1, vec![vec![1], vec![2]], RatFn::var(0));
    f
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for name in [Sl2, Sl3, Heisenberg(1, 1), Heisenberg(2, 1)] {
        let r = construct_r(&dec(name))?;
        ensure!(classical_residuals_vanish(&r)?, "{name}: nonzero residual");
    }
    let t = start.elapsed();
    ensure!(t < CRITERION_1_BUDGET, "took {t:?}");
    Ok(format!("sl2, sl3, heisenberg(1,1), heisenberg(2,1): residuals exactly zero in {:.2}s", t.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    for name in [Sl2, Sl3] {
        let d = dec(name);
        let alg = d.algebra();
        let built = construct_r(&d)?;
        let pairs = root_pairs(alg);
        ensure!(built.entries().len() == pairs.len(), "{name}: {} entries for {} roots", built.entries().len(), pairs.len());
        for &(e, f) in &pairs {
            let expected = -RatFn::from_poly(root_pairing(alg, &d, e, f, d.base())).inv()?;
            ensure!((&built.coefficient(e, f) - &expected).is_zero(), "{name}: coefficient of {}^{}", alg.label(e), alg.label(f));
        }
        let closed = closed_form(&ClosedForm::SimpleCartan(name))?;
        ensure!(built.bivector().sub(closed.bivector()).is_zero(), "{name}: closed form differs");
    }

    // Levi base h ⊕ g_α1 ⊕ g_−α1; λ restricted to h*.
    let levi = levi_decomposition(Sl3, &[0])?;
    let alg = levi.algebra();
    let cartan = &levi.base()[..2];
    let built = construct_r(&levi)?;
    let slice = [Poly::var(0), Poly::var(1), Poly::zero(), Poly::zero()];
    let restricted = built.compose(levi.clone(), &slice)?;
    let reduced: Vec<(usize, usize)> = root_pairs(alg).into_iter().filter(|(e, _)| levi.complement().contains(e)).collect();
    ensure!(reduced.len() == 2, "reduced root set has {} roots", reduced.len());
    let mut points = 0;
    for p in SamplePoints::new(SEED, 2) {
        let point = [p[0].clone(), p[1].clone(), int(0), int(0)];
        let values: Vec<Rational> = reduced.iter().map(|&(e, f)| root_pairing(alg, &levi, e, f, cartan).eval(&point)).collect();
        if values.iter().any(|v| *v == int(0)) {
            continue;
        }
        for (&(e, f), v) in reduced.iter().zip(&values) {
            let got = restricted.coefficient(e, f).eval(&point)?;
            ensure!(got == -v.recip(), "at {point:?}: {got} for {}^{}", alg.label(e), alg.label(f));
        }
        ensure!(restricted.entries().len() == reduced.len(), "extra terms after restriction");
        points += 1;
        if points == 20 {
            break;
        }
    }
    Ok("sl2, sl3 coefficientwise; sl3 Levi restriction at 20 rational points".into())
}

fn criterion_3() -> Outcome {
    for (m, n) in [(1, 1), (2, 1), (2, 2)] {
        let r = closed_form(&ClosedForm::Heisenberg(m, n))?;
        ensure!(classical_residuals_vanish(&r)?, "heisenberg({m},{n}): nonzero residual");
        let d = dec(Heisenberg(m, n));
        let x = Poly::var(d.rank() - 1);
        ensure!(det_a(&d) == x.pow(2 * m as u32), "heisenberg({m},{n}): det {:?}", det_a(&d));
    }
    Ok("heisenberg (1,1), (2,1), (2,2): residuals zero, det = x^{2m}".into())
}

fn criterion_4() -> Outcome {
    let d = dec(Sl2);
    let base = BaseStructure::new(&d);
    let r = construct_r(&d)?;
    let deltas = [RatFn::one(), RatFn::constant(int(-1)), RatFn::var(0), RatFn::var(0).inv()?.scale(&int(2))];
    let mut r_cases = 0;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for delta in &deltas {
            let mut entries = r.entries();
            entries.push((i, j, delta.clone()));
            let p = DynamicalR::from_entries(d.clone(), &entries)?;
            let flagged = !mv_zero(&cdybe_residual(&p)) || !mv_zero(&equivariance_residual(&p, &base, 0)?);
            ensure!(flagged, "r perturbation {delta:?} at ({i},{j}) passed");
            r_cases += 1;
        }
    }

    // Structure constants: every raw entry and every antisymmetric pair, ±1. The
    // validator must agree with a direct Jacobi oracle; a table the oracle accepts
    // is still a Lie algebra, so passing it is not a miss.
    let alg = d.algebra().clone();
    let n = alg.dim();
    let mut tables = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for delta in [int(1), int(-1)] {
                    let c = alg.constant(i, j, k) + &delta;
                    let mut raw = alg.clone();
                    raw.set_constant(i, j, k, c.clone());
                    tables.push((format!("c[{i}][{j}][{k}] {delta:+}"), raw));
                    if i < j {
                        let mut pair = alg.clone();
                        pair.set_constant(i, j, k, c.clone());
                        pair.set_constant(j, i, k, -c);
                        tables.push((format!("c[{i}][{j}][{k}] = -c[{j}][{i}][{k}] {delta:+}"), pair));
                    }
                }
            }
        }
    }
    let mut violations = 0;
    let mut still_solved = 0;
    for (what, g) in &tables {
        let lie = is_lie_algebra(g);
        ensure!(g.validate().is_valid() == lie, "{what}: validator disagrees with the Jacobi oracle");
        if !lie {
            violations += 1;
            continue;
        }
        let pd = Decomposition::new(g.clone().into(), d.base().to_vec(), d.complement().to_vec())?;
        if pd.check_reductive().is_reductive() && classical_residuals_vanish(&DynamicalR::new(pd, r.bivector().clone())?)? {
            still_solved += 1;
        }
    }
    Ok(format!(
        "{r_cases} r perturbations flagged; {} structure perturbations, {violations} axiom violations detected, 0 misses ({} still Lie, {still_solved} still solved by r)",
        tables.len(),
        tables.len() - violations
    ))
}

/// Antisymmetry and Jacobi straight from the table.
fn is_lie_algebra(g: &LieAlgebra) -> bool {
    let n = g.dim();
    let c = |i, j, k| g.constant(i, j, k);
    let idx = || (0..n).flat_map(move |i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))));
    if idx().any(|(i, j, k)| c(i, j, k) != -c(j, i, k)) {
        return false;
    }
    idx().all(|(i, j, k)| {
        (0..n).all(|p| {
            let mut s = Rational::from_integer(0.into());
            for m in 0..n {
                s += c(i, j, m) * c(m, k, p) + c(j, k, m) * c(m, i, p) + c(k, i, m) * c(m, j, p);
            }
            s == Rational::from_integer(0.into())
        })
    })
}

/// `(Σ a_i ℏ^i) ★ (Σ b_j ℏ^j)` truncated at `n`.
fn star_series(ctx: &TensorAlgebra, a: &[Poly], b: &[Poly], n: usize) -> Result<Vec<Poly>, Box<dyn StdError>> {
    let mut out = vec![Poly::zero(); n + 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            if i + j > n {
                continue;
            }
            let s = ctx.star().star(ai, bj, n - i - j)?;
            for (l, c) in s.coeffs().iter().enumerate() {
                out[i + j + l] = &out[i + j + l] + c;
            }
        }
    }
    Ok(out)
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let d = dec(Heisenberg(1, 1));
    let ctx = TensorAlgebra::new(d.clone(), ORDER);
    let base = d.base_algebra();
    let l = d.rank();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    for t in 0..50 {
        let (f, g, h) = (random_poly(&mut rng, l, 3), random_poly(&mut rng, l, 3), random_poly(&mut rng, l, 3));
        let fg = star_series(&ctx, std::slice::from_ref(&f), std::slice::from_ref(&g), ORDER)?;
        let gh = star_series(&ctx, std::slice::from_ref(&g), std::slice::from_ref(&h), ORDER)?;
        ensure!(star_series(&ctx, &fg, &[h], ORDER)? == star_series(&ctx, std::slice::from_ref(&f), &gh, ORDER)?, "triple {t} not associative");
        ensure!(fg[1] == poisson(&base, &f, &g).scale(&rat(1, 2)), "triple {t}: first order is not half the bracket");
    }
    for t in 0..50 {
        let f = DynTensor::scalar(1, ORDER, RatFn::from_poly(random_poly(&mut rng, l, 3)));
        let g = DynTensor::scalar(1, ORDER, RatFn::from_poly(random_poly(&mut rng, l, 3)));
        let lhs = ctx.shift_insert(&ctx.mul(&f, &g)?, 1)?;
        let rhs = ctx.mul(&ctx.shift_insert(&f, 1)?, &ctx.shift_insert(&g, 1)?)?;
        ensure!(tensor_zero(&lhs.sub(&rhs)), "pair {t}: shift is not multiplicative");
    }
    let t = start.elapsed();
    ensure!(t < CRITERION_5_BUDGET, "took {t:?}");
    Ok(format!("50 associative triples, 50 shift pairs to hbar^{ORDER} in {:.2}s", t.as_secs_f64()))
}

/// `1 + Σ ℏ^k c ⊗ ...` with one generator per leg and slot 1 left empty.
fn random_tensor(rng: &mut ChaCha8Rng, ctx: &TensorAlgebra, arity: usize) -> DynTensor {
    let n = ctx.decomposition().algebra().dim();
    let rank = ctx.decomposition().rank();
    let mut f = ctx.one(arity);
    for _ in 0..rng.gen_range(1..=3) {
        let var = rng.gen_range(0..rank);
        let den = &Poly::var(var) + &Poly::constant(int(rng.gen_range(1..=3)));
        let num = Poly::var(var).pow(rng.gen_range(0..=1)).scale(&int(rng.gen_range(-3..=3)));
        let words: Vec<Vec<usize>> = (0..arity).map(|s| if s == 0 { vec![] } else { vec![rng.gen_range(0..n)] }).collect();
        f = f.add(&ctx.term(rng.gen_range(1..=2), RatFn::from_parts(num, &den).unwrap(), &words));
    }
    f
}

fn criterion_6() -> Outcome {
    let ctx = TensorAlgebra::new(dec(Heisenberg(1, 1)), ORDER);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    for t in 0..20 {
        let a = random_tensor(&mut rng, &ctx, 3);
        let b = random_tensor(&mut rng, &ctx, 3);
        let lhs = ctx.shift_insert(&ctx.mul(&a, &b)?, 1)?;
        let rhs = ctx.mul(&ctx.shift_insert(&a, 1)?, &ctx.shift_insert(&b, 1)?)?;
        ensure!(tensor_zero(&lhs.sub(&rhs)), "instance {t}: mul");
        let lhs = ctx.shift_insert(&ctx.invert(&a)?, 1)?;
        let rhs = ctx.invert(&ctx.shift_insert(&a, 1)?)?;
        ensure!(tensor_zero(&lhs.sub(&rhs)), "instance {t}: invert");
    }
    Ok(format!("20 heisenberg(1,1) instances to hbar^{ORDER}"))
}

fn criterion_7() -> Outcome {
    let ctx = abelian_ctx(ORDER);
    let mut corpus = twist_corpus(&ctx);
    corpus.push(("F=1 on sl2".into(), ctx_one(Sl2)));
    for (name, f) in &corpus {
        let c = if name.ends_with("sl2") { TensorAlgebra::new(dec(Sl2), ORDER) } else { ctx.clone() };
        ensure!(tensor_zero(&c.cocycle_residual(f)?), "{name}: cocycle");
        let (l, r) = c.counit_check(f)?;
        ensure!(tensor_zero(&l) && tensor_zero(&r), "{name}: counit");
        ensure!(tensor_zero(&c.qdybe_residual(&c.r_from_twist(f)?)?), "{name}: qdybe");
    }
    let res = ctx.cocycle_residual(&perturbed_twist(&ctx))?;
    let first = res.verdicts(ZeroTest::exact()).into_iter().filter(|(_, _, v)| !v.zero).map(|(k, _, _)| k).min();
    ensure!(first == Some(2), "perturbed twist first fails at {first:?}");
    Ok(format!("{} twists pass to hbar^{ORDER}; perturbed twist detected at hbar^2", corpus.len()))
}

fn ctx_one(name: BuiltinName) -> DynTensor {
    TensorAlgebra::new(dec(name), ORDER).one(2)
}

fn criterion_8() -> Outcome {
    let ctx = abelian_ctx(ORDER);
    let corpus = twist_corpus(&ctx);
    for (name, f) in &corpus {
        let (first, second) = ctx.lemma_check(f)?;
        ensure!(tensor_zero(&first) && tensor_zero(&second), "{name}: lemma identities");
        ensure!(tensor_zero(&ctx.shifted_r_residual(f)?), "{name}: shifted R identity");
    }
    Ok(format!("{} twists to hbar^{ORDER}", corpus.len()))
}

fn criterion_9() -> Outcome {
    let cases = [
        (Sl2, construct_r(&dec(Sl2))?, Multivector::monomial(&[1, 2], RatFn::one())),
        (Heisenberg(1, 1), closed_form(&ClosedForm::Heisenberg(1, 1))?, Multivector::monomial(&[0, 2], RatFn::one())),
    ];
    for (name, good, bad) in cases {
        let ctx = TensorAlgebra::new(dec(name), 2);
        let res = ctx.qdybe_residual(&ctx.r_from_classical(good.bivector())?)?;
        ensure!(res.coeff(0).is_empty() && res.coeff(1).is_empty(), "{name}: low orders");
        ensure!(mv_zero(&ctx.wedge_projection(&res, 2)?), "{name}: hbar^2 for a CDYBE solution");
        let bad_r = DynamicalR::new(ctx.decomposition().clone(), bad.clone())?;
        ensure!(!mv_zero(&cdybe_residual(&bad_r)), "{name}: control bivector solves CDYBE");
        let res = ctx.qdybe_residual(&ctx.r_from_classical(&bad)?)?;
        ensure!(res.coeff(0).is_empty() && res.coeff(1).is_empty(), "{name}: low orders for the control");
        ensure!(!mv_zero(&ctx.wedge_projection(&res, 2)?), "{name}: control passed at hbar^2");
    }
    Ok("sl2 and heisenberg(1,1) in both directions".into())
}

fn criterion_10() -> Outcome {
    let ctx = TensorAlgebra::new(dec(Sl2), 1);
    let r = construct_r(&dec(Sl2))?;
    let r_tensor = ctx.iota(r.bivector(), 1)?;
    let inv = RatFn::var(0).inv()?;
    let ansatz = [
        AnsatzTerm { coefficient: inv.clone(), legs: [vec![1], vec![2]] },
        AnsatzTerm { coefficient: inv, legs: [vec![2], vec![1]] },
    ];
    let a = solve_twist_order(&ctx, &ctx.one(2), &ansatz, 1, Some(&r_tensor))?;
    let b = solve_twist_order(&ctx, &ctx.one(2), &ansatz, 1, Some(&r_tensor))?;
    ensure!(a == b, "solution sets differ between runs");
    let mut members = vec![a.particular.clone()];
    members.extend(a.kernel.iter().map(|k| a.particular.add(k)));
    for m in &members {
        ensure!(tensor_zero(&ctx.cocycle_residual(m)?), "member fails the cocycle condition");
        ensure!(tensor_zero(&ctx.r_from_twist(m)?.order_part(1).sub(&r_tensor)), "member does not quantize r");
    }
    Ok(format!("particular solution plus {} kernel directions, deterministic", a.kernel.len()))
}

fn run_cli(args: &[String], out: &Path) -> Result<Vec<u8>, Box<dyn StdError>> {
    let status = Command::new(env!("CARGO_BIN_EXE_dynrmat")).args(args).arg("--out").arg(out).output()?;
    ensure!(status.status.code() == Some(0), "{args:?} exited with {:?}", status.status.code());
    Ok(std::fs::read(out)?)
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir()?;
    let mut runs: Vec<Vec<String>> = Vec::new();
    for name in ["sl2", "sl3", "heisenberg(1,1)", "heisenberg(2,1)"] {
        for cmd in ["construct-r", "check-cdybe", "check-equivariance"] {
            runs.push([cmd, "--algebra", &format!("builtin:{name}"), "--rmatrix", "constructed"].map(String::from).to_vec());
        }
    }
    let ctx = abelian_ctx(ORDER);
    let labels = ctx.labels().to_vec();
    for (i, (_, f)) in twist_corpus(&ctx).iter().enumerate() {
        let path = dir.path().join(format!("twist{i}.json"));
        let file = TwistFile::from_tensor(f, &labels, Some("builtin:abelian(3)".into()));
        std::fs::write(&path, serde_json::to_string_pretty(&file)?)?;
        for cmd in ["check-cocycle", "check-qdybe"] {
            runs.push(vec![cmd.into(), "--twist".into(), path.display().to_string(), "--order".into(), ORDER.to_string()]);
        }
    }
    for args in &mut runs {
        args.extend(["--zero-test", "sampled", "--seed", "7"].map(String::from));
    }
    for (i, args) in runs.iter().enumerate() {
        let a = run_cli(args, &dir.path().join(format!("a{i}.json")))?;
        let b = run_cli(args, &dir.path().join(format!("b{i}.json")))?;
        ensure!(a == b, "{args:?}: reports differ");
    }
    Ok(format!("{} commands, two runs each, identical bytes", runs.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("construct_r residuals on four builtins", criterion_1),
        ("constructor equals root-sum closed forms", criterion_2),
        ("heisenberg closed forms and fatness determinant", criterion_3),
        ("negative controls", criterion_4),
        ("PBW star and shift morphism", criterion_5),
        ("shift_insert commutes with mul and invert", criterion_6),
        ("twist pipeline on the corpus", criterion_7),
        ("lemma and shifted R identities", criterion_8),
        ("classical-limit ladder", criterion_9),
        ("solver smoke test", criterion_10),
        ("CLI report determinism", criterion_11),
    ];
    let mut failed = Vec::new();
    println!();
    for (n, (title, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()).into())
        });
        match outcome {
            Ok(detail) => println!("[PASS] criterion {}: {title}: {detail}", n + 1),
            Err(e) => {
                println!("[FAIL] criterion {}: {title}: {e}", n + 1);
                failed.push(n + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
