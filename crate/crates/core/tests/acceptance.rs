//! Acceptance checks, one line per criterion.
//!
//! Run with `cargo test --test acceptance`. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use astro_float::{BigFloat, Consts, RoundingMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use orbcert::certify::{certify_orbit, Certificate, Stability};
use orbcert::cheb::ChebSeq;
use orbcert::interval::{round, Bound, Interval};
use orbcert::maps::{MapDef, Param};
use orbcert::pdcurve::{self, analytic_beta, certify_curve, node_solve, CurveOptions, End, Window};
use orbcert::sweep::{self, recount, run_sweep, Axis, SweepConfig};
use orbcert::zerofind::{newton_refine, Candidate, SeedOptions, NEWTON_MAX_ITER, NEWTON_TOL};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn logistic(mu: &str) -> MapDef {
    MapDef::from_params("logistic", &[Param::parse("mu", mu).unwrap()]).unwrap()
}

fn predprey(beta: &str, kappa: &str) -> MapDef {
    MapDef::from_params(
        "predprey",
        &[
            Param::parse("beta", beta).unwrap(),
            Param::parse("kappa", kappa).unwrap(),
        ],
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// Bisection oracle for roots of g^p(x) − x on a uniform grid.

/// Brackets `[a, b]` of sign changes of `h` on `[lo, hi]` with spacing `step`,
/// each narrowed until its width is below `1e-13`.
fn bisection_roots(h: impl Fn(f64) -> f64 + Sync, lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    let n = ((hi - lo) / step).ceil() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| lo + step * i as f64).collect();
    let hs: Vec<f64> = xs.par_iter().map(|&x| h(x)).collect();
    (0..n)
        .into_par_iter()
        .filter(|&i| {
            hs[i] != 0.0 && hs[i + 1] != 0.0 && (hs[i] < 0.0) != (hs[i + 1] < 0.0) || hs[i] == 0.0
        })
        .map(|i| {
            if hs[i] == 0.0 {
                return (xs[i], xs[i]);
            }
            let (mut a, mut b, neg_a) = (xs[i], xs[i + 1], hs[i] < 0.0);
            while b - a > 1e-13 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let hm = h(m);
                if hm == 0.0 {
                    return (m, m);
                }
                if (hm < 0.0) == neg_a {
                    a = m;
                } else {
                    b = m;
                }
            }
            (a, b)
        })
        .collect()
}

fn iterate(f: &impl Fn(f64) -> f64, x: f64, n: usize) -> f64 {
    (0..n).fold(x, |y, _| f(y))
}

/// Roots of `fᵖ(x) − x` that are not roots of `fᵈ(x) − x` for a proper divisor `d`.
fn true_period_roots(
    f: impl Fn(f64) -> f64 + Sync,
    p: usize,
    lo: f64,
    hi: f64,
    step: f64,
) -> Vec<(f64, f64)> {
    bisection_roots(|x| iterate(&f, x, p) - x, lo, hi, step)
        .into_iter()
        .filter(|&(a, b)| {
            let x = 0.5 * (a + b);
            (1..p)
                .filter(|d| p % d == 0)
                .all(|d| (iterate(&f, x, d) - x).abs() > 1e-7)
        })
        .collect()
}

/// Whether the bracket meets the certified ball around coordinate `k`,
/// allowing for the oracle's own floating-point error.
fn bracket_in_ball(bracket: (f64, f64), cert: &Certificate, k: usize) -> bool {
    let r = cert.r_star().unwrap() + 1e-12;
    bracket.1 >= cert.x_bar[k] - r && bracket.0 <= cert.x_bar[k] + r
}

// ---------------------------------------------------------------------------

fn c1_walkthrough() -> Check {
    let m = logistic("3.2");
    let c = Candidate::from_orbit(&m, vec![0.51, 0.79]).map_err(|e| e.to_string())?;
    let cert = certify_orbit(&m, &c, Bound::Unbounded);
    let b = cert.bounds.ok_or("no bounds")?;
    ensure((0.012775..=0.012776).contains(&b.y.hi()), || {
        format!("Y = {:?}", b.y)
    })?;
    ensure(b.z1.hi() <= 1e-15, || format!("Z1 = {:?}", b.z1))?;
    ensure(
        b.z2.subset_of(&Interval::new(20.742, 20.743).unwrap()),
        || format!("Z2 = {:?}", b.z2),
    )?;
    ensure(
        cert.verified && cert.r_star() == Some(2f64.powi(-6)),
        || format!("r_star = {:?}", cert.r_star()),
    )?;
    let lambda = cert.eigenvalue.ok_or("no eigenvalue")?;
    ensure(
        lambda.subset_of(&Interval::new(-0.065, 0.315).unwrap()) && lambda.contains(0.16),
        || format!("lambda = {lambda:?}"),
    )?;
    ensure(cert.stability == Some(Stability::Stable), || {
        format!("{:?}", cert.stability)
    })?;
    Ok(format!(
        "Y ≤ {:.7}, Z1 ≤ {:.3e}, Z2 ≤ {:.6}, r = 2^-6, λ ∈ {lambda}",
        b.y.hi(),
        b.z1.hi(),
        b.z2.hi()
    ))
}

fn c2_refined() -> Check {
    let m = logistic("3.2");
    let c =
        newton_refine(&m, &[0.51, 0.79], NEWTON_TOL, NEWTON_MAX_ITER).map_err(|e| e.to_string())?;
    let cert = certify_orbit(&m, &c, Bound::Unbounded);
    let r = cert.r_star().ok_or("unverified")?;
    ensure(cert.counts() && r <= 1e-11, || format!("r_star = {r:e}"))?;
    Ok(format!("r_star = {r:.3e}"))
}

fn c3_period_three() -> Check {
    let cfg = SweepConfig {
        grid: vec![Axis::new("mu", 3.82, 3.86, 0.01)],
        p_min: 3,
        p_max: 3,
        ..Default::default()
    };
    let out = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let cert = out
        .archive
        .iter()
        .find(|c| c.counts())
        .ok_or("no period-3 orbit certified")?;
    ensure(cert.distinct, || "not distinct".into())?;
    let mu = cert.params[0].value;
    let roots = true_period_roots(|x| mu * x * (1.0 - x), 3, -0.5e-6, 1.0 + 0.5e-6, 1e-6);
    for k in 0..3 {
        ensure(roots.iter().any(|&b| bracket_in_ball(b, cert, k)), || {
            format!("coordinate {k} has no oracle root")
        })?;
    }
    Ok(format!(
        "mu = {}, r_star = {:.2e}, {} period-3 orbits in sweep",
        cert.params[0].value,
        cert.r_star().unwrap(),
        out.archive.len()
    ))
}

fn c4_oracle_bijection() -> Check {
    let mut summary = Vec::new();
    for mu in ["3.2", "3.5", "3.83"] {
        let m = logistic(mu);
        let muf: f64 = mu.parse().unwrap();
        let mut counts = Vec::new();
        for p in 1..=4 {
            let certs = sweep::certified_orbits(&m, p, &SeedOptions::default());
            let roots = true_period_roots(|x| muf * x * (1.0 - x), p, -0.5e-6, 1.0 + 0.5e-6, 1e-6);
            let mut hit = vec![0usize; certs.len() * p];
            for &b in &roots {
                let inside: Vec<usize> = (0..certs.len() * p)
                    .filter(|&i| bracket_in_ball(b, &certs[i / p], i % p))
                    .collect();
                ensure(inside.len() == 1, || {
                    format!("mu {mu} p {p}: root {b:?} lies in {} balls", inside.len())
                })?;
                hit[inside[0]] += 1;
            }
            ensure(hit.iter().all(|&h| h == 1), || {
                format!("mu {mu} p {p}: ball hits {hit:?} for {} roots", roots.len())
            })?;
            counts.push(certs.len());
        }
        summary.push(format!("{mu}: {counts:?}"));
    }
    Ok(format!("orbits per period 1..4: {}", summary.join(", ")))
}

fn c5_predprey_pointwise() -> Check {
    let below = predprey("-3", "-10");
    let certs = sweep::certified_orbits(&below, 2, &SeedOptions::default());
    ensure(!certs.is_empty(), || {
        "no period-2 orbit at kappa = -10".into()
    })?;
    let h = |x: f64| -1.0 / (1.0 + x.exp());
    let dh = |x: f64| x.exp() / (1.0 + x.exp()).powi(2);
    let f = |x: f64| -3.0 + x - 10.0 * h(x);
    for cert in &certs {
        let roots = true_period_roots(f, 2, -20.0, 20.0, 1e-5);
        ensure(
            (0..2).all(|k| roots.iter().any(|&b| bracket_in_ball(b, cert, k))),
            || "orbit not confirmed by bisection".into(),
        )?;
        let lambda: f64 = cert.x_bar.iter().map(|&x| 1.0 - 10.0 * dh(x)).product();
        ensure(cert.eigenvalue.is_some_and(|e| e.contains(lambda)), || {
            format!("multiplier {lambda}")
        })?;
    }

    let above = predprey("-3", "-8");
    let fixed = sweep::certified_orbits(&above, 1, &SeedOptions::default());
    // β + κh(x) = 0 gives eˣ = 5/3; f′ = 1 + κh′ = −7/8.
    let x_star = (5.0f64 / 3.0).ln();
    ensure(fixed.len() == 1, || {
        format!("{} fixed points at kappa = -8", fixed.len())
    })?;
    let fp = &fixed[0];
    ensure(
        (fp.x_bar[0] - x_star).abs() <= fp.r_star().unwrap() + 1e-14,
        || format!("x = {}", fp.x_bar[0]),
    )?;
    ensure(
        fp.eigenvalue.is_some_and(|e| e.contains(-0.875))
            && fp.stability == Some(Stability::Stable),
        || format!("{:?} {:?}", fp.eigenvalue, fp.stability),
    )?;
    let none = sweep::certified_orbits(&above, 2, &SeedOptions::default());
    ensure(none.is_empty(), || {
        format!("{} period-2 orbits at kappa = -8", none.len())
    })?;
    Ok(format!(
        "{} period-2 orbit(s) at kappa = -10; stable fixed point, no period 2 at kappa = -8",
        certs.len()
    ))
}

fn c6_p1_curve() -> Check {
    let w = Window::new(-12.0, -10.0).map_err(|e| e.to_string())?;
    let (beta, _) = analytic_beta(-12.0).ok_or("no analytic root")?;
    let seed = vec![(-12.0 / beta - 1.0).ln(), beta];
    let c = node_solve(1, &w, 16, 10, &seed, End::Left).map_err(|e| e.to_string())?;
    let cert = certify_curve(&c, 1e-2);
    let r = cert.r_star().ok_or_else(|| format!("{:?}", cert.reason))?;
    ensure(cert.verified && r <= 1e-6, || format!("r_star = {r:e}"))?;
    for i in 0..10 {
        let alpha = -1.0 + 2.0 * i as f64 / 9.0;
        let kappa = w.kappa_at(alpha);
        // Closed form, β < −4 branch: β = (κ − √(κ² + 8κ))/2.
        let exact = (kappa - (kappa * kappa + 8.0 * kappa).sqrt()) / 2.0;
        let enc = cert.beta_enclosure(alpha).map_err(|e| e.to_string())?;
        ensure(enc.contains(exact), || {
            format!("kappa {kappa}: {exact} not in {enc}")
        })?;
    }
    ensure((beta - (-6.0 - 2.0 * 3f64.sqrt())).abs() < 1e-14, || {
        "kappa = -12 root".into()
    })?;
    Ok(format!(
        "r_star = {r:.2e}, 10 samples contain the closed-form root"
    ))
}

fn c7_p2_curves() -> Check {
    let w = Window::new(-16.0, -13.0).map_err(|e| e.to_string())?;
    let seeds = pdcurve::extended_seeds(2, -16.0, 200).map_err(|e| e.to_string())?;
    ensure(!seeds.is_empty(), || "no seeds".into())?;
    let mut radii = Vec::new();
    for seed in &seeds {
        let c = node_solve(2, &w, 16, 10, seed, End::Left).map_err(|e| e.to_string())?;
        let cert = certify_curve(&c, 1e-2);
        let r = cert.r_star().ok_or_else(|| format!("{:?}", cert.reason))?;
        ensure(cert.verified && r <= 1e-3, || {
            format!("beta {}: r_star {r:e}", seed[3])
        })?;
        radii.push(r);
    }
    let windows: Vec<Window> = (0..6)
        .map(|j| Window::new(-16.0 - 3.0 * j as f64, -13.0 - 3.0 * j as f64).unwrap())
        .collect();
    let mut pieces = Vec::new();
    for seed in &seeds {
        let chain = pdcurve::follow_branch(2, &windows, -16.0, seed, &CurveOptions::default())
            .map_err(|e| e.to_string())?;
        ensure(pdcurve::chain_covers(&chain, -31.0, -13.0), || {
            format!("chain from beta {} does not cover", seed[3])
        })?;
        pieces.push(chain.len());
    }
    let below_target = radii.iter().filter(|&&r| r <= 1e-4).count();
    Ok(format!(
        "{} curves, r_star {:?} ({below_target} at or below 1e-4), chains of {pieces:?} pieces cover [-31, -13]",
        seeds.len(),
        radii.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>()
    ))
}

fn c8_census() -> Check {
    let base = SweepConfig {
        grid: vec![Axis::new("mu", 3.4, 4.0, 0.05)],
        p_max: 6,
        budget: 32,
        seed: 5,
        ..Default::default()
    };
    let one = run_sweep(&SweepConfig {
        workers: Some(1),
        ..base.clone()
    })
    .map_err(|e| e.to_string())?;
    let four = run_sweep(&SweepConfig {
        workers: Some(4),
        ..base.clone()
    })
    .map_err(|e| e.to_string())?;
    ensure(one == four, || {
        "worker count changes the logistic census".into()
    })?;
    let pp = SweepConfig {
        grid: vec![
            Axis::new("beta", -6.0, -2.0, 1.0),
            Axis::new("kappa", -14.0, -6.0, 2.0),
        ],
        p_max: 4,
        budget: 16,
        ..SweepConfig::predprey_default()
    };
    let pp1 = run_sweep(&SweepConfig {
        workers: Some(1),
        ..pp.clone()
    })
    .map_err(|e| e.to_string())?;
    let pp3 = run_sweep(&SweepConfig {
        workers: Some(3),
        ..pp.clone()
    })
    .map_err(|e| e.to_string())?;
    ensure(pp1 == pp3, || {
        "worker count changes the predator-prey census".into()
    })?;

    for out in [&one, &pp1] {
        let mut buf = Vec::new();
        sweep::write_archive(&mut buf, &out.archive).map_err(|e| e.to_string())?;
        let back = sweep::read_archive(buf.as_slice()).map_err(|e| e.to_string())?;
        let (rows, rejected) = recount(&back).map_err(|e| e.to_string())?;
        ensure(rejected.is_empty(), || {
            format!("{} certificates did not re-verify", rejected.len())
        })?;
        ensure(rows == sweep::nonzero_rows(&out.rows), || {
            "recount differs from census".into()
        })?;
    }

    let mus = ["3.2", "3.5", "3.57", "3.83", "3.99"];
    let totals = mus
        .iter()
        .map(|mu| {
            let cfg = SweepConfig {
                grid: vec![Axis::single("mu", mu.parse().unwrap())],
                p_max: 8,
                ..Default::default()
            };
            run_sweep(&cfg)
                .map(|o| o.total_orbits())
                .map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    ensure(totals.windows(2).all(|w| w[0] <= w[1]), || {
        format!("counts over {mus:?}: {totals:?}")
    })?;
    Ok(format!(
        "{} + {} orbits reproduced across worker counts and recounts; orbits (p <= 8) over {mus:?}: {totals:?}",
        one.total_orbits(),
        pp1.total_orbits()
    ))
}

// ---------------------------------------------------------------------------
// Kernel suites.

const PREC: usize = 320;
/// Wide enough that every sum and product below is exact.
const EXACT: usize = 2048;

fn big(x: f64) -> BigFloat {
    BigFloat::from_f64(x, 64)
}

fn add(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.add(b, EXACT, RoundingMode::ToEven)
}

fn sub(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.sub(b, EXACT, RoundingMode::ToEven)
}

fn mul(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.mul(b, EXACT, RoundingMode::ToEven)
}

fn encloses(iv: Interval, v: &BigFloat) -> bool {
    !v.is_nan() && big(iv.lo()) <= *v && *v <= big(iv.hi())
}

fn random_float(rng: &mut ChaCha8Rng, max_exp: i32) -> f64 {
    let m: f64 = rng.gen_range(1.0..2.0);
    let e = rng.gen_range(-max_exp..=max_exp);
    let s = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
    if rng.gen_ratio(1, 20) {
        0.0
    } else {
        s * m * 2f64.powi(e)
    }
}

fn random_interval(rng: &mut ChaCha8Rng, max_exp: i32) -> Interval {
    let a = random_float(rng, max_exp);
    if rng.gen_ratio(1, 4) {
        return Interval::point(a);
    }
    let b = if rng.gen_bool(0.5) {
        random_float(rng, max_exp)
    } else {
        a + rng.gen_range(0.0..1e-6) * a.abs().max(1.0)
    };
    Interval::new(a.min(b), a.max(b)).unwrap()
}

fn sample(rng: &mut ChaCha8Rng, x: Interval) -> f64 {
    match rng.gen_range(0..4) {
        0 => x.lo(),
        1 => x.hi(),
        _ => (x.lo() + rng.gen_range(0.0..1.0) * (x.hi() - x.lo())).clamp(x.lo(), x.hi()),
    }
}

fn containment_case(seed: u64, cc: &mut Consts) -> Result<(), String> {
    let rng = &mut ChaCha8Rng::seed_from_u64(seed);
    let rm = RoundingMode::ToEven;
    let x = random_interval(rng, 40);
    let y = random_interval(rng, 40);
    let (a, b) = (sample(rng, x), sample(rng, y));
    let (ba, bb) = (big(a), big(b));
    let fail = |op: &str| format!("case {seed}: {op} with x = {x:?} ∋ {a:e}, y = {y:?} ∋ {b:e}");
    ensure(encloses(x + y, &add(&ba, &bb)), || fail("add"))?;
    ensure(encloses(x - y, &sub(&ba, &bb)), || fail("sub"))?;
    ensure(encloses(x * y, &mul(&ba, &bb)), || fail("mul"))?;
    ensure(encloses(x.sqr(), &mul(&ba, &ba)), || fail("sqr"))?;
    ensure(encloses(x.powi(3), &mul(&mul(&ba, &ba), &ba)), || {
        fail("powi")
    })?;
    if !y.contains_zero() {
        let q = x.div(y).map_err(|e| e.to_string())?;
        ensure(encloses(q, &ba.div(&bb, PREC, rm)), || fail("div"))?;
    }
    let pos = x.abs();
    let c = sample(rng, pos);
    ensure(
        encloses(
            pos.sqrt().map_err(|e| e.to_string())?,
            &big(c).sqrt(PREC, rm),
        ),
        || fail("sqrt"),
    )?;
    if pos.lo() > 0.0 {
        let l = pos.ln().map_err(|e| e.to_string())?;
        ensure(encloses(l, &big(c).ln(PREC, rm, cc)), || fail("ln"))?;
    }
    let small = Interval::new(x.lo().clamp(-600.0, 600.0), x.hi().clamp(-600.0, 600.0)).unwrap();
    let d = sample(rng, small);
    ensure(
        encloses(
            small.exp().map_err(|e| e.to_string())?,
            &big(d).exp(PREC, rm, cc),
        ),
        || fail("exp"),
    )?;

    let pairs: Vec<(f64, f64)> = (0..rng.gen_range(1..8))
        .map(|_| (random_float(rng, 30), random_float(rng, 30)))
        .collect();
    let exact = pairs
        .iter()
        .fold(BigFloat::from_f64(0.0, 64), |acc, &(p, q)| {
            add(&acc, &mul(&big(p), &big(q)))
        });
    let (lo, hi) = (
        round::dot_down(pairs.iter().copied()),
        round::dot_up(pairs.iter().copied()),
    );
    ensure(big(lo) <= exact && exact <= big(hi), || {
        format!("case {seed}: dot product {pairs:?}")
    })
}

fn random_seq(rng: &mut ChaCha8Rng) -> ChebSeq {
    let n = rng.gen_range(0..12);
    let coeffs: Vec<f64> = (0..=n)
        .map(|_| rng.gen_range(-2.0..2.0) * 10f64.powi(-rng.gen_range(0..4)))
        .collect();
    if rng.gen_bool(0.3) {
        ChebSeq::new(coeffs.iter().map(|&c| Interval::ball(c, 1e-9)).collect())
    } else {
        ChebSeq::from_points(&coeffs)
    }
}

/// Convolution of the midpoints in `ψ₀ + 2Σψ_k T_k` form, exactly.
fn exact_convolution(a: &[f64], b: &[f64]) -> Vec<BigFloat> {
    let (m, n) = (a.len() as isize - 1, b.len() as isize - 1);
    (0..=m + n)
        .map(|k| {
            (-n..=n)
                .filter(|j| (k - j).abs() <= m)
                .fold(BigFloat::from_f64(0.0, 64), |acc, j| {
                    add(
                        &acc,
                        &mul(&big(a[(k - j).unsigned_abs()]), &big(b[j.unsigned_abs()])),
                    )
                })
        })
        .collect()
}

fn submultiplicative_case(seed: u64) -> Result<(), String> {
    let rng = &mut ChaCha8Rng::seed_from_u64(seed);
    let (psi, phi) = (random_seq(rng), random_seq(rng));
    let prod = psi.mul(&phi);
    ensure(prod.norm().lo() <= (psi.norm() * phi.norm()).hi(), || {
        format!("pair {seed}: norm inequality")
    })?;
    let mids = |s: &ChebSeq| s.coeffs().iter().map(|c| c.mid()).collect::<Vec<_>>();
    let exact = exact_convolution(&mids(&psi), &mids(&phi));
    ensure(
        exact
            .iter()
            .enumerate()
            .all(|(k, e)| encloses(prod.coeff(k), e)),
        || format!("pair {seed}: coefficients"),
    )
}

fn domination_case(seed: u64) -> Result<(), String> {
    let rng = &mut ChaCha8Rng::seed_from_u64(seed);
    let psi = ChebSeq::from_points(
        &(0..=rng.gen_range(0..16))
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect::<Vec<_>>(),
    );
    let alpha: f64 = if rng.gen_ratio(1, 10) {
        [-1.0, 1.0][rng.gen_range(0..2)]
    } else {
        rng.gen_range(-1.0..1.0)
    };
    // Three-term recurrence for T_k(α), exact at this precision.
    let two_alpha = big(2.0 * alpha);
    let (mut t_prev, mut t) = (big(1.0), big(alpha));
    let mut value = big(psi.coeff(0).mid());
    for k in 1..=psi.degree() {
        value = add(&value, &mul(&big(2.0 * psi.coeff(k).mid()), &t));
        let next = sub(&mul(&two_alpha, &t), &t_prev);
        t_prev = std::mem::replace(&mut t, next);
    }
    let norm = psi.norm();
    ensure(value.abs() <= big(norm.hi()), || {
        format!("sample {seed}: |ψ(α)| exceeds the norm")
    })?;
    let enc = psi
        .eval(Interval::point(alpha))
        .map_err(|e| e.to_string())?;
    ensure(encloses(enc, &value), || {
        format!("sample {seed}: evaluation enclosure misses ψ({alpha})")
    })
}

fn c9_kernel() -> Check {
    let containment: Vec<String> = (0..100_000u64)
        .into_par_iter()
        .map_init(
            || Consts::new().expect("constants"),
            |cc, s| containment_case(s, cc).err(),
        )
        .flatten()
        .collect();
    let submult: Vec<String> = (0..10_000u64)
        .into_par_iter()
        .filter_map(|s| submultiplicative_case(s).err())
        .collect();
    let domination: Vec<String> = (0..100_000u64)
        .into_par_iter()
        .filter_map(|s| domination_case(s).err())
        .collect();
    let violations = containment.len() + submult.len() + domination.len();
    ensure(violations == 0, || {
        let first = containment
            .iter()
            .chain(&submult)
            .chain(&domination)
            .next()
            .cloned()
            .unwrap_or_default();
        format!("{violations} violations, first: {first}")
    })?;
    Ok("1e5 containment cases, 1e4 product pairs, 1e5 C0 samples, no violations".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Check); 9] = [
        ("walkthrough bounds", 1, c1_walkthrough),
        ("refined period-2 radius", 1, c2_refined),
        ("period-3 orbit", 10, c3_period_three),
        ("bisection oracle bijection", 60, c4_oracle_bijection),
        ("predator-prey pointwise", 10, c5_predprey_pointwise),
        ("p = 1 doubling curve", 30, c6_p1_curve),
        ("p = 2 doubling curves", 600, c7_p2_curves),
        ("census determinism and recount", 900, c8_census),
        ("kernel property suites", 60, c9_kernel),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let verdict = match result {
            Ok(_) if elapsed > Duration::from_secs(limit) => {
                Err(format!("took {elapsed:.1?}, limit {limit} s"))
            }
            other => other,
        };
        let (tag, detail) = match &verdict {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += verdict.is_err() as usize;
        println!(
            "criterion {}: {tag} [{name}] ({:.2} s) {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
