//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! report is always printed.

use std::time::{Duration, Instant};

use orbital_heat::graph::{
    absorbed_ray_return, build_mixed, build_star, decay_fit, poincare_random, poincare_sup, sobolev_report,
    spectral_sweep, walk_depth, walk_kernel, Component, GfModel, RadialModel, DEPTHS,
};
use orbital_heat::heat::{
    chopped_integrals, derivative_grid_check, gaussian_tail_check, injectivity_lower_bound, stieltjes_check,
    total_mass, upper_bound_table, CountingBound,
};
use orbital_heat::orbits::{brute_force_distances, enumerate_ball, Builtin, EnumerationConfig, OrbitBall};
use orbital_heat::PointH3;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ball(b: Builtin, x: &PointH3, y: &PointH3, r: f64) -> Result<OrbitBall, String> {
    let g = b.presentation().map_err(|e| e.to_string())?;
    let ball = enumerate_ball(&g, x, y, r, &EnumerationConfig::default()).map_err(|e| e.to_string())?;
    ball.require_complete().map_err(|e| e.to_string())?;
    Ok(ball)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn builtins() -> [Builtin; 3] {
    [Builtin::Trivial, Builtin::Cyclic { length: 1.0 }, Builtin::Schottky { length: 3.0 }]
}

fn stieltjes() -> Outcome {
    let j = PointH3::basepoint();
    let mut worst: f64 = 0.0;
    for b in builtins() {
        let ball = ball(b, &j, &j, 12.0)?;
        for t in [1.0, 2.0, 4.0] {
            worst = worst.max(stieltjes_check(&ball, t).map_err(|e| e.to_string())?.residual);
        }
    }
    check(worst <= 1e-10, format!("max relative residual {worst:.2e} (limit 1e-10)"))
}

fn derivatives() -> Outcome {
    let r = derivative_grid_check(50, 1e-5);
    check(
        r.dp3_max_rel <= 1e-6 && r.p5_max_rel <= 1e-5,
        format!("dp3 {:.2e} (limit 1e-6), p5 {:.2e} (limit 1e-5) on {} points", r.dp3_max_rel, r.p5_max_rel, r.points),
    )
}

fn completeness() -> Outcome {
    let mut worst: f64 = 0.0;
    for t in [0.5, 1.0, 2.0] {
        let q = total_mass(t, 1e-12).map_err(|e| e.to_string())?;
        worst = worst.max((q.value - 1.0).abs());
    }
    check(worst <= 1e-8, format!("max |mass - 1| = {worst:.2e} (limit 1e-8)"))
}

fn upper_bound() -> Outcome {
    let j = PointH3::basepoint();
    let rhos: Vec<f64> = (0..=24).map(|i| 4.0 + 0.25 * i as f64).collect();
    let mut parts = Vec::new();
    let mut ok = true;
    for b in builtins() {
        let g = b.presentation().map_err(|e| e.to_string())?;
        let inj = injectivity_lower_bound(&g, &j, 10.0).map_err(|e| e.to_string())?;
        let bound = CountingBound::new(&g, &j, &j, inj).map_err(|e| e.to_string())?;
        let mut sups = Vec::new();
        let mut tail: f64 = 0.0;
        for r in [12.0, 24.0] {
            let ball = ball(b, &j, &j, r)?;
            let rows = upper_bound_table(&ball, &bound, &rhos).map_err(|e| format!("{}: {e}", b.name()))?;
            sups.push(rows.last().map_or(f64::NAN, |r| r.running_sup));
            tail = tail.max(rows.iter().map(|r| r.kernel.tail_ratio()).fold(0.0, f64::max));
        }
        let change = (sups[1] - sups[0]).abs() / sups[0];
        ok &= change < 0.1 && tail < 1e-2;
        parts.push(format!("{} sup {:.4} change {:.1e} tail {:.1e}", b.name(), sups[1], change, tail));
    }
    check(ok, parts.join("; "))
}

fn gaussian_tail() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let r = gaussian_tail_check(k).map_err(|e| e.to_string())?;
        // independent value from the complementary error function
        let exact = 0.5 * std::f64::consts::PI.sqrt() * statrs::function::erf::erfc(0.5 * k);
        ok &= r.pass && r.lower <= exact && exact <= r.upper;
        parts.push(format!("k={k}: {:.5e} <= {:.5e}", r.upper, r.bound));
    }
    check(ok, parts.join(", "))
}

fn chopping() -> Outcome {
    let ts: Vec<f64> = (0..=12).map(|i| 10f64.powf(1.0 + 0.25 * i as f64)).collect();
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for alpha in [0.0, 0.5, 1.5] {
        for k in [2.0, 4.0] {
            for &t in &ts {
                if k > t.sqrt() {
                    skipped += 1;
                    continue;
                }
                let c = chopped_integrals(&|_rho: f64| t.powf(-alpha), t, k, alpha).map_err(|e| e.to_string())?;
                worst = worst.max(c.r1).max(c.r3);
            }
        }
    }
    check(
        worst <= 2.0,
        format!("max I1,I3 t^a / e^(-k^2/4) = {worst:.4} (constant 2); {skipped} points with k > sqrt(t) skipped"),
    )
}

fn poincare() -> Outcome {
    let mut ok = true;
    let mut worst_ratio: f64 = 0.0;
    for d in 1..=4usize {
        let g = build_star(d, 130).map_err(|e| e.to_string())?;
        let bound = 2.0 * (d as f64).powi(3);
        for r in [2, 4, 8, 16, 32, 64] {
            let p = poincare_sup(&g, 0, r).map_err(|e| e.to_string())?.value;
            let random = poincare_random(&g, 0, r, 10_000, 1000 * d as u64 + r as u64);
            ok &= p <= bound && random <= p;
            worst_ratio = worst_ratio.max(p / bound);
        }
    }
    check(ok, format!("max P / 2d^3 = {worst_ratio:.4}; 10^4 random quotients per ball stay below the eigenvalue"))
}

fn star_decay() -> Outcome {
    let n = 1usize << 14;
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [2, 3] {
        let g = build_star(d, walk_depth(n)).map_err(|e| e.to_string())?;
        let s = walk_kernel(&g, 0, 0, n).map_err(|e| e.to_string())?;
        let f = decay_fit(&s.values, (1 << 8, n as u64)).map_err(|e| e.to_string())?;
        ok &= (f.alpha - 0.5).abs() <= 0.05 && !s.warning;
        parts.push(format!("d={d} alpha {:.4} rms {:.1e}", f.alpha, f.rms));
    }
    check(ok, parts.join("; "))
}

fn mixed_decay() -> Outcome {
    let n = 1usize << 14;
    let mut ok = true;
    let mut parts = Vec::new();
    for gf in [GfModel::BinaryTree, GfModel::WeightedRay] {
        let m = RadialModel::mixed(1, 1, walk_depth(n), gf, 40).map_err(|e| e.to_string())?;
        let g = m.lumped().map_err(|e| e.to_string())?;
        let s = walk_kernel(&g, 0, 0, n).map_err(|e| e.to_string())?;
        let f = decay_fit(&s.values, (1 << 8, n as u64)).map_err(|e| e.to_string())?;
        ok &= (f.alpha - 1.5).abs() <= 0.1 && !s.warning;
        parts.push(format!("{gf:?} alpha {:.4}", f.alpha));
    }
    let a = absorbed_ray_return(n).map_err(|e| e.to_string())?;
    let f = decay_fit(&a.returns, (1 << 6, n as u64)).map_err(|e| e.to_string())?;
    ok &= (f.alpha - 1.5).abs() <= 0.1;
    parts.push(format!("absorbed ray alpha {:.4}", f.alpha));
    check(ok, parts.join("; "))
}

fn cubic_volume() -> Outcome {
    let r_max = 10_000;
    let g = build_mixed(1, 0, r_max, GfModel::BinaryTree).map_err(|e| e.to_string())?;
    let v = g.ball_measures(0, r_max);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (r, &mu) in v.iter().enumerate().skip(3) {
        let s = mu / (r as f64).powi(3);
        lo = lo.min(s);
        hi = hi.max(s);
    }
    check(lo >= 0.25 && hi <= 3.0, format!("mu(B(r)) / r^3 in [{lo:.4}, {hi:.4}] for r in [3, 1e4]"))
}

fn spectral() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for c in [Component::BinaryTree, Component::ExpRay] {
        let s = spectral_sweep(c, &DEPTHS).map_err(|e| e.to_string())?;
        ok &= s.extrapolated.iter().all(|&x| x > 0.0) && s.spread() <= 0.1;
        parts.push(format!("{c:?} {:.4}..{:.4} spread {:.3}", s.extrapolated[0], s.extrapolated[2], s.spread()));
    }
    let u = spectral_sweep(Component::UnitRay, &DEPTHS).map_err(|e| e.to_string())?;
    let slope = (u.raw[2] / u.raw[0]).ln() / (DEPTHS[2] as f64 / DEPTHS[0] as f64).ln();
    ok &= (slope + 2.0).abs() < 0.15;
    parts.push(format!("unit ray log-log slope {slope:.3}"));
    check(ok, parts.join("; "))
}

fn counting_oracles() -> Outcome {
    let j = PointH3::basepoint();
    let mut ok = true;
    for l in [0.5, 1.0, 2.0] {
        let b = ball(Builtin::Cyclic { length: l }, &j, &j, 20.0)?;
        for i in 0..=2000 {
            let rho = 0.01 * i as f64;
            // stay off the jumps, where the distance is only known to rounding
            if (rho / l - (rho / l).round()).abs() < 1e-9 {
                continue;
            }
            let n = b.orbital_count(rho).map_err(|e| e.to_string())?;
            ok &= n == 2 * (rho / l).floor() as usize + 1;
        }
    }
    let g = Builtin::Schottky { length: 3.0 }.presentation().map_err(|e| e.to_string())?;
    let mut sizes = Vec::new();
    for y in [j, PointH3::new(0.2, -0.1, 1.3).map_err(|e| e.to_string())?] {
        for r in [4.0, 6.0, 8.0] {
            let pruned = ball(Builtin::Schottky { length: 3.0 }, &j, &y, r)?;
            let brute = brute_force_distances(&g, &j, &y, r, 8);
            ok &= pruned.len() == brute.len()
                && pruned.distances.iter().zip(&brute).all(|(a, b)| (a - b).abs() <= 1e-9 * (1.0 + a));
            sizes.push(pruned.len());
        }
    }
    check(ok, format!("cyclic exact for l in 0.5,1,2, rho <= 20; Schottky pruned = brute force, sizes {sizes:?}"))
}

#[cfg(feature = "parallel")]
fn determinism() -> Outcome {
    let max = std::thread::available_parallelism().map_or(8, |n| n.get()).max(8);
    let run = || -> Result<String, String> {
        let j = PointH3::basepoint();
        let b = ball(Builtin::Schottky { length: 3.0 }, &j, &j, 18.0)?;
        let g = build_star(3, 40).map_err(|e| e.to_string())?;
        let rand = poincare_random(&g, 0, 16, 2000, 42);
        let sob = sobolev_report(&g, 0, 2.0, 6.0, &[1, 2, 4, 8], 8, 42).map_err(|e| e.to_string())?;
        let walk = walk_kernel(&g, 0, 0, 256).map_err(|e| e.to_string())?;
        let bits: Vec<String> = b
            .distances
            .iter()
            .chain(b.elements.iter().flat_map(|m| [&m.a.re, &m.a.im, &m.b.re, &m.b.im]))
            .map(|x| format!("{:016x}", x.to_bits()))
            .collect();
        Ok(format!(
            "{}|{:016x}|{:?}|{:?}",
            bits.join(""),
            rand.to_bits(),
            sob.rows.iter().map(|r| (r.bump.to_bits(), r.random.to_bits())).collect::<Vec<_>>(),
            walk.values.iter().map(|v| v.1.to_bits()).collect::<Vec<_>>()
        ))
    };
    let mut outputs = Vec::new();
    for threads in [1, 4, max] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        outputs.push(pool.install(run)?);
    }
    check(
        outputs.windows(2).all(|w| w[0] == w[1]),
        format!("bitwise identical enumeration, random trials and walks for 1, 4 and {max} threads"),
    )
}

#[cfg(not(feature = "parallel"))]
fn determinism() -> Outcome {
    Ok("sequential build: single thread only".into())
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("Stieltjes identity", stieltjes, Duration::from_secs(10)),
        ("Derivative correctness", derivatives, Duration::from_secs(5)),
        ("Stochastic completeness", completeness, Duration::from_secs(60)),
        ("Upper-bound ratio stability", upper_bound, Duration::from_secs(300)),
        ("Gaussian tail", gaussian_tail, Duration::from_secs(60)),
        ("Chopping bounds", chopping, Duration::from_secs(60)),
        ("Poincare constant", poincare, Duration::from_secs(120)),
        ("Star-graph decay", star_decay, Duration::from_secs(60)),
        ("Mixed-model decay", mixed_decay, Duration::from_secs(60)),
        ("Cubic weighted volume", cubic_volume, Duration::from_secs(60)),
        ("Spectral bottom", spectral, Duration::from_secs(60)),
        ("Counting oracles", counting_oracles, Duration::from_secs(60)),
        ("Determinism", determinism, Duration::from_secs(120)),
    ];
    let mut failures = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let (mark, detail) = match outcome {
            Ok(d) if took <= *budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took {took:.1?}, budget {budget:?}")),
            Err(d) => ("FAIL", d),
        };
        if mark == "FAIL" {
            failures += 1;
        }
        println!("[{mark}] {:>2}. {name}: {detail} ({:.2}s)", i + 1, took.as_secs_f64());
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
