//! End-to-end acceptance run: one PASS/FAIL line per criterion.

#[path = "../../core/tests/support/tensor.rs"]
mod tensor;

#[path = "../../core/tests/support/greens_oracle.rs"]
mod greens_oracle;

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shallowwell_cli::{commands, RunConfig};
use shallowwell_core::greens::{divergent_block, e4_finite_beta, greens_closed, GreensParams};
use shallowwell_core::oracles::{
    exact_poschl_teller, exact_square_well, gaussian_closed_coefficients, shooting_solve, weak_coupling_fit,
};
use shallowwell_core::perturbation::{self, correction, e4, AbsLink, Component};
use shallowwell_core::resummation::{pade, pade_with_asymptote};
use shallowwell_core::variational::{minimize, TrialKind};
use shallowwell_core::{energy_series, ClusterTerm, EnergySeries, Potential, QuadratureGrid};

/// Cannot pass as stated: over s in [0.01, 0.05] a degree-6 polynomial has
/// to absorb the s⁷, s⁸, … terms, which moves the fitted c₆ by tens of
/// percent. The check still runs and reports FAIL; the same fit at degree
/// 10 is shown alongside.
const KNOWN_UNATTAINABLE: &[usize] = &[5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel(got: f64, want: f64) -> f64 {
    (got / want - 1.0).abs()
}

fn series(p: &Potential) -> EnergySeries {
    energy_series(p, 6, &QuadratureGrid::for_potential(p).unwrap()).unwrap()
}

fn square_well_series() -> Outcome {
    let start = Instant::now();
    let es = series(&Potential::square_well(1.0, 1.0).unwrap());
    let secs = start.elapsed().as_secs_f64();
    let want = [-1.0, 4.0 / 3.0, -92.0 / 45.0, 1072.0 / 315.0, -84752.0 / 14175.0];
    let worst = (2..=6).map(|n| rel(es.coefficient(n), want[n - 2])).fold(0.0, f64::max);
    outcome(worst <= 1e-5 && secs <= 30.0, format!("max rel err {worst:.2e}, {secs:.2} s"))
}

fn gaussian_series() -> Outcome {
    let es = series(&Potential::gaussian(1.0).unwrap());
    #[allow(clippy::approx_constant)]
    let printed = [-0.785398, 1.11072, -1.89534, 3.56727, -7.1374];
    let tol = |n: usize| if n == 6 { 2e-3 } else { 1e-4 };
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for n in 2..=6 {
        let e = rel(es.coefficient(n), printed[n - 2]);
        pass &= e <= tol(n);
        worst = worst.max(e);
    }
    let (c4, c5, c6) = gaussian_closed_coefficients();
    let mut worst_closed: f64 = 0.0;
    for (n, c) in [(4, c4), (5, c5), (6, c6)] {
        let e = rel(es.coefficient(n), c);
        pass &= e <= tol(n);
        worst_closed = worst_closed.max(e);
    }
    outcome(
        pass,
        format!("vs printed max rel {worst:.2e}, vs closed forms max rel {worst_closed:.2e}"),
    )
}

fn small_s() -> Vec<f64> {
    (0..=40).map(|i| 0.01 + 0.001 * i as f64).collect()
}

fn poschl_teller_series() -> Outcome {
    let es = series(&Potential::poschl_teller(1.0).unwrap());
    let worst = (2..=6)
        .map(|n| rel(es.coefficient(n).abs(), [1.0, 2.0, 5.0, 14.0, 42.0][n - 2]))
        .fold(0.0, f64::max);
    let s = small_s();
    let e: Vec<f64> = s.iter().map(|&x| exact_poschl_teller(x).unwrap()).collect();
    let fit = weak_coupling_fit(&s, &e, 6).unwrap();
    let signs_agree = (2..=6).all(|n| fit[n].signum() == es.coefficient(n).signum());
    let signs: String = (2..=6).map(|n| if es.coefficient(n) < 0.0 { '-' } else { '+' }).collect();
    outcome(
        worst <= 1e-4 && signs_agree,
        format!(
            "max rel err of magnitudes {worst:.2e}; signs {signs} agree with the exact-energy fit: {signs_agree}; \
             the printed series has all signs negative"
        ),
    )
}

fn pade_reproduction() -> Outcome {
    let pa = pade_with_asymptote(&series(&Potential::gaussian(1.0).unwrap()), 1.0).unwrap();
    let num = [1.0, 2.60002, 1.2553];
    let den = [1.0, 3.38542, 2.80348, 0.336931];
    let worst = pa.numerator[1..]
        .iter()
        .zip(num)
        .chain(pa.denominator.iter().zip(den))
        .map(|(g, w)| rel(*g, w))
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-3 && pa.numerator[0] == 0.0 && pa.numerator.len() == 4,
        format!("max rel err {worst:.2e}"),
    )
}

type Shape = (&'static str, Potential, Box<dyn Fn(f64) -> f64>);

fn oracle_loop() -> Outcome {
    let s = small_s();
    let shapes: [Shape; 3] = [
        (
            "square_well",
            Potential::square_well(1.0, 1.0).unwrap(),
            Box::new(|x| exact_square_well(x, 1.0).unwrap()),
        ),
        (
            "poschl_teller",
            Potential::poschl_teller(1.0).unwrap(),
            Box::new(|x| exact_poschl_teller(x).unwrap()),
        ),
        (
            "gaussian",
            Potential::gaussian(1.0).unwrap(),
            Box::new(|x| shooting_solve(&Potential::gaussian(x).unwrap(), 1e-10).unwrap().energy),
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, p, exact) in &shapes {
        let es = series(p);
        let e: Vec<f64> = s.iter().map(|&x| exact(x)).collect();
        let worst = |degree| {
            let fit = weak_coupling_fit(&s, &e, degree).unwrap();
            (2..=6)
                .map(|n| (rel(fit[n], es.coefficient(n)), n))
                .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a })
        };
        let (w6, n6) = worst(6);
        let (w10, _) = worst(10);
        pass &= w6 <= 1e-3;
        parts.push(format!("{name}: degree 6 worst c{n6} rel {w6:.1e}, degree 10 worst rel {w10:.1e}"));
    }
    outcome(pass, parts.join("; "))
}

fn brute_force() -> Outcome {
    let p = Potential::gaussian(1.0).unwrap();
    let g = QuadratureGrid::for_potential(&p).unwrap();
    let v = |x: f64| p.evaluate(x);
    let mut pass = true;
    let mut worst4: f64 = 0.0;
    let mut worst5: f64 = 0.0;
    let mut count = 0;

    let mut seqs: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..4 {
        seqs = seqs
            .iter()
            .flat_map(|s| (1..=3).map(move |k| [s.clone(), vec![k]].concat()))
            .chain(seqs.iter().cloned())
            .collect();
        seqs.sort();
        seqs.dedup();
    }
    seqs.retain(|s| !s.is_empty());
    for links in &seqs {
        let got = perturbation::chain(&p, &g, links).unwrap();
        let (n_axis, tol) = if links.len() <= 3 { (24, 1e-4) } else { (16, 1e-3) };
        let e = rel(got, tensor::tensor_chain(&v, &vec![0; links.len() + 1], links, n_axis));
        pass &= e < tol;
        if links.len() <= 3 {
            worst4 = worst4.max(e)
        } else {
            worst5 = worst5.max(e)
        }
        count += 1;
    }

    let table = perturbation::table(6).unwrap();
    let mut comps: Vec<Component> = table
        .terms
        .iter()
        .enumerate()
        .flat_map(|(i, t)| t.components(i).unwrap())
        .collect();
    comps.sort();
    comps.dedup();
    for c in &comps {
        let sites = c.site_count();
        let (n_axis, tol) = if sites <= 4 { (24, 1e-4) } else { (16, 1e-3) };
        let want = tensor::tensor_component(&v, c, n_axis);
        let term = match c {
            Component::Moment(k) => ClusterTerm::new(1.into(), vec![*k], vec![]),
            Component::Chain { site_powers, link_powers } => ClusterTerm::new(
                1.into(),
                site_powers.clone(),
                link_powers
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| AbsLink::new(i, i + 1, k))
                    .collect(),
            ),
        };
        let got = perturbation::evaluate_term(&term, &p, &g).unwrap();
        if want.abs() < 1e-12 {
            // odd integrands vanish by parity
            pass &= got.abs() < 1e-12;
        } else {
            let e = rel(got, want);
            pass &= e < tol;
            if sites <= 4 {
                worst4 = worst4.max(e)
            } else {
                worst5 = worst5.max(e)
            }
        }
        count += 1;
    }
    outcome(
        pass,
        format!("{count} integrals; max rel err {worst4:.1e} (<= 4 sites, N=24), {worst5:.1e} (5 sites, N=16)"),
    )
}

fn divergence_cancellation() -> Outcome {
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for p in [Potential::gaussian(1.0).unwrap(), Potential::square_well(1.0, 1.0).unwrap()] {
        let h = p.compact_support().unwrap_or(6.0);
        let blk = divergent_block(&p, &QuadratureGrid::build(h, 6, 8).unwrap(), 0.01).unwrap();
        let r = blk.symmetrized.abs() / blk.magnitude;
        pass &= r <= 1e-8;
        worst = worst.max(r);
    }
    let p = Potential::gaussian(1.0).unwrap();
    let g = QuadratureGrid::for_potential(&p).unwrap();
    let exact = e4(&p, &g).unwrap();
    let betas = [0.02, 0.01, 0.005];
    let r: Vec<f64> = betas.iter().map(|&b| (e4_finite_beta(&p, &g, b).unwrap() - exact).abs()).collect();
    let (b0, b1, b2) = (betas[0], betas[1], betas[2]);
    let intercept = r[0] * b1 * b2 / ((b0 - b1) * (b0 - b2))
        + r[1] * b0 * b2 / ((b1 - b0) * (b1 - b2))
        + r[2] * b0 * b1 / ((b2 - b0) * (b2 - b1));
    // least-squares slope through the three points
    let mb = betas.iter().sum::<f64>() / 3.0;
    let mr = r.iter().sum::<f64>() / 3.0;
    let slope = betas.iter().zip(&r).map(|(b, r)| (b - mb) * (r - mr)).sum::<f64>()
        / betas.iter().map(|b| (b - mb).powi(2)).sum::<f64>();
    pass &= r[0] > r[1] && r[1] > r[2] && slope > 0.0 && intercept.abs() < 1e-4;
    outcome(
        pass,
        format!("block |sym|/magnitude {worst:.1e}; residuals {}, slope {slope:.3}, intercept {intercept:.1e}",
            r.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join("/")
        ),
    )
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = Vec::new();

    // homogeneity
    let mut worst_h: f64 = 0.0;
    for _ in 0..6 {
        let (s, w) = (rng.gen_range(0.05..3.0), rng.gen_range(0.3..2.0));
        let unit = Potential::square_well(1.0, w).unwrap();
        let scaled = Potential::square_well(s, w).unwrap();
        let g = QuadratureGrid::build(w, 16, 8).unwrap();
        for n in 2..=6 {
            let b = s.powi(n as i32) * correction(n, &unit, &g).unwrap();
            worst_h = worst_h.max((correction(n, &scaled, &g).unwrap() - b).abs() / b.abs());
        }
    }
    if worst_h > 1e-12 {
        failures.push(format!("homogeneity {worst_h:.1e}"));
    }

    // translation invariance
    let xs: Vec<f64> = (0..=4000).map(|i| -10.0 + i as f64 * 0.005).collect();
    let depth: Vec<f64> = xs.iter().map(|x| -(-x * x).exp()).collect();
    let centered = Potential::tabulated(xs.clone(), depth.clone()).unwrap();
    let shifted = Potential::tabulated(xs.iter().map(|x| x + 1.0).collect(), depth).unwrap();
    let g = QuadratureGrid::build(11.0, 176, 8).unwrap();
    let (sc, ss) = (energy_series(&centered, 6, &g).unwrap(), energy_series(&shifted, 6, &g).unwrap());
    for n in 2..=6 {
        let tol = 5.0 * (sc.error_estimates[n] + ss.error_estimates[n]).max(1e-12 * sc.coefficient(n).abs());
        if (sc.coefficient(n) - ss.coefficient(n)).abs() > tol {
            failures.push(format!("translation c{n}"));
        }
    }

    // variational upper bound
    let mut worst_v = f64::NEG_INFINITY;
    let shapes = [
        Potential::gaussian(1.0).unwrap(),
        Potential::poschl_teller(1.0).unwrap(),
        Potential::square_well(1.0, 1.0).unwrap(),
    ];
    for shape in &shapes {
        for s in [0.1, 0.5, 1.5, 3.0] {
            let p = shape.with_strength(s).unwrap();
            let g = QuadratureGrid::for_potential(&p).unwrap();
            let exact = shooting_solve(&p, 1e-10).unwrap().energy;
            for kind in [TrialKind::Gaussian, TrialKind::ExpSqrt] {
                worst_v = worst_v.max(exact - minimize(kind, &p, &g).unwrap().energy);
            }
        }
    }
    if worst_v >= 1e-9 {
        failures.push(format!("variational bound violated by {worst_v:.1e}"));
    }

    // Padé round trip
    let mut worst_p: f64 = 0.0;
    let gauss = series(&Potential::gaussian(1.0).unwrap());
    let pa = pade_with_asymptote(&gauss, 1.0).unwrap();
    for (n, t) in pa.taylor(6).iter().enumerate().skip(1) {
        worst_p = worst_p.max(rel(*t, gauss.coefficient(n)));
    }
    for _ in 0..200 {
        let c: Vec<f64> = (0..7).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let m = rng.gen_range(0..=3);
        let Ok(pa) = pade(&c, m, 6 - m) else { continue };
        let scale = pa.denominator.iter().map(|q| q.abs()).sum::<f64>() * c.iter().fold(1.0f64, |a, x| a.max(x.abs()));
        for k in 0..=6 {
            let r = (0..=(6 - m).min(k)).map(|j| pa.denominator[j] * c[k - j]).sum::<f64>()
                - pa.numerator.get(k).copied().unwrap_or(0.0);
            worst_p = worst_p.max(r.abs() / scale);
        }
    }
    if worst_p > 1e-10 {
        failures.push(format!("Padé round trip {worst_p:.1e}"));
    }

    // Green's function symmetry, parity and spectral representation
    let params = GreensParams::new(0.1, 0.5).unwrap();
    let mut worst_g: f64 = 0.0;
    for _ in 0..100 {
        let (a, b): (f64, f64) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let v = greens_closed(params, a, b).unwrap();
        let scale = v.abs().max(1.0);
        worst_g = worst_g.max((v - greens_closed(params, b, a).unwrap()).abs() / scale);
        worst_g = worst_g.max((v - greens_closed(params, -a, -b).unwrap()).abs() / scale);
    }
    if worst_g > 1e-12 {
        failures.push(format!("Green's symmetry {worst_g:.1e}"));
    }
    let mut worst_s: f64 = 0.0;
    for _ in 0..10 {
        let (beta, gamma) = (rng.gen_range(0.05..1.0), rng.gen_range(0.05..2.0));
        let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let closed = greens_closed(GreensParams::new(beta, gamma).unwrap(), a, b).unwrap();
        worst_s = worst_s.max((closed - greens_oracle::spectral_greens(beta, gamma, a, b)).abs());
    }
    if worst_s > 1e-6 {
        failures.push(format!("spectral {worst_s:.1e}"));
    }

    let detail = format!(
        "homogeneity {worst_h:.1e}, max bound violation {worst_v:.1e}, Padé {worst_p:.1e}, \
         symmetry {worst_g:.1e}, spectral {worst_s:.1e}"
    );
    if failures.is_empty() {
        outcome(true, detail)
    } else {
        outcome(false, format!("{detail}; failed: {}", failures.join(", ")))
    }
}

fn figure_reproduction() -> Outcome {
    let report = commands::compare(&RunConfig::default()).unwrap();
    let t = report.table("compare").unwrap();
    let col = |name: &str| -> Vec<f64> {
        let j = t.column(name).unwrap();
        t.rows.iter().map(|r| r[j].as_f64().unwrap_or(f64::NAN)).collect()
    };
    let (s, series, pade, var2, shoot) = (col("s"), col("series"), col("pade"), col("var_expsqrt"), col("shooting"));
    let worst_var = var2.iter().zip(&shoot).map(|(v, e)| rel(*v, *e)).fold(0.0, f64::max);
    let worst_pade = pade.iter().zip(&shoot).map(|(v, e)| rel(*v, *e)).fold(0.0, f64::max);
    let gap: Vec<f64> = (0..s.len())
        .filter(|&i| s[i] >= 1.0)
        .map(|i| (series[i] - shoot[i]).abs())
        .collect();
    let diverging = gap.windows(2).all(|w| w[1] > w[0]);
    outcome(
        worst_var <= 1e-2 && worst_pade <= 5e-2 && diverging && s.len() == 30,
        format!("var2 max rel {worst_var:.1e}, Padé max rel {worst_pade:.1e}, series gap increasing past s=1: {diverging}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("square-well series", square_well_series),
        ("Gaussian series", gaussian_series),
        ("Pöschl-Teller series", poschl_teller_series),
        ("Padé reproduction", pade_reproduction),
        ("oracle loop", oracle_loop),
        ("brute-force equivalence", brute_force),
        ("divergence cancellation", divergence_cancellation),
        ("property suites", property_suites),
        ("comparison sweep", figure_reproduction),
    ];
    let mut unexpected = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} {id} {name}: {} [{:.1} s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass && !KNOWN_UNATTAINABLE.contains(&id) {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
