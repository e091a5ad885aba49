//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lv4::{
    classify, diagram, fixed_point, get_preset, jacobian, Complex, EcoParams, Mat, StabilityClass,
    StateVec,
};
use lv4_validation::{det_minus, fd_jacobian, rel_diff};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

const FIG1_POINTS: [(&str, [f64; 4]); 6] = [
    ("fig1a", [3333.3, 1666.7, 277.78, 83.333]),
    ("fig1b", [1714.3, 2571.4, 140.82, 192.24]),
    ("fig1c", [1825.2, 1769.9, 132.84, 162.04]),
    ("fig1d", [833.33, 833.33, 450.76, 4507.6]),
    ("fig1e", [750.0, 1000.0, 2240.6, 2962.5]),
    ("fig1f", [750.0, 1000.0, 2240.6, 2962.5]),
];

fn eco(name: &str) -> EcoParams {
    get_preset(name).unwrap().eco.clone()
}

fn init(name: &str) -> StateVec {
    get_preset(name).unwrap().init.unwrap()
}

fn random_eco(rng: &mut ChaCha8Rng) -> EcoParams {
    let mut pair = |lo: f64, hi: f64| [rng.gen_range(lo..hi), rng.gen_range(lo..hi)];
    EcoParams {
        growth: pair(0.5, 2.0),
        capacity: pair(1e3, 1e5),
        search: pair(0.001, 0.05),
        dependency: pair(0.01, 0.5),
        efficiency: [pair(0.05, 3.0), pair(0.05, 3.0)],
        adaptation: [pair(0.2, 2.0), pair(0.2, 2.0)],
        conversion: [pair(0.005, 0.05), pair(0.005, 0.05)],
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> StateVec {
    StateVec::new(
        rng.gen_range(1.0..3000.0),
        rng.gen_range(1.0..3000.0),
        rng.gen_range(1.0..500.0),
        rng.gen_range(1.0..500.0),
    )
    .unwrap()
}

fn c1_fixed_points() -> Verdict {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for (name, want) in FIG1_POINTS {
        let c = eco(name).compile();
        let start = Instant::now();
        let fp = fixed_point(&c);
        slowest = slowest.max(start.elapsed());
        let got = fp.point.ok_or(format!("{name}: no fixed point"))?;
        for i in 0..4 {
            let e = rel_diff(got[i], want[i]);
            if e > 1e-3 {
                return Err(format!(
                    "{name} coordinate {i}: {} vs {} (rel {e:.2e})",
                    got[i], want[i]
                ));
            }
            worst = worst.max(e);
        }
    }
    if slowest >= Duration::from_millis(1) {
        return Err(format!("slowest solve took {slowest:?}"));
    }
    Ok(format!(
        "worst rel error {worst:.2e}, slowest solve {slowest:?}"
    ))
}

fn c2_convergence() -> Verdict {
    let c = eco("fig1a").compile();
    let target = fixed_point(&c).point.ok_or("no fixed point")?;
    let traj = c.simulate(StateVec::new(100.0, 100.0, 100.0, 100.0).unwrap(), 5000);
    if traj.generations() != 5000 {
        return Err(format!("run stopped at generation {}", traj.generations()));
    }
    let end = traj.final_state();
    let worst = (0..4)
        .map(|i| rel_diff(end.as_array()[i], target[i]))
        .fold(0.0, f64::max);
    if worst > 0.01 {
        return Err(format!(
            "final state {:?} is {worst:.2e} from {target:?}",
            end.as_array()
        ));
    }
    let cls = classify(&c);
    let eigen = cls.eigen.ok_or("no eigenvalues")?;
    if cls.class != StabilityClass::Stable || eigen.eigenvalues.iter().any(|z| z.norm() >= 1.0) {
        return Err(format!(
            "class {}, spectral radius {}",
            cls.class, eigen.spectral_radius
        ));
    }
    Ok(format!(
        "final rel error {worst:.2e}, spectral radius {:.6}",
        eigen.spectral_radius
    ))
}

fn c3_near_critical() -> Verdict {
    let mut radii = Vec::new();
    for name in ["fig1b", "fig1c", "fig1e"] {
        let cls = classify(&eco(name).compile());
        if !cls.fixed_point.positive {
            return Err(format!("{name}: fixed point not positive"));
        }
        let rho = cls
            .eigen
            .ok_or(format!("{name}: no eigenvalues"))?
            .spectral_radius;
        if !(rho > 1.0 - 1e-9 && rho < 1.15) {
            return Err(format!("{name}: spectral radius {rho}"));
        }
        radii.push(format!("{name} {rho:.6}"));
    }
    Ok(radii.join(", "))
}

fn c4_collapse_timing() -> Verdict {
    let f = eco("fig1f").compile().simulate(init("fig1f"), 2000);
    let rf = f.persistence(1e-6).map_err(|e| e.to_string())?;
    let e = eco("fig1e").compile().simulate(init("fig1e"), 2000);
    let re = e.persistence(1e-6).map_err(|e| e.to_string())?;
    let mut problems = Vec::new();
    match &rf.collapse {
        Some(c) if (400..=900).contains(&c.generation) => {}
        Some(c) => problems.push(format!(
            "fig1f collapses at generation {} ({} = {})",
            c.generation, c.species, c.value
        )),
        None => problems.push("fig1f never collapses".into()),
    }
    if !re.persisted() || re.generations < 2000 {
        problems.push(format!(
            "fig1e persisted only {} generations",
            re.generations
        ));
    }
    if problems.is_empty() {
        Ok(format!(
            "fig1f collapses at generation {}, fig1e persists {} generations",
            rf.collapse.unwrap().generation,
            re.generations
        ))
    } else {
        Err(problems.join("; "))
    }
}

fn c5_jacobian() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut draws, mut worst) = (0, 0.0f64);
    while draws < 50 {
        let c = random_eco(&mut rng).compile();
        let fp = fixed_point(&c);
        let (Some(x), true) = (fp.point, fp.positive) else {
            continue;
        };
        let j = jacobian(&c, &x).map_err(|e| e.to_string())?;
        let fd = fd_jacobian(&c, &x, 1e-4, 1e-6);
        for r in 0..4 {
            for k in 0..4 {
                let d = (j.get(r, k) - fd[r][k]).abs();
                if d > 1e-6 {
                    return Err(format!(
                        "draw {draws}: J[{r}][{k}] = {} vs {}",
                        j.get(r, k),
                        fd[r][k]
                    ));
                }
                worst = worst.max(d);
            }
        }
        draws += 1;
    }
    Ok(format!("50 draws, worst entry difference {worst:.2e}"))
}

fn c6_eigensolver() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for n in 0..200 {
        let a = Mat::from_fn(4, |_, _| rng.gen_range(-2.0..2.0)).unwrap();
        let ev = a.eigenvalues().map_err(|e| format!("matrix {n}: {e}"))?;
        let bound = 1e-8 * (1.0 + a.max_abs()).powi(4);
        for z in &ev {
            let d = det_minus(&a, *z).norm();
            if d >= bound {
                return Err(format!("matrix {n}: |det(A - {z} I)| = {d:.2e}"));
            }
            worst = worst.max(d / bound);
        }
        let mut unmatched: Vec<Complex> = ev.iter().filter(|z| z.im != 0.0).copied().collect();
        while let Some(z) = unmatched.pop() {
            let pos = unmatched.iter().position(|w| *w == z.conj());
            match pos {
                Some(p) => {
                    unmatched.swap_remove(p);
                }
                None => return Err(format!("matrix {n}: {z} has no conjugate partner")),
            }
        }
        let sum: Complex = ev.iter().sum();
        let tr = a.trace();
        if (sum - tr).norm() > 1e-8 * tr.abs().max(1.0) {
            return Err(format!("matrix {n}: eigenvalue sum {sum} vs trace {tr}"));
        }
    }
    Ok(format!(
        "200 matrices, worst det residual {worst:.2e} of bound"
    ))
}

fn c7_normalization() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 0..100 {
        let e = random_eco(&mut rng);
        let norm = e.normalize().map_err(|err| format!("draw {n}: {err}"))?;
        let (a, b) = (e.compile(), norm.compile());
        if a != b {
            return Err(format!("draw {n}: compiled coefficients differ"));
        }
        let x0 = random_state(&mut rng);
        let (ta, tb) = (a.simulate(x0, 100), b.simulate(x0, 100));
        let same = ta.states().len() == tb.states().len()
            && ta
                .states()
                .iter()
                .zip(tb.states())
                .all(|(s, t)| s.as_array().map(f64::to_bits) == t.as_array().map(f64::to_bits));
        if !same || ta.events() != tb.events() {
            return Err(format!("draw {n}: trajectories diverge"));
        }
    }
    Ok("100 draws, coefficients and trajectories bit-identical".into())
}

fn c8_subspaces() -> Verdict {
    let mut runs = 0;
    for p in lv4::scenarios::all_presets() {
        let base = p
            .init
            .unwrap_or(StateVec::new(100.0, 100.0, 100.0, 100.0).unwrap());
        let c = p.eco.compile();
        for mask in 1u8..16 {
            let mut x = *base.as_array();
            for (i, v) in x.iter_mut().enumerate() {
                if mask & (1 << i) != 0 {
                    *v = 0.0;
                }
            }
            let traj = c.simulate(StateVec::from_array(x).unwrap(), 1000);
            for (g, st) in traj.states().iter().enumerate() {
                for i in 0..4 {
                    if mask & (1 << i) != 0 && st.as_array()[i] != 0.0 {
                        return Err(format!(
                            "{} mask {mask:04b}: coordinate {i} nonzero at generation {g}",
                            p.name
                        ));
                    }
                }
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} runs of 1000 generations"))
}

fn c9_diagrams() -> Verdict {
    let g4 = diagram(&eco("fig4a"), 100).map_err(|e| e.to_string())?;
    let mut problems = Vec::new();
    let asym = (0..100)
        .flat_map(|i| (0..100).map(move |j| (i, j)))
        .filter(|&(i, j)| g4.get(i, j).class != g4.get(j, i).class)
        .count();
    if asym > 0 {
        problems.push(format!("fig4a has {asym} asymmetric cells"));
    }
    let g5 = diagram(&eco("fig5b"), 100).map_err(|e| e.to_string())?;
    let stable = g5.count(StabilityClass::Stable);
    let central = g5
        .cells()
        .iter()
        .filter(|c| c.class == StabilityClass::Stable && (0.45..=0.55).contains(&c.h1))
        .count();
    if stable == 0 {
        let min_rho = g5
            .cells()
            .iter()
            .filter_map(|c| c.spectral_radius)
            .fold(f64::INFINITY, f64::min);
        problems.push(format!(
            "fig5b has no stable cell (smallest spectral radius {min_rho:.6})"
        ));
    }
    if central > 0 {
        problems.push(format!(
            "fig5b has {central} stable cells with h1 in [0.45, 0.55]"
        ));
    }
    if problems.is_empty() {
        Ok(format!(
            "fig4a symmetric, fig5b has {stable} stable cells, none central"
        ))
    } else {
        Err(problems.join("; "))
    }
}

fn c10_performance() -> Verdict {
    let template = eco("fig4a");
    let start = Instant::now();
    let par = diagram(&template, 200).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let ser = lv4::stability::diagram_serial(&template, 200).map_err(|e| e.to_string())?;
    let identical = par.cells().iter().zip(ser.cells()).all(|(a, b)| {
        a.class == b.class
            && a.warning == b.warning
            && a.spectral_radius.map(f64::to_bits) == b.spectral_radius.map(f64::to_bits)
    });
    if !identical {
        return Err("parallel and serial diagrams differ".into());
    }
    if took >= Duration::from_secs(10) {
        return Err(format!("200x200 diagram took {took:?}"));
    }
    Ok(format!("200x200 diagram in {took:?}, identical to serial"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("fixed-point regression", c1_fixed_points),
        ("convergent scenario", c2_convergence),
        ("near-critical spectra", c3_near_critical),
        ("collapse timing", c4_collapse_timing),
        ("jacobian vs finite differences", c5_jacobian),
        ("eigensolver soundness", c6_eigensolver),
        ("normalization invariance", c7_normalization),
        ("subspace invariance", c8_subspaces),
        ("diagram symmetry", c9_diagrams),
        ("diagram performance", c10_performance),
    ];
    let mut failed = 0;
    for (n, (label, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("[PASS] criterion {:>2} {label}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {:>2} {label}: {detail}", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
