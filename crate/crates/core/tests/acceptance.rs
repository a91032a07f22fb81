//! Acceptance gate. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use fracmax::grid::{indicator, make_corpus, standard_corpus};
use fracmax::maxop::{check_cube_lemma, maximal, maximal_commutator};
use fracmax::oscfun::{
    check_commutator_identity, check_ef_balance, check_nclip3_chain, check_oscillation_bound,
    check_pointwise_domination, sup_functional, sup_functional_over, DominationTarget,
};
use fracmax::varlex::{
    check_chi_embedding, check_chi_product, check_holder, check_power_identity, conjugate,
    luxemburg_norm, luxemburg_raw, modular,
};
use fracmax::verify::{
    discriminate, standard_probes, ExperimentConfig, Thresholds, Verdict, VerdictReport,
};
use fracmax::{
    CommutatorMode, Cube, CubeFamily, Domain, Exponent, FracParams, GridFunction,
    OscFunctionalSpec, OscKind, Result, Symbol,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type D = Domain<f64>;
type G = GridFunction<f64>;

/// Outcome of one criterion: pass flag and a one-line summary.
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

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn random_grid(rng: &mut ChaCha8Rng, dom: &D, signed: bool) -> G {
    let lo = if signed { -1.0 } else { 0.0 };
    let samples = (0..dom.len()).map(|_| rng.gen_range(lo..1.0)).collect();
    GridFunction::new(dom.clone(), samples).unwrap()
}

/// Full corpus: the standard symbols plus the power singularity.
fn corpus() -> Vec<Symbol> {
    let mut c = standard_corpus(0.5);
    c.push(Symbol::PowerSing { delta: 0.25 });
    c
}

fn eligible(fam: &CubeFamily, dom: &D) -> Vec<Cube> {
    fam.cubes(dom)
        .into_iter()
        .filter(|q| fam.is_replacement_closed_for(q))
        .collect()
}

fn ac1_cube_lemma() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let gammas = [0.0, 0.25, 0.5];
    let mut worst = 0.0f64;
    let mut ok = true;
    let doms = [D::symmetric(1, 1.0, 128)?, D::symmetric(2, 1.0, 128)?];
    for k in 0..200 {
        let dom = &doms[k % 2];
        let fam = CubeFamily::dyadic(dom);
        let cubes = fam.cubes(dom);
        let q = cubes[rng.gen_range(0..cubes.len())];
        let f = random_grid(&mut rng, dom, true);
        let gp = FracParams::new(gammas[k % 3])?;
        let r = check_cube_lemma(&f, &q, &gp, &fam)?;
        let scale = r.tolerance / 1e-12;
        worst = worst.max(r.restriction_deviation.max(r.indicator_deviation) / scale);
        ok &= r.pass;
    }
    let mut chi_worst = 0.0f64;
    for dom in &doms {
        let fam = CubeFamily::dyadic(dom);
        let n = dom.dim() as f64;
        let cubes = fam.cubes(dom);
        for &g in &gammas {
            let gp = FracParams::new(g)?;
            for _ in 0..40 {
                let q = cubes[rng.gen_range(0..cubes.len())];
                let m = maximal(&indicator(&q, dom)?, &gp, &fam)?;
                let want = q.measure(dom).powf(g / n);
                for i in q.cells(dom) {
                    chi_worst = chi_worst.max(rel(m.samples()[i], want));
                }
            }
        }
    }
    let pass = ok && worst <= 1e-12 && chi_worst <= 1e-12;
    Ok(outcome(
        pass,
        format!(
            "cube lemma: 200 pairs, max rel dev {worst:.2e} (tol 1e-12); M_g(chi_Q)=|Q|^(g/n) rel dev {chi_worst:.2e}"
        ),
    ))
}

fn ac2_commutator_identity() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut count = 0usize;
    for n in [64, 128] {
        let dom = D::symmetric(1, 1.0, n)?;
        let fam = CubeFamily::dyadic(&dom);
        let cubes = eligible(&fam, &dom);
        for sym in corpus() {
            let b = make_corpus(&sym, &dom)?;
            for alpha in [0.1, 0.25, 0.5] {
                for q in &cubes {
                    let r = check_commutator_identity(&b, q, alpha, &fam)?;
                    worst = worst.max(r.max_deviation / r.tolerance * 1e-10);
                    ok &= r.pass;
                    count += 1;
                }
            }
        }
    }
    Ok(outcome(
        ok,
        format!("commutator identity: {count} (symbol, alpha, cube, N) cases, worst scaled dev {worst:.2e} (tol 1e-10)"),
    ))
}

fn ac3_ef_chain() -> Result<Outcome> {
    let (mut ef_ok, mut chain_ok, mut osc_ok) = (true, true, true);
    let (mut worst_balance, mut worst_margin, mut worst_osc) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    let mut failures = Vec::new();
    for dom in [D::symmetric(1, 1.0, 128)?, D::symmetric(2, 1.0, 32)?] {
        let fam = CubeFamily::dyadic(&dom);
        let cubes = eligible(&fam, &dom);
        for sym in corpus() {
            let b = make_corpus(&sym, &dom)?;
            for q in &cubes {
                for gamma in [0.0, 0.25] {
                    let r = check_ef_balance(&b, q, gamma, &fam)?;
                    if r.balance_tolerance > 0.0 {
                        worst_balance =
                            worst_balance.max(r.balance_deviation / r.balance_tolerance * 1e-12);
                    }
                    worst_margin = worst_margin.max(r.pointwise_margin);
                    if !r.pass {
                        failures.push(format!("ef {sym} dim {}", dom.dim()));
                    }
                    ef_ok &= r.pass;
                    let o = check_oscillation_bound(&b, q, 0.5, gamma, &fam)?;
                    if let Some(ratio) = o.ratio {
                        worst_osc = worst_osc.max(ratio);
                    }
                    osc_ok &= o.pass;
                }
                let c = check_nclip3_chain(&b, q, 0.25, &fam)?;
                chain_ok &= c.pass;
            }
        }
    }
    failures.dedup();
    let pass = ef_ok && chain_ok && osc_ok;
    let mut detail = format!(
        "E/F balance worst rel {worst_balance:.2e} (tol 1e-12), pointwise margin {worst_margin:.2e}; chain {}; osc bound worst lhs/rhs {worst_osc:.3} (<= 1)",
        if chain_ok { "ok" } else { "violated" }
    );
    if !failures.is_empty() {
        detail.push_str(&format!("; failing: {}", failures.join(", ")));
    }
    Ok(outcome(pass, detail))
}

fn ac4_domination() -> Result<Outcome> {
    let mut ok = true;
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0;
    for dom in [D::symmetric(1, 1.0, 128)?, D::symmetric(2, 1.0, 32)?] {
        let fam = CubeFamily::dyadic(&dom);
        let probes = standard_probes(&dom)?;
        for beta in [0.3, 0.5] {
            let symbols = [
                Symbol::LipPos { beta },
                Symbol::Wedge,
                Symbol::RandomLipschitz { seed: 5 },
            ];
            for sym in &symbols {
                let b = make_corpus(sym, &dom)?;
                for alpha in [0.1, 0.25] {
                    for p in &probes {
                        let r = check_pointwise_domination(
                            &b,
                            &p.f,
                            alpha,
                            beta,
                            &fam,
                            DominationTarget::Both,
                        )?;
                        for c in r.to_check_reports() {
                            worst = worst.max(c.max_deviation / r.seminorm);
                        }
                        ok &= r.pass;
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(outcome(
        ok,
        format!("pointwise domination: {count} cases, worst margin / L = {worst:.3e} (tol 1e-10)"),
    ))
}

fn random_exponent(rng: &mut ChaCha8Rng, dom: &D) -> Result<Exponent<f64>> {
    let base: f64 = rng.gen_range(1.2..4.0);
    let amp = rng.gen_range(0.0..(base - 1.1).min(1.5));
    let freq = rng.gen_range(0.5..4.0);
    Exponent::from_fn(dom.clone(), move |x| base + amp * (freq * x[0]).sin())
}

fn ac5_variable_norms() -> Result<Outcome> {
    let mut notes = Vec::new();
    let mut pass = true;

    // Closed forms through the solver: |Q| from 2^-6 to 2^2.
    let dom = D::interval(0.0, 4.0, 256)?;
    let mut closed = 0.0f64;
    for p in [1.5, 2.0, 4.0] {
        let pe = Exponent::constant(dom.clone(), p)?;
        for side in [1usize, 2, 4, 8, 16, 32, 64, 128, 256] {
            let q = Cube::interval(0, side);
            let got = luxemburg_norm(&indicator(&q, &dom)?, &pe)?.value;
            closed = closed.max(rel(got, q.measure(&dom).powf(1.0 / p)));
        }
    }
    pass &= closed <= 1e-8;
    notes.push(format!("|chi_Q|_p rel dev {closed:.1e}"));

    // Unit ball: the modular of f/|f| is one.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut unit = 0.0f64;
    let doms = [
        D::symmetric(1, 2.0, 64)?,
        D::symmetric(1, 0.5, 100)?,
        D::symmetric(2, 1.0, 16)?,
    ];
    for k in 0..500 {
        let dom = &doms[k % 3];
        let p = random_exponent(&mut rng, dom)?;
        let f = random_grid(&mut rng, dom, true).scaled(10f64.powf(rng.gen_range(-3.0..3.0)))?;
        let nr = luxemburg_norm(&f, &p)?;
        let rho = modular(&f.scaled(1.0 / nr.value)?, &p)?;
        unit = unit.max((rho - 1.0).abs());
        pass &= rho <= 1.0 + 1e-12;
    }
    pass &= unit <= 1e-8;
    notes.push(format!("unit ball |rho-1| {unit:.1e}"));

    // Power identity and Hölder ratios.
    let mut power = 0.0f64;
    let mut holder_const = 0.0f64;
    let mut holder_var = 0.0f64;
    for k in 0..60 {
        let dom = &doms[k % 3];
        let p = random_exponent(&mut rng, dom)?;
        let f = random_grid(&mut rng, dom, true);
        let g = random_grid(&mut rng, dom, false);
        for r in [0.5, 1.5, 3.0] {
            let c = check_power_identity(&f, &p, r)?;
            pass &= c.pass;
            power = power.max(c.max_deviation);
        }
        let h = check_holder(&f, &g, &p)?;
        pass &= h.pass;
        holder_var = holder_var.max(h.ratio.unwrap_or(0.0));
        let pc = Exponent::constant(dom.clone(), p.p_minus())?;
        let h = check_holder(&f, &g, &pc)?;
        pass &= h.ratio.unwrap_or(0.0) <= 1.0 + 1e-8;
        holder_const = holder_const.max(h.ratio.unwrap_or(0.0));
    }
    notes.push(format!(
        "power dev {power:.1e}; Holder const {holder_const:.6} var {holder_var:.3}"
    ));

    // Chi product and embedding for constant p: exact, and through the solver.
    let dom = D::symmetric(1, 1.0, 128)?;
    let fam = CubeFamily::dyadic(&dom);
    let mut chi_const = 0.0f64;
    for p in [1.5, 2.0, 4.0] {
        let pe = Exponent::constant(dom.clone(), p)?;
        chi_const = chi_const.max((check_chi_product(&pe, &fam)?.sup_value - 1.0).abs());
        // The Sobolev shift needs p < n/gamma = 4.
        if p < 4.0 {
            chi_const = chi_const.max(
                (check_chi_embedding(&pe, &FracParams::new(0.25)?, &fam)?.sup_value - 1.0).abs(),
            );
        }
        let pp = conjugate(&pe)?;
        for q in fam.cubes(&dom) {
            let m = q.side;
            let h = dom.cell_measure();
            let a = luxemburg_raw(&vec![1.0; m], &vec![p; m], h)?.value;
            let b = luxemburg_raw(&vec![1.0; m], &vec![pp.p_minus(); m], h)?.value;
            chi_const = chi_const.max((a * b / q.measure(&dom) - 1.0).abs());
        }
    }
    pass &= chi_const <= 1e-8;

    // Log-Hölder exponent: the chi product is stable under refinement.
    let sups: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let d = D::symmetric(1, 1.0, n)?;
            Ok(check_chi_product(
                &Exponent::log_holder_default(d.clone())?,
                &CubeFamily::dyadic(&d),
            )?
            .sup_value)
        })
        .collect::<Result<_>>()?;
    let lo = sups.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = sups.iter().cloned().fold(0.0, f64::max);
    let stable = hi / lo <= 1.05 && sups.iter().all(|s| s.is_finite());
    pass &= stable;
    notes.push(format!(
        "chi const dev {chi_const:.1e}; log-Holder chi product {:.4}/{:.4}/{:.4} spread {:.4}",
        sups[0],
        sups[1],
        sups[2],
        hi / lo
    ));
    Ok(outcome(pass, notes.join("; ")))
}

fn ac6_fast_brute() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for k in 0..50 {
        let dom = if k % 5 == 4 {
            D::symmetric(2, 1.0, rng.gen_range(4..=16))?
        } else {
            D::symmetric(1, 1.0, rng.gen_range(8..=256))?
        };
        let fam = CubeFamily::dyadic(&dom).with_stride(1 + k % 3)?;
        let gp = FracParams::new([0.0, 0.25, 0.5][k % 3])?;
        let b = random_grid(&mut rng, &dom, true);
        let f = random_grid(&mut rng, &dom, true);
        let fast = maximal_commutator(&b, &f, &gp, &fam, CommutatorMode::Fast)?;
        let brute = maximal_commutator(&b, &f, &gp, &fam, CommutatorMode::Brute)?;
        for (a, c) in fast.samples().iter().zip(brute.samples()) {
            worst = worst.max((a - c).abs() / (1.0 + c.abs()));
        }
    }
    Ok(outcome(
        worst <= 1e-10,
        format!("FAST vs BRUTE: 50 pairs, max rel dev {worst:.2e} (tol 1e-10)"),
    ))
}

const LIP_BOXES: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];
const BMO_RESOLUTIONS: [usize; 5] = [32, 64, 128, 256, 512];

fn lip_study(kind: OscKind) -> Result<(VerdictReport, VerdictReport)> {
    let spec = OscFunctionalSpec::new(kind).with_alpha(0.25).with_beta(0.5);
    let pos = Symbol::LipPos { beta: 0.5 };
    let cfg = ExperimentConfig::new(
        kind.name(),
        pos.clone(),
        spec.clone(),
        vec![128],
        LIP_BOXES.to_vec(),
    );
    discriminate(&pos, &Symbol::LipSigned, &spec, &cfg)
}

fn bmo_study(kind: OscKind, sig: Symbol) -> Result<(VerdictReport, VerdictReport)> {
    let spec = OscFunctionalSpec::new(kind).with_alpha(0.25);
    let t = Thresholds {
        stable_rel: 0.15,
        growth_factor: 1.1,
    };
    let cfg = ExperimentConfig::new(
        kind.name(),
        Symbol::BmoPos,
        spec.clone(),
        BMO_RESOLUTIONS.to_vec(),
        vec![1.0],
    )
    .with_thresholds(t);
    discriminate(&Symbol::BmoPos, &sig, &spec, &cfg)
}

fn verdicts(r: &(VerdictReport, VerdictReport)) -> String {
    format!("({}, {})", r.0.verdict, r.1.verdict)
}

fn ac7_discrimination() -> Result<Outcome> {
    let want = |r: &(VerdictReport, VerdictReport)| {
        r.0.verdict == Verdict::Bounded && r.1.verdict == Verdict::Growing
    };
    let nc_lip = lip_study(OscKind::NcLip)?;
    let mc_lip = lip_study(OscKind::McLip)?;
    let nc_bmo = bmo_study(OscKind::NcBmo, Symbol::BmoSigned)?;
    let mc_bmo = bmo_study(OscKind::McBmo, Symbol::PowerSing { delta: 0.25 })?;
    let slope = nc_lip.1.log2_slopes.box_size.unwrap_or(f64::NAN);
    let slope_ok = (slope - 0.5).abs() <= 0.2;

    // Linear growth in log(1/h): equal increments per halving of h.
    let v: Vec<f64> = nc_bmo.1.values.iter().map(|row| row[0]).collect();
    let inc: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    let inc_spread =
        inc.iter().cloned().fold(0.0, f64::max) / inc.iter().cloned().fold(f64::INFINITY, f64::min);
    let linear = inc.iter().all(|&d| d > 0.0) && inc_spread <= 1.1;

    // Mean oscillation only sees |b - b_Q| and log|x| = -|log|x|| on the unit
    // box, so this pair cannot be told apart; reported for information.
    let mc_log = bmo_study(OscKind::McBmo, Symbol::BmoSigned)?;
    println!(
        "[INFO] AC7 mc-bmo on (|log|x||, log|x|): {} (both symbols have bounded mean oscillation)",
        verdicts(&mc_log)
    );

    let pass =
        want(&nc_lip) && want(&mc_lip) && want(&nc_bmo) && want(&mc_bmo) && slope_ok && linear;
    Ok(outcome(
        pass,
        format!(
            "nc-lip {} slope {slope:.3} (0.5 +- 0.2); mc-lip {}; nc-bmo {} increments spread {inc_spread:.3}; mc-bmo (|log|x||, |x|^-1/4) {}",
            verdicts(&nc_lip),
            verdicts(&mc_lip),
            verdicts(&nc_bmo),
            verdicts(&mc_bmo)
        ),
    ))
}

fn specs() -> Vec<OscFunctionalSpec<f64>> {
    OscKind::ALL
        .iter()
        .map(|&k| {
            let s = OscFunctionalSpec::new(k).with_alpha(0.25);
            let s = if k.is_lipschitz() {
                s.with_beta(0.5)
            } else {
                s
            };
            s.with_gamma_for_max(0.25)
        })
        .collect()
}

fn ac8_invariants() -> Result<Outcome> {
    let dom = D::symmetric(1, 1.0, 64)?;
    let dyadic = CubeFamily::dyadic(&dom);
    let strided = CubeFamily::dyadic(&dom).with_stride(4)?;
    let all = CubeFamily::all(&dom);
    let (mut hom, mut trans) = (0.0f64, 0.0f64);
    let mut mono = true;
    for sym in corpus() {
        let b = make_corpus(&sym, &dom)?;
        for spec in specs() {
            let base = sup_functional(&b, &spec, &dyadic)?.sup_value;
            let scaled = sup_functional(&b.scaled(3.7)?, &spec, &dyadic)?.sup_value;
            hom = hom.max((scaled - 3.7 * base).abs() / (1.0 + 3.7 * base));
            // Constants drop out of b - b_Q; the local maximal forms carry the
            // weight |Q'|^(a/n - 1) and do not commute with adding one.
            if spec.kind.is_mean_based() {
                let shifted = sup_functional(&b.shifted(1.25)?, &spec, &dyadic)?.sup_value;
                trans = trans.max((shifted - base).abs() / (1.0 + base));
            }
            let coarse = sup_functional_over(&b, &spec, &dyadic, &strided)?.sup_value;
            let full = sup_functional_over(&b, &spec, &dyadic, &all)?.sup_value;
            mono &= coarse <= base && base <= full;
        }
    }
    let pass = hom <= 1e-12 && trans <= 1e-12 && mono;
    Ok(outcome(
        pass,
        format!(
            "homogeneity rel dev {hom:.1e}, constant shift rel dev {trans:.1e} (tol 1e-12); family monotonicity {}",
            if mono { "holds" } else { "violated" }
        ),
    ))
}

type Criterion = fn() -> Result<Outcome>;

fn main() -> ExitCode {
    let criteria: [(&str, &str, Criterion); 8] = [
        ("AC1", "cube lemma", ac1_cube_lemma),
        ("AC2", "commutator identity", ac2_commutator_identity),
        ("AC3", "E/F balance and pointwise chain", ac3_ef_chain),
        ("AC4", "pointwise domination", ac4_domination),
        ("AC5", "variable-exponent norms", ac5_variable_norms),
        ("AC6", "FAST/BRUTE equivalence", ac6_fast_brute),
        ("AC7", "discrimination experiments", ac7_discrimination),
        ("AC8", "oscillation invariants", ac8_invariants),
    ];
    let mut failed = 0;
    for (id, title, run) in criteria {
        let t = Instant::now();
        let o = run().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        failed += usize::from(!o.pass);
        println!(
            "[{}] {id} {title}: {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
