//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use common::momentum_oracle::MomentumOracle;
use multimode_hom::biphoton::{bell_state, Aperture, BellState, BiphotonState, TwoPhotonPolarization};
use multimode_hom::bsa::{
    classify, outcome_distribution, run_monte_carlo, run_monte_carlo_with, AnalyzerSetup, BellClass,
    DetectorModel, PumpParity, Record,
};
use multimode_hom::hom::{
    dip_curve, BeamSplitter, CoherenceModel, CoincidenceMap, DelayScan, DetectionConfig, DetectionGeometry,
    Interferometer, MapMode, Port, ScanGrid,
};
use multimode_hom::modes::{hermite_poly, laguerre_poly, mode_power, BeamGeometry, PlaneQuadrature, TransverseMode};
use multimode_hom::oam::{
    classical_model_falsifier, default_candidate_family, lg_coincidence_profile, oam_decompose, CandidateFamily,
    FalsifierOptions, ProfileSpec, Truncation, Verdict, WeightMode,
};
use multimode_hom::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const Z_MM: f64 = 500.0;

/// Collects failed checks for one criterion.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn within(&mut self, elapsed: Duration, limit_s: f64) {
        let secs = elapsed.as_secs_f64();
        self.check(secs < limit_s, format!("runtime {secs:.1} s exceeds {limit_s} s"));
    }
}

fn geom() -> BeamGeometry {
    BeamGeometry::new(1.0, 351.0, 0.0).unwrap()
}

fn hg(m: u32, n: u32) -> TransverseMode {
    TransverseMode::hg(m, n, geom()).unwrap()
}

fn lg(p: u32, l: i32) -> TransverseMode {
    TransverseMode::lg(p, l, geom()).unwrap()
}

fn interf(pump: TransverseMode, pol: TwoPhotonPolarization) -> Interferometer {
    let state = BiphotonState::thin(pump, pol).unwrap();
    Interferometer::new(state, BeamSplitter::balanced(), DetectionGeometry::new(Z_MM).unwrap()).unwrap()
}

fn detection() -> DetectionGeometry {
    DetectionGeometry::new(Z_MM).unwrap()
}

fn cross(gamma: f64) -> MapMode {
    MapMode::Cross {
        analyzer_1: None,
        analyzer_2: None,
        gamma,
    }
}

fn scan(hom: &Interferometer, mode: MapMode, fixed: (f64, f64), grid: ScanGrid) -> CoincidenceMap {
    CoincidenceMap::scan(hom, mode, fixed, grid, &Aperture::point(), &Aperture::point()).unwrap()
}

fn criterion_1(c: &mut Checks) {
    let start = Instant::now();
    let singlet = bell_state(BellState::PsiMinus);
    let rows = [
        ("even/symmetric", hg(1, 0), TwoPhotonPolarization::hh(), true),
        ("odd/symmetric", hg(0, 1), TwoPhotonPolarization::hh(), false),
        ("even/antisymmetric", hg(1, 0), singlet, false),
        ("odd/antisymmetric", hg(0, 1), singlet, true),
    ];
    let axis: Vec<f64> = (0..21).map(|i| -2.0 + 0.2 * f64::from(i)).collect();
    let mut worst: f64 = 0.0;
    for (name, pump, pol, destructive) in rows {
        let hom = interf(pump, pol);
        let sign = if destructive { 1.0 } else { -1.0 };
        let mut max_rate: f64 = 0.0;
        let mut row_worst: f64 = 0.0;
        for &x in &axis {
            for &y in &axis {
                let r1 = (0.3, -0.4);
                let r2 = (x, y);
                let tt = hom.amplitude_tt(r1, r2).components;
                let rr = hom.amplitude_rr(r1, r2).components;
                for k in 0..4 {
                    row_worst = row_worst.max((tt[k] + sign * rr[k]).norm());
                }
                max_rate = max_rate.max(hom.coincidence_cross(r1, r2, None, None));
            }
        }
        c.check(row_worst < 1e-10, format!("{name}: |tt ± rr| = {row_worst:e}"));
        if destructive {
            c.check(max_rate < 1e-20, format!("{name}: coincidence {max_rate:e}"));
        }
        worst = worst.max(row_worst);
    }
    c.note(format!("worst |tt ± rr| = {worst:.1e}"));
    c.within(start.elapsed(), 5.0);
}

fn cross_visibility(pump: TransverseMode, pol: TwoPhotonPolarization) -> f64 {
    let det = DetectionConfig::Cross {
        analyzer_1: None,
        analyzer_2: None,
    };
    dip_curve(&interf(pump, pol), DelayScan::default(), det, CoherenceModel::default())
        .unwrap()
        .visibility
}

fn criterion_2(c: &mut Checks) {
    let start = Instant::now();
    let hh = TwoPhotonPolarization::hh();
    let singlet = bell_state(BellState::PsiMinus);
    let cases = [
        ("HG10 hh", hg(1, 0), hh, 1.0),
        ("HG01 hh", hg(0, 1), hh, -1.0),
        ("HG10 psi-", hg(1, 0), singlet, -1.0),
        ("HG01 psi-", hg(0, 1), singlet, 1.0),
    ];
    for (name, pump, pol, expected) in cases {
        let v = cross_visibility(pump, pol);
        c.check((v - expected).abs() < 1e-6, format!("{name}: visibility {v} (want {expected})"));
    }
    let mixed = TransverseMode::superposition(vec![
        (Complex64::new(FRAC_1_SQRT_2, 0.0), hg(1, 0)),
        (Complex64::new(FRAC_1_SQRT_2, 0.0), hg(0, 1)),
    ])
    .unwrap();
    let v = cross_visibility(mixed, hh);
    c.check(v.abs() < 1e-6, format!("undefined parity: visibility {v:e}"));
    c.note(format!("undefined-parity visibility {v:.1e}"));
    c.within(start.elapsed(), 5.0);
}

fn max_normalized_diff(a: &[f64], b: &[f64]) -> f64 {
    let pa = a.iter().copied().fold(0.0, f64::max);
    let pb = b.iter().copied().fold(0.0, f64::max);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x / pa - y / pb).abs())
        .fold(0.0, f64::max)
}

fn criterion_3(c: &mut Checks) {
    let start = Instant::now();
    let grid = ScanGrid::square(3.0, 41).unwrap();
    let fixed = (0.0, 0.0);
    for l in [1, 2] {
        let pump = lg(0, l);
        let hom = interf(pump.clone(), TwoPhotonPolarization::hh());
        let balanced = scan(&hom, cross(1.0), fixed, grid);
        let analytic: Vec<f64> = balanced
            .points()
            .map(|(x, y, _)| lg_coincidence_profile(&pump, detection(), fixed, (x, y)).unwrap())
            .collect();
        let d = max_normalized_diff(&balanced.values, &analytic);
        c.check(d < 1e-6, format!("LG(0,{l}) balanced: {d:e}"));
        c.note(format!("LG(0,{l}) balanced {d:.1e}"));

        let unbalanced = scan(&hom, cross(0.0), fixed, grid);
        let field = pump.propagated(Z_MM);
        let intensity: Vec<f64> = unbalanced
            .points()
            .map(|(x, y, _)| field.eval(0.5 * (fixed.0 + x), 0.5 * (fixed.1 + y)).norm_sqr())
            .collect();
        let d = max_normalized_diff(&unbalanced.values, &intensity);
        c.check(d < 1e-6, format!("LG(0,{l}) unbalanced: {d:e}"));
        c.note(format!("unbalanced {d:.1e}"));
    }
    c.within(start.elapsed(), 30.0);
}

fn criterion_4(c: &mut Checks) {
    let hom = interf(lg(0, 1), TwoPhotonPolarization::hh());
    // 0.25 mm steps so a 1 mm shift is four grid cells.
    let grid = ScanGrid::square(3.0, 25).unwrap();
    let shift = 4;
    for (name, mode) in [("balanced", cross(1.0)), ("direct", MapMode::Direct)] {
        let base = scan(&hom, mode, (0.0, 0.0), grid);
        let moved = scan(&hom, mode, (1.0, 1.0), grid);
        let peak = base.peak();
        let mut worst: f64 = 0.0;
        for iy in 0..grid.ny - shift {
            for ix in 0..grid.nx - shift {
                worst = worst.max((moved.value(ix, iy) - base.value(ix + shift, iy + shift)).abs());
            }
        }
        c.check(worst < 1e-8 * peak, format!("{name}: shifted difference {:e} of peak", worst / peak));
        c.note(format!("{name} {:.1e}", worst / peak));
    }
}

fn criterion_5(c: &mut Checks) {
    let start = Instant::now();
    for l in [0, 1, 2] {
        match oam_decompose(&lg(0, l), Truncation { l_max: 3, p_max: 2 }) {
            Ok(spec) => {
                let off = spec.max_off_rule();
                c.check(off < 1e-8, format!("l={l}: off-rule coefficient {off:e}"));
                c.check(
                    spec.doubling_change < 1e-6,
                    format!("l={l}: doubling change {:e}", spec.doubling_change),
                );
                c.note(format!("l={l} off-rule {off:.1e}"));
            }
            Err(e) => c.check(false, format!("l={l}: {e}")),
        }
    }
    c.within(start.elapsed(), 60.0);
}

fn criterion_6(c: &mut Checks) {
    let opts = FalsifierOptions::default();
    for l in [1, 2] {
        let report = classical_model_falsifier(&lg(0, l), &default_candidate_family(l, 3), detection(), &opts).unwrap();
        c.check(report.verdict == Verdict::Excluded, format!("l={l}: verdict {:?}", report.verdict));
        c.check(
            report.min_residual_on_locus > 1e-4,
            format!("l={l}: residual {:e}", report.min_residual_on_locus),
        );
        c.note(format!("l={l} residual {:.2}", report.min_residual_on_locus));
    }
    let degenerate = CandidateFamily {
        pairs: vec![(ProfileSpec::Zero, ProfileSpec::Lg { p: 0, l: 1 })],
        weights: WeightMode::Fixed(vec![1.0]),
    };
    let report = classical_model_falsifier(&lg(0, 1), &degenerate, detection(), &opts).unwrap();
    c.check(
        report.verdict == Verdict::NotExcluded { degenerate: true },
        format!("degenerate case: {:?}", report.verdict),
    );
}

fn same_port_curve(pump: TransverseMode, pol: TwoPhotonPolarization, a: f64, b: f64) -> (f64, f64, f64) {
    let det = DetectionConfig::SamePort {
        port: Port::One,
        analyzer_a: Some(a),
        analyzer_b: Some(b),
    };
    let curve = dip_curve(&interf(pump, pol), DelayScan::default(), det, CoherenceModel::default()).unwrap();
    let peak = curve.rates.iter().copied().fold(0.0, f64::max);
    (curve.visibility, curve.baseline, peak)
}

fn criterion_7(c: &mut Checks) {
    let singlet = bell_state(BellState::PsiMinus);
    let psi_plus = bell_state(BellState::PsiPlus);
    let hv = (0.0, FRAC_PI_2);
    let diag = (FRAC_PI_4, -FRAC_PI_4);
    for (basis, (a, b)) in [("h/v", hv), ("+/-", diag)] {
        let (v, _, _) = same_port_curve(hg(0, 1), singlet, a, b);
        c.check((v + 1.0).abs() < 1e-6, format!("odd psi- {basis}: visibility {v} (want -1, a peak)"));
    }
    let (v, _, _) = same_port_curve(hg(1, 0), psi_plus, hv.0, hv.1);
    c.check((v - 1.0).abs() < 1e-6, format!("even psi+ h/v: visibility {v} (want +1, a dip)"));
    let (_, base, peak) = same_port_curve(hg(1, 0), psi_plus, diag.0, diag.1);
    c.check(base.max(peak) < 1e-6, format!("even psi+ +/-: rate {:e}", base.max(peak)));
    let (v_odd, _, _) = same_port_curve(hg(0, 1), psi_plus, hv.0, hv.1);
    c.note(format!("odd psi+ h/v visibility {v_odd}"));

    let hom = interf(hg(0, 1), singlet);
    let a = (0.4, 0.3);
    let rates: Vec<f64> = [0.3, 0.1, 0.03, 0.01, 1e-3, 0.0]
        .iter()
        .map(|&d| hom.coincidence_same_port(Port::One, a, (a.0 + d, a.1 + d), None, None))
        .collect();
    let decreasing = rates.windows(2).all(|w| w[1] < w[0]);
    c.check(
        decreasing && rates[5] < 1e-20 * rates[0],
        format!("antibunching rates {rates:?}"),
    );
}

fn criterion_8(c: &mut Checks) {
    let bs = BeamSplitter::balanced();
    use multimode_hom::bsa::DetectorLabel::*;
    use multimode_hom::bsa::Signature as S;
    let expected = |state: BellState, parity: PumpParity| -> Vec<S> {
        let same_port_hv = vec![S::new(Ah, Av), S::new(Bh, Bv)];
        let cross_hv = vec![S::new(Ah, Bv), S::new(Av, Bh)];
        let mut v = match (state, parity) {
            (BellState::PsiMinus, PumpParity::Odd) | (BellState::PsiPlus, PumpParity::Even) => same_port_hv,
            (BellState::PsiPlus, PumpParity::Odd) | (BellState::PsiMinus, PumpParity::Even) => cross_hv,
            (_, PumpParity::Odd) => vec![S::new(Ah, Bh), S::new(Av, Bv)],
            (_, PumpParity::Even) => vec![S::new(Ah, Ah), S::new(Av, Av), S::new(Bh, Bh), S::new(Bv, Bv)],
        };
        v.sort();
        v
    };
    let gates = 100_000u64;
    let resolving = DetectorModel::uniform(1.0, 0.0, true, 2024).unwrap();
    let mut worst_sigma: f64 = 0.0;
    for parity in [PumpParity::Even, PumpParity::Odd] {
        for state in BellState::ALL {
            let dist = outcome_distribution(state, parity, bs).unwrap();
            c.check(
                dist.support() == expected(state, parity),
                format!("{state:?}/{parity:?}: support {:?}", dist.support()),
            );
            let tally = run_monte_carlo(state, parity, &resolving, gates).unwrap();
            for (sig, p) in &dist.probabilities {
                let n = tally.count(Record::Pair(*sig)) as f64;
                let mean = gates as f64 * p;
                let sigma = (gates as f64 * p * (1.0 - p)).sqrt();
                let dev = (n - mean).abs();
                if sigma > 0.0 {
                    worst_sigma = worst_sigma.max(dev / sigma);
                    c.check(dev <= 4.0 * sigma, format!("{state:?}/{parity:?} {sig}: {n} vs {mean}"));
                } else {
                    c.check(n == 0.0, format!("{state:?}/{parity:?} {sig}: {n} counts at zero probability"));
                }
            }
        }
    }
    c.note(format!("worst deviation {worst_sigma:.2} sigma"));

    // Odd pump: disjoint classes and error-free classification.
    let mut owner = std::collections::BTreeMap::new();
    for state in BellState::ALL {
        for sig in outcome_distribution(state, PumpParity::Odd, bs).unwrap().support() {
            let class = BellClass::of(state);
            let prev = *owner.entry(sig).or_insert(class);
            c.check(prev == class, format!("{sig} shared by {prev:?} and {class:?}"));
            c.check(classify(sig, PumpParity::Odd) == Some(class), format!("{sig} misclassified"));
        }
        let tally = run_monte_carlo(state, PumpParity::Odd, &DetectorModel::ideal(99), gates).unwrap();
        c.check(
            tally.misidentified() == 0 && tally.error_rate() == 0.0,
            format!("{state:?}: {} misidentified", tally.misidentified()),
        );
    }

    // Visibility knob.
    for state in BellState::ALL {
        let mut last = -1.0;
        let mut rates = Vec::new();
        for v in [1.0, 0.9, 0.8, 0.7, 0.6, 0.5] {
            let setup = AnalyzerSetup {
                splitter: bs,
                visibility: v,
            };
            let tally = run_monte_carlo_with(state, PumpParity::Odd, setup, &DetectorModel::ideal(7), gates).unwrap();
            let e = tally.error_rate();
            c.check(e > last, format!("{state:?}: error rate {e} at V={v} not above {last}"));
            last = e;
            rates.push(e);
        }
        if matches!(state, BellState::PsiMinus | BellState::PhiPlus) {
            let shown: Vec<String> = rates.iter().map(|r| format!("{r:.3}")).collect();
            c.note(format!("{} error rates {}", state.name(), shown.join("/")));
        }
    }
}

fn criterion_9(c: &mut Checks) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pump = TransverseMode::gaussian(geom());
    let mut worst: f64 = 0.0;
    for _ in 0..25 {
        let coeffs: [Complex64; 4] =
            std::array::from_fn(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let pol = TwoPhotonPolarization::normalized(coeffs).unwrap();
        let hom = interf(pump.clone(), pol);
        let oracle = MomentumOracle::new(1.0, 351.0, Z_MM, FRAC_1_SQRT_2, 64);
        let r1 = (rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        let r2 = (rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        let c4 = *pol.coeffs();
        let pairs = [
            (hom.amplitude_tt(r1, r2).components, oracle.tt(c4, r1, r2)),
            (hom.amplitude_rr(r1, r2).components, oracle.rr(c4, r1, r2)),
            (hom.amplitude_same_port(Port::One, r1, r2).components, oracle.same_port(c4, true, r1, r2)),
            (hom.amplitude_same_port(Port::Two, r1, r2).components, oracle.same_port(c4, false, r1, r2)),
        ];
        for (closed, brute) in pairs {
            let scale = closed.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let diff = closed.iter().zip(&brute).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            worst = worst.max(diff / scale);
        }
    }
    c.check(worst < 1e-3, format!("relative difference {worst:e}"));
    c.note(format!("worst relative difference {worst:.1e}"));
    c.within(start.elapsed(), 120.0);
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `(value, Σ|terms|)` of the explicit Hermite series.
fn hermite_series(n: u32, x: f64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut abs = 0.0;
    for m in 0..=n / 2 {
        let term = factorial(n) * (2.0 * x).powi((n - 2 * m) as i32) / (factorial(m) * factorial(n - 2 * m));
        sum += if m % 2 == 0 { term } else { -term };
        abs += term.abs();
    }
    (sum, abs)
}

fn laguerre_series(p: u32, alpha: u32, x: f64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut abs = 0.0;
    for i in 0..=p {
        let binom = factorial(p + alpha) / (factorial(p - i) * factorial(alpha + i));
        let term = binom * x.powi(i as i32) / factorial(i);
        sum += if i % 2 == 0 { term } else { -term };
        abs += term.abs();
    }
    (sum, abs)
}

fn criterion_10(c: &mut Checks) {
    let mut worst: f64 = 0.0;
    for n in 0..=10 {
        for k in 0..=40 {
            let x = -4.0 + 0.2 * f64::from(k);
            let (s, scale) = hermite_series(n, x);
            let d = (hermite_poly(n, x).unwrap() - s).abs() / scale.max(f64::MIN_POSITIVE);
            worst = worst.max(d);
        }
    }
    for p in 0..=10 {
        for alpha in 0..=10 {
            for k in 0..=40 {
                let x = 0.25 * f64::from(k);
                let (s, scale) = laguerre_series(p, alpha, x);
                let d = (laguerre_poly(p, alpha, x).unwrap() - s).abs() / scale;
                worst = worst.max(d);
            }
        }
    }
    c.check(worst < 1e-10, format!("polynomial mismatch {worst:e}"));

    let quad = PlaneQuadrature::default();
    let mut power_err: f64 = 0.0;
    for order in 0..=4u32 {
        for m in 0..=order {
            power_err = power_err.max((mode_power(&hg(m, order - m), quad) - 1.0).abs());
        }
        for p in 0..=order / 2 {
            let l = (order - 2 * p) as i32;
            for sign in [1, -1] {
                power_err = power_err.max((mode_power(&lg(p, sign * l), quad) - 1.0).abs());
            }
        }
    }
    c.check(power_err < 1e-4, format!("normalization error {power_err:e}"));

    let mut winding_err: f64 = 0.0;
    for l in [-2, -1, 1, 2, 3] {
        let mode = lg(0, l);
        let r = mode.width();
        let n = 4000;
        let mut total = 0.0;
        let mut prev = mode.eval(r, 0.0).arg();
        for k in 1..=n {
            let a = 2.0 * PI * f64::from(k) / f64::from(n);
            let cur = mode.eval(r * a.cos(), r * a.sin()).arg();
            total += (cur - prev + PI).rem_euclid(2.0 * PI) - PI;
            prev = cur;
        }
        winding_err = winding_err.max((total + 2.0 * PI * f64::from(l)).abs());
    }
    c.check(winding_err < 1e-6, format!("winding error {winding_err:e}"));
    c.note(format!("series {worst:.1e}, power {power_err:.1e}, winding {winding_err:.1e}"));
}

type Criterion = (&'static str, fn(&mut Checks));

fn main() {
    let criteria: [Criterion; 10] = [
        ("interference matrix", criterion_1),
        ("dip/peak inversion", criterion_2),
        ("LG coincidence profiles", criterion_3),
        ("detector displacement", criterion_4),
        ("OAM selection rule", criterion_5),
        ("classical exclusion", criterion_6),
        ("singlet beam", criterion_7),
        ("Bell-state analyzer", criterion_8),
        ("momentum-space oracle", criterion_9),
        ("special functions", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let mut checks = Checks::default();
        let start = Instant::now();
        run(&mut checks);
        let secs = start.elapsed().as_secs_f64();
        let status = if checks.failures.is_empty() { "PASS" } else { "FAIL" };
        let mut detail = checks.notes.join("; ");
        if !checks.failures.is_empty() {
            failed += 1;
            detail = format!("{}; {detail}", checks.failures.join("; "));
        }
        println!("criterion {:>2} {status} {name} ({secs:.2} s): {detail}", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
