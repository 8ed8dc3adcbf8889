//! Self-check suites run by the command-line `validate` subcommand.
//!
//! Each suite compares two independent computations (closed forms against
//! orbits, brute force against the per-side rule, the limit ODE against its
//! exact first event) or checks an invariant on a fixed grid.

use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::closed_form::closed_form_velocity;
use crate::error::{Error, Result};
use crate::flow::rectangularize::{protruded_candidate, rectangularize};
use crate::flow::{brute_force_auto, comparison_run, comparison_run_complement, per_side_step};
use crate::flow::{FlowConfig, StepMode, TieBreak};
use crate::lattice::{total_functional, AlphaRectangle, MediumSpec};
use crate::limit_motion::{integrate, RectState, StopReason};
use crate::numeric::Rational;
use crate::orbit::{component_midpoints, effective_velocity, homogeneous_velocity, is_singular, pinning_y, run_orbit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Examples,
    Oracle,
    Pinning,
    Invariance,
    Properties,
    Homogeneous,
    Ode,
    Comparison,
    Rectangularization,
    Consistency,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Examples,
        Suite::Oracle,
        Suite::Pinning,
        Suite::Invariance,
        Suite::Properties,
        Suite::Homogeneous,
        Suite::Ode,
        Suite::Comparison,
        Suite::Rectangularization,
        Suite::Consistency,
    ];

    /// Suites run when none are named. The consistency suite measures how far
    /// finite ε is from the limit and is only run on request.
    pub const DEFAULT: [Suite; 9] = [
        Suite::Examples,
        Suite::Oracle,
        Suite::Pinning,
        Suite::Invariance,
        Suite::Properties,
        Suite::Homogeneous,
        Suite::Ode,
        Suite::Comparison,
        Suite::Rectangularization,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Examples => "examples",
            Suite::Oracle => "oracle",
            Suite::Pinning => "pinning",
            Suite::Invariance => "invariance",
            Suite::Properties => "properties",
            Suite::Homogeneous => "homogeneous",
            Suite::Ode => "ode",
            Suite::Comparison => "comparison",
            Suite::Rectangularization => "rectangularization",
            Suite::Consistency => "consistency",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct ValidateOptions {
    pub max_n_alpha: i64,
    pub seed: u64,
    /// Corrupt one reference value so the harness itself can be seen to fail.
    pub inject_mismatch: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { max_n_alpha: 12, seed: 20, inject_mismatch: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport { suite, checks: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

fn alphas() -> [Rational; 3] {
    [Rational::one(), Rational::new(1, 2), Rational::new(3, 2)]
}

/// Media of the oracle grid: `N_β ∈ {1, 2}`, `N_α ≤ max_n_alpha`, α ∈ {1, 1/2, 3/2}.
fn grid_media(max_n_alpha: i64) -> Vec<MediumSpec> {
    let mut out = Vec::new();
    for alpha in alphas() {
        for nb in 1..=2 {
            for na in 1..=max_n_alpha {
                let beta = alpha.clone() * 2;
                out.push(MediumSpec::new(alpha.clone(), beta, na, nb).expect("valid grid medium"));
            }
        }
    }
    out
}

fn grid_points(spec: &MediumSpec) -> Vec<Rational> {
    component_midpoints(spec.alpha(), &(Rational::from_integer(20) / spec.alpha()))
}

fn value(spec: &MediumSpec, y: &Rational) -> Result<Rational> {
    effective_velocity(spec, y)?
        .value
        .ok_or_else(|| Error::Internal(format!("unexpected singular y = {y}")))
}

fn examples(opts: &ValidateOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Examples);
    let one = Rational::one();
    let cases: [(i64, i64, fn(&Rational) -> Rational); 2] = [
        (1, 1, |y| Rational::from_bigint((y + Rational::new(1, 4)).floor()) * 2),
        (1, 2, |y| Rational::from_bigint((y * Rational::new(2, 3) + Rational::new(1, 3)).floor()) * 3),
    ];
    for (na, nb, staircase) in cases {
        let spec = MediumSpec::new(one.clone(), Rational::from_integer(2), na, nb)?;
        for y in component_midpoints(&one, &Rational::from_integer(10)) {
            let mut expected = staircase(&y);
            if opts.inject_mismatch {
                expected += Rational::one();
            }
            let got = value(&spec, &y)?;
            report.check(got == expected, || format!("({na},{nb}) y = {y}: f = {got}, staircase {expected}"));
        }
    }
    Ok(report)
}

fn oracle(opts: &ValidateOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Oracle);
    for spec in grid_media(opts.max_n_alpha) {
        for y in grid_points(&spec) {
            let orbit = value(&spec, &y)?;
            let closed = closed_form_velocity(&spec, &y)?.value;
            report.check(orbit == closed, || {
                format!("Nα={} Nβ={} α={} y={y}: orbit {orbit}, closed form {closed}", spec.n_alpha(), spec.n_beta(), spec.alpha())
            });
        }
    }
    Ok(report)
}

fn pinning(opts: &ValidateOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Pinning);
    for spec in grid_media(opts.max_n_alpha) {
        let bar = pinning_y(&spec);
        let mut first_above = true;
        for y in grid_points(&spec) {
            let f = value(&spec, &y)?;
            if y < bar {
                report.check(f.is_zero(), || format!("{spec:?} y={y} below threshold moves with f={f}"));
            } else if first_above {
                first_above = false;
                report.check(f.is_positive(), || format!("{spec:?} first component above threshold y={y} is pinned"));
            }
        }
    }
    Ok(report)
}

fn invariance(opts: &ValidateOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Invariance);
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut draws = 0;
    while draws < 200 {
        let na = rng.gen_range(1..=opts.max_n_alpha.max(1));
        let nb = rng.gen_range(1..=3);
        let alpha = Rational::new(rng.gen_range(1..=4), rng.gen_range(1..=3));
        let y = Rational::new(rng.gen_range(1..=400), rng.gen_range(1..=40));
        let spec = MediumSpec::new(alpha.clone(), alpha * 2, na, nb)?;
        if is_singular(&spec, &y) {
            continue;
        }
        draws += 1;
        let reference = run_orbit(&spec, &y, 0)?.velocity();
        for x0 in 0..spec.period() {
            let trace = run_orbit(&spec, &y, x0)?;
            report.check(trace.velocity() == reference, || format!("Nα={na} Nβ={nb} y={y} x0={x0}: velocity differs"));
            report.check(trace.pre_period as i64 <= na && trace.period_steps as i64 <= na, || {
                format!("Nα={na} Nβ={nb} y={y} x0={x0}: pre-period {} period {}", trace.pre_period, trace.period_steps)
            });
        }
    }
    Ok(report)
}

fn properties(opts: &ValidateOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Properties);
    for spec in grid_media(opts.max_n_alpha) {
        let width = (spec.alpha() * 4).recip();
        let other_beta = spec.with_beta(spec.beta() * 3)?;
        let mut prev: Option<Rational> = None;
        for y in grid_points(&spec) {
            let f = value(&spec, &y)?;
            // constant on the component
            for shift in [Rational::new(-3, 8), Rational::new(3, 8)] {
                let z = &y + &width * &shift;
                let g = value(&spec, &z)?;
                report.check(g == f, || format!("{spec:?}: f({z}) = {g} differs from f({y}) = {f}"));
            }
            // rational n·N_αβ/M
            let trace = run_orbit(&spec, &y, 0)?;
            let periodic = Rational::new(trace.period_turns(&spec) * spec.period(), trace.period_steps as i64);
            report.check(periodic == f, || format!("{spec:?} y={y}: n·Nαβ/M = {periodic}, f = {f}"));
            if let Some(p) = &prev {
                report.check(p <= &f, || format!("{spec:?}: f decreases at y={y}"));
            }
            // |f − 2αY| ≤ N_β + 1/2, the band at every γ after scaling by 1/γ
            let gap = (&f - spec.alpha() * &y * 2).abs();
            let band = Rational::new(2 * spec.n_beta() + 1, 2);
            for gamma in [1i64, 10, 100] {
                let l = Rational::from_integer(gamma) / &y;
                let lhs = (&f / gamma - spec.alpha() * 2 / &l).abs();
                report.check(lhs <= &band / gamma, || format!("{spec:?} y={y} γ={gamma}: band violated"));
            }
            report.check(gap <= band, || format!("{spec:?} y={y}: |f − 2αY| = {gap}"));
            let g = value(&other_beta, &y)?;
            report.check(g == f, || format!("{spec:?} y={y}: f depends on β"));
            prev = Some(f);
        }
    }
    Ok(report)
}

fn homogeneous(_: &ValidateOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Homogeneous);
    for alpha in alphas() {
        let spec = MediumSpec::homogeneous(alpha.clone())?;
        for k in 1..=160 {
            let y = Rational::new(k, 16);
            if is_singular(&spec, &y) {
                continue;
            }
            let f = value(&spec, &y)?;
            let floor = homogeneous_velocity(&alpha, &y);
            report.check(f == floor, || format!("α={alpha} y={y}: f = {f}, ⌊2αY⌋ = {floor}"));
        }
        let eps = Rational::new(1, 20);
        for side in [8, 13, 20, 31, 40] {
            for gamma in [Rational::new(1, 2), Rational::one(), Rational::new(7, 3)] {
                let sq = AlphaRectangle::square_at_least(&spec, 0, side)?;
                let config = FlowConfig::new(spec.clone(), gamma.clone(), eps.clone(), sq, 1, StepMode::PerSide)?;
                let step = per_side_step(&config, &sq)?;
                let ell = &eps * side;
                let y = &gamma / &ell;
                let expected = homogeneous_velocity(&alpha, &y).to_i64().unwrap_or(i64::MAX);
                report.check(step.displacements() == [expected; 4], || {
                    format!("α={alpha} side {side} γ={gamma}: moves {:?}, ⌊2αγ/ℓ⌋ = {expected}", step.displacements())
                });
            }
        }
    }
    Ok(report)
}

fn ode(_: &ValidateOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Ode);
    let one = Rational::one();
    let spec = MediumSpec::new(one.clone(), Rational::from_integer(2), 1, 1)?;
    let traj = integrate(&spec, &one, &RectState::new(one.clone(), one.clone()), &Rational::from_integer(10))?;
    let first = &traj.segments[0];
    report.check(first.t_end == Rational::new(3, 28), || format!("first event at {}", first.t_end));
    report.check(first.l1_end() == Rational::new(4, 7), || format!("length at first event {}", first.l1_end()));
    report.check(traj.stop == StopReason::Extinction, || format!("stopped with {:?}", traj.stop));
    for s in &traj.segments {
        report.check(s.l1_start == s.l2_start && s.slope1 == s.slope2, || format!("asymmetric segment at t={}", s.t_start));
        report.check(!s.slope1.is_positive() && !s.slope2.is_positive(), || format!("growth at t={}", s.t_start));
    }
    let ten = Rational::from_integer(10);
    let pinned = integrate(&spec, &one, &RectState::new(ten.clone(), ten.clone()), &ten)?;
    report.check(pinned.stop == StopReason::PermanentlyPinned, || format!("L=10 stopped with {:?}", pinned.stop));
    report.check(pinned.final_state.l1 == ten, || "L=10 moved".into());
    Ok(report)
}

/// The nested pairs used by the comparison suite, all in the moving regime.
fn comparison_cases() -> Result<Vec<(FlowConfig, AlphaRectangle, AlphaRectangle, bool)>> {
    let mut out = Vec::new();
    let eps = Rational::new(1, 20);
    let insets = [(0, 0, 0, 0), (2, 1, 0, 3), (1, 4, 2, 0), (3, 3, 1, 1), (0, 2, 4, 2)];
    let mut k = 0;
    for (alpha, gammas) in [(Rational::one(), [Rational::new(3, 4), Rational::one()]), (Rational::from_integer(2), [Rational::new(3, 8), Rational::new(1, 2)])] {
        let spec = MediumSpec::homogeneous(alpha)?;
        for gamma in gammas {
            for (i, &(l, r, b, t)) in insets.iter().enumerate() {
                let (w, h) = (27 + 2 * (i as i64 % 3), 25 + 3 * (k % 2));
                let outer = AlphaRectangle::from_bounds(&spec, 0, w, 0, h)?;
                let config = FlowConfig::new(spec.clone(), gamma.clone(), eps.clone(), outer, 5, StepMode::BruteForce)?;
                let complement = k % 4 == 3;
                let inner = if complement {
                    AlphaRectangle::from_bounds(&spec, w + 2 + l, w + 26 - r, b, h - t)?
                } else {
                    AlphaRectangle::from_bounds(&spec, l, w - r, b, h - t)?
                };
                out.push((config, inner, outer, complement));
                k += 1;
            }
        }
    }
    Ok(out)
}

fn comparison(_: &ValidateOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Comparison);
    for (config, inner, outer, complement) in comparison_cases()? {
        let outcome = if complement {
            comparison_run_complement(&config, &inner, &outer, config.steps)?
        } else {
            let set = outer.to_lattice_set(config.epsilon.clone())?;
            comparison_run(&config, &inner, &set, config.steps)?
        };
        report.check(outcome.holds, || format!("{inner} vs {outer} (complement: {complement}) lost its order"));
        report.check(outcome.steps_compared > 0, || format!("{inner} vs {outer}: no step compared"));
    }
    Ok(report)
}

fn rectangularization(opts: &ValidateOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Rectangularization);
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let eps = Rational::new(1, 20);
    for i in 0..50 {
        let na = rng.gen_range(2..=3);
        let nb = rng.gen_range(1..=2);
        let beta = Rational::from_integer(rng.gen_range(3..=4));
        let spec = MediumSpec::new(Rational::one(), beta, na, nb)?;
        let prev = AlphaRectangle::square_at_least(&spec, 0, 24)?;
        let prev_set = prev.to_lattice_set(eps.clone())?;
        let (cand, _) = protruded_candidate(&spec, &prev, &eps, &mut rng)?;
        let tau = eps.clone();
        let mut energy = total_functional(&spec, &cand, &prev_set, &tau)?;
        let (_, stages) = rectangularize(&spec, &cand)?;
        for (mv, set) in stages {
            let e = total_functional(&spec, &set, &prev_set, &tau)?;
            report.check(e <= energy, || format!("candidate {i}: {} raised energy by {}", mv.as_str(), &e - &energy));
            energy = e;
        }
    }
    Ok(report)
}

/// Initial data of the consistency scenarios: medium, `Y0 = γ/L0` with
/// `L0 = 3/2`, and ε.
pub fn consistency_scenarios() -> Result<Vec<FlowConfig>> {
    let mut out = Vec::new();
    let l0 = Rational::new(3, 2);
    for den in [10i64, 20, 40] {
        let eps = Rational::new(1, den);
        for (na, nb) in [(1, 0), (1, 1), (2, 1), (1, 2), (2, 2), (3, 1)] {
            let spec = if nb == 0 {
                MediumSpec::homogeneous(Rational::one())?
            } else {
                MediumSpec::new(Rational::one(), Rational::from_integer(3), na, nb)?
            };
            for y0 in [Rational::new(4, 5), Rational::one(), Rational::new(6, 5), Rational::new(3, 2)] {
                let side = (&l0 / &eps).to_i64().expect("integer side");
                let sq = AlphaRectangle::square_at_least(&spec, 0, side)?;
                out.push(FlowConfig::new(spec.clone(), &y0 * &l0, eps.clone(), sq, 6, StepMode::PerSide)?);
            }
        }
    }
    Ok(out)
}

/// One step of a consistency scenario where the two rules differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub epsilon: Rational,
    pub n_alpha: i64,
    pub n_beta: i64,
    pub gamma: Rational,
    pub current: crate::lattice::CellRect,
    pub per_side: [i64; 4],
    pub brute_force: [i64; 4],
    /// Exact energy of the per-side choice minus that of the brute-force choice.
    pub exact_gap: Rational,
    /// Per-side model energy of the brute-force choice minus that of the per-side choice.
    pub model_gap: Rational,
}

impl Disagreement {
    /// The brute-force choice wins only through the corner term: the per-side
    /// choice is no worse in the model, and the corner savings of the two
    /// choices differ by exactly the sum of the gaps.
    pub fn attributable_to_corners(&self) -> bool {
        !self.model_gap.is_negative() && !self.exact_gap.is_negative()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConsistencyTally {
    pub steps: usize,
    pub agreements: usize,
    pub disagreements: Vec<Disagreement>,
}

/// Follow each scenario with the per-side rule and compare every step with
/// the brute-force minimizer taken from the same rectangle.
pub fn consistency_tally(configs: &[FlowConfig]) -> Result<ConsistencyTally> {
    use crate::flow::{exact_energy, per_side_model_energy};
    let mut tally = ConsistencyTally::default();
    for config in configs {
        let mut current = config.initial;
        for _ in 0..config.steps {
            let per_side = match per_side_step(config, &current) {
                Ok(step) => step,
                Err(Error::BelowFloor(_)) => break,
                Err(e) => return Err(e),
            };
            let Some(next) = per_side.next else { break };
            let brute = brute_force_auto(config, &current, TieBreak::SmallestMeasure)?.next;
            tally.steps += 1;
            if brute == next {
                tally.agreements += 1;
            } else {
                tally.disagreements.push(Disagreement {
                    epsilon: config.epsilon.clone(),
                    n_alpha: config.spec.n_alpha(),
                    n_beta: config.spec.n_beta(),
                    gamma: config.gamma.clone(),
                    current: *current.rect(),
                    per_side: current.displacements_to(&next),
                    brute_force: current.displacements_to(&brute),
                    exact_gap: exact_energy(config, &current, &next) - exact_energy(config, &current, &brute),
                    model_gap: per_side_model_energy(config, &current, &brute)
                        - per_side_model_energy(config, &current, &next),
                });
            }
            current = next;
        }
    }
    Ok(tally)
}

fn consistency(opts: &ValidateOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Consistency);
    let tally = consistency_tally(&consistency_scenarios()?)?;
    for d in &tally.disagreements {
        report.check(d.attributable_to_corners(), || format!("unexplained disagreement at {}", d.current));
    }
    let mut agreements = tally.agreements;
    if opts.inject_mismatch {
        agreements = 0;
    }
    report.check(agreements * 100 >= tally.steps * 95, || {
        format!("per-side and brute force agree on {agreements} of {} steps, below 95%", tally.steps)
    });
    Ok(report)
}

pub fn run_suite(suite: Suite, opts: &ValidateOptions) -> Result<SuiteReport> {
    match suite {
        Suite::Examples => examples(opts),
        Suite::Oracle => oracle(opts),
        Suite::Pinning => pinning(opts),
        Suite::Invariance => invariance(opts),
        Suite::Properties => properties(opts),
        Suite::Homogeneous => homogeneous(opts),
        Suite::Ode => ode(opts),
        Suite::Comparison => comparison(opts),
        Suite::Rectangularization => rectangularization(opts),
        Suite::Consistency => consistency(opts),
    }
}
