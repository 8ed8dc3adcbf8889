//! Finite-ε discrete flat flow of α-type rectangles with `τ = γε`.
//!
//! Two step rules are provided: the per-side rule, where every side solves
//! its own one-dimensional problem, and an exact minimization of the total
//! functional over a family of inward-displaced α-type rectangles.

pub mod rectangularize;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    rect_dissipation_cells, rect_perimeter_energy, rect_total_functional, AlphaRectangle, CellRect,
    LatticeSet, MediumSpec, Side,
};
use crate::numeric::Rational;
use crate::orbit::{is_singular, step_minimizer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepMode {
    PerSide,
    BruteForce,
}

impl FromStr for StepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-side" | "per_side" => Ok(StepMode::PerSide),
            "brute" | "brute-force" | "brute_force" => Ok(StepMode::BruteForce),
            other => Err(Error::Parse(format!("unknown step mode {other:?}"))),
        }
    }
}

impl fmt::Display for StepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepMode::PerSide => "per-side",
            StepMode::BruteForce => "brute-force",
        })
    }
}

/// Which minimizer to keep when several candidates have equal energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TieBreak {
    SmallestMeasure,
    LargestMeasure,
}

#[derive(Clone, Debug)]
pub struct FlowConfig {
    pub spec: MediumSpec,
    pub gamma: Rational,
    pub epsilon: Rational,
    pub initial: AlphaRectangle,
    pub steps: usize,
    pub mode: StepMode,
    /// Minimum side length in cells below which the run stops.
    pub floor: i64,
}

impl FlowConfig {
    pub const DEFAULT_FLOOR: i64 = 4;

    pub fn new(
        spec: MediumSpec,
        gamma: Rational,
        epsilon: Rational,
        initial: AlphaRectangle,
        steps: usize,
        mode: StepMode,
    ) -> Result<Self> {
        if !gamma.is_positive() {
            return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
        }
        if !epsilon.is_positive() {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        if !initial.is_alpha_type(&spec) {
            return Err(Error::InvalidArgument(format!("{initial} is not α-type in this medium")));
        }
        Ok(FlowConfig { spec, gamma, epsilon, initial, steps, mode, floor: Self::DEFAULT_FLOOR })
    }

    pub fn with_floor(mut self, floor: i64) -> Self {
        self.floor = floor;
        self
    }

    /// `τ = γε`.
    pub fn tau(&self) -> Rational {
        &self.gamma * &self.epsilon
    }

    /// `Y = γ/L` for a side of `cells` cells.
    pub fn side_y(&self, cells: i64) -> Rational {
        &self.gamma / (&self.epsilon * cells)
    }

    fn check_floor(&self, r: &CellRect) -> Result<()> {
        if r.width() < self.floor || r.height() < self.floor {
            return Err(Error::BelowFloor(format!(
                "{r} has a side shorter than {} cells",
                self.floor
            )));
        }
        Ok(())
    }

    fn alpha_rect(&self, r: CellRect) -> Result<AlphaRectangle> {
        AlphaRectangle::new(&self.spec, r)
    }
}

/// Outcome of the one-dimensional problem for one side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SideMove {
    pub side: Side,
    pub position: i64,
    pub y: Rational,
    pub displacement: i64,
    /// More than one minimizer; the larger displacement was taken.
    pub tie: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerSideStep {
    pub moves: Vec<SideMove>,
    /// `None` when opposite sides cross (extinction).
    pub next: Option<AlphaRectangle>,
}

impl PerSideStep {
    pub fn displacements(&self) -> [i64; 4] {
        let mut d = [0; 4];
        for (slot, m) in d.iter_mut().zip(&self.moves) {
            *slot = m.displacement;
        }
        d
    }
}

fn displaced(rect: &CellRect, d: [i64; 4]) -> Option<CellRect> {
    let r = CellRect {
        x_min: rect.x_min + d[0],
        x_max: rect.x_max - d[1],
        y_min: rect.y_min + d[2],
        y_max: rect.y_max - d[3],
    };
    (r.x_min <= r.x_max && r.y_min <= r.y_max).then_some(r)
}

/// Move every side by its own one-dimensional minimizer.
pub fn per_side_step(config: &FlowConfig, current: &AlphaRectangle) -> Result<PerSideStep> {
    config.check_floor(current)?;
    let mut moves = Vec::with_capacity(4);
    for side in Side::ALL {
        let y = config.side_y(current.side_length(side));
        let position = current.side_position(&config.spec, side);
        let minimizers = step_minimizer(&config.spec, &y, position)?;
        let displacement = *minimizers.last().expect("at least one minimizer");
        debug_assert!(minimizers.len() == 1 || is_singular(&config.spec, &y));
        moves.push(SideMove { side, position, y, displacement, tie: minimizers.len() > 1 });
    }
    let mut step = PerSideStep { moves, next: None };
    if let Some(r) = displaced(current, step.displacements()) {
        step.next = Some(config.alpha_rect(r)?);
    }
    Ok(step)
}

/// Total functional the per-side rule minimizes: the exact perimeter plus a
/// dissipation in which each side's removed rows are charged at full
/// length, so corner cells are counted once per adjacent side.
pub fn per_side_model_energy(config: &FlowConfig, current: &CellRect, candidate: &CellRect) -> Rational {
    let d = current.displacements_to(candidate);
    let mut cells = 0i64;
    for (side, n) in Side::ALL.iter().zip(d) {
        cells += current.side_length(*side) * n * (n + 1) / 2;
    }
    let eps = &config.epsilon;
    rect_perimeter_energy(&config.spec, candidate, eps) + eps * eps * eps * cells / config.tau()
}

/// Exact total functional of a rectangle candidate.
pub fn exact_energy(config: &FlowConfig, current: &CellRect, candidate: &CellRect) -> Rational {
    rect_total_functional(&config.spec, candidate, current, &config.epsilon, &config.tau())
}

/// Rectangles obtained by moving each side of `base` inward by an
/// admissible displacement in `0..=max_offset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateFamily {
    pub base: AlphaRectangle,
    pub max_offset: i64,
}

impl CandidateFamily {
    pub fn new(base: AlphaRectangle, max_offset: i64) -> Self {
        CandidateFamily { base, max_offset: max_offset.max(0) }
    }

    /// Largest `N` with `(N − N_β)² L ≤ 4αγN`, `L` the shorter side of `base`.
    pub fn from_cielle(config: &FlowConfig, base: AlphaRectangle) -> Self {
        let spec = &config.spec;
        let l = &config.epsilon * base.width().min(base.height());
        let rhs = spec.alpha() * &config.gamma * 4;
        let fits = |n: i64| Rational::from_integer((n - spec.n_beta()).pow(2)) * &l <= &rhs * n;
        let mut n = spec.n_beta();
        while fits(n + 1) {
            n += 1;
        }
        Self::new(base, n.max(1))
    }

    /// The same family with room for at least one more admissible position per side.
    pub fn widened(&self, spec: &MediumSpec) -> Self {
        Self::new(self.base, self.max_offset + spec.period())
    }

    pub fn side_offsets(&self, spec: &MediumSpec, side: Side) -> Vec<i64> {
        let p = self.base.side_position(spec, side);
        (0..=self.max_offset).filter(|&d| spec.is_alpha_residue(p + d)).collect()
    }

    /// All nonempty candidates, in lexicographic order of their offsets.
    pub fn candidates(&self, spec: &MediumSpec) -> Vec<([i64; 4], CellRect)> {
        let offs: Vec<Vec<i64>> = Side::ALL.iter().map(|&s| self.side_offsets(spec, s)).collect();
        let mut out = Vec::new();
        for &l in &offs[0] {
            for &r in &offs[1] {
                if l + r >= self.base.width() {
                    continue;
                }
                for &b in &offs[2] {
                    for &t in &offs[3] {
                        if b + t >= self.base.height() {
                            continue;
                        }
                        let d = [l, r, b, t];
                        out.push((d, displaced(&self.base, d).expect("nonempty")));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BruteStep {
    pub next: AlphaRectangle,
    pub energy: Rational,
    pub candidates: usize,
}

type Scored = (Rational, i64, [i64; 4], CellRect);

fn better(a: &Scored, b: &Scored, tie: TieBreak) -> bool {
    let by_energy = a.0.cmp(&b.0);
    let by_area = match tie {
        TieBreak::SmallestMeasure => a.1.cmp(&b.1),
        TieBreak::LargestMeasure => b.1.cmp(&a.1),
    };
    by_energy.then(by_area).then(a.2.cmp(&b.2)) == Ordering::Less
}

fn minimize(config: &FlowConfig, family: &CandidateFamily, tie: TieBreak) -> (Scored, usize) {
    let current = *family.base.rect();
    let candidates = family.candidates(&config.spec);
    let n = candidates.len();
    let mut best: Option<Scored> = None;
    for (d, r) in candidates {
        let scored = (exact_energy(config, &current, &r), r.area(), d, r);
        if best.as_ref().is_none_or(|b| better(&scored, b, tie)) {
            best = Some(scored);
        }
    }
    // the zero displacement is always a candidate
    (best.expect("nonempty family"), n)
}

/// Exact minimizer of the total functional over `family`.
///
/// Fails with [`Error::FamilyTooSmall`] when the family widened by one more
/// admissible position per side has a strictly better member, and with
/// [`Error::BelowFloor`] when the current rectangle has a side below the floor.
pub fn brute_force_step(
    config: &FlowConfig,
    current: &AlphaRectangle,
    family: &CandidateFamily,
    tie: TieBreak,
) -> Result<BruteStep> {
    if family.base != *current {
        return Err(Error::InvalidArgument("candidate family is not based at the current rectangle".into()));
    }
    config.check_floor(current)?;
    let (best, candidates) = minimize(config, family, tie);
    let (wide, _) = minimize(config, &family.widened(&config.spec), tie);
    if wide.3 != best.3 {
        return Err(Error::FamilyTooSmall(format!(
            "offset {} is not enough around {current}: widened minimizer has offsets {:?}",
            family.max_offset, wide.2
        )));
    }
    Ok(BruteStep { next: config.alpha_rect(best.3)?, energy: best.0, candidates })
}

/// [`brute_force_step`] over the a-priori family, widening until it is large enough.
pub fn brute_force_auto(config: &FlowConfig, current: &AlphaRectangle, tie: TieBreak) -> Result<BruteStep> {
    let mut family = CandidateFamily::from_cielle(config, *current);
    loop {
        match brute_force_step(config, current, &family, tie) {
            Err(Error::FamilyTooSmall(_)) if family.max_offset < current.width().max(current.height()) => {
                family = family.widened(&config.spec);
            }
            other => return other,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub rect: CellRect,
    /// Inward displacement of left, right, bottom, top.
    pub displacements: [i64; 4],
    pub perimeter_energy: Rational,
    pub dissipation: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStop {
    Completed,
    Extinct,
    BelowFloor,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlowRun {
    pub rects: Vec<AlphaRectangle>,
    pub records: Vec<StepRecord>,
    pub stop: FlowStop,
    pub diagnostic: Option<String>,
}

fn one_step(config: &FlowConfig, current: &AlphaRectangle) -> Result<Option<AlphaRectangle>> {
    match config.mode {
        StepMode::PerSide => Ok(per_side_step(config, current)?.next),
        StepMode::BruteForce => Ok(Some(brute_force_auto(config, current, TieBreak::SmallestMeasure)?.next)),
    }
}

/// Iterate the configured step rule.
pub fn run_flow(config: &FlowConfig) -> Result<FlowRun> {
    let eps = &config.epsilon;
    let mut current = config.initial;
    let mut run = FlowRun {
        rects: vec![current],
        records: vec![StepRecord {
            step: 0,
            rect: *current.rect(),
            displacements: [0; 4],
            perimeter_energy: rect_perimeter_energy(&config.spec, &current, eps),
            dissipation: Rational::zero(),
        }],
        stop: FlowStop::Completed,
        diagnostic: None,
    };
    for step in 1..=config.steps {
        let next = match one_step(config, &current) {
            Ok(Some(next)) => next,
            Ok(None) => {
                run.stop = FlowStop::Extinct;
                break;
            }
            Err(Error::BelowFloor(msg)) => {
                run.stop = FlowStop::BelowFloor;
                run.diagnostic = Some(msg);
                break;
            }
            Err(e) => return Err(e),
        };
        let dissipation = eps * eps * eps * rect_dissipation_cells(&current, &next) / config.tau();
        run.records.push(StepRecord {
            step,
            rect: *next.rect(),
            displacements: current.displacements_to(&next),
            perimeter_energy: rect_perimeter_energy(&config.spec, &next, eps),
            dissipation,
        });
        run.rects.push(next);
        current = next;
    }
    Ok(run)
}

/// Brute-force rectangle flow from `start`, ending at the last state above
/// the side-length floor. Below it rectangles stop being the minimizers (the
/// empty set can win), so those states are not kept.
fn brute_flow(config: &FlowConfig, start: AlphaRectangle, steps: usize, tie: TieBreak) -> Result<Vec<AlphaRectangle>> {
    let mut out = vec![start];
    let mut current = start;
    for _ in 0..steps {
        let next = match brute_force_auto(config, &current, tie) {
            Ok(step) => step.next,
            Err(Error::BelowFloor(_)) => break,
            Err(e) => return Err(e),
        };
        if config.check_floor(&next).is_err() {
            break;
        }
        out.push(next);
        current = next;
    }
    Ok(out)
}

/// Result of a comparison run: whether the order held at every step where
/// both flows were still above the floor, and how many such steps there were.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonOutcome {
    pub holds: bool,
    pub steps_compared: usize,
}

fn compare_flows(
    config: &FlowConfig,
    inner: &AlphaRectangle,
    outer: &AlphaRectangle,
    steps: usize,
    ordered: impl Fn(&CellRect, &CellRect) -> bool,
) -> Result<ComparisonOutcome> {
    let inner_flow = brute_flow(config, *inner, steps, TieBreak::SmallestMeasure)?;
    let mut outcome = ComparisonOutcome { holds: true, steps_compared: usize::MAX };
    for tie in [TieBreak::SmallestMeasure, TieBreak::LargestMeasure] {
        let outer_flow = brute_flow(config, *outer, steps, tie)?;
        let pairs = inner_flow.len().min(outer_flow.len());
        outcome.steps_compared = outcome.steps_compared.min(pairs - 1);
        if inner_flow.iter().zip(&outer_flow).any(|(a, b)| !ordered(a, b)) {
            outcome.holds = false;
        }
    }
    Ok(outcome)
}

fn as_filled_rectangle(set: &LatticeSet) -> Result<CellRect> {
    let bbox = set
        .bounding_box()
        .ok_or_else(|| Error::InvalidArgument("outer set is empty".into()))?;
    if set.len() as i64 != bbox.area() {
        return Err(Error::InvalidArgument("outer set must be a filled coordinate rectangle".into()));
    }
    Ok(bbox)
}

/// Run the smallest-measure flow from `inner` and the flows from `outer`
/// under both tie rules, comparing `inner_k ⊆ outer_k` step by step.
pub fn comparison_run(config: &FlowConfig, inner: &AlphaRectangle, outer: &LatticeSet, steps: usize) -> Result<ComparisonOutcome> {
    if outer.epsilon() != &config.epsilon {
        return Err(Error::InvalidArgument("outer set uses a different epsilon".into()));
    }
    let outer = config.alpha_rect(as_filled_rectangle(outer)?)?;
    if !outer.contains_rect(inner) {
        return Err(Error::InvalidArgument(format!("{inner} is not contained in {outer}")));
    }
    compare_flows(config, inner, &outer, steps, |a, b| b.contains_rect(a))
}

/// True iff `inner_k ⊆ outer_k` at every step reached, see [`comparison_run`].
pub fn comparison_check(config: &FlowConfig, inner: &AlphaRectangle, outer: &LatticeSet, steps: usize) -> Result<bool> {
    Ok(comparison_run(config, inner, outer, steps)?.holds)
}

fn disjoint(a: &CellRect, b: &CellRect) -> bool {
    a.x_max < b.x_min || b.x_max < a.x_min || a.y_max < b.y_min || b.y_max < a.y_min
}

/// Complement form: `inner` lies outside `outer`; the flows must stay disjoint.
pub fn comparison_run_complement(
    config: &FlowConfig,
    inner: &AlphaRectangle,
    outer: &AlphaRectangle,
    steps: usize,
) -> Result<ComparisonOutcome> {
    if !disjoint(inner, outer) {
        return Err(Error::InvalidArgument(format!("{inner} meets {outer}")));
    }
    compare_flows(config, inner, outer, steps, disjoint)
}

pub fn comparison_check_complement(
    config: &FlowConfig,
    inner: &AlphaRectangle,
    outer: &AlphaRectangle,
    steps: usize,
) -> Result<bool> {
    Ok(comparison_run_complement(config, inner, outer, steps)?.holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::total_functional;
    use crate::orbit::{homogeneous_velocity, pinning_y};
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn medium(na: i64, nb: i64) -> MediumSpec {
        MediumSpec::new(Rational::one(), q(3, 1), na, nb).unwrap()
    }

    fn config(spec: MediumSpec, gamma: Rational, eps: Rational, side: i64, mode: StepMode) -> FlowConfig {
        let sq = AlphaRectangle::square_at_least(&spec, 0, side).unwrap();
        FlowConfig::new(spec, gamma, eps, sq, 20, mode).unwrap()
    }

    #[test]
    fn homogeneous_square_moves_floor() {
        let h = MediumSpec::homogeneous(Rational::one()).unwrap();
        for (side, gamma) in [(10, q(1, 1)), (7, q(1, 1)), (12, q(3, 2)), (9, q(1, 3))] {
            let c = config(h.clone(), gamma.clone(), q(1, 10), side, StepMode::PerSide);
            let step = per_side_step(&c, &c.initial).unwrap();
            let l = q(side, 10);
            let expected = homogeneous_velocity(&Rational::one(), &(&gamma / &l)).to_i64().unwrap();
            assert_eq!(step.displacements(), [expected; 4]);
        }
    }

    #[test]
    fn inhomogeneous_side_example() {
        // γ/L = 11/10 with side residue 0 moves one cell
        let spec = medium(2, 1);
        let rect = AlphaRectangle::from_bounds(&spec, 2, 13, 2, 13).unwrap();
        let c = FlowConfig::new(spec.clone(), q(1, 1), q(5, 66), rect, 1, StepMode::PerSide).unwrap();
        let step = per_side_step(&c, &rect).unwrap();
        for m in &step.moves {
            assert_eq!(m.y, q(11, 10));
            if spec.is_alpha_residue(m.position) && m.position.rem_euclid(3) == 0 {
                assert_eq!(m.displacement, 1);
            }
        }
    }

    #[test]
    fn pinned_sides_do_not_move() {
        for (na, nb) in [(1, 1), (2, 1), (1, 2), (3, 2)] {
            let spec = medium(na, nb);
            // every side at position N_α − 1, where no transient step occurs
            let hi = 20 * spec.period() + nb;
            let rect = AlphaRectangle::from_bounds(&spec, 0, hi, 0, hi).unwrap();
            let c = FlowConfig::new(spec.clone(), q(1, 1), q(1, 20), rect, 20, StepMode::PerSide).unwrap();
            assert!(c.side_y(rect.width()) < pinning_y(&spec));
            let run = run_flow(&c).unwrap();
            assert!(run.rects.iter().all(|r| r == &rect));
            // from other positions only a short transient
            let c = config(spec.clone(), q(1, 1), q(1, 20), 40, StepMode::PerSide);
            let run = run_flow(&c).unwrap();
            let settled = &run.rects[na as usize..];
            assert!(settled.iter().all(|r| r == &settled[0]));
        }
    }

    #[test]
    fn homogeneous_run_shrinks_two_cells_per_side() {
        let h = MediumSpec::homogeneous(Rational::one()).unwrap();
        let mut c = config(h, q(1, 1), q(1, 10), 10, StepMode::PerSide);
        c.steps = 1;
        let run = run_flow(&c).unwrap();
        assert_eq!(run.records[1].displacements, [2; 4]);
        assert_eq!(run.rects[1].width(), 6);
    }

    #[test]
    fn singleton_family_returns_current() {
        let spec = medium(2, 1);
        let c = config(spec, q(1, 1), q(1, 20), 20, StepMode::BruteForce);
        let family = CandidateFamily::new(c.initial, 0);
        assert_eq!(family.candidates(&c.spec).len(), 1);
    }

    #[test]
    fn small_family_is_reported() {
        let h = MediumSpec::homogeneous(Rational::one()).unwrap();
        let c = config(h, q(1, 1), q(1, 40), 40, StepMode::BruteForce);
        let family = CandidateFamily::new(c.initial, 1);
        assert!(matches!(
            brute_force_step(&c, &c.initial, &family, TieBreak::SmallestMeasure),
            Err(Error::FamilyTooSmall(_))
        ));
        let auto = brute_force_auto(&c, &c.initial, TieBreak::SmallestMeasure).unwrap();
        assert_eq!(c.initial.displacements_to(&auto.next), [2; 4]);
    }

    #[test]
    fn exact_energy_matches_lattice_sets() {
        let spec = medium(2, 1);
        let c = config(spec.clone(), q(2, 3), q(1, 5), 9, StepMode::BruteForce);
        let family = CandidateFamily::new(c.initial, 3);
        let prev = c.initial.to_lattice_set(c.epsilon.clone()).unwrap();
        for (_, r) in family.candidates(&spec) {
            let cand = r.to_lattice_set(c.epsilon.clone()).unwrap();
            assert_eq!(exact_energy(&c, &c.initial, &r), total_functional(&spec, &cand, &prev, &c.tau()).unwrap());
            assert!(exact_energy(&c, &c.initial, &r) <= per_side_model_energy(&c, &c.initial, &r));
        }
    }

    #[test]
    fn per_side_minimizes_the_model() {
        let spec = medium(2, 1);
        for gamma in [q(1, 2), q(1, 1), q(2, 1)] {
            let c = config(spec.clone(), gamma, q(1, 20), 16, StepMode::PerSide);
            let step = per_side_step(&c, &c.initial).unwrap();
            let chosen = step.next.unwrap();
            let model = per_side_model_energy(&c, &c.initial, &chosen);
            let family = CandidateFamily::new(c.initial, 8);
            for (_, r) in family.candidates(&spec) {
                assert!(model <= per_side_model_energy(&c, &c.initial, &r));
            }
        }
    }

    #[test]
    fn nested_homogeneous_comparison() {
        let h = MediumSpec::homogeneous(Rational::one()).unwrap();
        let c = config(h.clone(), q(1, 1), q(1, 10), 14, StepMode::BruteForce);
        let inner = AlphaRectangle::from_bounds(&h, 2, 10, 3, 12).unwrap();
        let outer = c.initial.to_lattice_set(c.epsilon.clone()).unwrap();
        assert!(comparison_check(&c, &inner, &outer, 4).unwrap());
        assert!(comparison_check(&c, &c.initial, &outer, 4).unwrap());
        let far = AlphaRectangle::from_bounds(&h, 20, 30, 0, 10).unwrap();
        assert!(comparison_check_complement(&c, &far, &c.initial, 4).unwrap());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("per-side".parse::<StepMode>().unwrap(), StepMode::PerSide);
        assert_eq!("brute".parse::<StepMode>().unwrap(), StepMode::BruteForce);
        assert!("fast".parse::<StepMode>().is_err());
    }

    fn arb_config() -> impl Strategy<Value = FlowConfig> {
        (1i64..4, 0i64..3, 1i64..4, 10i64..24, prop::sample::select(vec![q(1, 10), q(1, 20)]), 0i64..6)
            .prop_map(|(na, nb, g, side, eps, origin)| {
                let spec = medium(na, nb);
                let sq = AlphaRectangle::square_at_least(&spec, origin, side).unwrap();
                FlowConfig::new(spec, q(g, 2), eps, sq, 6, StepMode::PerSide).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn per_side_run_invariants(c in arb_config()) {
            let run = run_flow(&c).unwrap();
            for w in run.rects.windows(2) {
                let (prev, next) = (&w[0], &w[1]);
                prop_assert!(next.is_alpha_type(&c.spec));
                prop_assert!(prev.contains_rect(next));
                let exact = exact_energy(&c, prev, next);
                prop_assert!(exact <= per_side_model_energy(&c, prev, next));
                prop_assert!(exact <= rect_perimeter_energy(&c.spec, prev, &c.epsilon));
                for (side, n) in Side::ALL.iter().zip(prev.displacements_to(next)) {
                    let l = &c.epsilon * prev.side_length(*side);
                    let lhs = Rational::from_integer((n - c.spec.n_beta()).pow(2)) * &l;
                    prop_assert!(lhs <= c.spec.alpha() * &c.gamma * 4 * n || n <= c.spec.n_beta());
                }
            }
        }

        #[test]
        fn brute_force_energy_descent(c in arb_config()) {
            let step = brute_force_auto(&c, &c.initial, TieBreak::SmallestMeasure).unwrap();
            prop_assert!(step.energy <= rect_perimeter_energy(&c.spec, &c.initial, &c.epsilon));
            prop_assert!(step.next.is_alpha_type(&c.spec));
        }
    }
}
