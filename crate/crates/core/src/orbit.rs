//! One-dimensional reduction of the motion of a single side.
//!
//! A side at position `x` with `Y = γ/L` moves by a minimizer `N ≥ 0` of
//! `−2αN + N(N+1)/(2Y)` subject to landing on an α-column, i.e.
//! `(x + N) mod N_αβ < N_α`. Iterating gives an eventually periodic orbit
//! whose mean speed is the effective velocity `f(Y)`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::MediumSpec;
use crate::numeric::Rational;

/// True iff `4αy` is an integer, where the step minimizer may fail to be unique.
pub fn is_singular(spec: &MediumSpec, y: &Rational) -> bool {
    (spec.alpha() * y * 4).is_integer()
}

/// Parabola vertex `X = 2αY − 1/2`.
pub fn vertex(spec: &MediumSpec, y: &Rational) -> Rational {
    spec.alpha() * y * 2 - Rational::new(1, 2)
}

/// Cost of a step of `n` cells.
pub fn step_cost(spec: &MediumSpec, y: &Rational, n: i64) -> Rational {
    Rational::from_integer(n * (n + 1)) / (y * 2) - spec.alpha() * 2 * n
}

/// All minimizing steps from position `x`, in increasing order (one element
/// unless `y` is singular, at most two).
pub fn step_minimizer(spec: &MediumSpec, y: &Rational, x: i64) -> Result<Vec<i64>> {
    if !y.is_positive() {
        return Err(Error::InvalidArgument(format!("y must be positive, got {y}")));
    }
    let x_vertex = vertex(spec, y);
    let admissible = |n: i64| spec.is_alpha_residue(x + n);
    let fl = x_vertex.floor_i64()?;
    let mut candidates = Vec::with_capacity(2);
    if fl >= 0 {
        if let Some(below) = (0..=fl).rev().take(spec.period() as usize).find(|&n| admissible(n)) {
            candidates.push(below);
        }
    }
    let start = (fl + 1).max(0);
    let above = (start..start + spec.period())
        .find(|&n| admissible(n))
        .expect("every window of N_αβ consecutive columns contains an α-column");
    candidates.push(above);

    let dist = |n: i64| (Rational::from_integer(n) - &x_vertex).abs();
    let best = candidates.iter().map(|&n| dist(n)).min().expect("nonempty");
    Ok(candidates.into_iter().filter(|&n| dist(n) == best).collect())
}

/// The orbit `x_{k+1} = x_k + N̄_k` and its detected period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitTrace {
    pub y: Rational,
    pub x0: i64,
    /// `x_0, …, x_K` up to the first repeat of a residue.
    pub positions: Vec<i64>,
    /// `N̄_0, …, N̄_{K−1}`.
    pub steps: Vec<i64>,
    /// `k̄`: smallest index from which the orbit is periodic.
    pub pre_period: usize,
    /// `M`: steps per period.
    pub period_steps: usize,
    /// `n·N_αβ`: cells advanced per period.
    pub period_cells: i64,
}

impl OrbitTrace {
    /// `n`, the number of medium periods crossed per orbit period.
    pub fn period_turns(&self, spec: &MediumSpec) -> i64 {
        self.period_cells / spec.period()
    }

    /// Mean velocity `n·N_αβ / M`.
    pub fn velocity(&self) -> Rational {
        Rational::new(self.period_cells, self.period_steps as i64)
    }

    /// `x_k` for any `k`, continuing the recorded trace periodically.
    pub fn position(&self, k: usize) -> i64 {
        if k < self.positions.len() {
            return self.positions[k];
        }
        let j = k - self.pre_period;
        let (q, r) = (j / self.period_steps, j % self.period_steps);
        self.positions[self.pre_period + r] + q as i64 * self.period_cells
    }

    /// `N̄_k` for any `k`.
    pub fn step(&self, k: usize) -> i64 {
        self.position(k + 1) - self.position(k)
    }
}

/// Iterate the scheme from `x0` until a residue repeats.
pub fn run_orbit(spec: &MediumSpec, y: &Rational, x0: i64) -> Result<OrbitTrace> {
    if !y.is_positive() {
        return Err(Error::InvalidArgument(format!("y must be positive, got {y}")));
    }
    if is_singular(spec, y) {
        return Err(Error::Singular(y.to_string()));
    }
    let period = spec.period();
    let mut positions = vec![x0];
    let mut steps = Vec::new();
    let mut seen: HashMap<i64, usize> = HashMap::new();
    let cap = spec.n_alpha() as usize + 2;
    for k in 1..=cap {
        let x = *positions.last().expect("nonempty");
        let step = match step_minimizer(spec, y, x)?.as_slice() {
            &[n] => n,
            other => {
                return Err(Error::Internal(format!("non-unique step {other:?} at nonsingular y = {y}")))
            }
        };
        steps.push(step);
        positions.push(x + step);
        let residue = (x + step).rem_euclid(period);
        if let Some(&j) = seen.get(&residue) {
            let m = k - j;
            let cells = positions[k] - positions[j];
            // steps depend only on the residue, so the period may start earlier
            let mut pre = j;
            while pre > 0 && positions[pre - 1 + m] - positions[pre - 1] == cells {
                pre -= 1;
            }
            return Ok(OrbitTrace {
                y: y.clone(),
                x0,
                positions,
                steps,
                pre_period: pre,
                period_steps: m,
                period_cells: cells,
            });
        }
        seen.insert(residue, k);
    }
    Err(Error::Internal(format!("no period detected within {cap} steps at y = {y}")))
}

/// Effective velocity at `y`, bracketed by the neighbouring components when `y` is singular.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VelocityResult {
    pub value: Option<Rational>,
    pub lower: Rational,
    pub upper: Rational,
    pub singular: bool,
    /// `M` of the orbit from `x0 = 0`; absent when singular.
    pub period_steps: Option<usize>,
    /// `n` of the orbit from `x0 = 0`; absent when singular.
    pub period_turns: Option<i64>,
}

impl VelocityResult {
    pub fn regular(value: Rational, period_steps: Option<usize>, period_turns: Option<i64>) -> Self {
        VelocityResult {
            lower: value.clone(),
            upper: value.clone(),
            value: Some(value),
            singular: false,
            period_steps,
            period_turns,
        }
    }

    pub fn bracket(lower: Rational, upper: Rational) -> Self {
        VelocityResult { value: None, lower, upper, singular: true, period_steps: None, period_turns: None }
    }
}

fn regular_velocity(spec: &MediumSpec, y: &Rational) -> Result<VelocityResult> {
    let trace = run_orbit(spec, y, 0)?;
    Ok(VelocityResult::regular(
        trace.velocity(),
        Some(trace.period_steps),
        Some(trace.period_turns(spec)),
    ))
}

/// `f(Y) = n·N_αβ/M`, or the bracket `[f(Y − 1/(8α)), f(Y + 1/(8α))]` at singular `Y`.
pub fn effective_velocity(spec: &MediumSpec, y: &Rational) -> Result<VelocityResult> {
    if !y.is_positive() {
        return Err(Error::InvalidArgument(format!("y must be positive, got {y}")));
    }
    if !is_singular(spec, y) {
        return regular_velocity(spec, y);
    }
    let half_width = (spec.alpha() * 8).recip();
    let lower = regular_velocity(spec, &(y - &half_width))?.lower;
    let upper = regular_velocity(spec, &(y + &half_width))?.upper;
    Ok(VelocityResult::bracket(lower, upper))
}

/// `f(Y) = ⌊2αY⌋` of the homogeneous medium.
pub fn homogeneous_velocity(alpha: &Rational, y: &Rational) -> Rational {
    Rational::from_bigint((alpha * y * 2).floor())
}

/// `L̄ = 4γα/(N_β + 2)`.
pub fn pinning_threshold(spec: &MediumSpec, gamma: &Rational) -> Rational {
    gamma * spec.alpha() * 4 / (spec.n_beta() + 2)
}

/// `Ȳ = (N_β + 2)/(4α)`; `f` vanishes below it.
pub fn pinning_y(spec: &MediumSpec) -> Rational {
    Rational::from_integer(spec.n_beta() + 2) / (spec.alpha() * 4)
}

/// Midpoints of the components `(m/(4α), (m+1)/(4α))` lying in `(0, y_max]`.
pub fn component_midpoints(alpha: &Rational, y_max: &Rational) -> Vec<Rational> {
    let width = (alpha * 4).recip();
    let mut out = Vec::new();
    let mut y = &width / 2;
    while &y <= y_max {
        out.push(y.clone());
        y += &width;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn medium(alpha: Rational, na: i64, nb: i64) -> MediumSpec {
        let beta = &alpha + 1;
        MediumSpec::new(alpha, beta, na, nb).unwrap()
    }

    fn unit(na: i64, nb: i64) -> MediumSpec {
        medium(Rational::one(), na, nb)
    }

    fn brute_minimizers(spec: &MediumSpec, y: &Rational, x: i64) -> Vec<i64> {
        let limit = (spec.alpha() * y * 2).floor_i64().unwrap() + 2 * spec.period() + 2;
        let admissible: Vec<i64> = (0..=limit).filter(|&n| spec.is_alpha_residue(x + n)).collect();
        let best = admissible.iter().map(|&n| step_cost(spec, y, n)).min().unwrap();
        admissible.into_iter().filter(|&n| step_cost(spec, y, n) == best).collect()
    }

    #[test]
    fn singular_examples() {
        assert!(is_singular(&unit(1, 1), &q(3, 4)));
        assert!(!is_singular(&unit(1, 1), &q(11, 10)));
        assert!(is_singular(&medium(q(1, 2), 1, 1), &q(1, 2)));
    }

    #[test]
    fn step_examples() {
        let h = MediumSpec::homogeneous(Rational::one()).unwrap();
        for x in -3..3 {
            assert_eq!(step_minimizer(&h, &q(13, 10), x).unwrap(), vec![2]);
        }
        assert_eq!(step_minimizer(&unit(2, 1), &q(11, 10), 0).unwrap(), vec![1]);
        assert_eq!(step_minimizer(&unit(2, 1), &q(7, 5), 0).unwrap(), vec![3]);
    }

    #[test]
    fn orbit_examples() {
        let s = unit(2, 1);
        let t = run_orbit(&s, &q(11, 10), 0).unwrap();
        assert_eq!(&t.steps[..2], &[1, 2]);
        assert_eq!((t.period_steps, t.period_turns(&s)), (2, 1));
        assert_eq!((0..5).map(|k| t.position(k)).collect::<Vec<_>>(), vec![0, 1, 3, 4, 6]);
        assert_eq!(t.velocity(), q(3, 2));

        let t = run_orbit(&s, &q(7, 5), 0).unwrap();
        assert!(t.steps.iter().all(|&n| n == 3));
        assert_eq!((t.period_steps, t.period_turns(&s)), (1, 1));

        assert!(run_orbit(&s, &q(3, 4), 0).is_err());
    }

    #[test]
    fn pinned_orbit_is_constant() {
        for (na, nb) in [(1, 1), (2, 1), (1, 2), (4, 3)] {
            let s = unit(na, nb);
            let y = pinning_y(&s) - q(1, 100);
            // a side just in front of an inclusion never moves
            let t = run_orbit(&s, &y, na - 1).unwrap();
            assert!(t.steps.iter().all(|&n| n == 0));
            assert_eq!((t.period_steps, t.period_cells), (1, 0));
            // from elsewhere it may creep up to the inclusion first
            for x0 in 0..s.period() {
                let t = run_orbit(&s, &y, x0).unwrap();
                assert_eq!((t.period_steps, t.period_cells), (1, 0));
            }
        }
    }

    #[test]
    fn velocity_examples() {
        assert_eq!(effective_velocity(&unit(1, 1), &q(1, 1)).unwrap().value, None);
        // y = 1 is singular for α = 1; both neighbours agree with 2⌊y + 1/4⌋ = 2
        let r = effective_velocity(&unit(1, 1), &q(1, 1)).unwrap();
        assert_eq!((r.lower, r.upper), (q(2, 1), q(2, 1)));
        assert_eq!(effective_velocity(&unit(1, 1), &q(11, 10)).unwrap().value, Some(q(2, 1)));
        assert_eq!(effective_velocity(&unit(1, 2), &q(6, 5)).unwrap().value, Some(q(3, 1)));
        assert_eq!(effective_velocity(&unit(2, 1), &q(11, 10)).unwrap().value, Some(q(3, 2)));
    }

    #[test]
    fn threshold_examples() {
        let one = Rational::one();
        assert_eq!(pinning_threshold(&unit(2, 1), &one), q(4, 3));
        assert_eq!(pinning_threshold(&MediumSpec::homogeneous(one.clone()).unwrap(), &one), 2);
        assert_eq!(pinning_threshold(&unit(1, 2), &one), 1);
    }

    #[test]
    fn minimizer_matches_cost_enumeration() {
        for (na, nb) in [(1, 0), (1, 1), (2, 1), (1, 2), (3, 2), (2, 3)] {
            for alpha in [q(1, 1), q(1, 2), q(3, 2)] {
                let s = medium(alpha, na, nb);
                for i in 1..80 {
                    let y = q(i, 16);
                    for x in 0..s.period() {
                        let got = step_minimizer(&s, &y, x).unwrap();
                        assert_eq!(got, brute_minimizers(&s, &y, x), "{na} {nb} y={y} x={x}");
                        assert!(got.len() == 1 || is_singular(&s, &y));
                    }
                }
            }
        }
    }

    #[test]
    fn homogeneous_orbit_is_floor() {
        let h = MediumSpec::homogeneous(q(3, 2)).unwrap();
        for y in component_midpoints(&q(3, 2), &q(20, 1)) {
            let v = effective_velocity(&h, &y).unwrap();
            assert_eq!(v.value, Some(homogeneous_velocity(&q(3, 2), &y)));
        }
    }

    #[test]
    fn midpoints_grid() {
        let m = component_midpoints(&Rational::one(), &q(1, 1));
        assert_eq!(m, vec![q(1, 8), q(3, 8), q(5, 8), q(7, 8)]);
    }

    fn arb_case() -> impl Strategy<Value = (MediumSpec, Rational)> {
        (1i64..8, 0i64..4, prop::sample::select(vec![q(1, 1), q(1, 2), q(3, 2), q(2, 3)]), 0i64..200)
            .prop_map(|(na, nb, alpha, m)| {
                let y = (Rational::from_integer(2 * m + 1)) / (&alpha * 8);
                (medium(alpha, na, nb), y)
            })
    }

    proptest! {
        #[test]
        fn orbit_invariants((s, y) in arb_case()) {
            let reference = run_orbit(&s, &y, 0).unwrap().velocity();
            for x0 in 0..s.period() {
                let t = run_orbit(&s, &y, x0).unwrap();
                prop_assert_eq!(t.velocity(), reference.clone());
                prop_assert!(t.pre_period <= s.n_alpha() as usize);
                prop_assert!(t.period_steps <= s.n_alpha() as usize);
                prop_assert_eq!(t.period_cells % s.period(), 0);
                for k in 0..t.steps.len() {
                    prop_assert_eq!(t.positions[k + 1], t.positions[k] + t.steps[k]);
                    prop_assert!(t.steps[k] >= 0);
                }
                for k in 1..t.positions.len() {
                    prop_assert!(s.is_alpha_residue(t.positions[k]));
                }
                for k in t.pre_period..t.pre_period + 3 * t.period_steps {
                    prop_assert_eq!(t.position(k + t.period_steps), t.position(k) + t.period_cells);
                }
            }
        }

        #[test]
        fn orbit_monotone_in_initial_datum((s, y) in arb_case()) {
            let traces: Vec<_> = (0..s.period()).map(|x0| run_orbit(&s, &y, x0).unwrap()).collect();
            for a in 0..traces.len() {
                for b in a..traces.len() {
                    for k in 0..3 * s.period() as usize {
                        prop_assert!(traces[a].position(k) <= traces[b].position(k));
                    }
                }
            }
        }

        #[test]
        fn step_bound_after_first_step((s, y) in arb_case()) {
            prop_assume!(s.n_beta() >= 1);
            let x = vertex(&s, &y);
            let t = run_orbit(&s, &y, 0).unwrap();
            for k in 0..6 {
                let n = Rational::from_integer(t.step(k));
                prop_assert!((n - &x).abs() <= s.n_beta());
            }
        }
    }
}
