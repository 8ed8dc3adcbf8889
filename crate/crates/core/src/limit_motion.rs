//! Exact event-driven integration of the limiting rectangle evolution
//! `L̇₁ = −(2/γ) f(γ/L₂)`, `L̇₂ = −(2/γ) f(γ/L₁)`.
//!
//! `f` is constant on the components of `(0, ∞) ∖ S_β`, so the trajectory is
//! piecewise linear with breakpoints where some `L_i` reaches `4αγ/m`.

use std::cell::RefCell;
use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::MediumSpec;
use crate::numeric::Rational;
use crate::orbit::{effective_velocity, pinning_threshold};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RectState {
    pub l1: Rational,
    pub l2: Rational,
    pub t: Rational,
}

impl RectState {
    pub fn new(l1: Rational, l2: Rational) -> Self {
        RectState { l1, l2, t: Rational::zero() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Both sides above the pinning threshold.
    Pinned,
    /// Both sides at or below it, one strictly.
    Vanishing,
    Mixed,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Pinned => "pinned",
            Regime::Vanishing => "vanishing",
            Regime::Mixed => "mixed",
        })
    }
}

pub fn classify_regime(spec: &MediumSpec, gamma: &Rational, l1: &Rational, l2: &Rational) -> Regime {
    let threshold = pinning_threshold(spec, gamma);
    let (short, long) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
    if short > &threshold {
        Regime::Pinned
    } else if short < &threshold && long <= &threshold {
        Regime::Vanishing
    } else {
        Regime::Mixed
    }
}

/// A piece of the trajectory on which both slopes are constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub t_start: Rational,
    pub t_end: Rational,
    pub l1_start: Rational,
    pub l2_start: Rational,
    pub slope1: Rational,
    pub slope2: Rational,
}

impl Segment {
    pub fn l1_end(&self) -> Rational {
        &self.l1_start + &self.slope1 * (&self.t_end - &self.t_start)
    }

    pub fn l2_end(&self) -> Rational {
        &self.l2_start + &self.slope2 * (&self.t_end - &self.t_start)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TimeLimit,
    /// Both velocities vanish; the state never changes again.
    PermanentlyPinned,
    /// The remaining time to extinction is below the tail tolerance.
    Extinction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RectTrajectory {
    pub segments: Vec<Segment>,
    /// Bracket `[lower, upper]` for the extinction time, when reached.
    pub extinction_time: Option<(Rational, Rational)>,
    pub regime: Regime,
    pub stop: StopReason,
    pub final_state: RectState,
}

impl RectTrajectory {
    /// Side lengths at time `t` within the integrated range.
    pub fn state_at(&self, t: &Rational) -> Option<(Rational, Rational)> {
        let seg = self.segments.iter().find(|s| &s.t_start <= t && t <= &s.t_end)?;
        let dt = t - &seg.t_start;
        Some((&seg.l1_start + &seg.slope1 * &dt, &seg.l2_start + &seg.slope2 * &dt))
    }
}

#[derive(Clone, Debug)]
pub struct IntegrateOptions {
    pub t_max: Rational,
    /// Stop once both sides are short enough that the remaining lifetime is
    /// provably at most this.
    pub tail_tolerance: Rational,
    pub max_events: usize,
}

impl IntegrateOptions {
    pub fn new(t_max: Rational) -> Self {
        IntegrateOptions { t_max, tail_tolerance: Rational::new(1, 1_000_000), max_events: 1_000_000 }
    }
}

/// `f` on the component `(c/(4α), (c+1)/(4α))`, memoized.
struct ComponentVelocity<'a> {
    spec: &'a MediumSpec,
    cache: RefCell<HashMap<i64, Rational>>,
}

impl<'a> ComponentVelocity<'a> {
    fn new(spec: &'a MediumSpec) -> Self {
        ComponentVelocity { spec, cache: RefCell::new(HashMap::new()) }
    }

    fn get(&self, c: i64) -> Result<Rational> {
        if c < 0 {
            return Ok(Rational::zero());
        }
        if let Some(v) = self.cache.borrow().get(&c) {
            return Ok(v.clone());
        }
        let mid = Rational::from_integer(2 * c + 1) / (self.spec.alpha() * 8);
        let v = effective_velocity(self.spec, &mid)?
            .value
            .ok_or_else(|| Error::Internal(format!("component midpoint {mid} is singular")))?;
        self.cache.borrow_mut().insert(c, v.clone());
        Ok(v)
    }
}

/// `4αγ/L`, and whether it is an integer (`γ/L ∈ S_β`).
fn component_of(spec: &MediumSpec, gamma: &Rational, l: &Rational) -> Result<(i64, bool)> {
    let z = spec.alpha() * gamma * 4 / l;
    Ok((z.floor_i64()?, z.is_integer()))
}

/// Slopes at the current state. At a breakpoint the value of the component
/// the side is about to enter is used when that side is moving, the one it
/// sits on top of otherwise; the smallest consistent choice is taken.
fn slopes(
    spec: &MediumSpec,
    gamma: &Rational,
    fv: &ComponentVelocity,
    l1: &Rational,
    l2: &Rational,
) -> Result<(Rational, Rational)> {
    let (c1, sing1) = component_of(spec, gamma, l1)?;
    let (c2, sing2) = component_of(spec, gamma, l2)?;
    let factor = Rational::from_integer(-2) / gamma;
    let value = |c: i64, singular: bool, moving: bool| -> Result<Rational> {
        if singular && !moving {
            fv.get(c - 1)
        } else {
            fv.get(c)
        }
    };
    let (mut moving1, mut moving2) = (false, false);
    loop {
        let s1 = &factor * value(c2, sing2, moving2)?;
        let s2 = &factor * value(c1, sing1, moving1)?;
        let (m1, m2) = (s1.is_negative(), s2.is_negative());
        if (m1, m2) == (moving1, moving2) {
            return Ok((s1, s2));
        }
        moving1 |= m1;
        moving2 |= m2;
    }
}

/// Time for a side of length `l` moving at `slope < 0` to reach the next breakpoint.
fn time_to_breakpoint(spec: &MediumSpec, gamma: &Rational, l: &Rational, slope: &Rational) -> Result<Rational> {
    let (c, _) = component_of(spec, gamma, l)?;
    let next = spec.alpha() * gamma * 4 / (c + 1);
    Ok((l - next) / (-slope))
}

/// [`integrate_with`] with default tolerances.
pub fn integrate(spec: &MediumSpec, gamma: &Rational, initial: &RectState, t_max: &Rational) -> Result<RectTrajectory> {
    integrate_with(spec, gamma, initial, &IntegrateOptions::new(t_max.clone()))
}

pub fn integrate_with(
    spec: &MediumSpec,
    gamma: &Rational,
    initial: &RectState,
    options: &IntegrateOptions,
) -> Result<RectTrajectory> {
    if !initial.l1.is_positive() || !initial.l2.is_positive() {
        return Err(Error::InvalidArgument("initial side lengths must be positive".into()));
    }
    if !gamma.is_positive() {
        return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    if options.t_max < initial.t {
        return Err(Error::InvalidArgument("t_max precedes the initial time".into()));
    }
    let fv = ComponentVelocity::new(spec);
    let regime = classify_regime(spec, gamma, &initial.l1, &initial.l2);
    // Once both sides are below this, f(γ/L) ≥ αγ/L and max(L₁, L₂)² shrinks
    // at rate ≥ 4α.
    let tail_length = spec.alpha() * gamma / (spec.n_beta() + 1);
    let tail_rate = spec.alpha() * 4;

    let (mut l1, mut l2, mut t) = (initial.l1.clone(), initial.l2.clone(), initial.t.clone());
    let mut segments: Vec<Segment> = Vec::new();
    let mut events = 0usize;
    let stop = loop {
        let longest = l1.clone().max(l2.clone());
        if longest <= tail_length {
            let remaining = &longest * &longest / &tail_rate;
            if remaining <= options.tail_tolerance {
                let bracket = (t.clone(), &t + remaining);
                break (StopReason::Extinction, Some(bracket));
            }
        }
        if t >= options.t_max {
            break (StopReason::TimeLimit, None);
        }
        let (s1, s2) = slopes(spec, gamma, &fv, &l1, &l2)?;
        let pinned = s1.is_zero() && s2.is_zero();
        let mut t_end = options.t_max.clone();
        if !pinned {
            for (l, s) in [(&l1, &s1), (&l2, &s2)] {
                if s.is_negative() {
                    let dt = time_to_breakpoint(spec, gamma, l, s)?;
                    t_end = t_end.min(&t + dt);
                }
            }
        }
        let dt = &t_end - &t;
        let merged = match segments.last_mut() {
            Some(last) if last.slope1 == s1 && last.slope2 == s2 => {
                last.t_end = t_end.clone();
                true
            }
            _ => false,
        };
        if !merged {
            segments.push(Segment {
                t_start: t.clone(),
                t_end: t_end.clone(),
                l1_start: l1.clone(),
                l2_start: l2.clone(),
                slope1: s1.clone(),
                slope2: s2.clone(),
            });
        }
        l1 += &s1 * &dt;
        l2 += &s2 * &dt;
        t = t_end;
        if pinned {
            break (StopReason::PermanentlyPinned, None);
        }
        events += 1;
        if events > options.max_events {
            return Err(Error::Internal(format!(
                "more than {} events before t = {t}; L₁ = {l1}, L₂ = {l2}",
                options.max_events
            )));
        }
    };
    Ok(RectTrajectory {
        segments,
        extinction_time: stop.1,
        regime,
        stop: stop.0,
        final_state: RectState { l1, l2, t },
    })
}
