//! Algebraic velocity laws for media with `N_β ∈ {1, 2}`.
//!
//! With `N = ⌊2αY⌋` the homogeneous step, the side's long-run behaviour is
//! decided by congruences of `N` modulo `m = N_α + N_β`: the residues the
//! orbit can hit before it meets an inclusion fix whether the motion is
//! slowed down, sped up or unchanged.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::MediumSpec;
use crate::numeric::{gcd, min_congruence_solution, Rational};
use crate::orbit::{is_singular, pinning_y, VelocityResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    /// Below the pinning threshold.
    Pinned,
    /// Coprime, the orbit is trapped behind an inclusion: `f < ⌊2αY⌋`.
    A1Decel,
    /// Coprime, the orbit jumps over an inclusion: `f > ⌊2αY⌋`.
    A1Accel,
    /// Coprime, both behaviours occur in one period and cancel.
    A1Balanced,
    /// Not coprime: the side never meets an inclusion.
    A2NoDefect,
    B,
    C,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::Pinned => "pinned",
            CaseLabel::A1Decel => "a1_decel",
            CaseLabel::A1Accel => "a1_accel",
            CaseLabel::A1Balanced => "a1_balanced",
            CaseLabel::A2NoDefect => "a2_no_defect",
            CaseLabel::B => "b",
            CaseLabel::C => "c",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseTag {
    pub label: CaseLabel,
    pub n_bar: Option<u64>,
    pub k_bar: Option<u64>,
    pub k_min: Option<u64>,
}

impl CaseTag {
    fn plain(label: CaseLabel) -> Self {
        CaseTag { label, n_bar: None, k_bar: None, k_min: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedForm {
    pub value: Rational,
    pub tag: CaseTag,
}

impl ClosedForm {
    pub fn to_velocity(&self) -> VelocityResult {
        VelocityResult::regular(self.value.clone(), None, None)
    }
}

fn medium(n_alpha: i64, n_beta: i64, alpha: &Rational) -> Result<MediumSpec> {
    MediumSpec::new(alpha.clone(), alpha + 1, n_alpha, n_beta)
}

fn check_input(spec: &MediumSpec, y: &Rational) -> Result<()> {
    if !y.is_positive() {
        return Err(Error::InvalidArgument(format!("y must be positive, got {y}")));
    }
    if is_singular(spec, y) {
        return Err(Error::Singular(y.to_string()));
    }
    Ok(())
}

/// `⌊2αY⌋` and its split `N = k + j·m`.
fn split(alpha: &Rational, y: &Rational, m: i64) -> Result<(i64, i64, i64)> {
    let n = (alpha * y * 2).floor_i64()?;
    Ok((n, n.rem_euclid(m), n.div_euclid(m)))
}

fn mcs(n: i64, c: i64, m: i64) -> Option<u64> {
    min_congruence_solution(n, c, m as u64)
}

/// Deceleration: `f = k_min m/(k_min m + 1) · N` with `n_min N ≡ 1 (mod m)`.
fn decel(n: i64, m: i64, label: CaseLabel) -> Result<ClosedForm> {
    let n_min = mcs(n, 1, m)
        .ok_or_else(|| Error::Internal(format!("no solution of n·{n} ≡ 1 mod {m}")))?;
    let k_min = (n_min as i64 * n - 1) / m;
    let km = Rational::from_integer(k_min * m);
    Ok(ClosedForm {
        value: &km / (&km + 1) * n,
        tag: CaseTag { label, n_bar: Some(n_min), k_bar: None, k_min: Some(k_min as u64) },
    })
}

/// `f` for `N_β = 1` at nonsingular `y` (`γ = 1`).
pub fn closed_form_velocity_nb1(n_alpha: i64, alpha: &Rational, y: &Rational) -> Result<ClosedForm> {
    let spec = medium(n_alpha, 1, alpha)?;
    check_input(&spec, y)?;
    if y < &pinning_y(&spec) {
        return Ok(ClosedForm { value: Rational::zero(), tag: CaseTag::plain(CaseLabel::Pinned) });
    }
    let m = n_alpha + 1;
    let (n, k, j) = split(alpha, y, m)?;
    // upper half of (N/(2α), (N+1)/(2α))
    let upper = alpha * y * 4 > 2 * n + 1;
    if k == 0 {
        return Ok(ClosedForm { value: n.into(), tag: CaseTag::plain(CaseLabel::C) });
    }
    if k == n_alpha {
        if upper {
            return Ok(ClosedForm {
                value: ((j + 1) * m).into(),
                tag: CaseTag { label: CaseLabel::C, n_bar: Some(1), k_bar: Some(j as u64), k_min: None },
            });
        }
        return decel(n, m, CaseLabel::B);
    }
    if gcd(n, m) != 1 {
        return Ok(ClosedForm { value: n.into(), tag: CaseTag::plain(CaseLabel::A2NoDefect) });
    }
    if !upper {
        return decel(n, m, CaseLabel::A1Decel);
    }
    let n_bar = mcs(n, n_alpha, m).expect("coprime");
    let k_bar = (n_bar as i64 * n - n_alpha) / m;
    let q = Rational::from_integer((k_bar + 1) * m);
    Ok(ClosedForm {
        value: &q / (&q - 1) * n,
        tag: CaseTag {
            label: CaseLabel::A1Accel,
            n_bar: Some(n_bar),
            k_bar: Some(k_bar as u64),
            k_min: None,
        },
    })
}

/// `f` for `N_β = 2` at nonsingular `y` (`γ = 1`).
///
/// Outside the block cases the orbit from `x = 0` moves by `N` until its
/// residue mod `m = N_α + 2` first lands on an inclusion column. Landing on
/// `N_α + 1` forces a one-cell forward jump, on `N_α` a one-cell retreat; the
/// first of these fixes the cycle length `t` and `f = (tN ± 1)/t`. If only
/// the retreat can happen, the cycle afterwards restarts at `−1` and either
/// returns to `0` via the retreat residues or is balanced.
pub fn closed_form_velocity_nb2(n_alpha: i64, alpha: &Rational, y: &Rational) -> Result<ClosedForm> {
    let spec = medium(n_alpha, 2, alpha)?;
    check_input(&spec, y)?;
    if y < &pinning_y(&spec) {
        return Ok(ClosedForm { value: Rational::zero(), tag: CaseTag::plain(CaseLabel::Pinned) });
    }
    let m = n_alpha + 2;
    let (n, k, j) = split(alpha, y, m)?;
    if k == n_alpha + 1 {
        return Ok(ClosedForm { value: ((j + 1) * m).into(), tag: CaseTag::plain(CaseLabel::B) });
    }
    if k == 0 {
        return Ok(ClosedForm { value: n.into(), tag: CaseTag::plain(CaseLabel::B) });
    }
    let t_accel = mcs(n, m - 1, m);
    let t_decel = mcs(n, m - 2, m);
    match (t_accel, t_decel) {
        (Some(ta), td) if td.is_none_or(|td| ta < td) => {
            let ta_i = ta as i64;
            let k_bar = (ta_i * n + 1) / m - 1;
            Ok(ClosedForm {
                value: Rational::new(ta_i * n + 1, ta_i),
                tag: CaseTag {
                    label: CaseLabel::A1Accel,
                    n_bar: Some(ta),
                    k_bar: Some(k_bar as u64),
                    k_min: None,
                },
            })
        }
        (_, None) => Ok(ClosedForm { value: n.into(), tag: CaseTag::plain(CaseLabel::A2NoDefect) }),
        (_, Some(_)) => {
            let s_decel = mcs(n, 1, m);
            let s_accel = mcs(n, 2, m);
            match (s_decel, s_accel) {
                (Some(sd), sa) if sa.is_none_or(|sa| sd < sa) => decel(n, m, CaseLabel::A1Decel),
                _ => Ok(ClosedForm { value: n.into(), tag: CaseTag::plain(CaseLabel::A1Balanced) }),
            }
        }
    }
}

/// Dispatch on `N_β` of `spec`; `γ = 1`, so `y = 1/L`.
pub fn closed_form_velocity(spec: &MediumSpec, y: &Rational) -> Result<ClosedForm> {
    match spec.n_beta() {
        1 => closed_form_velocity_nb1(spec.n_alpha(), spec.alpha(), y),
        2 => closed_form_velocity_nb2(spec.n_alpha(), spec.alpha(), y),
        nb => Err(Error::InvalidArgument(format!("no closed form for n_beta = {nb}"))),
    }
}

/// Closed-form values on the two components adjacent to a singular `y`.
pub fn closed_form_bracket(spec: &MediumSpec, y: &Rational) -> Result<(Rational, Rational)> {
    if !is_singular(spec, y) {
        let v = closed_form_velocity(spec, y)?.value;
        return Ok((v.clone(), v));
    }
    let h = (spec.alpha() * 8).recip();
    Ok((
        closed_form_velocity(spec, &(y - &h))?.value,
        closed_form_velocity(spec, &(y + &h))?.value,
    ))
}
