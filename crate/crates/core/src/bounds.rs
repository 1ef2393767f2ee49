//! Constants: the escape length `L₀`, the short-cut threshold `L̄(δ)`, the
//! recursive schedule `L(k)` and the final radius bound `R_n`.

use serde::{Deserialize, Serialize};

use crate::geom::{chord_distance, ray_exit_length};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoundsError {
    #[error("phi_max needs L > delta (L = {l}, delta = {delta})")]
    LengthBelowDelta { l: f64, delta: f64 },
    #[error("invalid parameter: {0}")]
    Domain(String),
    #[error("bisection bracket not found for delta = {delta}")]
    Bracket { delta: f64 },
    #[error("schedule leaves the double range at k = {k}; log-domain values attached")]
    Overflow { k: usize, schedule: Box<ConstantSchedule> },
}

/// Entries beyond this are carried as logarithms only.
pub const LOG_DOMAIN_THRESHOLD: f64 = 1e300;

/// `2 ln(2 + √3)`: the exit length from 𝒲 of a ray at 30° to its axis.
pub fn l0() -> f64 {
    2.0 * (2.0 + 3f64.sqrt()).ln()
}

/// Bound on the angle at the origin between the far endpoints of two
/// segments in 𝒲 that start within `delta` of the origin and have length at
/// least `l`.
pub fn phi_max(l: f64, delta: f64) -> Result<f64, BoundsError> {
    if !(l > delta) {
        return Err(BoundsError::LengthBelowDelta { l, delta });
    }
    Ok(2.0 * ((l - delta) / 2.0).tanh().acos())
}

fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

fn ln_cosh(x: f64) -> f64 {
    x.abs() - std::f64::consts::LN_2 + (-2.0 * x.abs()).exp().ln_1p()
}

/// Whether points at distance `delta + 5·big_delta` from the origin along
/// the two rays are within `big_delta` of each other, for segments of
/// length `l`. Written in logs: `sinh ρ · sech((L-δ)/2) < sinh(Δ/2)`.
fn chord_condition(l: f64, delta: f64, big_delta: f64) -> bool {
    let rho = delta + 5.0 * big_delta;
    ln_sinh(rho) - ln_cosh((l - delta) / 2.0) < ln_sinh(big_delta / 2.0)
}

/// Length beyond which two admissible segments can always be short-cut:
/// `3·max(L₂, 6Δ + 2δ)`.
pub fn lbar(delta: f64, big_delta: f64) -> Result<f64, BoundsError> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(BoundsError::Domain(format!("delta must be >= 0, got {delta}")));
    }
    if !(big_delta > 0.0) || !big_delta.is_finite() {
        return Err(BoundsError::Domain(format!("Delta must be > 0, got {big_delta}")));
    }
    let l1 = 2.0 * (delta + big_delta) + 1e-9;
    let l2 = if chord_condition(l1, delta, big_delta) {
        l1
    } else {
        let mut lo = l1;
        let mut step = (l1 - delta).max(1.0);
        let mut hi = lo + step;
        let mut tries = 0;
        while !chord_condition(hi, delta, big_delta) {
            lo = hi;
            step *= 2.0;
            hi = lo + step;
            tries += 1;
            if tries > 2000 || !hi.is_finite() {
                return Err(BoundsError::Bracket { delta });
            }
        }
        let tol = 1e-9f64.max(hi * 4.0 * f64::EPSILON);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if chord_condition(mid, delta, big_delta) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    Ok(3.0 * l2.max(6.0 * big_delta + 2.0 * delta))
}

/// `ln L̄(δ)` for `δ` given by its logarithm, valid when `δ` is far beyond
/// double range. There `L̄(δ) = 9δ` up to relative error below `1e-290`.
fn ln_lbar_huge(ln_delta: f64) -> f64 {
    9f64.ln() + ln_delta
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub k: usize,
    /// `L(k)`, or infinity when only the logarithm is available.
    pub value: f64,
    pub ln_value: f64,
    pub log_domain: bool,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantSchedule {
    pub delta: f64,
    pub l0: f64,
    pub entries: Vec<ScheduleEntry>,
}

impl ConstantSchedule {
    /// `L(k)`; infinite for log-domain entries.
    pub fn l(&self, k: usize) -> f64 {
        self.entries[k].value
    }

    pub fn ln_l(&self, k: usize) -> f64 {
        self.entries[k].ln_value
    }

    pub fn kmax(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn has_log_domain(&self) -> bool {
        self.entries.iter().any(|e| e.log_domain)
    }

    /// CSV with columns `k,L(k),provenance`; log-domain rows print `exp(..)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,L(k),provenance\n");
        for e in &self.entries {
            let v = if e.log_domain {
                format!("exp({:.17e})", e.ln_value)
            } else {
                format!("{:.17e}", e.value)
            };
            out.push_str(&format!("{},{},{}\n", e.k, v, e.provenance));
        }
        out
    }
}

/// Computes `L(0..=kmax)`: `L(0) = L₀`, `L(1) = 2L₀`, `L(k) = L̄(k·L(k-1))`.
///
/// If an entry exceeds [`LOG_DOMAIN_THRESHOLD`] the rest are carried as
/// logarithms and the schedule is returned inside [`BoundsError::Overflow`].
pub fn schedule(kmax: usize, big_delta: f64) -> Result<ConstantSchedule, BoundsError> {
    if !(big_delta > 0.0) || !big_delta.is_finite() {
        return Err(BoundsError::Domain(format!("Delta must be > 0, got {big_delta}")));
    }
    let base = l0();
    let mut entries = vec![ScheduleEntry {
        k: 0,
        value: base,
        ln_value: base.ln(),
        log_domain: false,
        provenance: "escape length of a ray at 30 degrees to the horoball axis".into(),
    }];
    let mut overflow_at = None;
    for k in 1..=kmax {
        let prev = &entries[k - 1];
        let entry = if k == 1 {
            ScheduleEntry {
                k,
                value: 2.0 * base,
                ln_value: (2.0 * base).ln(),
                log_domain: false,
                provenance: "twice L(0)".into(),
            }
        } else {
            let ln_delta = (k as f64).ln() + prev.ln_value;
            let delta = k as f64 * prev.value;
            let provenance = format!("short-cut threshold at delta = {k} L({})", k - 1);
            match (!prev.log_domain && delta.is_finite())
                .then(|| lbar(delta, big_delta))
                .transpose()?
                .filter(|v| *v <= LOG_DOMAIN_THRESHOLD)
            {
                Some(v) => ScheduleEntry {
                    k,
                    value: v,
                    ln_value: v.ln(),
                    log_domain: false,
                    provenance,
                },
                None => {
                    overflow_at.get_or_insert(k);
                    ScheduleEntry {
                        k,
                        value: f64::INFINITY,
                        ln_value: ln_lbar_huge(ln_delta),
                        log_domain: true,
                        provenance: format!("{provenance} (log domain)"),
                    }
                }
            }
        };
        entries.push(entry);
    }
    let s = ConstantSchedule {
        delta: big_delta,
        l0: base,
        entries,
    };
    match overflow_at {
        Some(k) => Err(BoundsError::Overflow {
            k,
            schedule: Box::new(s),
        }),
        None => Ok(s),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub delta: f64,
    /// `[3(n-1)]² · L(3(n-1))`.
    pub r: f64,
    /// `max(R, 3(n-1) · L(3(n-1) - 1))`.
    pub r_n: f64,
    /// The sharp rank-two value `2L₀`, reported only for `n = 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sharp_r2: Option<f64>,
    pub schedule: ConstantSchedule,
}

/// Radius bound for fundamental groups of rank `n`.
pub fn r_n(n: usize, big_delta: f64) -> Result<BoundReport, BoundsError> {
    if n < 2 {
        return Err(BoundsError::Domain(format!("n must be >= 2, got {n}")));
    }
    let w = 3 * (n - 1);
    let s = schedule(w, big_delta)?;
    let wf = w as f64;
    let r = wf * wf * s.l(w);
    let r_n = r.max(wf * s.l(w - 1));
    Ok(BoundReport {
        n,
        delta: big_delta,
        r,
        r_n,
        sharp_r2: (n == 2).then(|| 2.0 * l0()),
        schedule: s,
    })
}

/// Same as [`r_n`] but in the log domain: `(ln R, ln R_n)`.
pub fn ln_r_n(s: &ConstantSchedule, n: usize) -> (f64, f64) {
    let w = 3 * (n - 1);
    let lw = (w as f64).ln();
    let ln_r = 2.0 * lw + s.ln_l(w);
    let other = lw + s.ln_l(w - 1);
    (ln_r, ln_r.max(other))
}

/// Checks chord bound `chord_distance(δ+5Δ, φ_max(L, δ)) < Δ` directly,
/// without the log-domain rewriting.
pub fn chord_bound_holds(l: f64, delta: f64, big_delta: f64) -> bool {
    match phi_max(l, delta) {
        Ok(phi) => chord_distance(delta + 5.0 * big_delta, phi) < big_delta,
        Err(_) => false,
    }
}

/// `L₀` again, as the exit length of a ray at 30°.
pub fn l0_from_ray() -> f64 {
    ray_exit_length(std::f64::consts::PI / 6.0)
}
