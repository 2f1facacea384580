//! Least-squares exponent estimation on transformed axes.
//!
//! Power laws `y ∝ x^a` are fitted as a line on `(ln x, ln y)`, exponentials
//! `y ∝ e^{bx}` on `(x, ln y)`. Every fit goes through the same filter chain:
//! nonpositive values, undersized classes, the configured abscissa range,
//! tie merging and finally the upper tail trim.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::kcore::ShellStats;
use crate::pa_measure::{phi_within_shell, pi_among_shells, AttachmentStats, HybridStats, LocalizedCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    PowerLaw,
    Exponential,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::PowerLaw => "power_law",
            Model::Exponential => "exponential",
        })
    }
}

/// One observation; `class_size` is the number of nodes behind it, if known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub x: f64,
    pub y: f64,
    pub class_size: Option<u64>,
}

impl FitPoint {
    pub fn new(x: f64, y: f64) -> Self {
        FitPoint {
            x,
            y,
            class_size: None,
        }
    }

    pub fn sized(x: f64, y: f64, class_size: u64) -> Self {
        FitPoint {
            x,
            y,
            class_size: Some(class_size),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Points backed by fewer nodes than this are dropped.
    pub min_class_size: u64,
    /// Fraction of the highest-abscissa points dropped (rounded up).
    pub tail_trim: f64,
    /// Inclusive abscissa bounds.
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    /// Drop the `x = 0` class (degree 0 / coreness 0).
    pub drop_zero_class: bool,
    /// Minimum points for a reported fit.
    pub min_points: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            min_class_size: 5,
            tail_trim: 0.01,
            x_min: None,
            x_max: None,
            drop_zero_class: true,
            min_points: 3,
        }
    }
}

impl FitOptions {
    /// No filtering beyond positivity; used for exact-data checks.
    pub fn unfiltered() -> Self {
        FitOptions {
            min_class_size: 0,
            tail_trim: 0.0,
            x_min: None,
            x_max: None,
            drop_zero_class: false,
            min_points: 3,
        }
    }
}

/// Counts of points removed at each filter stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Exclusions {
    pub nonpositive: usize,
    pub small_class: usize,
    pub out_of_range: usize,
    pub merged_ties: usize,
    pub tail: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: Model,
    /// Slope of the transformed line.
    pub slope: f64,
    /// Reported exponent; `slope - 1` for cumulative power-law fits.
    pub exponent: f64,
    pub intercept: f64,
    /// Abscissa range of the points actually used.
    pub fit_range: (f64, f64),
    pub r_squared: f64,
    pub n_points: usize,
    pub excluded: Exclusions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FitOutcome {
    Fitted(FitResult),
    Insufficient { usable: usize, excluded: Exclusions },
}

impl FitOutcome {
    pub fn fitted(&self) -> Option<&FitResult> {
        match self {
            FitOutcome::Fitted(f) => Some(f),
            FitOutcome::Insufficient { .. } => None,
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        self.fitted().map(|f| f.exponent)
    }

    fn shift_exponent(mut self, by: f64) -> Self {
        if let FitOutcome::Fitted(f) = &mut self {
            f.exponent = f.slope - by;
        }
        self
    }
}

fn filter_points(points: &[FitPoint], model: Model, opts: &FitOptions) -> (Vec<(f64, f64, u64)>, Exclusions) {
    let mut ex = Exclusions::default();
    let mut kept: Vec<(f64, f64, u64)> = Vec::with_capacity(points.len());
    for p in points {
        let x_ok = match model {
            Model::PowerLaw => p.x > 0.0,
            Model::Exponential => p.x.is_finite() && !(opts.drop_zero_class && p.x == 0.0),
        };
        if !x_ok || p.y.is_nan() || p.y <= 0.0 || !p.x.is_finite() || !p.y.is_finite() {
            ex.nonpositive += 1;
            continue;
        }
        if p.class_size.is_some_and(|n| n < opts.min_class_size) {
            ex.small_class += 1;
            continue;
        }
        if opts.x_min.is_some_and(|lo| p.x < lo) || opts.x_max.is_some_and(|hi| p.x > hi) {
            ex.out_of_range += 1;
            continue;
        }
        kept.push((p.x, p.y, p.class_size.unwrap_or(0)));
    }

    kept.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64, u64)> = Vec::with_capacity(kept.len());
    let mut i = 0;
    while i < kept.len() {
        let x = kept[i].0;
        let mut j = i;
        let (mut ys, mut size) = (0.0, 0u64);
        while j < kept.len() && kept[j].0 == x {
            ys += kept[j].1;
            size += kept[j].2;
            j += 1;
        }
        ex.merged_ties += j - i - 1;
        merged.push((x, ys / (j - i) as f64, size));
        i = j;
    }

    if opts.tail_trim > 0.0 && !merged.is_empty() {
        let drop = ((opts.tail_trim * merged.len() as f64).ceil() as usize).min(merged.len());
        merged.truncate(merged.len() - drop);
        ex.tail = drop;
    }
    (merged, ex)
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r2 = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else if ss_res <= f64::EPSILON {
        1.0
    } else {
        0.0
    };
    (slope, intercept, r2)
}

fn fit(points: &[FitPoint], model: Model, opts: &FitOptions) -> FitOutcome {
    let (kept, excluded) = filter_points(points, model, opts);
    if kept.len() < opts.min_points.max(2) || kept.first().map(|p| p.0) == kept.last().map(|p| p.0) {
        return FitOutcome::Insufficient {
            usable: kept.len(),
            excluded,
        };
    }
    let xs: Vec<f64> = kept
        .iter()
        .map(|p| match model {
            Model::PowerLaw => p.0.ln(),
            Model::Exponential => p.0,
        })
        .collect();
    let ys: Vec<f64> = kept.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept, r_squared) = least_squares(&xs, &ys);
    FitOutcome::Fitted(FitResult {
        model,
        slope,
        exponent: slope,
        intercept,
        fit_range: (kept[0].0, kept[kept.len() - 1].0),
        r_squared,
        n_points: kept.len(),
        excluded,
    })
}

/// Fits `y ∝ x^a`; the exponent is the log-log slope.
pub fn fit_power_law(points: &[FitPoint], opts: &FitOptions) -> FitOutcome {
    fit(points, Model::PowerLaw, opts)
}

/// Fits `y ∝ e^{b x}`; the exponent is the semi-log slope.
pub fn fit_exponential(points: &[FitPoint], opts: &FitOptions) -> FitOutcome {
    fit(points, Model::Exponential, opts)
}

fn cumulative_points(stats: &AttachmentStats) -> Vec<FitPoint> {
    stats
        .rows
        .iter()
        .filter_map(|r| Some(FitPoint::sized(r.value as f64, r.cumulative?, r.size)))
        .collect()
}

fn curve_points(curve: &LocalizedCurve) -> Vec<FitPoint> {
    curve
        .points
        .iter()
        .filter_map(|p| Some(FitPoint::sized(p.value as f64, p.cumulative?, p.size)))
        .collect()
}

/// α from `kappa(k) ∝ k^{α+1}`.
pub fn fit_degree_kappa(stats: &AttachmentStats, opts: &FitOptions) -> FitOutcome {
    fit_power_law(&cumulative_points(stats), opts).shift_exponent(1.0)
}

/// β from `kappa(c) ∝ e^{βc}`.
pub fn fit_coreness_kappa(stats: &AttachmentStats, opts: &FitOptions) -> FitOutcome {
    fit_exponential(&cumulative_points(stats), opts)
}

/// γ from `⟨k_c⟩ ∝ c^γ`, using shells with `c > 0`.
pub fn fit_shell_degree_relation(shells: &ShellStats, opts: &FitOptions) -> FitOutcome {
    let points: Vec<FitPoint> = shells
        .shells
        .iter()
        .filter(|(&c, _)| c > 0)
        .map(|(&c, s)| FitPoint::sized(c as f64, s.mean_degree, s.size))
        .collect();
    fit_power_law(&points, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalizedAxis {
    /// α_{c₀} from Φ(c₀, k) ∝ k^{α_{c₀}+1}, one fit per shell.
    WithinShell,
    /// β_{k₀} from Π(c, k₀) ∝ e^{β_{k₀} c}, one fit per degree class.
    AmongShells,
}

/// Localized exponents of one window and their mean over classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedFit {
    pub axis: LocalizedAxis,
    /// Mean exponent, mean intercept and mean r² over classes; `n_points` is
    /// the number of classes averaged and `fit_range` spans their ranges.
    pub summary: FitResult,
    /// Per-class fits (keyed by c₀ or k₀), sufficient ones only.
    pub per_class: Vec<(u32, FitResult)>,
    /// Classes that were tried but could not be fitted.
    pub insufficient_classes: usize,
}

/// Fits a localized curve for one fixed class.
pub fn fit_localized(curve: &LocalizedCurve, opts: &FitOptions) -> FitOutcome {
    use crate::pa_measure::FixedAxis;
    let points = curve_points(curve);
    match curve.fixed {
        FixedAxis::Coreness(_) => fit_power_law(&points, opts).shift_exponent(1.0),
        FixedAxis::Degree(_) => fit_exponential(&points, opts),
    }
}

/// Per-class localized fits and their arithmetic mean (ᾱ_{c₀} or β̄_{k₀}).
pub fn averaged_localized_exponents(h: &HybridStats, axis: LocalizedAxis, opts: &FitOptions) -> Option<AveragedFit> {
    let classes = match axis {
        LocalizedAxis::WithinShell => h.shells(),
        LocalizedAxis::AmongShells => h.degrees(),
    };
    let mut per_class = Vec::new();
    let mut insufficient = 0;
    for class in classes {
        if opts.drop_zero_class && class == 0 {
            continue;
        }
        let curve = match axis {
            LocalizedAxis::WithinShell => phi_within_shell(h, class),
            LocalizedAxis::AmongShells => pi_among_shells(h, class),
        };
        let Ok(curve) = curve else { continue };
        match fit_localized(&curve, opts) {
            FitOutcome::Fitted(f) => per_class.push((class, f)),
            FitOutcome::Insufficient { .. } => insufficient += 1,
        }
    }
    average_fits(axis, per_class, insufficient)
}

pub(crate) fn average_fits(axis: LocalizedAxis, per_class: Vec<(u32, FitResult)>, insufficient: usize) -> Option<AveragedFit> {
    let first = per_class.first()?.1.clone();
    let n = per_class.len() as f64;
    let mean = |f: fn(&FitResult) -> f64| per_class.iter().map(|(_, r)| f(r)).sum::<f64>() / n;
    let lo = per_class.iter().map(|(_, r)| r.fit_range.0).fold(f64::INFINITY, f64::min);
    let hi = per_class.iter().map(|(_, r)| r.fit_range.1).fold(f64::NEG_INFINITY, f64::max);
    let summary = FitResult {
        model: first.model,
        slope: mean(|r| r.slope),
        exponent: mean(|r| r.exponent),
        intercept: mean(|r| r.intercept),
        fit_range: (lo, hi),
        r_squared: mean(|r| r.r_squared),
        n_points: per_class.len(),
        excluded: Exclusions::default(),
    };
    Some(AveragedFit {
        axis,
        summary,
        per_class,
        insufficient_classes: insufficient,
    })
}
