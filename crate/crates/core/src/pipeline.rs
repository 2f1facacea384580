//! Per-window pipeline (snapshot, coreness, estimators, fits) and the
//! exponent time series built from it.

use std::fmt;
use std::str::FromStr;

use chrono::Datelike;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::{
    averaged_localized_exponents, fit_coreness_kappa, fit_degree_kappa, fit_shell_degree_relation, AveragedFit,
    FitOptions, FitOutcome, LocalizedAxis,
};
use crate::kcore::{core_decomposition, shell_stats, ShellStats};
use crate::pa_measure::{measure_coreness_pa, measure_degree_pa, measure_hybrid, AttachmentStats, HybridStats};
use crate::temporal_graph::{
    date_to_days, days_to_date, DegreeMode, TemporalNetwork, TimeUnit, Timestamp, DAYS_PER_YEAR,
};

/// Window cutoffs plus the common window length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSchedule {
    pub cutoffs: Vec<Timestamp>,
    pub dt: Timestamp,
}

impl WindowSchedule {
    /// Cutoffs `start, start + stride, ..` while `cutoff <= last`.
    pub fn regular(start: Timestamp, stride: Timestamp, dt: Timestamp, last: Timestamp) -> Result<Self> {
        if stride <= 0 || dt <= 0 {
            return Err(Error::Config("window stride and length must be positive".into()));
        }
        let mut cutoffs = Vec::new();
        let mut t = start;
        while t <= last {
            cutoffs.push(t);
            t += stride;
        }
        Ok(WindowSchedule { cutoffs, dt })
    }

    /// Default schedule for a network.
    ///
    /// Calendar data: a cutoff every January 1 from the first one after the
    /// earliest edge, windows of 365 days. Tick data: ten equal windows
    /// covering the span after the first edge.
    pub fn default_for(net: &TemporalNetwork) -> Result<Self> {
        let (first, last) = net.time_span().ok_or(Error::EmptySchedule)?;
        match net.time_unit() {
            TimeUnit::Days => {
                let first_date = days_to_date(first).ok_or(Error::EmptySchedule)?;
                let mut cutoffs = Vec::new();
                let mut year = first_date.year() + 1;
                loop {
                    let jan1 = chrono::NaiveDate::from_ymd_opt(year, 1, 1).ok_or(Error::EmptySchedule)?;
                    let t = date_to_days(jan1);
                    if t > last {
                        break;
                    }
                    cutoffs.push(t);
                    year += 1;
                }
                Ok(WindowSchedule {
                    cutoffs,
                    dt: DAYS_PER_YEAR,
                })
            }
            TimeUnit::Ticks => {
                let span = (last - first).max(1);
                let dt = (span / 10).max(1);
                WindowSchedule::regular(first + dt, dt, dt, last)
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cutoffs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentKind {
    /// α from kappa(k).
    Alpha,
    /// β from kappa(c).
    Beta,
    /// γ from ⟨k_c⟩ ∝ c^γ.
    Gamma,
    /// ᾱ_{c₀}, mean within-shell exponent.
    AlphaWithinShell,
    /// β̄_{k₀}, mean among-shell exponent.
    BetaAmongShells,
}

impl ExponentKind {
    pub const ALL: [ExponentKind; 5] = [
        ExponentKind::Alpha,
        ExponentKind::Beta,
        ExponentKind::Gamma,
        ExponentKind::AlphaWithinShell,
        ExponentKind::BetaAmongShells,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExponentKind::Alpha => "alpha",
            ExponentKind::Beta => "beta",
            ExponentKind::Gamma => "gamma",
            ExponentKind::AlphaWithinShell => "alpha_within_shell",
            ExponentKind::BetaAmongShells => "beta_among_shells",
        }
    }
}

impl fmt::Display for ExponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExponentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExponentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown exponent `{s}`")))
    }
}

/// Fit options per exponent family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPlan {
    pub alpha: FitOptions,
    pub beta: FitOptions,
    pub gamma: FitOptions,
    pub within_shell: FitOptions,
    pub among_shells: FitOptions,
}

impl FitPlan {
    pub fn uniform(opts: FitOptions) -> Self {
        FitPlan {
            alpha: opts,
            beta: opts,
            gamma: opts,
            within_shell: opts,
            among_shells: opts,
        }
    }
}

impl Default for FitPlan {
    fn default() -> Self {
        FitPlan::uniform(FitOptions::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowFits {
    pub alpha: FitOutcome,
    pub beta: FitOutcome,
    pub gamma: FitOutcome,
    pub alpha_within_shell: Option<AveragedFit>,
    pub beta_among_shells: Option<AveragedFit>,
}

impl WindowFits {
    /// The fit for one exponent as a plain outcome; averaged exponents report
    /// their class summary.
    pub fn get(&self, kind: ExponentKind) -> FitOutcome {
        let averaged = |a: &Option<AveragedFit>| match a {
            Some(a) => FitOutcome::Fitted(a.summary.clone()),
            None => FitOutcome::Insufficient {
                usable: 0,
                excluded: Default::default(),
            },
        };
        match kind {
            ExponentKind::Alpha => self.alpha.clone(),
            ExponentKind::Beta => self.beta.clone(),
            ExponentKind::Gamma => self.gamma.clone(),
            ExponentKind::AlphaWithinShell => averaged(&self.alpha_within_shell),
            ExponentKind::BetaAmongShells => averaged(&self.beta_among_shells),
        }
    }
}

/// Fits every exponent from one window's tables.
pub fn fit_window(degree: &AttachmentStats, coreness: &AttachmentStats, hybrid: &HybridStats, shells: &ShellStats, plan: &FitPlan) -> WindowFits {
    WindowFits {
        alpha: fit_degree_kappa(degree, &plan.alpha),
        beta: fit_coreness_kappa(coreness, &plan.beta),
        gamma: fit_shell_degree_relation(shells, &plan.gamma),
        alpha_within_shell: averaged_localized_exponents(hybrid, LocalizedAxis::WithinShell, &plan.within_shell),
        beta_among_shells: averaged_localized_exponents(hybrid, LocalizedAxis::AmongShells, &plan.among_shells),
    }
}

/// Everything measured for one window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub cutoff: Timestamp,
    pub dt: Timestamp,
    pub events: usize,
    pub new_new: usize,
    pub old_old: usize,
    pub degree: AttachmentStats,
    pub coreness: AttachmentStats,
    pub hybrid: HybridStats,
    pub shells: ShellStats,
    pub fits: WindowFits,
}

impl WindowReport {
    pub fn is_empty(&self) -> bool {
        self.events == 0
    }
}

/// snapshot → coreness → estimators → fits for the window `[cutoff, cutoff + dt)`.
pub fn analyze_window(net: &TemporalNetwork, cutoff: Timestamp, dt: Timestamp, mode: DegreeMode, plan: &FitPlan) -> WindowReport {
    let g = net.snapshot_at(cutoff, mode);
    let cm = core_decomposition(&g);
    let w = net.window_attachments(cutoff, dt);
    let degree = measure_degree_pa(&g, &w);
    let coreness = measure_coreness_pa(&g, &cm, &w);
    let hybrid = measure_hybrid(&g, &cm, &w);
    let shells = shell_stats(&g, &cm);
    let fits = fit_window(&degree, &coreness, &hybrid, &shells, plan);
    WindowReport {
        cutoff,
        dt,
        events: w.events.len(),
        new_new: w.new_new,
        old_old: w.old_old,
        degree,
        coreness,
        hybrid,
        shells,
        fits,
    }
}

/// Runs [`analyze_window`] for every cutoff in parallel; results keep schedule order.
pub fn analyze_schedule(net: &TemporalNetwork, schedule: &WindowSchedule, mode: DegreeMode, plan: &FitPlan) -> Result<Vec<WindowReport>> {
    if schedule.is_empty() {
        return Err(Error::EmptySchedule);
    }
    if schedule.dt <= 0 {
        return Err(Error::Config("window length must be positive".into()));
    }
    Ok(schedule
        .cutoffs
        .par_iter()
        .map(|&t| analyze_window(net, t, schedule.dt, mode, plan))
        .collect())
}

/// Mean and sample standard deviation over the windows with a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub mean: f64,
    /// Sample standard deviation over windows (0 for a single window).
    pub std: f64,
    pub windows_fitted: usize,
    pub windows_total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentSeries {
    pub kind: ExponentKind,
    pub dt: Timestamp,
    /// Window cutoffs, strictly increasing.
    pub windows: Vec<Timestamp>,
    pub values: Vec<FitOutcome>,
}

impl ExponentSeries {
    pub fn from_reports(kind: ExponentKind, reports: &[WindowReport]) -> Self {
        ExponentSeries {
            kind,
            dt: reports.first().map_or(0, |r| r.dt),
            windows: reports.iter().map(|r| r.cutoff).collect(),
            values: reports.iter().map(|r| r.fits.get(kind)).collect(),
        }
    }

    pub fn summary(&self) -> Option<SeriesSummary> {
        let xs: Vec<f64> = self.values.iter().filter_map(FitOutcome::exponent).collect();
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(SeriesSummary {
            mean,
            std,
            windows_fitted: xs.len(),
            windows_total: self.values.len(),
        })
    }
}

/// Time series of one exponent over a window schedule.
pub fn exponent_time_series(
    net: &TemporalNetwork,
    schedule: &WindowSchedule,
    kind: ExponentKind,
    mode: DegreeMode,
    plan: &FitPlan,
) -> Result<ExponentSeries> {
    let reports = analyze_schedule(net, schedule, mode, plan)?;
    Ok(ExponentSeries::from_reports(kind, &reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::temporal_graph::read_generic;

    #[test]
    fn yearly_schedule_starts_after_first_edge() {
        let input = "a\tb\t1992-03-01\nb\tc\t1994-06-01\n";
        let (net, _) = read_generic(input.as_bytes()).unwrap();
        let s = WindowSchedule::default_for(&net).unwrap();
        assert_eq!(s.dt, 365);
        let dates: Vec<_> = s.cutoffs.iter().map(|&t| days_to_date(t).unwrap().to_string()).collect();
        assert_eq!(dates, vec!["1993-01-01", "1994-01-01"]);
    }

    #[test]
    fn regular_schedule() {
        let s = WindowSchedule::regular(10, 5, 5, 24).unwrap();
        assert_eq!(s.cutoffs, vec![10, 15, 20]);
        assert!(WindowSchedule::regular(0, 0, 5, 10).is_err());
    }

    #[test]
    fn empty_schedule_is_an_error() {
        let (net, _) = read_generic("a\tb\t1\n".as_bytes()).unwrap();
        let schedule = WindowSchedule { cutoffs: vec![], dt: 1 };
        assert!(matches!(
            exponent_time_series(&net, &schedule, ExponentKind::Alpha, DegreeMode::Undirected, &FitPlan::default()),
            Err(Error::EmptySchedule)
        ));
    }

    #[test]
    fn exponent_names_round_trip() {
        for k in ExponentKind::ALL {
            assert_eq!(k.name().parse::<ExponentKind>().unwrap(), k);
        }
    }
}
