//! Decay-law classification of an energy trace by least squares in
//! transformed coordinates:
//!
//! | model        | abscissa      | ordinate |
//! |--------------|---------------|----------|
//! | exponential  | `t`           | `ln E`   |
//! | polynomial   | `ln t`        | `ln E`   |
//! | logarithmic  | `ln ln t`     | `ln E`   |
//!
//! The best model is the one with the largest coefficient of determination.

use std::fmt;

use crate::energy::{EnergyKind, EnergyTrace};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ordinary least-squares line `y ≈ slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    /// `1 - SS_res / SS_tot`, or 1 when `SS_tot = 0`.
    pub r_squared: T,
}

pub fn fit_line<T: Scalar>(xs: &[T], ys: &[T]) -> Result<LineFit<T>> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", xs.len())));
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::Fit("abscissae have zero variance".into()));
    }
    let n = T::from_count(xs.len());
    let x_mean = xs.iter().copied().sum::<T>() / n;
    let y_mean = ys.iter().copied().sum::<T>() / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - x_mean, y - y_mean);
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    if sxx.is_zero() {
        return Err(Error::Fit("abscissae have zero variance".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_res: T = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r_squared = if syy.is_zero() {
        T::one()
    } else {
        (T::one() - ss_res / syy).max(T::zero()).min(T::one())
    };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecayModel {
    Exponential,
    Polynomial,
    Logarithmic,
}

impl DecayModel {
    /// Preference order used to break ties.
    pub const ALL: [DecayModel; 3] = [
        DecayModel::Exponential,
        DecayModel::Polynomial,
        DecayModel::Logarithmic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DecayModel::Exponential => "exponential",
            DecayModel::Polynomial => "polynomial",
            DecayModel::Logarithmic => "logarithmic",
        }
    }

    /// Column label of the transformed abscissa.
    pub fn abscissa_label(self) -> &'static str {
        match self {
            DecayModel::Exponential => "t",
            DecayModel::Polynomial => "logt",
            DecayModel::Logarithmic => "loglogt",
        }
    }

    /// Transformed abscissa, `None` outside the model's domain.
    pub fn transform<T: Scalar>(self, t: T) -> Option<T> {
        match self {
            DecayModel::Exponential => Some(t),
            DecayModel::Polynomial => (t > T::zero()).then(|| t.ln()),
            DecayModel::Logarithmic => (t > T::one()).then(|| t.ln().ln()),
        }
    }
}

impl fmt::Display for DecayModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit<T> {
    pub model: DecayModel,
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
    pub window: (T, T),
    pub sample_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions<T> {
    /// Leading fraction of samples dropped before fitting.
    pub window_fraction: T,
    /// Samples with `E < floor_factor * MIN_POSITIVE` are dropped.
    pub floor_factor: T,
    pub min_samples: usize,
}

impl<T: Scalar> Default for FitOptions<T> {
    fn default() -> Self {
        Self {
            window_fraction: T::lit(0.1),
            floor_factor: T::lit(1e3),
            min_samples: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification<T> {
    /// One fit per model that had at least three admissible samples, in
    /// preference order.
    pub fits: Vec<DecayFit<T>>,
    pub selected: DecayModel,
}

impl<T: Scalar> Classification<T> {
    pub fn fit(&self, model: DecayModel) -> Option<&DecayFit<T>> {
        self.fits.iter().find(|f| f.model == model)
    }

    pub fn best(&self) -> &DecayFit<T> {
        self.fit(self.selected).expect("selected model has a fit")
    }

    /// Highest r² among the models that were not selected.
    pub fn runner_up(&self) -> Option<&DecayFit<T>> {
        self.fits
            .iter()
            .filter(|f| f.model != self.selected)
            .max_by(|a, b| a.r_squared.partial_cmp(&b.r_squared).unwrap_or(std::cmp::Ordering::Equal))
    }

    /// Exponential slope indistinguishable from zero.
    pub fn non_decaying(&self) -> bool {
        self.fit(DecayModel::Exponential)
            .map(|f| f.slope.abs() < T::lit(1e-10))
            .unwrap_or(false)
    }
}

/// Classifies a `(t, E)` series.
pub fn classify_series<T: Scalar>(times: &[T], energies: &[T], options: &FitOptions<T>) -> Result<Classification<T>> {
    if times.len() != energies.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            got: energies.len(),
        });
    }
    let frac = options.window_fraction;
    if !(frac >= T::zero() && frac < T::one()) {
        return Err(Error::config("window_fraction", format!("must lie in [0, 1), got {frac}")));
    }
    if energies.iter().all(|e| e.is_zero()) {
        return Err(Error::Fit("all energies are zero".into()));
    }
    let skip = (frac * T::from_count(times.len()))
        .ceil()
        .to_usize()
        .unwrap_or(times.len());
    let floor = options.floor_factor * T::min_positive_value();
    let window: Vec<(T, T)> = times
        .iter()
        .zip(energies)
        .skip(skip)
        .filter(|(t, e)| e.is_finite() && **e > floor && t.is_finite())
        .map(|(&t, &e)| (t, e))
        .collect();
    if window.len() < options.min_samples.max(3) {
        return Err(Error::Fit(format!(
            "only {} positive samples inside the fit window, need {}",
            window.len(),
            options.min_samples.max(3)
        )));
    }

    let mut fits = Vec::with_capacity(3);
    for model in DecayModel::ALL {
        let (xs, ys, ts): (Vec<T>, Vec<T>, Vec<T>) = window
            .iter()
            .filter_map(|&(t, e)| model.transform(t).map(|x| (x, e.ln(), t)))
            .fold((vec![], vec![], vec![]), |(mut a, mut b, mut c), (x, y, t)| {
                a.push(x);
                b.push(y);
                c.push(t);
                (a, b, c)
            });
        if xs.len() < 3 || xs.iter().all(|&x| x == xs[0]) {
            continue;
        }
        let line = fit_line(&xs, &ys)?;
        fits.push(DecayFit {
            model,
            slope: line.slope,
            intercept: line.intercept,
            r_squared: line.r_squared,
            window: (ts[0], ts[ts.len() - 1]),
            sample_count: xs.len(),
        });
    }
    let mut selected: Option<&DecayFit<T>> = None;
    for f in &fits {
        if selected.is_none_or(|s| f.r_squared > s.r_squared) {
            selected = Some(f);
        }
    }
    let selected = selected
        .ok_or_else(|| Error::Fit("no model has enough admissible samples".into()))?
        .model;
    Ok(Classification { fits, selected })
}

/// Classifies the decay law of one energy column of a trace.
pub fn classify_decay<T: Scalar>(
    trace: &EnergyTrace<T>,
    kind: EnergyKind,
    options: &FitOptions<T>,
) -> Result<Classification<T>> {
    classify_series(&trace.times(), &trace.energies(kind), options)
}
