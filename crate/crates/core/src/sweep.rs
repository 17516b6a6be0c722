//! Time-step refinement studies: the same setup at `Δt, Δt/2, Δt/4, ...`.

use std::fmt::Write as _;

use crate::energy::EnergyTrace;
use crate::error::{Error, Result};
use crate::output::format_real;
use crate::scalar::Scalar;
use crate::simulation::{run_simulation, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T> {
    pub level: usize,
    pub dt: T,
    pub steps: usize,
    /// `max |E_phys(n) - E_phys(0)| / E_phys(0)`
    pub drift: T,
    /// Largest `|identity_residual|`.
    pub residual: T,
    /// Largest same-parity increase of `E_phys`.
    pub parity_increase: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable<T> {
    pub rows: Vec<SweepRow<T>>,
}

/// `log2(e_k / e_{k+1})`; NaN when either error is zero.
pub fn observed_orders<T: Scalar>(errors: &[T]) -> Vec<T> {
    errors
        .windows(2)
        .map(|w| {
            if w[0] > T::zero() && w[1] > T::zero() {
                (w[0] / w[1]).log2()
            } else {
                T::nan()
            }
        })
        .collect()
}

impl<T: Scalar> SweepTable<T> {
    pub fn drift_orders(&self) -> Vec<T> {
        observed_orders(&self.rows.iter().map(|r| r.drift).collect::<Vec<_>>())
    }

    pub fn residual_orders(&self) -> Vec<T> {
        observed_orders(&self.rows.iter().map(|r| r.residual).collect::<Vec<_>>())
    }

    /// CSV with one row per level; order columns are empty on the first row.
    pub fn render(&self, digits: usize) -> String {
        let mut out = String::from("level,dt,steps,drift,residual,parity_increase,drift_order,residual_order\n");
        let (dor, ror) = (self.drift_orders(), self.residual_orders());
        for (k, r) in self.rows.iter().enumerate() {
            let order = |o: &[T]| if k == 0 { String::new() } else { format_real(o[k - 1], digits) };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.level,
                format_real(r.dt, digits),
                r.steps,
                format_real(r.drift, digits),
                format_real(r.residual, digits),
                format_real(r.parity_increase, digits),
                order(&dor),
                order(&ror),
            );
        }
        out
    }
}

/// Configuration of refinement level `k`: Courant ratio divided by `2^k`.
pub fn refined<T: Scalar>(config: &RunConfig<T>, k: usize) -> RunConfig<T> {
    let mut c = config.clone();
    c.courant = config.courant / T::lit(2f64.powi(k as i32));
    c.snapshot_times.clear();
    c
}

/// Runs `levels` refinements concurrently and returns the table together with
/// the traces, coarsest first.
pub fn run_sweep<T: Scalar>(config: &RunConfig<T>, levels: usize) -> Result<(SweepTable<T>, Vec<EnergyTrace<T>>)> {
    if levels < 2 {
        return Err(Error::Usage(format!("a sweep needs at least 2 levels, got {levels}")));
    }
    config.validate()?;
    let configs: Vec<RunConfig<T>> = (0..levels).map(|k| refined(config, k)).collect();
    let results: Vec<Result<EnergyTrace<T>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| scope.spawn(move || run_simulation(c).map(|(_, trace)| trace)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });

    let mut rows = Vec::with_capacity(levels);
    let mut traces = Vec::with_capacity(levels);
    for (k, (c, res)) in configs.iter().zip(results).enumerate() {
        let trace = res?;
        rows.push(SweepRow {
            level: k,
            dt: c.dt()?,
            steps: c.n_steps()?,
            drift: trace.max_relative_drift(),
            residual: trace.max_abs_residual(),
            parity_increase: trace.max_parity_increase(),
        });
        traces.push(trace);
    }
    Ok((SweepTable { rows }, traces))
}
