//! Monte-Carlo process-variation runs.
//!
//! Every trial independently perturbs each device's nanotube diameter with a
//! truncated Gaussian, recomputes thresholds, and compares the full truth
//! table of each cell against its behavioral oracle. Per-trial RNG streams
//! are split up front from the seed, so serial and parallel execution (and
//! any cell ordering) would produce the same draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::device::{perturb_diameter, DiameterPerturbation};
use crate::netlist::FlatCircuit;
use crate::ternary::{Trit, TritHz};

use super::solve::{solve_raw, InputDrive};
use super::table::for_each_tuple;
use super::{SimError, SolveConfig};

/// Upper bound on recorded failure samples per cell; counts are exact.
const SAMPLE_CAP: usize = 20;

/// One cell under Monte-Carlo test: its circuit, the per-input domains to
/// enumerate, and the behavioral oracle giving expected outputs.
pub struct McCell<'a> {
    pub name: String,
    pub flat: &'a FlatCircuit,
    pub domains: Vec<Vec<Trit>>,
    pub oracle: Box<dyn Fn(&[Trit]) -> Vec<TritHz> + 'a>,
}

/// A recorded mismatch, with inputs and outputs as symbol strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct McFailure {
    pub trial: usize,
    pub inputs: String,
    pub got: String,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McCellReport {
    pub cell: String,
    pub failing_trials: usize,
    pub mismatches: usize,
    pub sample_failures: Vec<McFailure>,
}

/// Deterministic Monte-Carlo report. Identical seeds and inputs produce
/// byte-identical serialized reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub version: u32,
    pub seed: u64,
    pub trials: usize,
    /// Trials in which at least one cell mismatched its oracle.
    pub failures: usize,
    pub sigma_fraction: f64,
    pub truncation: f64,
    pub vdd: f64,
    pub cells: Vec<McCellReport>,
}

impl McReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn symbols(values: &[TritHz]) -> String {
    values.iter().map(|v| v.symbol()).collect()
}

fn trit_symbols(values: &[Trit]) -> String {
    values.iter().map(|t| char::from(b'0' + t.as_u8())).collect()
}

/// Runs `trials` perturbed truth-table comparisons for every cell.
///
/// A trial fails a cell if any tuple mismatches the oracle or the solver
/// errors on it (a solve error counts as a functional failure).
pub fn monte_carlo(
    cells: &[McCell<'_>],
    pert: DiameterPerturbation,
    trials: usize,
    seed: u64,
    cfg: &SolveConfig,
) -> Result<McReport, SimError> {
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    let mut cell_reports: Vec<McCellReport> = cells
        .iter()
        .map(|c| McCellReport {
            cell: c.name.clone(),
            failing_trials: 0,
            mismatches: 0,
            sample_failures: Vec::new(),
        })
        .collect();
    let mut failures = 0usize;

    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let mut trial_failed = false;

        for (cell, report) in cells.iter().zip(cell_reports.iter_mut()) {
            // Perturb every device of this cell, in flat order.
            let mut perturbed = ics_clone(cell.flat);
            for device in &mut perturbed.devices {
                let draw: f64 = StandardNormal.sample(&mut rng);
                let d = perturb_diameter(device.params.diameter, pert, draw);
                device.params = device
                    .params
                    .with_diameter(d)
                    .expect("perturbation keeps diameters positive");
            }

            let mut cell_mismatches = 0usize;
            for_each_tuple::<SimError>(&cell.domains, |tuple| {
                let drives: Vec<_> = perturbed
                    .inputs
                    .iter()
                    .zip(tuple)
                    .map(|(&id, &t)| (id, InputDrive::Level(t)))
                    .collect();
                let expected = (cell.oracle)(tuple);
                let got: Option<Vec<TritHz>> =
                    solve_raw(&perturbed, &drives, cfg).ok().map(|r| r.outputs);
                if got.as_deref() != Some(&expected) {
                    cell_mismatches += 1;
                    if report.sample_failures.len() < SAMPLE_CAP {
                        report.sample_failures.push(McFailure {
                            trial,
                            inputs: trit_symbols(tuple),
                            got: got.map_or_else(|| "<solve error>".to_string(), |g| symbols(&g)),
                            expected: symbols(&expected),
                        });
                    }
                }
                Ok(())
            })?;
            if cell_mismatches > 0 {
                report.failing_trials += 1;
                report.mismatches += cell_mismatches;
                trial_failed = true;
            }
        }
        if trial_failed {
            failures += 1;
        }
    }

    Ok(McReport {
        version: 1,
        seed,
        trials,
        failures,
        sigma_fraction: pert.sigma_fraction,
        truncation: pert.truncation,
        vdd: cfg.vdd,
        cells: cell_reports,
    })
}

fn ics_clone(flat: &FlatCircuit) -> FlatCircuit {
    flat.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{elaborate, parse_netlist};
    use crate::ternary::sti;

    const STI: &str = "\
.subckt sti in out
M1 out in VDD P (19,0)
M2 out in GND N (19,0)
.ends
.top sti
";

    fn sti_cell(flat: &FlatCircuit) -> McCell<'_> {
        McCell {
            name: "sti".to_string(),
            flat,
            domains: vec![Trit::ALL.to_vec()],
            oracle: Box::new(|t| vec![TritHz::Value(sti(t[0]))]),
        }
    }

    #[test]
    fn zero_sigma_matches_nominal() {
        let flat = elaborate(&parse_netlist(STI).unwrap()).unwrap();
        let cells = [sti_cell(&flat)];
        let pert = DiameterPerturbation::new(0.0, 3.0);
        let report =
            monte_carlo(&cells, pert, 1, 42, &SolveConfig::default()).unwrap();
        assert_eq!(report.failures, 0);
        assert_eq!(report.cells[0].mismatches, 0);
    }

    #[test]
    fn same_seed_same_report() {
        let flat = elaborate(&parse_netlist(STI).unwrap()).unwrap();
        let cfg = SolveConfig::default();
        let pert = DiameterPerturbation::default();
        let a = monte_carlo(&[sti_cell(&flat)], pert, 25, 7, &cfg).unwrap();
        let b = monte_carlo(&[sti_cell(&flat)], pert, 25, 7, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn huge_sigma_breaks_the_cell() {
        let flat = elaborate(&parse_netlist(STI).unwrap()).unwrap();
        let cfg = SolveConfig::default();
        // 25% sigma pushes thresholds across VDD/2 for some draws
        let pert = DiameterPerturbation::new(0.25, 3.0);
        let report = monte_carlo(&[sti_cell(&flat)], pert, 50, 3, &cfg).unwrap();
        assert!(report.failures > 0, "expected failures at 25% sigma");
        assert!(report.failures <= report.trials);
        assert!(!report.cells[0].sample_failures.is_empty());
    }

    #[test]
    fn zero_trials_rejected() {
        let flat = elaborate(&parse_netlist(STI).unwrap()).unwrap();
        assert!(matches!(
            monte_carlo(&[sti_cell(&flat)], DiameterPerturbation::default(), 0, 1,
                &SolveConfig::default()),
            Err(SimError::NoTrials)
        ));
    }
}
