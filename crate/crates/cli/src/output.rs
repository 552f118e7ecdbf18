//! CSV and JSON rendering. Both start with the resolved config and master
//! seed; everything after that depends only on the config.

use std::fmt::Write as _;

use discrim_core::io::density_csv_blocks;
use discrim_core::linalg::CVec2;
use discrim_core::measurement::{CoincidenceCounts, Outcome};
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig, Format};
use crate::experiments::{CurveReport, GridReport, OptimizeReport, PairReport, Report, TomoReport};
use crate::CliError;

/// JSON schema of the `--format json` output.
pub const SCHEMA: &str = include_str!("../schema/discrim.schema.json");

#[derive(Serialize)]
struct Envelope<'a> {
    experiment: Experiment,
    master_seed: Option<u64>,
    config: &'a ExperimentConfig,
    data: &'a Report,
}

pub fn render(config: &ExperimentConfig, report: &Report) -> Result<String, CliError> {
    match config.format {
        Format::Json => render_json(config, report),
        Format::Csv => render_csv(config, report),
    }
}

pub fn render_json(config: &ExperimentConfig, report: &Report) -> Result<String, CliError> {
    let env = Envelope {
        experiment: config.experiment(),
        master_seed: config.master_seed,
        config,
        data: report,
    };
    let mut s = serde_json::to_string_pretty(&env).map_err(|e| CliError::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn render_csv(config: &ExperimentConfig, report: &Report) -> Result<String, CliError> {
    let echo = serde_json::to_string(config).map_err(|e| CliError::Output(e.to_string()))?;
    let mut s = String::new();
    writeln!(s, "# discrim {}", config.experiment()).unwrap();
    match config.master_seed {
        Some(seed) => writeln!(s, "# master_seed: {seed}").unwrap(),
        None => writeln!(s, "# master_seed: none").unwrap(),
    }
    writeln!(s, "# config: {echo}").unwrap();
    s.push_str(&match report {
        Report::Pair(r) => pair_csv(r),
        Report::Grid(r) => grid_csv(r),
        Report::Curve(r) => curve_csv(r),
        Report::Tomo(r) => tomo_csv(r),
        Report::Optimize(r) => optimize_csv(r),
    });
    Ok(s)
}

/// Everything after the header comment lines.
pub fn data_section(rendered: &str) -> &str {
    let mut rest = rendered;
    for _ in 0..3 {
        rest = rest.split_once('\n').map_or("", |(_, tail)| tail);
    }
    rest
}

/// One CSV field. Floats use the shortest representation that reads back to
/// the same value.
trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    fn cell(&self) -> String {
        let mut buf = shortest(*self);
        if buf.ends_with(".0") {
            buf.truncate(buf.len() - 2);
        }
        buf
    }
}

fn shortest(x: f64) -> String {
    if x.is_finite() {
        serde_json::Number::from_f64(x).map_or_else(|| x.to_string(), |n| n.to_string())
    } else {
        x.to_string()
    }
}

macro_rules! impl_cell_display {
    ($($t:ty),*) => {$(
        impl Cell for $t {
            fn cell(&self) -> String {
                self.to_string()
            }
        }
    )*};
}
impl_cell_display!(u64, usize, bool, String, &str);

fn line(s: &mut String, cells: &[&dyn Cell]) {
    let fields: Vec<String> = cells.iter().map(|c| c.cell()).collect();
    s.push_str(&fields.join(","));
    s.push('\n');
}

fn counts_fields(c: &CoincidenceCounts) -> String {
    Outcome::ALL.map(|o| c.get(o).to_string()).join(",")
}

fn pair_csv(r: &PairReport) -> String {
    let e = &r.sampled.estimate;
    let mut s = String::from("ff_exact,helstrom,no_ff,advantage,p0,p1,p_avg,sigma_p0,sigma_p1,sigma_avg,seed\n");
    line(
        &mut s,
        &[
            &r.ff_exact, &r.helstrom, &r.no_ff, &r.advantage, &e.p0, &e.p1, &e.p_avg, &e.sigma_p0, &e.sigma_p1,
            &e.sigma_avg, &r.sampled.seed,
        ],
    );
    s.push_str("# counts\nstate,TaTb,TaRb,RaTb,RaRb\n");
    writeln!(s, "0,{}", counts_fields(&r.sampled.counts0)).unwrap();
    writeln!(s, "1,{}", counts_fields(&r.sampled.counts1)).unwrap();
    s
}

fn grid_csv(r: &GridReport) -> String {
    let mut s = String::from(
        "theta0,theta1,ff_exact,ff_sampled,ff_sigma,no_ff,advantage,seed,\
         c0_TaTb,c0_TaRb,c0_RaTb,c0_RaRb,c1_TaTb,c1_TaRb,c1_RaTb,c1_RaRb\n",
    );
    for row in &r.rows {
        let e = &row.sampled.estimate;
        line(
            &mut s,
            &[
                &row.theta0,
                &row.theta1,
                &row.ff_exact,
                &e.p_avg,
                &e.sigma_avg,
                &row.no_ff,
                &row.advantage,
                &row.sampled.seed,
                &counts_fields(&row.sampled.counts0),
                &counts_fields(&row.sampled.counts1),
            ],
        );
    }
    let m = &r.summary;
    s.push_str("# summary\nsampled_min,sampled_max,max_advantage,max_advantage_theta0,max_advantage_theta1\n");
    line(
        &mut s,
        &[&m.sampled_min, &m.sampled_max, &m.max_advantage, &m.max_advantage_at[0], &m.max_advantage_at[1]],
    );
    s
}

fn curve_csv(r: &CurveReport) -> String {
    let mut s = String::from(
        "eta,overlap,helstrom_ideal,helstrom_noisy,ff_exact,ff_sampled,ff_sigma,no_ff_ideal,no_ff_noisy,seed\n",
    );
    for row in &r.rows {
        let e = &row.sampled.estimate;
        line(
            &mut s,
            &[
                &row.eta,
                &row.overlap,
                &row.helstrom_ideal,
                &row.helstrom_noisy,
                &row.ff_exact,
                &e.p_avg,
                &e.sigma_avg,
                &row.no_ff_ideal,
                &row.no_ff_noisy,
                &row.sampled.seed,
            ],
        );
    }
    s
}

fn tomo_csv(r: &TomoReport) -> String {
    let mut s =
        String::from("fidelity_input,fidelity,tangle_input,tangle,log_likelihood,iterations,converged,seed\n");
    line(
        &mut s,
        &[
            &r.fidelity_input, &r.fidelity, &r.tangle_input, &r.tangle, &r.log_likelihood, &r.iterations, &r.converged,
            &r.seed,
        ],
    );
    s.push_str(&density_csv_blocks(&r.rho));
    s.push_str("# counts\n");
    s.push_str(&r.counts.to_csv());
    s
}

fn basis_rows(s: &mut String, party: &str, basis: &[CVec2; 2]) {
    for (k, v) in basis.iter().enumerate() {
        line(s, &[&party, &k, &v[0].re, &v[0].im, &v[1].re, &v[1].im]);
    }
}

fn optimize_csv(r: &OptimizeReport) -> String {
    let [ta, pa, tb, pb] = r.optimum.angles;
    let mut s = String::from("success,helstrom,alice_theta,alice_phi,bob_theta,bob_phi\n");
    line(&mut s, &[&r.success, &r.helstrom, &ta, &pa, &tb, &pb]);
    s.push_str("# bases\nparty,outcome,h_re,h_im,v_re,v_im\n");
    let m = &r.optimum.measurement;
    basis_rows(&mut s, "alice", m.alice_basis());
    basis_rows(&mut s, "bob", m.bob_basis());
    s.push_str("# assignment\nalice,bob,label\n");
    for (a, row) in m.assignment().iter().enumerate() {
        for (b, label) in row.iter().enumerate() {
            writeln!(s, "{a},{b},{label}").unwrap();
        }
    }
    s
}
