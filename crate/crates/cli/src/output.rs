//! CSV emission for trajectories and representation comparisons.
//!
//! Column layout for plotting: `p1` against `n` (panel a), `p2..p4` (b),
//! `g` (c) and `entropy` (d).

use std::io::{self, Write};

use ladder_core::{ReductionTrajectory, StepObservables};

/// Bumped whenever the column set or order changes.
pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Number of tracked levels that get their own columns.
pub const LEVEL_COLUMNS: usize = 4;

pub fn trajectory_header() -> String {
    let mut cols = vec!["step".to_string(), "n".into(), "g".into()];
    for prefix in ["lambda", "e", "p"] {
        cols.extend((1..=LEVEL_COLUMNS).map(|i| format!("{prefix}{i}")));
    }
    cols.extend(
        [
            "entropy",
            "relevant",
            "irrelevant",
            "dropped_amp",
            "root_status",
            "eliminated_index",
        ]
        .map(String::from),
    );
    cols.join(",")
}

/// Round-trip exact float formatting (17 significant digits).
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn level_cells(values: &[f64], out: &mut Vec<String>) {
    for i in 0..LEVEL_COLUMNS {
        out.push(values.get(i).map_or_else(String::new, |&v| fmt_float(v)));
    }
}

/// Writes header plus one row per step. `observables` must be aligned with
/// `trajectory.steps`.
pub fn write_trajectory<W: Write>(
    mut out: W,
    trajectory: &ReductionTrajectory,
    observables: &[StepObservables],
) -> io::Result<()> {
    writeln!(out, "{}", trajectory_header())?;
    for (step, obs) in trajectory.steps.iter().zip(observables) {
        let mut row = vec![
            step.step.to_string(),
            step.dim.to_string(),
            fmt_float(step.g_after),
        ];
        level_cells(&step.eigenvalues, &mut row);
        level_cells(&obs.energies, &mut row);
        level_cells(&obs.deviations, &mut row);
        row.push(fmt_float(obs.entropy));
        row.push(obs.relevant.to_string());
        row.push(obs.irrelevant.to_string());
        row.push(step.dropped_amplitude.map_or_else(String::new, fmt_float));
        row.push(
            step.root_status
                .map_or("initial", |s| s.as_str())
                .to_string(),
        );
        row.push(
            step.eliminated_state
                .map_or_else(String::new, |i| i.to_string()),
        );
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}

pub fn comparison_header() -> &'static str {
    "n,p1_su2,p1_so4,s_su2,s_so4,relevant_su2,irrelevant_su2,relevant_so4,irrelevant_so4"
}

/// Side-by-side rows keyed on dimension. Dimensions reached by only one
/// trajectory leave the other side empty.
pub fn write_comparison<W: Write>(
    mut out: W,
    su2: &[StepObservables],
    so4: &[StepObservables],
) -> io::Result<()> {
    writeln!(out, "{}", comparison_header())?;
    let max_dim = su2.iter().chain(so4).map(|o| o.dim).max().unwrap_or(0);
    let min_dim = su2.iter().chain(so4).map(|o| o.dim).min().unwrap_or(0);
    let find = |obs: &[StepObservables], n: usize| obs.iter().find(|o| o.dim == n).cloned();
    for n in (min_dim..=max_dim).rev() {
        let a = find(su2, n);
        let b = find(so4, n);
        if a.is_none() && b.is_none() {
            continue;
        }
        let side = |o: &Option<StepObservables>| match o {
            Some(o) => [
                fmt_float(o.p1()),
                fmt_float(o.entropy),
                o.relevant.to_string(),
                o.irrelevant.to_string(),
            ],
            None => Default::default(),
        };
        let [p_a, s_a, r_a, i_a] = side(&a);
        let [p_b, s_b, r_b, i_b] = side(&b);
        writeln!(out, "{n},{p_a},{p_b},{s_a},{s_b},{r_a},{i_a},{r_b},{i_b}")?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let h = trajectory_header();
        let cols: Vec<&str> = h.split(',').collect();
        assert_eq!(cols.len(), 3 + 12 + 6);
        assert_eq!(&cols[..4], &["step", "n", "g", "lambda1"]);
        assert_eq!(cols[11], "p1");
        assert_eq!(*cols.last().unwrap(), "eliminated_index");
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
    }
}
