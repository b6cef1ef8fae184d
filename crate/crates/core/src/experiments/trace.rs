//! Time-indexed simulation records and their CSV form.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::dtm::{self, DtmParams};
use crate::plant::ActuatorState;
use crate::units::{nm_per_deg, to_deg, to_mm};

/// CSV column list, in order.
pub const CSV_COLUMNS: [&str; 15] = [
    "t",
    "theta_r",
    "theta_s",
    "theta_pos",
    "theta_pivot",
    "l_s",
    "theta_o",
    "theta_tau",
    "tau",
    "tau_cmd",
    "delta_cmd",
    "omega_M1",
    "omega_M2",
    "tau_r",
    "tau_s",
];

/// One sample, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub t: f64,
    pub state: ActuatorState,
    /// Commanded torque, NaN when the run is open loop.
    pub tau_cmd: f64,
    /// Commanded stiffness, N·m/rad; NaN when open loop.
    pub delta_cmd: f64,
    /// Commanded pivot position, m; NaN when there is none.
    pub l_s_cmd: f64,
    /// Ring and sun shares of the output torque.
    pub tau_r: f64,
    pub tau_s: f64,
}

impl TraceRecord {
    pub fn new(t: f64, state: ActuatorState, dtm: &DtmParams) -> Self {
        // the gears deliver the output torque: carrier reaction is −τ
        let (tau_r, tau_s) = dtm::torque_split(-state.tau, dtm);
        Self {
            t,
            state,
            tau_cmd: f64::NAN,
            delta_cmd: f64::NAN,
            l_s_cmd: f64::NAN,
            tau_r,
            tau_s,
        }
    }

    /// Values in CSV order and CSV units (s, °, mm, N·m, N·m/°, rad/s).
    pub fn csv_values(&self) -> [f64; 15] {
        let s = &self.state;
        [
            self.t,
            to_deg(s.theta_r),
            to_deg(s.theta_s),
            to_deg(s.theta_pos),
            to_deg(s.theta_pivot),
            to_mm(s.l_s),
            to_deg(s.theta_o),
            to_deg(s.theta_tau),
            s.tau,
            self.tau_cmd,
            nm_per_deg(self.delta_cmd),
            s.omega_m1,
            s.omega_m2,
            self.tau_r,
            self.tau_s,
        ]
    }
}

/// Uniformly sampled run record.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    pub records: Vec<TraceRecord>,
}

impl SimTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: TraceRecord) {
        debug_assert!(self.records.last().is_none_or(|last| record.t > last.t));
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn times(&self) -> Vec<f64> {
        self.column(|r| r.t)
    }

    pub fn column(&self, f: impl Fn(&TraceRecord) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }

    /// Records with `t >= from`.
    pub fn since(&self, from: f64) -> impl Iterator<Item = &TraceRecord> {
        self.records.iter().filter(move |r| r.t >= from)
    }

    /// Keeps every `n`-th record.
    pub fn decimate(&self, n: usize) -> SimTrace {
        SimTrace {
            records: self.records.iter().step_by(n.max(1)).copied().collect(),
        }
    }

    pub fn csv_header() -> String {
        CSV_COLUMNS.join(",")
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::csv_header())?;
        let mut line = String::new();
        for r in &self.records {
            line.clear();
            for (i, v) in r.csv_values().iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                write!(line, "{v}").expect("writing to a String");
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// A plain table for datasets that are not time series.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::PlantParams;

    #[test]
    fn header_matches_column_list() {
        assert_eq!(
            SimTrace::csv_header(),
            "t,theta_r,theta_s,theta_pos,theta_pivot,l_s,theta_o,theta_tau,tau,tau_cmd,delta_cmd,omega_M1,omega_M2,tau_r,tau_s"
        );
    }

    #[test]
    fn record_units_and_split() {
        let p = PlantParams::default();
        let mut s = ActuatorState::with_pivot_position(0.03, &p).unwrap();
        s.theta_o = 0.1;
        s.refresh(&p);
        let r = TraceRecord::new(0.5, s, &p.dtm);
        let v = r.csv_values();
        assert!((v[5] - 30.0).abs() < 1e-9);
        assert!((v[4] - 90.0).abs() < 1e-9);
        assert!((r.tau_r + r.tau_s - s.tau).abs() < 1e-12);
        assert!((r.tau_r / r.tau_s - 2.0).abs() < 1e-12);

        let mut t = SimTrace::new();
        t.push(r);
        let csv = t.to_csv();
        assert_eq!(csv.lines().count(), 2);
        assert_eq!(csv.lines().nth(1).unwrap().split(',').count(), 15);
    }
}
