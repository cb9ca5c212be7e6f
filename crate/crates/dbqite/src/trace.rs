//! The common CSV trace schema shared by flow runs, imaginary-time curves,
//! phase-estimation results, and cost sweeps, plus a strict parser for it.
//!
//! Field reuse across engines (one schema serves all):
//! - flow rows: as labelled; gate columns hold cumulative circuit cost;
//! - `ite` rows: `k` is the sample index and `s_k` the duration τ;
//! - `qpe` rows: `k` is the precision-qubit count, `s_k` the rescale
//!   factor, `E_k` the success probability, `V_k` is 0.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! runs produce byte-identical files and re-parsing reproduces every field
//! bit for bit.

use crate::costing::GateCounts;
use crate::error::{Error, Result};
use crate::flow::FlowTrace;
use crate::ite::IteCurve;
use crate::qpe::QpeResult;

pub const TRACE_CSV_HEADER: &str = "engine,k,s_k,t_H,t_omega,E_k,V_k,F_k,cz,u3,t,depth";

/// One parsed row of the trace schema.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub engine: String,
    pub k: usize,
    pub s: f64,
    pub t_h: f64,
    pub t_omega: f64,
    pub energy: f64,
    pub variance: f64,
    pub fidelity: f64,
    pub cz: u64,
    pub u3: u64,
    pub t: u64,
    pub depth: u64,
}

impl TraceRow {
    fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.engine,
            self.k,
            self.s,
            self.t_h,
            self.t_omega,
            self.energy,
            self.variance,
            self.fidelity,
            self.cz,
            self.u3,
            self.t,
            self.depth
        )
    }
}

/// Rows for a flow trace; `costs`, when given, must hold one cumulative
/// gate count per record (including the `k = 0` initialization).
pub fn flow_rows(trace: &FlowTrace, costs: Option<&[GateCounts]>) -> Result<Vec<TraceRow>> {
    if let Some(costs) = costs {
        if costs.len() != trace.records.len() {
            return Err(Error::invalid(format!(
                "expected {} cost entries, got {}",
                trace.records.len(),
                costs.len()
            )));
        }
    }
    Ok(trace
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let g = costs.map(|c| c[i]).unwrap_or(GateCounts::ZERO);
            TraceRow {
                engine: trace.engine.to_string(),
                k: r.k,
                s: r.s,
                t_h: r.t_h,
                t_omega: r.t_omega,
                energy: r.energy,
                variance: r.variance,
                fidelity: r.fidelity,
                cz: g.cz,
                u3: g.u3,
                t: g.t,
                depth: g.depth,
            }
        })
        .collect())
}

/// Rows for an imaginary-time curve (`k` = sample index, `s_k` = τ).
pub fn ite_rows(curve: &IteCurve) -> Vec<TraceRow> {
    curve
        .taus
        .iter()
        .enumerate()
        .map(|(i, &tau)| TraceRow {
            engine: "ite".to_string(),
            k: i,
            s: tau,
            t_h: 0.0,
            t_omega: 0.0,
            energy: curve.energies[i],
            variance: curve.variances[i],
            fidelity: curve.fidelities[i],
            cz: 0,
            u3: 0,
            t: 0,
            depth: 0,
        })
        .collect()
}

/// Row for a phase-estimation result (`k` = precision qubits, `s_k` =
/// rescale factor, `E_k` = success probability).
pub fn qpe_row(result: &QpeResult, cost: GateCounts) -> TraceRow {
    TraceRow {
        engine: "qpe".to_string(),
        k: result.precision_qubits,
        s: result.rescale_factor,
        t_h: 0.0,
        t_omega: 0.0,
        energy: result.success_prob,
        variance: 0.0,
        fidelity: result.post_fidelity,
        cz: cost.cz,
        u3: cost.u3,
        t: cost.t,
        depth: cost.depth,
    }
}

/// Serializes header plus rows.
pub fn to_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from(TRACE_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

/// Strict parser for the trace schema; errors name the offending row and
/// column.
pub fn parse_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::invalid("empty CSV input"))?;
    if header.trim() != TRACE_CSV_HEADER {
        return Err(Error::invalid(format!(
            "unexpected CSV header {header:?}; want {TRACE_CSV_HEADER:?}"
        )));
    }
    let columns: Vec<&str> = TRACE_CSV_HEADER.split(',').collect();
    let mut rows = Vec::new();
    for (line_no, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(Error::invalid(format!(
                "row {}: expected {} fields, got {}",
                line_no + 2,
                columns.len(),
                fields.len()
            )));
        }
        let parse_f64 = |idx: usize| -> Result<f64> {
            fields[idx].parse().map_err(|_| {
                Error::invalid(format!(
                    "row {}, column {}: cannot parse {:?} as a number",
                    line_no + 2,
                    columns[idx],
                    fields[idx]
                ))
            })
        };
        let parse_u64 = |idx: usize| -> Result<u64> {
            fields[idx].parse().map_err(|_| {
                Error::invalid(format!(
                    "row {}, column {}: cannot parse {:?} as an integer",
                    line_no + 2,
                    columns[idx],
                    fields[idx]
                ))
            })
        };
        rows.push(TraceRow {
            engine: fields[0].to_string(),
            k: parse_u64(1)? as usize,
            s: parse_f64(2)?,
            t_h: parse_f64(3)?,
            t_omega: parse_f64(4)?,
            energy: parse_f64(5)?,
            variance: parse_f64(6)?,
            fidelity: parse_f64(7)?,
            cz: parse_u64(8)?,
            u3: parse_u64(9)?,
            t: parse_u64(10)?,
            depth: parse_u64(11)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble;
    use crate::flow::{run_flow, Engine, Schedule};
    use crate::hamiltonian::{EvolutionMethod, PauliSum};

    fn sample_trace() -> FlowTrace {
        let h = PauliSum::heisenberg_chain(3).unwrap();
        let psi = ensemble::random_state(3, &mut ensemble::rng_for(1, "trace"));
        run_flow(&h, &psi, Engine::Dbqite, &Schedule::fixed(0.03), 3, EvolutionMethod::Exact)
            .unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let trace = sample_trace();
        let rows = flow_rows(&trace, None).unwrap();
        let text = to_csv(&rows);
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(rows, parsed);
        // serializing again yields identical bytes
        assert_eq!(text, to_csv(&parsed));
    }

    #[test]
    fn parser_names_row_and_column() {
        let mut text = String::from(TRACE_CSV_HEADER);
        text.push_str("\ndbqite,0,0,0,0,not_a_number,0,0,0,0,0,0\n");
        let err = parse_csv(&text).unwrap_err().to_string();
        assert!(err.contains("row 2"), "{err}");
        assert!(err.contains("E_k"), "{err}");
    }

    #[test]
    fn parser_rejects_wrong_header_and_width() {
        assert!(parse_csv("nope\n").is_err());
        let mut text = String::from(TRACE_CSV_HEADER);
        text.push_str("\ndbqite,0,0\n");
        let err = parse_csv(&text).unwrap_err().to_string();
        assert!(err.contains("expected 12 fields"), "{err}");
    }

    #[test]
    fn cost_length_mismatch_rejected() {
        let trace = sample_trace();
        let costs = vec![GateCounts::ZERO; 2];
        assert!(flow_rows(&trace, Some(&costs)).is_err());
    }
}
