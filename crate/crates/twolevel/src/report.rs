use std::io::Write;

use serde::Serialize;
use twolevel_core::decomposition::Combination;
use twolevel_core::simulator::ExecutionReport;

/// One CSV row per (matrix, combination, node count).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub matrix: String,
    pub combination: String,
    pub nodes: usize,
    pub cores_per_node: usize,
    pub lb_nodes: f64,
    pub lb_cores: f64,
    pub t_compute: f64,
    pub t_scatter: f64,
    pub t_gather: f64,
    pub t_construct_y: f64,
    pub t_gather_plus_construct: f64,
    pub t_total: f64,
    pub sum_dr: u64,
    pub sum_de: u64,
}

impl CsvRow {
    pub fn new(
        matrix: &str,
        combination: Combination,
        nodes: usize,
        cores: usize,
        r: &ExecutionReport,
    ) -> Self {
        CsvRow {
            matrix: matrix.to_string(),
            combination: combination.name().to_string(),
            nodes,
            cores_per_node: cores,
            lb_nodes: r.lb_nodes,
            lb_cores: r.lb_cores,
            t_compute: r.t_compute,
            t_scatter: r.t_scatter,
            t_gather: r.t_gather,
            t_construct_y: r.t_construct_y,
            t_gather_plus_construct: r.t_gather_plus_construct(),
            t_total: r.t_total(),
            sum_dr: r.comm.sum_dr(),
            sum_de: r.comm.sum_de(),
        }
    }
}

/// Header plus one line per row, LF endings.
pub fn write_csv<W: Write>(rows: &[CsvRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_shape() {
        let row = CsvRow {
            matrix: "m".into(),
            combination: "NL-HL".into(),
            nodes: 2,
            cores_per_node: 4,
            lb_nodes: 1.0,
            lb_cores: 1.25,
            t_compute: 8.0,
            t_scatter: 30.0,
            t_gather: 10.0,
            t_construct_y: 0.0,
            t_gather_plus_construct: 10.0,
            t_total: 48.0,
            sum_dr: 30,
            sum_de: 10,
        };
        let mut buf = Vec::new();
        write_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "matrix,combination,nodes,cores_per_node,lb_nodes,lb_cores,t_compute,t_scatter,t_gather,t_construct_y,t_gather_plus_construct,t_total,sum_dr,sum_de"
        );
        assert_eq!(
            lines.next().unwrap(),
            "m,NL-HL,2,4,1.0,1.25,8.0,30.0,10.0,0.0,10.0,48.0,30,10"
        );
        assert!(!text.contains('\r'));
    }
}
