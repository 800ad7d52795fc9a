use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

/// Problem and run parameters shared by every row of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportMeta {
    pub matrix: String,
    pub n: usize,
    pub nnz: usize,
    pub p: usize,
    pub tol: f64,
    pub seed: u64,
    pub norm_ref: String,
    /// False when solvers ran concurrently.
    pub cpu_reliable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub solver: String,
    pub iterations: usize,
    pub trr: f64,
    pub cpu: f64,
    /// `converged` or `failed: <kind>`.
    pub status: String,
}

impl ReportRow {
    pub fn converged(&self) -> bool {
        self.status == "converged"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub meta: ReportMeta,
    pub rows: Vec<ReportRow>,
}

/// One CSV line: metadata repeated on every row.
#[derive(Debug, Serialize, Deserialize)]
struct CsvRecord {
    matrix: String,
    n: usize,
    nnz: usize,
    p: usize,
    tol: f64,
    seed: u64,
    norm_ref: String,
    solver: String,
    iters: usize,
    trr: f64,
    cpu: f64,
    status: String,
    cpu_reliable: bool,
}

impl RunReport {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(ReportRow::converged)
    }

    pub fn row(&self, solver: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.solver == solver)
    }

    /// Copy with the timing column zeroed, for comparisons.
    pub fn without_cpu(&self) -> RunReport {
        let mut out = self.clone();
        out.rows.iter_mut().for_each(|r| r.cpu = 0.0);
        out
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for r in &self.rows {
            let m = &self.meta;
            wtr.serialize(CsvRecord {
                matrix: m.matrix.clone(),
                n: m.n,
                nnz: m.nnz,
                p: m.p,
                tol: m.tol,
                seed: m.seed,
                norm_ref: m.norm_ref.clone(),
                solver: r.solver.clone(),
                iters: r.iterations,
                trr: r.trr,
                cpu: r.cpu,
                status: r.status.clone(),
                cpu_reliable: m.cpu_reliable,
            })?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn from_csv<R: Read>(r: R) -> Result<RunReport, String> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut meta: Option<ReportMeta> = None;
        let mut rows = Vec::new();
        for rec in rdr.deserialize::<CsvRecord>() {
            let rec = rec.map_err(|e| e.to_string())?;
            let this = ReportMeta {
                matrix: rec.matrix,
                n: rec.n,
                nnz: rec.nnz,
                p: rec.p,
                tol: rec.tol,
                seed: rec.seed,
                norm_ref: rec.norm_ref,
                cpu_reliable: rec.cpu_reliable,
            };
            match &meta {
                None => meta = Some(this),
                Some(m) if *m != this => return Err("rows disagree on report metadata".into()),
                Some(_) => {}
            }
            rows.push(ReportRow {
                solver: rec.solver,
                iterations: rec.iters,
                trr: rec.trr,
                cpu: rec.cpu,
                status: rec.status,
            });
        }
        let meta = meta.ok_or("report has no rows")?;
        Ok(RunReport { meta, rows })
    }

    /// Aligned Markdown table; non-converged rows carry a dagger.
    pub fn write_markdown<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let m = &self.meta;
        writeln!(
            w,
            "**{}** n = {}, nnz = {}, p = {}, tol = {:e}, seed = {}, norm-ref = {}{}",
            m.matrix,
            m.n,
            m.nnz,
            m.p,
            m.tol,
            m.seed,
            m.norm_ref,
            if m.cpu_reliable {
                ""
            } else {
                " (parallel run, CPU times unreliable)"
            }
        )?;
        writeln!(w)?;
        let header = ["Method", "Iters", "TRR", "CPU (s)", "Status"];
        let cells: Vec<[String; 5]> = self
            .rows
            .iter()
            .map(|r| {
                let dagger = if r.converged() { "" } else { " †" };
                [
                    r.solver.clone(),
                    format!("{}{dagger}", r.iterations),
                    format!("{:.2}", r.trr),
                    format!("{:.3}", r.cpu),
                    r.status.clone(),
                ]
            })
            .collect();
        let widths: Vec<usize> = (0..5)
            .map(|k| {
                cells
                    .iter()
                    .map(|c| c[k].chars().count())
                    .chain([header[k].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        // text columns left-aligned, numbers right-aligned
        let right = [false, true, true, true, false];
        let line = |vals: [&str; 5]| {
            let parts: Vec<String> = (0..5)
                .map(|k| {
                    let pad = widths[k] - vals[k].chars().count();
                    if right[k] {
                        format!("{}{}", " ".repeat(pad), vals[k])
                    } else {
                        format!("{}{}", vals[k], " ".repeat(pad))
                    }
                })
                .collect();
            format!("| {} |", parts.join(" | "))
        };
        writeln!(w, "{}", line(header))?;
        let rule: Vec<String> = (0..5)
            .map(|k| {
                let dashes = "-".repeat(widths[k].saturating_sub(1));
                if right[k] {
                    format!("{dashes}:")
                } else {
                    format!("{dashes}-")
                }
            })
            .collect();
        writeln!(w, "| {} |", rule.join(" | "))?;
        for c in &cells {
            writeln!(w, "{}", line([&c[0], &c[1], &c[2], &c[3], &c[4]]))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        RunReport {
            meta: ReportMeta {
                matrix: "young3c".into(),
                n: 841,
                nnz: 3988,
                p: 8,
                tol: 1e-10,
                seed: 1,
                norm_ref: "rhs".into(),
                cpu_reliable: true,
            },
            rows: vec![
                ReportRow {
                    solver: "bl_cocg".into(),
                    iterations: 841,
                    trr: -3.25,
                    cpu: 0.5,
                    status: "failed: max_iter".into(),
                },
                ReportRow {
                    solver: "bl_cocr".into(),
                    iterations: 145,
                    trr: -9.95,
                    cpu: 0.04,
                    status: "converged".into(),
                },
            ],
        }
    }

    #[test]
    fn csv_round_trip() {
        let rep = sample();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "matrix,n,nnz,p,tol,seed,norm_ref,solver,iters,trr,cpu,status,cpu_reliable\n"
        ));
        assert_eq!(RunReport::from_csv(buf.as_slice()).unwrap(), rep);
    }

    #[test]
    fn non_finite_trr_survives_csv() {
        let mut rep = sample();
        rep.rows[1].trr = f64::NEG_INFINITY;
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        assert_eq!(
            RunReport::from_csv(buf.as_slice()).unwrap().rows[1].trr,
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn markdown_is_aligned() {
        let mut buf = Vec::new();
        sample().write_markdown(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let table: Vec<&str> = text.lines().filter(|l| l.starts_with('|')).collect();
        assert_eq!(table.len(), 4);
        assert!(table
            .iter()
            .all(|l| l.chars().count() == table[0].chars().count()));
        assert!(table[2].contains("841 †"));
        assert!(table[3].contains("-9.95"));
    }

    #[test]
    fn empty_csv_is_rejected() {
        assert!(RunReport::from_csv("matrix,n\n".as_bytes()).is_err());
    }
}
