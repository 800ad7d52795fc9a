//! Benchmark harness: load or generate a complex symmetric problem, run a set
//! of block solvers from `X_0 = 0`, and report iterations, the true residual
//! (TRR) and wall time per solver.

pub mod args;
pub mod report;
pub mod run;

pub use args::{Cli, Command, GenKind, OutputFormat, SolveArgs};
pub use report::{ReportMeta, ReportRow, RunReport};
pub use run::{emit_history, run_benchmark, BenchError, BenchmarkRun};
