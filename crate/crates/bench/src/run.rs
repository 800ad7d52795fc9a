use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use blocksym::mm::{read_block_file, read_matrix_market_file, MmError};
use blocksym::oracle::{gen_problem, gen_rhs, OracleError, ProblemSpec};
use blocksym::solvers::{
    check_complex_symmetric, solve, NormReference, SolveError, SolveResult, SolverConfig,
};
use blocksym::{BlockVector, SymMatrix};
use thiserror::Error;

use crate::args::SolveArgs;
use crate::report::{ReportMeta, ReportRow, RunReport};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot read matrix {path}: {source}")]
    Matrix { path: PathBuf, source: MmError },
    #[error("cannot read right-hand side {path}: {source}")]
    Rhs { path: PathBuf, source: MmError },
    #[error("cannot generate problem: {0}")]
    Generate(#[from] OracleError),
    #[error("--n is required with --gen")]
    MissingOrder,
    #[error("either --matrix or --gen must be given")]
    NoProblem,
    #[error("no solvers requested")]
    NoSolvers,
    #[error(
        "matrix {0} is not complex symmetric (check_complex_symmetric failed); refusing to run"
    )]
    NotComplexSymmetric(String),
    #[error("right-hand side has {found} rows and {found_p} columns, expected {n} x {p}")]
    RhsShape {
        n: usize,
        p: usize,
        found: usize,
        found_p: usize,
    },
    #[error("{solver}: {source}")]
    Solve { solver: String, source: SolveError },
    #[error("history for {solver} was not recorded")]
    NoHistory { solver: String },
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Report plus the full per-solver results, in request order.
#[derive(Debug)]
pub struct BenchmarkRun {
    pub report: RunReport,
    pub results: Vec<SolveResult>,
}

struct Problem {
    name: String,
    a: SymMatrix,
    b: BlockVector,
}

fn load_problem(args: &SolveArgs) -> Result<Problem, BenchError> {
    if let Some(path) = &args.matrix {
        let (_, a) = read_matrix_market_file(path).map_err(|source| BenchError::Matrix {
            path: path.clone(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let b = match &args.rhs {
            Some(rhs) => read_rhs(rhs)?,
            None => gen_rhs(a.n(), args.p, args.seed, false),
        };
        return Ok(Problem { name, a, b });
    }
    let kind = args.gen.ok_or(BenchError::NoProblem)?;
    let n = args.n.ok_or(BenchError::MissingOrder)?;
    let spec =
        ProblemSpec::new(kind.problem_kind(), n, args.p, args.seed).with_density(args.density);
    let (a, b) = gen_problem(&spec)?;
    let b = match &args.rhs {
        Some(rhs) => read_rhs(rhs)?,
        None => b,
    };
    Ok(Problem {
        name: format!("{}_n{n}", kind.name()),
        a,
        b,
    })
}

fn read_rhs(path: &Path) -> Result<BlockVector, BenchError> {
    read_block_file(path).map_err(|source| BenchError::Rhs {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads or generates the problem, runs every requested solver from `X_0 = 0`
/// and writes history files if asked. Only the solve call is timed.
pub fn run_benchmark(args: &SolveArgs) -> Result<BenchmarkRun, BenchError> {
    if args.solvers.is_empty() {
        return Err(BenchError::NoSolvers);
    }
    let Problem { name, a, b } = load_problem(args)?;
    if !check_complex_symmetric(&a) {
        return Err(BenchError::NotComplexSymmetric(name));
    }
    let n = a.n();
    if b.n() != n || b.p() != args.p {
        return Err(BenchError::RhsShape {
            n,
            p: args.p,
            found: b.n(),
            found_p: b.p(),
        });
    }

    let mut cfg = SolverConfig::default()
        .with_tol(args.tol)
        .with_norm_reference(args.norm_ref.into());
    cfg.max_iter = args.maxit;
    let x0 = BlockVector::zeros(n, args.p);

    let run_one = |kind| {
        let t = Instant::now();
        let res = solve(kind, &a, &b, &x0, &cfg);
        let cpu = t.elapsed().as_secs_f64();
        res.map(|r| (r, cpu)).map_err(|source| BenchError::Solve {
            solver: kind.to_string(),
            source,
        })
    };
    let outcomes: Vec<Result<(SolveResult, f64), BenchError>> = if args.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = args
                .solvers
                .iter()
                .map(|&k| s.spawn(move || run_one(k)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("solver thread panicked"))
                .collect()
        })
    } else {
        args.solvers.iter().map(|&k| run_one(k)).collect()
    };

    let mut rows = Vec::with_capacity(outcomes.len());
    let mut results = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        let (res, cpu) = outcome?;
        rows.push(ReportRow {
            solver: res.solver.name().to_string(),
            iterations: res.iterations,
            trr: res.trr,
            cpu,
            status: res.status.as_str().to_string(),
        });
        results.push(res);
    }

    if let Some(dir) = &args.history_dir {
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| BenchError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        for res in &results {
            let path = dir.join(format!("{name}_{}.csv", res.solver.name()));
            let file = File::create(&path).map_err(io_err(&path))?;
            let mut w = BufWriter::new(file);
            emit_history(res, &mut w)?;
            w.flush().map_err(io_err(&path))?;
        }
    }

    let report = RunReport {
        meta: ReportMeta {
            matrix: name,
            n,
            nnz: a.nnz(),
            p: args.p,
            tol: args.tol,
            seed: args.seed,
            norm_ref: NormReference::from(args.norm_ref).as_str().to_string(),
            cpu_reliable: !args.parallel,
        },
        rows,
    };
    Ok(BenchmarkRun { report, results })
}

/// Writes `iter,relres` with one row per iterate, 17 significant digits.
pub fn emit_history<W: Write>(result: &SolveResult, mut w: W) -> Result<(), BenchError> {
    if result.history.is_empty() {
        return Err(BenchError::NoHistory {
            solver: result.solver.to_string(),
        });
    }
    let wrap = |source| BenchError::Io {
        path: PathBuf::from("<history>"),
        source,
    };
    writeln!(w, "iter,relres").map_err(wrap)?;
    for (m, r) in result.history.iter().enumerate() {
        writeln!(w, "{m},{r:.16e}").map_err(wrap)?;
    }
    Ok(())
}
