//! Library side of the `cheblanczos` command: report types, the degree
//! bench and filter dumps.

pub mod bench;
pub mod filter_dump;
pub mod report;

pub use bench::{format_table, parse_degrees, run_bench, to_csv, DegreeSpec};
pub use filter_dump::{dump_filter, FilterDump};
pub use report::{
    exit_code, matrix_name, run_solve, SolveOptions, SolveReport, Status, EXIT_NOT_CONVERGED,
};
