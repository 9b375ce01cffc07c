//! Criterion benchmarks for the qhydro operators; see benches/operators.rs.
