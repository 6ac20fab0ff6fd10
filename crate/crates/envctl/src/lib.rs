//! Library surface of the `envctl` binary: model file schema and assembly,
//! query parsing, exact-rational text handling, report rendering, and the
//! command implementations. Exposed as a library so integration tests can
//! drive the same code paths the binary does.

pub mod commands;
pub mod modelfile;
pub mod queries;
pub mod rationals;
pub mod report;
