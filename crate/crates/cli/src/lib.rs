//! Schema and input plumbing behind the `bellrelax` binary.

pub mod record;
pub mod source;
