//! Test support for the MATTER workspace: seeded data generators and
//! deliberately naive reference implementations ("oracles") of every
//! indicator and statistic.
//!
//! The oracles trade all efficiency for obviousness — plain scans and
//! double loops over definitions — so the optimized library code can be
//! checked against them on randomized inputs. Nothing here calls into the
//! library's own algorithm implementations.

pub mod gen;
pub mod oracle;
