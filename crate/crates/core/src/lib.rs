//! Exact Poincaré series of triply graded Khovanov–Rozansky homology for
//! 4-strand Coxeter braids, with an independent linear-algebra oracle for the
//! bigraded Hilbert series of the associated ideal.
//!
//! * [`ring`]: exact series arithmetic in `Z[q, a][t, t^-1][(1 - q)^-1]`
//! * [`engine`]: memoized evaluation of the recursion families
//! * [`torus_base`]: homology of full twists on two and four strands
//! * [`oracle`]: Hilbert function of `J(d1, d2, d3, d4)` by exact rank
//! * [`verify`]: engine/oracle comparison and positivity certificates
//! * [`cache`]: on-disk store for computed values
//! * [`cli`]: the `hhh` command-line tool

pub mod cache;
pub mod cli;
pub mod engine;
pub mod error;
pub mod format;
pub mod oracle;
pub mod ring;
pub mod selftest;
pub mod torus_base;
pub mod verify;

pub use engine::{CoxeterDegrees, Engine, EvalMode, FamilyKey};
pub use error::{BaseCaseError, CacheError, EngineError, OracleError, ParseError, VerifyError};
pub use oracle::{BidegreeTable, Bidegree};
pub use ring::{CoeffTable, GradedSeries, LaurentPoly, Monomial};
