//! Exact Fréchet distance oracle for one-dimensional curves.
//!
//! Index a curve `P` once with [`Oracle::build`]; then decide
//! `d_F(P, Q) <= delta` or compute `d_F(P, Q)` exactly for query curves `Q`
//! in time that depends on the complexity of `Q` and only
//! logarithmically on that of `P`.
//!
//! ```
//! use frechet_oracle::{exact_distance, Oracle};
//!
//! let oracle = Oracle::build(&[0.0, 10.0, 0.0]).unwrap();
//! assert!(oracle.decide(&[1.0, 8.0, 2.0], 2.0).unwrap());
//! assert_eq!(exact_distance(&oracle, &[1.0, 8.0, 2.0]).unwrap(), 2.0);
//! ```

pub mod cli;
pub mod decision;
pub mod distance;
pub mod error;
pub mod range_index;
pub mod reference;
pub mod series;
pub mod signature;

pub use decision::{
    boundary_seed, build_oracle, check_witness, decide, extract_witness, CoupledVisitingOrder,
    Decision, DecisionStats, Oracle, Query, Route,
};
pub use distance::{count_le, exact_distance, select_kth, CriticalFamily, FamilyKind};
pub use error::{Error, Result};
pub use range_index::RangeIndex;
pub use series::{first_entry, CurveParam, Envelope, IndexedSeries, TimeSeries, View};
pub use signature::{signature_size_at, validate_signature, ExtendedSignature, SignatureHierarchy};
