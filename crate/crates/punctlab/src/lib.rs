//! punctlab: builders and decoders for punctual injection structures.
//!
//! The crate simulates, at finite horizon, stage-by-stage constructions that
//! hide information inside the orbit geometry of punctual structures and
//! recover it from isomorphisms:
//!
//! * [`core`] — the deterministic stage-machine engine and event logs.
//! * [`injection`] — orbit decomposition, truncation characters, the
//!   punctualization of computable injection structures and the brute-force
//!   partial-isomorphism oracle the test suites lean on.
//! * [`oracles`] — desk-scale models of the non-computable inputs: clocked
//!   total functions, limit approximations with scripted mind changes,
//!   step-bounded oracle schemes, c.e. schedules and the tuple codec.
//! * [`encode_d1`], [`encode_d2`], [`encode_d3`] — the three families of
//!   paired structures whose isomorphisms encode a convergence stage, a limit
//!   of a two-place approximation, and a double limit respectively.
//! * [`pathological`] — the priority construction of an injection structure
//!   with only finite orbits plus the Δ₂ tuple oracle that its opponents are
//!   pressed against.
//! * [`permitting`] — the W-permitted construction of a two-valued function
//!   whose errors are searched marker by marker.
//! * [`pressing`] — the four-symbol component/tail construction with switch
//!   duplication, opponent classification and both decoders.
//! * [`cli`] — configuration loading, dispatch, artifact emission and the
//!   verification report.

pub mod cli;
pub mod core;
pub mod encode_d1;
pub mod encode_d2;
pub mod encode_d3;
pub mod injection;
pub mod oracles;
pub mod pathological;
pub mod permitting;
pub mod pressing;
