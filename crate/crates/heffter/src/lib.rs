//! Heffter systems, Heffter spaces, and Heffter difference packings over
//! finite fields, together with the mutually orthogonal cycle systems they
//! generate.
//!
//! The crate is organized around five building blocks:
//!
//! - [`field`]: exact GF(p^n) arithmetic, discrete logs, cyclotomic classes,
//!   and half-sets;
//! - [`designs`]: the data model and verifier for Heffter systems, spaces,
//!   configurations, nets, and Heffter arrays;
//! - [`construct`]: deterministic constructions (coset spaces, development of
//!   difference packings, root-of-unity nets, the GF(3^5) net);
//! - [`search`]: backtracking and greedy searches for Heffter rulers,
//!   difference packings, and net seeds, plus the Weil-type bound calculator;
//! - [`cycles`]: partial-sum base cycles, k-cycle systems, orthogonality, and
//!   super-orthogonal Steiner triple systems.
//!
//! Certificates ([`cert`]) give every object a canonical, diff-able text form
//! that self-verifies.
//!
//! A narrative guide with runnable examples lives in the `book/` directory of
//! the repository; its code blocks are compiled as doc-tests of this crate.

pub mod cert;
pub mod construct;
pub mod cycles;
pub mod designs;
pub mod field;
pub mod search;

mod guide;

pub use field::{Elem, FieldCtx, FieldError, FieldSpec, HalfSet, SquareLog};
