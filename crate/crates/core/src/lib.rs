//! Desk-scale computations for Reeb dynamics on the standard contact sphere.
//!
//! The crate mechanizes the linear-algebraic and combinatorial content behind
//! multiplicity results for closed Reeb orbits:
//!
//! * [`symplectic`]: validation and spectral classification of symplectic
//!   matrices, and the unipotent normal-form counts `nu0`, `b0`, `b_plus`,
//!   `b_minus`.
//! * [`index`]: Conley–Zehnder indices of sampled paths, exact iterate indices
//!   `mu_-`, `mu_+`, mean index, local Floer homology supports and the
//!   dynamical convexity predicate.
//! * [`hamiltonian`]: radial Hamiltonian profiles, the action functions
//!   `A_h` and `𝔞_H`, the continuation transfer map, and the bound evaluators
//!   used by the crossing-energy argument.
//! * [`recurrence`]: search and exact verification of index-recurrence
//!   sequences.
//! * [`ellipsoid`]: closed-form Reeb flows on ellipsoids.
//! * [`floer`]: reduced Floer graphs and persistence barcodes over `F_2`.
//! * [`audit`]: the arrow-exclusion bookkeeping for a finite orbit system.
//! * [`fixed_point`]: planar fixed-point indices, Lefschetz bookkeeping and
//!   the trace lemma.
//! * [`cli`]: the batch front-end behind the `reeb-lab` binary.

// NaN must fail the range checks, so negated comparisons are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod audit;
pub mod cli;
pub mod ellipsoid;
pub mod fixed_point;
pub mod floer;
pub mod hamiltonian;
pub mod index;
pub mod rational;
pub mod recurrence;
pub mod symplectic;

pub use audit::{audit, AuditError, AuditMode, AuditReport, OrbitSystem, OrbitSystemSpec};
pub use ellipsoid::{ellipsoid_periods, pseudo_rotation_instance, EllipsoidSpec};
pub use floer::barcode::{barcode, Bar, FilteredComplex};
pub use floer::{validate_graph, ReducedFloerGraph};
pub use hamiltonian::{HamiltonianProfile, ProfileSpec};
pub use index::{cz_index_sampled, index_triple, IndexTriple, IterationProfile, SymplecticPath};
pub use recurrence::{recurrence_search, verify_ir, RecurrenceQuery, RecurrenceSolution};
pub use symplectic::{validate_symplectic, williamson_invariants, SymplecticMatrix, WilliamsonInvariants};
