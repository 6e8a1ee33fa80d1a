//! Dual automorphisms of free groups.
//!
//! An automorphism `φ` of the free group `F_N` extends to a homeomorphism of
//! the Gromov boundary, and its dual `φ*` maps a cylinder `C_u` (the reduced
//! infinite words starting with `u`) onto a finite union of cylinders. This
//! crate computes that union both from the defining formula and through
//! precomputed suffix tables, and estimates the growth rate of the iterates.
//!
//! ```
//! use freedual::{automorphism::ElementaryMove, dual, words::{Basis, Letter}};
//!
//! let basis = Basis::standard(2).unwrap();
//! let table = dual::build_collection(&[ElementaryMove::nielsen(0, Letter::positive(1))], 2).unwrap();
//! let w = basis.parse_word("aab").unwrap();
//! assert_eq!(dual::dual_apply_fast(&table, &w).format(&basis), "{ababA, ababb}");
//! ```

pub mod automorphism;
pub mod cli;
pub mod cylinders;
pub mod dual;
pub mod error;
pub mod growth;
pub mod oracle;
pub mod sample;
pub mod words;

pub use automorphism::{Automorphism, ElementaryMove, GeneratorMap};
pub use cylinders::PrefixSet;
pub use dual::SuffixTable;
pub use error::{Error, Result};
pub use words::{Basis, Letter, ReducedWord};
