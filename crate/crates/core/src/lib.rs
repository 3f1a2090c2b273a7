//! Exact graded Clifford algebra, graded modules and KO-theory of a point,
//! the groups G^±(n,s⁺,s⁻), lattice Witten-deformation spectra, and a
//! catalog-driven characteristic-submanifold reduction ledger.

pub mod checks;
pub mod clifford;
pub mod group;
pub mod ko;
pub mod ledger;
pub mod module;
pub mod oracle;
pub mod quaternion;
pub mod quatreps;
pub mod qmat;
pub mod rational;
pub mod witten;

pub use clifford::{Blade, CliffordError, Multivector, Signature};
pub use group::{GroupElement, GroupParams, Variant};
pub use ko::{KOClass, KOGroup, KOValue};
pub use ledger::{Ledger, SectionDescriptor, StructureDescriptor};
pub use module::GradedModule;
pub use qmat::QMat;
pub use rational::Q;
