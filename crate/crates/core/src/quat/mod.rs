//! Definite quaternion algebras over Q: arithmetic, orders, right ideals,
//! ideal classes, and local normalizers.

pub mod algebra;
pub mod classes;
pub mod ideal;
pub mod normalizer;
pub mod order;

pub use algebra::{hilbert_symbol, Quat, QuatAlgebra};
pub use classes::ClassSet;
pub use ideal::{connecting_elements, isomorphic, RightIdeal};
pub use normalizer::{class_action, normalizer_generators, normalizer_w, ClassAction};
pub use order::{build_order, maximal_order, QuatOrder};
