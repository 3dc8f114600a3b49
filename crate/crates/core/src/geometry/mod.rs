//! Model spaces: the quotient surfaces `M`, their orbifold charts, the
//! S¹-spaces `X` over them, and twist bundles.

pub mod chart;
pub mod quad;
pub mod space;
pub mod surface;
pub mod twist;

pub use chart::{Bump, OrbifoldChart};
pub use space::{catalog, CatalogParams, SOneSpace, SpaceKind, XPoint};
pub use surface::{Frame, Point, Revolution, Surface, Vec3};
pub use twist::{TwistBundle, TwistKind};
