//! Gluing of finite topological spaces, sheaves of abelian groups and ringed spaces
//! along the index category of an open cover.

pub mod doc;
pub mod gen;
pub mod group;
pub mod index;
pub mod pipeline;
pub mod presheaf;
pub mod ring;
pub mod ringed;
pub mod sheaf_glue;
pub mod space;
pub mod top_glue;

pub use group::{AbHom, FgAbGroup, Group, IntMatrix};
pub use index::{GlueObject, Generator, GluingIndexCategory};
pub use presheaf::{EnrichedMorphism, Presheaf, PresheafRef};
pub use ring::{FinCommRing, Ring, RingHom};
pub use ringed::{GluedRinged, RingSheaf, RingedGluingData, RingedGluingFunctor, RingedMorphism, RingedSpace, RingedVariant};
pub use sheaf_glue::{LimitSheaf, SheafGlueError, SheafGluingData, SheafGluingFunctor};
pub use space::{ContinuousMap, FinSpace, PointSet, Space};
pub use top_glue::{GlueError, GlueReport, GluedSpace, TopCone, TopGluingData, TopGluingFunctor, TopVariant};
