pub mod boxcat;
pub mod cubset;
pub mod zlinalg;
pub mod kan;
pub mod specseq;
pub mod exprparse;
pub mod geomcurv;
pub mod levelset;

pub use boxcat::{BoxMorphism, Sign};
pub use cubset::{Cube, CubicalMap, CubicalSet, GenId};
pub use geomcurv::MetricFamily;
pub use levelset::DiceConfig;
pub use zlinalg::{AbelianInvariants, ChainComplex, IntMatrix};
