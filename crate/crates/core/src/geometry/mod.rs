//! Domains, 1D interval partitions, 2D grid partitions and the strip and
//! interface-neighborhood constructions.

mod grid;
mod interval;
mod label;
mod lipschitz;
mod partition;
mod regions;

pub use grid::{CellRect, CellSet, Frame2D, GridPartition2D, Segment};
pub use interval::{Interval, IntervalSet};
pub use label::PhaseLabel;
pub use lipschitz::LipschitzGraph;
pub use partition::{strip_region_1d, Domain1D, Partition1D};
pub use regions::{interface_neighborhood, strip_region_2d};
