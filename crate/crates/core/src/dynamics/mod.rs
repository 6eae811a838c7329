//! Rotations, weighted polynomial multiple recurrence and finite
//! polynomial Szemerédi searches.

pub mod poly;
pub mod psz;
pub mod recurrence;
pub mod system;

pub use poly::IntPolynomial;
pub use psz::{basic_arrangement_census, finite_psz_search, ArrangementCensus, Grid, PolyMatrix, PszWitness};
pub use recurrence::{
    combinatorial_intersection_density, cyclic_battery, divisibility_table, finite_intersectivity_search,
    intersection_measure, recurrence_battery, uniform_recurrence_scan, weighted_orbit_average,
    weighted_poly_multirec_average, BatteryEntry, BatteryReport, BatteryRow, DivisibilityRow, DivisibilityTable,
    IntersectivityWitness, Measure, OrbitAverage, TrigPolynomial, UniformScan,
};
pub use system::{CircleSystem, CyclicSystem, RotationSystem};
