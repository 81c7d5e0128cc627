//! Orbit enumeration for finitely generated matrix groups.

pub mod ball;
pub mod enumerate;
pub mod pingpong;
pub mod presentation;

pub use ball::{ExponentEstimate, OrbitBall, RoughDecrease};
pub use enumerate::{brute_force_distances, enumerate_ball, EnumerationConfig};
pub use pingpong::PingPong;
pub use presentation::{load_group, Builtin, Generator, GroupPresentation, Letter};
