pub mod jet;
pub mod report;
pub mod systems;
pub mod transforms;
pub mod reductions;
pub mod numerics;
pub mod soundness;
pub mod suite;
