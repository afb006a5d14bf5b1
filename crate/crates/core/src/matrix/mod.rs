//! Formal matrix calculus for reducing attaching maps between wedges of
//! spheres and Moore spaces, and for reading off the resulting cones.

pub mod cone;
pub mod grid;
pub mod morphism;
pub mod poly;
pub mod replay;
pub mod word;

pub use cone::{cone_homology, split_cone, ConeReport};
pub use grid::{
    apply_step, load_script, parse_script, resolve_script, run_script, run_script_checked, run_script_trace, MatrixFile,
    MorphismMatrix, Replay, StepSpec, TransformStep,
};
pub use morphism::{FormalMorphism, RelationTable};
pub use poly::Poly;
pub use replay::{run_all, run_replay, ReplayOutcome};
pub use word::{Letter, Obj};
