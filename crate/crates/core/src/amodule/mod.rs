//! Bounded-below A-modules of finite type, stored as truncated action
//! tables, with the named modules used throughout as presets.

mod compute;
mod presentation;
mod presets;
mod quotient;
mod tensor;

pub use compute::{saturation, Saturated, SteenrodModule, TorsionWitness};
pub use presentation::{
    op_name, parse_op, sq_bidegree, ActionEntry, GenSpec, ModuleError, ModuleFile, ModulePresentation, RelationEntry, TargetEntry,
};
pub use presets::{
    amod_a0, atilde_quotient, augmentation_ideal, preset, tensor_over_a1_check, ModuleMap, ShortExactSequence, TensorCheck, PRESETS,
};
pub use tensor::{conjugate_sq, dual, tensor};
pub use quotient::{free_quotient, quotient_by_right_multiples, FreeQuotient, NamedWitness};
