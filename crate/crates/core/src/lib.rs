pub mod analysis;
pub mod bundled;
pub mod chartable;
pub mod classalg;
pub mod cyclotomic;
pub mod oracle;
pub mod perm;
pub mod report;
pub mod scenario;

pub use chartable::{lint_table, parse_table, CharacterTable, ClassInfo, Diagnostic};
pub use classalg::{sigma_h, xi3, xi4, ClassTuple, FusionMap};
pub use cyclotomic::{CycloError, CycloNum};
pub use perm::{CycleType, Perm, PermGroup};
