//! Classical simulation of variational quantum key-search attacks.
//!
//! A parameterized circuit prepares a key register, a decoded key is fed to a classical
//! target (block cipher or toy hash), and the Hamming distance to the known output drives
//! the parameter updates.

pub mod ansatz;
pub mod attack;
pub mod bench;
pub mod bits;
pub mod cost;
pub mod encoding;
pub mod error;
pub mod optimizer;
pub mod plot;
pub mod qsim;
pub mod rng;
pub mod targets;

pub use ansatz::{Ansatz, AnsatzConfig};
pub use attack::{run_attack, run_hybrid_attack, AttackConfig, AttackResult};
pub use bits::BitString;
pub use encoding::{EncodingMode, EncodingSpec};
pub use error::{Result, VqaaError};
pub use optimizer::{Method, OptimizerConfig};
pub use qsim::{Gate, Statevector};
pub use targets::{AttackTarget, Cipher};
