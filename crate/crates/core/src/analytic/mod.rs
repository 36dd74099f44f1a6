//! Closed-form accessible and Holevo information with their optimizers.

pub mod holevo;
pub mod one_sender;
pub mod roots;
pub mod two_sender;

pub use holevo::{holevo_one_sender_closed_form, HolevoOptimum};
pub use one_sender::{
    acc_info_one_sender, j_one_sender, lemma_alpha_beta_scan, optimize_one_sender, AccInfo, OneSenderOptimum,
    OneSenderScenario, Regime, SymmetricPovmParams,
};
pub use two_sender::{acc_info_two_sender_ternary, optimize_two_sender_ternary, TwoSenderOptimum, TwoSenderTernaryScenario};
