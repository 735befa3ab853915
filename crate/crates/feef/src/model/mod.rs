//! The agent's learned generative model: replay buffer, normalizer,
//! bootstrapped transition ensemble, reward model, per-episode cold-start
//! training, and checkpointing.

pub mod buffer;
pub mod checkpoint;
pub mod ensemble;
pub mod normalizer;
pub mod train;

pub use buffer::{ReplayBuffer, Transition};
pub use checkpoint::{checkpoint_to_string, load_checkpoint, save_checkpoint};
pub use ensemble::{
    predict_reward, predict_transition, DynamicsModel, ModelCtx, RewardModel, TransitionEnsemble,
    WorldModel,
};
pub use normalizer::Normalizer;
pub use train::{init_world_model, train_world_model, TrainConfig, TrainReport};
