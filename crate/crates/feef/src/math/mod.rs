//! Numerical kernels: diagonal Gaussians, dense nets with analytic
//! gradients, Adam, and a sample-based entropy estimator.

pub mod adam;
pub mod gaussian;
pub mod knn;
pub mod loss;
pub mod net;

pub use adam::AdamState;
pub use gaussian::{gaussian_entropy, gaussian_kl, softmax_stable, DiagonalGaussian};
pub use knn::knn_entropy;
pub use loss::{nll_loss, nll_loss_and_grads, LossHead};
pub use net::{net_forward, Activation, DenseNet, NetScratch};
