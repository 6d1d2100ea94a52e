//! Probabilistic object detection at desk scale.
//!
//! An image is modelled as carrying an *object distribution*: a mixture of
//! isotropic Gaussians whose density at a point encodes the presence of an
//! object centered there. A small CNN is trained to regress that density at
//! the center of its 32x32 receptive field, either from a
//! deformation-generated dataset or with a tangent-penalty loss that pins the
//! network's derivatives under scale and shift deformations to their analytic
//! values. Detection runs the regressor over a geometric schedule of window
//! sizes (or steers a probe-and-move automaton over the field) and extracts
//! modes with covariance-derived sizes.
//!
//! Modules:
//! - [`numerics`]: dense tensors, convolution/pooling with hand-written
//!   backward passes, finite differences.
//! - [`density`]: mixture components, the canonical-frame target convention.
//! - [`deform`]: scale/shift deformations, tangent targets, dataset generation.
//! - [`model`]: the C1/C2/C3 regressors, losses, SGD training, checkpoints.
//! - [`search`]: geometric window schedules and the heuristic automaton.
//! - [`detect`]: density-field assembly, mode extraction, detection scoring.
//! - [`dataio`]: PGM images, fold-format ellipse annotations, synthetic scenes.

pub mod dataio;
pub mod deform;
pub mod density;
pub mod detect;
pub mod model;
pub mod numerics;
pub mod search;

pub use dataio::{Ellipse, FddbAnnotation, ImageGray, SceneSpec};
pub use deform::{GenRecipe, Seed, TangentTargets, TrainingSample};
pub use density::{GaussianComponent, ObjectDistribution, BETA0_CANONICAL, TARGET_RENORM};
pub use detect::{BBox, DensityField, Detection, DetectionRecord, ScoreReport};
pub use model::{Architecture, CnnModel, LossConfig, TrainHistory, TrainOptions, Variant};
pub use numerics::Tensor;
pub use search::{AutomatonParams, ScalarField, ScaleSchedule, SearchOutcome, Window};
