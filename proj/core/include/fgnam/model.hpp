#pragma once
#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "fgnam/rng.hpp"

namespace fgnam {

enum class Mode { Train, Eval };

/// One per-feature subnetwork: scalar input, tanh at every layer,
/// d-dimensional representation out.
struct FeatureNetParams {
  std::vector<Eigen::MatrixXd> W;  // W[l]: d_l x d_{l-1}, d_0 = 1
  std::vector<Eigen::VectorXd> b;  // b[l]: d_l
  int layers() const { return static_cast<int>(W.size()); }
};

/// Running statistics for the optional per-layer batch normalization
/// (normalization only, no learned affine).
struct BatchNormStats {
  std::vector<Eigen::VectorXd> mean;
  std::vector<Eigen::VectorXd> var;
};

struct ModelHyper {
  int num_features = 0;
  int num_risks = 0;
  std::vector<int> widths;  // per-layer output dims; widths.back() is d
  double p_dropout = 0.0;   // hidden-layer dropout
  double p_feature = 0.0;   // whole-feature contribution dropout
  bool batch_norm = false;
  double proj_epsilon = 1e-12;
  int rep_dim() const { return widths.back(); }
};

/// All learnable state: p feature nets plus one projection vector per
/// (feature, risk) pair. Projections enter the model L2-normalized.
struct ModelParams {
  ModelHyper hyper;
  std::vector<FeatureNetParams> nets;        // size p
  std::vector<Eigen::VectorXd> projections;  // size p*K, index i*K + (k-1)
  std::vector<BatchNormStats> bn;            // size p when batch_norm

  const Eigen::VectorXd& proj(int feature, int risk) const {
    return projections[static_cast<std::size_t>(feature * hyper.num_risks + risk - 1)];
  }
  Eigen::VectorXd& proj(int feature, int risk) {
    return projections[static_cast<std::size_t>(feature * hyper.num_risks + risk - 1)];
  }
};

/// Gradient accumulator shaped like the learnable part of ModelParams.
struct ModelGrad {
  std::vector<FeatureNetParams> nets;
  std::vector<Eigen::VectorXd> projections;
  static ModelGrad zeros_like(const ModelParams& params);
  void set_zero();
};

struct LayerTrace {
  Eigen::MatrixXd xhat;  // BN-normalized pre-activation (units x B), train+BN only
  Eigen::VectorXd mu;    // batch mean (BN train)
  Eigen::VectorXd var;   // biased batch variance (BN train)
  Eigen::MatrixXd y;     // tanh output (units x B)
  Eigen::MatrixXd x;     // layer output after dropout (units x B)
  Eigen::MatrixXd mask;  // dropout multipliers; empty unless hidden layer in train mode
};

/// Everything forward computes for a batch, retained for backward.
struct BatchTrace {
  Mode mode = Mode::Eval;
  Eigen::MatrixXd X;                            // B x p inputs
  std::vector<std::vector<LayerTrace>> feats;   // [p][L]
  Eigen::MatrixXd feature_mask;                 // p x B multipliers; empty in eval
  std::vector<Eigen::MatrixXd> g_raw;           // per risk: p x B projection outputs
  Eigen::MatrixXd eta;                          // B x K

  int batch_size() const { return static_cast<int>(X.rows()); }
  /// Contribution of (feature, risk) to eta for one subject, including any
  /// feature-dropout mask, so that eta == sum of contributions.
  double contribution(int subject, int feature, int risk) const;
};

/// Pinned dropout masks (multipliers, scaling included); lets tests replay
/// a stochastic forward pass exactly.
struct MaskSet {
  std::vector<std::vector<Eigen::MatrixXd>> dropout;  // [p][L-1], units x B
  Eigen::MatrixXd feature;                            // p x B
};
MaskSet masks_from_trace(const BatchTrace& trace);

inline constexpr double kBnEpsilon = 1e-5;

ModelParams init_params(int num_features, int num_risks, const std::vector<int>& widths,
                        std::uint64_t seed, double p_dropout = 0.0, double p_feature = 0.0,
                        bool batch_norm = false);

/// Eval-mode representation of one feature value (running BN stats, no
/// dropout).
Eigen::VectorXd featurenet_eval(const ModelParams& params, int feature, double x);

/// Normalized projection w~' h for a given representation.
double project(const ModelParams& params, int feature, int risk, const Eigen::VectorXd& h);

/// Shape function s_{i,k}(x) = g_{i,k}(f_i(x)), eval semantics.
double shape_value(const ModelParams& params, int feature, int risk, double x);

/// Forward pass over a batch (rows of X). Train mode draws dropout masks
/// from rng unless `masks` pins them, and normalizes with batch statistics
/// when BN is enabled.
BatchTrace forward_batch(const ModelParams& params, const Eigen::MatrixXd& X, Mode mode,
                         Rng* rng = nullptr, const MaskSet* masks = nullptr);

/// Eval-mode risk scores only (no trace retention).
Eigen::MatrixXd eval_eta(const ModelParams& params, const Eigen::MatrixXd& X);

/// Exact gradients of sum_c sum_k dEta(c,k) * eta_k(x_c) with respect to
/// every weight, bias and projection vector, accumulated into `acc`.
void backward_batch(const ModelParams& params, const BatchTrace& trace,
                    const Eigen::MatrixXd& dEta, ModelGrad& acc);

/// The one mutation point: folds the trace's batch statistics into the
/// running BN statistics.
void update_bn_running(ModelParams& params, const BatchTrace& trace, double momentum = 0.9);

// Deterministic flat parameter order: per feature, per layer W (row-major)
// then b; then projections by (feature, risk).
std::size_t param_count(const ModelParams& params);
void flatten_params(const ModelParams& params, std::vector<double>& out);
void unflatten_params(ModelParams& params, const std::vector<double>& in);
void flatten_grad(const ModelGrad& grad, std::vector<double>& out);
double params_sq_norm(const ModelParams& params);

}  // namespace fgnam
