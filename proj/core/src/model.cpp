#include "fgnam/model.hpp"

#include <cmath>

#include "fgnam/error.hpp"

namespace fgnam {

ModelGrad ModelGrad::zeros_like(const ModelParams& params) {
  ModelGrad g;
  g.nets.resize(params.nets.size());
  for (std::size_t i = 0; i < params.nets.size(); ++i) {
    const auto& net = params.nets[i];
    auto& gn = g.nets[i];
    gn.W.reserve(net.W.size());
    gn.b.reserve(net.b.size());
    for (std::size_t l = 0; l < net.W.size(); ++l) {
      gn.W.push_back(Eigen::MatrixXd::Zero(net.W[l].rows(), net.W[l].cols()));
      gn.b.push_back(Eigen::VectorXd::Zero(net.b[l].size()));
    }
  }
  g.projections.reserve(params.projections.size());
  for (const auto& w : params.projections)
    g.projections.push_back(Eigen::VectorXd::Zero(w.size()));
  return g;
}

void ModelGrad::set_zero() {
  for (auto& net : nets) {
    for (auto& W : net.W) W.setZero();
    for (auto& b : net.b) b.setZero();
  }
  for (auto& w : projections) w.setZero();
}

double BatchTrace::contribution(int subject, int feature, int risk) const {
  double g = g_raw[static_cast<std::size_t>(risk - 1)](feature, subject);
  if (feature_mask.size() > 0) g *= feature_mask(feature, subject);
  return g;
}

MaskSet masks_from_trace(const BatchTrace& trace) {
  MaskSet m;
  m.feature = trace.feature_mask;
  m.dropout.resize(trace.feats.size());
  for (std::size_t i = 0; i < trace.feats.size(); ++i) {
    const auto& layers = trace.feats[i];
    for (std::size_t l = 0; l + 1 < layers.size(); ++l)
      m.dropout[i].push_back(layers[l].mask);
  }
  return m;
}

ModelParams init_params(int num_features, int num_risks, const std::vector<int>& widths,
                        std::uint64_t seed, double p_dropout, double p_feature,
                        bool batch_norm) {
  if (num_features < 1 || num_risks < 1) throw Error("init: need p >= 1 and K >= 1");
  if (widths.empty()) throw Error("init: widths must be nonempty");
  for (int w : widths)
    if (w < 1) throw Error("init: layer widths must be >= 1");
  if (!(p_dropout >= 0.0 && p_dropout < 1.0) || !(p_feature >= 0.0 && p_feature < 1.0))
    throw Error("init: dropout rates must lie in [0,1)");

  ModelParams params;
  params.hyper.num_features = num_features;
  params.hyper.num_risks = num_risks;
  params.hyper.widths = widths;
  params.hyper.p_dropout = p_dropout;
  params.hyper.p_feature = p_feature;
  params.hyper.batch_norm = batch_norm;

  Rng rng = Rng::stream(seed, 10);
  const int L = static_cast<int>(widths.size());
  const int d = widths.back();

  for (int i = 0; i < num_features; ++i) {
    FeatureNetParams net;
    int fan_in = 1;
    for (int l = 0; l < L; ++l) {
      const int fan_out = widths[static_cast<std::size_t>(l)];
      const double bound = std::sqrt(6.0 / double(fan_in + fan_out));
      Eigen::MatrixXd W(fan_out, fan_in);
      for (int r = 0; r < fan_out; ++r)
        for (int c = 0; c < fan_in; ++c) W(r, c) = rng.uniform(-bound, bound);
      net.W.push_back(std::move(W));
      net.b.push_back(Eigen::VectorXd::Zero(fan_out));
      fan_in = fan_out;
    }
    params.nets.push_back(std::move(net));
  }

  const double pbound = std::sqrt(6.0 / double(d + 1));
  for (int i = 0; i < num_features; ++i) {
    for (int k = 0; k < num_risks; ++k) {
      Eigen::VectorXd w(d);
      for (int r = 0; r < d; ++r) w(r) = rng.uniform(-pbound, pbound);
      if (w.norm() == 0.0) w(0) = pbound;  // probability-zero guard
      params.projections.push_back(std::move(w));
    }
  }

  if (batch_norm) {
    params.bn.resize(static_cast<std::size_t>(num_features));
    for (auto& stats : params.bn) {
      for (int l = 0; l < L; ++l) {
        stats.mean.push_back(Eigen::VectorXd::Zero(widths[static_cast<std::size_t>(l)]));
        stats.var.push_back(Eigen::VectorXd::Ones(widths[static_cast<std::size_t>(l)]));
      }
    }
  }
  return params;
}

namespace {

void check_finite(const Eigen::MatrixXd& m, int feature, int layer) {
  if (!m.allFinite())
    throw Error("forward: non-finite activation in feature " + std::to_string(feature) +
                ", layer " + std::to_string(layer + 1));
}

}  // namespace

BatchTrace forward_batch(const ModelParams& params, const Eigen::MatrixXd& X, Mode mode,
                         Rng* rng, const MaskSet* masks) {
  const ModelHyper& hp = params.hyper;
  const int B = static_cast<int>(X.rows());
  const int p = hp.num_features;
  const int K = hp.num_risks;
  const int L = static_cast<int>(hp.widths.size());
  if (static_cast<int>(X.cols()) != p) throw Error("forward: input width mismatch");
  const bool train = mode == Mode::Train;
  if (train && hp.p_dropout == 0.0 && hp.p_feature == 0.0) {
    // no stochastic masks needed
  } else if (train && rng == nullptr && masks == nullptr) {
    throw Error("forward: train mode needs an rng or pinned masks");
  }

  BatchTrace trace;
  trace.mode = mode;
  trace.X = X;
  trace.feats.resize(static_cast<std::size_t>(p));
  const double keep = 1.0 - hp.p_dropout;

  for (int i = 0; i < p; ++i) {
    auto& layers = trace.feats[static_cast<std::size_t>(i)];
    layers.resize(static_cast<std::size_t>(L));
    Eigen::MatrixXd x_prev = X.col(i).transpose();  // 1 x B
    for (int l = 0; l < L; ++l) {
      const auto& net = params.nets[static_cast<std::size_t>(i)];
      LayerTrace& lt = layers[static_cast<std::size_t>(l)];
      Eigen::MatrixXd lin =
          (net.W[static_cast<std::size_t>(l)] * x_prev).colwise() + net.b[static_cast<std::size_t>(l)];

      Eigen::MatrixXd u;
      if (hp.batch_norm) {
        const auto& stats = params.bn[static_cast<std::size_t>(i)];
        if (train) {
          lt.mu = lin.rowwise().mean();
          Eigen::MatrixXd centered = lin.colwise() - lt.mu;
          lt.var = centered.array().square().rowwise().mean();
          Eigen::ArrayXd inv_sd = (lt.var.array() + kBnEpsilon).sqrt().inverse();
          lt.xhat = (centered.array().colwise() * inv_sd).matrix();
          u = lt.xhat;
        } else {
          Eigen::ArrayXd inv_sd =
              (stats.var[static_cast<std::size_t>(l)].array() + kBnEpsilon).sqrt().inverse();
          u = ((lin.colwise() - stats.mean[static_cast<std::size_t>(l)]).array().colwise() * inv_sd)
                  .matrix();
        }
      } else {
        u = std::move(lin);
      }
      check_finite(u, i, l);
      lt.y = u.array().tanh();

      const bool hidden = l + 1 < L;
      if (train && hidden && hp.p_dropout > 0.0) {
        if (masks) {
          lt.mask = masks->dropout[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)];
        } else {
          lt.mask.resize(lt.y.rows(), lt.y.cols());
          for (int c = 0; c < lt.mask.cols(); ++c)
            for (int r = 0; r < lt.mask.rows(); ++r)
              lt.mask(r, c) = rng->bernoulli(hp.p_dropout) ? 0.0 : 1.0 / keep;
        }
        lt.x = lt.y.cwiseProduct(lt.mask);
      } else {
        lt.x = lt.y;
      }
      x_prev = lt.x;
    }
  }

  if (train && hp.p_feature > 0.0) {
    if (masks) {
      trace.feature_mask = masks->feature;
    } else {
      trace.feature_mask.resize(p, B);
      const double fkeep = 1.0 - hp.p_feature;
      for (int c = 0; c < B; ++c)
        for (int r = 0; r < p; ++r)
          trace.feature_mask(r, c) = rng->bernoulli(hp.p_feature) ? 0.0 : 1.0 / fkeep;
    }
  }

  trace.g_raw.assign(static_cast<std::size_t>(K), Eigen::MatrixXd::Zero(p, B));
  trace.eta = Eigen::MatrixXd::Zero(B, K);
  for (int i = 0; i < p; ++i) {
    const Eigen::MatrixXd& h = trace.feats[static_cast<std::size_t>(i)].back().x;  // d x B
    for (int k = 1; k <= K; ++k) {
      const Eigen::VectorXd& w = params.proj(i, k);
      const double scale = 1.0 / (w.norm() + hp.proj_epsilon);
      Eigen::RowVectorXd g = (w.transpose() * h) * scale;  // 1 x B
      trace.g_raw[static_cast<std::size_t>(k - 1)].row(i) = g;
      if (trace.feature_mask.size() > 0)
        trace.eta.col(k - 1) += (g.array() * trace.feature_mask.row(i).array()).matrix().transpose();
      else
        trace.eta.col(k - 1) += g.transpose();
    }
  }
  return trace;
}

Eigen::VectorXd featurenet_eval(const ModelParams& params, int feature, double x) {
  if (!std::isfinite(x)) throw Error("forward: non-finite input value");
  const ModelHyper& hp = params.hyper;
  const int L = static_cast<int>(hp.widths.size());
  const auto& net = params.nets[static_cast<std::size_t>(feature)];
  Eigen::VectorXd v(1);
  v(0) = x;
  for (int l = 0; l < L; ++l) {
    Eigen::VectorXd lin = net.W[static_cast<std::size_t>(l)] * v + net.b[static_cast<std::size_t>(l)];
    if (hp.batch_norm) {
      const auto& stats = params.bn[static_cast<std::size_t>(feature)];
      lin = ((lin - stats.mean[static_cast<std::size_t>(l)]).array() /
             (stats.var[static_cast<std::size_t>(l)].array() + kBnEpsilon).sqrt())
                .matrix()
                .eval();
    }
    if (!lin.allFinite())
      throw Error("forward: non-finite activation in feature " + std::to_string(feature) +
                  ", layer " + std::to_string(l + 1));
    v = lin.array().tanh();
  }
  return v;
}

double project(const ModelParams& params, int feature, int risk, const Eigen::VectorXd& h) {
  const Eigen::VectorXd& w = params.proj(feature, risk);
  return w.dot(h) / (w.norm() + params.hyper.proj_epsilon);
}

double shape_value(const ModelParams& params, int feature, int risk, double x) {
  return project(params, feature, risk, featurenet_eval(params, feature, x));
}

Eigen::MatrixXd eval_eta(const ModelParams& params, const Eigen::MatrixXd& X) {
  const ModelHyper& hp = params.hyper;
  const int B = static_cast<int>(X.rows());
  const int L = static_cast<int>(hp.widths.size());
  Eigen::MatrixXd eta = Eigen::MatrixXd::Zero(B, hp.num_risks);
  for (int i = 0; i < hp.num_features; ++i) {
    const auto& net = params.nets[static_cast<std::size_t>(i)];
    Eigen::MatrixXd x_prev = X.col(i).transpose();
    for (int l = 0; l < L; ++l) {
      Eigen::MatrixXd lin =
          (net.W[static_cast<std::size_t>(l)] * x_prev).colwise() + net.b[static_cast<std::size_t>(l)];
      if (hp.batch_norm) {
        const auto& stats = params.bn[static_cast<std::size_t>(i)];
        Eigen::ArrayXd inv_sd =
            (stats.var[static_cast<std::size_t>(l)].array() + kBnEpsilon).sqrt().inverse();
        lin = ((lin.colwise() - stats.mean[static_cast<std::size_t>(l)]).array().colwise() * inv_sd)
                  .matrix()
                  .eval();
      }
      check_finite(lin, i, l);
      x_prev = lin.array().tanh();
    }
    for (int k = 1; k <= hp.num_risks; ++k) {
      const Eigen::VectorXd& w = params.proj(i, k);
      const double scale = 1.0 / (w.norm() + hp.proj_epsilon);
      eta.col(k - 1) += (w.transpose() * x_prev).transpose() * scale;
    }
  }
  return eta;
}

void backward_batch(const ModelParams& params, const BatchTrace& trace,
                    const Eigen::MatrixXd& dEta, ModelGrad& acc) {
  const ModelHyper& hp = params.hyper;
  const int B = trace.batch_size();
  const int p = hp.num_features;
  const int K = hp.num_risks;
  const int L = static_cast<int>(hp.widths.size());
  if (dEta.rows() != B || dEta.cols() != K) throw Error("backward: dEta shape mismatch");
  if (acc.nets.size() != static_cast<std::size_t>(p)) throw Error("backward: grad shape mismatch");

  for (int i = 0; i < p; ++i) {
    const auto& layers = trace.feats[static_cast<std::size_t>(i)];
    const Eigen::MatrixXd& h = layers.back().x;  // d x B
    Eigen::MatrixXd dH = Eigen::MatrixXd::Zero(h.rows(), B);

    for (int k = 1; k <= K; ++k) {
      Eigen::VectorXd dg = dEta.col(k - 1);  // B
      if (trace.feature_mask.size() > 0)
        dg = dg.cwiseProduct(trace.feature_mask.row(i).transpose());

      const Eigen::VectorXd& w = params.proj(i, k);
      const double nw = w.norm();
      const double s = 1.0 / (nw + hp.proj_epsilon);
      const Eigen::VectorXd what = nw > 0.0 ? (w / nw).eval() : Eigen::VectorXd::Zero(w.size()).eval();
      const Eigen::RowVectorXd g_row = trace.g_raw[static_cast<std::size_t>(k - 1)].row(i);

      // d g / d w = s * (h_c - g_c * what); summed over the batch
      const double g_dot_dg = (g_row * dg)(0, 0);
      acc.projections[static_cast<std::size_t>(i * K + k - 1)] += s * (h * dg - what * g_dot_dg);
      dH += (w * s) * dg.transpose();
    }

    // back through the layers
    Eigen::MatrixXd dX = dH;
    for (int l = L - 1; l >= 0; --l) {
      const LayerTrace& lt = layers[static_cast<std::size_t>(l)];
      Eigen::MatrixXd dY = lt.mask.size() > 0 ? dX.cwiseProduct(lt.mask).eval() : dX;
      Eigen::MatrixXd dU = dY.cwiseProduct((1.0 - lt.y.array().square()).matrix());

      Eigen::MatrixXd dLin;
      if (hp.batch_norm) {
        if (trace.mode == Mode::Train) {
          // normalize-only BN with biased batch variance
          Eigen::ArrayXd inv_sd = (lt.var.array() + kBnEpsilon).sqrt().inverse();
          Eigen::VectorXd mean_du = dU.rowwise().mean();
          Eigen::VectorXd mean_du_xhat = dU.cwiseProduct(lt.xhat).rowwise().mean();
          Eigen::MatrixXd inner =
              (dU.colwise() - mean_du) -
              (lt.xhat.array().colwise() * mean_du_xhat.array()).matrix();
          dLin = (inner.array().colwise() * inv_sd).matrix();
        } else {
          const auto& stats = params.bn[static_cast<std::size_t>(i)];
          Eigen::ArrayXd inv_sd =
              (stats.var[static_cast<std::size_t>(l)].array() + kBnEpsilon).sqrt().inverse();
          dLin = (dU.array().colwise() * inv_sd).matrix();
        }
      } else {
        dLin = std::move(dU);
      }

      auto& gnet = acc.nets[static_cast<std::size_t>(i)];
      if (l > 0) {
        const Eigen::MatrixXd& x_prev = layers[static_cast<std::size_t>(l - 1)].x;
        gnet.W[static_cast<std::size_t>(l)] += dLin * x_prev.transpose();
      } else {
        gnet.W[0] += dLin * trace.X.col(i);  // x_prev is the 1 x B input row
      }
      gnet.b[static_cast<std::size_t>(l)] += dLin.rowwise().sum();
      if (l > 0) dX = params.nets[static_cast<std::size_t>(i)].W[static_cast<std::size_t>(l)].transpose() * dLin;
    }
  }
}

void update_bn_running(ModelParams& params, const BatchTrace& trace, double momentum) {
  if (!params.hyper.batch_norm || trace.mode != Mode::Train) return;
  const int B = trace.batch_size();
  const double unbias = B > 1 ? double(B) / double(B - 1) : 1.0;
  for (std::size_t i = 0; i < params.bn.size(); ++i) {
    auto& stats = params.bn[i];
    const auto& layers = trace.feats[i];
    for (std::size_t l = 0; l < layers.size(); ++l) {
      stats.mean[l] = momentum * stats.mean[l] + (1.0 - momentum) * layers[l].mu;
      stats.var[l] = momentum * stats.var[l] + (1.0 - momentum) * (unbias * layers[l].var);
    }
  }
}

std::size_t param_count(const ModelParams& params) {
  std::size_t n = 0;
  for (const auto& net : params.nets) {
    for (const auto& W : net.W) n += static_cast<std::size_t>(W.size());
    for (const auto& b : net.b) n += static_cast<std::size_t>(b.size());
  }
  for (const auto& w : params.projections) n += static_cast<std::size_t>(w.size());
  return n;
}

namespace {

template <typename NetVec, typename ProjVec, typename F>
void visit_flat(NetVec& nets, ProjVec& projections, F&& f) {
  for (auto& net : nets) {
    for (std::size_t l = 0; l < net.W.size(); ++l) {
      auto& W = net.W[l];
      for (Eigen::Index r = 0; r < W.rows(); ++r)
        for (Eigen::Index c = 0; c < W.cols(); ++c) f(W(r, c));
      auto& b = net.b[l];
      for (Eigen::Index r = 0; r < b.size(); ++r) f(b(r));
    }
  }
  for (auto& w : projections)
    for (Eigen::Index r = 0; r < w.size(); ++r) f(w(r));
}

}  // namespace

void flatten_params(const ModelParams& params, std::vector<double>& out) {
  out.clear();
  out.reserve(param_count(params));
  visit_flat(params.nets, params.projections, [&](double v) { out.push_back(v); });
}

void unflatten_params(ModelParams& params, const std::vector<double>& in) {
  std::size_t pos = 0;
  visit_flat(params.nets, params.projections, [&](double& v) { v = in[pos++]; });
  if (pos != in.size()) throw Error("unflatten: size mismatch");
}

void flatten_grad(const ModelGrad& grad, std::vector<double>& out) {
  out.clear();
  visit_flat(grad.nets, grad.projections, [&](double v) { out.push_back(v); });
}

double params_sq_norm(const ModelParams& params) {
  double s = 0.0;
  visit_flat(params.nets, params.projections, [&](double v) { s += v * v; });
  return s;
}

}  // namespace fgnam
