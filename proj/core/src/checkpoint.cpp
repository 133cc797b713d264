#include "fgnam/checkpoint.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fgnam/error.hpp"

namespace fgnam {

namespace {

constexpr int kFormatVersion = 1;

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto nr = static_cast<Eigen::Index>(j.size());
  if (nr == 0) return Eigen::MatrixXd(0, 0);
  const auto nc = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(nr, nc);
  for (Eigen::Index r = 0; r < nr; ++r)
    for (Eigen::Index c = 0; c < nc; ++c)
      m(r, c) = j.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
  return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

}  // namespace

void Checkpoint::save(const std::string& path) const {
  nlohmann::json j;
  j["format"] = "fgnam-checkpoint";
  j["version"] = kFormatVersion;

  const ModelHyper& hp = params.hyper;
  j["hyper"] = {{"num_features", hp.num_features}, {"num_risks", hp.num_risks},
                {"widths", hp.widths},             {"p_dropout", hp.p_dropout},
                {"p_feature", hp.p_feature},       {"batch_norm", hp.batch_norm},
                {"proj_epsilon", hp.proj_epsilon}};

  j["nets"] = nlohmann::json::array();
  for (const auto& net : params.nets) {
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < net.W.size(); ++l)
      layers.push_back({{"W", matrix_to_json(net.W[l])}, {"b", vector_to_json(net.b[l])}});
    j["nets"].push_back(std::move(layers));
  }

  j["projections"] = nlohmann::json::array();
  for (const auto& w : params.projections) j["projections"].push_back(vector_to_json(w));

  if (hp.batch_norm) {
    nlohmann::json bn = nlohmann::json::array();
    for (const auto& stats : params.bn) {
      nlohmann::json means = nlohmann::json::array(), vars = nlohmann::json::array();
      for (const auto& m : stats.mean) means.push_back(vector_to_json(m));
      for (const auto& v : stats.var) vars.push_back(vector_to_json(v));
      bn.push_back({{"mean", means}, {"var", vars}});
    }
    j["batch_norm_stats"] = std::move(bn);
  }

  j["feature_names"] = feature_names;
  if (plan) j["preprocess"] = plan->to_json();
  if (baseline) j["baseline"] = baseline->to_json();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("checkpoint: cannot write " + path);
  out << j.dump(1) << '\n';
  if (!out) throw Error("checkpoint: write failed for " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("checkpoint: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("checkpoint: parse failure in " + path + ": " + e.what());
  }
  if (j.value("format", "") != "fgnam-checkpoint")
    throw Error("checkpoint: " + path + " is not a model checkpoint");
  if (j.value("version", -1) != kFormatVersion)
    throw Error("checkpoint: unsupported version in " + path);

  Checkpoint ck;
  const auto& hj = j.at("hyper");
  ModelHyper& hp = ck.params.hyper;
  hp.num_features = hj.at("num_features").get<int>();
  hp.num_risks = hj.at("num_risks").get<int>();
  hp.widths = hj.at("widths").get<std::vector<int>>();
  hp.p_dropout = hj.at("p_dropout").get<double>();
  hp.p_feature = hj.at("p_feature").get<double>();
  hp.batch_norm = hj.at("batch_norm").get<bool>();
  hp.proj_epsilon = hj.at("proj_epsilon").get<double>();

  for (const auto& layers : j.at("nets")) {
    FeatureNetParams net;
    for (const auto& lj : layers) {
      net.W.push_back(matrix_from_json(lj.at("W")));
      net.b.push_back(vector_from_json(lj.at("b")));
    }
    ck.params.nets.push_back(std::move(net));
  }
  for (const auto& wj : j.at("projections"))
    ck.params.projections.push_back(vector_from_json(wj));

  if (hp.batch_norm) {
    for (const auto& bj : j.at("batch_norm_stats")) {
      BatchNormStats stats;
      for (const auto& m : bj.at("mean")) stats.mean.push_back(vector_from_json(m));
      for (const auto& v : bj.at("var")) stats.var.push_back(vector_from_json(v));
      ck.params.bn.push_back(std::move(stats));
    }
  }

  ck.feature_names = j.value("feature_names", std::vector<std::string>{});
  if (j.contains("preprocess")) ck.plan = PreprocessPlan::from_json(j.at("preprocess"));
  if (j.contains("baseline")) ck.baseline = BaselineCif::from_json(j.at("baseline"));
  return ck;
}

}  // namespace fgnam
