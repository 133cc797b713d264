#include "fgnam/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "fgnam/csv.hpp"
#include "fgnam/error.hpp"

namespace fgnam {

Strategy strategy_from_name(const std::string& name) {
  if (name == "standardize") return Strategy::Standardize;
  if (name == "mean_impute") return Strategy::MeanImpute;
  if (name == "onehot" || name == "one_hot") return Strategy::OneHot;
  if (name == "mode_impute") return Strategy::ModeImpute;
  if (name == "mim" || name == "missing_indicator") return Strategy::MissingIndicator;
  throw UsageError("preprocess: unknown strategy '" + name + "'");
}

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Standardize: return "standardize";
    case Strategy::MeanImpute: return "mean_impute";
    case Strategy::OneHot: return "onehot";
    case Strategy::ModeImpute: return "mode_impute";
    case Strategy::MissingIndicator: return "mim";
  }
  return "?";
}

int ColumnRule::output_width() const {
  switch (strategy) {
    case Strategy::Standardize:
    case Strategy::MeanImpute:
      return 1;
    case Strategy::MissingIndicator:
      return 2;
    case Strategy::OneHot:
    case Strategy::ModeImpute:
      return static_cast<int>(categories.size());
  }
  return 0;
}

std::vector<std::string> ColumnRule::output_names() const {
  switch (strategy) {
    case Strategy::Standardize:
    case Strategy::MeanImpute:
      return {input_col};
    case Strategy::MissingIndicator:
      return {input_col, input_col + "_missing"};
    case Strategy::OneHot:
    case Strategy::ModeImpute: {
      std::vector<std::string> out;
      out.reserve(categories.size());
      for (const auto& c : categories) out.push_back(input_col + "=" + c);
      return out;
    }
  }
  return {};
}

std::vector<bool> ColumnRule::output_binary() const {
  switch (strategy) {
    case Strategy::Standardize:
    case Strategy::MeanImpute:
      return {false};
    case Strategy::MissingIndicator:
      return {false, true};
    case Strategy::OneHot:
    case Strategy::ModeImpute:
      return std::vector<bool>(categories.size(), true);
  }
  return {};
}

int PreprocessPlan::output_width() const {
  int w = 0;
  for (const auto& r : rules) w += r.output_width();
  return w;
}

std::vector<std::string> PreprocessPlan::feature_names() const {
  std::vector<std::string> out;
  for (const auto& r : rules)
    for (auto& n : r.output_names()) out.push_back(n);
  return out;
}

std::vector<bool> PreprocessPlan::feature_binary() const {
  std::vector<bool> out;
  for (const auto& r : rules)
    for (bool b : r.output_binary()) out.push_back(b);
  return out;
}

namespace {

// maps flat output column -> (rule index, offset within rule)
std::pair<int, int> locate_output(const PreprocessPlan& plan, int output_col) {
  int base = 0;
  for (std::size_t r = 0; r < plan.rules.size(); ++r) {
    int w = plan.rules[r].output_width();
    if (output_col < base + w) return {static_cast<int>(r), output_col - base};
    base += w;
  }
  throw Error("preprocess: output column index out of range");
}

}  // namespace

double PreprocessPlan::inverse_value(int output_col, double scaled) const {
  auto [ri, off] = locate_output(*this, output_col);
  const ColumnRule& rule = rules[static_cast<std::size_t>(ri)];
  const bool value_col =
      off == 0 && (rule.strategy == Strategy::Standardize || rule.strategy == Strategy::MeanImpute ||
                   rule.strategy == Strategy::MissingIndicator);
  if (!value_col) return scaled;
  if (rule.strategy == Strategy::MissingIndicator && scaled == kMimSentinel) return kMimSentinel;
  return scaled * rule.stddev + rule.mean;
}

bool PreprocessPlan::output_is_binary(int output_col) const {
  auto [ri, off] = locate_output(*this, output_col);
  return rules[static_cast<std::size_t>(ri)].output_binary()[static_cast<std::size_t>(off)];
}

namespace {

struct ColumnScan {
  bool any_missing = false;
  bool all_numeric = true;  // over non-missing cells
  int n_observed = 0;
};

ColumnScan scan_column(const RawTable& t, int col) {
  ColumnScan s;
  for (const auto& row : t.rows) {
    const Cell& c = row[static_cast<std::size_t>(col)];
    if (c.missing) {
      s.any_missing = true;
      continue;
    }
    ++s.n_observed;
    if (!c.is_number) s.all_numeric = false;
  }
  return s;
}

// mean and sample stddev (n-1); stddev falls back to 1 for degenerate columns
std::pair<double, double> mean_stddev(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, sd};
}

std::vector<std::string> sorted_categories(const RawTable& t, int col) {
  std::set<std::string> cats;
  for (const auto& row : t.rows) {
    const Cell& c = row[static_cast<std::size_t>(col)];
    if (!c.missing) cats.insert(c.text);
  }
  return {cats.begin(), cats.end()};
}

std::string mode_category(const RawTable& t, int col) {
  std::map<std::string, int> counts;
  for (const auto& row : t.rows) {
    const Cell& c = row[static_cast<std::size_t>(col)];
    if (!c.missing) ++counts[c.text];
  }
  std::string best;
  int best_count = -1;
  for (const auto& [cat, cnt] : counts) {
    if (cnt > best_count) {  // ties resolve to the lexicographically smallest
      best = cat;
      best_count = cnt;
    }
  }
  return best;
}

}  // namespace

PreprocessPlan fit_preprocess(const RawTable& train,
                              const std::map<std::string, std::string>& strategies) {
  if (train.n_rows() == 0) throw Error("preprocess: cannot fit on an empty table");
  PreprocessPlan plan;
  plan.num_risks = train.num_risks;

  for (const auto& [col, _] : strategies)
    if (train.col_index(col) < 0)
      throw UsageError("preprocess: strategy configured for unknown column '" + col + "'");

  for (int c = 0; c < train.n_cols(); ++c) {
    if (c == train.time_col || c == train.event_col) continue;
    const std::string& name = train.columns[static_cast<std::size_t>(c)];
    ColumnScan scan = scan_column(train, c);

    Strategy strat;
    auto it = strategies.find(name);
    if (it != strategies.end()) {
      strat = strategy_from_name(it->second);
    } else if (scan.n_observed > 0 && scan.all_numeric) {
      strat = scan.any_missing ? Strategy::MeanImpute : Strategy::Standardize;
    } else {
      strat = scan.any_missing ? Strategy::ModeImpute : Strategy::OneHot;
    }

    ColumnRule rule;
    rule.input_col = name;
    rule.strategy = strat;

    switch (strat) {
      case Strategy::Standardize:
      case Strategy::MeanImpute:
      case Strategy::MissingIndicator: {
        std::vector<double> observed;
        for (const auto& row : train.rows) {
          const Cell& cell = row[static_cast<std::size_t>(c)];
          if (cell.missing) {
            if (strat == Strategy::Standardize)
              throw Error("preprocess: column '" + name +
                          "' has missing values but no imputation or MIM rule");
            continue;
          }
          if (!cell.is_number)
            throw Error("preprocess: column '" + name + "' has non-numeric value '" + cell.text +
                        "' under a continuous strategy");
          observed.push_back(cell.number);
        }
        if (observed.empty())
          throw Error("preprocess: column '" + name + "' has no observed values");
        if (strat == Strategy::MeanImpute) {
          auto [m0, _sd0] = mean_stddev(observed);
          rule.fill_value = m0;
          // stats of the filled training column, so the fit split comes out
          // exactly standardized
          std::vector<double> filled = observed;
          filled.resize(static_cast<std::size_t>(train.n_rows()), m0);
          auto [m, sd] = mean_stddev(filled);
          rule.mean = m;
          rule.stddev = sd;
        } else {
          auto [m, sd] = mean_stddev(observed);
          rule.mean = m;
          rule.stddev = sd;
        }
        if (rule.stddev <= 0.0) {
          rule.stddev = 1.0;
          plan.warnings.push_back("column '" + name + "': zero variance, stddev set to 1");
        }
        break;
      }
      case Strategy::OneHot:
      case Strategy::ModeImpute: {
        for (const auto& row : train.rows) {
          const Cell& cell = row[static_cast<std::size_t>(c)];
          if (cell.missing && strat == Strategy::OneHot)
            throw Error("preprocess: column '" + name +
                        "' has missing values but no imputation or MIM rule");
        }
        rule.categories = sorted_categories(train, c);
        if (rule.categories.empty())
          throw Error("preprocess: column '" + name + "' has no observed categories");
        if (strat == Strategy::ModeImpute) rule.mode_value = mode_category(train, c);
        break;
      }
    }
    plan.rules.push_back(std::move(rule));
  }
  return plan;
}

ApplyResult apply_preprocess(const PreprocessPlan& plan, const RawTable& table) {
  for (const auto& rule : plan.rules)
    if (table.col_index(rule.input_col) < 0)
      throw UsageError("preprocess: table is missing column '" + rule.input_col + "'");

  ApplyResult out;
  const int n = table.n_rows();
  const int p = plan.output_width();
  out.data.X.resize(n, p);
  out.data.T.resize(static_cast<std::size_t>(n));
  out.data.E.resize(static_cast<std::size_t>(n));
  out.data.num_risks = plan.num_risks;
  out.data.feature_names = plan.feature_names();
  out.data.feature_binary = plan.feature_binary();

  std::set<std::string> unseen_reported;

  const bool labeled = table.time_col >= 0 && table.event_col >= 0;
  for (int r = 0; r < n; ++r) {
    out.data.T[static_cast<std::size_t>(r)] = labeled ? table.time_of(r) : 0.0;
    out.data.E[static_cast<std::size_t>(r)] = labeled ? table.event_of(r) : 0;
    int j = 0;
    for (const auto& rule : plan.rules) {
      const int c = table.col_index(rule.input_col);
      const Cell& cell = table.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      switch (rule.strategy) {
        case Strategy::Standardize:
        case Strategy::MeanImpute: {
          double raw;
          if (cell.missing) {
            if (rule.strategy == Strategy::Standardize)
              throw Error("preprocess: row " + std::to_string(r) + ", column '" + rule.input_col +
                          "': missing value with no imputation or MIM rule");
            raw = rule.fill_value;
          } else if (cell.is_number) {
            raw = cell.number;
          } else {
            throw Error("preprocess: row " + std::to_string(r) + ", column '" + rule.input_col +
                        "': non-numeric value '" + cell.text + "'");
          }
          out.data.X(r, j++) = (raw - rule.mean) / rule.stddev;
          break;
        }
        case Strategy::MissingIndicator: {
          if (cell.missing) {
            out.data.X(r, j++) = kMimSentinel;
            out.data.X(r, j++) = 1.0;
          } else {
            if (!cell.is_number)
              throw Error("preprocess: row " + std::to_string(r) + ", column '" + rule.input_col +
                          "': non-numeric value '" + cell.text + "'");
            out.data.X(r, j++) = (cell.number - rule.mean) / rule.stddev;
            out.data.X(r, j++) = 0.0;
          }
          break;
        }
        case Strategy::OneHot:
        case Strategy::ModeImpute: {
          std::string value;
          if (cell.missing) {
            if (rule.strategy == Strategy::OneHot)
              throw Error("preprocess: row " + std::to_string(r) + ", column '" + rule.input_col +
                          "': missing value with no imputation or MIM rule");
            value = rule.mode_value;
          } else {
            value = cell.text;
          }
          bool seen = false;
          for (const auto& cat : rule.categories) {
            bool hit = (cat == value);
            out.data.X(r, j++) = hit ? 1.0 : 0.0;
            seen = seen || hit;
          }
          if (!seen && unseen_reported.insert(rule.input_col + "=" + value).second)
            out.warnings.push_back("column '" + rule.input_col + "': unseen category '" + value +
                                   "' mapped to all-zeros");
          break;
        }
      }
    }
  }
  return out;
}

nlohmann::json PreprocessPlan::to_json() const {
  nlohmann::json j;
  j["num_risks"] = num_risks;
  j["fitted_on"] = fitted_on;
  j["rules"] = nlohmann::json::array();
  for (const auto& r : rules) {
    nlohmann::json rj;
    rj["input_col"] = r.input_col;
    rj["strategy"] = strategy_name(r.strategy);
    rj["mean"] = r.mean;
    rj["stddev"] = r.stddev;
    rj["fill_value"] = r.fill_value;
    rj["categories"] = r.categories;
    rj["mode_value"] = r.mode_value;
    j["rules"].push_back(rj);
  }
  return j;
}

PreprocessPlan PreprocessPlan::from_json(const nlohmann::json& j) {
  PreprocessPlan plan;
  plan.num_risks = j.at("num_risks").get<int>();
  plan.fitted_on = j.at("fitted_on").get<std::string>();
  for (const auto& rj : j.at("rules")) {
    ColumnRule r;
    r.input_col = rj.at("input_col").get<std::string>();
    r.strategy = strategy_from_name(rj.at("strategy").get<std::string>());
    r.mean = rj.at("mean").get<double>();
    r.stddev = rj.at("stddev").get<double>();
    r.fill_value = rj.at("fill_value").get<double>();
    r.categories = rj.at("categories").get<std::vector<std::string>>();
    r.mode_value = rj.at("mode_value").get<std::string>();
    plan.rules.push_back(std::move(r));
  }
  return plan;
}

}  // namespace fgnam
