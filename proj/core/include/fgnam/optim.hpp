#pragma once
#include <vector>

namespace fgnam {

/// Adaptive moment estimation with decoupled weight decay: the decay shrinks
/// parameters multiplicatively and never enters the moment estimates.
class AdamW {
 public:
  AdamW(std::size_t n, double lr, double weight_decay, double beta1 = 0.9, double beta2 = 0.999,
        double eps = 1e-8);

  void step(std::vector<double>& theta, const std::vector<double>& grad);

  long long steps_taken() const { return t_; }

 private:
  double lr_, wd_, beta1_, beta2_, eps_;
  long long t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace fgnam
