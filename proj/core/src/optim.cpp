#include "fgnam/optim.hpp"

#include <cmath>

#include "fgnam/error.hpp"

namespace fgnam {

AdamW::AdamW(std::size_t n, double lr, double weight_decay, double beta1, double beta2, double eps)
    : lr_(lr), wd_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(n, 0.0), v_(n, 0.0) {
  if (!(lr > 0.0)) throw Error("adamw: learning rate must be positive");
  if (wd_ < 0.0) throw Error("adamw: weight decay must be non-negative");
}

void AdamW::step(std::vector<double>& theta, const std::vector<double>& grad) {
  if (theta.size() != m_.size() || grad.size() != m_.size())
    throw Error("adamw: parameter size mismatch");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, double(t_));
  const double bc2 = 1.0 - std::pow(beta2_, double(t_));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    theta[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    theta[i] -= lr_ * wd_ * theta[i];
  }
}

}  // namespace fgnam
