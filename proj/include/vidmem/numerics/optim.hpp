#pragma once

#include <map>
#include <string>
#include <vector>

#include "vidmem/numerics/params.hpp"

namespace vidmem {

// Adam with L2 weight decay folded into the gradient (the classic coupled
// form, not AdamW).
class Adam {
 public:
  struct Options {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
  };

  explicit Adam(Options options) : options_(options) {}

  void set_lr(double lr) { options_.lr = lr; }
  double lr() const { return options_.lr; }

  // Applies one update using the gradients currently held by `params`.
  void step(ParamSet& params);

 private:
  Options options_;
  long long steps_ = 0;
  std::map<std::string, std::vector<double>> first_;
  std::map<std::string, std::vector<double>> second_;
};

// lr(epoch) = base * decay^(floor(epoch / step_epochs))
double step_lr(double base, int epoch, int step_epochs, double decay);

}  // namespace vidmem
