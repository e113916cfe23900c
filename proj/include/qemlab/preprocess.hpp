#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace qem {

// Per-feature empirical quantile map followed by min-max rescaling, fitted
// once on the training split. Transformed training features land in [0, 1];
// unseen values clamp to the fitted range. A constant feature maps to 0.
class Preprocessor {
 public:
  // capped number of order-statistic anchors per feature
  static constexpr int kMaxAnchors = 1000;

  void fit(const Eigen::MatrixXd& x);  // rows = samples
  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
  double transform_one(int feature, double value) const;

  bool fitted() const { return !anchors_.empty(); }
  int n_features() const { return static_cast<int>(anchors_.size()); }
  int anchor_count(int feature) const {
    return static_cast<int>(anchors_[static_cast<std::size_t>(feature)].size());
  }

  std::string to_json() const;
  static Preprocessor from_json(const std::string& text);

 private:
  std::vector<std::vector<double>> anchors_;  // sorted per feature
  std::vector<double> out_lo_, out_hi_;       // min-max of quantile outputs on train
};

}  // namespace qem
