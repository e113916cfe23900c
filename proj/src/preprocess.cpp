#include "qemlab/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "qemlab/error.hpp"

namespace qem {

using nlohmann::json;

namespace {

// rank of `value` in the anchor ladder, in [0, 1]; ties take the middle rank
double quantile_rank(const std::vector<double>& a, double value) {
  const auto m = a.size();
  if (m == 1 || a.front() == a.back()) return 0.0;
  if (value <= a.front()) return 0.0;
  if (value >= a.back()) return 1.0;
  const auto lo_it = std::lower_bound(a.begin(), a.end(), value);
  const auto hi_it = std::upper_bound(a.begin(), a.end(), value);
  const auto lo = static_cast<std::size_t>(lo_it - a.begin());
  if (lo_it != hi_it) {
    // value sits exactly on one or more anchors
    const auto hi = static_cast<std::size_t>(hi_it - a.begin()) - 1;
    return 0.5 * (static_cast<double>(lo) + static_cast<double>(hi)) /
           static_cast<double>(m - 1);
  }
  const double prev = a[lo - 1], next = a[lo];
  const double frac = (value - prev) / (next - prev);
  return (static_cast<double>(lo - 1) + frac) / static_cast<double>(m - 1);
}

}  // namespace

void Preprocessor::fit(const Eigen::MatrixXd& x) {
  if (x.rows() < 1) throw ValidationError("preprocessor: no training samples");
  const auto n = static_cast<std::size_t>(x.rows());
  anchors_.assign(static_cast<std::size_t>(x.cols()), {});
  out_lo_.assign(static_cast<std::size_t>(x.cols()), 0.0);
  out_hi_.assign(static_cast<std::size_t>(x.cols()), 0.0);

  std::vector<double> col(n);
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    for (std::size_t r = 0; r < n; ++r) col[r] = x(static_cast<Eigen::Index>(r), f);
    std::sort(col.begin(), col.end());

    auto& a = anchors_[static_cast<std::size_t>(f)];
    if (n <= kMaxAnchors) {
      a = col;
    } else {
      // evenly spaced order statistics, linearly interpolated
      a.resize(kMaxAnchors);
      for (int k = 0; k < kMaxAnchors; ++k) {
        const double pos = static_cast<double>(k) * static_cast<double>(n - 1) /
                           static_cast<double>(kMaxAnchors - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        a[static_cast<std::size_t>(k)] =
            lo + 1 < n ? col[lo] + frac * (col[lo + 1] - col[lo]) : col[lo];
      }
    }

    double lo = 1.0, hi = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = quantile_rank(a, x(static_cast<Eigen::Index>(r), f));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    out_lo_[static_cast<std::size_t>(f)] = lo;
    out_hi_[static_cast<std::size_t>(f)] = hi;
  }
}

double Preprocessor::transform_one(int feature, double value) const {
  const auto f = static_cast<std::size_t>(feature);
  const double r = quantile_rank(anchors_[f], value);
  const double span = out_hi_[f] - out_lo_[f];
  if (span <= 0.0) return 0.0;
  return std::clamp((r - out_lo_[f]) / span, 0.0, 1.0);
}

Eigen::MatrixXd Preprocessor::transform(const Eigen::MatrixXd& x) const {
  if (!fitted()) throw ValidationError("preprocessor: transform before fit");
  if (x.cols() != n_features())
    throw ValidationError("preprocessor: expected " + std::to_string(n_features()) +
                          " features, got " + std::to_string(x.cols()));
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index f = 0; f < x.cols(); ++f)
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      out(r, f) = transform_one(static_cast<int>(f), x(r, f));
  return out;
}

std::string Preprocessor::to_json() const {
  json j;
  j["anchors"] = anchors_;
  j["out_lo"] = out_lo_;
  j["out_hi"] = out_hi_;
  return j.dump();
}

Preprocessor Preprocessor::from_json(const std::string& text) {
  Preprocessor p;
  try {
    const json j = json::parse(text);
    p.anchors_ = j.at("anchors").get<std::vector<std::vector<double>>>();
    p.out_lo_ = j.at("out_lo").get<std::vector<double>>();
    p.out_hi_ = j.at("out_hi").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("preprocessor: ") + e.what());
  }
  if (p.anchors_.size() != p.out_lo_.size() || p.anchors_.size() != p.out_hi_.size())
    throw ValidationError("preprocessor: inconsistent field sizes");
  return p;
}

}  // namespace qem
