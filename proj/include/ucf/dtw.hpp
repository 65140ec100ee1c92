#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ucf/parallel.hpp"
#include "ucf/series.hpp"

namespace ucf {

  /// Shared options for the DTW family. Local cost is always the squared
  /// Euclidean difference; the optional window is a Sakoe-Chiba band radius
  /// expressed as a fraction of max(n, m).
  struct DtwConfig {
    enum class Aggregation { sum, mean }; // independent DTW only

    std::optional<double> window;
    Aggregation aggregation = Aggregation::sum;

    void validate() const {
      if (window && (*window <= 0.0 || *window > 1.0))
        throw std::invalid_argument("dtw window fraction must be in (0, 1]");
    }
  };

  namespace dtw_detail {

    constexpr double kInfinity = std::numeric_limits<double>::infinity();

    inline std::size_t band_radius(std::optional<double> window, std::size_t n, std::size_t m) {
      const std::size_t longest = std::max(n, m);
      if (!window) return longest;
      const auto r = static_cast<std::size_t>(std::ceil(*window * static_cast<double>(longest)));
      const std::size_t gap = n > m ? n - m : m - n;
      if (r < gap)
        throw std::invalid_argument("dtw window too narrow to connect corners of a " +
                                    std::to_string(n) + "x" + std::to_string(m) + " grid");
      return r;
    }

    /// Boundary-anchored dynamic program over the {diagonal, up, right} step
    /// pattern with rolling two-row storage. `cost(i, j)` is the local cost
    /// of aligning step i of the first series with step j of the second.
    /// Returns +inf as soon as every cell of a row exceeds `cutoff` (the
    /// true distance is then provably > cutoff, since local costs are >= 0).
    template<typename CostFn>
    double dynamic_program(std::size_t n, std::size_t m, CostFn&& cost, std::size_t radius,
                           double cutoff) {
      std::vector<double> prev(m, kInfinity), curr(m, kInfinity);

      const std::size_t first_hi = std::min(m - 1, radius);
      curr[0] = cost(0, 0);
      for (std::size_t j = 1; j <= first_hi; ++j) curr[j] = curr[j - 1] + cost(0, j);

      for (std::size_t i = 1; i < n; ++i) {
        std::swap(prev, curr);
        const std::size_t lo = i > radius ? i - radius : 0;
        const std::size_t hi = std::min(m - 1, i + radius);
        if (lo > 0) curr[lo - 1] = kInfinity;
        double row_min = kInfinity;
        for (std::size_t j = lo; j <= hi; ++j) {
          double best = prev[j];                                    // up
          if (j > 0) {
            if (prev[j - 1] < best) best = prev[j - 1];             // diagonal
            if (curr[j - 1] < best) best = curr[j - 1];             // right
          }
          const double v = best == kInfinity ? kInfinity : best + cost(i, j);
          curr[j] = v;
          if (v < row_min) row_min = v;
        }
        if (row_min > cutoff) return kInfinity;
      }
      return curr[m - 1];
    }

  } // namespace dtw_detail

  /// Classic univariate DTW with squared local cost. `cutoff` enables early
  /// abandoning: any return value > cutoff may be reported as +inf.
  inline double dtw(std::span<const double> a, std::span<const double> b,
                    const DtwConfig& cfg = {},
                    double cutoff = dtw_detail::kInfinity) {
    cfg.validate();
    if (a.empty() || b.empty()) throw std::invalid_argument("dtw: empty series");
    const std::size_t radius = dtw_detail::band_radius(cfg.window, a.size(), b.size());
    return dtw_detail::dynamic_program(
        a.size(), b.size(),
        [&](std::size_t i, std::size_t j) {
          const double d = a[i] - b[j];
          return d * d;
        },
        radius, cutoff);
  }

  /// Dependent multivariate DTW: one dynamic program whose local cost is the
  /// squared Euclidean distance across all channels at each cell.
  inline double dtw_dependent(const MultivariateSeries& x, const MultivariateSeries& y,
                              const DtwConfig& cfg = {},
                              double cutoff = dtw_detail::kInfinity) {
    cfg.validate();
    if (x.channel_count() != y.channel_count())
      throw std::invalid_argument("dtw_dependent: channel-count mismatch (" +
                                  std::to_string(x.channel_count()) + " vs " +
                                  std::to_string(y.channel_count()) + ")");
    const std::size_t l = x.channel_count();
    const std::size_t n = x.length(), m = y.length();

    // Time-major copies make the per-cell channel loop contiguous.
    std::vector<double> xt(n * l), yt(m * l);
    for (std::size_t j = 0; j < l; ++j) {
      auto cx = x.channel(j);
      auto cy = y.channel(j);
      for (std::size_t t = 0; t < n; ++t) xt[t * l + j] = cx[t];
      for (std::size_t t = 0; t < m; ++t) yt[t * l + j] = cy[t];
    }

    const std::size_t radius = dtw_detail::band_radius(cfg.window, n, m);
    return dtw_detail::dynamic_program(
        n, m,
        [&](std::size_t i, std::size_t j) {
          const double* p = &xt[i * l];
          const double* q = &yt[j * l];
          double c = 0.0;
          for (std::size_t k = 0; k < l; ++k) {
            const double d = p[k] - q[k];
            c += d * d;
          }
          return c;
        },
        radius, cutoff);
  }

  /// Independent multivariate DTW: per-channel univariate DTW, aggregated by
  /// sum (default) or mean across channels.
  inline double dtw_independent(const MultivariateSeries& x, const MultivariateSeries& y,
                                const DtwConfig& cfg = {},
                                double cutoff = dtw_detail::kInfinity) {
    cfg.validate();
    if (x.channel_count() != y.channel_count())
      throw std::invalid_argument("dtw_independent: channel-count mismatch (" +
                                  std::to_string(x.channel_count()) + " vs " +
                                  std::to_string(y.channel_count()) + ")");
    const std::size_t l = x.channel_count();
    const bool mean = cfg.aggregation == DtwConfig::Aggregation::mean;
    const double raw_cutoff = mean ? cutoff * static_cast<double>(l) : cutoff;

    double total = 0.0;
    for (std::size_t j = 0; j < l; ++j) {
      total += dtw(x.channel(j), y.channel(j), cfg, raw_cutoff - total);
      if (total > raw_cutoff || std::isinf(total)) return dtw_detail::kInfinity;
    }
    return mean ? total / static_cast<double>(l) : total;
  }

  /// Full-window univariate DTW that also reports one optimal warping path
  /// as (i, j) pairs from (0, 0) to (n-1, m-1). Used by barycenter averaging.
  inline double dtw_path(std::span<const double> a, std::span<const double> b,
                         std::vector<std::pair<std::uint32_t, std::uint32_t>>& path) {
    if (a.empty() || b.empty()) throw std::invalid_argument("dtw_path: empty series");
    const std::size_t n = a.size(), m = b.size();
    enum : std::uint8_t { kDiag = 0, kUp = 1, kLeft = 2 };
    std::vector<std::uint8_t> move(n * m);
    std::vector<double> prev(m), curr(m);

    curr[0] = (a[0] - b[0]) * (a[0] - b[0]);
    move[0] = kDiag;
    for (std::size_t j = 1; j < m; ++j) {
      const double d = a[0] - b[j];
      curr[j] = curr[j - 1] + d * d;
      move[j] = kLeft;
    }
    for (std::size_t i = 1; i < n; ++i) {
      std::swap(prev, curr);
      {
        const double d = a[i] - b[0];
        curr[0] = prev[0] + d * d;
        move[i * m] = kUp;
      }
      for (std::size_t j = 1; j < m; ++j) {
        double best = prev[j - 1];
        std::uint8_t dir = kDiag;
        if (prev[j] < best) { best = prev[j]; dir = kUp; }
        if (curr[j - 1] < best) { best = curr[j - 1]; dir = kLeft; }
        const double d = a[i] - b[j];
        curr[j] = best + d * d;
        move[i * m + j] = dir;
      }
    }

    path.clear();
    std::size_t i = n - 1, j = m - 1;
    for (;;) {
      path.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      if (i == 0 && j == 0) break;
      switch (move[i * m + j]) {
        case kDiag: --i; --j; break;
        case kUp: --i; break;
        default: --j; break;
      }
    }
    std::reverse(path.begin(), path.end());
    return curr[m - 1];
  }

  enum class DtwVariant { dependent, independent };
  enum class NnPruning { early_abandon, none };

  /// 1NN classification of every test instance against the training set.
  /// Ties go to the lowest training index; early abandoning passes the
  /// best-so-far distance as a cutoff and cannot change any prediction.
  inline std::vector<ClassLabel> nn1_classify(const LabeledDataset& train,
                                              const LabeledDataset& test,
                                              DtwVariant variant,
                                              const DtwConfig& cfg = {},
                                              NnPruning pruning = NnPruning::early_abandon) {
    cfg.validate();
    if (train.size() == 0) throw std::invalid_argument("nn1_classify: empty training set");
    if (train.channel_count() != test.channel_count())
      throw std::invalid_argument("nn1_classify: train/test channel-count mismatch");

    std::vector<ClassLabel> predictions(test.size());
    parallel::parallel_for(test.size(), [&](std::size_t t) {
      double best = dtw_detail::kInfinity;
      std::size_t best_index = 0;
      for (std::size_t i = 0; i < train.size(); ++i) {
        const double cutoff = pruning == NnPruning::early_abandon ? best : dtw_detail::kInfinity;
        const double d = variant == DtwVariant::dependent
                             ? dtw_dependent(test.instances[t], train.instances[i], cfg, cutoff)
                             : dtw_independent(test.instances[t], train.instances[i], cfg, cutoff);
        if (d < best) {
          best = d;
          best_index = i;
        }
      }
      predictions[t] = train.labels[best_index];
    });
    return predictions;
  }

} // namespace ucf
