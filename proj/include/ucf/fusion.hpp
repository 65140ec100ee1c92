#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ucf/dtw.hpp"
#include "ucf/parallel.hpp"
#include "ucf/rng.hpp"
#include "ucf/series.hpp"

namespace ucf {

  /// Hyperparameters of the stochastic-subgradient barycenter. The step size
  /// decays linearly from initial_step to final_step over max_epochs.
  struct BarycenterParams {
    std::size_t max_epochs = 30;
    double initial_step = 0.05;
    double final_step = 0.005;
    double tolerance = 1e-5;
    std::uint64_t seed = 0;

    void validate() const {
      if (max_epochs < 1) throw std::invalid_argument("barycenter: max_epochs must be >= 1");
      if (!(initial_step >= final_step) || !(final_step > 0.0))
        throw std::invalid_argument("barycenter: need initial_step >= final_step > 0");
      if (tolerance < 0.0) throw std::invalid_argument("barycenter: tolerance must be >= 0");
    }
  };

  enum class FusionKind { mean, median, barycenter };

  inline std::string to_string(FusionKind k) {
    switch (k) {
      case FusionKind::mean: return "mean";
      case FusionKind::median: return "median";
      default: return "barycenter";
    }
  }

  inline FusionKind fusion_kind_from_string(const std::string& s) {
    if (s == "mean") return FusionKind::mean;
    if (s == "median") return FusionKind::median;
    if (s == "barycenter") return FusionKind::barycenter;
    throw std::invalid_argument("unknown fusion kind '" + s + "'");
  }

  /// Channel aggregation choice, plus barycenter hyperparameters when used.
  struct FusionStrategy {
    FusionKind kind = FusionKind::mean;
    BarycenterParams barycenter;

    void validate() const {
      if (kind == FusionKind::barycenter) barycenter.validate();
    }
  };

  /// Pointwise mean across channels.
  inline UnivariateSeries fuse_mean(const MultivariateSeries& x) {
    const std::size_t n = x.length();
    const std::size_t l = x.channel_count();
    UnivariateSeries z(n, 0.0);
    for (std::size_t j = 0; j < l; ++j) {
      auto ch = x.channel(j);
      for (std::size_t t = 0; t < n; ++t) z[t] += ch[t];
    }
    const double inv = 1.0 / static_cast<double>(l);
    for (double& v : z) v *= inv;
    return z;
  }

  /// Pointwise median across channels; even channel counts take the midpoint
  /// of the two central order statistics.
  inline UnivariateSeries fuse_median(const MultivariateSeries& x) {
    const std::size_t n = x.length();
    const std::size_t l = x.channel_count();
    UnivariateSeries z(n);
    std::vector<double> column(l);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t j = 0; j < l; ++j) column[j] = x.at(j, t);
      auto mid = column.begin() + l / 2;
      std::nth_element(column.begin(), mid, column.end());
      if (l % 2 == 1) {
        z[t] = *mid;
      } else {
        const double upper = *mid;
        const double lower = *std::max_element(column.begin(), mid);
        z[t] = (lower + upper) / 2.0;
      }
    }
    return z;
  }

  /// Barycenter output plus the best-so-far objective recorded after the
  /// initial estimate and after every epoch. The trace is non-increasing by
  /// construction; the returned series is the iterate that achieved the
  /// final (lowest) trace entry.
  struct BarycenterResult {
    UnivariateSeries series;
    std::vector<double> objective_trace;
    std::size_t epochs_run = 0;
  };

  namespace fusion_detail {

    inline double barycenter_objective(const UnivariateSeries& z, const MultivariateSeries& x) {
      double f = 0.0;
      for (std::size_t j = 0; j < x.channel_count(); ++j) f += dtw(z, x.channel(j));
      return f;
    }

  } // namespace fusion_detail

  /// DTW barycenter averaging of the channels by stochastic subgradient
  /// steps. Starts from the pointwise mean; each epoch visits the channels
  /// in a freshly shuffled order and walks the iterate along the optimal
  /// warping alignments. Stops at max_epochs or when the relative
  /// improvement of the best objective falls below tolerance.
  inline BarycenterResult dtw_barycenter(const MultivariateSeries& x, const BarycenterParams& params) {
    params.validate();
    const std::size_t n = x.length();
    const std::size_t l = x.channel_count();

    UnivariateSeries z = fuse_mean(x);
    BarycenterResult result;
    result.series = z;
    double best = fusion_detail::barycenter_objective(z, x);
    result.objective_trace.push_back(best);

    rng::Rng gen(params.seed);
    std::vector<std::size_t> order(l);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> path;
    std::vector<double> gradient(n);

    for (std::size_t epoch = 0; epoch < params.max_epochs; ++epoch) {
      if (best == 0.0) break; // already at the optimum (identical channels, l = 1)

      const double step =
          params.max_epochs == 1
              ? params.initial_step
              : params.initial_step - (params.initial_step - params.final_step) *
                                          static_cast<double>(epoch) /
                                          static_cast<double>(params.max_epochs - 1);
      gen.shuffle(order);
      for (std::size_t j : order) {
        dtw_path(z, x.channel(j), path);
        std::fill(gradient.begin(), gradient.end(), 0.0);
        auto ch = x.channel(j);
        for (auto [i, t] : path) gradient[i] += 2.0 * (z[i] - ch[t]);
        for (std::size_t i = 0; i < n; ++i) {
          z[i] -= step * gradient[i];
          if (!std::isfinite(z[i]))
            throw std::runtime_error("barycenter diverged (non-finite iterate); reduce the step size");
        }
      }

      const double objective = fusion_detail::barycenter_objective(z, x);
      const double previous_best = best;
      if (objective < best) {
        best = objective;
        result.series = z;
      }
      result.objective_trace.push_back(best);
      result.epochs_run = epoch + 1;

      const double improvement = (previous_best - best) / std::max(previous_best, 1e-300);
      if (improvement < params.tolerance) break;
    }
    return result;
  }

  inline UnivariateSeries fuse_barycenter(const MultivariateSeries& x, const BarycenterParams& params) {
    return dtw_barycenter(x, params).series;
  }

  /// Dispatch on the configured aggregation. Output length is always n.
  inline UnivariateSeries fuse(const MultivariateSeries& x, const FusionStrategy& strategy) {
    strategy.validate();
    switch (strategy.kind) {
      case FusionKind::mean: return fuse_mean(x);
      case FusionKind::median: return fuse_median(x);
      default: return fuse_barycenter(x, strategy.barycenter);
    }
  }

  /// Fuse every instance independently; labels and counts are unchanged.
  /// Barycenter seeds are derived per instance from the strategy seed, so
  /// the result is independent of the worker count.
  inline LabeledDataset fuse_dataset(const LabeledDataset& d, const FusionStrategy& strategy) {
    strategy.validate();
    LabeledDataset out;
    out.name = d.name;
    out.split = d.split;
    out.labels = d.labels;
    out.instances.resize(d.size());
    parallel::parallel_for(d.size(), [&](std::size_t i) {
      FusionStrategy local = strategy;
      local.barycenter.seed = rng::derive_seed(strategy.barycenter.seed, i);
      out.instances[i] = MultivariateSeries::from_univariate(fuse(d.instances[i], local));
    });
    return out;
  }

} // namespace ucf
