#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ucf/parallel.hpp"

namespace ucf {

  /// One channel of length n. Plain vector: every algorithm in the library
  /// takes spans, so no wrapper type is needed.
  using UnivariateSeries = std::vector<double>;

  /// Class labels are string tokens drawn from a finite per-dataset set.
  using ClassLabel = std::string;

  /// An l-channel, n-step real-valued series, stored channel-major.
  /// All channels have the same length; values are finite after ingestion.
  class MultivariateSeries {
  public:
    MultivariateSeries() = default;

    MultivariateSeries(std::size_t channels, std::size_t length)
        : channels_(channels), length_(length), data_(channels * length, 0.0) {
      if (channels == 0 || length == 0)
        throw std::invalid_argument("MultivariateSeries: channel count and length must be >= 1");
    }

    static MultivariateSeries from_channels(const std::vector<UnivariateSeries>& channels) {
      if (channels.empty()) throw std::invalid_argument("from_channels: no channels");
      MultivariateSeries s(channels.size(), channels.front().size());
      for (std::size_t j = 0; j < channels.size(); ++j) {
        if (channels[j].size() != s.length_)
          throw std::invalid_argument("from_channels: ragged channel lengths");
        std::copy(channels[j].begin(), channels[j].end(), s.data_.begin() + j * s.length_);
      }
      return s;
    }

    static MultivariateSeries from_univariate(UnivariateSeries z) {
      if (z.empty()) throw std::invalid_argument("from_univariate: empty series");
      MultivariateSeries s;
      s.channels_ = 1;
      s.length_ = z.size();
      s.data_ = std::move(z);
      return s;
    }

    std::size_t channel_count() const { return channels_; }
    std::size_t length() const { return length_; }

    std::span<const double> channel(std::size_t j) const {
      return {data_.data() + j * length_, length_};
    }
    std::span<double> channel(std::size_t j) {
      return {data_.data() + j * length_, length_};
    }

    double at(std::size_t channel, std::size_t t) const { return data_[channel * length_ + t]; }
    double& at(std::size_t channel, std::size_t t) { return data_[channel * length_ + t]; }

    bool all_finite() const {
      return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
    }

    bool operator==(const MultivariateSeries&) const = default;

  private:
    std::size_t channels_ = 0;
    std::size_t length_ = 0;
    std::vector<double> data_; // channel-major: data_[j * length_ + t]
  };

  enum class Split { train, test };

  inline std::string to_string(Split s) { return s == Split::train ? "train" : "test"; }

  /// m labeled instances sharing one channel count and one length.
  struct LabeledDataset {
    std::string name;
    Split split = Split::train;
    std::vector<MultivariateSeries> instances;
    std::vector<ClassLabel> labels;

    std::size_t size() const { return instances.size(); }
    std::size_t channel_count() const { return instances.empty() ? 0 : instances.front().channel_count(); }
    std::size_t length() const { return instances.empty() ? 0 : instances.front().length(); }

    /// Sorted unique labels; index order in this vector is the class index
    /// order used by every classifier in the library.
    std::vector<ClassLabel> label_set() const {
      std::set<ClassLabel> s(labels.begin(), labels.end());
      return {s.begin(), s.end()};
    }

    /// Enforce the dataset invariants: m >= 1, equal l and n across
    /// instances, finite values, one label per instance.
    void validate() const {
      if (instances.empty()) throw std::invalid_argument("dataset '" + name + "': no instances");
      if (labels.size() != instances.size())
        throw std::invalid_argument("dataset '" + name + "': label/instance count mismatch");
      const std::size_t l = instances.front().channel_count();
      const std::size_t n = instances.front().length();
      for (std::size_t i = 0; i < instances.size(); ++i) {
        if (instances[i].channel_count() != l || instances[i].length() != n)
          throw std::invalid_argument("dataset '" + name + "': instance " + std::to_string(i) +
                                      " has mismatched shape");
        if (!instances[i].all_finite())
          throw std::invalid_argument("dataset '" + name + "': instance " + std::to_string(i) +
                                      " contains non-finite values");
      }
    }

    bool operator==(const LabeledDataset&) const = default;
  };

  /// Standardize each channel independently to mean 0 and population
  /// standard deviation 1. A constant channel maps to all zeros.
  inline MultivariateSeries z_normalize(const MultivariateSeries& x) {
    MultivariateSeries out(x.channel_count(), x.length());
    const auto n = static_cast<double>(x.length());
    for (std::size_t j = 0; j < x.channel_count(); ++j) {
      auto src = x.channel(j);
      auto dst = out.channel(j);
      double mean = 0.0;
      for (double v : src) mean += v;
      mean /= n;
      double var = 0.0;
      for (double v : src) var += (v - mean) * (v - mean);
      var /= n;
      const double sd = std::sqrt(var);
      if (sd == 0.0) {
        std::fill(dst.begin(), dst.end(), 0.0);
      } else {
        for (std::size_t t = 0; t < src.size(); ++t) dst[t] = (src[t] - mean) / sd;
      }
    }
    return out;
  }

  /// Per-channel, per-instance normalization of a whole dataset.
  inline LabeledDataset z_normalize(const LabeledDataset& d) {
    LabeledDataset out;
    out.name = d.name;
    out.split = d.split;
    out.labels = d.labels;
    out.instances.resize(d.instances.size());
    parallel::parallel_for(d.instances.size(),
                           [&](std::size_t i) { out.instances[i] = z_normalize(d.instances[i]); });
    return out;
  }

} // namespace ucf
