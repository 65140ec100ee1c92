#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ucf/fft.hpp"
#include "ucf/parallel.hpp"
#include "ucf/series.hpp"

namespace ucf {

  /// Half-open interval [start, end) at a given dyadic depth.
  struct Interval {
    std::uint32_t start = 0;
    std::uint32_t end = 0;
    std::uint16_t depth = 0;
    bool shifted = false;

    std::size_t length() const { return end - start; }
    bool operator==(const Interval&) const = default;
  };

  /// Dyadic interval family of [0, length): for each depth 0..max_depth the
  /// 2^depth tiling intervals (earlier intervals absorb the remainder when
  /// the length is not divisible), plus copies of every tile of length >= 2
  /// shifted right by half its length, dropping copies that overrun the
  /// series. Order: by depth, tiles left to right, then shifted left to
  /// right.
  inline std::vector<Interval> dyadic_intervals(std::size_t length, std::size_t max_depth) {
    if (length < 1) throw std::invalid_argument("dyadic_intervals: empty series");
    if (max_depth < 64 && (std::size_t{1} << max_depth) > length)
      throw std::invalid_argument("dyadic_intervals: series of length " + std::to_string(length) +
                                  " is too short for depth " + std::to_string(max_depth) +
                                  " (an interval would be empty)");
    std::vector<Interval> out;
    for (std::size_t depth = 0; depth <= max_depth; ++depth) {
      const std::size_t count = std::size_t{1} << depth;
      const std::size_t base = length / count;
      const std::size_t remainder = length % count;
      std::vector<Interval> tiles;
      tiles.reserve(count);
      std::size_t pos = 0;
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t len = base + (i < remainder ? 1 : 0);
        tiles.push_back({static_cast<std::uint32_t>(pos), static_cast<std::uint32_t>(pos + len),
                         static_cast<std::uint16_t>(depth), false});
        pos += len;
      }
      out.insert(out.end(), tiles.begin(), tiles.end());
      for (const Interval& tile : tiles) {
        const std::size_t len = tile.length();
        if (len < 2) continue;
        const std::size_t shift = len / 2;
        if (tile.end + shift <= length)
          out.push_back({static_cast<std::uint32_t>(tile.start + shift),
                         static_cast<std::uint32_t>(tile.end + shift),
                         static_cast<std::uint16_t>(depth), true});
      }
    }
    return out;
  }

  enum class SeriesRepresentation { raw, diff1, diff2, fourier };

  inline std::string to_string(SeriesRepresentation r) {
    switch (r) {
      case SeriesRepresentation::raw: return "raw";
      case SeriesRepresentation::diff1: return "diff1";
      case SeriesRepresentation::diff2: return "diff2";
      default: return "fourier";
    }
  }

  constexpr SeriesRepresentation kRepresentations[] = {
      SeriesRepresentation::raw, SeriesRepresentation::diff1, SeriesRepresentation::diff2,
      SeriesRepresentation::fourier};

  /// Length of a representation of an n-step series: n, n-1, n-2 and
  /// floor(n/2)+1 respectively.
  inline std::size_t representation_length(std::size_t n, SeriesRepresentation r) {
    switch (r) {
      case SeriesRepresentation::raw: return n;
      case SeriesRepresentation::diff1: return n - 1;
      case SeriesRepresentation::diff2: return n - 2;
      default: return n / 2 + 1;
    }
  }

  /// raw = identity, diff1 = forward differences, diff2 = diff1 twice,
  /// fourier = unnormalized magnitude spectrum.
  inline UnivariateSeries make_representation(const UnivariateSeries& z, SeriesRepresentation r) {
    switch (r) {
      case SeriesRepresentation::raw: return z;
      case SeriesRepresentation::diff1: {
        if (z.size() < 2) throw std::invalid_argument("diff1 needs length >= 2");
        UnivariateSeries d(z.size() - 1);
        for (std::size_t t = 0; t + 1 < z.size(); ++t) d[t] = z[t + 1] - z[t];
        return d;
      }
      case SeriesRepresentation::diff2: {
        if (z.size() < 3) throw std::invalid_argument("diff2 needs length >= 3");
        UnivariateSeries d(z.size() - 2);
        for (std::size_t t = 0; t + 2 < z.size(); ++t) d[t] = z[t + 2] - 2.0 * z[t + 1] + z[t];
        return d;
      }
      default:
        return fft::magnitude_spectrum(z);
    }
  }

  namespace quant_detail {

    /// Linear interpolation between closest order statistics ("type 7"):
    /// quantile p of sorted s is s[floor(h)] + frac(h) * (s[floor(h)+1] -
    /// s[floor(h)]) with h = p * (len - 1).
    inline double quantile_sorted(std::span<const double> sorted, double p) {
      const double h = p * static_cast<double>(sorted.size() - 1);
      const auto lo = static_cast<std::size_t>(h);
      if (lo + 1 >= sorted.size()) return sorted.back();
      const double frac = h - static_cast<double>(lo);
      return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
    }

  } // namespace quant_detail

  /// Number of quantiles extracted from a segment of the given length.
  inline std::size_t quantile_count(std::size_t segment_length, std::size_t divisor) {
    return std::max<std::size_t>(1, (segment_length + divisor - 1) / divisor);
  }

  /// k = max(1, ceil(len/divisor)) evenly spaced quantiles of the segment
  /// (k = 1 degenerates to the median); every second quantile (odd
  /// positions) has the segment mean subtracted. `scratch` is reused for the
  /// sorted copy; results are appended to `out`.
  inline void interval_quantiles(std::span<const double> segment, std::size_t divisor,
                                 std::vector<double>& scratch, std::vector<double>& out) {
    if (segment.empty()) throw std::invalid_argument("interval_quantiles: empty segment");
    if (divisor < 1) throw std::invalid_argument("interval_quantiles: divisor must be >= 1");
    scratch.assign(segment.begin(), segment.end());
    std::sort(scratch.begin(), scratch.end());

    const std::size_t k = quantile_count(segment.size(), divisor);
    double mean = 0.0;
    for (double v : segment) mean += v;
    mean /= static_cast<double>(segment.size());

    if (k == 1) {
      out.push_back(quant_detail::quantile_sorted(scratch, 0.5));
      return;
    }
    for (std::size_t i = 0; i < k; ++i) {
      const double p = static_cast<double>(i) / static_cast<double>(k - 1);
      double q = quant_detail::quantile_sorted(scratch, p);
      if (i % 2 == 1) q -= mean;
      out.push_back(q);
    }
  }

  struct QuantConfig {
    std::size_t depth = 6;
    std::size_t divisor = 4;

    void validate() const {
      if (divisor < 1) throw std::invalid_argument("quant: divisor must be >= 1");
    }
  };

  /// Deterministic column layout: representation-major, then interval (in
  /// dyadic_intervals order), then quantile index. A pure function of
  /// (n, depth, divisor).
  struct FeatureLayout {
    struct Block {
      SeriesRepresentation representation;
      Interval interval;
      std::size_t first_column;
      std::size_t quantiles;
    };

    std::size_t series_length = 0;
    std::size_t depth = 0;
    std::size_t divisor = 0;
    std::size_t feature_count = 0;
    std::vector<Block> blocks;

    static FeatureLayout create(std::size_t n, const QuantConfig& cfg) {
      cfg.validate();
      if (n < 3) throw std::invalid_argument("quant: series length must be >= 3");
      FeatureLayout layout;
      layout.series_length = n;
      layout.depth = cfg.depth;
      layout.divisor = cfg.divisor;
      for (auto rep : kRepresentations) {
        const std::size_t rep_len = representation_length(n, rep);
        for (const Interval& iv : dyadic_intervals(rep_len, cfg.depth)) {
          const std::size_t k = quantile_count(iv.length(), cfg.divisor);
          layout.blocks.push_back({rep, iv, layout.feature_count, k});
          layout.feature_count += k;
        }
      }
      return layout;
    }

    std::vector<std::string> column_ids() const {
      std::vector<std::string> ids;
      ids.reserve(feature_count);
      for (const auto& b : blocks)
        for (std::size_t q = 0; q < b.quantiles; ++q)
          ids.push_back(to_string(b.representation) + "[" + std::to_string(b.interval.start) + "," +
                        std::to_string(b.interval.end) + ")" + (b.interval.shifted ? "s" : "") + "q" +
                        std::to_string(q));
      return ids;
    }
  };

  /// Row-major (instances x features) matrix.
  struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    FeatureMatrix() = default;
    FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  };

  /// Quantile features of one univariate series under a fixed layout.
  inline void quant_features(const UnivariateSeries& z, const FeatureLayout& layout,
                             std::span<double> out) {
    std::vector<double> scratch, buffer;
    buffer.reserve(layout.feature_count);
    SeriesRepresentation current = SeriesRepresentation::raw;
    UnivariateSeries rep = z;
    for (const auto& block : layout.blocks) {
      if (block.representation != current || &block == &layout.blocks.front()) {
        current = block.representation;
        rep = make_representation(z, current);
      }
      std::span<const double> segment(rep.data() + block.interval.start, block.interval.length());
      buffer.clear();
      interval_quantiles(segment, layout.divisor, scratch, buffer);
      std::copy(buffer.begin(), buffer.end(), out.begin() + static_cast<std::ptrdiff_t>(block.first_column));
    }
  }

  /// QUANT transform of a univariate dataset. Train and test transforms with
  /// equal n produce identical layouts.
  inline FeatureMatrix quant_transform(const LabeledDataset& d, const FeatureLayout& layout) {
    if (d.channel_count() != 1)
      throw std::invalid_argument("quant_transform: dataset must be univariate (got l = " +
                                  std::to_string(d.channel_count()) + ")");
    if (d.length() != layout.series_length)
      throw std::invalid_argument("quant_transform: dataset length " + std::to_string(d.length()) +
                                  " does not match layout length " +
                                  std::to_string(layout.series_length));
    FeatureMatrix features(d.size(), layout.feature_count);
    parallel::parallel_for(d.size(), [&](std::size_t i) {
      const auto ch = d.instances[i].channel(0);
      quant_features(UnivariateSeries(ch.begin(), ch.end()), layout, features.row(i));
    });
    return features;
  }

  inline FeatureMatrix quant_transform(const LabeledDataset& d, const QuantConfig& cfg) {
    return quant_transform(d, FeatureLayout::create(d.length(), cfg));
  }

  /// CSV export (header row = column ids) for cross-implementation checks.
  inline void write_feature_csv(std::ostream& out, const FeatureMatrix& m, const FeatureLayout& layout) {
    const auto ids = layout.column_ids();
    if (ids.size() != m.cols) throw std::invalid_argument("write_feature_csv: layout/matrix mismatch");
    for (std::size_t j = 0; j < ids.size(); ++j) out << (j ? "," : "") << ids[j];
    out << '\n';
    char buf[40];
    for (std::size_t i = 0; i < m.rows; ++i) {
      const auto row = m.row(i);
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j) out.put(',');
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, row[j]);
        (void)ec;
        out.write(buf, ptr - buf);
      }
      out.put('\n');
    }
  }

} // namespace ucf
