#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ucf/series.hpp"

namespace ucf {

  /// Ingestion failure with the 1-based line it was detected on.
  class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
  };

  namespace io_detail {

    inline std::string_view trim(std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    }

    inline std::string lower(std::string_view s) {
      std::string out(s);
      std::transform(out.begin(), out.end(), out.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      return out;
    }

    /// getline that accepts \n, \r\n and \r endings.
    inline bool read_line(std::istream& in, std::string& line) {
      if (!std::getline(in, line)) return false;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }

    inline double parse_real(std::string_view token, std::size_t line) {
      token = trim(token);
      double value = 0.0;
      const char* first = token.data();
      const char* last = token.data() + token.size();
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc{} || ptr != last)
        throw ParseError(line, "non-numeric value token '" + std::string(token) + "'");
      return value;
    }

    inline std::vector<std::string_view> split(std::string_view s, char sep) {
      std::vector<std::string_view> out;
      std::size_t start = 0;
      for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
          out.push_back(s.substr(start, i - start));
          start = i + 1;
        }
      }
      return out;
    }

    inline std::vector<std::string> split_ws(std::string_view s) {
      std::vector<std::string> out;
      std::istringstream iss{std::string(s)};
      std::string tok;
      while (iss >> tok) out.push_back(tok);
      return out;
    }

  } // namespace io_detail

  /// Parse the UEA `.ts` convention: `@` header lines, then one instance per
  /// line with channels separated by ':' and values by ',', label last.
  /// Variable-length data is rejected; every error carries its line number.
  inline LabeledDataset parse_ts(std::istream& in, const std::string& fallback_name = "",
                                 Split split = Split::train) {
    using namespace io_detail;

    LabeledDataset ds;
    ds.name = fallback_name;
    ds.split = split;

    std::optional<std::size_t> declared_dims;
    std::optional<std::size_t> declared_length;
    std::set<std::string> declared_labels;
    bool has_labels = false;
    bool in_data = false;

    std::string raw;
    std::size_t line_no = 0;
    while (read_line(in, raw)) {
      ++line_no;
      std::string_view line = trim(raw);
      if (line.empty() || line.front() == '#') continue;

      if (!in_data && line.front() == '@') {
        const std::size_t sp = line.find_first_of(" \t");
        const std::string key = lower(line.substr(0, sp));
        const std::string_view rest = sp == std::string_view::npos ? std::string_view{} : trim(line.substr(sp));
        if (key == "@problemname") {
          if (!rest.empty()) ds.name = std::string(rest);
        } else if (key == "@dimensions" || key == "@dimension") {
          declared_dims = static_cast<std::size_t>(parse_real(rest, line_no));
        } else if (key == "@univariate") {
          if (lower(rest) == "true") declared_dims = 1;
        } else if (key == "@serieslength") {
          declared_length = static_cast<std::size_t>(parse_real(rest, line_no));
        } else if (key == "@classlabel" || key == "@targetlabel") {
          auto tokens = split_ws(rest);
          if (tokens.empty() || lower(tokens.front()) != "true")
            throw ParseError(line_no, "unlabeled data (@classLabel false) is not supported");
          has_labels = true;
          declared_labels.insert(tokens.begin() + 1, tokens.end());
        } else if (key == "@data") {
          in_data = true;
        }
        // Other headers (@timeStamps, @missing, @equalLength, ...) carry no
        // information we act on; actual equal-length is verified below.
        continue;
      }

      if (!in_data)
        throw ParseError(line_no, "data before @data marker");

      auto parts = split(line, ':');
      if (parts.size() < 2)
        throw ParseError(line_no, "expected ':'-separated channels followed by a label");

      const std::string label{trim(parts.back())};
      if (label.empty()) throw ParseError(line_no, "empty class label");
      if (has_labels && !declared_labels.empty() && !declared_labels.count(label))
        throw ParseError(line_no, "unknown label '" + label + "'");

      const std::size_t channels = parts.size() - 1;
      if (declared_dims && channels != *declared_dims)
        throw ParseError(line_no, "instance has " + std::to_string(channels) +
                                      " channels, header declares " + std::to_string(*declared_dims));

      std::vector<UnivariateSeries> chans(channels);
      for (std::size_t j = 0; j < channels; ++j) {
        auto values = split(parts[j], ',');
        chans[j].reserve(values.size());
        for (auto v : values) chans[j].push_back(parse_real(v, line_no));
        if (chans[j].empty()) throw ParseError(line_no, "empty channel " + std::to_string(j));
        if (chans[j].size() != chans[0].size())
          throw ParseError(line_no, "ragged channel lengths within instance");
      }
      if (declared_length && chans[0].size() != *declared_length)
        throw ParseError(line_no, "channel length " + std::to_string(chans[0].size()) +
                                      " does not match declared seriesLength " +
                                      std::to_string(*declared_length));
      if (!ds.instances.empty() && chans[0].size() != ds.length())
        throw ParseError(line_no, "variable-length series are not supported");

      ds.instances.push_back(MultivariateSeries::from_channels(chans));
      if (!ds.instances.back().all_finite())
        throw ParseError(line_no, "non-finite value in instance");
      ds.labels.push_back(label);
    }

    if (!in_data) throw ParseError(line_no, "missing @data section");
    ds.validate();
    return ds;
  }

  inline LabeledDataset parse_ts_file(const std::string& path, Split split = Split::train) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string name = path;
    if (auto pos = name.find_last_of("/\\"); pos != std::string::npos) name = name.substr(pos + 1);
    if (auto pos = name.find('.'); pos != std::string::npos) name = name.substr(0, pos);
    return parse_ts(in, name, split);
  }

  /// Serialize in the same `.ts` convention. Values use shortest-round-trip
  /// formatting, so parse(write(ds)) reproduces ds exactly.
  inline void write_ts(std::ostream& out, const LabeledDataset& ds) {
    ds.validate();
    out << "@problemName " << (ds.name.empty() ? "unnamed" : ds.name) << '\n';
    out << "@dimensions " << ds.channel_count() << '\n';
    out << "@equalLength true\n";
    out << "@seriesLength " << ds.length() << '\n';
    out << "@classLabel true";
    for (const auto& l : ds.label_set()) out << ' ' << l;
    out << '\n';
    out << "@data\n";
    char buf[40];
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto& x = ds.instances[i];
      for (std::size_t j = 0; j < x.channel_count(); ++j) {
        auto ch = x.channel(j);
        for (std::size_t t = 0; t < ch.size(); ++t) {
          auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, ch[t]);
          out.write(buf, ptr - buf);
          (void)ec;
          if (t + 1 < ch.size()) out.put(',');
        }
        out.put(':');
      }
      out << ds.labels[i] << '\n';
    }
  }

  inline void write_ts_file(const std::string& path, const LabeledDataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_ts(out, ds);
  }

  /// Column mapping for the long CSV layout: one row per
  /// (instance, channel, time) cell plus the instance label.
  struct CsvLongSchema {
    std::string instance_column = "instance";
    std::string channel_column = "channel";
    std::string time_column = "time";
    std::string value_column = "value";
    std::string label_column = "label";
  };

  namespace io_detail {

    /// Key ordered numerically when both sides parse as integers, otherwise
    /// lexicographically; distinct tokens stay distinct either way.
    struct Token {
      std::string text;
      std::optional<long long> number;

      explicit Token(std::string t) : text(std::move(t)) {
        long long v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec == std::errc{} && ptr == text.data() + text.size()) number = v;
      }
      bool operator<(const Token& o) const {
        if (number && o.number) {
          if (*number != *o.number) return *number < *o.number;
          return text < o.text;
        }
        if (number.has_value() != o.number.has_value()) return number.has_value(); // numbers first
        return text < o.text;
      }
      bool operator==(const Token& o) const { return text == o.text; }
    };

  } // namespace io_detail

  /// Assemble a dataset from long CSV. Rows may arrive in any order; the
  /// dataset is built in (instance, channel, time) sort order. The
  /// (instance x channel x time) grid must be complete, without duplicates,
  /// and each instance must carry a single label.
  inline LabeledDataset parse_csv_long(std::istream& in, const CsvLongSchema& schema,
                                       const std::string& name = "", Split split = Split::train) {
    using namespace io_detail;

    std::string raw;
    std::size_t line_no = 0;
    if (!read_line(in, raw)) throw ParseError(1, "empty input, expected header row");
    ++line_no;

    auto header = split(raw, ',');
    std::map<std::string, std::size_t> columns;
    for (std::size_t i = 0; i < header.size(); ++i) columns[std::string(trim(header[i]))] = i;
    auto column_of = [&](const std::string& want) {
      auto it = columns.find(want);
      if (it == columns.end()) throw ParseError(1, "missing column '" + want + "' in header");
      return it->second;
    };
    const std::size_t ci = column_of(schema.instance_column);
    const std::size_t cc = column_of(schema.channel_column);
    const std::size_t ct = column_of(schema.time_column);
    const std::size_t cv = column_of(schema.value_column);
    const std::size_t cl = column_of(schema.label_column);

    struct Cell { double value; std::size_t line; };
    std::map<Token, std::map<Token, std::map<long long, Cell>>> grid; // instance -> channel -> time
    std::map<Token, std::pair<std::string, std::size_t>> label_of;    // instance -> (label, line)
    std::set<Token> channel_keys;
    std::set<long long> time_keys;

    while (read_line(in, raw)) {
      ++line_no;
      if (trim(raw).empty()) continue;
      auto cells = split(raw, ',');
      const std::size_t needed = std::max({ci, cc, ct, cv, cl}) + 1;
      if (cells.size() < needed)
        throw ParseError(line_no, "row has " + std::to_string(cells.size()) + " cells, expected >= " +
                                      std::to_string(needed));

      Token instance{std::string(trim(cells[ci]))};
      Token channel{std::string(trim(cells[cc]))};
      const auto time_raw = parse_real(cells[ct], line_no);
      const auto time = static_cast<long long>(time_raw);
      if (static_cast<double>(time) != time_raw)
        throw ParseError(line_no, "time index must be an integer");
      const double value = parse_real(cells[cv], line_no);
      const std::string label{trim(cells[cl])};
      if (label.empty()) throw ParseError(line_no, "empty label");

      auto [it, inserted] = grid[instance][channel].emplace(time, Cell{value, line_no});
      if (!inserted)
        throw ParseError(line_no, "duplicate (instance, channel, time) key (" + instance.text + ", " +
                                      channel.text + ", " + std::to_string(time) + "), first at line " +
                                      std::to_string(it->second.line));
      auto [lit, label_inserted] = label_of.emplace(instance, std::make_pair(label, line_no));
      if (!label_inserted && lit->second.first != label)
        throw ParseError(line_no, "conflicting labels for instance '" + instance.text + "': '" +
                                      lit->second.first + "' (line " + std::to_string(lit->second.second) +
                                      ") vs '" + label + "'");
      channel_keys.insert(channel);
      time_keys.insert(time);
    }

    if (grid.empty()) throw ParseError(line_no, "no data rows");

    LabeledDataset ds;
    ds.name = name;
    ds.split = split;
    for (const auto& [instance, by_channel] : grid) {
      std::vector<UnivariateSeries> chans;
      chans.reserve(channel_keys.size());
      for (const auto& channel : channel_keys) {
        auto cit = by_channel.find(channel);
        if (cit == by_channel.end())
          throw ParseError(line_no, "instance '" + instance.text + "' is missing channel '" +
                                        channel.text + "'");
        UnivariateSeries series;
        series.reserve(time_keys.size());
        for (long long t : time_keys) {
          auto vit = cit->second.find(t);
          if (vit == cit->second.end())
            throw ParseError(line_no, "missing cell (" + instance.text + ", " + channel.text + ", " +
                                          std::to_string(t) + ")");
          series.push_back(vit->second.value);
        }
        chans.push_back(std::move(series));
      }
      ds.instances.push_back(MultivariateSeries::from_channels(chans));
      ds.labels.push_back(label_of.at(instance).first);
    }
    ds.validate();
    return ds;
  }

} // namespace ucf
