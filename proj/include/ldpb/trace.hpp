//
// Copyright 2026 The ldp-bandit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef LDPB_TRACE_HPP_
#define LDPB_TRACE_HPP_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace ldpb {

// Formats a double with 17 significant digits, enough to round-trip
// exactly; used for every float written to a CSV.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct TraceMeta {
  std::string env;
  std::string algo;
  double epsilon = 0.0;
  double delta = 0.0;
  int rep = 0;
  std::uint64_t seed = 0;
};

// Cumulative regret sampled on the logging grid: t strictly increasing,
// cum_regret non-decreasing.
struct RegretTrace {
  TraceMeta meta;
  std::vector<std::pair<std::int64_t, double>> points;

  double value_at(std::int64_t t) const {
    for (const auto& [pt, v] : points) {
      if (pt == t) return v;
    }
    throw std::invalid_argument("RegretTrace: no point logged at t = " +
                                std::to_string(t));
  }
};

// Ratio cum_regret(T) / cum_regret(T/2); 0/0 counts as 1. Distinguishes
// sqrt-like growth (~1.41) and log-like growth (~1.05 at T = 1e5) from
// linear growth (2.0). Both grid points must have been logged.
inline double growth_metric(const RegretTrace& trace, std::int64_t t_horizon) {
  const double full = trace.value_at(t_horizon);
  const double half = trace.value_at(t_horizon / 2);
  if (full == 0.0 && half == 0.0) return 1.0;
  return full / half;
}

// Long-format results schema, fixed order.
inline const char* kResultsCsvHeader = "env,algo,epsilon,delta,rep,t,cum_regret";

inline void write_traces_csv(std::ostream& out,
                             const std::vector<RegretTrace>& traces) {
  out << kResultsCsvHeader << "\n";
  for (const auto& trace : traces) {
    for (const auto& [t, cum] : trace.points) {
      out << trace.meta.env << ',' << trace.meta.algo << ','
          << format_double(trace.meta.epsilon) << ','
          << format_double(trace.meta.delta) << ',' << trace.meta.rep << ','
          << t << ',' << format_double(cum) << "\n";
    }
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace detail

// Reads a long-format results CSV back into traces (one trace per
// (env, algo, epsilon, delta, rep) group, points in file order).
inline std::vector<RegretTrace> read_traces_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("results csv: empty input");
  }
  if (line != kResultsCsvHeader) {
    throw std::invalid_argument("results csv: unexpected header: " + line);
  }
  std::vector<RegretTrace> traces;
  std::map<std::tuple<std::string, std::string, double, double, int>,
           std::size_t>
      index;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 7) {
      throw std::invalid_argument("results csv: malformed row: " + line);
    }
    TraceMeta meta;
    meta.env = fields[0];
    meta.algo = fields[1];
    meta.epsilon = std::stod(fields[2]);
    meta.delta = std::stod(fields[3]);
    meta.rep = std::stoi(fields[4]);
    const std::int64_t t = std::stoll(fields[5]);
    const double cum = std::stod(fields[6]);
    const auto key = std::make_tuple(meta.env, meta.algo, meta.epsilon,
                                     meta.delta, meta.rep);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, traces.size());
      traces.push_back(RegretTrace{meta, {}});
      it = index.find(key);
    }
    traces[it->second].points.emplace_back(t, cum);
  }
  return traces;
}

// Per-group per-t summary: mean, sample standard deviation, count.
struct AggregateRow {
  std::string env;
  std::string algo;
  double epsilon = 0.0;
  double delta = 0.0;
  std::int64_t t = 0;
  double mean = 0.0;
  double stddev = 0.0;
  int count = 0;
};

// Groups traces by (env, algo, epsilon, delta) and reduces pointwise.
// All traces within a group must share an identical t grid.
inline std::vector<AggregateRow> aggregate(
    const std::vector<RegretTrace>& traces) {
  if (traces.empty()) {
    throw std::invalid_argument("aggregate: no traces");
  }
  std::map<std::tuple<std::string, std::string, double, double>,
           std::vector<const RegretTrace*>>
      groups;
  for (const auto& trace : traces) {
    groups[std::make_tuple(trace.meta.env, trace.meta.algo, trace.meta.epsilon,
                           trace.meta.delta)]
        .push_back(&trace);
  }
  std::vector<AggregateRow> rows;
  for (const auto& [key, members] : groups) {
    const auto& grid = members.front()->points;
    for (const auto* trace : members) {
      if (trace->points.size() != grid.size()) {
        throw std::invalid_argument("aggregate: misaligned t grids");
      }
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (trace->points[i].first != grid[i].first) {
          throw std::invalid_argument("aggregate: misaligned t grids");
        }
      }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      AggregateRow row;
      std::tie(row.env, row.algo, row.epsilon, row.delta) = key;
      row.t = grid[i].first;
      row.count = static_cast<int>(members.size());
      double sum = 0.0;
      for (const auto* trace : members) sum += trace->points[i].second;
      row.mean = sum / row.count;
      double sq = 0.0;
      for (const auto* trace : members) {
        const double diff = trace->points[i].second - row.mean;
        sq += diff * diff;
      }
      row.stddev = row.count > 1 ? std::sqrt(sq / (row.count - 1)) : 0.0;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline const char* kSummaryCsvHeader =
    "env,algo,epsilon,delta,t,mean_cum_regret,std_cum_regret,count";

inline void write_summary_csv(std::ostream& out,
                              const std::vector<AggregateRow>& rows) {
  out << kSummaryCsvHeader << "\n";
  for (const auto& row : rows) {
    out << row.env << ',' << row.algo << ',' << format_double(row.epsilon)
        << ',' << format_double(row.delta) << ',' << row.t << ','
        << format_double(row.mean) << ',' << format_double(row.stddev) << ','
        << row.count << "\n";
  }
}

}  // namespace ldpb

#endif  // LDPB_TRACE_HPP_
