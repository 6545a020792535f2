#ifndef FTOPT_IO_HPP
#define FTOPT_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "ftopt/engine.hpp"
#include "ftopt/metrics.hpp"

namespace ftopt {

nlohmann::json round_to_json(const RoundRecord& r);

// one RoundRecord per line
void write_trace_jsonl(const Trace& trace, const std::string& path);

// columns: t, lambda, gap, max_dist, grad_hull_ok, est_hull_ok, weight_ok
void write_metrics_csv(const Trace& trace, const MetricSeries& gap, const MetricSeries& max_dist,
                       const std::vector<Violation>& grad_hull,
                       const std::vector<Violation>& est_hull,
                       const std::vector<Violation>& weight_bound, const std::string& path);

// log-scale polyline plot of the given series against round index; no
// timestamps, so re-runs are byte-identical
void write_convergence_svg(const std::vector<MetricSeries>& series, const std::string& path);

}  // namespace ftopt

#endif
