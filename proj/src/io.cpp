#include "ftopt/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace ftopt {

using nlohmann::json;

namespace {

const char* phase_name(CrashPhase p) {
    switch (p) {
        case CrashPhase::before_send: return "before_send";
        case CrashPhase::mid_send: return "mid_send";
        case CrashPhase::after_step3_before_step4: return "after_step3_before_step4";
    }
    return "?";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

}  // namespace

json round_to_json(const RoundRecord& r) {
    json j;
    j["t"] = r.t;
    j["lambda"] = r.lambda;
    json est = json::object();
    for (const auto& [id, x] : r.estimates) est[std::to_string(id)] = x;
    j["estimates"] = est;
    if (!r.crashes.empty()) {
        j["crashes"] = json::array();
        for (const auto& e : r.crashes) {
            json ej = {{"agent", e.agent}, {"iteration", e.iteration},
                       {"phase", phase_name(e.phase)}};
            if (e.phase == CrashPhase::mid_send) ej["recipients"] = e.recipients;
            j["crashes"].push_back(ej);
        }
    }
    if (!r.trims.empty()) {
        j["trims"] = json::array();
        for (const auto& rec : r.trims)
            j["trims"].push_back({{"receiver", rec.receiver},
                                  {"trimmed_mean", rec.result.trimmed_mean},
                                  {"g_mid", rec.result.g_mid},
                                  {"est_survivors", rec.result.est_survivors},
                                  {"grad_survivors", rec.result.grad_survivors}});
    }
    if (!r.true_gradients.empty()) {
        json g = json::object();
        for (const auto& [id, v] : r.true_gradients) g[std::to_string(id)] = v;
        j["true_gradients"] = g;
    }
    if (!r.byz_payloads.empty()) {
        j["byz_payloads"] = json::array();
        for (const auto& [s, rcv, w, g] : r.byz_payloads)
            j["byz_payloads"].push_back({{"sender", s}, {"receiver", rcv}, {"w", w}, {"g", g}});
    }
    if (!r.delivered.empty()) {
        j["delivered"] = json::array();
        for (const auto& d : r.delivered)
            j["delivered"].push_back({{"sender", d.sender}, {"receiver", d.receiver},
                                      {"w", d.w}, {"g", d.g}, {"tag", d.tag}});
    }
    return j;
}

void write_trace_jsonl(const Trace& trace, const std::string& path) {
    auto out = open_out(path);
    for (const auto& r : trace.rounds) out << round_to_json(r).dump() << "\n";
}

void write_metrics_csv(const Trace& trace, const MetricSeries& gap, const MetricSeries& max_dist,
                       const std::vector<Violation>& grad_hull,
                       const std::vector<Violation>& est_hull,
                       const std::vector<Violation>& weight_bound, const std::string& path) {
    std::set<int> bad_grad, bad_est, bad_weight;
    for (const auto& v : grad_hull) bad_grad.insert(v.t);
    for (const auto& v : est_hull) bad_est.insert(v.t);
    for (const auto& v : weight_bound) bad_weight.insert(v.t);

    auto out = open_out(path);
    out << "t,lambda,gap,max_dist,grad_hull_ok,est_hull_ok,weight_ok\n";
    out.precision(17);
    for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
        const auto& r = trace.rounds[i];
        out << r.t << "," << r.lambda << "," << gap.values[i] << "," << max_dist.values[i] << ","
            << (bad_grad.count(r.t) ? 0 : 1) << "," << (bad_est.count(r.t) ? 0 : 1) << ","
            << (bad_weight.count(r.t) ? 0 : 1) << "\n";
    }
}

void write_convergence_svg(const std::vector<MetricSeries>& series, const std::string& path) {
    const double width = 800, height = 480, margin = 60;
    const double floor_value = 1e-12;

    std::size_t n = 0;
    double vmax = floor_value;
    for (const auto& s : series) {
        n = std::max(n, s.values.size());
        for (double v : s.values) vmax = std::max(vmax, v);
    }
    const double log_lo = std::log10(floor_value);
    const double log_hi = std::log10(vmax * 1.5);

    auto x_of = [&](std::size_t i) {
        return margin + (width - 2 * margin) * (n > 1 ? static_cast<double>(i) / (n - 1) : 0.0);
    };
    auto y_of = [&](double v) {
        const double lv = std::log10(std::max(v, floor_value));
        return height - margin - (height - 2 * margin) * (lv - log_lo) / (log_hi - log_lo);
    };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    auto out = open_out(path);
    out.precision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
        << width - margin << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\" font-size=\"13\">iteration</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        if (s.values.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << colors[k % 4]
            << "\" stroke-width=\"1.2\" points=\"";
        // subsample long traces; the plot has fewer than 2 * width pixels
        const std::size_t stride = std::max<std::size_t>(1, s.values.size() / 1600);
        for (std::size_t i = 0; i < s.values.size(); i += stride)
            out << x_of(i) << "," << y_of(s.values[i]) << " ";
        out << x_of(s.values.size() - 1) << "," << y_of(s.values.back());
        out << "\"/>\n";
        out << "<text x=\"" << width - margin + 5 << "\" y=\"" << margin + 16 * (k + 1)
            << "\" font-size=\"12\" fill=\"" << colors[k % 4] << "\">" << s.name << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace ftopt
