#include "ftopt/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace ftopt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

const json& require(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.is_object() || !j.contains(key)) fail("missing field '" + key + "' in " + ctx);
    return j.at(key);
}

double num(const json& j, const std::string& key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_number()) fail("field '" + key + "' in " + ctx + " must be a number");
    return v.get<double>();
}

int integer(const json& j, const std::string& key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_number_integer()) fail("field '" + key + "' in " + ctx + " must be an integer");
    return v.get<int>();
}

std::string str(const json& j, const std::string& key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_string()) fail("field '" + key + "' in " + ctx + " must be a string");
    return v.get<std::string>();
}

// ---- TOML subset parsing -------------------------------------------------

struct TomlParser {
    std::string s;
    std::size_t pos = 0;

    explicit TomlParser(std::string text) : s(std::move(text)) {}

    void skip_ws_inline() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }

    bool at_eol() const { return pos >= s.size() || s[pos] == '\n' || s[pos] == '#'; }

    void skip_to_next_line() {
        while (pos < s.size() && s[pos] != '\n') ++pos;
        if (pos < s.size()) ++pos;
    }

    std::string parse_key() {
        skip_ws_inline();
        std::size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_' || s[pos] == '-'))
            ++pos;
        if (pos == start) fail("TOML: expected key at offset " + std::to_string(pos));
        return s.substr(start, pos - start);
    }

    json parse_value() {
        skip_ws_inline();
        if (pos >= s.size()) fail("TOML: expected value");
        const char c = s[pos];
        if (c == '"') return parse_string();
        if (c == '[') return parse_array();
        if (c == '{') return parse_inline_table();
        if (s.compare(pos, 4, "true") == 0) {
            pos += 4;
            return true;
        }
        if (s.compare(pos, 5, "false") == 0) {
            pos += 5;
            return false;
        }
        return parse_number();
    }

    json parse_string() {
        ++pos;  // opening quote
        std::string out;
        while (pos < s.size() && s[pos] != '"') {
            if (s[pos] == '\\' && pos + 1 < s.size()) {
                ++pos;
                switch (s[pos]) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    default: out += s[pos];
                }
            } else {
                out += s[pos];
            }
            ++pos;
        }
        if (pos >= s.size()) fail("TOML: unterminated string");
        ++pos;
        return out;
    }

    json parse_number() {
        std::size_t start = pos;
        while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) ||
                                  s[pos] == '+' || s[pos] == '-' || s[pos] == '.' ||
                                  s[pos] == 'e' || s[pos] == 'E' || s[pos] == '_'))
            ++pos;
        std::string tok = s.substr(start, pos - start);
        std::erase(tok, '_');
        if (tok.empty()) fail("TOML: expected number at offset " + std::to_string(start));
        if (tok.find_first_of(".eE") == std::string::npos) {
            try {
                return std::stoll(tok);
            } catch (...) {
                fail("TOML: bad integer '" + tok + "'");
            }
        }
        try {
            return std::stod(tok);
        } catch (...) {
            fail("TOML: bad number '" + tok + "'");
        }
    }

    json parse_array() {
        ++pos;  // '['
        json arr = json::array();
        for (;;) {
            skip_ws_and_newlines();
            if (pos < s.size() && s[pos] == ']') {
                ++pos;
                return arr;
            }
            arr.push_back(parse_value());
            skip_ws_and_newlines();
            if (pos < s.size() && s[pos] == ',') {
                ++pos;
                continue;
            }
            if (pos < s.size() && s[pos] == ']') {
                ++pos;
                return arr;
            }
            fail("TOML: expected ',' or ']' in array");
        }
    }

    json parse_inline_table() {
        ++pos;  // '{'
        json obj = json::object();
        skip_ws_inline();
        if (pos < s.size() && s[pos] == '}') {
            ++pos;
            return obj;
        }
        for (;;) {
            std::string key = parse_key();
            skip_ws_inline();
            if (pos >= s.size() || s[pos] != '=') fail("TOML: expected '=' in inline table");
            ++pos;
            obj[key] = parse_value();
            skip_ws_inline();
            if (pos < s.size() && s[pos] == ',') {
                ++pos;
                skip_ws_inline();
                continue;
            }
            if (pos < s.size() && s[pos] == '}') {
                ++pos;
                return obj;
            }
            fail("TOML: expected ',' or '}' in inline table");
        }
    }

    void skip_ws_and_newlines() {
        while (pos < s.size()) {
            if (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n' || s[pos] == '\r') {
                ++pos;
            } else if (s[pos] == '#') {
                skip_to_next_line();
            } else {
                break;
            }
        }
    }

    std::vector<std::string> parse_table_path() {
        std::vector<std::string> path;
        path.push_back(parse_key());
        while (pos < s.size() && s[pos] == '.') {
            ++pos;
            path.push_back(parse_key());
        }
        return path;
    }
};

json* descend(json& root, const std::vector<std::string>& path, std::size_t upto) {
    json* cur = &root;
    for (std::size_t i = 0; i < upto; ++i) {
        json& next = (*cur)[path[i]];
        if (next.is_array()) {
            if (next.empty()) fail("TOML: dotted path through empty array");
            cur = &next.back();
        } else {
            if (next.is_null()) next = json::object();
            cur = &next;
        }
    }
    return cur;
}

}  // namespace

json toml_to_json(const std::string& text) {
    TomlParser p(text);
    json root = json::object();
    json* current = &root;

    while (p.pos < p.s.size()) {
        p.skip_ws_inline();
        if (p.at_eol()) {
            p.skip_to_next_line();
            continue;
        }
        if (p.s[p.pos] == '[') {
            const bool array_table = p.pos + 1 < p.s.size() && p.s[p.pos + 1] == '[';
            p.pos += array_table ? 2 : 1;
            auto path = p.parse_table_path();
            if (p.pos >= p.s.size() || p.s[p.pos] != ']') fail("TOML: expected ']'");
            p.pos += 1;
            if (array_table) {
                if (p.pos >= p.s.size() || p.s[p.pos] != ']') fail("TOML: expected ']]'");
                p.pos += 1;
            }
            json* parent = descend(root, path, path.size() - 1);
            json& slot = (*parent)[path.back()];
            if (array_table) {
                if (slot.is_null()) slot = json::array();
                slot.push_back(json::object());
                current = &slot.back();
            } else {
                if (slot.is_null()) slot = json::object();
                current = &slot;
            }
            p.skip_to_next_line();
            continue;
        }
        std::string key = p.parse_key();
        p.skip_ws_inline();
        if (p.pos >= p.s.size() || p.s[p.pos] != '=') fail("TOML: expected '=' after key " + key);
        ++p.pos;
        (*current)[key] = p.parse_value();
        p.skip_to_next_line();
    }
    return root;
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    const bool looks_toml = path.size() > 5 && path.substr(path.size() - 5) == ".toml";
    if (looks_toml) return toml_to_json(text);
    // JSON unless the first non-space char says otherwise
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') {
            try {
                return json::parse(text);
            } catch (const json::parse_error& e) {
                fail(std::string("JSON parse error: ") + e.what());
            }
        }
        break;
    }
    return toml_to_json(text);
}

AdmissibleFunction function_from_json(const json& j) {
    const std::string kind = str(j, "kind", "function");
    if (kind == "huber")
        return AdmissibleFunction::huber(num(j, "center", "huber"), num(j, "curvature", "huber"),
                                         num(j, "cap", "huber"));
    if (kind == "smooth_abs")
        return AdmissibleFunction::smooth_abs(num(j, "center", "smooth_abs"),
                                              num(j, "softness", "smooth_abs"),
                                              num(j, "scale", "smooth_abs"));
    if (kind == "scaled_sum") {
        const json& terms = require(j, "terms", "scaled_sum");
        if (!terms.is_array()) fail("scaled_sum terms must be an array");
        std::vector<std::pair<double, AdmissibleFunction>> out;
        for (const auto& t : terms)
            out.emplace_back(num(t, "weight", "scaled_sum term"),
                             function_from_json(require(t, "function", "scaled_sum term")));
        return AdmissibleFunction::scaled_sum(std::move(out));
    }
    fail("unknown function kind '" + kind + "'");
}

json function_to_json(const AdmissibleFunction& f) {
    json j;
    switch (f.kind()) {
        case AdmissibleFunction::Kind::huber:
            j = {{"kind", "huber"}, {"center", f.center()}, {"curvature", f.curvature()},
                 {"cap", f.cap()}};
            break;
        case AdmissibleFunction::Kind::smooth_abs:
            j = {{"kind", "smooth_abs"}, {"center", f.center()}, {"softness", f.softness()},
                 {"scale", f.scale()}};
            break;
        case AdmissibleFunction::Kind::scaled_sum: {
            j["kind"] = "scaled_sum";
            j["terms"] = json::array();
            for (const auto& [w, g] : f.terms())
                j["terms"].push_back({{"weight", w}, {"function", function_to_json(g)}});
            break;
        }
    }
    return j;
}

namespace {

ByzantineStrategy strategy_from_json(const json& j) {
    ByzantineStrategy s;
    const std::string kind = str(j, "strategy", "adversary");
    if (kind == "constant") {
        s.kind = ByzantineStrategy::Kind::constant;
        s.w = num(j, "w", "adversary");
        s.g = num(j, "g", "adversary");
    } else if (kind == "random_uniform") {
        s.kind = ByzantineStrategy::Kind::random_uniform;
        s.w_lo = num(j, "w_lo", "adversary");
        s.w_hi = num(j, "w_hi", "adversary");
        s.g_lo = num(j, "g_lo", "adversary");
        s.g_hi = num(j, "g_hi", "adversary");
    } else if (kind == "opposite_extreme") {
        s.kind = ByzantineStrategy::Kind::opposite_extreme;
        s.offset = j.contains("offset") ? num(j, "offset", "adversary") : 10.0;
    } else if (kind == "collude_shift") {
        s.kind = ByzantineStrategy::Kind::collude_shift;
        s.target = num(j, "target", "adversary");
    } else if (kind == "silent") {
        s.kind = ByzantineStrategy::Kind::silent;
    } else if (kind == "mimic") {
        s.kind = ByzantineStrategy::Kind::mimic;
        s.victim = integer(j, "victim", "adversary");
    } else {
        fail("unknown adversary strategy '" + kind + "'");
    }
    return s;
}

CrashPhase phase_from_string(const std::string& p) {
    if (p == "before_send") return CrashPhase::before_send;
    if (p == "mid_send") return CrashPhase::mid_send;
    if (p == "after_step3_before_step4") return CrashPhase::after_step3_before_step4;
    fail("unknown crash phase '" + p + "'");
}

CrashSchedule crash_schedule_from_json(const json& j, const std::vector<int>& faulty_ids,
                                       std::uint64_t seed, int max_iters) {
    CrashScheduleSpec spec;
    const std::string kind = str(j, "kind", "crash_schedule");
    if (kind == "none") {
        spec.kind = CrashScheduleSpec::Kind::none;
    } else if (kind == "at_iterations") {
        spec.kind = CrashScheduleSpec::Kind::at_iterations;
        const json& events = require(j, "events", "crash_schedule");
        if (!events.is_array()) fail("crash_schedule events must be an array");
        for (const auto& e : events) {
            CrashEvent ev;
            ev.agent = integer(e, "agent", "crash event");
            ev.iteration = integer(e, "iteration", "crash event");
            ev.phase = phase_from_string(str(e, "phase", "crash event"));
            if (e.contains("recipients"))
                for (const auto& r : e.at("recipients")) ev.recipients.push_back(r.get<int>());
            spec.events.push_back(std::move(ev));
        }
    } else if (kind == "random") {
        spec.kind = CrashScheduleSpec::Kind::random;
        spec.prob = num(j, "prob", "crash_schedule");
        spec.horizon = j.contains("horizon") ? integer(j, "horizon", "crash_schedule") : max_iters;
    } else {
        fail("unknown crash_schedule kind '" + kind + "'");
    }
    std::mt19937_64 rng(split_seed(seed, 0xc5a54ULL, 0, 0));
    return generate_crash_schedule(spec, faulty_ids, rng);
}

StepSchedule schedule_from_json(const json& j) {
    const std::string kind = str(j, "kind", "schedule");
    if (kind == "harmonic") return StepSchedule::harmonic(num(j, "scale", "schedule"));
    if (kind == "power")
        return StepSchedule::power(num(j, "scale", "schedule"), num(j, "exponent", "schedule"));
    fail("unknown schedule kind '" + kind + "'");
}

DelayModel delay_from_json(const json& j) {
    DelayModel d;
    const std::string kind = str(j, "kind", "delay_model");
    if (kind == "uniform_int") {
        d.kind = DelayModel::Kind::uniform_int;
        d.lo = integer(j, "lo", "delay_model");
        d.hi = integer(j, "hi", "delay_model");
    } else if (kind == "fixed") {
        d.kind = DelayModel::Kind::fixed;
        const json& m = require(j, "per_agent", "delay_model");
        for (auto it = m.begin(); it != m.end(); ++it)
            d.per_agent[std::stoi(it.key())] = it.value().get<int>();
    } else if (kind == "adversarial_slowest") {
        d.kind = DelayModel::Kind::adversarial_slowest;
        const json& a = require(j, "agents", "delay_model");
        for (const auto& v : a) d.slow_agents.push_back(v.get<int>());
    } else {
        fail("unknown delay_model kind '" + kind + "'");
    }
    return d;
}

Protocol protocol_from_string(const std::string& p) {
    if (p == "alg1") return Protocol::alg1;
    if (p == "alg2") return Protocol::alg2;
    if (p == "alg3") return Protocol::alg3;
    if (p == "alg4") return Protocol::alg4;
    fail("unknown protocol '" + p + "'");
}

}  // namespace

ScenarioConfig parse_scenario(const json& j) {
    ScenarioConfig cfg;
    cfg.n = integer(j, "n", "scenario");
    cfg.f = integer(j, "f", "scenario");
    cfg.protocol = protocol_from_string(str(j, "protocol", "scenario"));
    cfg.max_iters = integer(j, "max_iters", "scenario");
    cfg.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 0;

    const json& fns = require(j, "functions", "scenario");
    if (!fns.is_array()) fail("functions must be an array");
    for (const auto& fj : fns) cfg.functions.push_back(function_from_json(fj));

    const json& inits = require(j, "init_estimates", "scenario");
    if (!inits.is_array()) fail("init_estimates must be an array");
    for (const auto& v : inits) cfg.init_estimates.push_back(v.get<double>());

    if (j.contains("faulty_ids"))
        for (const auto& v : j.at("faulty_ids")) cfg.faulty_ids.push_back(v.get<int>());

    cfg.schedule = schedule_from_json(require(j, "schedule", "scenario"));

    if (j.contains("adversary")) {
        cfg.adversary = strategy_from_json(j.at("adversary"));
        cfg.has_adversary = true;
    }
    if (j.contains("crash_schedule"))
        cfg.crash_schedule =
            crash_schedule_from_json(j.at("crash_schedule"), cfg.faulty_ids, cfg.seed,
                                     cfg.max_iters);
    if (j.contains("delay_model")) {
        cfg.delay = delay_from_json(j.at("delay_model"));
        cfg.has_delay = true;
    }
    if (j.contains("record_messages")) cfg.record_messages = j.at("record_messages").get<bool>();

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        fail(std::string("invalid scenario: ") + e.what());
    }
    return cfg;
}

}  // namespace ftopt
