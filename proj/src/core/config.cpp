#include "core/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

#include "core/timing_solver.hpp"

namespace axy {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Tracks which keys a request consumed so leftovers can be reported as
// unknown instead of silently ignored.
class config_reader {
  public:
    explicit config_reader(const parsed_config& config) : config_(config) {}

    bool has(const std::string& key) {
        if (config_.entries.count(key)) {
            used_.insert(key);
            return true;
        }
        return false;
    }

    std::string get_string(const std::string& key) {
        auto it = config_.entries.find(key);
        if (it == config_.entries.end())
            throw std::invalid_argument("axy::config: missing required key '" +
                                        key + "'");
        used_.insert(key);
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) {
        return has(key) ? config_.entries.at(key) : fallback;
    }

    double get_double(const std::string& key) {
        return to_double(key, get_string(key));
    }

    double get_double(const std::string& key, double fallback) {
        return has(key) ? to_double(key, config_.entries.at(key)) : fallback;
    }

    int get_int(const std::string& key) { return to_int(key, get_string(key)); }

    int get_int(const std::string& key, int fallback) {
        return has(key) ? to_int(key, config_.entries.at(key)) : fallback;
    }

    bool get_bool(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const std::string v = config_.entries.at(key);
        if (v == "true") return true;
        if (v == "false") return false;
        throw std::invalid_argument("axy::config: key '" + key +
                                    "' expects true or false, got '" + v + "'");
    }

    void finish(const std::string& context) const {
        std::vector<std::string> unknown;
        for (const auto& [k, v] : config_.entries)
            if (!used_.count(k)) unknown.push_back(k);
        if (unknown.empty()) return;
        std::ostringstream msg;
        msg << "axy::config: unknown key";
        if (unknown.size() > 1) msg << 's';
        msg << " for " << context << ':';
        for (const auto& k : unknown) msg << " '" << k << '\'';
        throw std::invalid_argument(msg.str());
    }

  private:
    double to_double(const std::string& key, const std::string& v) const {
        char* end = nullptr;
        const double x = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0')
            throw std::invalid_argument("axy::config: key '" + key +
                                        "' expects a number, got '" + v + "'");
        return x;
    }

    int to_int(const std::string& key, const std::string& v) const {
        char* end = nullptr;
        const long x = std::strtol(v.c_str(), &end, 10);
        if (end == v.c_str() || *end != '\0')
            throw std::invalid_argument("axy::config: key '" + key +
                                        "' expects an integer, got '" + v +
                                        "'");
        return int(x);
    }

    const parsed_config& config_;
    std::set<std::string> used_;
};

sequence_kind parse_family_name(const std::string& name) {
    if (name == "axy4") return sequence_kind::axy4;
    if (name == "axy8") return sequence_kind::axy8;
    if (name == "xtilde4") return sequence_kind::xtilde4;
    if (name == "xtilde8") return sequence_kind::xtilde8;
    if (name == "cpmg") return sequence_kind::cpmg;
    throw std::invalid_argument(
        "axy::config: family must be axy4, axy8, xtilde4, xtilde8 or cpmg, "
        "got '" +
        name + "'");
}

phase_order parse_order_name(const std::string& name) {
    if (name == "xy") return phase_order::xyxyxyxy;
    if (name == "yx") return phase_order::xyxy_yxyx;
    throw std::invalid_argument("axy::config: order must be xy or yx, got '" +
                                name + "'");
}

dipolar_mode parse_dipolar_name(const std::string& name) {
    if (name == "full") return dipolar_mode::full;
    if (name == "secular") return dipolar_mode::secular;
    if (name == "off") return dipolar_mode::off;
    throw std::invalid_argument(
        "axy::config: dipolar must be full, secular or off, got '" + name +
        "'");
}

// One timing source: f1, f3 or the explicit pair.  CPMG carries no inner
// timings, so any of these keys is an error there.
composite_timings read_timings(config_reader& reader, bool is_cpmg) {
    const bool has_f1 = reader.has("f1");
    const bool has_f3 = reader.has("f3");
    const bool has_x = reader.has("timings.x1") || reader.has("timings.x2");
    if (is_cpmg) {
        if (has_f1 || has_f3 || has_x)
            throw std::invalid_argument(
                "axy::config: cpmg takes no timing keys (f1, f3, timings.*)");
        return equally_spaced_timings();
    }
    if (int(has_f1) + int(has_f3) + int(has_x) != 1)
        throw std::invalid_argument(
            "axy::config: give exactly one timing source: f1, f3, or "
            "timings.x1 + timings.x2");
    if (has_f1) {
        const auto r = solve_first_harmonic(reader.get_double("f1"));
        return make_symmetric_timings(r.x1, r.x2);
    }
    if (has_f3) {
        const auto r = solve_third_harmonic(reader.get_double("f3"));
        return make_symmetric_timings(r.x1, r.x2);
    }
    return make_symmetric_timings(reader.get_double("timings.x1"),
                                  reader.get_double("timings.x2"));
}

schedule_family read_family(config_reader& reader) {
    schedule_family family;
    family.kind = parse_family_name(reader.get_string("family"));
    const bool is_axy = family.kind == sequence_kind::axy4 ||
                        family.kind == sequence_kind::axy8;
    if (reader.has("order")) {
        if (!is_axy)
            throw std::invalid_argument(
                "axy::config: order only applies to the axy families");
        family.order = parse_order_name(reader.get_string("order"));
    }
    family.timings = read_timings(reader, family.kind == sequence_kind::cpmg);
    family.k_dd = reader.get_int("k_dd", 1);
    if (family.k_dd < 1)
        throw std::invalid_argument("axy::config: k_dd must be >= 1");
    return family;
}

void read_duration(config_reader& reader, schedule_family& family) {
    const bool has_repeats = reader.has("repeats");
    const bool has_total = reader.has("total_time_us");
    if (int(has_repeats) + int(has_total) != 1)
        throw std::invalid_argument(
            "axy::config: give exactly one of repeats or total_time_us");
    if (has_repeats) {
        family.repeats = reader.get_int("repeats");
        if (family.repeats < 1)
            throw std::invalid_argument("axy::config: repeats must be >= 1");
    } else {
        family.repeats = 0;
        family.total_time = reader.get_double("total_time_us");
        if (!(family.total_time > 0.0))
            throw std::invalid_argument(
                "axy::config: total_time_us must be positive");
    }
}

}  // namespace

parsed_config parse_flat_config(const std::string& text) {
    parsed_config config;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(
                "axy::parse_flat_config: expected key = value on line " +
                std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument(
                "axy::parse_flat_config: empty key or value on line " +
                std::to_string(lineno));
        if (!config.entries.emplace(key, value).second)
            throw std::invalid_argument(
                "axy::parse_flat_config: duplicate key '" + key + "'");
    }
    return config;
}

sweep_request parse_sweep_request(const parsed_config& config) {
    config_reader reader(config);
    sweep_request request;
    request.family = read_family(reader);
    read_duration(reader, request.family);

    const bool centered = reader.has("grid.center_spin");
    const bool explicit_grid =
        reader.has("grid.start_mhz") || reader.has("grid.stop_mhz");
    if (centered == explicit_grid)
        throw std::invalid_argument(
            "axy::config: give either grid.start_mhz + grid.stop_mhz or "
            "grid.center_spin + grid.halfwidth_mhz");
    request.points = reader.get_int("grid.points");
    if (request.points < 2)
        throw std::invalid_argument("axy::config: grid.points must be >= 2");
    if (centered) {
        request.centered = true;
        request.center_spin = reader.get_int("grid.center_spin");
        request.halfwidth_mhz = reader.get_double("grid.halfwidth_mhz");
        if (!(request.halfwidth_mhz > 0.0))
            throw std::invalid_argument(
                "axy::config: grid.halfwidth_mhz must be positive");
    } else {
        request.start_mhz = reader.get_double("grid.start_mhz");
        request.stop_mhz = reader.get_double("grid.stop_mhz");
    }

    request.sim.m_s = reader.get_int("ms", 1);
    request.sim.detuning_mhz = reader.get_double("pulse.detuning_mhz", 0.0);
    request.sim.amplitude_error = reader.get_double("pulse.amplitude_error", 0.0);
    request.sim.rabi = 2.0 * pi * reader.get_double("pulse.rabi_mhz", 40.0);
    const std::string mode = reader.get_string("pulse.mode", "instantaneous");
    if (mode == "instantaneous") {
        request.sim.mode = pulse_mode::instantaneous;
    } else if (mode == "finite") {
        request.sim.mode = pulse_mode::finite;
    } else {
        throw std::invalid_argument(
            "axy::config: pulse.mode must be instantaneous or finite, got '" +
            mode + "'");
    }
    request.sim.ou.enabled = reader.get_bool("noise.enabled", false);
    request.sim.ou.tau_mw = reader.get_double("noise.tau_mw_us", 1000.0);
    request.sim.ou.delta_omega = reader.get_double("noise.delta_omega", 7e-3);
    request.sim.dipolar =
        parse_dipolar_name(reader.get_string("dipolar", "full"));
    request.sim.integrator_substeps = reader.get_int("substeps", 4);
    request.sim.max_joint_dim = reader.get_int("max_joint_dim", 256);
    request.cluster_max = reader.get_int("cluster.max_size", 1);
    if (request.cluster_max < 1)
        throw std::invalid_argument(
            "axy::config: cluster.max_size must be >= 1");

    reader.finish("sweep");
    return request;
}

std::vector<double> resolve_grid(const sweep_request& request,
                                 const bath_model& bath) {
    if (!request.centered)
        return linear_grid(request.start_mhz, request.stop_mhz, request.points);
    if (request.center_spin < 0 ||
        size_t(request.center_spin) >= bath.spins.size())
        throw std::invalid_argument(
            "axy::resolve_grid: grid.center_spin is out of range");
    const spin_frame frame = effective_frame(bath.spins[size_t(request.center_spin)],
                                             bath.b_z, request.sim.m_s);
    const double center = frame.omega / (2.0 * pi);
    return linear_grid(center - request.halfwidth_mhz,
                       center + request.halfwidth_mhz, request.points);
}

sensor_spectrum run_sweep_request(const sweep_request& request,
                                  const bath_model& bath, std::uint64_t seed,
                                  int threads) {
    bath_model partitioned = bath;
    cluster_partition(partitioned, request.cluster_max);
    sweep_request resolved = request;
    resolved.sim.b_z = bath.b_z;
    return sweep(partitioned, resolved.family, resolve_grid(resolved, bath),
                 resolved.sim, seed, threads);
}

bath_request parse_bath_request(const parsed_config& config) {
    config_reader reader(config);
    bath_request request;
    request.radius_nm = reader.get_double("radius_nm", 2.0);
    request.abundance = reader.get_double("abundance", 0.011);
    request.bz_gauss = reader.get_double("bz_gauss", 200.0);
    reader.finish("bath generation");
    return request;
}

order_scaling_request parse_order_scaling_request(const parsed_config& config) {
    config_reader reader(config);
    order_scaling_request request;
    const std::string kind = reader.get_string("kind");
    if (kind == "x_delays") {
        request.kind = error_sequence::x_unequal_delays;
    } else if (kind == "x_nodelay") {
        request.kind = error_sequence::x_no_delay;
    } else if (kind == "axy4") {
        request.kind = error_sequence::axy4;
    } else if (kind == "axy8") {
        request.kind = error_sequence::axy8;
    } else {
        throw std::invalid_argument(
            "axy::config: kind must be x_delays, x_nodelay, axy4 or axy8, "
            "got '" +
            kind + "'");
    }
    request.timings = read_timings(reader, false);
    request.tilde.delta = reader.get_double("delta_tilde", 1.0);
    request.tilde.epsilon = reader.get_double("epsilon_tilde", 1.0);
    request.tilde.omega = 2.0 * pi * reader.get_double("rabi_mhz", 40.0);
    request.options.tau = reader.get_double("tau_us", 4.669);
    request.options.gap_phase = reader.get_double("gap_phase_rad", 4.0);
    request.options.order = parse_order_name(reader.get_string("order", "yx"));
    const double eta_min = reader.get_double("eta.min", 1e-3);
    const double eta_max = reader.get_double("eta.max", 1e-2);
    const int eta_points = reader.get_int("eta.points", 8);
    if (!(eta_min > 0.0) || !(eta_max > eta_min) || eta_points < 2)
        throw std::invalid_argument(
            "axy::config: eta grid needs 0 < eta.min < eta.max and "
            "eta.points >= 2");
    for (int i = 0; i < eta_points; ++i)
        request.eta_grid.push_back(
            eta_min * std::pow(eta_max / eta_min,
                               double(i) / double(eta_points - 1)));
    reader.finish("order scaling");
    return request;
}

schedule_request parse_schedule_request(const parsed_config& config) {
    config_reader reader(config);
    schedule_request request;
    request.family = read_family(reader);
    read_duration(reader, request.family);

    const bool has_tau = reader.has("tau_us");
    const bool has_freq = reader.has("freq_mhz");
    if (int(has_tau) + int(has_freq) != 1)
        throw std::invalid_argument(
            "axy::config: give exactly one of tau_us or freq_mhz");
    if (has_tau) {
        request.tau_us = reader.get_double("tau_us");
    } else {
        const double freq = reader.get_double("freq_mhz");
        if (!(freq > 0.0))
            throw std::invalid_argument(
                "axy::config: freq_mhz must be positive");
        request.tau_us = double(request.family.k_dd) / freq;
    }
    if (!(request.tau_us > 0.0))
        throw std::invalid_argument("axy::config: tau_us must be positive");

    const std::string mode = reader.get_string("pulse.mode", "instantaneous");
    if (mode == "instantaneous") {
        request.mode = pulse_mode::instantaneous;
    } else if (mode == "finite") {
        request.mode = pulse_mode::finite;
    } else {
        throw std::invalid_argument(
            "axy::config: pulse.mode must be instantaneous or finite, got '" +
            mode + "'");
    }
    request.rabi = 2.0 * pi * reader.get_double("pulse.rabi_mhz", 40.0);
    reader.finish("schedule dump");
    return request;
}

pulse_schedule build_requested_schedule(const schedule_request& request) {
    pulse_schedule schedule =
        build_family_schedule(request.family, request.tau_us);
    if (request.mode == pulse_mode::finite)
        schedule = apply_finite_width(schedule, request.rabi);
    return schedule;
}

}  // namespace axy
