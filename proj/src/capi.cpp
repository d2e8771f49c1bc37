#include "axy/axy.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>

#include "core/config.hpp"
#include "core/dynamics.hpp"
#include "core/io.hpp"
#include "core/modfunc.hpp"
#include "core/spectral.hpp"
#include "core/spin_bath.hpp"
#include "core/timing_solver.hpp"
#include "json.hpp"

struct axy_bath {
    axy::bath_model model;
};

struct axy_spectrum {
    axy::sensor_spectrum data;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
int guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return AXY_OK;
    } catch (const std::domain_error& e) {
        g_last_error = e.what();
        return AXY_ERR_INFEASIBLE;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return AXY_ERR_CONFIG;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return g_last_error.find("capacity") != std::string::npos
                   ? AXY_ERR_CAPACITY
                   : AXY_ERR_CONFIG;
    }
}

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

char* copy_text(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (!out) throw std::runtime_error("axy: out of memory");
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

const char* resolution_name(axy::spin_resolution r) {
    switch (r) {
        case axy::spin_resolution::resolved: return "resolved";
        case axy::spin_resolution::unresolved: return "unresolved";
        case axy::spin_resolution::overlapping: return "overlapping";
    }
    return "unknown";
}

}  // namespace

extern "C" {

int axy_last_error(char* buffer, int capacity) {
    if (buffer && capacity > 0) {
        const int n = int(g_last_error.size());
        const int take = n < capacity - 1 ? n : capacity - 1;
        std::memcpy(buffer, g_last_error.data(), size_t(take));
        buffer[take] = '\0';
    }
    return int(g_last_error.size());
}

void axy_free_text(char* text) { std::free(text); }

int axy_design_first_harmonic(double f1, double x_out[5]) {
    return guarded([&] {
        require(x_out != nullptr, "axy: x_out is null");
        const auto r = axy::solve_first_harmonic(f1);
        const auto t = axy::make_symmetric_timings(r.x1, r.x2);
        for (int i = 0; i < 5; ++i) x_out[i] = t.x[size_t(i)];
    });
}

int axy_design_third_harmonic(double f3, double x_out[5]) {
    return guarded([&] {
        require(x_out != nullptr, "axy: x_out is null");
        const auto r = axy::solve_third_harmonic(f3);
        const auto t = axy::make_symmetric_timings(r.x1, r.x2);
        for (int i = 0; i < 5; ++i) x_out[i] = t.x[size_t(i)];
    });
}

int axy_fourier_coefficients(const double x[5], int k_max, double* f_out) {
    return guarded([&] {
        require(x != nullptr && f_out != nullptr, "axy: null argument");
        require(k_max >= 1, "axy: k_max must be >= 1");
        axy::composite_timings t;
        t.symmetric = false;
        for (int i = 0; i < 5; ++i) t.x[size_t(i)] = x[i];
        axy::validate(t);
        for (int k = 1; k <= k_max; ++k)
            f_out[k - 1] = axy::fourier_coeff_numeric(t, k);
    });
}

int axy_bath_generate(unsigned long long seed, double radius_nm,
                      double abundance, double bz_gauss, axy_bath** out) {
    return guarded([&] {
        require(out != nullptr, "axy: out is null");
        auto bath = std::make_unique<axy_bath>();
        bath->model =
            axy::generate_lattice_bath(seed, radius_nm, abundance, bz_gauss);
        *out = bath.release();
    });
}

int axy_bath_load(const char* path, axy_bath** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "axy: null argument");
        auto bath = std::make_unique<axy_bath>();
        bath->model = axy::load_bath_file(path);
        *out = bath.release();
    });
}

int axy_bath_save(const axy_bath* bath, const char* path) {
    return guarded([&] {
        require(bath != nullptr && path != nullptr, "axy: null argument");
        axy::save_bath_file(bath->model, path);
    });
}

int axy_bath_count(const axy_bath* bath, int* out) {
    return guarded([&] {
        require(bath != nullptr && out != nullptr, "axy: null argument");
        *out = int(bath->model.spins.size());
    });
}

int axy_bath_info(const axy_bath* bath, double* bz_gauss, double* radius_nm,
                  double* abundance, unsigned long long* seed) {
    return guarded([&] {
        require(bath != nullptr, "axy: bath is null");
        if (bz_gauss) *bz_gauss = bath->model.b_z;
        if (radius_nm) *radius_nm = bath->model.radius_nm;
        if (abundance) *abundance = bath->model.abundance;
        if (seed) *seed = bath->model.seed;
    });
}

int axy_bath_spin(const axy_bath* bath, int index, double pos_nm[3],
                  double hyperfine_mhz[3]) {
    return guarded([&] {
        require(bath != nullptr, "axy: bath is null");
        require(index >= 0 && size_t(index) < bath->model.spins.size(),
                "axy: spin index out of range");
        const auto& s = bath->model.spins[size_t(index)];
        if (pos_nm)
            for (int i = 0; i < 3; ++i) pos_nm[i] = s.position[i];
        if (hyperfine_mhz)
            for (int i = 0; i < 3; ++i) hyperfine_mhz[i] = s.hyperfine_mhz[i];
    });
}

int axy_bath_cluster(axy_bath* bath, int max_size) {
    return guarded([&] {
        require(bath != nullptr, "axy: bath is null");
        axy::cluster_partition(bath->model, max_size);
    });
}

void axy_bath_free(axy_bath* bath) { delete bath; }

int axy_sweep_run(const char* config_text, const axy_bath* bath,
                  unsigned long long seed, int threads, axy_spectrum** out) {
    return guarded([&] {
        require(config_text != nullptr && out != nullptr,
                "axy: null argument");
        require(bath != nullptr, "axy: sweep needs a bath");
        require(threads >= 1, "axy: threads must be >= 1");
        const auto request =
            axy::parse_sweep_request(axy::parse_flat_config(config_text));
        auto spectrum = std::make_unique<axy_spectrum>();
        spectrum->data =
            axy::run_sweep_request(request, bath->model, seed, threads);
        *out = spectrum.release();
    });
}

int axy_spectrum_size(const axy_spectrum* spectrum, int* out) {
    return guarded([&] {
        require(spectrum != nullptr && out != nullptr, "axy: null argument");
        *out = int(spectrum->data.points.size());
    });
}

int axy_spectrum_point(const axy_spectrum* spectrum, int index,
                       double* freq_mhz, double* tau_us, double* probability) {
    return guarded([&] {
        require(spectrum != nullptr, "axy: spectrum is null");
        require(index >= 0 && size_t(index) < spectrum->data.points.size(),
                "axy: point index out of range");
        const auto& p = spectrum->data.points[size_t(index)];
        if (freq_mhz) *freq_mhz = p.freq_mhz;
        if (tau_us) *tau_us = p.tau_us;
        if (probability) *probability = p.probability;
    });
}

int axy_spectrum_csv(const axy_spectrum* spectrum, char** text_out) {
    return guarded([&] {
        require(spectrum != nullptr && text_out != nullptr,
                "axy: null argument");
        *text_out = copy_text(axy::spectrum_to_csv(spectrum->data));
    });
}

int axy_spectrum_manifest(const axy_spectrum* spectrum,
                          const char* config_text, unsigned long long seed,
                          char** json_out) {
    return guarded([&] {
        require(spectrum != nullptr && config_text != nullptr &&
                    json_out != nullptr,
                "axy: null argument");
        const auto config = axy::parse_flat_config(config_text);
        const std::string csv = axy::spectrum_to_csv(spectrum->data);
        *json_out = copy_text(axy::manifest_json(
            config.entries, seed, spectrum->data.schedule_descriptor,
            spectrum->data.points.size(), axy::content_hash(csv)));
    });
}

int axy_spectrum_load_csv(const char* path, axy_spectrum** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "axy: null argument");
        auto spectrum = std::make_unique<axy_spectrum>();
        spectrum->data = axy::load_spectrum_file(path);
        *out = spectrum.release();
    });
}

void axy_spectrum_free(axy_spectrum* spectrum) { delete spectrum; }

int axy_spectrum_deviation(const axy_spectrum* a, const axy_spectrum* b,
                           double fmin_mhz, double fmax_mhz, double* out) {
    return guarded([&] {
        require(a != nullptr && b != nullptr && out != nullptr,
                "axy: null argument");
        *out = fmin_mhz > fmax_mhz
                   ? axy::spectrum_deviation(a->data, b->data)
                   : axy::spectrum_deviation(a->data, b->data, fmin_mhz,
                                             fmax_mhz);
    });
}

int axy_detect_peaks(const axy_spectrum* spectrum, const axy_bath* bath,
                     int k_dd, int ms, double prominence, char** json_out) {
    return guarded([&] {
        require(spectrum != nullptr && bath != nullptr && json_out != nullptr,
                "axy: null argument");
        const auto report = axy::detect_peaks(spectrum->data, bath->model,
                                              k_dd, ms, prominence);
        nlohmann::json j;
        j["tolerance_mhz"] = report.tolerance_mhz;
        j["resolved"] = report.resolved;
        j["unresolved"] = report.unresolved;
        j["overlapping"] = report.overlapping;
        j["unassigned_dips"] = report.unassigned_dips;
        j["dips"] = nlohmann::json::array();
        for (const auto& dip : report.dips) {
            nlohmann::json d;
            d["index"] = dip.index;
            d["freq_mhz"] = dip.freq_mhz;
            d["depth"] = dip.depth;
            d["width_mhz"] = dip.width_mhz;
            d["overlapping"] = dip.overlapping;
            d["spin"] = dip.spin;
            d["distance_mhz"] = dip.distance_mhz;
            j["dips"].push_back(d);
        }
        j["spins"] = nlohmann::json::array();
        for (const auto& st : report.spins) {
            nlohmann::json s;
            s["spin"] = st.spin;
            s["predicted_mhz"] = st.predicted_mhz;
            s["state"] = resolution_name(st.state);
            j["spins"].push_back(s);
        }
        *json_out = copy_text(j.dump(2) + "\n");
    });
}

int axy_order_scaling(const char* config_text, char** json_out) {
    return guarded([&] {
        require(config_text != nullptr && json_out != nullptr,
                "axy: null argument");
        const auto request = axy::parse_order_scaling_request(
            axy::parse_flat_config(config_text));
        const auto result =
            axy::order_scaling_fit(request.kind, request.timings,
                                   request.tilde, request.eta_grid,
                                   request.options);
        nlohmann::json j;
        j["slope"] = result.slope;
        j["degenerate"] = result.degenerate;
        j["points"] = nlohmann::json::array();
        for (const auto& pt : result.points) {
            nlohmann::json p;
            p["eta"] = pt.eta;
            p["distance"] = pt.distance;
            j["points"].push_back(p);
        }
        *json_out = copy_text(j.dump(2) + "\n");
    });
}

int axy_schedule_dump(const char* config_text, char** csv_out) {
    return guarded([&] {
        require(config_text != nullptr && csv_out != nullptr,
                "axy: null argument");
        const auto request = axy::parse_schedule_request(
            axy::parse_flat_config(config_text));
        const auto schedule = axy::build_requested_schedule(request);
        char line[256];
        std::string text;
        std::snprintf(line, sizeof line,
                      "# %s tau_us=%.17g pulses=%zu total_us=%.17g\n",
                      schedule.description.c_str(), schedule.tau,
                      schedule.events.size(), schedule.total_time);
        text += line;
        text += "index,center_time_us,phase_rad,duration_us\n";
        for (size_t i = 0; i < schedule.events.size(); ++i) {
            const auto& e = schedule.events[i];
            std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", i,
                          e.center_time, e.phase, e.duration);
            text += line;
        }
        *csv_out = copy_text(text);
    });
}

}  // extern "C"
