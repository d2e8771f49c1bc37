// Command-line front end over the C library surface: sequence design,
// bath handling, resonance sweeps and the spectral/error analyses.
// Exit codes: 0 success, 2 config or usage error, 3 infeasible timing
// target, 4 simulation capacity exceeded.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "axy/axy.h"

namespace {

int fail_from_api(int code) {
    char buf[2048];
    axy_last_error(buf, sizeof buf);
    std::fprintf(stderr, "error: %s\n", buf);
    return code;
}

int fail_usage(const std::string& message) {
    std::fprintf(stderr, "error: %s\n", message.c_str());
    return 2;
}

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << text;
    return bool(out);
}

// stdout unless --out was given
int emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return 0;
    }
    if (!write_file(out_path, text))
        return fail_usage("cannot write " + out_path);
    return 0;
}

std::string take_text(char* text) {
    std::string out = text ? text : "";
    axy_free_text(text);
    return out;
}

struct globals {
    unsigned long long seed = 0;
    int threads = 1;
    std::string out;
};

int run_design(double f1, double f3, bool has_f1, bool has_f3, int kmax,
               const globals& g) {
    if (has_f1 == has_f3)
        return fail_usage("design needs exactly one of --f1 or --f3");
    double x[5];
    const int rc = has_f1 ? axy_design_first_harmonic(f1, x)
                          : axy_design_third_harmonic(f3, x);
    if (rc != AXY_OK) return fail_from_api(rc);

    std::vector<double> f(static_cast<size_t>(kmax));
    const int rc2 = axy_fourier_coefficients(x, kmax, f.data());
    if (rc2 != AXY_OK) return fail_from_api(rc2);

    std::ostringstream out;
    char line[128];
    for (int i = 0; i < 5; ++i) {
        std::snprintf(line, sizeof line, "timings.x%d = %.17g\n", i + 1, x[i]);
        out << line;
    }
    for (int k = 1; k <= kmax; ++k) {
        std::snprintf(line, sizeof line, "f%d = %.17g\n", k, f[size_t(k - 1)]);
        out << line;
    }
    return emit(out.str(), g.out);
}

int run_bath_gen(const std::string& config_path, const globals& g) {
    if (g.out.empty()) return fail_usage("bath gen needs --out FILE");
    double radius = 2.0, abundance = 0.011, bz = 200.0;
    if (!config_path.empty()) {
        // reuse the sweep-style key = value format for the three knobs
        std::string text;
        if (!read_file(config_path, text))
            return fail_usage("cannot read " + config_path);
        std::istringstream in(text);
        std::string linebuf;
        while (std::getline(in, linebuf)) {
            const size_t hash = linebuf.find('#');
            if (hash != std::string::npos) linebuf = linebuf.substr(0, hash);
            const size_t eq = linebuf.find('=');
            if (eq == std::string::npos) continue;
            std::istringstream key_in(linebuf.substr(0, eq));
            std::string key;
            key_in >> key;
            const std::string value = linebuf.substr(eq + 1);
            char* end = nullptr;
            const double v = std::strtod(value.c_str(), &end);
            if (key == "radius_nm") radius = v;
            else if (key == "abundance") abundance = v;
            else if (key == "bz_gauss") bz = v;
            else if (!key.empty())
                return fail_usage("unknown bath key '" + key + "'");
        }
    }
    axy_bath* bath = nullptr;
    int rc = axy_bath_generate(g.seed, radius, abundance, bz, &bath);
    if (rc != AXY_OK) return fail_from_api(rc);
    rc = axy_bath_save(bath, g.out.c_str());
    int count = 0;
    axy_bath_count(bath, &count);
    axy_bath_free(bath);
    if (rc != AXY_OK) return fail_from_api(rc);
    std::fprintf(stderr, "bath gen: %d spins -> %s\n", count, g.out.c_str());
    return 0;
}

int run_bath_inspect(const std::string& bath_path, const globals& g) {
    axy_bath* bath = nullptr;
    int rc = axy_bath_load(bath_path.c_str(), &bath);
    if (rc != AXY_OK) return fail_from_api(rc);
    int count = 0;
    double bz = 0, radius = 0, abundance = 0;
    unsigned long long seed = 0;
    axy_bath_count(bath, &count);
    axy_bath_info(bath, &bz, &radius, &abundance, &seed);

    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line,
                  "# %d spins, b_z = %g G, radius = %g nm, abundance = %g, "
                  "seed = %llu\n",
                  count, bz, radius, abundance, seed);
    out << line << "index,x_nm,y_nm,z_nm,Ax_MHz,Ay_MHz,Az_MHz\n";
    for (int i = 0; i < count; ++i) {
        double pos[3], a[3];
        rc = axy_bath_spin(bath, i, pos, a);
        if (rc != AXY_OK) {
            axy_bath_free(bath);
            return fail_from_api(rc);
        }
        std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      i, pos[0], pos[1], pos[2], a[0], a[1], a[2]);
        out << line;
    }
    axy_bath_free(bath);
    return emit(out.str(), g.out);
}

int run_sweep(const std::string& config_path, const std::string& bath_path,
              const globals& g) {
    std::string config;
    if (!read_file(config_path, config))
        return fail_usage("cannot read " + config_path);
    axy_bath* bath = nullptr;
    int rc = axy_bath_load(bath_path.c_str(), &bath);
    if (rc != AXY_OK) return fail_from_api(rc);

    const auto t0 = std::chrono::steady_clock::now();
    axy_spectrum* spectrum = nullptr;
    rc = axy_sweep_run(config.c_str(), bath, g.seed, g.threads, &spectrum);
    axy_bath_free(bath);
    if (rc != AXY_OK) return fail_from_api(rc);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    char* csv = nullptr;
    char* manifest = nullptr;
    rc = axy_spectrum_csv(spectrum, &csv);
    if (rc == AXY_OK)
        rc = axy_spectrum_manifest(spectrum, config.c_str(), g.seed, &manifest);
    int points = 0;
    axy_spectrum_size(spectrum, &points);
    axy_spectrum_free(spectrum);
    if (rc != AXY_OK) return fail_from_api(rc);

    const std::string dir = g.out.empty() ? "." : g.out;
    const std::string csv_path = dir + "/spectrum.csv";
    const std::string manifest_path = dir + "/manifest.json";
    if (!write_file(csv_path, take_text(csv)))
        return fail_usage("cannot write " + csv_path);
    if (!write_file(manifest_path, take_text(manifest)))
        return fail_usage("cannot write " + manifest_path);

    // timing goes to stderr so the files stay deterministic
    std::fprintf(stderr, "sweep: %d points in %.1f s -> %s\n", points, elapsed,
                 csv_path.c_str());
    return 0;
}

int run_deviation(const std::string& a_path, const std::string& b_path,
                  double fmin, double fmax, const globals& g) {
    axy_spectrum* a = nullptr;
    axy_spectrum* b = nullptr;
    int rc = axy_spectrum_load_csv(a_path.c_str(), &a);
    if (rc != AXY_OK) return fail_from_api(rc);
    rc = axy_spectrum_load_csv(b_path.c_str(), &b);
    if (rc != AXY_OK) {
        axy_spectrum_free(a);
        return fail_from_api(rc);
    }
    double dev = 0.0;
    rc = axy_spectrum_deviation(a, b, fmin, fmax, &dev);
    axy_spectrum_free(a);
    axy_spectrum_free(b);
    if (rc != AXY_OK) return fail_from_api(rc);
    char line[64];
    std::snprintf(line, sizeof line, "%.17g\n", dev);
    return emit(line, g.out);
}

int run_peaks(const std::string& csv_path, const std::string& bath_path,
              int k_dd, int ms, double prominence, const globals& g) {
    axy_spectrum* spectrum = nullptr;
    int rc = axy_spectrum_load_csv(csv_path.c_str(), &spectrum);
    if (rc != AXY_OK) return fail_from_api(rc);
    axy_bath* bath = nullptr;
    rc = axy_bath_load(bath_path.c_str(), &bath);
    if (rc != AXY_OK) {
        axy_spectrum_free(spectrum);
        return fail_from_api(rc);
    }
    char* json = nullptr;
    rc = axy_detect_peaks(spectrum, bath, k_dd, ms, prominence, &json);
    axy_spectrum_free(spectrum);
    axy_bath_free(bath);
    if (rc != AXY_OK) return fail_from_api(rc);
    return emit(take_text(json), g.out);
}

int run_order_scaling(const std::string& config_path, const globals& g) {
    std::string config;
    if (!read_file(config_path, config))
        return fail_usage("cannot read " + config_path);
    char* json = nullptr;
    const int rc = axy_order_scaling(config.c_str(), &json);
    if (rc != AXY_OK) return fail_from_api(rc);
    return emit(take_text(json), g.out);
}

int run_schedule_dump(const std::string& config_path, const globals& g) {
    std::string config;
    if (!read_file(config_path, config))
        return fail_usage("cannot read " + config_path);
    char* csv = nullptr;
    const int rc = axy_schedule_dump(config.c_str(), &csv);
    if (rc != AXY_OK) return fail_from_api(rc);
    return emit(take_text(csv), g.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-equally-spaced decoupling sequences and NV sensor sweeps"};
    app.require_subcommand(1);

    globals g;
    app.add_option("--seed", g.seed, "master seed for all randomness");
    app.add_option("--threads", g.threads, "worker threads for sweeps")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "output file (or directory for sweep)");

    auto* design = app.add_subcommand("design", "solve composite pulse timings");
    design->fallthrough();
    double f1 = 0.0, f3 = 0.0;
    int kmax = 10;
    auto* f1_opt = design->add_option("--f1", f1, "first-harmonic target");
    auto* f3_opt = design->add_option("--f3", f3, "third-harmonic target");
    design->add_option("--kmax", kmax, "coefficients to report")
        ->check(CLI::PositiveNumber);

    auto* bath = app.add_subcommand("bath", "nuclear spin bath files");
    bath->require_subcommand(1);
    auto* bath_gen = bath->add_subcommand("gen", "sample a bath to --out");
    bath_gen->fallthrough();
    std::string bath_gen_config;
    bath_gen->add_option("--config", bath_gen_config,
                         "radius_nm/abundance/bz_gauss overrides");
    auto* bath_inspect = bath->add_subcommand("inspect", "list bath spins");
    bath_inspect->fallthrough();
    std::string inspect_path;
    bath_inspect->add_option("--bath", inspect_path, "bath file")->required();

    auto* sweep = app.add_subcommand("sweep", "run a resonance sweep");
    sweep->fallthrough();
    std::string sweep_config, sweep_bath;
    sweep->add_option("--config", sweep_config, "sweep config file")->required();
    sweep->add_option("--bath", sweep_bath, "bath file")->required();

    auto* deviation =
        app.add_subcommand("deviation", "mean |dp| between two spectra");
    deviation->fallthrough();
    std::string dev_a, dev_b;
    double fmin = 1.0, fmax = -1.0;
    deviation->add_option("--a", dev_a, "first spectrum csv")->required();
    deviation->add_option("--b", dev_b, "second spectrum csv")->required();
    deviation->add_option("--fmin", fmin, "window start (MHz)");
    deviation->add_option("--fmax", fmax, "window stop (MHz)");

    auto* peaks = app.add_subcommand("peaks", "detect and assign dips");
    peaks->fallthrough();
    std::string peaks_csv, peaks_bath;
    int k_dd = 1, ms = 1;
    double prominence = 0.02;
    peaks->add_option("--csv", peaks_csv, "spectrum csv")->required();
    peaks->add_option("--bath", peaks_bath, "bath file")->required();
    peaks->add_option("--k", k_dd, "matched harmonic");
    peaks->add_option("--ms", ms, "NV branch (+1 or -1)");
    peaks->add_option("--prominence", prominence, "detection threshold");

    auto* order = app.add_subcommand("order-scaling",
                                     "fit the control-error scaling order");
    order->fallthrough();
    std::string order_config;
    order->add_option("--config", order_config, "analysis config file")
        ->required();

    auto* schedule = app.add_subcommand("schedule", "pulse schedules");
    schedule->require_subcommand(1);
    auto* schedule_dump =
        schedule->add_subcommand("dump", "print the pulse table");
    schedule_dump->fallthrough();
    std::string schedule_config;
    schedule_dump->add_option("--config", schedule_config, "schedule config")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (design->parsed())
        return run_design(f1, f3, f1_opt->count() > 0, f3_opt->count() > 0,
                          kmax, g);
    if (bath_gen->parsed()) return run_bath_gen(bath_gen_config, g);
    if (bath_inspect->parsed()) return run_bath_inspect(inspect_path, g);
    if (sweep->parsed()) return run_sweep(sweep_config, sweep_bath, g);
    if (deviation->parsed())
        return run_deviation(dev_a, dev_b, fmin, fmax, g);
    if (peaks->parsed())
        return run_peaks(peaks_csv, peaks_bath, k_dd, ms, prominence, g);
    if (order->parsed()) return run_order_scaling(order_config, g);
    if (schedule_dump->parsed()) return run_schedule_dump(schedule_config, g);
    return fail_usage("no subcommand");
}
