#include "core/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "core/rng.hpp"
#include "json.hpp"

namespace axy {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& field, size_t line) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0')
        throw std::runtime_error("axy::spectrum_from_csv: bad number '" +
                                 field + "' on line " + std::to_string(line));
    return v;
}

}  // namespace

std::string spectrum_to_csv(const sensor_spectrum& spectrum) {
    std::ostringstream out;
    out << "freq_MHz,tau_us,probability\n";
    for (const auto& p : spectrum.points)
        out << fmt17(p.freq_mhz) << ',' << fmt17(p.tau_us) << ','
            << fmt17(p.probability) << '\n';
    return out.str();
}

sensor_spectrum spectrum_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "freq_MHz,tau_us,probability")
        throw std::runtime_error(
            "axy::spectrum_from_csv: missing freq_MHz,tau_us,probability header");
    sensor_spectrum spectrum;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b, c;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') ||
            !std::getline(row, c))
            throw std::runtime_error(
                "axy::spectrum_from_csv: expected three columns on line " +
                std::to_string(lineno));
        spectrum_point p;
        p.freq_mhz = parse_double(a, lineno);
        p.tau_us = parse_double(b, lineno);
        p.probability = parse_double(c, lineno);
        spectrum.points.push_back(p);
    }
    return spectrum;
}

void save_spectrum_file(const sensor_spectrum& spectrum,
                        const std::string& path) {
    write_text_file(path, spectrum_to_csv(spectrum));
}

sensor_spectrum load_spectrum_file(const std::string& path) {
    return spectrum_from_csv(read_text_file(path));
}

std::string content_hash(const std::string& bytes) {
    const std::uint64_t h = fnv1a(bytes);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

std::string manifest_json(const std::map<std::string, std::string>& config_echo,
                          unsigned long long seed,
                          const std::string& schedule_descriptor,
                          size_t points, const std::string& csv_hash) {
    nlohmann::json j;
    j["config"] = nlohmann::json::object();
    for (const auto& [k, v] : config_echo) j["config"][k] = v;
    j["seed"] = seed;
    j["schedule"] = schedule_descriptor;
    j["points"] = points;
    j["csv_fnv1a"] = csv_hash;
    return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("axy::read_text_file: cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("axy::write_text_file: cannot open " + path);
    out << text;
    if (!out)
        throw std::runtime_error("axy::write_text_file: write failed for " +
                                 path);
}

}  // namespace axy
