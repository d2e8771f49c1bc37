#pragma once

#include <map>
#include <string>

#include "core/dynamics.hpp"

namespace axy {

// CSV with header freq_MHz,tau_us,probability and 17 significant digits,
// enough for the parsed values to equal the originals bit for bit.
std::string spectrum_to_csv(const sensor_spectrum& spectrum);
sensor_spectrum spectrum_from_csv(const std::string& text);

void save_spectrum_file(const sensor_spectrum& spectrum,
                        const std::string& path);
sensor_spectrum load_spectrum_file(const std::string& path);

// FNV-1a over the raw bytes, as a 16-digit hex string.
std::string content_hash(const std::string& bytes);

// Deterministic run manifest: echoed config entries, seed, schedule
// descriptor, point count and the CSV content hash.  Ordered keys, no
// timestamps, so reruns produce identical bytes.
std::string manifest_json(const std::map<std::string, std::string>& config_echo,
                          unsigned long long seed,
                          const std::string& schedule_descriptor,
                          size_t points, const std::string& csv_hash);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace axy
