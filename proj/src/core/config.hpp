#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "core/dynamics.hpp"
#include "core/error_analysis.hpp"
#include "core/spin_bath.hpp"

namespace axy {

// Flat key = value text, one entry per line, # comments, no sections.
// Duplicate keys are rejected; every consumer below rejects keys it does
// not know so config typos surface instead of silently using defaults.
struct parsed_config {
    std::map<std::string, std::string> entries;
};

parsed_config parse_flat_config(const std::string& text);

// ---- sweep ----------------------------------------------------------------

struct sweep_request {
    schedule_family family;
    simulation_config sim;
    int cluster_max = 1;         // bath re-partitioned before the run
    bool centered = false;       // grid given as center-on-spin shorthand
    int center_spin = 0;
    double halfwidth_mhz = 0.0;
    double start_mhz = 0.0;
    double stop_mhz = 0.0;
    int points = 0;
};

// Schema: family (axy4|axy8|xtilde4|xtilde8|cpmg), order (xy|yx),
// f1 | f3 | timings.x1 + timings.x2 (one timing source; cpmg takes none),
// k_dd, repeats | total_time_us, grid.start_mhz + grid.stop_mhz +
// grid.points | grid.center_spin + grid.halfwidth_mhz + grid.points, ms,
// dipolar (full|secular|off), cluster.max_size, pulse.mode
// (instantaneous|finite), pulse.rabi_mhz, pulse.detuning_mhz,
// pulse.amplitude_error, noise.enabled, noise.tau_mw_us, noise.delta_omega,
// substeps, max_joint_dim.
sweep_request parse_sweep_request(const parsed_config& config);

std::vector<double> resolve_grid(const sweep_request& request,
                                 const bath_model& bath);

// Re-partitions a copy of the bath to the requested cluster cap, resolves
// the grid and runs the sweep.
sensor_spectrum run_sweep_request(const sweep_request& request,
                                  const bath_model& bath, std::uint64_t seed,
                                  int threads);

// ---- bath generation ------------------------------------------------------

struct bath_request {
    double radius_nm = 2.0;
    double abundance = 0.011;
    double bz_gauss = 200.0;
};

// Schema: radius_nm, abundance, bz_gauss.
bath_request parse_bath_request(const parsed_config& config);

// ---- order scaling --------------------------------------------------------

struct order_scaling_request {
    error_sequence kind = error_sequence::axy8;
    composite_timings timings;
    error_params tilde;          // delta/epsilon tilde, omega from rabi_mhz
    order_scaling_options options;
    std::vector<double> eta_grid;
};

// Schema: kind (x_delays|x_nodelay|axy4|axy8), timing source as for sweep,
// tau_us, gap_phase_rad, order (xy|yx), delta_tilde, epsilon_tilde,
// rabi_mhz, eta.min, eta.max, eta.points.
order_scaling_request parse_order_scaling_request(const parsed_config& config);

// ---- schedule dump --------------------------------------------------------

struct schedule_request {
    schedule_family family;
    double tau_us = 0.0;         // direct period, or derived from freq_mhz
    pulse_mode mode = pulse_mode::instantaneous;
    double rabi = 2.0 * pi * 40.0;
};

// Schema: family keys as for sweep plus tau_us | freq_mhz (tau = k_dd/freq),
// pulse.mode, pulse.rabi_mhz.
schedule_request parse_schedule_request(const parsed_config& config);

pulse_schedule build_requested_schedule(const schedule_request& request);

}  // namespace axy
