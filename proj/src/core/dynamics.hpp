#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/constants.hpp"
#include "core/sequence_builder.hpp"
#include "core/spin_bath.hpp"

namespace axy {

// Ornstein-Uhlenbeck drive-amplitude noise.  The stationary standard
// deviation of the fluctuation is delta_omega * Omega.
struct ou_params {
    bool enabled = false;
    double tau_mw = 1000.0;      // correlation time, us
    double delta_omega = 7e-3;   // relative amplitude fluctuation
    std::uint64_t seed = 0;
};

// diffusion constant c = 2 (delta_omega * Omega)^2 / tau_mw
double ou_diffusion(const ou_params& params, double omega);

// Exact-update OU integrator:
//   x(t+dt) = x(t) e^{-dt/tau} + n sqrt((c tau / 2)(1 - e^{-2 dt/tau}))
// with the initial value drawn from the stationary distribution.
class ou_process {
  public:
    ou_process(const ou_params& params, double omega, std::uint64_t seed);
    double value() const { return x_; }
    void advance(double dt);

  private:
    double tau_;
    double sigma_;   // stationary standard deviation
    double x_;
    std::mt19937_64 gen_;
};

// Samples of the process at the given times (strictly increasing, first
// sample stationary).
std::vector<double> ou_trajectory(const ou_params& params, double omega,
                                  const std::vector<double>& times);

enum class pulse_mode { instantaneous, finite };

struct simulation_config {
    double b_z = 200.0;                      // G
    int m_s = 1;                             // NV branch, +1 or -1
    pulse_mode mode = pulse_mode::instantaneous;
    double detuning_mhz = 0.0;               // drive detuning Delta / 2pi
    double amplitude_error = 0.0;            // relative Rabi mismatch delta
    double rabi = 2.0 * pi * 40.0;           // nominal Omega, rad/us
    ou_params ou;
    int integrator_substeps = 4;             // per pulse when OU noise is on
    dipolar_mode dipolar = dipolar_mode::full;
    int max_joint_dim = 256;                 // NV (x) cluster Hilbert-space cap
};

// Throws std::invalid_argument when a field violates its constraints.
void validate_config(const simulation_config& config);

// Conditional branch coherence for instantaneous pulses: propagate the
// cluster under the NV-in-|0> Hamiltonian H0 = -sum gamma_j B_z I_z + H_dd
// and the NV-in-|m_s> Hamiltonian H1 = H0 + m_s sum A_j . I_j, swapping the
// branch at every pulse, and return L = Tr[W1^dag W0] / 2^m.  Pulse phases
// do not enter (see pulse_phase_factor).  Requires zero durations and an
// even pulse count.
std::complex<double> conditional_coherence(const pulse_schedule& schedule,
                                           const bath_model& bath,
                                           const std::vector<int>& cluster,
                                           const simulation_config& config);

// Global NV phase factor e^{-2i chi}, chi = sum_k (-1)^k phase_k, picked up
// by the x-basis transition amplitude across an even number of pi pulses.
// Multiplies the product of cluster coherences exactly once.
std::complex<double> pulse_phase_factor(const pulse_schedule& schedule);

// L_total = prod_c L_c over disjoint clusters.
std::complex<double> combine_clusters(const std::vector<std::complex<double>>& ls);

// p = (1 - Re L) / 2, clamped to [0, 1]; values outside by more than 1e-9
// indicate a propagation bug and are reported on stderr before clamping.
double transition_probability(std::complex<double> l);

// Full conditional pipeline over all clusters of the bath (instantaneous
// schedules): p for the |x+> -> |x-> transition.
double conditional_probability(const pulse_schedule& schedule,
                               const bath_model& bath,
                               const simulation_config& config);

// Joint NV (x) cluster evolution for finite-width pulses in the drive
// rotating frame:
//   H = Delta sigma_z/2 + Omega(t) sigma_phi/2
//       + m_s [(sigma_z+1)/2] sum A_j . I_j - sum gamma_j B_z I_z + H_dd
// with Omega(t) = Omega (1 + delta) + OU(t) during pulses and 0 between.
// Returns p for |x+> prepared, |x-> read, bath maximally mixed.
double evolve_full(const pulse_schedule& schedule, const bath_model& bath,
                   const std::vector<int>& cluster,
                   const simulation_config& config,
                   std::uint64_t noise_seed);

// Resonant effective-model prediction for one weakly coupled spin:
// p(T) = [1 - cos(m_s f_kdd |a_perp| T / 4)] / 2.
double effective_prediction(double f_kdd, double a_perp_norm, int m_s, double t);

// ---- frequency sweeps ----

enum class sequence_kind { axy4, axy8, xtilde4, xtilde8, cpmg };

// How to rebuild the schedule at each sweep frequency nu (MHz): the period
// is tau = k_dd / nu so that the k_dd-th modulation harmonic sits at nu.
// Fixed repeats hold the pulse count constant across the sweep; with
// repeats = 0 the schedule instead fills total_time with whole units
// (super-periods for AXY/X-tilde, periods for CPMG).
struct schedule_family {
    sequence_kind kind = sequence_kind::axy8;
    composite_timings timings = equally_spaced_timings();
    phase_order order = phase_order::xyxyxyxy;
    int k_dd = 1;
    int repeats = 0;         // super-periods (AXY/X-tilde) or periods (CPMG)
    double total_time = 0.0; // us, used when repeats == 0
};

pulse_schedule build_family_schedule(const schedule_family& family, double tau);
std::string family_label(const schedule_family& family);

struct spectrum_point {
    double freq_mhz = 0.0;      // matched frequency k_dd * omega_dd / 2pi
    double tau_us = 0.0;
    double probability = 0.0;
};

struct sensor_spectrum {
    std::vector<spectrum_point> points;
    std::string schedule_descriptor;
    std::uint64_t seed = 0;
};

std::vector<double> linear_grid(double start, double stop, int points);

// Evaluate the configured engine at every grid frequency (MHz, strictly
// increasing).  Each point derives its own noise seed from (seed, index),
// so results are byte-identical for any thread count.
sensor_spectrum sweep(const bath_model& bath, const schedule_family& family,
                      const std::vector<double>& freq_grid_mhz,
                      const simulation_config& config, std::uint64_t seed,
                      int threads = 1);

}  // namespace axy
