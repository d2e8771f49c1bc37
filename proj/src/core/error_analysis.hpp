#pragma once

#include <vector>

#include <Eigen/Dense>

#include "core/constants.hpp"
#include "core/modfunc.hpp"
#include "core/sequence_builder.hpp"

namespace axy {

// Static drive errors for the two-level pulse algebra: relative amplitude
// mismatch delta and relative detuning epsilon = Delta/Omega.  Scale sweeps
// set delta = eta * delta_tilde, epsilon = eta * epsilon_tilde.
struct error_params {
    double delta = 0.0;
    double epsilon = 0.0;
    double omega = 2.0 * pi * 40.0;   // rad/us
};

// Exact propagator of one imperfect pi rotation about the transverse axis
// phi: exp(-i t_p H) with H = epsilon Omega sigma_z/2 + Omega sigma_phi/2
// and t_p = (pi - 2 delta)/Omega (the amplitude mismatch as an
// under-rotation by 2 delta).
Eigen::Matrix2cd imperfect_rotation(double phi, const error_params& params);

// Second-order expansion of the same propagator:
//   -i (1 - (delta^2 + epsilon^2)/2) sigma_phi - i epsilon sigma_z
//   + (delta - epsilon^2 pi/4) * identity
Eigen::Matrix2cd imperfect_rotation_expansion(double phi,
                                              const error_params& params);

// Free evolution accumulating detuning phase: exp(-i delta_gap sigma_z t/2).
Eigen::Matrix2cd gap_propagator(double t, double delta_gap);

// One five-pulse composite with delays from the timings (pulse i at
// x_i * tau), gaps accumulating gap_detuning, no trailing gap.  phase_shift
// pi/2 turns the X composite into Y; the same matrix follows from
// conjugating X with exp(-i sigma_z pi/4).
Eigen::Matrix2cd composite_with_delays(const composite_timings& timings,
                                       double tau, const error_params& params,
                                       double gap_detuning,
                                       double phase_shift = 0.0);

// True when the delay pattern has the symmetric structure x3 = 1/4,
// x4 = 1/2 - x2, x5 = 1/2 - x1 (within 1e-12).
bool symmetry_delay_check(const composite_timings& timings);

// Distance of U from Uid up to global phase, evaluated from the Pauli
// components of M = Uid^dag U:  d = sqrt(sum_i |tr(sigma_i M)|^2)/2.
// For unitary M this equals sqrt(1 - |tr M|^2/4) but stays accurate when
// d approaches the floating-point floor.
double phase_invariant_distance(const Eigen::Matrix2cd& u,
                                const Eigen::Matrix2cd& u_ideal);

enum class error_sequence { x_unequal_delays, x_no_delay, axy4, axy8 };

struct order_scaling_options {
    double tau = 4.669;          // us, inter-composite period
    double gap_phase = 4.0;      // fixed detuning phase per period (rad),
                                 // applied in both the ideal and errored runs
    phase_order order = phase_order::xyxy_yxyx;  // axy8 only; axy4 always
                                                 // alternates literally
};

struct order_scaling_point {
    double eta = 0.0;
    double distance = 0.0;
};

struct order_scaling_result {
    double slope = 0.0;
    std::vector<order_scaling_point> points;
    bool degenerate = false;     // all distances at the floating-point floor
};

// Propagator of the chosen sequence with errors delta = eta * tilde.delta,
// epsilon = eta * tilde.epsilon, compared against the eta = 0 reference by
// phase-invariant distance; the slope of log d vs log eta is fitted by
// least squares over points above 1e-12.
order_scaling_result order_scaling_fit(error_sequence kind,
                                       const composite_timings& timings,
                                       const error_params& tilde,
                                       const std::vector<double>& eta_grid,
                                       const order_scaling_options& options = {});

// 8 logarithmic points spanning [1e-3, 1e-2].
std::vector<double> default_eta_grid();

}  // namespace axy
