#include "core/error_analysis.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "core/constants.hpp"
#include "core/pauli.hpp"

namespace axy {

namespace {

using Eigen::Matrix2cd;

const std::complex<double> ci(0.0, 1.0);

void check_params(const error_params& params, const char* where) {
    if (!(params.omega > 0.0))
        throw std::invalid_argument(std::string("axy::") + where +
                                    ": omega must be positive");
    if (!(std::abs(params.delta) < pi / 2.0))
        throw std::invalid_argument(std::string("axy::") + where +
                                    ": |delta| must stay below pi/2");
}

// Propagator of a whole schedule with imperfect pulses and detuned gaps,
// ending with the gap that completes the last period.  Gaps are measured
// between pulse centers; each rotation carries its own internal duration
// without consuming schedule time, so the gap backdrop does not shift when
// delta rescales the pulse length.
Matrix2cd schedule_propagator(const pulse_schedule& schedule,
                              const error_params& params,
                              double gap_detuning) {
    Matrix2cd u = Matrix2cd::Identity();
    double t = 0.0;
    for (const auto& e : schedule.events) {
        u = imperfect_rotation(e.phase, params) *
            gap_propagator(e.center_time - t, gap_detuning) * u;
        t = e.center_time;
    }
    return gap_propagator(schedule.total_time - t, gap_detuning) * u;
}

Matrix2cd bare_composite(const error_params& params) {
    Matrix2cd u = Matrix2cd::Identity();
    for (double phase : composite_phases())
        u = imperfect_rotation(phase, params) * u;
    return u;
}

}  // namespace

Eigen::Matrix2cd imperfect_rotation(double phi, const error_params& params) {
    check_params(params, "imperfect_rotation");
    // H = Omega (cos phi, sin phi, epsilon).sigma / 2, so the rotation angle
    // over t_p = (pi - 2 delta)/Omega is (pi - 2 delta) sqrt(1+eps^2)/2.
    const double norm = std::sqrt(1.0 + params.epsilon * params.epsilon);
    const double theta = 0.5 * (pi - 2.0 * params.delta) * norm;
    const double nx = std::cos(phi) / norm;
    const double ny = std::sin(phi) / norm;
    const double nz = params.epsilon / norm;
    const double c = std::cos(theta), s = std::sin(theta);
    Matrix2cd u;
    u << c - ci * s * nz, -ci * s * (nx - ci * ny),
        -ci * s * (nx + ci * ny), c + ci * s * nz;
    return u;
}

Eigen::Matrix2cd imperfect_rotation_expansion(double phi,
                                              const error_params& params) {
    check_params(params, "imperfect_rotation_expansion");
    const double d = params.delta, e = params.epsilon;
    Matrix2cd u = -ci * (1.0 - 0.5 * (d * d + e * e)) * sigma_phi(phi) -
                  ci * e * sigma_z() +
                  (d - e * e * pi / 4.0) * Matrix2cd::Identity();
    return u;
}

Eigen::Matrix2cd gap_propagator(double t, double delta_gap) {
    Matrix2cd u = Matrix2cd::Zero();
    u(0, 0) = std::exp(-ci * (0.5 * delta_gap * t));
    u(1, 1) = std::exp(ci * (0.5 * delta_gap * t));
    return u;
}

Eigen::Matrix2cd composite_with_delays(const composite_timings& timings,
                                       double tau, const error_params& params,
                                       double gap_detuning,
                                       double phase_shift) {
    validate(timings);
    check_params(params, "composite_with_delays");
    if (!(tau > 0.0))
        throw std::invalid_argument(
            "axy::composite_with_delays: tau must be positive");
    const auto phases = composite_phases(phase_shift);
    Matrix2cd u = Matrix2cd::Identity();
    double t = 0.0;
    for (size_t i = 0; i < 5; ++i) {
        u = imperfect_rotation(phases[i], params) *
            gap_propagator(timings.x[i] * tau - t, gap_detuning) * u;
        t = timings.x[i] * tau;
    }
    // Ends at the fifth rotation; the caller owns whatever free evolution
    // follows.
    return u;
}

bool symmetry_delay_check(const composite_timings& timings) {
    // No validate() here: the point is to test the mirror structure, and
    // validate would already enforce it for symmetric-flagged timings.
    const double tol = 1e-12;
    return std::abs(timings.x[2] - 0.25) <= tol &&
           std::abs(timings.x[3] - (0.5 - timings.x[1])) <= tol &&
           std::abs(timings.x[4] - (0.5 - timings.x[0])) <= tol;
}

double phase_invariant_distance(const Eigen::Matrix2cd& u,
                                const Eigen::Matrix2cd& u_ideal) {
    const Matrix2cd m = u_ideal.adjoint() * u;
    // Traceless Pauli components of m; for unitary m this reproduces
    // sqrt(1 - |tr m|^2/4) without the cancellation near zero.
    const double sx = std::abs((sigma_x() * m).trace());
    const double sy = std::abs((sigma_y() * m).trace());
    const double sz = std::abs((sigma_z() * m).trace());
    return 0.5 * std::sqrt(sx * sx + sy * sy + sz * sz);
}

order_scaling_result order_scaling_fit(error_sequence kind,
                                       const composite_timings& timings,
                                       const error_params& tilde,
                                       const std::vector<double>& eta_grid,
                                       const order_scaling_options& options) {
    validate(timings);
    check_params(tilde, "order_scaling_fit");
    if (eta_grid.empty())
        throw std::invalid_argument("axy::order_scaling_fit: empty eta grid");
    for (double eta : eta_grid)
        if (!(eta > 0.0))
            throw std::invalid_argument(
                "axy::order_scaling_fit: eta values must be positive");
    if (!(options.tau > 0.0))
        throw std::invalid_argument("axy::order_scaling_fit: tau must be positive");

    // The detuning phase accumulated across the gaps is held fixed while eta
    // scales the pulse errors; the eta = 0 reference keeps the same gaps so
    // the fitted distance isolates the pulse-error order.
    const double gap_detuning = options.gap_phase / options.tau;

    const auto propagator = [&](double eta) -> Matrix2cd {
        error_params p;
        p.delta = eta * tilde.delta;
        p.epsilon = eta * tilde.epsilon;
        p.omega = tilde.omega;
        switch (kind) {
            case error_sequence::x_unequal_delays:
                return composite_with_delays(timings, options.tau, p,
                                             gap_detuning);
            case error_sequence::x_no_delay:
                return bare_composite(p);
            case error_sequence::axy4:
                // XYXY itself is the first-order-cancelling construction;
                // the half-reversal switch only concerns the 8-composite
                // sequence.
                return schedule_propagator(
                    build_axy(4, timings, options.tau, 1,
                              phase_order::xyxyxyxy),
                    p, gap_detuning);
            case error_sequence::axy8:
                return schedule_propagator(
                    build_axy(8, timings, options.tau, 1, options.order), p,
                    gap_detuning);
        }
        throw std::logic_error("axy::order_scaling_fit: unknown sequence kind");
    };

    error_params ideal = tilde;
    ideal.delta = 0.0;
    ideal.epsilon = 0.0;
    Matrix2cd u_ideal;
    switch (kind) {
        case error_sequence::x_unequal_delays:
            u_ideal = composite_with_delays(timings, options.tau, ideal,
                                            gap_detuning);
            break;
        case error_sequence::x_no_delay:
            u_ideal = bare_composite(ideal);
            break;
        case error_sequence::axy4:
            u_ideal = schedule_propagator(
                build_axy(4, timings, options.tau, 1, phase_order::xyxyxyxy),
                ideal, gap_detuning);
            break;
        case error_sequence::axy8:
            u_ideal = schedule_propagator(
                build_axy(8, timings, options.tau, 1, options.order), ideal,
                gap_detuning);
            break;
    }

    order_scaling_result result;
    result.points.reserve(eta_grid.size());
    for (double eta : eta_grid) {
        order_scaling_point pt;
        pt.eta = eta;
        pt.distance = phase_invariant_distance(propagator(eta), u_ideal);
        result.points.push_back(pt);
    }

    // Least squares on log-log points above the floating-point floor.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    bool any_signal = false;
    for (const auto& pt : result.points) {
        if (pt.distance > 1e-13) any_signal = true;
        if (pt.distance <= 1e-12) continue;
        const double lx = std::log(pt.eta), ly = std::log(pt.distance);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (!any_signal || n < 2) {
        result.degenerate = true;
        result.slope = 0.0;
        return result;
    }
    const double denom = n * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) {
        result.degenerate = true;
        result.slope = 0.0;
        return result;
    }
    result.slope = (n * sxy - sx * sy) / denom;
    return result;
}

std::vector<double> default_eta_grid() {
    std::vector<double> grid;
    grid.reserve(8);
    for (int i = 0; i < 8; ++i)
        grid.push_back(std::pow(10.0, -3.0 + double(i) / 7.0));
    return grid;
}

}  // namespace axy
