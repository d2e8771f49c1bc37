#include "core/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <thread>

#include <unsupported/Eigen/KroneckerProduct>

#include "core/pauli.hpp"
#include "core/rng.hpp"

namespace axy {

// ---- OU amplitude noise ----

double ou_diffusion(const ou_params& params, double omega) {
    const double s = params.delta_omega * omega;
    return 2.0 * s * s / params.tau_mw;
}

ou_process::ou_process(const ou_params& params, double omega, std::uint64_t seed)
    : tau_(params.tau_mw),
      sigma_(params.delta_omega * omega),
      gen_(seed) {
    if (!(tau_ > 0.0))
        throw std::invalid_argument("axy::ou_process: tau_mw must be positive");
    x_ = sigma_ * normal01(gen_);
}

void ou_process::advance(double dt) {
    if (!(dt >= 0.0))
        throw std::invalid_argument("axy::ou_process: negative step");
    if (dt == 0.0) return;
    const double decay = std::exp(-dt / tau_);
    // sqrt(c tau / 2 (1 - e^{-2 dt/tau})) with c tau / 2 = sigma^2
    const double kick = sigma_ * std::sqrt(1.0 - decay * decay);
    x_ = x_ * decay + kick * normal01(gen_);
}

std::vector<double> ou_trajectory(const ou_params& params, double omega,
                                  const std::vector<double>& times) {
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument(
                "axy::ou_trajectory: times must be strictly increasing");
    ou_process p(params, omega, derive_seed(params.seed, "ou"));
    std::vector<double> out;
    out.reserve(times.size());
    for (size_t i = 0; i < times.size(); ++i) {
        if (i > 0) p.advance(times[i] - times[i - 1]);
        out.push_back(p.value());
    }
    return out;
}

void validate_config(const simulation_config& config) {
    if (config.m_s != 1 && config.m_s != -1)
        throw std::invalid_argument("axy::validate_config: m_s must be +1 or -1");
    if (!(config.b_z > 0.0))
        throw std::invalid_argument("axy::validate_config: B_z must be positive");
    if (!(config.rabi > 0.0))
        throw std::invalid_argument("axy::validate_config: Rabi frequency must be positive");
    if (config.mode == pulse_mode::finite && config.integrator_substeps < 4)
        throw std::invalid_argument(
            "axy::validate_config: finite mode needs integrator_substeps >= 4");
    if (!(config.ou.tau_mw > 0.0) || !(config.ou.delta_omega >= 0.0))
        throw std::invalid_argument("axy::validate_config: bad OU parameters");
    if (config.max_joint_dim < 2)
        throw std::invalid_argument("axy::validate_config: max_joint_dim < 2");
}

// ---- small dense-matrix helpers ----

namespace {

using cmat = Eigen::MatrixXcd;

// exp(-i H t) through one eigendecomposition, reusable for any t
struct hermitian_propagator {
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd values;

    explicit hermitian_propagator(const cmat& h) {
        Eigen::SelfAdjointEigenSolver<cmat> es(h);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("axy::dynamics: eigendecomposition failed");
        vectors = es.eigenvectors();
        values = es.eigenvalues();
    }

    cmat at(double t) const {
        const std::complex<double> mi(0.0, -1.0);
        Eigen::VectorXcd ph(values.size());
        for (Eigen::Index i = 0; i < values.size(); ++i)
            ph[i] = std::exp(mi * values[i] * t);
        return vectors * ph.asDiagonal() * vectors.adjoint();
    }
};

cmat matrix_power_int(cmat base, long exponent) {
    cmat result = cmat::Identity(base.rows(), base.cols());
    while (exponent > 0) {
        if (exponent & 1) result = base * result;
        exponent >>= 1;
        if (exponent) base = base * base;
    }
    return result;
}

void check_unitary(const cmat& u, const char* where) {
    const double dim = double(u.rows());
    const double defect =
        (u.adjoint() * u - cmat::Identity(u.rows(), u.cols())).norm();
    if (defect > 1e-9 * std::sqrt(dim) * 16.0)
        throw std::runtime_error(std::string("axy::") + where +
                                 ": propagator lost unitarity");
}

// spin-1/2 operator of spin j embedded in an m-spin register
cmat embed_spin_op(const Eigen::Matrix2cd& op, int j, int m) {
    cmat out = cmat::Identity(1, 1);
    for (int s = 0; s < m; ++s) {
        const cmat factor =
            (s == j) ? cmat(op) : cmat(Eigen::Matrix2cd::Identity());
        out = Eigen::kroneckerProduct(out, factor).eval();
    }
    return out;
}

struct cluster_operators {
    int m = 0;
    long dim = 1;
    cmat h_bath;        // -sum gamma_j B_z I_jz + intra-cluster dipolar
    cmat h_hyperfine;   // sum_j A_j . I_j
};

cluster_operators build_cluster_operators(const bath_model& bath,
                                          const std::vector<int>& cluster,
                                          const simulation_config& config) {
    cluster_operators ops;
    ops.m = int(cluster.size());
    ops.dim = 1L << ops.m;
    ops.h_bath = cmat::Zero(ops.dim, ops.dim);
    ops.h_hyperfine = cmat::Zero(ops.dim, ops.dim);

    const Eigen::Matrix2cd ix = 0.5 * sigma_x();
    const Eigen::Matrix2cd iy = 0.5 * sigma_y();
    const Eigen::Matrix2cd iz = 0.5 * sigma_z();
    std::vector<std::array<cmat, 3>> iv(size_t(ops.m));
    std::map<int, int> local;
    for (int j = 0; j < ops.m; ++j) {
        const int g = cluster[size_t(j)];
        if (g < 0 || g >= int(bath.spins.size()))
            throw std::invalid_argument("axy::dynamics: cluster index out of range");
        local[g] = j;
        iv[size_t(j)] = {embed_spin_op(ix, j, ops.m), embed_spin_op(iy, j, ops.m),
                         embed_spin_op(iz, j, ops.m)};
        const auto& spin = bath.spins[size_t(g)];
        ops.h_bath -= spin.gamma * config.b_z * iv[size_t(j)][2];
        const Eigen::Vector3d a = spin.hyperfine();
        for (int c = 0; c < 3; ++c) ops.h_hyperfine += a[c] * iv[size_t(j)][c];
    }
    if (config.dipolar != dipolar_mode::off) {
        for (const auto& pair : bath.pairs) {
            const auto pi_ = local.find(pair.i);
            const auto pj = local.find(pair.j);
            if (pi_ == local.end() || pj == local.end()) continue;
            const Eigen::Matrix3d t = dipolar_tensor(pair, config.dipolar);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    if (t(a, b) != 0.0)
                        ops.h_bath += t(a, b) * iv[size_t(pi_->second)][size_t(a)] *
                                      iv[size_t(pj->second)][size_t(b)];
        }
    }
    return ops;
}

// pulse centers as fractions of tau when every period repeats the first
// one's times (phases are free to differ, unlike extract_period)
std::optional<std::vector<double>> times_periodic_fracs(
    const pulse_schedule& schedule) {
    if (schedule.repetitions < 1 || schedule.events.empty()) return std::nullopt;
    const size_t total = schedule.events.size();
    if (total % size_t(schedule.repetitions) != 0) return std::nullopt;
    const size_t per = total / size_t(schedule.repetitions);
    std::vector<double> fracs;
    for (size_t i = 0; i < per; ++i)
        fracs.push_back(schedule.events[i].center_time / schedule.tau);
    for (size_t i = 0; i < total; ++i) {
        const double want =
            (double(i / per) + fracs[i % per]) * schedule.tau;
        if (std::abs(schedule.events[i].center_time - want) > 1e-9)
            return std::nullopt;
    }
    return fracs;
}

}  // namespace

// ---- instantaneous-pulse conditional evolution ----

std::complex<double> conditional_coherence(const pulse_schedule& schedule,
                                           const bath_model& bath,
                                           const std::vector<int>& cluster,
                                           const simulation_config& config) {
    validate_config(config);
    for (const auto& e : schedule.events)
        if (e.duration != 0.0)
            throw std::runtime_error(
                "axy::conditional_coherence: schedule has finite-width pulses");
    if (schedule.events.size() % 2 != 0)
        throw std::runtime_error(
            "axy::conditional_coherence: odd pulse count has no x-basis return");

    const auto ops = build_cluster_operators(bath, cluster, config);
    const cmat h0 = ops.h_bath;
    const cmat h1 = ops.h_bath + double(config.m_s) * ops.h_hyperfine;
    const hermitian_propagator p0(h0), p1(h1);

    cmat w0 = cmat::Identity(ops.dim, ops.dim);
    cmat w1 = w0;
    const auto fracs = times_periodic_fracs(schedule);
    if (fracs && fracs->size() % 2 == 0 && schedule.repetitions > 1) {
        // branch pattern repeats each period (even pulse count), so one
        // period's pair of branch propagators is powered
        std::vector<double> segs;
        double prev = 0.0;
        for (double f : *fracs) {
            segs.push_back((f - prev) * schedule.tau);
            prev = f;
        }
        segs.push_back((1.0 - prev) * schedule.tau);
        int b0 = 0, b1 = 1;
        for (size_t i = 0; i < segs.size(); ++i) {
            w0 = (b0 == 0 ? p0 : p1).at(segs[i]) * w0;
            w1 = (b1 == 0 ? p0 : p1).at(segs[i]) * w1;
            if (i + 1 < segs.size()) {
                b0 = 1 - b0;
                b1 = 1 - b1;
            }
        }
        w0 = matrix_power_int(w0, schedule.repetitions);
        w1 = matrix_power_int(w1, schedule.repetitions);
    } else {
        int b0 = 0, b1 = 1;
        double prev = 0.0;
        for (const auto& e : schedule.events) {
            const double dt = e.center_time - prev;
            w0 = (b0 == 0 ? p0 : p1).at(dt) * w0;
            w1 = (b1 == 0 ? p0 : p1).at(dt) * w1;
            b0 = 1 - b0;
            b1 = 1 - b1;
            prev = e.center_time;
        }
        w0 = (b0 == 0 ? p0 : p1).at(schedule.total_time - prev) * w0;
        w1 = (b1 == 0 ? p0 : p1).at(schedule.total_time - prev) * w1;
    }
    check_unitary(w0, "conditional_coherence");
    return (w1.adjoint() * w0).trace() / double(ops.dim);
}

std::complex<double> pulse_phase_factor(const pulse_schedule& schedule) {
    double chi = 0.0;
    double sign = 1.0;
    for (const auto& e : schedule.events) {
        chi += sign * e.phase;
        sign = -sign;
    }
    return std::exp(std::complex<double>(0.0, -2.0 * chi));
}

std::complex<double> combine_clusters(
    const std::vector<std::complex<double>>& ls) {
    std::complex<double> total(1.0, 0.0);
    for (const auto& l : ls) total *= l;
    return total;
}

double transition_probability(std::complex<double> l) {
    double p = 0.5 * (1.0 - l.real());
    if (p < -1e-9 || p > 1.0 + 1e-9)
        std::fprintf(stderr,
                     "axy::transition_probability: p = %.3e outside [0,1]\n", p);
    return std::min(1.0, std::max(0.0, p));
}

double conditional_probability(const pulse_schedule& schedule,
                               const bath_model& bath,
                               const simulation_config& config) {
    std::complex<double> total(1.0, 0.0);
    for (const auto& cluster : bath.clusters)
        total *= conditional_coherence(schedule, bath, cluster, config);
    return transition_probability(pulse_phase_factor(schedule) * total);
}

// ---- finite-width joint evolution ----

namespace {

struct joint_model {
    long bath_dim = 1;
    long dim = 2;
    cmat h_free;
    cmat s_phi_x;   // sigma_x (x) 1
    cmat s_phi_y;   // sigma_y (x) 1

    cmat pulse_h(double phase, double omega_t) const {
        return h_free + 0.5 * omega_t * (std::cos(phase) * s_phi_x +
                                         std::sin(phase) * s_phi_y);
    }
};

joint_model build_joint_model(const bath_model& bath,
                              const std::vector<int>& cluster,
                              const simulation_config& config) {
    const auto ops = build_cluster_operators(bath, cluster, config);
    joint_model jm;
    jm.bath_dim = ops.dim;
    jm.dim = 2 * ops.dim;
    if (jm.dim > config.max_joint_dim)
        throw std::runtime_error(
            "axy::evolve_full: joint Hilbert space exceeds max_joint_dim (capacity)");
    const cmat id_b = cmat::Identity(ops.dim, ops.dim);
    const Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
    // NV basis index 0 = |m_s>, 1 = |0>; projector (sigma_z+1)/2 selects |m_s>
    const Eigen::Matrix2cd proj = 0.5 * (sigma_z() + id2);
    const double delta = 2.0 * pi * config.detuning_mhz;
    jm.h_free = 0.5 * delta * Eigen::kroneckerProduct(sigma_z(), id_b) +
                double(config.m_s) *
                    Eigen::kroneckerProduct(proj, ops.h_hyperfine) +
                Eigen::kroneckerProduct(id2, ops.h_bath);
    jm.s_phi_x = Eigen::kroneckerProduct(sigma_x(), id_b);
    jm.s_phi_y = Eigen::kroneckerProduct(sigma_y(), id_b);
    return jm;
}

double probability_from_joint(const cmat& u, long bath_dim) {
    // <x_-| U |x_+> as a bath operator, |x_+-> = (|0> +- |m_s>)/sqrt(2)
    const auto b00 = u.block(0, 0, bath_dim, bath_dim);
    const auto b01 = u.block(0, bath_dim, bath_dim, bath_dim);
    const auto b10 = u.block(bath_dim, 0, bath_dim, bath_dim);
    const auto b11 = u.block(bath_dim, bath_dim, bath_dim, bath_dim);
    const cmat m = 0.5 * ((b11 + b10) - (b01 + b00));
    double p = m.squaredNorm() / double(bath_dim);
    if (p < -1e-9 || p > 1.0 + 1e-9)
        std::fprintf(stderr, "axy::evolve_full: p = %.3e outside [0,1]\n", p);
    return std::min(1.0, std::max(0.0, p));
}

// largest block-repetition count r (dividing repetitions) such that the
// event list is r identical blocks in times, phases and durations
long repeating_block(const pulse_schedule& schedule) {
    const long reps = schedule.repetitions;
    const size_t total = schedule.events.size();
    if (reps < 2 || total == 0) return 1;
    for (long r = reps; r >= 2; --r) {
        if (reps % r != 0 || total % size_t(r) != 0) continue;
        const size_t per = total / size_t(r);
        const double block_time = schedule.total_time / double(r);
        bool ok = true;
        for (size_t i = per; i < total && ok; ++i) {
            const auto& e = schedule.events[i];
            const auto& f = schedule.events[i % per];
            ok = std::abs(e.center_time -
                          (f.center_time + double(i / per) * block_time)) <= 1e-9 &&
                 e.phase == f.phase && e.duration == f.duration;
        }
        if (ok) return r;
    }
    return 1;
}

}  // namespace

double evolve_full(const pulse_schedule& schedule, const bath_model& bath,
                   const std::vector<int>& cluster,
                   const simulation_config& config,
                   std::uint64_t noise_seed) {
    validate_config(config);
    if (config.mode != pulse_mode::finite)
        throw std::runtime_error("axy::evolve_full: config is not in finite mode");
    for (const auto& e : schedule.events)
        if (!(e.duration > 0.0))
            throw std::runtime_error(
                "axy::evolve_full: schedule has zero-width pulses");

    const auto jm = build_joint_model(bath, cluster, config);
    const double omega_nominal = config.rabi * (1.0 + config.amplitude_error);
    const hermitian_propagator free_prop(jm.h_free);

    if (!config.ou.enabled) {
        // every distinct pulse phase gets one eigendecomposition, every
        // segment then costs two matrix products
        std::map<double, hermitian_propagator> pulse_props;
        auto pulse_at = [&](double phase, double t) {
            auto it = pulse_props.find(phase);
            if (it == pulse_props.end())
                it = pulse_props
                         .emplace(phase,
                                  hermitian_propagator(
                                      jm.pulse_h(phase, omega_nominal)))
                         .first;
            return it->second.at(t);
        };
        const long blocks = repeating_block(schedule);
        const size_t per = schedule.events.size() / size_t(blocks);
        const double block_time = schedule.total_time / double(blocks);
        cmat u = cmat::Identity(jm.dim, jm.dim);
        double cursor = 0.0;
        for (size_t i = 0; i < per; ++i) {
            const auto& e = schedule.events[i];
            const double start = e.center_time - 0.5 * e.duration;
            u = free_prop.at(start - cursor) * u;
            u = pulse_at(e.phase, e.duration) * u;
            cursor = start + e.duration;
        }
        u = free_prop.at(block_time - cursor) * u;
        u = matrix_power_int(u, blocks);
        check_unitary(u, "evolve_full");
        return probability_from_joint(u, jm.bath_dim);
    }

    // OU noise: the fluctuation advances through gaps and pulse substeps in
    // real time; each substep holds its entry value of Omega(t)
    ou_process noise(config.ou, config.rabi, noise_seed);
    cmat u = cmat::Identity(jm.dim, jm.dim);
    double cursor = 0.0;
    for (const auto& e : schedule.events) {
        const double start = e.center_time - 0.5 * e.duration;
        const double gap = start - cursor;
        u = free_prop.at(gap) * u;
        noise.advance(gap);
        const int sub = config.integrator_substeps;
        const double dt = e.duration / double(sub);
        for (int s = 0; s < sub; ++s) {
            const double omega_t = omega_nominal + noise.value();
            const hermitian_propagator step(jm.pulse_h(e.phase, omega_t));
            u = step.at(dt) * u;
            noise.advance(dt);
        }
        cursor = start + e.duration;
    }
    u = free_prop.at(schedule.total_time - cursor) * u;
    check_unitary(u, "evolve_full");
    return probability_from_joint(u, jm.bath_dim);
}

double effective_prediction(double f_kdd, double a_perp_norm, int m_s,
                            double t) {
    return 0.5 * (1.0 - std::cos(double(m_s) * f_kdd * a_perp_norm * t / 4.0));
}

// ---- frequency sweeps ----

pulse_schedule build_family_schedule(const schedule_family& family, double tau) {
    if (!(tau > 0.0))
        throw std::invalid_argument("axy::build_family_schedule: tau must be positive");
    const bool cpmg = family.kind == sequence_kind::cpmg;
    const double unit =
        cpmg ? tau
             : tau * ((family.kind == sequence_kind::axy4 ||
                       family.kind == sequence_kind::xtilde4)
                          ? 2.0
                          : 4.0);
    int repeats = family.repeats;
    if (repeats <= 0) {
        if (!(family.total_time > 0.0))
            throw std::invalid_argument(
                "axy::build_family_schedule: need repeats or total_time");
        repeats = int(std::max(1.0, std::round(family.total_time / unit)));
    }
    switch (family.kind) {
        case sequence_kind::axy4:
            return build_axy(4, family.timings, tau, repeats, family.order);
        case sequence_kind::axy8:
            return build_axy(8, family.timings, tau, repeats, family.order);
        case sequence_kind::xtilde4:
            return build_xtilde(4, family.timings, tau, repeats);
        case sequence_kind::xtilde8:
            return build_xtilde(8, family.timings, tau, repeats);
        case sequence_kind::cpmg:
        default:
            return build_cpmg(tau, repeats);
    }
}

std::string family_label(const schedule_family& family) {
    std::string label;
    switch (family.kind) {
        case sequence_kind::axy4: label = "axy4"; break;
        case sequence_kind::axy8: label = "axy8"; break;
        case sequence_kind::xtilde4: label = "xtilde4"; break;
        case sequence_kind::xtilde8: label = "xtilde8"; break;
        case sequence_kind::cpmg: label = "cpmg"; break;
    }
    if ((family.kind == sequence_kind::axy4 ||
         family.kind == sequence_kind::axy8) &&
        family.order == phase_order::xyxy_yxyx)
        label += "-yx";
    label += " k=" + std::to_string(family.k_dd);
    if (family.repeats > 0)
        label += " x" + std::to_string(family.repeats);
    else
        label += " T=" + std::to_string(family.total_time) + "us";
    return label;
}

std::vector<double> linear_grid(double start, double stop, int points) {
    if (points < 2 || !(stop > start))
        throw std::invalid_argument("axy::linear_grid: need points >= 2, stop > start");
    std::vector<double> g(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i)
        g[size_t(i)] = start + (stop - start) * double(i) / double(points - 1);
    return g;
}

sensor_spectrum sweep(const bath_model& bath, const schedule_family& family,
                      const std::vector<double>& freq_grid_mhz,
                      const simulation_config& config, std::uint64_t seed,
                      int threads) {
    validate_config(config);
    if (family.k_dd < 1)
        throw std::invalid_argument("axy::sweep: k_dd must be >= 1");
    for (size_t i = 0; i < freq_grid_mhz.size(); ++i) {
        if (!(freq_grid_mhz[i] > 0.0))
            throw std::invalid_argument("axy::sweep: frequencies must be positive");
        if (i > 0 && !(freq_grid_mhz[i] > freq_grid_mhz[i - 1]))
            throw std::invalid_argument("axy::sweep: grid must be strictly increasing");
    }
    if (config.mode == pulse_mode::finite && bath.clusters.size() > 1)
        throw std::runtime_error(
            "axy::sweep: finite mode supports at most one cluster (capacity)");

    sensor_spectrum spec;
    spec.seed = seed;
    spec.schedule_descriptor = family_label(family);
    spec.points.resize(freq_grid_mhz.size());

    auto eval_point = [&](size_t i) {
        const double nu = freq_grid_mhz[i];
        const double tau = double(family.k_dd) / nu;
        pulse_schedule schedule = build_family_schedule(family, tau);
        double p = 0.0;
        if (config.mode == pulse_mode::finite) {
            schedule = apply_finite_width(schedule, config.rabi);
            const std::vector<int> cluster =
                bath.clusters.empty() ? std::vector<int>{} : bath.clusters[0];
            p = evolve_full(schedule, bath, cluster, config,
                            derive_seed(seed, "sweep", i));
        } else {
            p = conditional_probability(schedule, bath, config);
        }
        spec.points[i] = {nu, tau, p};
    };

    const int workers =
        std::max(1, std::min<int>(threads, int(freq_grid_mhz.size())));
    if (workers == 1) {
        for (size_t i = 0; i < freq_grid_mhz.size(); ++i) eval_point(i);
    } else {
        std::atomic<size_t> next(0);
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (size_t i = next.fetch_add(1); i < freq_grid_mhz.size();
                         i = next.fetch_add(1))
                        eval_point(i);
                } catch (...) {
                    errors[size_t(w)] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return spec;
}

}  // namespace axy
