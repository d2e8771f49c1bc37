#include "core/sequence_builder.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "core/constants.hpp"

namespace axy {

namespace {

constexpr double knill_phases[5] = {pi / 6.0, 0.0, pi / 2.0, 0.0, pi / 6.0};

void finish(pulse_schedule& s) {
    s.total_time = s.tau * s.repetitions;
    for (size_t i = 0; i + 1 < s.events.size(); ++i)
        if (!(s.events[i].center_time < s.events[i + 1].center_time))
            throw std::logic_error("axy::sequence_builder: events out of order");
}

}  // namespace

std::array<double, 5> composite_phases(double shift) {
    std::array<double, 5> out;
    for (int i = 0; i < 5; ++i) out[size_t(i)] = knill_phases[i] + shift;
    return out;
}

pulse_schedule build_axy(int n, const composite_timings& timings, double tau,
                         int repeats, phase_order order) {
    if (n != 4 && n != 8)
        throw std::invalid_argument("axy::build_axy: n must be 4 or 8");
    if (!(tau > 0.0) || repeats < 1)
        throw std::invalid_argument("axy::build_axy: need tau > 0 and repeats >= 1");
    validate(timings);

    pulse_schedule s;
    s.tau = tau;
    s.repetitions = repeats * n / 2;
    {
        std::ostringstream d;
        d << "axy" << n << (order == phase_order::xyxy_yxyx ? "-yx" : "")
          << " x" << repeats;
        s.description = d.str();
    }
    const int periods_per_super = n / 2;
    for (int period = 0; period < s.repetitions; ++period) {
        const double t0 = period * tau;
        for (int half = 0; half < 2; ++half) {
            const int slot = 2 * (period % periods_per_super) + half;
            // X composite unless this slot is a Y; the Y composite is
            // U_z(pi/2) X U_z(-pi/2), i.e. every pulse phase shifted by pi/2.
            bool is_y = (slot % 2 == 1);
            if (order == phase_order::xyxy_yxyx && slot >= periods_per_super)
                is_y = !is_y;
            const double shift = is_y ? pi / 2.0 : 0.0;
            for (int i = 0; i < 5; ++i) {
                pulse_event e;
                // second composite mirrored in time; phase list is its own
                // mirror so the time-reversed order reads the same.  Written
                // as tau - offset so mirror pairs sum to tau exactly.
                e.center_time =
                    t0 + (half == 0 ? tau * timings.x[size_t(i)]
                                    : tau - tau * timings.x[size_t(4 - i)]);
                e.phase = knill_phases[i] + shift;
                e.nominal_angle = pi;
                s.events.push_back(e);
            }
        }
    }
    finish(s);
    return s;
}

pulse_schedule build_cpmg(double tau, int repeats) {
    if (!(tau > 0.0) || repeats < 1)
        throw std::invalid_argument("axy::build_cpmg: need tau > 0 and repeats >= 1");
    pulse_schedule s;
    s.tau = tau;
    s.repetitions = repeats;
    {
        std::ostringstream d;
        d << "cpmg x" << repeats;
        s.description = d.str();
    }
    for (int period = 0; period < repeats; ++period) {
        for (double frac : cpmg_fractions) {
            pulse_event e;
            e.center_time = (period + frac) * tau;
            e.phase = pi / 2.0;
            e.nominal_angle = pi;
            s.events.push_back(e);
        }
    }
    finish(s);
    return s;
}

pulse_schedule build_xtilde(int n, const composite_timings& timings, double tau,
                            int repeats) {
    pulse_schedule s = build_axy(n, timings, tau, repeats);
    for (auto& e : s.events) e.phase = 0.0;
    {
        std::ostringstream d;
        d << "xtilde" << n << " x" << repeats;
        s.description = d.str();
    }
    return s;
}

pulse_schedule apply_finite_width(const pulse_schedule& schedule, double omega) {
    if (!(omega > 0.0))
        throw std::invalid_argument("axy::apply_finite_width: omega must be positive");
    pulse_schedule s = schedule;
    const double width = pi / omega;
    for (auto& e : s.events) e.duration = width;
    if (!s.events.empty() && s.events.front().center_time - width / 2.0 < 0.0)
        throw std::runtime_error(
            "axy::apply_finite_width: first pulse starts before t = 0");
    for (size_t i = 0; i + 1 < s.events.size(); ++i) {
        const double gap = (s.events[i + 1].center_time - width / 2.0) -
                           (s.events[i].center_time + width / 2.0);
        if (gap < 0.0) {
            std::ostringstream msg;
            msg << "axy::apply_finite_width: pulses " << i << " (t=" <<
                s.events[i].center_time << ") and " << i + 1 << " (t=" <<
                s.events[i + 1].center_time << ") overlap by " << -gap << " us";
            throw std::runtime_error(msg.str());
        }
    }
    return s;
}

std::optional<period_structure> extract_period(const pulse_schedule& schedule) {
    if (schedule.repetitions < 1 || schedule.events.empty()) return std::nullopt;
    const size_t total = schedule.events.size();
    if (total % size_t(schedule.repetitions) != 0) return std::nullopt;
    const size_t per = total / size_t(schedule.repetitions);
    period_structure p;
    for (size_t i = 0; i < per; ++i) {
        p.fracs.push_back(schedule.events[i].center_time / schedule.tau);
        p.phases.push_back(schedule.events[i].phase);
        p.durations.push_back(schedule.events[i].duration);
    }
    for (size_t i = 0; i < total; ++i) {
        const auto& e = schedule.events[i];
        const size_t j = i % per;
        const double want = (double(i / per) + p.fracs[j]) * schedule.tau;
        // absolute slack of 1e-9 us (a femtosecond) absorbs rounding from the
        // per-period time construction at any realistic total time
        if (std::abs(e.center_time - want) > 1e-9 ||
            e.phase != p.phases[j] || e.duration != p.durations[j])
            return std::nullopt;
    }
    return p;
}

}  // namespace axy
