#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "core/modfunc.hpp"

namespace axy {

// Which composite (X or Y, distinguished by a pi/2 phase offset) sits at each
// slot of the AXY-8 super-period.  The literal reading of the sequence name
// alternates X,Y throughout; the second variant reverses the roles in the
// second half (XYXY then YXYX), which pushes the leading error one order
// higher for non-equal inner spacings.
enum class phase_order { xyxyxyxy, xyxy_yxyx };

struct pulse_event {
    double center_time = 0.0;    // us
    double phase = 0.0;          // rad, rotation axis angle in the transverse plane
    double duration = 0.0;       // us; 0 means instantaneous
    double nominal_angle = 0.0;  // rad; pi for every pulse built here
};

struct pulse_schedule {
    std::vector<pulse_event> events;   // sorted by center_time
    double tau = 0.0;                  // period, us
    int repetitions = 0;               // count of tau-periods
    double total_time = 0.0;           // repetitions * tau
    std::string description;
};

// Rotation axes of the five pulses inside one composite, shifted as a whole:
// shift 0 gives the X composite, pi/2 the Y one.
std::array<double, 5> composite_phases(double shift = 0.0);

// AXY-n: n composites of five pi-pulses per super-period, one period tau
// holding the composite pair (X then Y time-mirrored about the period
// midpoint).  repeats counts super-periods, so the schedule spans
// repeats * n/2 periods and carries 5*n*repeats pulses.
pulse_schedule build_axy(int n, const composite_timings& timings, double tau,
                         int repeats, phase_order order = phase_order::xyxyxyxy);

// CPMG: two pulses per period at tau/4 and 3tau/4, all phases pi/2.
pulse_schedule build_cpmg(double tau, int repeats);

// Same pulse times as build_axy(n, ...), every phase 0; the non-robust
// reference whose modulation function is identical to the AXY one.
pulse_schedule build_xtilde(int n, const composite_timings& timings, double tau,
                            int repeats);

// Give every event duration pi/Omega centered on its instantaneous time.
// Throws std::runtime_error naming the first offending pair when widened
// pulses overlap (or the first pulse would start before t = 0).
pulse_schedule apply_finite_width(const pulse_schedule& schedule, double omega);

// Relative times, phases and durations of one period, provided every period
// of the schedule repeats the first one (times within 1e-12 * tau, phases and
// durations exactly).  Empty when the schedule is not periodic that way.
struct period_structure {
    std::vector<double> fracs;       // pulse centers as fractions of tau
    std::vector<double> phases;
    std::vector<double> durations;   // us
};
std::optional<period_structure> extract_period(const pulse_schedule& schedule);

}  // namespace axy
