#pragma once

#include <array>
#include <vector>

namespace axy {

// Relative times of the five pi-pulses making up the first composite of a
// period, as fractions of the period tau.  The second composite mirrors the
// first about the period midpoint, so a full period carries ten pulses at
// {x_i} and {1 - x_i}.  In the symmetric construction x3 = 1/4,
// x4 = 1/2 - x2, x5 = 1/2 - x1 and only (x1, x2) are free.
struct composite_timings {
    std::array<double, 5> x{};
    bool symmetric = true;
};

// Build symmetric timings from the two free variables; throws
// std::invalid_argument unless 0 < x1 < x2 < 1/4.
composite_timings make_symmetric_timings(double x1, double x2);

// Equally spaced pulses (1,3,5,7,9)/20; the composite degenerates to the
// Knill (KDD) unit.
composite_timings equally_spaced_timings();

// Throws std::invalid_argument on ordering/range violations; also enforces
// the mirror identities when t.symmetric is set.
void validate(const composite_timings& t);

// The ten pulse times of one full period, strictly increasing in (0, 1).
std::vector<double> period_fractions(const composite_timings& t);

// Sign of the modulation function F at t_frac in [0,1): +1 if an even number
// of pulses precede t_frac, -1 otherwise.  F(0) = +1 by convention.
int modulation_value(const std::vector<double>& fracs, double t_frac);
int modulation_value(const composite_timings& t, double t_frac);

// f_k = (2/tau) int_0^tau F(t) cos(k w_dd t) dt, evaluated in closed form on
// each sign-constant interval.  Exact to machine precision; this is the
// oracle every other coefficient formula is checked against.
double fourier_coeff_numeric(const std::vector<double>& fracs, int k);
double fourier_coeff_numeric(const composite_timings& t, int k);

// Closed form for the symmetric construction:
//   f_k = (4/(pi k)) [2 sin(2 pi k x1) - 2 sin(2 pi k x2) + sin(k pi/2)]
// for odd k, and 0 for even k (including k = 0).
double fourier_coeff_symmetric(double x1, double x2, int k);

// CPMG (two pulses per period at 1/4 and 3/4): f_0 = 0, f_k = 4 sin(k pi/2)/(k pi).
double cpmg_coeff(int k);
inline constexpr std::array<double, 2> cpmg_fractions{0.25, 0.75};

struct fourier_spectrum {
    std::vector<double> f;   // f_0 .. f_kmax
    double tau = 0.0;        // us
    double omega_dd = 0.0;   // 2 pi / tau, rad/us
};

inline constexpr int default_kmax = 64;

fourier_spectrum spectrum_of(const composite_timings& t, double tau,
                             int kmax = default_kmax);

}  // namespace axy
