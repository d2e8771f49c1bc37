#include "core/modfunc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/constants.hpp"

namespace axy {

composite_timings make_symmetric_timings(double x1, double x2) {
    if (!(x1 > 0.0 && x1 < x2 && x2 < 0.25))
        throw std::invalid_argument(
            "axy::make_symmetric_timings: need 0 < x1 < x2 < 1/4");
    composite_timings t;
    t.x = {x1, x2, 0.25, 0.5 - x2, 0.5 - x1};
    t.symmetric = true;
    return t;
}

composite_timings equally_spaced_timings() {
    return make_symmetric_timings(0.05, 0.15);
}

void validate(const composite_timings& t) {
    double prev = 0.0;
    for (double xi : t.x) {
        if (!(xi > prev))
            throw std::invalid_argument(
                "axy::validate(composite_timings): pulse times must be "
                "strictly increasing and positive");
        prev = xi;
    }
    if (!(t.x[4] < 0.5))
        throw std::invalid_argument(
            "axy::validate(composite_timings): all times must lie in (0, 1/2)");
    if (t.symmetric) {
        if (t.x[2] != 0.25 || t.x[3] != 0.5 - t.x[1] || t.x[4] != 0.5 - t.x[0])
            throw std::invalid_argument(
                "axy::validate(composite_timings): symmetric flag set but "
                "x3 = 1/4, x4 = 1/2 - x2, x5 = 1/2 - x1 do not hold");
    }
}

std::vector<double> period_fractions(const composite_timings& t) {
    validate(t);
    std::vector<double> f(t.x.begin(), t.x.end());
    for (int i = 4; i >= 0; --i) f.push_back(1.0 - t.x[static_cast<size_t>(i)]);
    return f;
}

int modulation_value(const std::vector<double>& fracs, double t_frac) {
    if (!(t_frac >= 0.0 && t_frac < 1.0))
        throw std::domain_error("axy::modulation_value: t_frac must be in [0, 1)");
    auto n = std::upper_bound(fracs.begin(), fracs.end(), t_frac) - fracs.begin();
    return (n % 2 == 0) ? 1 : -1;
}

int modulation_value(const composite_timings& t, double t_frac) {
    return modulation_value(period_fractions(t), t_frac);
}

double fourier_coeff_numeric(const std::vector<double>& fracs, int k) {
    if (k < 0)
        throw std::invalid_argument("axy::fourier_coeff_numeric: k must be >= 0");
    // F is s_i = (-1)^i on [p_i, p_{i+1}] with p_0 = 0, p_last = 1, so the
    // integral is a sum of sine (or length, for k = 0) differences.
    std::vector<double> pts;
    pts.reserve(fracs.size() + 2);
    pts.push_back(0.0);
    pts.insert(pts.end(), fracs.begin(), fracs.end());
    pts.push_back(1.0);
    double total = 0.0;
    double sign = 1.0;
    const double w = 2.0 * pi * k;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        if (k == 0)
            total += sign * (pts[i + 1] - pts[i]);
        else
            total += sign * (std::sin(w * pts[i + 1]) - std::sin(w * pts[i])) / w;
        sign = -sign;
    }
    return 2.0 * total;
}

double fourier_coeff_numeric(const composite_timings& t, int k) {
    return fourier_coeff_numeric(period_fractions(t), k);
}

double fourier_coeff_symmetric(double x1, double x2, int k) {
    if (k < 0)
        throw std::invalid_argument("axy::fourier_coeff_symmetric: k must be >= 0");
    if (k % 2 == 0) return 0.0;
    return (4.0 / (pi * k)) * (2.0 * std::sin(2.0 * pi * k * x1) -
                               2.0 * std::sin(2.0 * pi * k * x2) +
                               std::sin(k * pi / 2.0));
}

double cpmg_coeff(int k) {
    if (k < 0)
        throw std::invalid_argument("axy::cpmg_coeff: k must be >= 0");
    if (k == 0) return 0.0;
    return 4.0 * std::sin(k * pi / 2.0) / (k * pi);
}

fourier_spectrum spectrum_of(const composite_timings& t, double tau, int kmax) {
    if (!(tau > 0.0))
        throw std::invalid_argument("axy::spectrum_of: tau must be positive");
    if (kmax < 0)
        throw std::invalid_argument("axy::spectrum_of: kmax must be >= 0");
    fourier_spectrum s;
    s.tau = tau;
    s.omega_dd = 2.0 * pi / tau;
    s.f.resize(static_cast<size_t>(kmax) + 1);
    const auto fr = period_fractions(t);
    for (int k = 0; k <= kmax; ++k)
        s.f[static_cast<size_t>(k)] = fourier_coeff_numeric(fr, k);
    return s;
}

}  // namespace axy
