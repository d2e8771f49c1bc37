#include "core/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "core/constants.hpp"

namespace axy {

namespace {

void check_same_grid(const sensor_spectrum& a, const sensor_spectrum& b) {
    if (a.points.empty() || b.points.empty())
        throw std::invalid_argument("axy::spectrum_deviation: empty spectrum");
    if (a.points.size() != b.points.size())
        throw std::invalid_argument(
            "axy::spectrum_deviation: spectra have different grid sizes");
    for (size_t i = 0; i < a.points.size(); ++i) {
        const double fa = a.points[i].freq_mhz, fb = b.points[i].freq_mhz;
        if (std::abs(fa - fb) > 1e-12 * std::max(1.0, std::abs(fa)))
            throw std::invalid_argument(
                "axy::spectrum_deviation: spectra sit on different grids");
    }
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double spectrum_deviation(const sensor_spectrum& a, const sensor_spectrum& b) {
    check_same_grid(a, b);
    double sum = 0.0;
    for (size_t i = 0; i < a.points.size(); ++i)
        sum += std::abs(a.points[i].probability - b.points[i].probability);
    return sum / double(a.points.size());
}

double spectrum_deviation(const sensor_spectrum& a, const sensor_spectrum& b,
                          double fmin, double fmax) {
    check_same_grid(a, b);
    double sum = 0.0;
    size_t count = 0;
    for (size_t i = 0; i < a.points.size(); ++i) {
        const double f = a.points[i].freq_mhz;
        if (f < fmin || f > fmax) continue;
        sum += std::abs(a.points[i].probability - b.points[i].probability);
        ++count;
    }
    if (count == 0)
        throw std::invalid_argument(
            "axy::spectrum_deviation: window selects no grid points");
    return sum / double(count);
}

peak_report detect_peaks(const sensor_spectrum& spectrum,
                         const bath_model& bath, int k_dd, int m_s,
                         double prominence, int flank) {
    const auto& pts = spectrum.points;
    if (pts.empty())
        throw std::invalid_argument("axy::detect_peaks: empty spectrum");
    if (k_dd < 1)
        throw std::invalid_argument("axy::detect_peaks: k_dd must be >= 1");
    if (!(prominence > 0.0))
        throw std::invalid_argument(
            "axy::detect_peaks: prominence must be positive");
    if (flank < 1)
        throw std::invalid_argument("axy::detect_peaks: flank must be >= 1");

    const int n = int(pts.size());
    peak_report report;

    // Summits of the transition probability with enough prominence over the
    // higher flanking valley.
    for (int i = 1; i + 1 < n; ++i) {
        const double p = pts[size_t(i)].probability;
        if (!(p >= pts[size_t(i - 1)].probability &&
              p > pts[size_t(i + 1)].probability))
            continue;
        double left = p, right = p;
        for (int j = std::max(0, i - flank); j <= i; ++j)
            left = std::min(left, pts[size_t(j)].probability);
        for (int j = i; j <= std::min(n - 1, i + flank); ++j)
            right = std::min(right, pts[size_t(j)].probability);
        const double depth = p - std::max(left, right);
        if (depth < prominence) continue;

        detected_dip dip;
        dip.index = i;
        dip.freq_mhz = pts[size_t(i)].freq_mhz;
        dip.depth = depth;

        // Width at half depth, interpolated between grid points and capped
        // at the flank window.
        const double level = p - 0.5 * depth;
        double f_lo = pts[size_t(std::max(0, i - flank))].freq_mhz;
        for (int j = i; j > std::max(0, i - flank); --j) {
            if (pts[size_t(j - 1)].probability <= level) {
                const double p1 = pts[size_t(j)].probability;
                const double p0 = pts[size_t(j - 1)].probability;
                const double f1 = pts[size_t(j)].freq_mhz;
                const double f0 = pts[size_t(j - 1)].freq_mhz;
                f_lo = f1 + (f0 - f1) * (p1 - level) / (p1 - p0);
                break;
            }
        }
        double f_hi = pts[size_t(std::min(n - 1, i + flank))].freq_mhz;
        for (int j = i; j < std::min(n - 1, i + flank); ++j) {
            if (pts[size_t(j + 1)].probability <= level) {
                const double p1 = pts[size_t(j)].probability;
                const double p0 = pts[size_t(j + 1)].probability;
                const double f1 = pts[size_t(j)].freq_mhz;
                const double f0 = pts[size_t(j + 1)].freq_mhz;
                f_hi = f1 + (f0 - f1) * (p1 - level) / (p1 - p0);
                break;
            }
        }
        dip.width_mhz = f_hi - f_lo;
        report.dips.push_back(dip);
    }

    // Predicted resonance positions of the bath spins inside the window.
    const double f_first = pts.front().freq_mhz;
    const double f_last = pts.back().freq_mhz;
    for (size_t s = 0; s < bath.spins.size(); ++s) {
        const spin_frame frame = effective_frame(bath.spins[s], bath.b_z, m_s);
        const double predicted = frame.omega / (2.0 * pi);
        if (predicted < f_first || predicted > f_last) continue;
        spin_status st;
        st.spin = int(s);
        st.predicted_mhz = predicted;
        report.spins.push_back(st);
    }

    // Assignment radius: half the median neighbour spacing of the predicted
    // positions, floored at 1.5 grid steps so a lone spin still matches the
    // dip sitting on its prediction.
    std::vector<double> steps;
    for (int i = 1; i < n; ++i)
        steps.push_back(pts[size_t(i)].freq_mhz - pts[size_t(i - 1)].freq_mhz);
    const double grid_step = steps.empty() ? 0.0 : median(steps);
    double tol = 1.5 * grid_step;
    if (report.spins.size() >= 2) {
        std::vector<double> predicted;
        for (const auto& st : report.spins) predicted.push_back(st.predicted_mhz);
        std::sort(predicted.begin(), predicted.end());
        std::vector<double> gaps;
        for (size_t i = 1; i < predicted.size(); ++i)
            gaps.push_back(predicted[i] - predicted[i - 1]);
        tol = std::max(tol, 0.5 * median(gaps));
    }
    report.tolerance_mhz = tol;

    // Candidate pairs within the radius, matched one-to-one by ascending
    // distance.
    std::vector<std::tuple<double, size_t, size_t>> cand;
    std::vector<int> dip_candidates(report.dips.size(), 0);
    std::vector<int> spin_candidates(report.spins.size(), 0);
    for (size_t d = 0; d < report.dips.size(); ++d)
        for (size_t s = 0; s < report.spins.size(); ++s) {
            const double dist =
                std::abs(report.dips[d].freq_mhz - report.spins[s].predicted_mhz);
            if (dist > tol) continue;
            cand.emplace_back(dist, d, s);
            ++dip_candidates[d];
            ++spin_candidates[s];
        }
    std::sort(cand.begin(), cand.end());
    std::vector<bool> dip_taken(report.dips.size(), false);
    std::vector<bool> spin_taken(report.spins.size(), false);
    for (const auto& [dist, d, s] : cand) {
        if (dip_taken[d] || spin_taken[s]) continue;
        dip_taken[d] = true;
        spin_taken[s] = true;
        report.dips[d].spin = report.spins[s].spin;
        report.dips[d].distance_mhz = dist;
        report.spins[s].state = spin_resolution::resolved;
    }

    for (size_t d = 0; d < report.dips.size(); ++d) {
        report.dips[d].overlapping = dip_candidates[d] > 1;
        if (report.dips[d].spin < 0) ++report.unassigned_dips;
    }
    for (size_t s = 0; s < report.spins.size(); ++s) {
        if (report.spins[s].state == spin_resolution::resolved) {
            ++report.resolved;
        } else if (spin_candidates[s] > 0) {
            report.spins[s].state = spin_resolution::overlapping;
            ++report.overlapping;
        } else {
            ++report.unresolved;
        }
    }
    return report;
}

}  // namespace axy
