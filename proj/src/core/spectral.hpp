#pragma once

#include <vector>

#include "core/dynamics.hpp"
#include "core/spin_bath.hpp"

namespace axy {

// Mean absolute probability difference over the shared grid.  Throws
// std::invalid_argument when the two spectra do not sit on the same grid.
double spectrum_deviation(const sensor_spectrum& a, const sensor_spectrum& b);

// Same, restricted to grid points with fmin <= freq <= fmax; throws when the
// window selects nothing.
double spectrum_deviation(const sensor_spectrum& a, const sensor_spectrum& b,
                          double fmin, double fmax);

// A resonance shows up as a local maximum of the transition probability
// (the plotted coherence signal dips there).
struct detected_dip {
    int index = -1;            // grid index of the summit
    double freq_mhz = 0.0;
    double depth = 0.0;        // prominence over the higher flanking valley
    double width_mhz = 0.0;    // span at half depth
    bool overlapping = false;  // more than one spin prediction within range
    int spin = -1;             // uniquely assigned bath spin, -1 when none
    double distance_mhz = 0.0; // |freq - predicted| for the assigned spin
};

enum class spin_resolution { resolved, unresolved, overlapping };

struct spin_status {
    int spin = -1;
    double predicted_mhz = 0.0;
    spin_resolution state = spin_resolution::unresolved;
};

struct peak_report {
    std::vector<detected_dip> dips;
    std::vector<spin_status> spins;  // spins predicted inside the grid window
    double tolerance_mhz = 0.0;      // assignment radius actually used
    int resolved = 0;                // spins matched one-to-one with a dip
    int unresolved = 0;              // spins with no dip in range
    int overlapping = 0;             // spins sharing dips with closer ones
    int unassigned_dips = 0;         // dips matching no spin prediction
};

// Dip detection plus one-to-one assignment against the bath's predicted
// resonance positions.  The sweep axis is the matched frequency k_dd*f_dd,
// so every spin's prediction lands at its effective frequency omega_j/2pi
// for any harmonic; k_dd is validated and kept for interface parity.
// A summit counts as a dip when it rises at least `prominence` above the
// higher of the two valleys within `flank` grid points.  The assignment
// radius is half the median spacing of the predicted frequencies in the
// window, floored at 1.5 grid steps.
peak_report detect_peaks(const sensor_spectrum& spectrum,
                         const bath_model& bath, int k_dd, int m_s = 1,
                         double prominence = 0.02, int flank = 15);

}  // namespace axy
