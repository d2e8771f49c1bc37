#pragma once

#include <vector>

#include "core/modfunc.hpp"

namespace axy {

// Largest reachable |pi * f1| under the symmetric two-variable construction
// with f3 pinned to zero; |f1| itself is bounded by this over pi (~1.1196).
double first_harmonic_limit_pi();

// Residual bound every solver output must satisfy against the fourier oracle.
inline constexpr double solver_tolerance = 1e-8;

enum class solve_path { closed_form, numeric };

struct solve_result {
    double x1 = 0.0;
    double x2 = 0.0;
    solve_path path = solve_path::closed_form;
    double residual = 0.0;   // worst oracle residual over the constrained harmonics
};

// Timings with f1 = f1_target and f3 = 0 (even harmonics vanish by
// symmetry).  Closed form first; if its oracle residual exceeds
// solver_tolerance the multi-start Newton fallback takes over.
// Throws std::domain_error when |pi*f1_target| >= first_harmonic_limit_pi().
solve_result solve_first_harmonic(double f1_target);

// Timings with f1 = 0 and f3 = f3_target, |f3_target| < 4/pi:
//   x_j = 1/4 - arctan(sqrt(q_j^2 - 1))/(2 pi),  q_j = 4/[sqrt(5 + pi f3) + (-1)^j]
solve_result solve_third_harmonic(double f3_target);

struct harmonic_target {
    int k_dd = 1;                // tuned harmonic
    double f_target = 0.0;
    std::vector<int> zeroed;     // harmonics forced to zero; k_dd must not appear
};

struct general_solve_result {
    composite_timings timings;
    double residual = 0.0;
};

// Numeric-only root finding for an arbitrary harmonic target set.  Uses the
// symmetric two-variable form when the constraints allow it (all even
// harmonics vanish automatically), otherwise all five pulse times are free
// and f0 = 0 joins the constraint set.  Throws std::runtime_error with the
// best residual seen when no multi-start seed converges.
general_solve_result solve_general(const harmonic_target& target);

}  // namespace axy
