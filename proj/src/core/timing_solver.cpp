#include "core/timing_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "core/constants.hpp"

namespace axy {

namespace {

struct constraint {
    int k;
    double value;
};

double residual_max(const std::vector<double>& fracs,
                    const std::vector<constraint>& cons) {
    double r = 0.0;
    for (const auto& c : cons)
        r = std::max(r, std::abs(fourier_coeff_numeric(fracs, c.k) - c.value));
    return r;
}

double residual_sym(double x1, double x2, const std::vector<constraint>& cons) {
    return residual_max(period_fractions(make_symmetric_timings(x1, x2)), cons);
}

// Damped Newton in the (x1, x2) triangle for two odd-harmonic constraints.
// d f_k / d x1 = 16 cos(2 pi k x1), d f_k / d x2 = -16 cos(2 pi k x2),
// independent of k apart from the cosine argument.
bool newton_sym(double& x1, double& x2, const std::vector<constraint>& cons) {
    for (int it = 0; it < 60; ++it) {
        const double g0 = fourier_coeff_symmetric(x1, x2, cons[0].k) - cons[0].value;
        const double g1 = fourier_coeff_symmetric(x1, x2, cons[1].k) - cons[1].value;
        const double gn = std::hypot(g0, g1);
        if (gn < 1e-13) return true;
        const double j00 = 16.0 * std::cos(2.0 * pi * cons[0].k * x1);
        const double j01 = -16.0 * std::cos(2.0 * pi * cons[0].k * x2);
        const double j10 = 16.0 * std::cos(2.0 * pi * cons[1].k * x1);
        const double j11 = -16.0 * std::cos(2.0 * pi * cons[1].k * x2);
        const double det = j00 * j11 - j01 * j10;
        if (std::abs(det) < 1e-14) return false;
        const double dx1 = (g0 * j11 - g1 * j01) / det;
        const double dx2 = (g1 * j00 - g0 * j10) / det;
        double step = 1.0;
        bool moved = false;
        for (int h = 0; h < 30; ++h, step *= 0.5) {
            const double n1 = x1 - step * dx1;
            const double n2 = x2 - step * dx2;
            if (!(n1 > 1e-9 && n1 < n2 && n2 < 0.25 - 1e-9)) continue;
            const double m0 = fourier_coeff_symmetric(n1, n2, cons[0].k) - cons[0].value;
            const double m1 = fourier_coeff_symmetric(n1, n2, cons[1].k) - cons[1].value;
            if (std::hypot(m0, m1) < gn) {
                x1 = n1;
                x2 = n2;
                moved = true;
                break;
            }
        }
        if (!moved) return false;
    }
    return false;
}

// Seeds: the equally spaced point plus a coarse grid over the triangle.
std::vector<std::pair<double, double>> symmetric_seeds() {
    std::vector<std::pair<double, double>> s{{0.05, 0.15}};
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            const double a = 0.25 * (i + 1) / 9.0;
            const double b = 0.25 * (j + 1) / 9.0;
            if (a < b) s.emplace_back(a, b);
        }
    }
    return s;
}

solve_result best_symmetric_solution(const std::vector<constraint>& cons,
                                     double& best_residual_seen) {
    solve_result best;
    best.residual = std::numeric_limits<double>::infinity();
    double closest = std::numeric_limits<double>::infinity();
    best_residual_seen = std::numeric_limits<double>::infinity();
    for (auto [a, b] : symmetric_seeds()) {
        double x1 = a, x2 = b;
        const bool ok = newton_sym(x1, x2, cons);
        const double r = residual_sym(x1, x2, cons);
        best_residual_seen = std::min(best_residual_seen, r);
        if (!ok || r > solver_tolerance) continue;
        // Among valid solutions return the one nearest the equally spaced
        // point; equal spacing has the best robustness margins.
        const double d = std::hypot(x1 - 0.05, x2 - 0.15);
        if (d < closest) {
            closest = d;
            best = {x1, x2, solve_path::numeric, r};
        }
    }
    if (!std::isfinite(best.residual)) best.x1 = -1.0;
    return best;
}

}  // namespace

double first_harmonic_limit_pi() { return 8.0 * std::cos(pi / 9.0) - 4.0; }

solve_result solve_first_harmonic(double f1_target) {
    if (!(std::abs(pi * f1_target) < first_harmonic_limit_pi()))
        throw std::domain_error(
            "axy::solve_first_harmonic: |pi*f1| must be below 8 cos(pi/9) - 4");
    const std::vector<constraint> cons{{1, f1_target}, {3, 0.0}};
    // Closed form: with d = (pi f1/4 - 1)/2 the two pulse-time sines are
    // s_{1,2} = (p +- d)/2 where p^2 = ((6d - 1)/(2d) - d^2)/3.
    const double d = (pi * f1_target / 4.0 - 1.0) / 2.0;
    const double p2 = ((6.0 * d - 1.0) / (2.0 * d) - d * d) / 3.0;
    if (p2 > 0.0) {
        const double p = std::sqrt(p2);
        const double s1 = (p + d) / 2.0;
        const double s2 = (p - d) / 2.0;
        if (std::abs(s1) <= 1.0 && std::abs(s2) <= 1.0) {
            const double x1 = std::asin(s1) / (2.0 * pi);
            const double x2 = std::asin(s2) / (2.0 * pi);
            if (x1 > 0.0 && x1 < x2 && x2 < 0.25) {
                const double r = residual_sym(x1, x2, cons);
                if (r < solver_tolerance)
                    return {x1, x2, solve_path::closed_form, r};
            }
        }
    }
    double best_seen = 0.0;
    solve_result res = best_symmetric_solution(cons, best_seen);
    if (res.x1 < 0.0) {
        std::ostringstream msg;
        msg << "axy::solve_first_harmonic: no solution found, best residual "
            << best_seen;
        throw std::runtime_error(msg.str());
    }
    return res;
}

solve_result solve_third_harmonic(double f3_target) {
    if (!(std::abs(f3_target) < 4.0 / pi))
        throw std::domain_error(
            "axy::solve_third_harmonic: |f3| must be below 4/pi");
    const std::vector<constraint> cons{{1, 0.0}, {3, f3_target}};
    const double root = std::sqrt(5.0 + pi * f3_target);
    const double q1 = 4.0 / (root - 1.0);
    const double q2 = 4.0 / (root + 1.0);
    const double x1 = 0.25 - std::atan(std::sqrt(q1 * q1 - 1.0)) / (2.0 * pi);
    const double x2 = 0.25 - std::atan(std::sqrt(q2 * q2 - 1.0)) / (2.0 * pi);
    if (x1 > 0.0 && x1 < x2 && x2 < 0.25) {
        const double r = residual_sym(x1, x2, cons);
        if (r < solver_tolerance) return {x1, x2, solve_path::closed_form, r};
    }
    double best_seen = 0.0;
    solve_result res = best_symmetric_solution(cons, best_seen);
    if (res.x1 < 0.0) {
        std::ostringstream msg;
        msg << "axy::solve_third_harmonic: no solution found, best residual "
            << best_seen;
        throw std::runtime_error(msg.str());
    }
    return res;
}

namespace {

// General path: all five first-composite times free, mirrored second
// composite; constraints are the harmonic targets plus f0 = 0.  Numeric
// Jacobian, damped Gauss-Newton step via normal equations.
struct general_problem {
    std::vector<constraint> cons;

    std::vector<double> value(const std::array<double, 5>& x) const {
        composite_timings t;
        t.x = x;
        t.symmetric = false;
        const auto fr = period_fractions(t);
        std::vector<double> g(cons.size());
        for (size_t i = 0; i < cons.size(); ++i)
            g[i] = fourier_coeff_numeric(fr, cons[i].k) - cons[i].value;
        return g;
    }
};

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return std::sqrt(s);
}

bool ordered(const std::array<double, 5>& x) {
    double prev = 1e-9;
    for (double xi : x) {
        if (!(xi > prev)) return false;
        prev = xi;
    }
    return x[4] < 0.5 - 1e-9;
}

bool newton_general(std::array<double, 5>& x, const general_problem& prob) {
    const size_t m = prob.cons.size();
    for (int it = 0; it < 80; ++it) {
        auto g = prob.value(x);
        const double gn = norm2(g);
        if (gn < 1e-12) return true;
        // numeric Jacobian, central differences
        double jac[5][5] = {};
        const double h = 1e-7;
        for (int c = 0; c < 5; ++c) {
            auto xp = x, xm = x;
            xp[static_cast<size_t>(c)] += h;
            xm[static_cast<size_t>(c)] -= h;
            if (!ordered(xp) || !ordered(xm)) return false;
            const auto gp = prob.value(xp);
            const auto gm = prob.value(xm);
            for (size_t r = 0; r < m; ++r)
                jac[r][c] = (gp[r] - gm[r]) / (2.0 * h);
        }
        // solve J^T J dx = J^T g (5x5, Gaussian elimination with pivoting)
        double a[5][6] = {};
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j)
                for (size_t r = 0; r < m; ++r) a[i][j] += jac[r][i] * jac[r][j];
            a[i][i] += 1e-12;
            for (size_t r = 0; r < m; ++r) a[i][5] += jac[r][i] * g[r];
        }
        for (int col = 0; col < 5; ++col) {
            int piv = col;
            for (int r = col + 1; r < 5; ++r)
                if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
            if (std::abs(a[piv][col]) < 1e-16) return false;
            std::swap(a[piv], a[col]);
            for (int r = 0; r < 5; ++r) {
                if (r == col) continue;
                const double fct = a[r][col] / a[col][col];
                for (int cc = col; cc < 6; ++cc) a[r][cc] -= fct * a[col][cc];
            }
        }
        std::array<double, 5> dx{};
        for (int i = 0; i < 5; ++i) dx[static_cast<size_t>(i)] = a[i][5] / a[i][i];
        double step = 1.0;
        bool moved = false;
        for (int hh = 0; hh < 30; ++hh, step *= 0.5) {
            auto nx = x;
            for (int i = 0; i < 5; ++i) nx[static_cast<size_t>(i)] -= step * dx[static_cast<size_t>(i)];
            if (!ordered(nx)) continue;
            if (norm2(prob.value(nx)) < gn) {
                x = nx;
                moved = true;
                break;
            }
        }
        if (!moved) return false;
    }
    return false;
}

}  // namespace

general_solve_result solve_general(const harmonic_target& target) {
    for (int z : target.zeroed)
        if (z == target.k_dd)
            throw std::invalid_argument(
                "axy::solve_general: tuned harmonic appears in the zeroed list");
    // The symmetric two-variable family already zeroes every even harmonic,
    // so it applies when the tuned harmonic is odd and at most one odd
    // harmonic is pinned to zero.  When it yields nothing we still try the
    // five-variable family below before declaring the target infeasible.
    std::vector<constraint> odd_cons{{target.k_dd, target.f_target}};
    for (int z : target.zeroed) {
        if (z % 2 == 0) continue;   // even harmonics vanish by symmetry
        odd_cons.push_back({z, 0.0});
    }
    if (target.k_dd % 2 == 1 && odd_cons.size() <= 2) {
        if (odd_cons.size() == 1)
            odd_cons.push_back({target.k_dd == 3 ? 1 : 3, 0.0});
        double best_seen = 0.0;
        const solve_result r = best_symmetric_solution(odd_cons, best_seen);
        if (r.x1 >= 0.0) {
            general_solve_result out;
            out.timings = make_symmetric_timings(r.x1, r.x2);
            out.residual = r.residual;
            return out;
        }
    }

    general_problem prob;
    prob.cons.push_back({0, 0.0});
    prob.cons.push_back({target.k_dd, target.f_target});
    for (int z : target.zeroed) prob.cons.push_back({z, 0.0});
    if (prob.cons.size() > 5)
        throw std::invalid_argument(
            "axy::solve_general: at most 3 zeroed harmonics plus the tuned one");

    double best_seen = std::numeric_limits<double>::infinity();
    general_solve_result best;
    bool found = false;
    double closest = std::numeric_limits<double>::infinity();
    for (auto [a, b] : symmetric_seeds()) {
        std::array<double, 5> x{a, b, 0.25, 0.5 - b, 0.5 - a};
        if (!ordered(x)) continue;
        const bool ok = newton_general(x, prob);
        composite_timings t;
        t.x = x;
        t.symmetric = false;
        const double r = residual_max(period_fractions(t), prob.cons);
        best_seen = std::min(best_seen, r);
        if (!ok || r > solver_tolerance) continue;
        const double d = std::hypot(x[0] - 0.05, x[1] - 0.15);
        if (d < closest) {
            closest = d;
            best.timings = t;
            best.residual = r;
            found = true;
        }
    }
    if (!found) {
        std::ostringstream msg;
        msg << "axy::solve_general: no solution from any seed, best residual "
            << best_seen;
        throw std::runtime_error(msg.str());
    }
    return best;
}

}  // namespace axy
