#include "core/spin_bath.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "core/constants.hpp"
#include "core/rng.hpp"

namespace axy {

Eigen::Vector3d nuclear_spin::hyperfine() const {
    return hyperfine_mhz * mhz_to_rad_us;
}

Eigen::Vector3d hyperfine_from_position(const Eigen::Vector3d& r, double gamma_j) {
    const double rn = r.norm();
    if (!(rn > 0.0))
        throw std::invalid_argument(
            "axy::hyperfine_from_position: nucleus at the NV site");
    const Eigen::Vector3d rh = r / rn;
    const Eigen::Vector3d zh = Eigen::Vector3d::UnitZ();
    const double pref =
        hyperfine_prefactor * (gamma_j / gamma_c13) / (rn * rn * rn);
    return pref * (zh - 3.0 * rh.z() * rh);
}

spin_frame effective_frame(const nuclear_spin& spin, double b_z, int m_s) {
    if (m_s != 1 && m_s != -1)
        throw std::invalid_argument("axy::effective_frame: m_s must be +1 or -1");
    if (!(b_z > 0.0))
        throw std::invalid_argument("axy::effective_frame: B_z must be positive");
    const Eigen::Vector3d a = spin.hyperfine();
    spin_frame f;
    f.omega_vec = spin.gamma * b_z * Eigen::Vector3d::UnitZ() - 0.5 * m_s * a;
    f.omega = f.omega_vec.norm();
    if (!(f.omega > 0.0))
        throw std::runtime_error(
            "axy::effective_frame: degenerate frame, |omega| = 0");
    f.omega_hat = f.omega_vec / f.omega;
    f.a_perp = a - a.dot(f.omega_hat) * f.omega_hat;
    return f;
}

Eigen::Matrix3d dipolar_tensor(const dipolar_pair& pair, dipolar_mode mode) {
    switch (mode) {
        case dipolar_mode::off:
            return Eigen::Matrix3d::Zero();
        case dipolar_mode::secular: {
            // high-field truncation: b (1 - 3 n_z^2) [I_i^z I_j^z - (I_i^x I_j^x + I_i^y I_j^y)/2]
            const double w = pair.b * (1.0 - 3.0 * pair.n_hat.z() * pair.n_hat.z());
            Eigen::Matrix3d t = Eigen::Matrix3d::Zero();
            t(0, 0) = -0.5 * w;
            t(1, 1) = -0.5 * w;
            t(2, 2) = w;
            return t;
        }
        case dipolar_mode::full:
        default:
            return pair.b * (Eigen::Matrix3d::Identity() -
                             3.0 * pair.n_hat * pair.n_hat.transpose());
    }
}

dipolar_pair dipolar_coupling(const nuclear_spin& a, const nuclear_spin& b,
                              int i, int j) {
    const Eigen::Vector3d d = b.position - a.position;
    const double rn = d.norm();
    if (!(rn > 0.0))
        throw std::invalid_argument("axy::dipolar_coupling: coincident nuclei");
    dipolar_pair p;
    p.i = i;
    p.j = j;
    p.n_hat = d / rn;
    p.b = cc_dipolar_prefactor * (a.gamma / gamma_c13) * (b.gamma / gamma_c13) /
          (rn * rn * rn);
    return p;
}

void compute_pairs(bath_model& bath) {
    bath.pairs.clear();
    const int n = static_cast<int>(bath.spins.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            bath.pairs.push_back(
                dipolar_coupling(bath.spins[size_t(i)], bath.spins[size_t(j)], i, j));
    std::sort(bath.pairs.begin(), bath.pairs.end(),
              [](const dipolar_pair& a, const dipolar_pair& b) {
                  if (std::abs(a.b) != std::abs(b.b))
                      return std::abs(a.b) > std::abs(b.b);
                  if (a.i != b.i) return a.i < b.i;
                  return a.j < b.j;
              });
}

bath_model generate_lattice_bath(std::uint64_t seed, double radius_nm,
                                 double abundance, double b_z) {
    if (!(radius_nm > 0.0))
        throw std::invalid_argument("axy::generate_lattice_bath: radius must be positive");
    if (!(abundance >= 0.0 && abundance <= 1.0))
        throw std::invalid_argument(
            "axy::generate_lattice_bath: abundance must be in [0, 1]");

    bath_model bath;
    bath.seed = seed;
    bath.b_z = b_z;
    bath.abundance = abundance;
    bath.radius_nm = radius_nm;

    // conventional cell: fcc lattice with a two-atom basis at (0,0,0) and (1/4,1/4,1/4)
    static const double fcc[4][3] = {
        {0.0, 0.0, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}};
    const double a = diamond_cell;
    const double vacancy = 0.25;   // nm, excluded region around the NV
    const int ncell = static_cast<int>(std::ceil(radius_nm / a)) + 1;

    std::mt19937_64 gen(derive_seed(seed, "bath"));
    for (int ci = -ncell; ci <= ncell; ++ci) {
        for (int cj = -ncell; cj <= ncell; ++cj) {
            for (int ck = -ncell; ck <= ncell; ++ck) {
                for (int basis = 0; basis < 8; ++basis) {
                    const double off = (basis >= 4) ? 0.25 : 0.0;
                    const int fb = basis % 4;
                    const Eigen::Vector3d pos(a * (ci + fcc[fb][0] + off),
                                              a * (cj + fcc[fb][1] + off),
                                              a * (ck + fcc[fb][2] + off));
                    const double rn = pos.norm();
                    if (rn > radius_nm || rn < vacancy) continue;
                    // one draw per candidate site in a fixed enumeration order
                    const double u = uniform01(gen);
                    if (u >= abundance) continue;
                    nuclear_spin s;
                    s.position = pos;
                    s.gamma = gamma_c13;
                    s.hyperfine_mhz =
                        hyperfine_from_position(pos, s.gamma) / mhz_to_rad_us;
                    bath.spins.push_back(s);
                }
            }
        }
    }
    compute_pairs(bath);
    cluster_partition(bath, 1);
    return bath;
}

void cluster_partition(bath_model& bath, int max_size) {
    if (max_size < 1)
        throw std::invalid_argument("axy::cluster_partition: max_size must be >= 1");
    const int n = static_cast<int>(bath.spins.size());
    std::vector<int> root(static_cast<size_t>(n));
    std::vector<int> size(static_cast<size_t>(n), 1);
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](int x) {
        while (root[size_t(x)] != x) {
            root[size_t(x)] = root[size_t(root[size_t(x)])];
            x = root[size_t(x)];
        }
        return x;
    };
    for (const auto& p : bath.pairs) {
        const int ra = find(p.i), rb = find(p.j);
        if (ra == rb) continue;
        if (size[size_t(ra)] + size[size_t(rb)] > max_size) continue;
        // deterministic union: smaller root index wins
        const int keep = std::min(ra, rb), drop = std::max(ra, rb);
        root[size_t(drop)] = keep;
        size[size_t(keep)] += size[size_t(drop)];
    }
    std::vector<std::vector<int>> groups(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) groups[size_t(find(i))].push_back(i);
    bath.clusters.clear();
    for (auto& g : groups)
        if (!g.empty()) bath.clusters.push_back(std::move(g));
}

addressability_report addressability(const bath_model& bath, int target_index,
                                     int m_s, int k_dd, double f_kdd,
                                     double margin) {
    if (target_index < 0 || target_index >= static_cast<int>(bath.spins.size()))
        throw std::invalid_argument("axy::addressability: bad target index");
    addressability_report rep;
    rep.target = target_index;
    rep.margin = margin;
    const auto target_frame =
        effective_frame(bath.spins[size_t(target_index)], bath.b_z, m_s);
    for (int j = 0; j < static_cast<int>(bath.spins.size()); ++j) {
        const auto& s = bath.spins[size_t(j)];
        const auto f = effective_frame(s, bath.b_z, m_s);
        addressability_entry e;
        e.index = j;
        const double aj = f.a_perp.norm();
        e.static_ratio = aj > 0.0
                             ? std::abs(s.gamma * bath.b_z) / (k_dd * aj)
                             : std::numeric_limits<double>::infinity();
        if (j == target_index)
            e.spectral_ratio = std::numeric_limits<double>::infinity();
        else
            e.spectral_ratio =
                aj > 0.0 ? std::abs(f.omega - target_frame.omega) /
                               (std::abs(f_kdd) * aj)
                         : std::numeric_limits<double>::infinity();
        e.flagged = e.static_ratio < margin || e.spectral_ratio < margin;
        rep.entries.push_back(e);
    }
    return rep;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void save_bath(const bath_model& bath, std::ostream& out) {
    out << "# axy bath v1\n";
    out << "# seed " << bath.seed << "\n";
    out << "# b_z_gauss " << fmt17(bath.b_z) << "\n";
    out << "# abundance " << fmt17(bath.abundance) << "\n";
    out << "# radius_nm " << fmt17(bath.radius_nm) << "\n";
    out << "# count " << bath.spins.size() << "\n";
    out << "# columns index x_nm y_nm z_nm Ax_MHz Ay_MHz Az_MHz\n";
    for (size_t i = 0; i < bath.spins.size(); ++i) {
        const auto& s = bath.spins[i];
        out << i;
        for (int c = 0; c < 3; ++c) out << ' ' << fmt17(s.position[c]);
        for (int c = 0; c < 3; ++c) out << ' ' << fmt17(s.hyperfine_mhz[c]);
        out << "\n";
    }
}

void save_bath_file(const bath_model& bath, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("axy::save_bath_file: cannot open " + path);
    save_bath(bath, out);
}

bath_model load_bath(std::istream& in) {
    bath_model bath;
    std::string line;
    bool seen_magic = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key;
            ls >> key;
            if (key == "axy") { seen_magic = true; continue; }
            if (key == "seed") ls >> bath.seed;
            else if (key == "b_z_gauss") ls >> bath.b_z;
            else if (key == "abundance") ls >> bath.abundance;
            else if (key == "radius_nm") ls >> bath.radius_nm;
            continue;
        }
        std::istringstream ls(line);
        long idx = 0;
        nuclear_spin s;
        s.gamma = gamma_c13;
        if (!(ls >> idx >> s.position[0] >> s.position[1] >> s.position[2] >>
              s.hyperfine_mhz[0] >> s.hyperfine_mhz[1] >> s.hyperfine_mhz[2]))
            throw std::runtime_error("axy::load_bath: malformed spin line: " + line);
        bath.spins.push_back(s);
    }
    if (!seen_magic)
        throw std::runtime_error("axy::load_bath: missing '# axy bath' header");
    compute_pairs(bath);
    cluster_partition(bath, 1);
    return bath;
}

bath_model load_bath_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("axy::load_bath_file: cannot open " + path);
    return load_bath(in);
}

}  // namespace axy
