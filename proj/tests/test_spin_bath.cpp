#include "core/spin_bath.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "core/constants.hpp"
#include "doctest.h"

using namespace axy;

namespace {

nuclear_spin spin_at(const Eigen::Vector3d& pos) {
    nuclear_spin s;
    s.position = pos;
    s.gamma = gamma_c13;
    s.hyperfine_mhz = hyperfine_from_position(pos, s.gamma) / mhz_to_rad_us;
    return s;
}

// true when 4*pos/a lands on the diamond lattice: integer coordinates, all
// even or all odd
bool on_diamond_lattice(const Eigen::Vector3d& pos) {
    Eigen::Vector3d q = 4.0 * pos / diamond_cell;
    long n[3];
    for (int c = 0; c < 3; ++c) {
        n[c] = std::lround(q[c]);
        if (std::abs(q[c] - double(n[c])) > 1e-6) return false;
    }
    const bool even = (n[0] % 2 == 0);
    for (int c = 0; c < 3; ++c)
        if ((std::abs(n[c]) % 2 == 0) != even) return false;
    return true;
}

}  // namespace

TEST_CASE("hyperfine field of axial and transverse sites") {
    const double d = 1.5;
    const double pref = hyperfine_prefactor / (d * d * d);
    // on the NV axis the dipole field is -2 pref z_hat
    const auto az = hyperfine_from_position({0, 0, d}, gamma_c13);
    CHECK(az.x() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(az.y() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(az.z() == doctest::Approx(-2.0 * pref));
    // in the transverse plane it is +pref z_hat
    const auto ax = hyperfine_from_position({d, 0, 0}, gamma_c13);
    CHECK(ax.x() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(ax.z() == doctest::Approx(pref));
    // at the magic angle cos^2 = 1/3 the axial component vanishes
    const double ct = 1.0 / std::sqrt(3.0), st = std::sqrt(2.0 / 3.0);
    const auto am = hyperfine_from_position({d * st, 0, d * ct}, gamma_c13);
    CHECK(am.z() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(hyperfine_from_position({0, 0, 0}, gamma_c13),
                    std::invalid_argument);
}

TEST_CASE("hyperfine falls off as r^-3 and rotates with the site") {
    const Eigen::Vector3d r(0.9, -0.4, 1.1);
    const auto a1 = hyperfine_from_position(r, gamma_c13);
    const auto a2 = hyperfine_from_position(2.0 * r, gamma_c13);
    for (int c = 0; c < 3; ++c) CHECK(a2[c] == doctest::Approx(a1[c] / 8.0));
    // rotating the site about the NV axis rotates the coupling the same way
    const double th = 0.73;
    Eigen::Matrix3d rz;
    rz << std::cos(th), -std::sin(th), 0, std::sin(th), std::cos(th), 0, 0, 0, 1;
    const auto ar = hyperfine_from_position(rz * r, gamma_c13);
    const Eigen::Vector3d expect = rz * a1;
    for (int c = 0; c < 3; ++c) CHECK(ar[c] == doctest::Approx(expect[c]));
}

TEST_CASE("effective frame of an uncoupled spin is the bare Larmor frame") {
    nuclear_spin s;
    s.position = {0, 0, 3.0};
    s.gamma = gamma_c13;
    s.hyperfine_mhz.setZero();
    const auto f = effective_frame(s, 200.0, -1);
    CHECK(f.omega / (2 * pi) == doctest::Approx(0.2141683).epsilon(1e-5));
    CHECK(f.omega_hat.z() == doctest::Approx(1.0));
    CHECK(f.a_perp.norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("effective frame of the reference off-axis spin") {
    // 1.5 nm from the NV, 45 degrees off axis, 200 G, m_s = +1 branch
    const double d = 1.5, c = std::sqrt(0.5);
    const auto s = spin_at({d * c, 0, d * c});
    const auto f = effective_frame(s, 200.0, +1);
    CHECK(f.omega / (2 * pi) == doctest::Approx(0.2156867).epsilon(1e-4));
    CHECK(f.a_perp.norm() / (2 * pi) == doctest::Approx(8.7755e-3).epsilon(1e-3));
    // perpendicular component is orthogonal to the precession axis
    CHECK(std::abs(f.a_perp.dot(f.omega_hat)) < 1e-12);
    // weak-coupling measure used for addressability checks
    CHECK(f.a_perp.norm() / f.omega < 0.05);
    CHECK_THROWS_AS(effective_frame(s, 200.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(effective_frame(s, -5.0, 1), std::invalid_argument);
}

TEST_CASE("axial spin keeps a_perp = 0 on both branches") {
    const auto s = spin_at({0, 0, 1.2});
    for (int m_s : {-1, +1}) {
        const auto f = effective_frame(s, 200.0, m_s);
        CHECK(f.a_perp.norm() == doctest::Approx(0.0).epsilon(1e-13));
    }
}

TEST_CASE("dipolar coupling strength at the nearest-neighbour distance") {
    const double bond = diamond_cell * std::sqrt(3.0) / 4.0;
    const auto a = spin_at({1.0, 0, 0});
    const auto b = spin_at({1.0 + bond, 0, 0});
    const auto p = dipolar_coupling(a, b, 0, 1);
    CHECK(p.b / (2 * pi) == doctest::Approx(2.0566e-3).epsilon(1e-3));
    CHECK(p.n_hat.x() == doctest::Approx(1.0));
    // doubling the separation cuts the coupling by 8
    const auto c = spin_at({1.0 + 2 * bond, 0, 0});
    CHECK(dipolar_coupling(a, c, 0, 2).b == doctest::Approx(p.b / 8.0));
    CHECK_THROWS_AS(dipolar_coupling(a, a, 0, 0), std::invalid_argument);
}

TEST_CASE("dipolar tensor variants") {
    dipolar_pair p;
    p.b = 0.013;
    p.n_hat = Eigen::Vector3d::UnitZ();
    const auto full = dipolar_tensor(p, dipolar_mode::full);
    CHECK(full(0, 0) == doctest::Approx(p.b));
    CHECK(full(1, 1) == doctest::Approx(p.b));
    CHECK(full(2, 2) == doctest::Approx(-2.0 * p.b));
    CHECK(full(0, 1) == doctest::Approx(0.0));
    // along z the secular truncation is exact
    const auto sec = dipolar_tensor(p, dipolar_mode::secular);
    CHECK((sec - full).norm() == doctest::Approx(0.0).epsilon(1e-14));
    // transverse pair: they differ, but the zz entries still agree
    p.n_hat = Eigen::Vector3d::UnitX();
    const auto fx = dipolar_tensor(p, dipolar_mode::full);
    const auto sx = dipolar_tensor(p, dipolar_mode::secular);
    CHECK(fx(0, 0) == doctest::Approx(-2.0 * p.b));
    CHECK(sx(2, 2) == doctest::Approx(fx(2, 2)));
    CHECK(sx(0, 0) == doctest::Approx(-0.5 * p.b));
    CHECK(dipolar_tensor(p, dipolar_mode::off).norm() == 0.0);
    // full tensor is traceless for any orientation
    p.n_hat = Eigen::Vector3d(0.3, -0.8, 0.52).normalized();
    CHECK(dipolar_tensor(p, dipolar_mode::full).trace() ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("lattice bath sites are valid diamond sites in the sampling shell") {
    const auto bath = generate_lattice_bath(11, 1.2, 1.0, 200.0);
    REQUIRE(bath.spins.size() > 100);
    for (const auto& s : bath.spins) {
        const double rn = s.position.norm();
        CHECK(rn <= 1.2);
        CHECK(rn >= 0.25);
        CHECK(on_diamond_lattice(s.position));
        // stored couplings agree with the site position
        const Eigen::Vector3d expect =
            hyperfine_from_position(s.position, s.gamma) / mhz_to_rad_us;
        for (int c = 0; c < 3; ++c)
            CHECK(s.hyperfine_mhz[c] == doctest::Approx(expect[c]));
    }
    // no duplicate sites
    std::set<std::array<long, 3>> seen;
    for (const auto& s : bath.spins) {
        std::array<long, 3> key;
        for (int c = 0; c < 3; ++c)
            key[size_t(c)] = std::lround(4.0 * s.position[c] / diamond_cell);
        CHECK(seen.insert(key).second);
    }
}

TEST_CASE("bath sampling is seeded and abundance-controlled") {
    const auto a = generate_lattice_bath(5, 2.0, 0.011, 200.0);
    const auto b = generate_lattice_bath(5, 2.0, 0.011, 200.0);
    REQUIRE(a.spins.size() == b.spins.size());
    for (size_t i = 0; i < a.spins.size(); ++i)
        CHECK(a.spins[i].position == b.spins[i].position);
    // natural abundance in a 2 nm ball: mean occupancy is around 65 sites
    CHECK(a.spins.size() > 20);
    CHECK(a.spins.size() < 140);
    const auto c = generate_lattice_bath(6, 2.0, 0.011, 200.0);
    bool differs = c.spins.size() != a.spins.size();
    for (size_t i = 0; !differs && i < a.spins.size(); ++i)
        differs = a.spins[i].position != c.spins[i].position;
    CHECK(differs);
    CHECK(generate_lattice_bath(5, 1.5, 0.0, 200.0).spins.empty());
    CHECK_THROWS_AS(generate_lattice_bath(5, -1.0, 0.5, 200.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_lattice_bath(5, 1.0, 1.5, 200.0),
                    std::invalid_argument);
}

TEST_CASE("pair list is sorted by coupling strength") {
    const auto bath = generate_lattice_bath(7, 1.5, 0.05, 200.0);
    REQUIRE(bath.pairs.size() ==
            bath.spins.size() * (bath.spins.size() - 1) / 2);
    for (size_t i = 1; i < bath.pairs.size(); ++i)
        CHECK(std::abs(bath.pairs[i - 1].b) >= std::abs(bath.pairs[i].b));
}

TEST_CASE("cluster partition respects the size cap and covers every spin") {
    auto bath = generate_lattice_bath(9, 2.0, 0.02, 200.0);
    const int n = int(bath.spins.size());
    REQUIRE(n >= 4);

    cluster_partition(bath, 1);
    CHECK(int(bath.clusters.size()) == n);
    for (const auto& c : bath.clusters) CHECK(c.size() == 1);

    for (int cap : {2, 4, 6}) {
        cluster_partition(bath, cap);
        std::set<int> seen;
        for (const auto& c : bath.clusters) {
            CHECK(int(c.size()) <= cap);
            CHECK(!c.empty());
            for (int idx : c) CHECK(seen.insert(idx).second);
        }
        CHECK(int(seen.size()) == n);
    }
    // repeated clustering at the same cap is idempotent
    cluster_partition(bath, 4);
    const auto once = bath.clusters;
    cluster_partition(bath, 4);
    CHECK(bath.clusters == once);
    CHECK_THROWS_AS(cluster_partition(bath, 0), std::invalid_argument);
}

TEST_CASE("two spins merge into one cluster when allowed") {
    bath_model bath;
    bath.b_z = 200.0;
    bath.spins.push_back(spin_at({1.0, 0, 0}));
    bath.spins.push_back(spin_at({1.2, 0, 0}));
    bath.pairs.push_back(dipolar_coupling(bath.spins[0], bath.spins[1], 0, 1));
    cluster_partition(bath, 2);
    REQUIRE(bath.clusters.size() == 1);
    CHECK(bath.clusters[0] == std::vector<int>({0, 1}));
}

TEST_CASE("addressability report flags strongly coupled bystanders") {
    bath_model bath;
    bath.b_z = 200.0;
    bath.spins.push_back(spin_at({0.9 * std::sqrt(0.5), 0, 0.9 * std::sqrt(0.5)}));
    bath.spins.push_back(spin_at({-2.5, 0.3, 0.4}));
    const auto rep = addressability(bath, 0, +1, 1, 4.0 / (3 * pi));
    REQUIRE(rep.entries.size() == 2);
    CHECK(rep.target == 0);
    CHECK(std::isinf(rep.entries[0].spectral_ratio));
    // the distant spin is spectrally far from the target and unflagged
    CHECK(rep.entries[1].spectral_ratio > rep.margin);
    CHECK(!rep.entries[1].flagged);
    CHECK_THROWS_AS(addressability(bath, 5, +1, 1, 0.2), std::invalid_argument);
}

TEST_CASE("bath files round-trip byte for byte") {
    const auto bath = generate_lattice_bath(21, 1.6, 0.03, 200.0);
    std::ostringstream first;
    save_bath(bath, first);
    std::istringstream in(first.str());
    const auto loaded = load_bath(in);
    REQUIRE(loaded.spins.size() == bath.spins.size());
    CHECK(loaded.seed == bath.seed);
    CHECK(loaded.b_z == bath.b_z);
    CHECK(loaded.abundance == bath.abundance);
    CHECK(loaded.radius_nm == bath.radius_nm);
    for (size_t i = 0; i < bath.spins.size(); ++i) {
        CHECK(loaded.spins[i].position == bath.spins[i].position);
        CHECK(loaded.spins[i].hyperfine_mhz == bath.spins[i].hyperfine_mhz);
    }
    // pair lists are rebuilt on load and must agree
    REQUIRE(loaded.pairs.size() == bath.pairs.size());
    for (size_t i = 0; i < bath.pairs.size(); ++i) {
        CHECK(loaded.pairs[i].i == bath.pairs[i].i);
        CHECK(loaded.pairs[i].j == bath.pairs[i].j);
        CHECK(loaded.pairs[i].b == bath.pairs[i].b);
    }
    std::ostringstream second;
    save_bath(loaded, second);
    CHECK(first.str() == second.str());

    std::istringstream junk("13 0 0 0 0 0 0\n");
    CHECK_THROWS_AS(load_bath(junk), std::runtime_error);
    CHECK_THROWS_AS(load_bath_file("/nonexistent/bath.txt"), std::runtime_error);
}
