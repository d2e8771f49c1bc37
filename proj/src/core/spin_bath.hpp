#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace axy {

struct nuclear_spin {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();   // nm, NV at origin
    double gamma = 0.0;                                   // rad/us/G
    // Canonical storage is ordinary MHz so bath files round-trip bit-exactly;
    // hyperfine() applies the 2*pi.
    Eigen::Vector3d hyperfine_mhz = Eigen::Vector3d::Zero();

    Eigen::Vector3d hyperfine() const;                    // rad/us
};

// A_j = (prefactor / r^3) [z_hat - 3 (z_hat . r_hat) r_hat], rad/us.
Eigen::Vector3d hyperfine_from_position(const Eigen::Vector3d& r, double gamma_j);

// Frame of one nucleus for a given NV branch:
//   omega_vec = gamma B_z z_hat - (m_s/2) A,   a_perp = A - (A . omega_hat) omega_hat
struct spin_frame {
    Eigen::Vector3d omega_vec;   // rad/us
    Eigen::Vector3d omega_hat;
    double omega = 0.0;          // rad/us
    Eigen::Vector3d a_perp;      // rad/us
};
spin_frame effective_frame(const nuclear_spin& spin, double b_z, int m_s);

enum class dipolar_mode { full, secular, off };

struct dipolar_pair {
    int i = 0;
    int j = 0;
    double b = 0.0;              // prefactor gamma_i gamma_j / r^3, rad/us
    Eigen::Vector3d n_hat;       // unit vector along r_j - r_i
};

// Coupling tensor T with H = sum_ab I_i^a T_ab I_j^b: full point dipole
// b (delta_ab - 3 n_a n_b); secular keeps b (1 - 3 n_z^2) diag(-1/2, -1/2, 1);
// off is zero.
Eigen::Matrix3d dipolar_tensor(const dipolar_pair& pair, dipolar_mode mode);
dipolar_pair dipolar_coupling(const nuclear_spin& a, const nuclear_spin& b,
                              int i, int j);

struct bath_model {
    std::vector<nuclear_spin> spins;
    std::vector<dipolar_pair> pairs;            // all pairs, |b| descending
    std::vector<std::vector<int>> clusters;     // disjoint partition
    std::uint64_t seed = 0;
    double b_z = 0.0;                           // G
    double abundance = 0.0;
    double radius_nm = 0.0;
};

// Rebuild bath.pairs as the full coupling list over the current spins,
// sorted by descending |b|.  Call after editing bath.spins by hand.
void compute_pairs(bath_model& bath);

// Occupy diamond-lattice sites within radius of the NV (at the origin) with
// independent probability `abundance`, using the "bath" sub-stream of seed.
// Sites inside the 0.25 nm vacancy region are excluded.  Deterministic:
// sites are enumerated in a fixed order with one draw each.
bath_model generate_lattice_bath(std::uint64_t seed, double radius_nm,
                                 double abundance, double b_z);

// Greedy agglomeration: pairs by descending |b|, merge when the combined
// size stays within max_size.  Fills bath.clusters (sorted, deterministic).
void cluster_partition(bath_model& bath, int max_size);

struct addressability_entry {
    int index = 0;
    double static_ratio = 0.0;     // |gamma_j B_z| / (k_dd |a_j|)
    double spectral_ratio = 0.0;   // |omega_j - omega_target| / (|f_kdd| |a_j|)
    bool flagged = false;
};
struct addressability_report {
    int target = 0;
    double margin = 10.0;
    std::vector<addressability_entry> entries;
};

// Addressability ratios of every spin against one target spin.
// spectral_ratio is meaningless for the target itself and set to infinity.
addressability_report addressability(const bath_model& bath, int target_index,
                                     int m_s, int k_dd, double f_kdd,
                                     double margin = 10.0);

// Structured-text bath file: "# key value" header (seed, b_z, abundance,
// radius, count) then one spin per line: index x y z Ax_MHz Ay_MHz Az_MHz.
// Positions and hyperfine components are printed with 17 significant digits,
// so save/load/save reproduces the file byte for byte.
void save_bath(const bath_model& bath, std::ostream& out);
void save_bath_file(const bath_model& bath, const std::string& path);
bath_model load_bath(std::istream& in);
bath_model load_bath_file(const std::string& path);

}  // namespace axy
