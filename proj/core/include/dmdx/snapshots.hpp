#pragma once

// Trajectories, shifted snapshot matrices and observable liftings.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dmdx/numerics.hpp"

namespace dmdx {

/// Uniformly spaced states u^0..u^n stored as the columns of `states`.
struct Trajectory {
    Matrix states;  // N x (n+1)
    double dt = 0.0;
    double t0 = 0.0;
    bool is_real = true;

    Eigen::Index dim() const noexcept { return states.rows(); }
    Eigen::Index size() const noexcept { return states.cols(); }
    double time(Eigen::Index j) const noexcept { return t0 + static_cast<double>(j) * dt; }
    Vector state(Eigen::Index j) const { return states.col(j); }

    void validate() const;
};

/// X holds u^0..u^{m-1}, X' holds u^1..u^m.
struct SnapshotPair {
    Matrix x;
    Matrix x_prime;
    double dt = 0.0;
    Eigen::Index m = 0;
};

struct ObservableBlock {
    enum class Kind {
        Power,            // componentwise u^k
        ModSquaredTimes,  // componentwise |u|^2 u
    };
    Kind kind = Kind::Power;
    int exponent = 1;

    bool is_identity() const noexcept { return kind == Kind::Power && exponent == 1; }
    /// Degree of positive homogeneity: block(a u) = a^degree block(u) for real a > 0.
    int degree() const noexcept { return kind == Kind::Power ? exponent : 3; }
};

/// A lifting g(u) = [block_0(u); block_1(u); ...] with exactly one identity block.
///
/// Textual form is a comma-separated term list such as "u", "u,u^3",
/// "u,u^2,u^3" or "q,|q|^2q". The variable letter is cosmetic.
class ObservableMap {
public:
    ObservableMap(std::vector<ObservableBlock> blocks, char variable = 'u');

    static ObservableMap identity(char variable = 'u') { return ObservableMap({{}}, variable); }
    static ObservableMap parse(std::string_view text);

    const std::string& name() const noexcept { return name_; }
    std::span<const ObservableBlock> blocks() const noexcept { return blocks_; }
    std::size_t block_count() const noexcept { return blocks_.size(); }
    std::size_t state_block() const noexcept { return state_block_; }
    bool is_identity() const noexcept { return blocks_.size() == 1; }
    Eigen::Index lifted_dim(Eigen::Index n) const noexcept {
        return n * static_cast<Eigen::Index>(blocks_.size());
    }

    Vector lift(const Vector& u) const;
    Matrix lift_columns(const Matrix& states) const;
    Vector unlift(const Vector& y) const;

    friend bool operator==(const ObservableMap& a, const ObservableMap& b) {
        return a.name_ == b.name_;
    }

private:
    std::vector<ObservableBlock> blocks_;
    std::size_t state_block_ = 0;
    std::string name_;
};

SnapshotPair build_snapshot_pair(const Trajectory& traj, Eigen::Index m);

/// Picks states round(j (len-1) / (n_out-1)), j = 0..n_out-1.
Trajectory subsample_uniform(const Trajectory& traj, Eigen::Index n_out);

/// Index list used by subsample_uniform; exposed for callers that need to
/// line fine steps up with snapshot indices.
std::vector<Eigen::Index> uniform_indices(Eigen::Index len, Eigen::Index n_out);

inline Vector lift(const Vector& u, const ObservableMap& g) { return g.lift(u); }
inline Vector unlift(const Vector& y, const ObservableMap& g) { return g.unlift(y); }

// Binary trajectory file: ASCII header lines
//   dmdx-trajectory 1 / N <rows> / n <columns> / dt <dt> / t0 <t0> / real <0|1> / end
// followed by n*N complex values as little-endian (re, im) float64 pairs,
// column after column.
void write_trajectory(const Trajectory& traj, const std::filesystem::path& path);
Trajectory read_trajectory(const std::filesystem::path& path);

/// One row per stored time; real trajectories get one column per grid point,
/// complex ones a re/im column pair per point.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

}  // namespace dmdx
