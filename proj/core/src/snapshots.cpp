#include "dmdx/snapshots.hpp"

#include <bit>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dmdx/error.hpp"

namespace dmdx {

static_assert(std::endian::native == std::endian::little,
              "trajectory and model files are written in host order");

void Trajectory::validate() const {
    DMDX_REQUIRE(states.rows() >= 1 && states.cols() >= 1, ErrorCode::ShapeError,
                 "trajectory must hold at least one state of dimension >= 1");
    DMDX_REQUIRE(dt > 0.0, ErrorCode::InvalidArgument, "trajectory dt must be positive");
}

namespace {

std::string render_term(const ObservableBlock& b, char v) {
    if (b.kind == ObservableBlock::Kind::ModSquaredTimes) {
        return std::string("|") + v + "|^2" + v;
    }
    if (b.exponent == 1) return std::string(1, v);
    return std::string(1, v) + "^" + std::to_string(b.exponent);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

ObservableMap::ObservableMap(std::vector<ObservableBlock> blocks, char variable)
    : blocks_(std::move(blocks)) {
    DMDX_REQUIRE(!blocks_.empty(), ErrorCode::InvalidArgument, "observable needs at least one block");
    std::size_t identities = 0;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const auto& b = blocks_[i];
        DMDX_REQUIRE(b.kind != ObservableBlock::Kind::Power || b.exponent >= 1,
                     ErrorCode::InvalidArgument, "observable exponents must be >= 1");
        if (b.is_identity()) {
            ++identities;
            state_block_ = i;
        }
        if (i) name_ += ',';
        name_ += render_term(b, variable);
    }
    DMDX_REQUIRE(identities == 1, ErrorCode::InvalidArgument,
                 "observable must contain exactly one identity block");
}

ObservableMap ObservableMap::parse(std::string_view text) {
    std::vector<ObservableBlock> blocks;
    char variable = 0;
    auto check_var = [&](char c) {
        DMDX_REQUIRE(std::isalpha(static_cast<unsigned char>(c)), ErrorCode::InvalidArgument,
                     "bad observable term in '" + std::string(text) + "'");
        if (variable == 0) variable = c;
        DMDX_REQUIRE(c == variable, ErrorCode::InvalidArgument,
                     "observable terms must use one variable letter");
    };
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string_view term =
            trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        DMDX_REQUIRE(!term.empty(), ErrorCode::InvalidArgument,
                     "empty observable term in '" + std::string(text) + "'");
        ObservableBlock b;
        if (term.front() == '|') {
            // |v|^2v
            DMDX_REQUIRE(term.size() == 6 && term[2] == '|' && term.substr(3, 2) == "^2" &&
                             term[5] == term[1],
                         ErrorCode::InvalidArgument, "bad modulus term '" + std::string(term) + "'");
            check_var(term[1]);
            b.kind = ObservableBlock::Kind::ModSquaredTimes;
            b.exponent = 3;
        } else {
            check_var(term.front());
            if (term.size() == 1) {
                b.exponent = 1;
            } else {
                DMDX_REQUIRE(term.size() >= 3 && term[1] == '^', ErrorCode::InvalidArgument,
                             "bad power term '" + std::string(term) + "'");
                int k = 0;
                for (char c : term.substr(2)) {
                    DMDX_REQUIRE(std::isdigit(static_cast<unsigned char>(c)), ErrorCode::InvalidArgument,
                                 "bad exponent in '" + std::string(term) + "'");
                    k = k * 10 + (c - '0');
                }
                b.exponent = k;
            }
        }
        blocks.push_back(b);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return ObservableMap(std::move(blocks), variable);
}

Vector ObservableMap::lift(const Vector& u) const {
    const Eigen::Index n = u.size();
    Vector y(lifted_dim(n));
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        auto seg = y.segment(static_cast<Eigen::Index>(i) * n, n);
        const auto& b = blocks_[i];
        if (b.kind == ObservableBlock::Kind::ModSquaredTimes) {
            seg = u.cwiseAbs2().cast<Complex>().cwiseProduct(u);
        } else if (b.exponent == 1) {
            seg = u;
        } else {
            for (Eigen::Index j = 0; j < n; ++j) {
                Complex acc = u(j);
                for (int k = 1; k < b.exponent; ++k) acc *= u(j);
                seg(j) = acc;
            }
        }
    }
    return y;
}

Matrix ObservableMap::lift_columns(const Matrix& states) const {
    Matrix out(lifted_dim(states.rows()), states.cols());
    for (Eigen::Index j = 0; j < states.cols(); ++j) out.col(j) = lift(states.col(j));
    return out;
}

Vector ObservableMap::unlift(const Vector& y) const {
    const auto nb = static_cast<Eigen::Index>(blocks_.size());
    DMDX_REQUIRE(y.size() > 0 && y.size() % nb == 0, ErrorCode::ShapeError,
                 "observable vector length is not a multiple of the block count");
    const Eigen::Index n = y.size() / nb;
    return y.segment(static_cast<Eigen::Index>(state_block_) * n, n);
}

SnapshotPair build_snapshot_pair(const Trajectory& traj, Eigen::Index m) {
    traj.validate();
    DMDX_REQUIRE(m >= 2, ErrorCode::TooFewStates, "snapshot pair needs m >= 2");
    DMDX_REQUIRE(traj.size() >= m + 1, ErrorCode::TooFewStates,
                 "trajectory holds " + std::to_string(traj.size()) + " states, need m+1 = " +
                     std::to_string(m + 1));
    SnapshotPair pair;
    pair.x = traj.states.leftCols(m);
    pair.x_prime = traj.states.middleCols(1, m);
    pair.dt = traj.dt;
    pair.m = m;
    return pair;
}

std::vector<Eigen::Index> uniform_indices(Eigen::Index len, Eigen::Index n_out) {
    DMDX_REQUIRE(n_out >= 2 && len >= n_out, ErrorCode::TooFewStates,
                 "subsampling needs len >= n_out >= 2");
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n_out));
    const Eigen::Index span = len - 1;
    const Eigen::Index den = n_out - 1;
    for (Eigen::Index j = 0; j < n_out; ++j) {
        // round(j * span / den), halves rounded up, in exact integer arithmetic
        idx[static_cast<std::size_t>(j)] = (2 * j * span + den) / (2 * den);
    }
    return idx;
}

Trajectory subsample_uniform(const Trajectory& traj, Eigen::Index n_out) {
    traj.validate();
    const auto idx = uniform_indices(traj.size(), n_out);
    Trajectory out;
    out.states.resize(traj.dim(), n_out);
    for (Eigen::Index j = 0; j < n_out; ++j) out.states.col(j) = traj.states.col(idx[static_cast<std::size_t>(j)]);
    out.dt = traj.dt * static_cast<double>(traj.size() - 1) / static_cast<double>(n_out - 1);
    out.t0 = traj.t0;
    out.is_real = traj.is_real;
    return out;
}

void write_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
    traj.validate();
    std::ofstream out(path, std::ios::binary);
    DMDX_REQUIRE(out.good(), ErrorCode::Io, "cannot open " + path.string());
    char header[256];
    std::snprintf(header, sizeof header,
                  "dmdx-trajectory 1\nN %lld\nn %lld\ndt %.17g\nt0 %.17g\nreal %d\nend\n",
                  static_cast<long long>(traj.dim()), static_cast<long long>(traj.size()), traj.dt,
                  traj.t0, traj.is_real ? 1 : 0);
    out << header;
    out.write(reinterpret_cast<const char*>(traj.states.data()),
              static_cast<std::streamsize>(traj.states.size() * sizeof(Complex)));
    DMDX_REQUIRE(out.good(), ErrorCode::Io, "write failed for " + path.string());
}

Trajectory read_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    DMDX_REQUIRE(in.good(), ErrorCode::Io, "cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    DMDX_REQUIRE(line == "dmdx-trajectory 1", ErrorCode::Io, "not a dmdx trajectory file");
    long long rows = -1, cols = -1;
    int real = 1;
    Trajectory traj;
    while (std::getline(in, line) && line != "end") {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "N") ls >> rows;
        else if (key == "n") ls >> cols;
        else if (key == "dt") ls >> traj.dt;
        else if (key == "t0") ls >> traj.t0;
        else if (key == "real") ls >> real;
        DMDX_REQUIRE(!ls.fail(), ErrorCode::Io, "malformed header line '" + line + "'");
    }
    DMDX_REQUIRE(line == "end" && rows >= 1 && cols >= 1, ErrorCode::Io, "incomplete trajectory header");
    traj.is_real = real != 0;
    traj.states.resize(rows, cols);
    in.read(reinterpret_cast<char*>(traj.states.data()),
            static_cast<std::streamsize>(traj.states.size() * sizeof(Complex)));
    DMDX_REQUIRE(in.gcount() == static_cast<std::streamsize>(traj.states.size() * sizeof(Complex)),
                 ErrorCode::Io, "truncated trajectory payload");
    traj.validate();
    return traj;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    const Eigen::Index n = traj.dim();
    out << "t";
    for (Eigen::Index i = 0; i < n; ++i) {
        if (traj.is_real) out << ",u_" << i;
        else out << ",re_" << i << ",im_" << i;
    }
    out << '\n';
    char buf[32];
    for (Eigen::Index j = 0; j < traj.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.time(j));
        out << buf;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Complex v = traj.states(i, j);
            std::snprintf(buf, sizeof buf, ",%.17g", v.real());
            out << buf;
            if (!traj.is_real) {
                std::snprintf(buf, sizeof buf, ",%.17g", v.imag());
                out << buf;
            }
        }
        out << '\n';
    }
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream out(path);
    DMDX_REQUIRE(out.good(), ErrorCode::Io, "cannot open " + path.string());
    write_trajectory_csv(traj, out);
}

}  // namespace dmdx
