#include "dmdx/dmd.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "dmdx/error.hpp"

namespace dmdx {

DmdModel DmdModel::from_parts(Matrix phi, Vector lambda, Vector b, ObservableMap observable,
                              Eigen::Index m, double dt, bool real_output) {
    DMDX_REQUIRE(phi.cols() == lambda.size() && lambda.size() == b.size(), ErrorCode::ShapeError,
                 "phi, lambda and b disagree on the rank");
    DmdModel model;
    model.phi_pinv = left_pinv(phi);
    model.phi = std::move(phi);
    model.lambda = std::move(lambda);
    model.b = std::move(b);
    model.observable = std::move(observable);
    model.m = m;
    model.dt = dt;
    model.real_output = real_output;
    return model;
}

DmdModel fit(const SnapshotPair& pair, const ObservableMap& g, double rank_eps) {
    DMDX_REQUIRE(pair.m >= 1 && pair.x.cols() == pair.m && pair.x_prime.cols() == pair.m &&
                     pair.x.rows() == pair.x_prime.rows(),
                 ErrorCode::ShapeError, "inconsistent snapshot pair");
    DMDX_REQUIRE(rank_eps > 0.0 && rank_eps < 1.0, ErrorCode::InvalidArgument,
                 "rank_eps must lie in (0, 1)");

    const bool identity = g.is_identity();
    const Matrix y = identity ? pair.x : g.lift_columns(pair.x);
    const Matrix y_prime = identity ? pair.x_prime : g.lift_columns(pair.x_prime);

    SvdTruncation svd = truncated_svd(y, rank_eps);
    DMDX_REQUIRE(svd.r > 0, ErrorCode::DegenerateData, "truncated rank is zero");

    // B = Y' V S^-1 (p x r); reduced operator K = U^H B.
    Matrix b_mat = y_prime * svd.v;
    for (Eigen::Index j = 0; j < svd.r; ++j) b_mat.col(j) /= svd.sigma(j);
    const Matrix k_tilde = svd.u.adjoint() * b_mat;

    const EigenPairs eig = eig_dense(k_tilde);

    Matrix phi = b_mat * eig.vectors;
    // Exact modes vanish for (numerically) zero eigenvalues; those directions
    // fall back to the projected mode U w.
    const double b_scale = b_mat.norm();
    for (Eigen::Index k = 0; k < svd.r; ++k) {
        if (phi.col(k).norm() <= 1e-12 * b_scale) phi.col(k) = svd.u * eig.vectors.col(k);
    }

    DmdModel model;
    model.phi_pinv = left_pinv(phi);
    model.b = model.phi_pinv * y.col(0);
    model.phi = std::move(phi);
    model.lambda = eig.values;
    model.m = pair.m;
    model.dt = pair.dt;
    model.observable = g;
    model.real_output = is_real(pair.x) && is_real(pair.x_prime);
    model.singular_values = std::move(svd.all_sigma);
    return model;
}

Vector eigenvalue_powers(const Vector& lambda, Eigen::Index n) {
    DMDX_REQUIRE(n >= 0, ErrorCode::RangeError, "step index must be nonnegative");
    const double log_max = std::log(std::numeric_limits<double>::max());
    Vector out(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        const double mag = std::abs(lambda(k));
        DMDX_REQUIRE(mag <= 1.0 || static_cast<double>(n) * std::log(mag) < log_max - 1.0,
                     ErrorCode::Overflow, "|lambda|^n exceeds the floating-point range");
        Complex base = lambda(k);
        Complex acc(1.0, 0.0);
        for (auto e = static_cast<std::uint64_t>(n); e != 0; e >>= 1) {
            if (e & 1u) acc *= base;
            if (e > 1) base *= base;
        }
        out(k) = acc;
    }
    return out;
}

Vector predict_observable(const DmdModel& model, Eigen::Index n) {
    const Vector coeff = eigenvalue_powers(model.lambda, n).cwiseProduct(model.b);
    Vector y = model.phi * coeff;
    DMDX_REQUIRE(y.allFinite(), ErrorCode::Overflow, "prediction is not finite");
    return y;
}

Vector predict(const DmdModel& model, Eigen::Index n) {
    Vector u = model.observable.unlift(predict_observable(model, n));
    if (model.real_output) u = u.real().cast<Complex>();
    return u;
}

Vector apply_propagator(const DmdModel& model, const Vector& y) {
    const Vector c = model.phi_pinv * y;
    return model.phi * model.lambda.cwiseProduct(c);
}

Matrix propagator_matrix(const DmdModel& model) {
    return model.phi * model.lambda.asDiagonal() * model.phi_pinv;
}

namespace {

constexpr char kModelMagic[8] = {'D', 'M', 'D', 'X', 'M', 'D', 'L', '1'};

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    DMDX_REQUIRE(in.good(), ErrorCode::Io, "truncated model file");
    return v;
}

void put_array(std::ostream& out, const Complex* data, Eigen::Index count) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(Complex)));
}

void get_array(std::istream& in, Complex* data, Eigen::Index count) {
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(Complex)));
    DMDX_REQUIRE(in.gcount() == static_cast<std::streamsize>(count * sizeof(Complex)), ErrorCode::Io,
                 "truncated model payload");
}

}  // namespace

void save_model(const DmdModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    DMDX_REQUIRE(out.good(), ErrorCode::Io, "cannot open " + path.string());
    out.write(kModelMagic, sizeof kModelMagic);
    put<std::int64_t>(out, model.lifted_dim());
    put<std::int64_t>(out, model.rank());
    put<std::int64_t>(out, model.m);
    put<double>(out, model.dt);
    put<std::uint8_t>(out, model.real_output ? 1 : 0);
    const std::string& name = model.observable.name();
    put<std::int64_t>(out, static_cast<std::int64_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::int64_t>(out, model.singular_values.size());
    out.write(reinterpret_cast<const char*>(model.singular_values.data()),
              static_cast<std::streamsize>(model.singular_values.size() * sizeof(double)));
    put_array(out, model.lambda.data(), model.rank());
    put_array(out, model.b.data(), model.rank());
    put_array(out, model.phi.data(), model.phi.size());
    put_array(out, model.phi_pinv.data(), model.phi_pinv.size());
    DMDX_REQUIRE(out.good(), ErrorCode::Io, "write failed for " + path.string());
}

DmdModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    DMDX_REQUIRE(in.good(), ErrorCode::Io, "cannot open " + path.string());
    char magic[8] = {};
    in.read(magic, sizeof magic);
    DMDX_REQUIRE(in.good() && std::memcmp(magic, kModelMagic, sizeof magic) == 0, ErrorCode::Io,
                 "not a dmdx model file");
    const auto p = get<std::int64_t>(in);
    const auto r = get<std::int64_t>(in);
    DmdModel model;
    model.m = get<std::int64_t>(in);
    model.dt = get<double>(in);
    model.real_output = get<std::uint8_t>(in) != 0;
    const auto name_len = get<std::int64_t>(in);
    DMDX_REQUIRE(p >= 1 && r >= 1 && r <= p && name_len > 0 && name_len < 4096, ErrorCode::Io,
                 "corrupt model header");
    std::string name(static_cast<std::size_t>(name_len), '\0');
    in.read(name.data(), name_len);
    DMDX_REQUIRE(in.good(), ErrorCode::Io, "truncated model file");
    model.observable = ObservableMap::parse(name);
    const auto n_sigma = get<std::int64_t>(in);
    DMDX_REQUIRE(n_sigma >= 0 && n_sigma <= (std::int64_t{1} << 32), ErrorCode::Io, "corrupt sigma count");
    model.singular_values.resize(n_sigma);
    in.read(reinterpret_cast<char*>(model.singular_values.data()),
            static_cast<std::streamsize>(n_sigma * static_cast<std::int64_t>(sizeof(double))));
    model.lambda.resize(r);
    model.b.resize(r);
    model.phi.resize(p, r);
    model.phi_pinv.resize(r, p);
    get_array(in, model.lambda.data(), r);
    get_array(in, model.b.data(), r);
    get_array(in, model.phi.data(), model.phi.size());
    get_array(in, model.phi_pinv.data(), model.phi_pinv.size());
    return model;
}

}  // namespace dmdx
