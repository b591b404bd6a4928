#ifndef CRNLYAP_VERIFY_HPP
#define CRNLYAP_VERIFY_HPP

// Numerical certification of a constructed Lyapunov function: PDE residual and
// dissipation over sampled class points, boundary limits on the faces the
// class touches, and stability margins of dim1 blocks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crnlyap/error.hpp"
#include "crnlyap/lyapunov.hpp"
#include "crnlyap/network.hpp"
#include "crnlyap/parallel.hpp"
#include "crnlyap/pde.hpp"
#include "crnlyap/random.hpp"
#include "crnlyap/structure.hpp"

namespace crnlyap {

struct VerifyOptions {
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    double residual_tol = 1e-8;
    double boundary_tol = 1e-6;
    double dissipation_tol = 1e-9;
    /// Equality-case diagnostic: where |dissipation| / flux <= dissipation_tol, the
    /// projection of grad f onto S is expected below this.
    double gradient_projection_tol = 1e-6;
    /// Random directions used to find class faces, on top of +-basis directions.
    std::size_t boundary_directions = 16;
};

enum class Verdict { certified, candidate_only, failed };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::certified: return "certified";
        case Verdict::candidate_only: return "candidate-only";
        case Verdict::failed: return "failed";
    }
    return "failed";
}

struct SampleStatistics {
    std::size_t evaluated = 0;
    std::size_t evaluation_errors = 0;
    /// Max |residual| (residual suite) or max dissipation (dissipation suite).
    double max = 0.0;
    double mean_abs = 0.0;
    StateVec worst_x;
};

struct BoundaryFaceReport {
    StateVec xbar;
    std::vector<std::size_t> zero_set;
    std::vector<Complex> complexes;
    BoundaryLimit limit;
    bool passed = true;
    std::string error;
};

struct VerificationReport {
    std::string method;
    StateVec x_star;
    VerifyOptions options;
    SampleStatistics residual;
    SampleStatistics dissipation;
    double dissipation_at_equilibrium = 0.0;
    /// Samples with flux-normalized |dissipation| <= tol but a gradient projection onto
    /// S above tolerance. Diagnostic only: near x* the dissipation is quadratic while
    /// the projection is linear in the distance.
    std::size_t equality_case_flags = 0;
    std::vector<BoundaryFaceReport> faces;
    std::vector<MarginEntry> margins;
    bool residual_passed = false;
    bool dissipation_passed = false;
    bool boundary_passed = false;
    bool stability_passed = false;
    Verdict verdict = Verdict::failed;
    std::vector<std::string> reasons;
    std::vector<std::string> warnings;
};

namespace detail {

/// Random unit vector in S (coefficients uniform in [-1,1] on an orthonormal basis).
inline Eigen::VectorXd random_class_direction(const Eigen::MatrixXd& q, CounterRng& rng) {
    Eigen::VectorXd c(q.cols());
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd d = q * c;
    const double nrm = d.norm();
    return nrm > 0.0 ? Eigen::VectorXd(d / nrm) : d;
}

/// Largest alpha with x + alpha d >= 0 (infinity when d >= 0).
inline double step_to_boundary(std::span<const double> x, const Eigen::VectorXd& d) {
    double a = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double dj = d(static_cast<Eigen::Index>(j));
        if (dj < -1e-14) a = std::min(a, x[j] / -dj);
    }
    return a;
}

}  // namespace detail

/// Points x* + alpha d of the class with d a random unit direction in S.
/// Even samples take alpha uniformly over the segment to the boundary; odd ones
/// take alpha = (1 - 10^{-6U}) alpha_max, crowding toward the faces.
inline std::vector<StateVec> class_samples(const StoichStructure& s, std::span<const double> x_star, std::size_t count,
                                           std::uint64_t seed) {
    const auto n = x_star.size();
    std::vector<StateVec> out;
    out.reserve(count);
    if (s.dim == 0) return out;
    const Eigen::MatrixXd q = orthonormal_columns(s.s_basis, n);
    const double xmax = *std::max_element(x_star.begin(), x_star.end());
    for (std::size_t i = 0; i < count; ++i) {
        CounterRng rng(seed, i << 20);
        StateVec x;
        for (int attempt = 0; attempt < 100; ++attempt) {
            const Eigen::VectorXd d = detail::random_class_direction(q, rng);
            double amax = detail::step_to_boundary(x_star, d);
            if (!std::isfinite(amax)) amax = 10.0 * xmax;
            const double u = rng.uniform();
            const double frac = (i % 2 == 0) ? u : 1.0 - std::pow(10.0, -6.0 * u);
            x.assign(n, 0.0);
            for (std::size_t j = 0; j < n; ++j) x[j] = x_star[j] + frac * amax * d(static_cast<Eigen::Index>(j));
            if (all_positive(x)) break;
        }
        out.push_back(std::move(x));
    }
    return out;
}

/// Boundary points reached from x* along +-basis and random directions of S,
/// one per distinct zero set, sorted by zero set.
inline std::vector<BoundaryPoint> class_boundary_points(const StoichStructure& s, std::span<const double> x_star,
                                                        std::size_t random_directions, std::uint64_t seed) {
    const auto n = x_star.size();
    std::map<std::vector<std::size_t>, BoundaryPoint> faces;
    if (s.dim == 0) return {};
    const Eigen::MatrixXd q = orthonormal_columns(s.s_basis, n);
    std::vector<Eigen::VectorXd> dirs;
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
        dirs.emplace_back(q.col(k));
        dirs.emplace_back(-q.col(k));
    }
    CounterRng rng(seed ^ 0xB0B0B0B0ull);
    for (std::size_t k = 0; k < random_directions; ++k) dirs.push_back(detail::random_class_direction(q, rng));

    for (const auto& d : dirs) {
        const double a = detail::step_to_boundary(x_star, d);
        if (!std::isfinite(a)) continue;
        StateVec xbar(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double dj = d(static_cast<Eigen::Index>(j));
            xbar[j] = x_star[j] + a * dj;
            if (dj < 0.0 && std::abs(x_star[j] / -dj - a) <= 1e-12 * a) xbar[j] = 0.0;
            if (xbar[j] < 0.0) xbar[j] = 0.0;
        }
        auto bp = make_boundary_point(std::move(xbar), StateVec(x_star.begin(), x_star.end()));
        faces.try_emplace(bp.zero_set, std::move(bp));
    }
    std::vector<BoundaryPoint> out;
    for (auto& [z, bp] : faces) out.push_back(std::move(bp));
    return out;
}

/// Runs the residual, dissipation, boundary and stability suites.
inline VerificationReport verify_lyapunov(const Network& net, const LyapunovFn& fn, const VerifyOptions& opt = {}) {
    VerificationReport rep;
    rep.method = method_name(fn);
    rep.x_star = equilibrium_of(fn);
    rep.options = opt;
    rep.warnings = construction_warnings(fn);
    const auto s = stoich_structure(net);
    const auto grad = gradient_oracle(fn);
    const Eigen::MatrixXd q = orthonormal_columns(s.s_basis, net.num_species());

    // Interior suites.
    const auto xs = class_samples(s, rep.x_star, opt.samples, opt.seed);
    struct Row {
        bool ok = false;
        double residual = 0.0, dissipation = 0.0, projection = 0.0, flux = 0.0;
    };
    std::vector<Row> rows(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
        try {
            const auto g = grad(xs[i]);
            rows[i].residual = pde_residual_at(net, xs[i], g);
            rows[i].dissipation = dissipation_at(net, xs[i], g);
            Eigen::Map<const Eigen::VectorXd> eg(g.data(), static_cast<Eigen::Index>(g.size()));
            rows[i].projection = (q.transpose() * eg).norm();
            for (double r : reaction_rates(net, xs[i])) rows[i].flux += r;
            rows[i].ok = std::isfinite(rows[i].residual) && std::isfinite(rows[i].dissipation);
        } catch (const Error&) {
            rows[i].ok = false;
        }
    });
    rep.dissipation.max = -std::numeric_limits<double>::infinity();
    double sum_res = 0.0, sum_dis = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (!r.ok) {
            ++rep.residual.evaluation_errors;
            ++rep.dissipation.evaluation_errors;
            continue;
        }
        ++rep.residual.evaluated;
        ++rep.dissipation.evaluated;
        sum_res += std::abs(r.residual);
        sum_dis += std::abs(r.dissipation);
        if (std::abs(r.residual) >= rep.residual.max) {
            rep.residual.max = std::abs(r.residual);
            rep.residual.worst_x = xs[i];
        }
        if (r.dissipation >= rep.dissipation.max) {
            rep.dissipation.max = r.dissipation;
            rep.dissipation.worst_x = xs[i];
        }
        if (std::abs(r.dissipation) <= opt.dissipation_tol * r.flux && r.projection >= opt.gradient_projection_tol)
            ++rep.equality_case_flags;
    }
    if (rep.residual.evaluated) {
        rep.residual.mean_abs = sum_res / static_cast<double>(rep.residual.evaluated);
        rep.dissipation.mean_abs = sum_dis / static_cast<double>(rep.dissipation.evaluated);
    } else {
        rep.dissipation.max = 0.0;
    }
    try {
        rep.dissipation_at_equilibrium = dissipation(net, grad, rep.x_star);
    } catch (const Error&) {
        ++rep.dissipation.evaluation_errors;
    }

    rep.residual_passed = rep.residual.evaluation_errors == 0 && rep.residual.max < opt.residual_tol;
    rep.dissipation_passed = rep.dissipation.evaluation_errors == 0 && rep.dissipation.max <= opt.dissipation_tol &&
                             std::abs(rep.dissipation_at_equilibrium) <= opt.dissipation_tol;

    // Boundary suite.
    const auto policy = boundary_policy(fn);
    const auto points = class_boundary_points(s, rep.x_star, opt.boundary_directions, opt.seed);
    rep.faces.resize(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        auto& face = rep.faces[i];
        const auto& bp = points[i];
        face.xbar = bp.xbar;
        face.zero_set = bp.zero_set;
        const auto cs = policy == BoundaryPolicy::empty ? BoundaryComplexSet{} : naive_boundary_set(net, bp);
        face.complexes = cs.complexes;
        try {
            const auto dir = default_boundary_direction(s, rep.x_star, bp.xbar);
            face.limit = boundary_residual(net, grad, bp, cs, dir);
            face.passed = !face.limit.determinate || std::abs(face.limit.limit) < opt.boundary_tol;
        } catch (const Error& e) {
            face.passed = false;
            face.error = e.what();
        }
    });
    bool indeterminate = false;
    rep.boundary_passed = true;
    for (const auto& f : rep.faces) {
        rep.boundary_passed = rep.boundary_passed && f.passed;
        indeterminate = indeterminate || (f.error.empty() && !f.limit.determinate);
    }

    // Stability.
    rep.margins = stability_margins(fn);
    rep.stability_passed = std::all_of(rep.margins.begin(), rep.margins.end(),
                                       [](const MarginEntry& m) { return m.margin.margin < 0.0; });

    // Verdict.
    auto fmt = [](double v) { return fmt_num(v); };
    if (!rep.residual_passed)
        rep.reasons.push_back(rep.residual.evaluation_errors
                                  ? std::to_string(rep.residual.evaluation_errors) + " sample(s) failed to evaluate"
                                  : "max |PDE residual| " + fmt(rep.residual.max) + " exceeds " + fmt(opt.residual_tol));
    if (!rep.dissipation_passed) {
        if (rep.dissipation.max > opt.dissipation_tol)
            rep.reasons.push_back("max dissipation " + fmt(rep.dissipation.max) + " exceeds " + fmt(opt.dissipation_tol));
        if (std::abs(rep.dissipation_at_equilibrium) > opt.dissipation_tol)
            rep.reasons.push_back("dissipation at x* is not zero");
    }
    for (const auto& f : rep.faces) {
        if (!f.error.empty()) rep.reasons.push_back("boundary face evaluation failed: " + f.error);
        else if (!f.passed) rep.reasons.push_back("boundary limit " + fmt(f.limit.limit) + " exceeds " + fmt(opt.boundary_tol));
    }
    const bool falsified = !rep.residual_passed || !rep.dissipation_passed || !rep.boundary_passed;
    if (indeterminate) rep.reasons.push_back("a boundary limit is indeterminate");
    if (!rep.stability_passed) rep.reasons.push_back("a dim1 stability margin is not negative");
    if (falsified) rep.verdict = Verdict::failed;
    else if (indeterminate || !rep.stability_passed) rep.verdict = Verdict::candidate_only;
    else rep.verdict = Verdict::certified;
    return rep;
}

}  // namespace crnlyap

#endif  // CRNLYAP_VERIFY_HPP
