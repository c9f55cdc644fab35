#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "cvp/domain.hpp"
#include "cvp/projective.hpp"
#include "cvp/rng.hpp"

namespace cvp {

// Hilbert distance: half the log of the cross ratio against the chord
// endpoints, ordered a,x,y,b. The pair is put in a canonical order first so
// that symmetry holds exactly, not just to rounding.
inline double hilbert_distance(const ConvexDomain& D, const ProjPoint& x,
                               const ProjPoint& y) {
    if (D.classify(x) != Region::Interior || D.classify(y) != Region::Interior)
        throw NotInterior("hilbert_distance: points must be interior");
    if (x.approx_equal(y)) return 0.0;
    const ProjPoint* p = &x;
    const ProjPoint* q = &y;
    for (Eigen::Index i = 0; i < x.coords().size(); ++i) {
        if (x.coords()[i] == y.coords()[i]) continue;
        if (x.coords()[i] > y.coords()[i]) std::swap(p, q);
        break;
    }
    BoundaryChord c = D.chord(*p, *q);
    double cr = cross_ratio(c.a, *p, *q, c.b);
    return 0.5 * std::log(std::abs(cr));
}

// Segments are geodesics: H(x,z) + H(z,y) == H(x,y) for z on [x,y].
inline bool geodesic_check(const ConvexDomain& D, const ProjPoint& x,
                           const ProjPoint& y, int samples) {
    if (D.classify(x) != Region::Interior || D.classify(y) != Region::Interior)
        throw NotInterior("geodesic_check: points must be interior");
    double total = hilbert_distance(D, x, y);
    Eigen::VectorXd wx = D.chart_normalize(x), wy = D.chart_normalize(y);
    for (int i = 1; i <= samples; ++i) {
        double t = static_cast<double>(i) / (samples + 1);
        ProjPoint z(wx + t * (wy - wx));
        double sum = hilbert_distance(D, x, z) + hilbert_distance(D, z, y);
        if (std::abs(sum - total) > 1e-8) return false;
    }
    return true;
}

struct TranslationData {
    double tau = 0.0;            // = formula_value
    double formula_value = 0.0;  // (1/2) log(lambda_1 / lambda_d)
    double oracle_value = 0.0;   // sampled infimum of H(x, gx)
    std::vector<ProjPoint> min_set_samples;
    std::uint64_t seed = 0;
};

namespace detail {

// Orthonormal basis of the chart hyperplane {<c,v> = 0}.
inline Eigen::MatrixXd chart_tangent_basis(const ConvexDomain& D) {
    const Eigen::VectorXd& c = D.chart_covector();
    int d = static_cast<int>(c.size());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.transpose(), Eigen::ComputeFullV);
    return svd.matrixV().rightCols(d - 1);
}

} // namespace detail

// Minimal translation length: eigenvalue formula plus an independent
// sampled-infimum oracle refined by shrinking-step coordinate descent.
inline TranslationData min_translation(const ConvexDomain& D, const ProjMap& g,
                                       int n_samples, std::uint64_t seed) {
    Rng rng(seed);
    if (!D.preserves(g, rng))
        throw NotAutomorphism("min_translation: map does not preserve the domain");

    EigenData ed = eigen_analysis(g);
    int d = g.dim();
    TranslationData out;
    out.seed = seed;
    out.formula_value = 0.5 * std::log(ed.moduli[0] / ed.moduli[d - 1]);
    out.tau = out.formula_value;

    auto displacement = [&](const ProjPoint& x) { return hilbert_distance(D, x, g(x)); };

    double best = 1e300;
    ProjPoint best_pt = D.center();
    std::vector<std::pair<double, ProjPoint>> evals;
    for (int i = 0; i < n_samples; ++i) {
        ProjPoint x = D.sample_interior(rng);
        double h = displacement(x);
        evals.emplace_back(h, x);
        if (h < best) {
            best = h;
            best_pt = x;
        }
    }

    // local refinement: 10 rounds of coordinate descent, step halved each round
    Eigen::MatrixXd basis = detail::chart_tangent_basis(D);
    Eigen::VectorXd w = D.chart_normalize(best_pt);
    double step = 0.1;
    for (int round = 0; round < 10; ++round) {
        for (Eigen::Index j = 0; j < basis.cols(); ++j) {
            for (double sgn : {1.0, -1.0}) {
                Eigen::VectorXd cand = w + sgn * step * basis.col(j);
                ProjPoint p(cand);
                if (D.classify(p) != Region::Interior) continue;
                double h = displacement(p);
                if (h < best) {
                    best = h;
                    w = D.chart_normalize(p);
                }
            }
        }
        step *= 0.5;
    }
    out.oracle_value = best;
    for (const auto& [h, x] : evals)
        if (h <= best + 1e-6) out.min_set_samples.push_back(x);
    return out;
}

// For a vertex-fixing automorphism of a simplex the whole simplex is the
// minimal translation set: H(x, gx) == tau everywhere.
inline bool min_set_simplex_check(const Simplex& S, const ProjMap& g, int n_samples,
                                  std::uint64_t seed = 11) {
    int d = S.ambient_dim();
    Eigen::MatrixXd m = g.matrix();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j && std::abs(m(i, j)) > 1e-9 * m.cwiseAbs().maxCoeff())
                throw NotVertexFixing("min_set_simplex_check: map is not diagonal");

    EigenData ed = eigen_analysis(g);
    double tau = 0.5 * std::log(ed.moduli[0] / ed.moduli[d - 1]);
    Rng rng(seed);
    for (int i = 0; i < n_samples; ++i) {
        ProjPoint x = S.sample_interior(rng);
        if (std::abs(hilbert_distance(S, x, g(x)) - tau) > 1e-6) return false;
    }
    return true;
}

// Klein-model hyperbolic distance on the unit ball; closed-form cross-check
// for the Hilbert metric on ellipsoids.
inline double klein_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    double num = 1.0 - u.dot(v);
    double den = std::sqrt((1.0 - u.squaredNorm()) * (1.0 - v.squaredNorm()));
    return std::acosh(std::max(1.0, num / den));
}

// Hilbert metric on the simplex in closed form:
// H(x,y) = (1/2) max_{i,j} log( (x_i y_j) / (x_j y_i) ).
inline double simplex_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    double hi = -1e300, lo = 1e300;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double r = std::log(x[i] / y[i]);
        hi = std::max(hi, r);
        lo = std::min(lo, r);
    }
    return 0.5 * (hi - lo);
}

} // namespace cvp
