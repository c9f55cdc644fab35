#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvp/domain.hpp"
#include "cvp/hilbert.hpp"
#include "cvp/projective.hpp"

namespace cvp {

struct OrbitRecord {
    ProjPoint base;
    std::vector<ProjPoint> trajectory;  // x, gx, ..., g^n x
    std::optional<ProjPoint> limit_point;
    std::optional<ProjEndo> limit_endo;
};

inline OrbitRecord orbit(const ConvexDomain& D, const ProjMap& g, const ProjPoint& x,
                         int n, double tol = 1e-12) {
    Rng rng(0xA0B1);
    if (!D.preserves(g, rng)) throw NotAutomorphism("orbit: not a domain automorphism");
    if (D.classify(x) != Region::Interior) throw NotInterior("orbit: base not interior");
    OrbitRecord rec{x, {x}, std::nullopt, std::nullopt};
    ProjPoint cur = x;
    for (int k = 0; k < n; ++k) {
        cur = g(cur);
        rec.trajectory.push_back(cur);
    }
    try {
        ProjEndo T = power_limit(g, std::max(n, 200), tol);
        rec.limit_endo = T;
        rec.limit_point = apply(T, x);
    } catch (const NoConvergence&) {
    } catch (const InKernel&) {
    }
    return rec;
}

struct Clause {
    std::string name;
    bool pass = false;
    double residual = 0.0;
};

struct FaceDynamicsReport {
    std::vector<Clause> clauses;
    ProjPoint attracting;  // limit of g_n(base)
    ProjPoint repelling;   // limit of g_n^{-1}(base)
    bool all_pass() const {
        for (const auto& c : clauses)
            if (!c.pass) return false;
        return true;
    }
};

// Checks the boundary-dynamics clauses for a convergent automorphism
// sequence (given by canonical forms, since a sequence settling on a
// rank-one limit is numerically singular): image(T) inside the span of the
// face of the forward limit, the kernel misses the domain, and the backward
// limit lies in the kernel.
inline FaceDynamicsReport face_dynamics_check(const ConvexDomain& D,
                                              const std::vector<Eigen::MatrixXd>& raw,
                                              const ProjPoint& base) {
    if (raw.size() < 4) throw NotConverged("face_dynamics_check: sequence too short");
    std::vector<Eigen::MatrixXd> seq;
    seq.reserve(raw.size());
    for (const auto& m : raw) seq.push_back(detail::canonical_matrix(m));
    std::size_t tail = seq.size() - seq.size() / 4;
    for (std::size_t i = tail; i + 1 < seq.size(); ++i)
        if ((seq[i + 1] - seq[i]).norm() > 1e-8)
            throw NotConverged("face_dynamics_check: maps do not converge");
    ProjEndo T(seq.back());

    ProjPoint x = apply(T, base);  // forward limit
    // Inverting the near-singular canonical form amplifies exactly the
    // near-kernel component, which is the backward limit direction.
    ProjPoint y(seq.back().inverse() * base.coords());
    ProjPoint y_prev(seq[seq.size() - 2].inverse() * base.coords());
    if (y.distance(y_prev) > 1e-6)
        throw NotConverged("face_dynamics_check: inverse orbit does not converge");

    FaceDynamicsReport rep{{}, x, y};

    FaceDescriptor face = D.face_of(x);
    double res_image = 0.0;
    for (Eigen::Index j = 0; j < T.image_basis().cols(); ++j) {
        Eigen::VectorXd u = T.image_basis().col(j);
        res_image = std::max(res_image,
                             (u - face.span_basis * (face.span_basis.transpose() * u)).norm());
    }
    rep.clauses.push_back({"image_in_face_span", res_image < 1e-7, res_image});

    // sample points of the projectivized kernel; none may be interior
    Rng rng(0xFACE);
    double worst_margin = -1e300;
    bool hit_interior = false;
    int kdim = static_cast<int>(T.kernel_basis().cols());
    for (int i = 0; i < 64 && kdim > 0; ++i) {
        Eigen::VectorXd v = T.kernel_basis() * rng.unit_vector(kdim);
        try {
            ProjPoint p(v);
            double m = D.margin(D.chart_normalize(p));
            worst_margin = std::max(worst_margin, m);
            if (D.classify(p) == Region::Interior) hit_interior = true;
        } catch (const ChartOverflow&) {
        }
    }
    rep.clauses.push_back({"kernel_misses_domain", !hit_interior, std::max(0.0, worst_margin)});

    double res_kernel = T.kernel_distance(y.coords());
    rep.clauses.push_back({"repelling_point_in_kernel", res_kernel < 1e-7, res_kernel});
    return rep;
}

inline FaceDynamicsReport face_dynamics_check(const ConvexDomain& D,
                                              const std::vector<ProjMap>& seq,
                                              const ProjPoint& base) {
    std::vector<Eigen::MatrixXd> mats;
    mats.reserve(seq.size());
    for (const auto& g : seq) mats.push_back(g.matrix());
    return face_dynamics_check(D, mats, base);
}

struct PingPongStep {
    int n = 0;
    bool is_proximal = false;
    std::optional<ProjPoint> attracting;  // ell^+ of g_n
    std::optional<ProjPoint> repelling;   // ell^- of g_n
};

struct PingPongResult {
    std::vector<PingPongStep> steps;
    ProjPoint phi_attracting;  // target of ell^+_{g_n}
    Eigen::MatrixXd limit;     // canonical form of g_{n_max}
};

namespace detail {

inline void require_transverse(const ProjPoint& line, const Eigen::VectorXd& normal,
                               const std::string& clause) {
    if (std::abs(line.unit().dot(normal / normal.norm())) <= 1e-6)
        throw HypothesisViolated("ping_pong transversality: " + clause);
}

} // namespace detail

// Builds g_n = phi^n psi^{-n} and tracks proximality and attracting /
// repelling lines. Powers are renormalized each step, and the eigen data of
// g_n is computed on the raw canonical product: the true g_n is invertible
// but numerically rank-deficient at large n.
inline PingPongResult ping_pong(const ProjMap& phi, const ProjMap& psi, int n_max) {
    EigenData ephi = eigen_analysis(phi), epsi = eigen_analysis(psi);
    if (!ephi.is_biproximal || !epsi.is_biproximal)
        throw HypothesisViolated("ping_pong: inputs must be bi-proximal");
    ProximalData pphi = proximal_data(phi), ppsi = proximal_data(psi);

    detail::require_transverse(pphi.attracting_line, *ppsi.attracting_normal,
                               "ell+_phi in [H+_psi]");
    detail::require_transverse(pphi.attracting_line, ppsi.repelling_normal,
                               "ell+_phi in [H-_psi]");
    detail::require_transverse(*pphi.repelling_line, *ppsi.attracting_normal,
                               "ell-_phi in [H+_psi]");
    detail::require_transverse(*pphi.repelling_line, ppsi.repelling_normal,
                               "ell-_phi in [H-_psi]");
    detail::require_transverse(ppsi.attracting_line, *pphi.attracting_normal,
                               "ell+_psi in [H+_phi]");
    detail::require_transverse(ppsi.attracting_line, pphi.repelling_normal,
                               "ell+_psi in [H-_phi]");
    detail::require_transverse(*ppsi.repelling_line, *pphi.attracting_normal,
                               "ell-_psi in [H+_phi]");
    detail::require_transverse(*ppsi.repelling_line, pphi.repelling_normal,
                               "ell-_psi in [H-_phi]");

    Eigen::MatrixXd phi_m = phi.matrix(), phi_inv = phi.inverse().matrix();
    Eigen::MatrixXd psi_m = psi.matrix(), psi_inv = psi.inverse().matrix();
    Eigen::MatrixXd phi_pow = detail::canonical_matrix(phi_m);       // phi^n
    Eigen::MatrixXd psi_inv_pow = detail::canonical_matrix(psi_inv); // psi^-n
    Eigen::MatrixXd psi_pow = detail::canonical_matrix(psi_m);       // psi^n
    Eigen::MatrixXd phi_inv_pow = detail::canonical_matrix(phi_inv); // phi^-n

    PingPongResult out{{}, pphi.attracting_line, Eigen::MatrixXd()};
    for (int n = 1; n <= n_max; ++n) {
        Eigen::MatrixXd gn = detail::canonical_matrix(phi_pow * psi_inv_pow);
        // g_n^{-1} = psi^n phi^{-n}, tracked separately for ell^-
        Eigen::MatrixXd gn_inv = detail::canonical_matrix(psi_pow * phi_inv_pow);
        PingPongStep step;
        step.n = n;
        step.is_proximal =
            proximal_gap(eigen_moduli_raw(gn)) && proximal_gap(eigen_moduli_raw(gn_inv));
        if (step.is_proximal) {
            step.attracting = detail::dominant_pair(gn).first;
            step.repelling = detail::dominant_pair(gn_inv).first;
        }
        out.steps.push_back(step);
        out.limit = gn;
        phi_pow = detail::canonical_matrix(phi_pow * phi_m);
        psi_inv_pow = detail::canonical_matrix(psi_inv_pow * psi_inv);
        psi_pow = detail::canonical_matrix(psi_pow * psi_m);
        phi_inv_pow = detail::canonical_matrix(phi_inv_pow * phi_inv);
    }
    return out;
}

enum class RankVerdict { RankOneIsometry, HigherRankWitness, Inconclusive };

inline const char* to_string(RankVerdict v) {
    switch (v) {
        case RankVerdict::RankOneIsometry: return "RankOneIsometry";
        case RankVerdict::HigherRankWitness: return "HigherRankWitness";
        default: return "Inconclusive";
    }
}

struct RankOneVerdict {
    bool is_biproximal = false;
    std::optional<ProjPoint> attracting;
    std::optional<ProjPoint> repelling;
    std::optional<SimplicialResult> s_value;
    bool segment_interior = false;  // (ell+, ell-) subset of Omega (sampled)
    bool char2_checked = false;     // (ell+, w) u (w, ell-) subset of Omega
    bool char2_pass = false;
    RankVerdict verdict = RankVerdict::Inconclusive;
};

inline RankOneVerdict rank_one_verdict(const ConvexDomain& D, const ProjMap& g, int cap) {
    Rng rng(0x5EED);
    if (!D.preserves(g, rng))
        throw NotAutomorphism("rank_one_verdict: not a domain automorphism");
    RankOneVerdict out;
    EigenData ed = eigen_analysis(g);
    out.is_biproximal = ed.is_biproximal;
    if (!ed.is_biproximal) return out;

    ProximalData pd = proximal_data(g);
    ProjPoint lp = pd.attracting_line;
    ProjPoint lm = *pd.repelling_line;
    out.attracting = lp;
    out.repelling = lm;
    if (D.classify(lp) != Region::Boundary || D.classify(lm) != Region::Boundary)
        return out;  // fixed lines off the boundary: nothing to conclude

    Eigen::VectorXd wp = D.chart_normalize(lp), wm = D.chart_normalize(lm);
    bool interior = true;
    for (int i = 1; i < 16; ++i) {
        double t = static_cast<double>(i) / 16.0;
        if (D.classify(ProjPoint((1 - t) * wp + t * wm)) != Region::Interior) {
            interior = false;
            break;
        }
    }
    out.segment_interior = interior;

    SimplicialResult s = D.simplicial_distance(lp, lm, cap);
    out.s_value = s;

    bool s_gt_2 = (s.finite && s.value > 2) || (!s.finite && (D.strictly_convex() || cap >= 3));
    if (s_gt_2) {
        out.verdict = RankVerdict::RankOneIsometry;
        if (D.strictly_convex()) {
            // open segments from any boundary point to ell^+/ell^- stay inside
            out.char2_checked = true;
            out.char2_pass = true;
            for (int k = 0; k < 16 && out.char2_pass; ++k) {
                ProjPoint w = D.sample_boundary(rng);
                Eigen::VectorXd ww = D.chart_normalize(w);
                for (const Eigen::VectorXd* end : {&wp, &wm}) {
                    for (int i = 1; i < 8; ++i) {
                        double t = static_cast<double>(i) / 8.0;
                        if (D.classify(ProjPoint((1 - t) * ww + t * *end)) !=
                            Region::Interior) {
                            out.char2_pass = false;
                            break;
                        }
                    }
                }
            }
        }
    } else if (D.segment_in_boundary(lp, lm)) {
        out.verdict = RankVerdict::HigherRankWitness;
    }
    return out;
}

// North-south dynamics: least N <= N_max with gamma^n(closure \ B) inside A
// and gamma^{-n}(closure \ A) inside B for all n in [N, N_max], tested on a
// seeded boundary + interior mesh. Distances are chart-Euclidean.
inline std::optional<int> north_south_check(const ConvexDomain& D, const ProjMap& gamma,
                                            double A_radius, double B_radius, int N_max,
                                            int mesh_size = 1000,
                                            std::uint64_t seed = 17) {
    EigenData ed = eigen_analysis(gamma);
    if (!ed.is_biproximal)
        throw HypothesisViolated("north_south_check: gamma not bi-proximal");
    ProximalData pd = proximal_data(gamma);
    ProjPoint lp = pd.attracting_line, lm = *pd.repelling_line;
    if (D.classify(lp) != Region::Boundary || D.classify(lm) != Region::Boundary)
        throw HypothesisViolated("north_south_check: fixed lines not on the boundary");
    SimplicialResult s = D.simplicial_distance(lp, lm, 2);
    if (!s.greater_than(2))
        throw HypothesisViolated("north_south_check: s(ell+, ell-) = " +
                                 std::to_string(s.value) + " <= 2");

    Eigen::VectorXd wp = D.chart_normalize(lp), wm = D.chart_normalize(lm);
    Rng rng(seed);
    std::vector<Eigen::VectorXd> mesh;
    int n_boundary = (3 * mesh_size) / 4;
    for (int i = 0; i < n_boundary; ++i)
        mesh.push_back(D.chart_normalize(D.sample_boundary(rng)));
    for (int i = n_boundary; i < mesh_size; ++i)
        mesh.push_back(D.chart_normalize(D.sample_interior(rng)));

    ProjMap ginv = gamma.inverse();
    std::vector<Eigen::VectorXd> fwd = mesh, bwd = mesh;
    std::vector<bool> ok(N_max + 1, true);
    ok[0] = false;
    for (int n = 1; n <= N_max; ++n) {
        bool all = true;
        for (std::size_t i = 0; i < mesh.size(); ++i) {
            fwd[i] = D.chart_normalize(gamma(ProjPoint(fwd[i])));
            bwd[i] = D.chart_normalize(ginv(ProjPoint(bwd[i])));
            if ((mesh[i] - wm).norm() >= B_radius && (fwd[i] - wp).norm() > A_radius)
                all = false;
            if ((mesh[i] - wp).norm() >= A_radius && (bwd[i] - wm).norm() > B_radius)
                all = false;
        }
        ok[n] = all;
    }
    // least N with ok for every n in [N, N_max]
    int N = -1;
    for (int n = N_max; n >= 1 && ok[n]; --n) N = n;
    if (N < 0) return std::nullopt;
    return N;
}

} // namespace cvp
