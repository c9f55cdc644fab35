#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvp/catalog.hpp"
#include "cvp/domain.hpp"
#include "cvp/dynamics.hpp"
#include "cvp/hilbert.hpp"
#include "cvp/json_io.hpp"

namespace cvp {

enum class CheckStatus { Pass, Fail, Unknown };

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        default: return "unknown";
    }
}

struct ConditionResult {
    std::string name;
    CheckStatus status = CheckStatus::Unknown;
    int n_samples = 0;
    int n_pass = 0;
    int n_fail = 0;
    ojson witnesses = ojson::array();
    ojson details = ojson::object();

    ojson to_json() const {
        ojson j;
        j["name"] = name;
        j["status"] = to_string(status);
        j["n_samples"] = n_samples;
        j["n_pass"] = n_pass;
        j["n_fail"] = n_fail;
        j["witnesses"] = witnesses;
        j["details"] = details;
        return j;
    }
};

// Searches, for sampled interior pairs, for a properly embedded triangle
// whose chord contains the pair: chord endpoints a,b plus a third boundary
// point c with [a,c] and [c,b] in the boundary.
inline ConditionResult check_higher_rank_segments(const ConvexDomain& D, int n_pairs,
                                                  std::uint64_t seed) {
    ConditionResult r;
    r.name = "higher_rank_segments";
    Rng rng(seed);
    int unknown = 0;
    for (int i = 0; i < n_pairs; ++i) {
        ProjPoint p = D.sample_interior(rng), q = D.sample_interior(rng);
        if (p.approx_equal(q)) continue;
        ++r.n_samples;
        BoundaryChord ch = D.chord(p, q);
        if (D.strictly_convex()) {
            ++r.n_fail;
            if (r.witnesses.size() < 3) {
                ojson w;
                w["p"] = point_to_json(p);
                w["q"] = point_to_json(q);
                r.witnesses.push_back(w);
            }
            continue;
        }
        SimplicialResult s = D.simplicial_distance(ch.a, ch.b, 2);
        bool ok = false;
        if (s.finite && s.value == 2 && s.chain.size() == 3) {
            const ProjPoint& c = s.chain[1];
            ok = D.segment_in_boundary(ch.a, c) && D.segment_in_boundary(c, ch.b);
            if (ok) {
                // the open triangle a,b,c must lie in the domain
                Eigen::VectorXd wa = D.chart_normalize(ch.a), wb = D.chart_normalize(ch.b),
                                wc = D.chart_normalize(c);
                ProjPoint mid((wa + wb + wc) / 3.0);
                ok = D.classify(mid) == Region::Interior;
            }
        }
        if (ok) {
            ++r.n_pass;
        } else if (s.finite || s.cap >= 2) {
            ++r.n_fail;
            if (r.witnesses.size() < 3) {
                ojson w;
                w["p"] = point_to_json(p);
                w["q"] = point_to_json(q);
                r.witnesses.push_back(w);
            }
        } else {
            ++unknown;
        }
    }
    r.details["unknown"] = unknown;
    if (r.n_pass == r.n_samples && r.n_samples > 0) r.status = CheckStatus::Pass;
    else if (r.n_fail == r.n_samples && r.n_samples > 0) r.status = CheckStatus::Fail;
    else r.status = CheckStatus::Unknown;
    r.details["pass_rate"] =
        r.n_samples ? static_cast<double>(r.n_pass) / r.n_samples : 0.0;
    return r;
}

// Extreme points form a closed proper subset of the boundary. Catalog kinds
// carry analytic characterizations; sampling confirms them.
inline ConditionResult check_extreme_set(const ConvexDomain& D, int n_samples,
                                         std::uint64_t seed) {
    ConditionResult r;
    r.name = "extreme_set_closed_proper";
    Rng rng(seed);
    int extreme_count = 0;
    for (int i = 0; i < n_samples; ++i) {
        ProjPoint b = D.sample_boundary(rng);
        ++r.n_samples;
        if (D.is_extreme(b)) ++extreme_count;
    }
    r.details["sampled_extreme_fraction"] =
        r.n_samples ? static_cast<double>(extreme_count) / r.n_samples : 0.0;

    const std::string kind = D.kind();
    bool analytic = true, proper = false, closed = false;
    if (kind == "simplex" || kind == "polytope") {
        proper = true;  // extreme set = finite vertex set
        closed = true;
    } else if (kind == "ellipsoid") {
        proper = false;  // every boundary point is extreme
        closed = true;
    } else if (kind == "psd3") {
        proper = true;  // rank-one locus, closed by rank semicontinuity
        closed = true;
    } else {
        analytic = false;
        proper = extreme_count < r.n_samples;
    }
    r.details["proper"] = proper;
    r.details["closed"] = analytic ? ojson(closed) : ojson("unknown");
    if (analytic) {
        r.status = (proper && closed) ? CheckStatus::Pass : CheckStatus::Fail;
        r.n_pass = r.status == CheckStatus::Pass ? r.n_samples : 0;
        r.n_fail = r.n_samples - r.n_pass;
    } else {
        r.status = CheckStatus::Unknown;
    }
    return r;
}

// Segments between sampled pairs of extreme points lie in the boundary.
inline ConditionResult check_pairwise_extreme_segments(const ConvexDomain& D, int n_pairs,
                                                       std::uint64_t seed) {
    ConditionResult r;
    r.name = "extreme_pair_segments_in_boundary";
    Rng rng(seed);
    for (int i = 0; i < n_pairs; ++i) {
        ProjPoint x = D.sample_extreme(rng), y = D.sample_extreme(rng);
        if (x.approx_equal(y)) continue;
        ++r.n_samples;
        if (D.segment_in_boundary(x, y)) {
            ++r.n_pass;
        } else {
            ++r.n_fail;
            if (r.witnesses.size() < 3) {
                ojson w;
                w["x"] = point_to_json(x);
                w["y"] = point_to_json(y);
                r.witnesses.push_back(w);
            }
        }
    }
    r.status = (r.n_fail == 0 && r.n_samples > 0) ? CheckStatus::Pass : CheckStatus::Fail;
    return r;
}

struct SimplicialBoundsResult {
    ConditionResult le2;     // s <= 2 for all sampled boundary pairs
    ConditionResult finite;  // s <= cap for all sampled boundary pairs
    std::vector<int> s_samples;  // per-pair value; -1 encodes AtLeast(cap+1)
};

inline SimplicialBoundsResult check_simplicial_bounds(const ConvexDomain& D, int n_pairs,
                                                      int cap, std::uint64_t seed) {
    SimplicialBoundsResult out;
    out.le2.name = "simplicial_distance_le_2";
    out.finite.name = "simplicial_distance_finite";
    Rng rng(seed);
    for (int i = 0; i < n_pairs; ++i) {
        ProjPoint x = D.sample_boundary(rng), y = D.sample_boundary(rng);
        if (x.approx_equal(y)) continue;
        SimplicialResult s = D.simplicial_distance(x, y, cap);
        out.s_samples.push_back(s.finite ? s.value : -1);
        ++out.le2.n_samples;
        ++out.finite.n_samples;
        if (s.finite && s.value <= 2) ++out.le2.n_pass;
        else {
            ++out.le2.n_fail;
            if (out.le2.witnesses.size() < 3) {
                ojson w;
                w["x"] = point_to_json(x);
                w["y"] = point_to_json(y);
                w["s"] = s.finite ? ojson(s.value) : ojson("AtLeast(" + std::to_string(s.value) + ")");
                out.le2.witnesses.push_back(w);
            }
        }
        if (s.finite) ++out.finite.n_pass;
        else {
            ++out.finite.n_fail;
            if (out.finite.witnesses.size() < 3) {
                ojson w;
                w["x"] = point_to_json(x);
                w["y"] = point_to_json(y);
                out.finite.witnesses.push_back(w);
            }
        }
    }
    auto conclude = [](ConditionResult& c) {
        c.status = (c.n_fail == 0 && c.n_samples > 0) ? CheckStatus::Pass : CheckStatus::Fail;
    };
    conclude(out.le2);
    conclude(out.finite);
    return out;
}

// Distinct real eigenlines of g lying on the boundary of D.
inline std::vector<ProjPoint> boundary_fixed_points(const ConvexDomain& D,
                                                    const ProjMap& g) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(g.matrix());
    if (es.info() != Eigen::Success) throw EigenFailure("boundary_fixed_points");
    std::vector<ProjPoint> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (std::abs(es.eigenvalues()[i].imag()) >
            1e-9 * std::abs(es.eigenvalues()[i]))
            continue;
        Eigen::VectorXd v = es.eigenvectors().col(i).real();
        if (v.norm() < 1e-12) continue;
        ProjPoint p(v);
        bool dup = false;
        for (const auto& q : out)
            if (p.approx_equal(q, 1e-7)) dup = true;
        if (dup) continue;
        try {
            if (D.classify(p) == Region::Boundary) out.push_back(p);
        } catch (const ChartOverflow&) {
        }
    }
    return out;
}

struct CatalogCheckResult {
    ConditionResult fixed_points;        // >= 3 boundary fixed points (infinite order)
    ConditionResult segment_in_boundary; // [ell+, ell-] in boundary (bi-proximal)
    ConditionResult s_finite;            // s(ell+, ell-) finite (bi-proximal)
    ojson per_element = ojson::array();
    std::vector<std::pair<std::string, double>> taus;
};

inline CatalogCheckResult check_catalog_elements(const ConvexDomain& D, int cap) {
    if (D.automorphisms().empty())
        throw EmptyCatalog("check_catalog_elements: empty automorphism catalog");
    CatalogCheckResult out;
    out.fixed_points.name = "three_boundary_fixed_points";
    out.segment_in_boundary.name = "axis_segment_in_boundary";
    out.s_finite.name = "axis_simplicial_distance_finite";
    for (const auto& aut : D.automorphisms()) {
        ojson elem;
        elem["name"] = aut.name;
        elem["infinite_order"] = aut.infinite_order;
        auto fixed = boundary_fixed_points(D, aut.map);
        elem["boundary_fixed_points"] = static_cast<int>(fixed.size());
        EigenData ed = eigen_analysis(aut.map);
        int d = aut.map.dim();
        double tau = 0.5 * std::log(ed.moduli[0] / ed.moduli[d - 1]);
        elem["tau"] = tau;
        out.taus.emplace_back(aut.name, tau);
        RankOneVerdict v = rank_one_verdict(D, aut.map, cap);
        elem["rank_one"] = verdict_to_json(v);
        // centralizer-index condition is group theoretic, not evaluable here
        elem["centralizer_index"] = "not evaluable";

        if (aut.infinite_order) {
            ++out.fixed_points.n_samples;
            if (fixed.size() >= 3) ++out.fixed_points.n_pass;
            else {
                ++out.fixed_points.n_fail;
                ojson w;
                w["element"] = aut.name;
                w["count"] = static_cast<int>(fixed.size());
                out.fixed_points.witnesses.push_back(w);
            }
        }
        if (v.is_biproximal && v.attracting) {
            ++out.segment_in_boundary.n_samples;
            ++out.s_finite.n_samples;
            if (v.verdict == RankVerdict::HigherRankWitness) {
                ++out.segment_in_boundary.n_pass;
            } else {
                ++out.segment_in_boundary.n_fail;
                ojson w;
                w["element"] = aut.name;
                out.segment_in_boundary.witnesses.push_back(w);
            }
            if (v.s_value && v.s_value->finite) ++out.s_finite.n_pass;
            else {
                ++out.s_finite.n_fail;
                ojson w;
                w["element"] = aut.name;
                out.s_finite.witnesses.push_back(w);
            }
        }
        out.per_element.push_back(elem);
    }
    auto conclude = [](ConditionResult& c) {
        if (c.n_samples == 0) c.status = CheckStatus::Unknown;
        else c.status = c.n_fail == 0 ? CheckStatus::Pass : CheckStatus::Fail;
    };
    conclude(out.fixed_points);
    conclude(out.segment_in_boundary);
    conclude(out.s_finite);
    return out;
}

struct RankConfig {
    int n_pairs = 500;
    int n_samples = 500;
    int cap = 3;
    std::uint64_t seed = 7;
};

struct RankReport {
    std::string domain;
    bool reducible = false;
    std::vector<std::pair<std::string, ConditionResult>> conditions;  // keyed by item
    std::string verdict;
    int coherence_violations = 0;
    RankConfig config;
    std::vector<int> s_samples;
    std::vector<std::pair<std::string, double>> taus;

    ojson to_json() const {
        ojson j;
        j["schema"] = "rankreport/1";
        j["domain"] = domain;
        j["reducible"] = reducible;
        ojson conds = ojson::object();
        for (const auto& [key, c] : conditions) conds[key] = c.to_json();
        j["conditions"] = conds;
        j["verdict"] = verdict;
        j["coherence_violations"] = coherence_violations;
        j["seeds"] = ojson::array({config.seed});
        j["caps"] = ojson::array({config.cap});
        j["n_pairs"] = config.n_pairs;
        j["n_samples"] = config.n_samples;
        return j;
    }
};

// Runs every sampled condition and aggregates an evidence verdict. The
// directions of the axis/segment conditions must agree; a disagreement is a
// coherence violation (a bug, not a finding).
inline RankReport rank_report(const ConvexDomain& D, const RankConfig& cfg) {
    RankReport rep;
    rep.domain = D.id();
    rep.reducible = D.meta().reducible;
    rep.config = cfg;

    ConditionResult c2 = check_higher_rank_segments(D, cfg.n_pairs, cfg.seed);
    ConditionResult c3 = check_extreme_set(D, cfg.n_samples, cfg.seed + 1);
    ConditionResult c4 = check_pairwise_extreme_segments(D, cfg.n_pairs, cfg.seed + 2);
    SimplicialBoundsResult sb = check_simplicial_bounds(D, cfg.n_pairs, cfg.cap, cfg.seed + 3);
    CatalogCheckResult cat = check_catalog_elements(D, cfg.cap);

    rep.s_samples = sb.s_samples;
    rep.taus = cat.taus;

    rep.conditions.emplace_back("2", c2);
    rep.conditions.emplace_back("3", c3);
    rep.conditions.emplace_back("4", c4);
    rep.conditions.emplace_back("5", sb.le2);
    rep.conditions.emplace_back("6", sb.finite);
    rep.conditions.emplace_back("9", cat.fixed_points);
    rep.conditions.emplace_back("10", cat.segment_in_boundary);
    rep.conditions.emplace_back("11", cat.s_finite);

    // evidence direction from the equivalent items (4), (5), (10), (11)
    std::vector<CheckStatus> dir = {c4.status, sb.le2.status,
                                    cat.segment_in_boundary.status, cat.s_finite.status};
    int higher = 0, rankone = 0;
    for (CheckStatus s : dir) {
        if (s == CheckStatus::Pass) ++higher;
        else if (s == CheckStatus::Fail) ++rankone;
    }
    rep.coherence_violations = (higher > 0 && rankone > 0) ? std::min(higher, rankone) : 0;
    if (higher > 0 && rankone == 0) rep.verdict = "HigherRankEvidence";
    else if (rankone > 0 && higher == 0) rep.verdict = "RankOneEvidence";
    else rep.verdict = "Mixed";
    return rep;
}

} // namespace cvp
