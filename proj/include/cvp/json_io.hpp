#pragma once

#include <json.hpp>

#include "cvp/domain.hpp"
#include "cvp/dynamics.hpp"
#include "cvp/hilbert.hpp"
#include "cvp/projective.hpp"

namespace cvp {

// Reports use ordered JSON throughout so that identical runs produce
// byte-identical output.
using ojson = nlohmann::ordered_json;

inline ojson point_to_json(const ProjPoint& p) {
    ojson a = ojson::array();
    for (Eigen::Index i = 0; i < p.coords().size(); ++i) a.push_back(p.coords()[i]);
    return a;
}

inline ojson matrix_to_json(const Eigen::MatrixXd& m) {
    ojson a = ojson::array();  // row-major
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
    return a;
}

inline ProjPoint point_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = j.at(i).get<double>();
    return ProjPoint(v);
}

inline ojson simplicial_to_json(const SimplicialResult& s) {
    ojson j;
    j["finite"] = s.finite;
    j["value"] = s.finite ? ojson(s.value) : ojson("AtLeast(" + std::to_string(s.value) + ")");
    j["cap"] = s.cap;
    ojson chain = ojson::array();
    for (const auto& p : s.chain) chain.push_back(point_to_json(p));
    j["chain"] = chain;
    return j;
}

inline ojson translation_to_json(const TranslationData& t) {
    ojson j;
    j["tau"] = t.tau;
    j["formula_value"] = t.formula_value;
    j["oracle_value"] = t.oracle_value;
    ojson samples = ojson::array();
    for (const auto& p : t.min_set_samples) samples.push_back(point_to_json(p));
    j["argmin_samples"] = samples;
    j["seed"] = t.seed;
    return j;
}

inline ojson verdict_to_json(const RankOneVerdict& v) {
    ojson j;
    j["is_biproximal"] = v.is_biproximal;
    j["verdict"] = to_string(v.verdict);
    if (v.attracting) j["attracting_line"] = point_to_json(*v.attracting);
    if (v.repelling) j["repelling_line"] = point_to_json(*v.repelling);
    if (v.s_value) j["simplicial_distance"] = simplicial_to_json(*v.s_value);
    j["segment_interior"] = v.segment_interior;
    if (v.char2_checked) j["rays_to_boundary_interior"] = v.char2_pass;
    return j;
}

inline ojson clauses_to_json(const std::vector<Clause>& clauses) {
    ojson arr = ojson::array();
    for (const auto& c : clauses) {
        ojson j;
        j["name"] = c.name;
        j["pass"] = c.pass;
        j["residual"] = c.residual;
        arr.push_back(j);
    }
    return arr;
}

} // namespace cvp
