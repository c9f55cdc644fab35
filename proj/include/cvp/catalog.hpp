#pragma once

#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvp/domain.hpp"

namespace cvp {

struct CatalogEntry {
    std::shared_ptr<ConvexDomain> domain;
    DomainMeta meta;
};

// Symmetric domains realizable at desk scale, plus the reducible simplex.
// The quaternionic (d = 2m^2 - m) and exceptional (d = 27) families are
// listed in metadata elsewhere but not constructed.
inline std::vector<CatalogEntry> symmetric_catalog() {
    std::vector<CatalogEntry> out;
    auto add = [&](std::shared_ptr<ConvexDomain> d) { out.push_back({d, d->meta()}); };
    add(std::make_shared<Ellipsoid>(2));   // SO(1,2), real rank 1
    add(std::make_shared<Ellipsoid>(3));   // SO(1,3), real rank 1
    add(std::make_shared<PsdCone3>());     // SL3(R), d = (3^2+3)/2 = 6, real rank 2
    add(std::make_shared<Simplex>(2));     // reducible
    return out;
}

// Metadata-only entries for symmetric cones not constructed here.
struct UnrealizedSymmetricEntry {
    std::string group;
    int d;
};

inline std::vector<UnrealizedSymmetricEntry> unrealized_symmetric_families(int m = 3) {
    return {{"SLm(C)", m * m}, {"SLm(H)", 2 * m * m - m}, {"E6(-26)", 27}};
}

inline std::shared_ptr<ConvexDomain> builtin_domain(const std::string& id) {
    if (id == "simplex2") return std::make_shared<Simplex>(2);
    if (id == "simplex3") return std::make_shared<Simplex>(3);
    if (id == "disk") return std::make_shared<Ellipsoid>(2);
    if (id == "ball3") return std::make_shared<Ellipsoid>(3);
    if (id == "square") return PolytopeHV::square();
    if (id == "psd3") return std::make_shared<PsdCone3>();
    if (id == "square_x_interval" || id == "prism")
        return std::make_shared<Product>(std::vector<std::shared_ptr<ConvexDomain>>{
            std::make_shared<Simplex>(1), std::make_shared<Simplex>(1)});
    return nullptr;
}

namespace detail {

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, int rows, int cols) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows * cols)
        throw InvalidDomain("matrix: expected " + std::to_string(rows * cols) +
                            " row-major entries");
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = j.at(r * cols + c).get<double>();
    return m;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = j.at(i).get<double>();
    return v;
}

inline std::vector<CatalogAut> automorphisms_from_json(const nlohmann::json& j, int d) {
    std::vector<CatalogAut> auts;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& a = j.at(i);
        try {
            auts.push_back({a.value("name", "aut" + std::to_string(i)),
                            ProjMap(matrix_from_json(a.at("matrix"), d, d)),
                            a.value("infinite_order", false)});
        } catch (const error& e) {
            throw InvalidDomain("automorphism " + std::to_string(i) + ": " + e.what());
        }
    }
    return auts;
}

} // namespace detail

// Load a domain from the JSON document format
//   {kind, dimension, vertices?, halfspaces?, factors?, automorphisms?}.
// Invariants are validated on load; violations report the offending index.
inline std::shared_ptr<ConvexDomain> domain_from_json(const nlohmann::json& j);

namespace detail {

inline void validate_domain(const std::shared_ptr<ConvexDomain>& dom,
                            const std::vector<CatalogAut>& auts) {
    // sampled midpoint convexity
    Rng rng(0xD0A1);
    for (int i = 0; i < 64; ++i) {
        ProjPoint x = dom->sample_interior(rng), y = dom->sample_interior(rng);
        Eigen::VectorXd mid =
            0.5 * (dom->chart_normalize(x) + dom->chart_normalize(y));
        if (dom->classify(ProjPoint(mid)) != Region::Interior)
            throw InvalidDomain("convexity violated at sampled midpoint " +
                                std::to_string(i));
    }
    for (std::size_t i = 0; i < auts.size(); ++i)
        if (!dom->preserves(auts[i].map, rng))
            throw InvalidDomain("automorphism " + std::to_string(i) +
                                " does not preserve the domain");
}

} // namespace detail

inline std::shared_ptr<ConvexDomain> domain_from_json(const nlohmann::json& j) {
    std::string kind = j.at("kind").get<std::string>();
    std::shared_ptr<ConvexDomain> dom;
    if (kind == "simplex") {
        int n = j.at("dimension").get<int>();
        std::vector<CatalogAut> auts;
        if (j.contains("automorphisms"))
            auts = detail::automorphisms_from_json(j.at("automorphisms"), n + 1);
        dom = std::make_shared<Simplex>(n, auts);
    } else if (kind == "ellipsoid") {
        dom = std::make_shared<Ellipsoid>(j.at("dimension").get<int>());
    } else if (kind == "psd3") {
        dom = std::make_shared<PsdCone3>();
    } else if (kind == "polytope") {
        int n = j.at("dimension").get<int>();
        std::vector<Eigen::VectorXd> verts;
        for (const auto& v : j.at("vertices")) {
            Eigen::VectorXd u = detail::vector_from_json(v);
            if (u.size() != n)
                throw InvalidDomain("vertex " + std::to_string(verts.size()) +
                                    ": wrong dimension");
            verts.push_back(u);
        }
        std::vector<PolytopeHV::Halfspace> hs;
        for (const auto& h : j.at("halfspaces")) {
            Eigen::VectorXd normal = detail::vector_from_json(h.at("normal"));
            hs.push_back({normal, h.at("offset").get<double>()});
        }
        std::vector<CatalogAut> auts;
        if (j.contains("automorphisms"))
            auts = detail::automorphisms_from_json(j.at("automorphisms"), n + 1);
        dom = std::make_shared<PolytopeHV>(j.value("id", "polytope"), verts, hs, auts);
    } else if (kind == "product") {
        std::vector<std::shared_ptr<ConvexDomain>> factors;
        for (const auto& f : j.at("factors")) factors.push_back(domain_from_json(f));
        dom = std::make_shared<Product>(std::move(factors));
    } else {
        throw InvalidDomain("unknown domain kind: " + kind);
    }
    detail::validate_domain(dom, dom->automorphisms());
    return dom;
}

// Resolve a --domain argument: a built-in id or a path to a JSON document.
inline std::shared_ptr<ConvexDomain> resolve_domain(const std::string& spec) {
    if (auto d = builtin_domain(spec)) return d;
    std::ifstream in(spec);
    if (!in) throw InvalidDomain("unknown domain id or unreadable file: " + spec);
    nlohmann::json j;
    in >> j;
    return domain_from_json(j);
}

} // namespace cvp
