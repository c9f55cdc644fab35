#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvp/errors.hpp"
#include "cvp/projective.hpp"
#include "cvp/rng.hpp"

namespace cvp {

inline constexpr double kBoundaryBand = 1e-10;  // |margin| band in chart coordinates
inline constexpr double kChordResidual = 1e-12;

enum class Region { Interior, Boundary, Outside };

inline const char* to_string(Region r) {
    switch (r) {
        case Region::Interior: return "Interior";
        case Region::Boundary: return "Boundary";
        default: return "Outside";
    }
}

// Open face of a boundary point: span, dimension, witness and the
// kind-specific data that identifies the face.
struct FaceDescriptor {
    Eigen::MatrixXd span_basis;   // d x (dim+1), orthonormal columns
    int dim = 0;
    ProjPoint witness;
    std::vector<int> active_facets;  // polytope kinds
    Eigen::MatrixXd kernel_basis;    // psd kind: common kernel of the face

    FaceDescriptor(Eigen::MatrixXd span, ProjPoint w)
        : span_basis(std::move(span)),
          dim(static_cast<int>(span_basis.cols()) - 1),
          witness(std::move(w)) {}

    // x lies in the span of this face.
    bool span_contains(const ProjPoint& x, double tol = 1e-8) const {
        Eigen::VectorXd u = x.unit();
        return (u - span_basis * (span_basis.transpose() * u)).norm() <= tol;
    }

    bool same_span(const FaceDescriptor& other, double tol = 1e-8) const {
        if (span_basis.cols() != other.span_basis.cols()) return false;
        for (Eigen::Index j = 0; j < other.span_basis.cols(); ++j) {
            Eigen::VectorXd u = other.span_basis.col(j);
            if ((u - span_basis * (span_basis.transpose() * u)).norm() > tol) return false;
        }
        return true;
    }
};

// Endpoints of the line through two interior points, ordered a,x,y,b.
struct BoundaryChord {
    ProjPoint a;
    ProjPoint b;
};

// Value of the simplicial distance with a witness chain; when no chain of
// length <= cap exists the result is "AtLeast(cap+1)".
struct SimplicialResult {
    bool finite = false;
    int value = 0;  // chain length when finite; cap+1 otherwise
    int cap = 0;
    std::vector<ProjPoint> chain;

    static SimplicialResult exact(int v, int cap, std::vector<ProjPoint> chain) {
        return SimplicialResult{true, v, cap, std::move(chain)};
    }
    static SimplicialResult at_least(int cap) {
        return SimplicialResult{false, cap + 1, cap, {}};
    }
    // s > k certified or unbounded at this cap.
    bool greater_than(int k) const { return finite ? value > k : cap >= k; }
};

struct CatalogAut {
    std::string name;
    ProjMap map;
    bool infinite_order = false;
};

struct DomainMeta {
    bool symmetric = false;
    int real_rank = 0;
    std::string group;
    bool reducible = false;
};

// A properly convex domain, presented through an affine chart
// {v : <chart_covector, v> = 1} in which it is bounded and convex.
// All geometric queries work on chart-normalized vectors.
class ConvexDomain {
public:
    virtual ~ConvexDomain() = default;

    virtual std::string kind() const = 0;
    virtual std::string id() const = 0;
    virtual int ambient_dim() const = 0;
    virtual const Eigen::VectorXd& chart_covector() const = 0;
    virtual ProjPoint center() const = 0;
    virtual const std::vector<CatalogAut>& automorphisms() const { return no_auts_; }
    virtual DomainMeta meta() const { return {}; }
    virtual bool strictly_convex() const { return false; }

    // Signed boundary margin of a chart-normalized vector: positive inside,
    // negative outside, |margin| <= band on the boundary.
    virtual double margin(const Eigen::VectorXd& w) const = 0;

    Eigen::VectorXd chart_normalize(const ProjPoint& p) const {
        double denom = chart_covector().dot(p.coords());
        if (std::abs(denom) < 1e-12 * p.coords().norm())
            throw ChartOverflow("point at infinity in the domain chart");
        return p.coords() / denom;
    }

    Region classify(const ProjPoint& p) const {
        double m = margin(chart_normalize(p));
        if (m > kBoundaryBand) return Region::Interior;
        if (m >= -kBoundaryBand) return Region::Boundary;
        return Region::Outside;
    }

    bool preserves(const ProjMap& g, Rng& rng, int n_samples = 32) const {
        ProjMap ginv = g.inverse();
        for (int i = 0; i < n_samples; ++i) {
            ProjPoint x = sample_interior(rng);
            try {
                if (classify(g(x)) != Region::Interior) return false;
                if (classify(ginv(x)) != Region::Interior) return false;
            } catch (const ChartOverflow&) {
                return false;
            }
        }
        return true;
    }

    // Boundary intersections of the line x v y, ordered a,x,y,b.
    // Default: bracket + bisection on the margin. Kinds with closed forms
    // override.
    virtual BoundaryChord chord(const ProjPoint& x, const ProjPoint& y) const {
        if (classify(x) != Region::Interior || classify(y) != Region::Interior)
            throw NotInterior("chord: endpoints must be interior");
        if (x.approx_equal(y)) throw CoincidentPoints("chord: x == y");
        Eigen::VectorXd wx = chart_normalize(x), wy = chart_normalize(y);
        Eigen::VectorXd dir = wy - wx;
        double tb = bisect_boundary(wx, dir, 1.0);
        double ta = -bisect_boundary(wx, -dir, 1.0);
        return BoundaryChord{ProjPoint(wx + ta * dir), ProjPoint(wx + tb * dir)};
    }

    virtual FaceDescriptor face_of(const ProjPoint& x) const = 0;

    bool is_extreme(const ProjPoint& x) const { return face_of(x).dim == 0; }

    // Whether the closed segment [x,y] lies in the boundary. Kinds with an
    // exact test override; default samples 33 points.
    virtual bool segment_in_boundary(const ProjPoint& x, const ProjPoint& y) const {
        require_boundary(x, "segment_in_boundary");
        require_boundary(y, "segment_in_boundary");
        Eigen::VectorXd wx = chart_normalize(x), wy = chart_normalize(y);
        for (int i = 0; i <= 32; ++i) {
            double t = static_cast<double>(i) / 32.0;
            Eigen::VectorXd w = (1.0 - t) * wx + t * wy;
            if (std::abs(margin(w)) > kBoundaryBand) return false;
        }
        return true;
    }

    // Least chain of boundary segments joining x to y, capped. Default:
    // BFS over a sampled boundary mesh (upper bounds only); exact kinds
    // override.
    virtual SimplicialResult simplicial_distance(const ProjPoint& x, const ProjPoint& y,
                                                 int cap) const {
        return sampled_simplicial_distance(x, y, cap, 64);
    }

    virtual ProjPoint sample_interior(Rng& rng) const {
        Eigen::VectorXd c = chart_normalize(center());
        Eigen::VectorXd dir = tangent_direction(rng);
        double tb = bisect_boundary(c, dir, 1.0);
        int n = ambient_dim() - 1;
        double r = std::pow(rng.uniform(), 1.0 / n);
        // keep strictly inside
        return ProjPoint(c + 0.999999 * r * tb * dir);
    }

    virtual ProjPoint sample_boundary(Rng& rng) const {
        Eigen::VectorXd c = chart_normalize(center());
        Eigen::VectorXd dir = tangent_direction(rng);
        double tb = bisect_boundary(c, dir, 1.0);
        return ProjPoint(c + tb * dir);
    }

    virtual ProjPoint sample_extreme(Rng& rng) const { return sample_boundary(rng); }

protected:
    void require_boundary(const ProjPoint& p, const char* who) const {
        if (classify(p) != Region::Boundary)
            throw NotBoundary(std::string(who) + ": point not on the boundary");
    }

    // Random direction inside the chart hyperplane {<c,v> = 0}.
    Eigen::VectorXd tangent_direction(Rng& rng) const {
        const Eigen::VectorXd& c = chart_covector();
        Eigen::VectorXd v = rng.gaussian_vector(ambient_dim());
        v -= c * (v.dot(c) / c.squaredNorm());
        while (v.norm() < 1e-9) {
            v = rng.gaussian_vector(ambient_dim());
            v -= c * (v.dot(c) / c.squaredNorm());
        }
        return v / v.norm();
    }

    // Smallest t > 0 with margin(w0 + t*dir) == 0, found by doubling from
    // t0 and bisecting to the chord residual.
    double bisect_boundary(const Eigen::VectorXd& w0, const Eigen::VectorXd& dir,
                           double t0) const {
        double lo = 0.0, hi = t0;
        int guard = 0;
        while (margin(w0 + hi * dir) > 0) {
            lo = hi;
            hi *= 2.0;
            if (++guard > 200) throw error("bisect_boundary: unbounded direction");
        }
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            double m = margin(w0 + mid * dir);
            if (std::abs(m) <= kChordResidual) return mid;
            (m > 0 ? lo : hi) = mid;
            if (hi - lo < 1e-16 * (1.0 + std::abs(hi))) break;
        }
        return 0.5 * (lo + hi);
    }

    SimplicialResult sampled_simplicial_distance(const ProjPoint& x, const ProjPoint& y,
                                                 int cap, int mesh_size) const {
        require_boundary(x, "simplicial_distance");
        require_boundary(y, "simplicial_distance");
        if (x.approx_equal(y)) return SimplicialResult::exact(0, cap, {x});
        if (segment_in_boundary(x, y)) return SimplicialResult::exact(1, cap, {x, y});
        // BFS over a fixed seeded boundary mesh; yields upper bounds only.
        Rng rng(0xC0FFEE);
        std::vector<ProjPoint> nodes{x, y};
        for (int i = 0; i < mesh_size; ++i) nodes.push_back(sample_boundary(rng));
        int n = static_cast<int>(nodes.size());
        std::vector<int> dist(n, -1), prev(n, -1);
        std::vector<int> frontier{0};
        dist[0] = 0;
        for (int level = 0; level < cap && !frontier.empty(); ++level) {
            std::vector<int> next;
            for (int u : frontier) {
                for (int v = 0; v < n; ++v) {
                    if (dist[v] >= 0) continue;
                    if (segment_in_boundary(nodes[u], nodes[v])) {
                        dist[v] = dist[u] + 1;
                        prev[v] = u;
                        if (v == 1) {
                            std::vector<ProjPoint> chain;
                            for (int w = 1; w != -1; w = prev[w]) chain.push_back(nodes[w]);
                            std::reverse(chain.begin(), chain.end());
                            return SimplicialResult::exact(dist[1], cap, std::move(chain));
                        }
                        next.push_back(v);
                    }
                }
            }
            frontier = std::move(next);
        }
        return SimplicialResult::at_least(cap);
    }

private:
    static inline const std::vector<CatalogAut> no_auts_{};
};

// ---------------------------------------------------------------------------
// Simplex(n): the standard open n-simplex in P(R^{n+1}), vertices [e_i].
// ---------------------------------------------------------------------------
class Simplex : public ConvexDomain {
public:
    explicit Simplex(int n, std::vector<CatalogAut> auts = {})
        : n_(n), chart_(Eigen::VectorXd::Ones(n + 1)), auts_(std::move(auts)) {
        if (n < 1) throw InvalidDomain("Simplex: dimension must be >= 1");
        if (auts_.empty()) auts_ = default_automorphisms(n);
    }

    std::string kind() const override { return "simplex"; }
    std::string id() const override { return "simplex" + std::to_string(n_); }
    int ambient_dim() const override { return n_ + 1; }
    const Eigen::VectorXd& chart_covector() const override { return chart_; }
    ProjPoint center() const override { return ProjPoint(Eigen::VectorXd::Ones(n_ + 1)); }
    const std::vector<CatalogAut>& automorphisms() const override { return auts_; }
    DomainMeta meta() const override { return {false, 0, "(R_{>0})^{d}", true}; }

    double margin(const Eigen::VectorXd& w) const override { return w.minCoeff(); }

    ProjPoint vertex(int i) const {
        return ProjPoint(Eigen::VectorXd::Unit(n_ + 1, i));
    }

    BoundaryChord chord(const ProjPoint& x, const ProjPoint& y) const override {
        if (classify(x) != Region::Interior || classify(y) != Region::Interior)
            throw NotInterior("chord: endpoints must be interior");
        if (x.approx_equal(y)) throw CoincidentPoints("chord: x == y");
        Eigen::VectorXd wx = chart_normalize(x), wy = chart_normalize(y);
        Eigen::VectorXd dir = wy - wx;
        // coordinates hit zero at t = -wx_i / dir_i
        double tmin = -1e300, tmax = 1e300;
        for (int i = 0; i <= n_; ++i) {
            if (std::abs(dir[i]) < 1e-15) continue;
            double t = -wx[i] / dir[i];
            if (dir[i] < 0) tmax = std::min(tmax, t);
            else tmin = std::max(tmin, t);
        }
        return BoundaryChord{ProjPoint(wx + tmin * dir), ProjPoint(wx + tmax * dir)};
    }

    FaceDescriptor face_of(const ProjPoint& x) const override {
        require_boundary(x, "face_of");
        Eigen::VectorXd w = chart_normalize(x);
        std::vector<int> support;
        for (int i = 0; i <= n_; ++i)
            if (w[i] > kBoundaryBand) support.push_back(i);
        Eigen::MatrixXd span(n_ + 1, support.size());
        span.setZero();
        for (std::size_t j = 0; j < support.size(); ++j) span(support[j], j) = 1.0;
        FaceDescriptor fd(span, x);
        for (int i = 0; i <= n_; ++i)
            if (w[i] <= kBoundaryBand) fd.active_facets.push_back(i);
        return fd;
    }

    bool segment_in_boundary(const ProjPoint& x, const ProjPoint& y) const override {
        require_boundary(x, "segment_in_boundary");
        require_boundary(y, "segment_in_boundary");
        Eigen::VectorXd wx = chart_normalize(x), wy = chart_normalize(y);
        for (int i = 0; i <= n_; ++i)
            if (std::abs(wx[i]) <= kBoundaryBand && std::abs(wy[i]) <= kBoundaryBand)
                return true;
        return false;
    }

    SimplicialResult simplicial_distance(const ProjPoint& x, const ProjPoint& y,
                                         int cap) const override {
        require_boundary(x, "simplicial_distance");
        require_boundary(y, "simplicial_distance");
        if (x.approx_equal(y)) return SimplicialResult::exact(0, cap, {x});
        if (segment_in_boundary(x, y)) return SimplicialResult::exact(1, cap, {x, y});
        // Any two facets of a simplex with d >= 3 meet in a codim-2 face.
        if (n_ >= 2 && cap >= 2) {
            Eigen::VectorXd wx = chart_normalize(x), wy = chart_normalize(y);
            int fx = -1, fy = -1;
            for (int i = 0; i <= n_; ++i) {
                if (std::abs(wx[i]) <= kBoundaryBand && fx < 0) fx = i;
                if (std::abs(wy[i]) <= kBoundaryBand && fy < 0) fy = i;
            }
            // midpoint on the codim-2 face {w_fx = w_fy = 0}
            Eigen::VectorXd mid = Eigen::VectorXd::Ones(n_ + 1);
            mid[fx] = 0.0;
            mid[fy] = 0.0;
            return SimplicialResult::exact(2, cap, {x, ProjPoint(mid), y});
        }
        return SimplicialResult::at_least(cap);
    }

    ProjPoint sample_extreme(Rng& rng) const override {
        return vertex(rng.uniform_int(0, n_));
    }

    static std::vector<CatalogAut> default_automorphisms(int n) {
        std::vector<CatalogAut> out;
        Eigen::VectorXd diag(n + 1);
        for (int i = 0; i <= n; ++i) diag[i] = std::pow(2.0, n - i);
        out.push_back({"diag_pow2", ProjMap(diag.asDiagonal().toDenseMatrix()), true});
        Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(n + 1, n + 1);
        for (int i = 0; i <= n; ++i) perm((i + 1) % (n + 1), i) = 1.0;
        out.push_back({"cycle", ProjMap(perm), false});
        return out;
    }

private:
    int n_;
    Eigen::VectorXd chart_;
    std::vector<CatalogAut> auts_;
};

// ---------------------------------------------------------------------------
// Ellipsoid(n): the unit ball in the chart {x_0 = 1} of P(R^{n+1}), i.e.
// the Klein model of hyperbolic n-space. Strictly convex.
// ---------------------------------------------------------------------------
class Ellipsoid : public ConvexDomain {
public:
    explicit Ellipsoid(int n) : n_(n), chart_(Eigen::VectorXd::Unit(n + 1, 0)) {
        if (n < 1) throw InvalidDomain("Ellipsoid: dimension must be >= 1");
        auts_ = default_automorphisms(n);
    }

    std::string kind() const override { return "ellipsoid"; }
    std::string id() const override { return n_ == 2 ? "disk" : "ball" + std::to_string(n_); }
    int ambient_dim() const override { return n_ + 1; }
    const Eigen::VectorXd& chart_covector() const override { return chart_; }
    ProjPoint center() const override { return ProjPoint(Eigen::VectorXd::Unit(n_ + 1, 0)); }
    const std::vector<CatalogAut>& automorphisms() const override { return auts_; }
    DomainMeta meta() const override {
        return {true, 1, "SO(1," + std::to_string(n_) + ")", false};
    }
    bool strictly_convex() const override { return true; }

    double margin(const Eigen::VectorXd& w) const override {
        return 1.0 - w.tail(n_).norm();
    }

    BoundaryChord chord(const ProjPoint& x, const ProjPoint& y) const override {
        if (classify(x) != Region::Interior || classify(y) != Region::Interior)
            throw NotInterior("chord: endpoints must be interior");
        if (x.approx_equal(y)) throw CoincidentPoints("chord: x == y");
        Eigen::VectorXd wx = chart_normalize(x), wy = chart_normalize(y);
        Eigen::VectorXd u = wx.tail(n_), v = wy.tail(n_) - wx.tail(n_);
        // ||u + t v||^2 = 1
        double A = v.squaredNorm(), B = 2.0 * u.dot(v), C = u.squaredNorm() - 1.0;
        double disc = std::sqrt(B * B - 4.0 * A * C);
        double ta = (-B - disc) / (2.0 * A), tb = (-B + disc) / (2.0 * A);
        Eigen::VectorXd dir = wy - wx;
        return BoundaryChord{ProjPoint(wx + ta * dir), ProjPoint(wx + tb * dir)};
    }

    FaceDescriptor face_of(const ProjPoint& x) const override {
        require_boundary(x, "face_of");
        Eigen::MatrixXd span = x.unit();
        return FaceDescriptor(span, x);
    }

    bool segment_in_boundary(const ProjPoint& x, const ProjPoint& y) const override {
        require_boundary(x, "segment_in_boundary");
        require_boundary(y, "segment_in_boundary");
        return x.approx_equal(y);
    }

    SimplicialResult simplicial_distance(const ProjPoint& x, const ProjPoint& y,
                                         int cap) const override {
        require_boundary(x, "simplicial_distance");
        require_boundary(y, "simplicial_distance");
        if (x.approx_equal(y)) return SimplicialResult::exact(0, cap, {x});
        return SimplicialResult::at_least(cap);  // no boundary segments at all
    }

    // Hyperbolic boost with eigenvalues (e^t, 1, ..., 1, e^{-t}) acting in the
    // (x_0, x_axis) plane of the form x_0^2 - |u|^2.
    static ProjMap boost(int n, int axis, double t) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n + 1, n + 1);
        m(0, 0) = std::cosh(t);
        m(0, axis) = std::sinh(t);
        m(axis, 0) = std::sinh(t);
        m(axis, axis) = std::cosh(t);
        return ProjMap(m);
    }

    static ProjMap rotation(int n, int i, int j, double theta) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n + 1, n + 1);
        m(i, i) = std::cos(theta);
        m(j, j) = std::cos(theta);
        m(i, j) = -std::sin(theta);
        m(j, i) = std::sin(theta);
        return ProjMap(m);
    }

    static std::vector<CatalogAut> default_automorphisms(int n) {
        std::vector<CatalogAut> out;
        out.push_back({"boost_x_1", boost(n, 1, 1.0), true});
        out.push_back({"boost_x_half", boost(n, 1, 0.5), true});
        if (n >= 2) out.push_back({"boost_y_1", boost(n, 2, 1.0), true});
        if (n >= 2) out.push_back({"rot_quarter", rotation(n, 1, 2, M_PI / 2.0), false});
        return out;
    }

private:
    int n_;
    Eigen::VectorXd chart_;
    std::vector<CatalogAut> auts_;
};

// ---------------------------------------------------------------------------
// PolytopeHV: a bounded polytope in the chart {x_0 = 1}, carried in both
// vertex and halfspace form (the two are validated against each other).
// ---------------------------------------------------------------------------
class PolytopeHV : public ConvexDomain {
public:
    struct Halfspace {
        Eigen::VectorXd normal;  // unit
        double offset;           // interior: normal . u < offset
    };

    PolytopeHV(std::string id, std::vector<Eigen::VectorXd> vertices,
               std::vector<Halfspace> halfspaces, std::vector<CatalogAut> auts = {})
        : id_(std::move(id)),
          n_(static_cast<int>(vertices.at(0).size())),
          vertices_(std::move(vertices)),
          halfspaces_(std::move(halfspaces)),
          chart_(Eigen::VectorXd::Unit(n_ + 1, 0)),
          auts_(std::move(auts)) {
        for (auto& h : halfspaces_) {
            double norm = h.normal.norm();
            h.normal /= norm;
            h.offset /= norm;
        }
        validate();
        build_incidence();
    }

    std::string kind() const override { return "polytope"; }
    std::string id() const override { return id_; }
    int ambient_dim() const override { return n_ + 1; }
    const Eigen::VectorXd& chart_covector() const override { return chart_; }
    const std::vector<CatalogAut>& automorphisms() const override { return auts_; }

    ProjPoint center() const override {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n_);
        for (const auto& v : vertices_) c += v;
        c /= static_cast<double>(vertices_.size());
        Eigen::VectorXd h(n_ + 1);
        h[0] = 1.0;
        h.tail(n_) = c;
        return ProjPoint(h);
    }

    double margin(const Eigen::VectorXd& w) const override {
        Eigen::VectorXd u = w.tail(n_);
        double m = 1e300;
        for (const auto& h : halfspaces_) m = std::min(m, h.offset - h.normal.dot(u));
        return m;
    }

    std::vector<int> active_facets(const ProjPoint& x, double band = kBoundaryBand) const {
        Eigen::VectorXd u = chart_normalize(x).tail(n_);
        std::vector<int> act;
        for (std::size_t j = 0; j < halfspaces_.size(); ++j)
            if (std::abs(halfspaces_[j].offset - halfspaces_[j].normal.dot(u)) <= band)
                act.push_back(static_cast<int>(j));
        return act;
    }

    FaceDescriptor face_of(const ProjPoint& x) const override {
        require_boundary(x, "face_of");
        std::vector<int> act = active_facets(x);
        // vertices lying on every active facet span the face
        std::vector<int> face_verts;
        for (std::size_t v = 0; v < vertices_.size(); ++v) {
            bool on_all = true;
            for (int j : act)
                if (!incident_(v, j)) { on_all = false; break; }
            if (on_all) face_verts.push_back(static_cast<int>(v));
        }
        Eigen::MatrixXd lifts(n_ + 1, face_verts.size());
        for (std::size_t k = 0; k < face_verts.size(); ++k) {
            lifts(0, k) = 1.0;
            lifts.col(k).tail(n_) = vertices_[face_verts[k]];
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(lifts, Eigen::ComputeThinU);
        const auto& sv = svd.singularValues();
        int rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv[i] > 1e-9 * sv[0]) ++rank;
        FaceDescriptor fd(svd.matrixU().leftCols(rank), x);
        fd.active_facets = act;
        return fd;
    }

    bool segment_in_boundary(const ProjPoint& x, const ProjPoint& y) const override {
        require_boundary(x, "segment_in_boundary");
        require_boundary(y, "segment_in_boundary");
        auto ax = active_facets(x), ay = active_facets(y);
        for (int j : ax)
            if (std::find(ay.begin(), ay.end(), j) != ay.end()) return true;
        return false;
    }

    // Exact BFS over the facet intersection graph: a chain of k segments
    // corresponds to a path through k-1 pairwise-intersecting facets.
    SimplicialResult simplicial_distance(const ProjPoint& x, const ProjPoint& y,
                                         int cap) const override {
        require_boundary(x, "simplicial_distance");
        require_boundary(y, "simplicial_distance");
        if (x.approx_equal(y)) return SimplicialResult::exact(0, cap, {x});
        auto fx = active_facets(x), fy = active_facets(y);
        int nf = static_cast<int>(halfspaces_.size());
        std::vector<int> dist(nf, -1), prev(nf, -1);
        std::vector<int> frontier;
        for (int j : fx) { dist[j] = 0; frontier.push_back(j); }
        int found = -1;
        for (int j : fy)
            if (dist[j] == 0) found = j;
        int level = 0;
        while (found < 0 && !frontier.empty() && level < cap) {
            std::vector<int> next;
            for (int u : frontier) {
                for (int v = 0; v < nf; ++v) {
                    if (dist[v] >= 0 || !facets_adjacent_(u, v)) continue;
                    dist[v] = dist[u] + 1;
                    prev[v] = u;
                    next.push_back(v);
                    if (std::find(fy.begin(), fy.end(), v) != fy.end()) {
                        found = v;
                    }
                }
                if (found >= 0) break;
            }
            frontier = std::move(next);
            ++level;
        }
        if (found < 0) return SimplicialResult::at_least(cap);
        int s = dist[found] + 1;
        if (s > cap) return SimplicialResult::at_least(cap);
        // witness: x, a point in each consecutive facet intersection, y
        std::vector<int> path;
        for (int j = found; j != -1; j = prev[j]) path.push_back(j);
        std::reverse(path.begin(), path.end());
        std::vector<ProjPoint> chain{x};
        for (std::size_t k = 0; k + 1 < path.size(); ++k)
            chain.push_back(facet_intersection_point_(path[k], path[k + 1]));
        chain.push_back(y);
        return SimplicialResult::exact(s, cap, std::move(chain));
    }

    ProjPoint sample_extreme(Rng& rng) const override {
        int i = rng.uniform_int(0, static_cast<int>(vertices_.size()) - 1);
        Eigen::VectorXd h(n_ + 1);
        h[0] = 1.0;
        h.tail(n_) = vertices_[i];
        return ProjPoint(h);
    }

    const std::vector<Eigen::VectorXd>& vertices() const { return vertices_; }
    const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }

    // The square [-1,1]^2 with its dihedral symmetries.
    static std::shared_ptr<PolytopeHV> square() {
        std::vector<Eigen::VectorXd> verts;
        for (double sx : {-1.0, 1.0})
            for (double sy : {-1.0, 1.0})
                verts.push_back(Eigen::Vector2d(sx, sy));
        std::vector<Halfspace> hs;
        hs.push_back({Eigen::Vector2d(1, 0), 1.0});
        hs.push_back({Eigen::Vector2d(-1, 0), 1.0});
        hs.push_back({Eigen::Vector2d(0, 1), 1.0});
        hs.push_back({Eigen::Vector2d(0, -1), 1.0});
        Eigen::Matrix3d rot;
        rot << 1, 0, 0, 0, 0, -1, 0, 1, 0;
        Eigen::Matrix3d refl = Eigen::Vector3d(1, -1, 1).asDiagonal();
        std::vector<CatalogAut> auts{{"rot90", ProjMap(rot), false},
                                     {"reflect_x", ProjMap(refl), false}};
        return std::make_shared<PolytopeHV>("square", std::move(verts), std::move(hs),
                                            std::move(auts));
    }

private:
    void validate() {
        for (std::size_t v = 0; v < vertices_.size(); ++v)
            for (std::size_t j = 0; j < halfspaces_.size(); ++j) {
                double slack = halfspaces_[j].offset - halfspaces_[j].normal.dot(vertices_[v]);
                if (slack < -1e-9)
                    throw InvalidDomain("PolytopeHV: vertex " + std::to_string(v) +
                                        " violates halfspace " + std::to_string(j));
            }
        for (std::size_t j = 0; j < halfspaces_.size(); ++j) {
            int count = 0;
            for (std::size_t v = 0; v < vertices_.size(); ++v)
                if (std::abs(halfspaces_[j].offset -
                             halfspaces_[j].normal.dot(vertices_[v])) <= 1e-9)
                    ++count;
            if (count < n_)
                throw InvalidDomain("PolytopeHV: facet " + std::to_string(j) +
                                    " supported by too few vertices");
        }
    }

    void build_incidence() {
        incidence_.assign(vertices_.size(), std::vector<bool>(halfspaces_.size(), false));
        for (std::size_t v = 0; v < vertices_.size(); ++v)
            for (std::size_t j = 0; j < halfspaces_.size(); ++j)
                incidence_[v][j] = std::abs(halfspaces_[j].offset -
                                            halfspaces_[j].normal.dot(vertices_[v])) <= 1e-9;
    }

    bool incident_(std::size_t v, int j) const { return incidence_[v][j]; }

    bool facets_adjacent_(int a, int b) const {
        if (a == b) return false;
        for (std::size_t v = 0; v < vertices_.size(); ++v)
            if (incidence_[v][a] && incidence_[v][b]) return true;
        return false;
    }

    ProjPoint facet_intersection_point_(int a, int b) const {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n_);
        int count = 0;
        for (std::size_t v = 0; v < vertices_.size(); ++v)
            if (incidence_[v][a] && incidence_[v][b]) {
                acc += vertices_[v];
                ++count;
            }
        acc /= static_cast<double>(count);
        Eigen::VectorXd h(n_ + 1);
        h[0] = 1.0;
        h.tail(n_) = acc;
        return ProjPoint(h);
    }

    std::string id_;
    int n_;
    std::vector<Eigen::VectorXd> vertices_;
    std::vector<Halfspace> halfspaces_;
    Eigen::VectorXd chart_;
    std::vector<CatalogAut> auts_;
    std::vector<std::vector<bool>> incidence_;
};

// ---------------------------------------------------------------------------
// PsdCone3: the projectivized cone of 3x3 symmetric PSD matrices (d = 6).
// Points are stored as 6-vectors (a11, a22, a33, sqrt2*a12, sqrt2*a13,
// sqrt2*a23), which makes the chart inner product the Frobenius one and
// congruence actions X -> M X M^T linear isometries of coordinates.
// ---------------------------------------------------------------------------
class PsdCone3 : public ConvexDomain {
public:
    PsdCone3() : chart_((Eigen::VectorXd(6) << 1, 1, 1, 0, 0, 0).finished()) {
        auts_ = default_automorphisms();
    }

    std::string kind() const override { return "psd3"; }
    std::string id() const override { return "psd3"; }
    int ambient_dim() const override { return 6; }
    const Eigen::VectorXd& chart_covector() const override { return chart_; }
    const std::vector<CatalogAut>& automorphisms() const override { return auts_; }
    DomainMeta meta() const override { return {true, 2, "SL3(R)", false}; }

    ProjPoint center() const override { return from_matrix(Eigen::Matrix3d::Identity()); }

    static Eigen::Matrix3d to_matrix(const Eigen::VectorXd& v) {
        const double s = 1.0 / std::sqrt(2.0);
        Eigen::Matrix3d m;
        m << v[0], v[3] * s, v[4] * s,
             v[3] * s, v[1], v[5] * s,
             v[4] * s, v[5] * s, v[2];
        return m;
    }

    static Eigen::VectorXd to_vector(const Eigen::Matrix3d& m) {
        const double s = std::sqrt(2.0);
        Eigen::VectorXd v(6);
        v << m(0, 0), m(1, 1), m(2, 2), s * m(0, 1), s * m(0, 2), s * m(1, 2);
        return v;
    }

    static ProjPoint from_matrix(const Eigen::Matrix3d& m) {
        return ProjPoint(to_vector(m));
    }

    // Linear action on 6-vectors of X -> M X M^T.
    static ProjMap congruence(const Eigen::Matrix3d& M) {
        Eigen::MatrixXd act(6, 6);
        for (int j = 0; j < 6; ++j) {
            Eigen::VectorXd e = Eigen::VectorXd::Unit(6, j);
            act.col(j) = to_vector(M * to_matrix(e) * M.transpose());
        }
        return ProjMap(act);
    }

    double margin(const Eigen::VectorXd& w) const override {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(to_matrix(w));
        return es.eigenvalues().minCoeff();
    }

    // Orthonormal kernel basis of the trace-normalized representative.
    Eigen::MatrixXd kernel_of(const ProjPoint& x, double band = 1e-7) const {
        Eigen::Matrix3d a = to_matrix(chart_normalize(x));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(a);
        int null_dim = 0;
        for (int i = 0; i < 3; ++i)
            if (std::abs(es.eigenvalues()[i]) <= band) ++null_dim;
        return es.eigenvectors().leftCols(null_dim);  // eigenvalues ascending
    }

    int matrix_rank(const ProjPoint& x, double band = 1e-7) const {
        return 3 - static_cast<int>(kernel_of(x, band).cols());
    }

    FaceDescriptor face_of(const ProjPoint& x) const override {
        require_boundary(x, "face_of");
        Eigen::Matrix3d a = to_matrix(chart_normalize(x));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(a);
        std::vector<int> range_idx;
        for (int i = 0; i < 3; ++i)
            if (std::abs(es.eigenvalues()[i]) > 1e-7) range_idx.push_back(i);
        int r = static_cast<int>(range_idx.size());
        // span: symmetric matrices supported on range(a); dim r(r+1)/2 - 1
        Eigen::MatrixXd span(6, r * (r + 1) / 2);
        int col = 0;
        const double s = 1.0 / std::sqrt(2.0);
        for (int i = 0; i < r; ++i) {
            Eigen::Vector3d ui = es.eigenvectors().col(range_idx[i]);
            span.col(col++) = to_vector(ui * ui.transpose());
            for (int j = i + 1; j < r; ++j) {
                Eigen::Vector3d uj = es.eigenvectors().col(range_idx[j]);
                span.col(col++) =
                    to_vector(s * (ui * uj.transpose() + uj * ui.transpose()));
            }
        }
        FaceDescriptor fd(span, x);
        fd.kernel_basis = kernel_of(x);
        return fd;
    }

    bool segment_in_boundary(const ProjPoint& x, const ProjPoint& y) const override {
        require_boundary(x, "segment_in_boundary");
        require_boundary(y, "segment_in_boundary");
        // [x,y] in the boundary iff the representatives share a kernel vector
        Eigen::MatrixXd stacked(6, 3);
        stacked.topRows(3) = to_matrix(chart_normalize(x));
        stacked.bottomRows(3) = to_matrix(chart_normalize(y));
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
        return svd.singularValues()[2] <= 1e-7;
    }

    // Boundary matrices have rank <= 2, so two boundary points are joined by
    // a chain of at most two segments through [z z^T] with z orthogonal to a
    // kernel vector of each endpoint.
    SimplicialResult simplicial_distance(const ProjPoint& x, const ProjPoint& y,
                                         int cap) const override {
        require_boundary(x, "simplicial_distance");
        require_boundary(y, "simplicial_distance");
        if (x.approx_equal(y)) return SimplicialResult::exact(0, cap, {x});
        if (segment_in_boundary(x, y)) return SimplicialResult::exact(1, cap, {x, y});
        if (cap < 2) return SimplicialResult::at_least(cap);
        Eigen::Vector3d u = kernel_of(x).col(0);
        Eigen::Vector3d v = kernel_of(y).col(0);
        Eigen::Vector3d z = u.cross(v);
        if (z.norm() < 1e-9) {
            // parallel kernels would have been the shared-kernel case; fall
            // back to any direction orthogonal to u
            z = u.unitOrthogonal();
        }
        z.normalize();
        ProjPoint mid = from_matrix(z * z.transpose());
        return SimplicialResult::exact(2, cap, {x, mid, y});
    }

    ProjPoint sample_interior(Rng& rng) const override {
        Eigen::Matrix3d g = rng.gaussian_matrix(3, 3);
        Eigen::Matrix3d spd = g * g.transpose() + 0.05 * Eigen::Matrix3d::Identity();
        return from_matrix(spd);
    }

    ProjPoint sample_boundary(Rng& rng) const override {
        // generic rank-2 boundary point
        Eigen::MatrixXd g = rng.gaussian_matrix(3, 2);
        Eigen::Matrix3d m = g * g.transpose();
        while (m.trace() < 1e-9 ||
               Eigen::JacobiSVD<Eigen::Matrix3d>(m).singularValues()[1] < 1e-6) {
            g = rng.gaussian_matrix(3, 2);
            m = g * g.transpose();
        }
        return from_matrix(m);
    }

    ProjPoint sample_extreme(Rng& rng) const override {
        Eigen::Vector3d v = rng.unit_vector(3);
        return from_matrix(v * v.transpose());
    }

    static std::vector<CatalogAut> default_automorphisms() {
        std::vector<CatalogAut> out;
        out.push_back({"cong_diag", congruence(Eigen::Vector3d(2, 1, 0.5).asDiagonal()), true});
        out.push_back(
            {"cong_diag3", congruence(Eigen::Vector3d(3, 1, 1.0 / 3.0).asDiagonal()), true});
        Eigen::Matrix3d rot;
        rot << 0, -1, 0, 1, 0, 0, 0, 0, 1;
        out.push_back({"cong_rot90", congruence(rot), false});
        return out;
    }

private:
    Eigen::VectorXd chart_;
    std::vector<CatalogAut> auts_;
};

// ---------------------------------------------------------------------------
// Product: projectivization of the sum of the factor cones. Reducible by
// construction; faces are joins of factor faces.
// ---------------------------------------------------------------------------
class Product : public ConvexDomain {
public:
    explicit Product(std::vector<std::shared_ptr<ConvexDomain>> factors)
        : factors_(std::move(factors)) {
        if (factors_.size() < 2) throw InvalidDomain("Product: needs >= 2 factors");
        int d = 0;
        for (const auto& f : factors_) {
            offsets_.push_back(d);
            d += f->ambient_dim();
        }
        dim_ = d;
        chart_.resize(d);
        for (std::size_t i = 0; i < factors_.size(); ++i)
            chart_.segment(offsets_[i], factors_[i]->ambient_dim()) =
                factors_[i]->chart_covector();
        build_automorphisms();
    }

    std::string kind() const override { return "product"; }
    std::string id() const override {
        std::string s = "product(";
        for (std::size_t i = 0; i < factors_.size(); ++i)
            s += (i ? "," : "") + factors_[i]->id();
        return s + ")";
    }
    int ambient_dim() const override { return dim_; }
    const Eigen::VectorXd& chart_covector() const override { return chart_; }
    const std::vector<CatalogAut>& automorphisms() const override { return auts_; }
    DomainMeta meta() const override { return {false, 0, "", true}; }

    ProjPoint center() const override {
        Eigen::VectorXd c(dim_);
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            Eigen::VectorXd w = factors_[i]->chart_normalize(factors_[i]->center());
            c.segment(offsets_[i], factors_[i]->ambient_dim()) =
                w / static_cast<double>(factors_.size());
        }
        return ProjPoint(c);
    }

    // Homogeneous cone margin: min over factors of t_i * margin_i(v_i / t_i),
    // where t_i is the factor chart functional on the block.
    double margin(const Eigen::VectorXd& w) const override {
        double m = 1e300;
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            Eigen::VectorXd block = w.segment(offsets_[i], factors_[i]->ambient_dim());
            double bn = block.norm();
            double t = factors_[i]->chart_covector().dot(block);
            double mi;
            if (t < 1e-13) {
                mi = (bn <= kBoundaryBand) ? 0.0 : -bn;
            } else {
                mi = t * factors_[i]->margin(block / t);
            }
            m = std::min(m, mi);
        }
        return m;
    }

    FaceDescriptor face_of(const ProjPoint& x) const override {
        require_boundary(x, "face_of");
        Eigen::VectorXd w = chart_normalize(x);
        std::vector<Eigen::MatrixXd> blocks;
        int total = 0;
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            int di = factors_[i]->ambient_dim();
            Eigen::VectorXd block = w.segment(offsets_[i], di);
            if (block.norm() <= kBoundaryBand) continue;  // zero block: no span
            ProjPoint pi(block);
            Eigen::MatrixXd span;
            if (factors_[i]->classify(pi) == Region::Interior) {
                span = Eigen::MatrixXd::Identity(di, di);
            } else {
                span = factors_[i]->face_of(pi).span_basis;
            }
            Eigen::MatrixXd lifted = Eigen::MatrixXd::Zero(dim_, span.cols());
            lifted.middleRows(offsets_[i], di) = span;
            blocks.push_back(lifted);
            total += static_cast<int>(span.cols());
        }
        Eigen::MatrixXd span(dim_, total);
        int col = 0;
        for (const auto& b : blocks) {
            span.middleCols(col, b.cols()) = b;
            col += static_cast<int>(b.cols());
        }
        return FaceDescriptor(span, x);
    }

    bool reducible_flag() const { return true; }

    const std::vector<std::shared_ptr<ConvexDomain>>& factors() const { return factors_; }

private:
    void build_automorphisms() {
        // block-diagonal combinations: each factor automorphism paired with
        // the identity on the other factors
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            for (const auto& aut : factors_[i]->automorphisms()) {
                Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim_, dim_);
                int di = factors_[i]->ambient_dim();
                m.block(offsets_[i], offsets_[i], di, di) = aut.map.matrix();
                auts_.push_back({factors_[i]->id() + ":" + aut.name, ProjMap(m),
                                 aut.infinite_order});
            }
        }
    }

    std::vector<std::shared_ptr<ConvexDomain>> factors_;
    std::vector<int> offsets_;
    int dim_ = 0;
    Eigen::VectorXd chart_;
    std::vector<CatalogAut> auts_;
};

} // namespace cvp
