#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "cvp/errors.hpp"

namespace cvp {

inline constexpr double kPointTol = 1e-9;       // canonical-form equality
inline constexpr double kRankTol = 1e-9;        // numerical rank: sigma < tol * sigma_1
inline constexpr double kGapTol = 1e-9;         // relative spectral gap for proximality
inline constexpr double kDetTol = 1e-12;        // invertibility after unit-Frobenius scaling

namespace detail {

// Scale to unit Frobenius norm and fix the sign so that the first entry
// (row-major) with magnitude above threshold is positive.
inline Eigen::MatrixXd canonical_matrix(const Eigen::MatrixXd& m) {
    double norm = m.norm();
    if (norm < 1e-300) throw error("canonical_matrix: zero matrix");
    Eigen::MatrixXd out = m / norm;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
            if (std::abs(out(i, j)) > kPointTol) {
                if (out(i, j) < 0) out = -out;
                return out;
            }
        }
    }
    return out;
}

// Max-abs coordinate scaled to 1, first significant coordinate positive.
inline Eigen::VectorXd canonical_point(const Eigen::VectorXd& v) {
    double m = v.cwiseAbs().maxCoeff();
    if (m < 1e-300) throw error("canonical_point: zero vector");
    Eigen::VectorXd out = v / m;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        if (std::abs(out[i]) > kPointTol) {
            if (out[i] < 0) out = -out;
            break;
        }
    }
    return out;
}

} // namespace detail

// A point of P(R^d) stored in canonical homogeneous coordinates.
class ProjPoint {
public:
    explicit ProjPoint(const Eigen::VectorXd& v) : coords_(detail::canonical_point(v)) {}

    const Eigen::VectorXd& coords() const { return coords_; }
    int ambient_dim() const { return static_cast<int>(coords_.size()); }

    Eigen::VectorXd unit() const { return coords_ / coords_.norm(); }

    bool approx_equal(const ProjPoint& other, double tol = kPointTol) const {
        if (coords_.size() != other.coords_.size()) return false;
        return (coords_ - other.coords_).cwiseAbs().maxCoeff() <= tol;
    }

    // Projective distance: sine of the angle between the two lines.
    double distance(const ProjPoint& other) const {
        Eigen::VectorXd a = unit(), b = other.unit();
        double c = std::abs(a.dot(b));
        if (c > 1.0) c = 1.0;
        return std::sqrt(std::max(0.0, 1.0 - c * c));
    }

private:
    Eigen::VectorXd coords_;
};

// An element of PGL_d(R), stored as a canonically scaled invertible matrix.
class ProjMap {
public:
    explicit ProjMap(const Eigen::MatrixXd& m) : matrix_(detail::canonical_matrix(m)) {
        if (matrix_.rows() != matrix_.cols()) throw error("ProjMap: not square");
        if (std::abs(matrix_.determinant()) <= kDetTol)
            throw error("ProjMap: singular matrix");
    }

    const Eigen::MatrixXd& matrix() const { return matrix_; }
    int dim() const { return static_cast<int>(matrix_.rows()); }

    ProjMap inverse() const { return ProjMap(matrix_.inverse()); }

    ProjPoint operator()(const ProjPoint& x) const {
        return ProjPoint(matrix_ * x.coords());
    }

    ProjMap operator*(const ProjMap& rhs) const {
        return ProjMap(matrix_ * rhs.matrix_);
    }

private:
    Eigen::MatrixXd matrix_;
};

// The class in P(End(R^d)) of a nonzero endomorphism, with its numerical
// rank and orthonormal bases of image and kernel.
class ProjEndo {
public:
    explicit ProjEndo(const Eigen::MatrixXd& m) : matrix_(detail::canonical_matrix(m)) {
        if (matrix_.rows() != matrix_.cols()) throw error("ProjEndo: not square");
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix_,
                                              Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        double s1 = sv[0];
        rank_ = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv[i] > kRankTol * s1) ++rank_;
        image_basis_ = svd.matrixU().leftCols(rank_);
        kernel_basis_ = svd.matrixV().rightCols(matrix_.cols() - rank_);
    }

    const Eigen::MatrixXd& matrix() const { return matrix_; }
    int dim() const { return static_cast<int>(matrix_.rows()); }
    int rank() const { return rank_; }
    const Eigen::MatrixXd& image_basis() const { return image_basis_; }
    const Eigen::MatrixXd& kernel_basis() const { return kernel_basis_; }

    // Distance of a unit vector from the kernel subspace.
    double kernel_distance(const Eigen::VectorXd& v) const {
        Eigen::VectorXd u = v / v.norm();
        if (kernel_basis_.cols() == 0) return 1.0;
        Eigen::VectorXd proj = kernel_basis_ * (kernel_basis_.transpose() * u);
        return (u - proj).norm();
    }

private:
    Eigen::MatrixXd matrix_;
    int rank_;
    Eigen::MatrixXd image_basis_;
    Eigen::MatrixXd kernel_basis_;
};

// Sorted eigenvalue moduli of a det-normalized lift.
struct EigenData {
    Eigen::VectorXd moduli; // non-increasing, product == 1
    bool is_proximal = false;
    bool is_biproximal = false;
};

// Attracting line and repelling hyperplane of a proximal map; the data of
// the inverse as well when the map is bi-proximal.
struct ProximalData {
    ProjPoint attracting_line;                  // ell^+
    Eigen::VectorXd repelling_normal;           // unit normal of H^-
    std::optional<ProjPoint> repelling_line;    // ell^- (bi-proximal only)
    std::optional<Eigen::VectorXd> attracting_normal; // unit normal of H^+
};

// Cross ratio [a,x,y,b] of four distinct collinear points, computed
// chart-free via 2x2 determinants in a basis of the common line.
inline double cross_ratio(const ProjPoint& a, const ProjPoint& x,
                          const ProjPoint& y, const ProjPoint& b) {
    const ProjPoint* pts[4] = {&a, &x, &y, &b};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (pts[i]->approx_equal(*pts[j]))
                throw DegenerateConfiguration("cross_ratio: coincident points");

    int d = a.ambient_dim();
    Eigen::MatrixXd stack(4, d);
    for (int i = 0; i < 4; ++i) stack.row(i) = pts[i]->unit().transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv.size() < 2 || sv[1] <= kRankTol * sv[0] ||
        (sv.size() > 2 && sv[2] > kRankTol * sv[0]))
        throw NotCollinear("cross_ratio: points not collinear");

    // Coordinates on the line in the basis of the two top right singular vectors.
    Eigen::VectorXd e1 = svd.matrixV().col(0), e2 = svd.matrixV().col(1);
    double c[4][2];
    for (int i = 0; i < 4; ++i) {
        Eigen::VectorXd u = pts[i]->unit();
        c[i][0] = u.dot(e1);
        c[i][1] = u.dot(e2);
    }
    auto det = [&](int i, int j) { return c[i][0] * c[j][1] - c[j][0] * c[i][1]; };
    // indices: 0=a 1=x 2=y 3=b
    double num = det(1, 3) * det(2, 0);
    double den = det(1, 0) * det(2, 3);
    if (std::abs(den) < 1e-300)
        throw DegenerateConfiguration("cross_ratio: degenerate denominator");
    return num / den;
}

// Cross ratio computed literally in the affine chart {v : <chart,v> = 1}.
// Used as an independent route for chart-independence checks.
inline double cross_ratio_in_chart(const ProjPoint& a, const ProjPoint& x,
                                   const ProjPoint& y, const ProjPoint& b,
                                   const Eigen::VectorXd& chart) {
    const ProjPoint* pts[4] = {&a, &x, &y, &b};
    std::vector<Eigen::VectorXd> aff;
    for (int i = 0; i < 4; ++i) {
        double denom = chart.dot(pts[i]->coords());
        if (std::abs(denom) < 1e-12 * pts[i]->coords().norm())
            throw ChartOverflow("cross_ratio_in_chart: point at infinity");
        aff.push_back(pts[i]->coords() / denom);
    }
    double xb = (aff[1] - aff[3]).norm();
    double ya = (aff[2] - aff[0]).norm();
    double xa = (aff[1] - aff[0]).norm();
    double yb = (aff[2] - aff[3]).norm();
    if (xa < 1e-300 || yb < 1e-300)
        throw DegenerateConfiguration("cross_ratio_in_chart: coincident points");
    return (xb * ya) / (xa * yb);
}

// Sorted eigenvalue moduli of a raw matrix (no det normalization; the
// relative gaps are scale invariant).
inline Eigen::VectorXd eigen_moduli_raw(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw EigenFailure("eigen solve failed");
    Eigen::VectorXd moduli = es.eigenvalues().cwiseAbs();
    std::sort(moduli.data(), moduli.data() + moduli.size(), std::greater<double>());
    return moduli;
}

inline bool proximal_gap(const Eigen::VectorXd& moduli) {
    return (moduli[0] - moduli[1]) / moduli[0] > kGapTol;
}

inline EigenData eigen_analysis(const ProjMap& g) {
    int d = g.dim();
    double det = std::abs(g.matrix().determinant());
    Eigen::MatrixXd lift = g.matrix() / std::pow(det, 1.0 / d); // |det| = 1
    Eigen::EigenSolver<Eigen::MatrixXd> es(lift);
    if (es.info() != Eigen::Success) throw EigenFailure("eigen_analysis failed");
    Eigen::VectorXd moduli = es.eigenvalues().cwiseAbs();
    std::sort(moduli.data(), moduli.data() + d, std::greater<double>());
    EigenData out;
    out.moduli = moduli;
    out.is_proximal = (moduli[0] - moduli[1]) / moduli[0] > kGapTol;
    out.is_biproximal =
        out.is_proximal && (moduli[d - 2] - moduli[d - 1]) / moduli[d - 2] > kGapTol;
    return out;
}

namespace detail {

// Dominant eigenline of g and the unit normal of the invariant complement
// (top eigenvector of the transpose). Requires a strictly dominant modulus,
// which forces the top eigenvalue to be real.
inline std::pair<ProjPoint, Eigen::VectorXd> dominant_pair(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw EigenFailure("eigen solve failed");
    Eigen::Index top = 0;
    es.eigenvalues().cwiseAbs().maxCoeff(&top);
    Eigen::VectorXd line = es.eigenvectors().col(top).real();

    Eigen::EigenSolver<Eigen::MatrixXd> est(m.transpose());
    if (est.info() != Eigen::Success) throw EigenFailure("eigen solve failed");
    Eigen::Index topt = 0;
    est.eigenvalues().cwiseAbs().maxCoeff(&topt);
    Eigen::VectorXd normal = est.eigenvectors().col(topt).real();
    normal /= normal.norm();
    return {ProjPoint(line), normal};
}

} // namespace detail

inline ProximalData proximal_data(const ProjMap& g) {
    EigenData ed = eigen_analysis(g);
    if (!ed.is_proximal) throw NotProximal("proximal_data: map is not proximal");
    auto [line, normal] = detail::dominant_pair(g.matrix());
    if (std::abs(line.unit().dot(normal)) <= kGapTol)
        throw error("proximal_data: transversality failure");
    ProximalData out{line, normal, std::nullopt, std::nullopt};
    if (ed.is_biproximal) {
        auto [line_inv, normal_inv] = detail::dominant_pair(g.matrix().inverse());
        out.repelling_line = line_inv;
        out.attracting_normal = normal_inv;
    }
    return out;
}

inline ProjPoint apply(const ProjEndo& T, const ProjPoint& x) {
    if (T.kernel_distance(x.coords()) <= kRankTol)
        throw InKernel("apply: point in kernel of endomorphism");
    return ProjPoint(T.matrix() * x.coords());
}

inline ProjEndo compose(const ProjEndo& S, const ProjEndo& T) {
    Eigen::MatrixXd prod = S.matrix() * T.matrix();
    if (prod.norm() <= 1e-12) throw ZeroComposite("compose: S*T vanishes");
    return ProjEndo(prod);
}

// Canonical forms of g, g^2, ..., g^n (iterate-and-renormalize).
inline std::vector<Eigen::MatrixXd> power_iterates(const ProjMap& g, int n) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(n);
    Eigen::MatrixXd cur = g.matrix();
    for (int k = 0; k < n; ++k) {
        out.push_back(detail::canonical_matrix(cur));
        cur = out.back() * g.matrix();
    }
    return out;
}

// Limit of canonical g^n in P(End(R^d)). Independent of the eigen-based
// route in proximal_data, so the two cross-validate each other.
inline ProjEndo power_limit(const ProjMap& g, int max_iter = 500, double tol = 1e-12) {
    if (max_iter < 1) throw error("power_limit: max_iter must be >= 1");
    Eigen::MatrixXd prev = detail::canonical_matrix(g.matrix());
    Eigen::MatrixXd cur = prev;
    int stable = 0;
    for (int k = 1; k < max_iter; ++k) {
        cur = detail::canonical_matrix(prev * g.matrix());
        double diff = (cur - prev).norm();
        prev = cur;
        stable = (diff < tol) ? stable + 1 : 0;
        if (stable >= 3) return ProjEndo(cur);
    }
    throw NoConvergence("power_limit: no limit within max_iter");
}

// Checks the proximality criterion on a convergent sequence of invertible
// maps given by their canonical forms: the limit must have rank one with
// image transverse to kernel. Returns the limit point. Works on raw
// matrices because canonical powers of a proximal map become numerically
// rank deficient long before the sequence settles.
inline std::pair<bool, ProjPoint> proximality_from_limit(
    const std::vector<Eigen::MatrixXd>& seq) {
    if (seq.size() < 4) throw NotConverged("proximality_from_limit: sequence too short");
    std::size_t tail = seq.size() - seq.size() / 4;
    std::vector<Eigen::MatrixXd> canon;
    canon.reserve(seq.size());
    for (const auto& m : seq) canon.push_back(detail::canonical_matrix(m));
    for (std::size_t i = tail; i + 1 < canon.size(); ++i)
        if ((canon[i + 1] - canon[i]).norm() > 1e-8)
            throw NotConverged("proximality_from_limit: not Cauchy");
    ProjEndo T(canon.back());
    if (T.rank() > 1) throw RankTooHigh("proximality_from_limit: limit rank > 1");
    Eigen::VectorXd image = T.image_basis().col(0);
    if (T.kernel_distance(image) <= kRankTol)
        throw NotTransverse("proximality_from_limit: image inside kernel");
    ProjPoint limit_point(image);
    // All but finitely many terms must be proximal with ell^+ near the limit.
    for (std::size_t i = tail; i < canon.size(); ++i) {
        Eigen::VectorXd moduli = eigen_moduli_raw(canon[i]);
        if (!proximal_gap(moduli))
            throw error("proximality_from_limit: tail element not proximal");
        auto [line, normal] = detail::dominant_pair(canon[i]);
        (void)normal;
        if (line.distance(limit_point) > 1e-6)
            throw error("proximality_from_limit: tail ell+ far from limit");
    }
    return {true, limit_point};
}

inline std::pair<bool, ProjPoint> proximality_from_limit(const std::vector<ProjMap>& seq) {
    std::vector<Eigen::MatrixXd> mats;
    mats.reserve(seq.size());
    for (const auto& g : seq) mats.push_back(g.matrix());
    return proximality_from_limit(mats);
}

} // namespace cvp
