#include <catch2/catch_amalgamated.hpp>

#include "cvp/projective.hpp"
#include "cvp/rng.hpp"

using namespace cvp;

namespace {

ProjPoint pt(std::initializer_list<double> v) {
    Eigen::VectorXd u(v.size());
    int i = 0;
    for (double x : v) u[i++] = x;
    return ProjPoint(u);
}

// Random invertible map with a mild condition number.
ProjMap random_map(Rng& rng, int d) {
    for (;;) {
        Eigen::MatrixXd m = rng.gaussian_matrix(d, d);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        const auto& sv = svd.singularValues();
        if (sv[d - 1] > 0.05 * sv[0]) return ProjMap(m);
    }
}

} // namespace

TEST_CASE("canonical point normalization", "[projective]") {
    ProjPoint p = pt({-2.0, 4.0, 0.0});
    REQUIRE(p.coords()[0] == Catch::Approx(0.5));
    REQUIRE(p.coords()[1] == Catch::Approx(-1.0));
    REQUIRE(p.coords().cwiseAbs().maxCoeff() == Catch::Approx(1.0));
    // first significant coordinate positive
    REQUIRE(p.coords()[0] > 0.0);
    REQUIRE(pt({1, 2, 3}).approx_equal(pt({-2, -4, -6})));
    REQUIRE_FALSE(pt({1, 2, 3}).approx_equal(pt({1, 2, 4})));
    REQUIRE_THROWS_AS(ProjPoint(Eigen::VectorXd::Zero(3)), error);
}

TEST_CASE("cross ratio of evenly placed collinear points", "[projective]") {
    // a, x, y, b at chart positions -1, 0, 1/2, 1: [a,x,y,b] = 3
    ProjPoint a = pt({1, -1, 0}), x = pt({1, 0, 0}), y = pt({1, 0.5, 0}), b = pt({1, 1, 0});
    REQUIRE(cross_ratio(a, x, y, b) == Catch::Approx(3.0).margin(1e-12));
    // chart route agrees
    Eigen::VectorXd chart = Eigen::VectorXd::Unit(3, 0);
    REQUIRE(cross_ratio_in_chart(a, x, y, b, chart) == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("cross ratio error conditions", "[projective]") {
    ProjPoint a = pt({1, -1, 0}), x = pt({1, 0, 0}), b = pt({1, 1, 0});
    REQUIRE_THROWS_AS(cross_ratio(a, x, x, b), DegenerateConfiguration);
    REQUIRE_THROWS_AS(cross_ratio(a, x, pt({1, 0.5, 0.5}), b), NotCollinear);
}

TEST_CASE("cross ratio is a projective invariant", "[projective][property]") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        int d = 3 + trial % 3;
        // four distinct points on a random line
        Eigen::VectorXd u = rng.gaussian_vector(d), v = rng.gaussian_vector(d);
        double t[4] = {-1.3, 0.2, 0.9, 2.1};
        std::vector<ProjPoint> p;
        for (double ti : t) p.push_back(ProjPoint(u + ti * v));
        double cr = cross_ratio(p[0], p[1], p[2], p[3]);
        ProjMap g = random_map(rng, d);
        double cr_g = cross_ratio(g(p[0]), g(p[1]), g(p[2]), g(p[3]));
        REQUIRE(cr_g == Catch::Approx(cr).epsilon(1e-8));
    }
}

TEST_CASE("cross ratio is chart independent", "[projective][property]") {
    Rng rng(102);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd u = rng.gaussian_vector(3), v = rng.gaussian_vector(3);
        double t[4] = {-0.7, 0.1, 0.6, 1.4};
        std::vector<ProjPoint> p;
        for (double ti : t) p.push_back(ProjPoint(u + ti * v));
        double cr = cross_ratio(p[0], p[1], p[2], p[3]);
        for (int c = 0; c < 4; ++c) {
            Eigen::VectorXd chart =
                (c < 3) ? Eigen::VectorXd(Eigen::VectorXd::Unit(3, c)) : rng.gaussian_vector(3);
            try {
                double crc = cross_ratio_in_chart(p[0], p[1], p[2], p[3], chart);
                REQUIRE(std::abs(crc) == Catch::Approx(std::abs(cr)).epsilon(1e-6));
            } catch (const ChartOverflow&) {
                // a point fell on the chart hyperplane; nothing to compare
            }
        }
    }
}

TEST_CASE("ProjMap basics", "[projective]") {
    Eigen::Matrix3d m;
    m << 4, 0, 0, 0, 2, 0, 0, 0, 1;
    ProjMap g(m);
    REQUIRE(g.matrix().norm() == Catch::Approx(1.0));
    REQUIRE((g * g.inverse()).matrix().isApprox(
        Eigen::Matrix3d::Identity() / std::sqrt(3.0), 1e-9));
    REQUIRE(g(pt({1, 1, 1})).approx_equal(pt({4, 2, 1})));
    Eigen::Matrix3d sing = Eigen::Matrix3d::Zero();
    sing(0, 0) = 1.0;
    REQUIRE_THROWS_AS(ProjMap(sing), error);
}

TEST_CASE("ProjEndo rank, image and kernel", "[projective]") {
    Rng rng(103);
    for (int trial = 0; trial < 50; ++trial) {
        int d = 3 + trial % 3;
        int r = 1 + trial % d;
        Eigen::MatrixXd m = rng.gaussian_matrix(d, r) * rng.gaussian_matrix(r, d);
        ProjEndo T(m);
        REQUIRE(T.rank() == r);
        REQUIRE(T.image_basis().cols() == r);
        REQUIRE(T.kernel_basis().cols() == d - r);
        // T annihilates its kernel basis
        if (r < d)
            REQUIRE((T.matrix() * T.kernel_basis()).norm() < 1e-8);
        // image basis spans the column space
        Eigen::MatrixXd proj = T.image_basis() * T.image_basis().transpose();
        REQUIRE((proj * T.matrix() - T.matrix()).norm() < 1e-8);
    }
}

TEST_CASE("apply rejects kernel points", "[projective]") {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    m(0, 0) = 1.0;
    ProjEndo T(m);
    REQUIRE(apply(T, pt({1, 1, 0})).approx_equal(pt({1, 0, 0})));
    REQUIRE_THROWS_AS(apply(T, pt({0, 1, 0})), InKernel);
}

TEST_CASE("compose is associative on rank deficient triples", "[projective][property]") {
    Rng rng(104);
    for (int trial = 0; trial < 100; ++trial) {
        int d = 3 + trial % 3;
        auto rand_rk = [&](int r) {
            return Eigen::MatrixXd(rng.gaussian_matrix(d, r) * rng.gaussian_matrix(r, d));
        };
        ProjEndo A(rand_rk(2)), B(rand_rk(d - 1)), C(rand_rk(2));
        try {
            ProjEndo left = compose(compose(A, B), C);
            ProjEndo right = compose(A, compose(B, C));
            REQUIRE((left.matrix() - right.matrix()).norm() < 1e-9);
        } catch (const ZeroComposite&) {
            // composite vanished; both orders must agree on that too
            REQUIRE_THROWS_AS(compose(A, compose(B, C)), ZeroComposite);
        }
    }
}

TEST_CASE("compose detects vanishing products", "[projective]") {
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero(), b = Eigen::Matrix2d::Zero();
    a(0, 0) = 1.0;  // projector to e1 along e2
    b(1, 1) = 1.0;  // projector to e2 along e1
    REQUIRE_THROWS_AS(compose(ProjEndo(a), ProjEndo(b)), ZeroComposite);
}

TEST_CASE("eigen analysis and proximality", "[projective]") {
    Eigen::Matrix3d diag = Eigen::Vector3d(4, 2, 1).asDiagonal();
    EigenData ed = eigen_analysis(ProjMap(diag));
    REQUIRE(ed.is_proximal);
    REQUIRE(ed.is_biproximal);
    // det-normalized moduli with product 1
    REQUIRE(ed.moduli.prod() == Catch::Approx(1.0));
    REQUIRE(ed.moduli[0] / ed.moduli[1] == Catch::Approx(2.0));

    Eigen::Matrix3d rot;
    rot << 1, 0, 0, 0, 0, -1, 0, 1, 0;
    EigenData er = eigen_analysis(ProjMap(rot));
    REQUIRE_FALSE(er.is_proximal);
}

TEST_CASE("proximal data: attracting line and repelling hyperplane", "[projective]") {
    Eigen::Matrix3d m;
    m << 4, 1, 0, 0, 2, 0, 0, 0, 1;  // upper triangular, eigenvalues 4,2,1
    ProjMap g(m);
    ProximalData pd = proximal_data(g);
    REQUIRE(pd.attracting_line.approx_equal(pt({1, 0, 0}), 1e-9));
    // H^- is spanned by the non-dominant eigenvectors (2,-1,0)... wait:
    // normal = top eigenvector of the transpose; g^T e = 4e at e=(1,0,0)?
    // g^T = [[4,0,0],[1,2,0],[0,0,1]]: eigenvector for 4 is (2, 1, 0)/norm? check residual instead
    Eigen::VectorXd n = pd.repelling_normal;
    REQUIRE((m.transpose() * n - 4.0 * n).norm() < 1e-8 * m.norm());
    // the repelling hyperplane is g-invariant and misses ell^+
    REQUIRE(std::abs(pd.attracting_line.unit().dot(n)) > 1e-3);
    REQUIRE(pd.repelling_line.has_value());
    REQUIRE(pd.repelling_line->approx_equal(pt({0, 0, 1}), 1e-8));
    REQUIRE_THROWS_AS(proximal_data(ProjMap(Eigen::Matrix3d(Eigen::Matrix3d::Identity()))),
                      NotProximal);
}

TEST_CASE("power limit of a proximal map is the spectral projector", "[projective]") {
    Eigen::Matrix3d diag = Eigen::Vector3d(4, 2, 1).asDiagonal();
    ProjEndo T = power_limit(ProjMap(diag));
    REQUIRE(T.rank() == 1);
    Eigen::Matrix3d proj = Eigen::Matrix3d::Zero();
    proj(0, 0) = 1.0;  // analytic limit of diag(4,2,1)^n / 4^n
    REQUIRE((T.matrix() - proj).norm() < 1e-9);

    Eigen::Matrix3d rot;
    rot << 1, 0, 0, 0, 0, -1, 0, 1, 0;
    REQUIRE_THROWS_AS(power_limit(ProjMap(rot), 200), NoConvergence);
}

TEST_CASE("canonical powers compose", "[projective][property]") {
    Rng rng(105);
    for (int trial = 0; trial < 20; ++trial) {
        ProjMap g = random_map(rng, 3);
        auto pows = power_iterates(g, 12);
        for (int m = 1; m <= 5; ++m) {
            for (int n = 1; n + m <= 12; ++n) {
                Eigen::MatrixXd prod =
                    detail::canonical_matrix(pows[m - 1] * pows[n - 1]);
                REQUIRE((prod - pows[m + n - 1]).norm() < 1e-8);
            }
        }
    }
}

TEST_CASE("proximality criterion from a convergent power sequence", "[projective]") {
    Eigen::Matrix3d diag = Eigen::Vector3d(4, 2, 1).asDiagonal();
    auto seq = power_iterates(ProjMap(diag), 60);
    auto [ok, limit] = proximality_from_limit(seq);
    REQUIRE(ok);
    REQUIRE(limit.approx_equal(pt({1, 0, 0}), 1e-9));

    // a non-proximal convergent sequence has limit rank > 1
    std::vector<Eigen::MatrixXd> ids(10, Eigen::Matrix3d::Identity());
    REQUIRE_THROWS_AS(proximality_from_limit(ids), RankTooHigh);

    // a rotating sequence does not converge
    Eigen::Matrix3d rot;
    rot << 1, 0, 0, 0, 0, -1, 0, 1, 0;
    auto rotseq = power_iterates(ProjMap(rot), 40);
    REQUIRE_THROWS_AS(proximality_from_limit(rotseq), NotConverged);
}

TEST_CASE("projective point distance is a metric on lines", "[projective][property]") {
    Rng rng(106);
    for (int trial = 0; trial < 200; ++trial) {
        ProjPoint a(rng.gaussian_vector(4)), b(rng.gaussian_vector(4)),
            c(rng.gaussian_vector(4));
        REQUIRE(a.distance(a) < 1e-7);
        REQUIRE(a.distance(b) == Catch::Approx(b.distance(a)).margin(1e-12));
        REQUIRE(a.distance(c) <= a.distance(b) + b.distance(c) + 1e-10);
        // sign-of-lift invariance
        REQUIRE(a.distance(ProjPoint(-2.0 * b.coords())) ==
                Catch::Approx(a.distance(b)).margin(1e-12));
    }
}
