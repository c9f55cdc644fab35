#include <catch2/catch_amalgamated.hpp>

#include "cvp/catalog.hpp"
#include "cvp/dynamics.hpp"

using namespace cvp;

namespace {

ProjPoint pt(std::initializer_list<double> v) {
    Eigen::VectorXd u(v.size());
    int i = 0;
    for (double x : v) u[i++] = x;
    return ProjPoint(u);
}

ProjMap diag3(double a, double b, double c) {
    return ProjMap(Eigen::Matrix3d(Eigen::Vector3d(a, b, c).asDiagonal()));
}

// psi = P phi P^{-1} with Vandermonde columns (1,1,1), (1,2,3), (1,4,9):
// all eight ping-pong transversality margins are nonzero.
ProjMap vandermonde_conjugate(const ProjMap& phi) {
    Eigen::Matrix3d P;
    P << 1, 1, 1, 1, 2, 4, 1, 3, 9;
    return ProjMap(P * phi.matrix() * P.inverse());
}

} // namespace

TEST_CASE("orbit of a simplex diagonal converges to the vertex", "[dynamics]") {
    Simplex S(2);
    ProjMap g = diag3(4, 2, 1);
    OrbitRecord rec = orbit(S, g, S.center(), 30);
    REQUIRE(rec.trajectory.size() == 31);
    for (const auto& p : rec.trajectory) REQUIRE(S.classify(p) != Region::Outside);
    REQUIRE(rec.limit_point.has_value());
    REQUIRE(rec.limit_point->approx_equal(S.vertex(0), 1e-9));
    REQUIRE(rec.limit_endo.has_value());
    REQUIRE(rec.limit_endo->rank() == 1);

    REQUIRE_THROWS_AS(orbit(S, diag3(1, 1, -1), S.center(), 5), NotAutomorphism);
    REQUIRE_THROWS_AS(orbit(S, g, pt({1, 1, -1}), 5), NotInterior);
}

TEST_CASE("orbit without a power limit still records the trajectory", "[dynamics]") {
    Ellipsoid D(2);
    ProjMap rot = Ellipsoid::rotation(2, 1, 2, 1.0);  // irrational rotation
    OrbitRecord rec = orbit(D, rot, pt({1, 0.3, 0.0}), 10);
    REQUIRE(rec.trajectory.size() == 11);
    REQUIRE_FALSE(rec.limit_point.has_value());
}

TEST_CASE("face dynamics of a convergent power sequence", "[dynamics]") {
    Simplex S(2);
    ProjMap g = diag3(4, 2, 1);
    auto seq = power_iterates(g, 60);
    FaceDynamicsReport rep = face_dynamics_check(S, seq, S.center());
    REQUIRE(rep.attracting.approx_equal(S.vertex(0), 1e-8));
    REQUIRE(rep.repelling.approx_equal(S.vertex(2), 1e-8));
    CHECK(rep.clauses.size() == 3);
    for (const auto& c : rep.clauses) {
        INFO(c.name << " residual " << c.residual);
        CHECK(c.pass);
    }
    REQUIRE(rep.all_pass());

    // a short or oscillating sequence is rejected
    REQUIRE_THROWS_AS(face_dynamics_check(S, power_iterates(g, 3), S.center()),
                      NotConverged);
    auto wobble = power_iterates(g, 60);
    wobble.back() = power_iterates(diag3(4, 1, 2), 60).back();
    REQUIRE_THROWS_AS(face_dynamics_check(S, wobble, S.center()), NotConverged);
}

TEST_CASE("face dynamics on the psd cone", "[dynamics]") {
    PsdCone3 P;
    const auto& auts = P.automorphisms();
    auto it = std::find_if(auts.begin(), auts.end(),
                           [](const CatalogAut& a) { return a.name == "cong_diag3"; });
    REQUIRE(it != auts.end());
    auto seq = power_iterates(it->map, 80);
    FaceDynamicsReport rep = face_dynamics_check(P, seq, P.center());
    // forward limit is the rank-one extreme point [e1 e1^T]
    Eigen::Matrix3d e11 = Eigen::Matrix3d::Zero();
    e11(0, 0) = 1.0;
    REQUIRE(rep.attracting.approx_equal(PsdCone3::from_matrix(e11), 1e-7));
    REQUIRE(rep.all_pass());
}

TEST_CASE("ping pong on the diagonal/conjugate pair", "[dynamics]") {
    ProjMap phi = diag3(9, 3, 1);
    ProjMap psi = vandermonde_conjugate(phi);
    PingPongResult res = ping_pong(phi, psi, 40);
    REQUIRE(res.steps.size() == 40);
    REQUIRE(res.phi_attracting.approx_equal(pt({1, 0, 0}), 1e-9));

    // proximal from some N <= 10 onwards, with ell+ converging to ell+_phi
    int first_stable = -1;
    for (int n = static_cast<int>(res.steps.size()); n >= 1; --n) {
        if (!res.steps[n - 1].is_proximal) break;
        first_stable = n;
    }
    REQUIRE(first_stable >= 1);
    REQUIRE(first_stable <= 10);
    const auto& last = res.steps.back();
    REQUIRE(last.is_proximal);
    REQUIRE(last.attracting.has_value());
    REQUIRE(last.attracting->distance(res.phi_attracting) <= 1e-6);
    REQUIRE(last.repelling.has_value());
    // ell^- of g_n approaches ell^+ of psi = P e1
    Eigen::Matrix3d P;
    P << 1, 1, 1, 1, 2, 4, 1, 3, 9;
    REQUIRE(last.repelling->distance(ProjPoint(P.col(0))) <= 1e-6);
}

TEST_CASE("ping pong rejects violated transversality", "[dynamics]") {
    // a coordinate-permutation conjugate of a diagonal keeps every eigenline
    // inside a coordinate hyperplane of the other element
    ProjMap phi = diag3(9, 3, 1);
    ProjMap psi = diag3(1, 9, 3);
    REQUIRE_THROWS_AS(ping_pong(phi, psi, 10), HypothesisViolated);
    // non bi-proximal input
    REQUIRE_THROWS_AS(ping_pong(diag3(9, 1, 1), psi, 10), HypothesisViolated);
}

TEST_CASE("rank one verdicts on catalog elements", "[dynamics]") {
    Ellipsoid disk(2);
    RankOneVerdict vb = rank_one_verdict(disk, Ellipsoid::boost(2, 1, 1.0), 3);
    REQUIRE(vb.is_biproximal);
    REQUIRE(vb.verdict == RankVerdict::RankOneIsometry);
    REQUIRE(vb.attracting->approx_equal(pt({1, 1, 0}), 1e-8));
    REQUIRE(vb.repelling->approx_equal(pt({1, -1, 0}), 1e-8));
    REQUIRE(vb.segment_interior);
    REQUIRE(vb.s_value.has_value());
    REQUIRE(vb.s_value->greater_than(2));
    REQUIRE(vb.char2_checked);
    REQUIRE(vb.char2_pass);

    RankOneVerdict vr = rank_one_verdict(disk, Ellipsoid::rotation(2, 1, 2, 1.0), 3);
    REQUIRE_FALSE(vr.is_biproximal);
    REQUIRE(vr.verdict == RankVerdict::Inconclusive);

    Simplex S(2);
    RankOneVerdict vs = rank_one_verdict(S, diag3(4, 2, 1), 3);
    REQUIRE(vs.is_biproximal);
    REQUIRE(vs.verdict == RankVerdict::HigherRankWitness);
    REQUIRE(vs.s_value->finite);
    REQUIRE(vs.s_value->value == 1);

    PsdCone3 P;
    RankOneVerdict vp = rank_one_verdict(P, P.automorphisms()[0].map, 3);
    REQUIRE(vp.is_biproximal);
    REQUIRE(vp.verdict == RankVerdict::HigherRankWitness);

    REQUIRE_THROWS_AS(rank_one_verdict(disk, diag3(1, 2, 1), 3), NotAutomorphism);
}

TEST_CASE("north-south dynamics of the disk boost", "[dynamics]") {
    Ellipsoid D(2);
    ProjMap g = Ellipsoid::boost(2, 1, 1.0);
    auto N = north_south_check(D, g, 0.2, 0.2, 20, 400, 17);
    REQUIRE(N.has_value());
    REQUIRE(*N >= 1);
    REQUIRE(*N <= 20);
    // tighter radii need more iterations
    auto N_tight = north_south_check(D, g, 0.05, 0.05, 20, 400, 17);
    REQUIRE(N_tight.has_value());
    REQUIRE(*N_tight >= *N);
}

TEST_CASE("north-south rejects simplex diagonals", "[dynamics]") {
    Simplex S(2);
    REQUIRE_THROWS_AS(north_south_check(S, diag3(4, 2, 1), 0.2, 0.2, 20, 100),
                      HypothesisViolated);
    Ellipsoid D(2);
    REQUIRE_THROWS_AS(
        north_south_check(D, Ellipsoid::rotation(2, 1, 2, 1.0), 0.2, 0.2, 20, 100),
        HypothesisViolated);
}
