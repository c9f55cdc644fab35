// Command-line front end: load domains, run metric / dynamics / rank
// experiments, emit JSON reports and CSV plot data.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cvp/catalog.hpp"
#include "cvp/dynamics.hpp"
#include "cvp/hilbert.hpp"
#include "cvp/json_io.hpp"
#include "cvp/rankcheck.hpp"

namespace {

using cvp::ojson;

std::vector<double> parse_floats(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

cvp::ProjPoint parse_point(const cvp::ConvexDomain& D, const std::string& s) {
    std::vector<double> v = parse_floats(s);
    int d = D.ambient_dim();
    if (static_cast<int>(v.size()) == d) {
        Eigen::VectorXd h = Eigen::Map<Eigen::VectorXd>(v.data(), d);
        return cvp::ProjPoint(h);
    }
    // affine chart coordinates for domains charted on {x_0 = 1}
    if (static_cast<int>(v.size()) == d - 1 &&
        (D.chart_covector() - Eigen::VectorXd::Unit(d, 0)).norm() < 1e-12) {
        Eigen::VectorXd h(d);
        h[0] = 1.0;
        for (int i = 0; i + 1 < d; ++i) h[i + 1] = v[i];
        return cvp::ProjPoint(h);
    }
    throw cvp::error("point '" + s + "': expected " + std::to_string(d) +
                     " homogeneous or " + std::to_string(d - 1) + " chart coordinates");
}

cvp::ProjMap resolve_map(const cvp::ConvexDomain& D, const std::string& aut_name,
                         const std::string& matrix_csv) {
    if (!matrix_csv.empty()) {
        std::vector<double> v = parse_floats(matrix_csv);
        int d = D.ambient_dim();
        if (static_cast<int>(v.size()) != d * d)
            throw cvp::error("matrix: expected " + std::to_string(d * d) +
                             " row-major entries");
        Eigen::MatrixXd m(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) m(r, c) = v[r * d + c];
        return cvp::ProjMap(m);
    }
    for (const auto& aut : D.automorphisms())
        if (aut.name == aut_name) return aut.map;
    throw cvp::error("unknown catalog automorphism '" + aut_name + "' for domain " +
                     D.id());
}

void emit(const ojson& report, const std::string& out_path) {
    std::string text = report.dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw cvp::error("cannot open output file " + out_path);
        out << text;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"convex projective geometry toolkit"};
    app.require_subcommand(1);

    std::string domain_spec = "disk", out_path, csv_path;
    std::string x_str, y_str, aut_name, matrix_csv, phi_csv, psi_csv;
    std::uint64_t seed = 7;
    int samples = 1000, cap = 3, n_iter = 40, n_max = 20, mesh = 1000, pairs = 500;
    double tol = 1e-12, ra = 0.2, rb = 0.2;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--domain", domain_spec, "built-in id or JSON file");
        cmd->add_option("--seed", seed, "RNG seed");
        cmd->add_option("--tol", tol, "convergence tolerance for limit detection");
        cmd->add_option("--out", out_path, "write the JSON report here");
    };

    auto* cmd_distance = app.add_subcommand("distance", "Hilbert distance between two points");
    add_common(cmd_distance);
    cmd_distance->add_option("--x", x_str)->required();
    cmd_distance->add_option("--y", y_str)->required();

    auto* cmd_classify = app.add_subcommand("classify", "eigen data, proximality, rank-one verdict");
    add_common(cmd_classify);
    cmd_classify->add_option("--aut", aut_name, "catalog automorphism name");
    cmd_classify->add_option("--matrix", matrix_csv, "row-major matrix entries");
    cmd_classify->add_option("--cap", cap);
    cmd_classify->add_option("--samples", samples);

    auto* cmd_orbit = app.add_subcommand("orbit", "orbit of a point under an automorphism");
    add_common(cmd_orbit);
    cmd_orbit->add_option("--aut", aut_name);
    cmd_orbit->add_option("--matrix", matrix_csv);
    cmd_orbit->add_option("--x", x_str)->required();
    cmd_orbit->add_option("--n", n_iter);

    auto* cmd_pingpong = app.add_subcommand("pingpong", "proximal elements from a bi-proximal pair");
    add_common(cmd_pingpong);
    cmd_pingpong->add_option("--phi", phi_csv, "row-major matrix for phi")->required();
    cmd_pingpong->add_option("--psi", psi_csv, "row-major matrix for psi")->required();
    cmd_pingpong->add_option("--n", n_iter);

    auto* cmd_nscheck = app.add_subcommand("nscheck", "north-south dynamics threshold");
    add_common(cmd_nscheck);
    cmd_nscheck->add_option("--aut", aut_name);
    cmd_nscheck->add_option("--matrix", matrix_csv);
    cmd_nscheck->add_option("--ra", ra, "neighborhood radius at ell+");
    cmd_nscheck->add_option("--rb", rb, "neighborhood radius at ell-");
    cmd_nscheck->add_option("--nmax", n_max);
    cmd_nscheck->add_option("--mesh", mesh);

    auto* cmd_rank = app.add_subcommand("rankreport", "sampled rank characterization report");
    add_common(cmd_rank);
    cmd_rank->add_option("--pairs", pairs);
    cmd_rank->add_option("--samples", samples);
    cmd_rank->add_option("--cap", cap);
    cmd_rank->add_option("--csv", csv_path, "write per-pair s and per-element tau CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        auto D = cvp::resolve_domain(domain_spec);

        if (cmd_distance->parsed()) {
            cvp::ProjPoint x = parse_point(*D, x_str), y = parse_point(*D, y_str);
            ojson rep;
            rep["command"] = "distance";
            rep["domain"] = D->id();
            rep["x"] = cvp::point_to_json(x);
            rep["y"] = cvp::point_to_json(y);
            double h = cvp::hilbert_distance(*D, x, y);
            rep["hilbert_distance"] = h;
            if (!x.approx_equal(y)) {
                cvp::BoundaryChord c = D->chord(x, y);
                rep["chord_a"] = cvp::point_to_json(c.a);
                rep["chord_b"] = cvp::point_to_json(c.b);
                rep["cross_ratio"] = cvp::cross_ratio(c.a, x, y, c.b);
            }
            emit(rep, out_path);
        } else if (cmd_classify->parsed()) {
            cvp::ProjMap g = resolve_map(*D, aut_name, matrix_csv);
            cvp::EigenData ed = cvp::eigen_analysis(g);
            ojson rep;
            rep["command"] = "classify";
            rep["domain"] = D->id();
            ojson moduli = ojson::array();
            for (Eigen::Index i = 0; i < ed.moduli.size(); ++i)
                moduli.push_back(ed.moduli[i]);
            rep["moduli"] = moduli;
            rep["is_proximal"] = ed.is_proximal;
            rep["is_biproximal"] = ed.is_biproximal;
            if (ed.is_proximal) {
                cvp::ProximalData pd = cvp::proximal_data(g);
                rep["attracting_line"] = cvp::point_to_json(pd.attracting_line);
                if (pd.repelling_line)
                    rep["repelling_line"] = cvp::point_to_json(*pd.repelling_line);
            }
            cvp::TranslationData td = cvp::min_translation(*D, g, samples, seed);
            rep["translation"] = cvp::translation_to_json(td);
            rep["rank_one"] = cvp::verdict_to_json(cvp::rank_one_verdict(*D, g, cap));
            emit(rep, out_path);
        } else if (cmd_orbit->parsed()) {
            cvp::ProjMap g = resolve_map(*D, aut_name, matrix_csv);
            cvp::ProjPoint x = parse_point(*D, x_str);
            cvp::OrbitRecord rec = cvp::orbit(*D, g, x, n_iter, tol);
            ojson rep;
            rep["command"] = "orbit";
            rep["domain"] = D->id();
            ojson traj = ojson::array();
            for (const auto& p : rec.trajectory) traj.push_back(cvp::point_to_json(p));
            rep["trajectory"] = traj;
            if (rec.limit_point) rep["limit_point"] = cvp::point_to_json(*rec.limit_point);
            emit(rep, out_path);
        } else if (cmd_pingpong->parsed()) {
            int d = D->ambient_dim();
            auto parse_mat = [&](const std::string& csv) {
                std::vector<double> v = parse_floats(csv);
                if (static_cast<int>(v.size()) != d * d)
                    throw cvp::error("matrix: expected " + std::to_string(d * d) + " entries");
                Eigen::MatrixXd m(d, d);
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c) m(r, c) = v[r * d + c];
                return cvp::ProjMap(m);
            };
            cvp::PingPongResult res = cvp::ping_pong(parse_mat(phi_csv), parse_mat(psi_csv), n_iter);
            ojson rep;
            rep["command"] = "pingpong";
            ojson steps = ojson::array();
            for (const auto& s : res.steps) {
                ojson js;
                js["n"] = s.n;
                js["is_proximal"] = s.is_proximal;
                if (s.attracting) js["attracting"] = cvp::point_to_json(*s.attracting);
                steps.push_back(js);
            }
            rep["steps"] = steps;
            rep["target"] = cvp::point_to_json(res.phi_attracting);
            emit(rep, out_path);
        } else if (cmd_nscheck->parsed()) {
            cvp::ProjMap g = resolve_map(*D, aut_name, matrix_csv);
            auto N = cvp::north_south_check(*D, g, ra, rb, n_max, mesh, seed);
            ojson rep;
            rep["command"] = "nscheck";
            rep["domain"] = D->id();
            rep["params"] = {{"ra", ra}, {"rb", rb}, {"nmax", n_max}, {"mesh", mesh}};
            rep["seed"] = seed;
            rep["N"] = N ? ojson(*N) : ojson("Fail");
            emit(rep, out_path);
        } else if (cmd_rank->parsed()) {
            cvp::RankConfig cfg{pairs, samples, cap, seed};
            cvp::RankReport rep = cvp::rank_report(*D, cfg);
            emit(rep.to_json(), out_path);
            if (!csv_path.empty()) {
                std::ofstream csv(csv_path, std::ios::binary);
                if (!csv) throw cvp::error("cannot open CSV file " + csv_path);
                csv << "record,key,value\n";
                for (std::size_t i = 0; i < rep.s_samples.size(); ++i)
                    csv << "s_pair," << i << ","
                        << (rep.s_samples[i] < 0 ? std::string("inf")
                                                 : std::to_string(rep.s_samples[i]))
                        << "\n";
                for (const auto& [name, tau] : rep.taus)
                    csv << "tau," << name << "," << tau << "\n";
            }
        }
        return 0;
    } catch (const cvp::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
