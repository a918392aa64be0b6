// dhrg: generate, convert, score, improve and route DHRG/HRG embeddings.
//
// Errors are reported on stderr as a single line "dhrg: error: <message>"
// with exit status 1 (2 for command-line usage errors).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dhrg/dhrg.hpp"

using namespace dhrg;

namespace {

std::string default_tiling() {
    if (const char* env = std::getenv("DHRG_TILING"); env && *env) return env;
    return "g710";
}

std::string fmt(double x) { return detail::format_double(x); }

void print_params(std::ostream& out, const char* label, const ModelParams& p) {
    out << label << " n " << p.n << " R " << fmt(p.R) << " T " << fmt(p.T) << " alpha " << fmt(p.alpha) << '\n';
}

/// Continuous or discrete, told apart by the header width.
bool is_discrete_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path + " for reading");
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream fields(line);
        std::string f;
        int count = 0;
        while (fields >> f) ++count;
        if (count == 5) return true;
        if (count == 4) return false;
        if (count != 0) throw std::runtime_error(path + ": unrecognized embedding header");
    }
    throw std::runtime_error(path + ": empty embedding file");
}

DiscreteEmbedding load_discrete(const std::string& path) {
    return read_file<DiscreteEmbedding>(path, [](std::istream& in, const std::string& src) { return read_discrete(in, nullptr, src); });
}

ContinuousEmbedding load_continuous(const std::string& path) {
    return read_file<ContinuousEmbedding>(path, [](std::istream& in, const std::string& src) { return read_continuous(in, src); });
}

Graph load_graph(const std::string& path, std::size_t n) {
    return read_file<Graph>(path, [n](std::istream& in, const std::string& src) { return read_graph(in, n, src); });
}

void report_components(const Graph& g) {
    const auto comp = detail::components(g);
    std::map<std::uint32_t, std::size_t> sizes;
    for (auto c : comp) ++sizes[c];
    if (sizes.size() <= 1) return;
    std::size_t largest = 0;
    for (auto [c, s] : sizes) largest = std::max(largest, s);
    std::cerr << "dhrg: warning: graph is disconnected: " << sizes.size() << " components, largest has " << largest << " of "
              << g.vertex_count() << " vertices; cross-component pairs are skipped\n";
}

struct PipelineRow {
    std::string label;
    double value;
    std::string note;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete hyperbolic random graphs: generation, embedding conversion, likelihood and routing"};
    app.set_version_flag("--version", std::string("dhrg ") + kVersion);
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads for parallel sections (0 = all cores)");

    const std::string tiling_default = default_tiling();

    // generate
    auto* gen = app.add_subcommand("generate", "Sample a DHRG or HRG graph with its embedding");
    std::string gen_model = "dhrg", gen_graph, gen_embedding;
    std::size_t gen_n = 1000;
    std::optional<double> gen_R;
    double gen_T = 0.1, gen_alpha = 0.75;
    std::uint64_t gen_seed = 1;
    std::string gen_tiling = tiling_default;
    gen->add_option("--model", gen_model, "dhrg or hrg")->check(CLI::IsMember({"dhrg", "hrg"}));
    gen->add_option("-n,--n", gen_n, "Number of vertices")->check(CLI::PositiveNumber);
    gen->add_option("-R,--R", gen_R, "Radius (default: 2 ln n - 1, divided by c1 and rounded for dhrg)");
    gen->add_option("-T,--T", gen_T, "Temperature");
    gen->add_option("--alpha", gen_alpha, "Radial dispersion");
    gen->add_option("--seed", gen_seed, "Random seed");
    gen->add_option("--tiling", gen_tiling, "g710 or g810 (dhrg only)");
    gen->add_option("--graph", gen_graph, "Output graph file")->required();
    gen->add_option("--embedding", gen_embedding, "Output embedding file")->required();

    // discretize / dediscretize
    auto* disc = app.add_subcommand("discretize", "Map a continuous embedding to nearest tiles");
    std::string disc_in, disc_out, disc_tiling = tiling_default;
    double disc_c1 = kC1;
    disc->add_option("--input", disc_in, "Continuous embedding")->required();
    disc->add_option("--output", disc_out, "Discrete embedding to write")->required();
    disc->add_option("--tiling", disc_tiling, "g710 or g810");
    disc->add_option("--c1", disc_c1, "Distance scale between tiles and the hyperbolic plane");

    auto* dedisc = app.add_subcommand("dediscretize", "Replace tiles by their centers");
    std::string dedisc_in, dedisc_out;
    double dedisc_c1 = kC1;
    dedisc->add_option("--input", dedisc_in, "Discrete embedding")->required();
    dedisc->add_option("--output", dedisc_out, "Continuous embedding to write")->required();
    dedisc->add_option("--c1", dedisc_c1, "Distance scale between tiles and the hyperbolic plane");

    // loglik
    auto* ll = app.add_subcommand("loglik", "Log-likelihood of a graph under an embedding");
    std::string ll_graph, ll_embedding, ll_hist;
    bool ll_fit = false, ll_pointwise = false;
    double ll_eps = 1e-4;
    ll->add_option("--graph", ll_graph, "Graph file")->required();
    ll->add_option("--embedding", ll_embedding, "Discrete or continuous embedding")->required();
    ll->add_flag("--fit", ll_fit, "Also report the best (R, T)");
    ll->add_flag("--pointwise", ll_pointwise, "Also report the best arbitrary p(d) (discrete only)");
    ll->add_option("--eps", ll_eps, "Distance bucket width for continuous embeddings");
    ll->add_option("--histograms", ll_hist, "Write the discrete histograms here instead of stdout");

    // improve
    auto* imp = app.add_subcommand("improve", "Local search over a discrete embedding");
    std::string imp_graph, imp_embedding, imp_out, imp_history, imp_objective = "logistic";
    int imp_iters = 20;
    imp->add_option("--graph", imp_graph, "Graph file")->required();
    imp->add_option("--embedding", imp_embedding, "Discrete embedding")->required();
    imp->add_option("--output", imp_out, "Improved embedding to write")->required();
    imp->add_option("--history", imp_history, "Objective history to write");
    imp->add_option("--iters", imp_iters, "Iteration cap")->check(CLI::NonNegativeNumber);
    imp->add_option("--objective", imp_objective, "logistic or pointwise")->check(CLI::IsMember({"logistic", "pointwise"}));

    // route
    auto* route = app.add_subcommand("route", "Greedy routing success rate");
    std::string route_graph, route_embedding;
    std::size_t route_pairs = 100000;
    std::uint64_t route_seed = 1;
    route->add_option("--graph", route_graph, "Graph file")->required();
    route->add_option("--embedding", route_embedding, "Discrete or continuous embedding")->required();
    route->add_option("--pairs", route_pairs, "Pair budget (all ordered pairs when n(n-1) fits)");
    route->add_option("--seed", route_seed, "Random seed for pair sampling");

    // calibrate / rings
    auto* cal = app.add_subcommand("calibrate", "Expected hyperbolic distance of ring-d tiles, and c1/c2");
    std::string cal_tiling = tiling_default, cal_out;
    int cal_dmax = 200;
    std::size_t cal_samples = 2000;
    std::uint64_t cal_seed = 1;
    cal->add_option("tiling", cal_tiling, "g710 or g810");
    cal->add_option("--dmax", cal_dmax, "Deepest ring")->check(CLI::Range(2, 100000));
    cal->add_option("--samples", cal_samples, "Samples per sampled ring");
    cal->add_option("--seed", cal_seed, "Random seed");
    cal->add_option("--output", cal_out, "Write the per-ring report here instead of stdout");

    auto* rings = app.add_subcommand("rings", "Ring sizes |R_d|");
    std::string rings_tiling = tiling_default;
    int rings_dmax = 16;
    rings->add_option("tiling", rings_tiling, "g710 or g810");
    rings->add_option("--dmax", rings_dmax, "Deepest ring")->check(CLI::NonNegativeNumber);

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "discretize -> improve -> dediscretize, with log-likelihood rows");
    std::string pipe_graph, pipe_embedding, pipe_tiling = tiling_default, pipe_objective = "logistic";
    std::optional<std::size_t> pipe_generate;
    std::uint64_t pipe_seed = 1;
    int pipe_iters = 20;
    double pipe_eps = 1e-4;
    pipe->add_option("--graph", pipe_graph, "Graph file");
    pipe->add_option("--embedding", pipe_embedding, "Continuous embedding");
    pipe->add_option("--generate", pipe_generate, "Use a generated HRG with this many vertices instead of files");
    pipe->add_option("--seed", pipe_seed, "Random seed for --generate");
    pipe->add_option("--tiling", pipe_tiling, "g710 or g810");
    pipe->add_option("--iters", pipe_iters, "Local search iteration cap")->check(CLI::NonNegativeNumber);
    pipe->add_option("--objective", pipe_objective, "logistic or pointwise")->check(CLI::IsMember({"logistic", "pointwise"}));
    pipe->add_option("--eps", pipe_eps, "Distance bucket width for continuous log-likelihoods");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "dhrg: error: " << e.what() << '\n';
        return 2;
    }

    try {
        set_thread_count(threads);
        std::cout << std::setprecision(10);

        if (*gen) {
            std::cout << "seed " << gen_seed << '\n';
            Rng rng(gen_seed);
            const double recipe = 2 * std::log(static_cast<double>(gen_n)) - 1;
            std::ostringstream graph_text, emb_text;
            graph_text << "# seed " << gen_seed << '\n';
            emb_text << "# seed " << gen_seed << '\n';
            if (gen_model == "dhrg") {
                const ModelParams p{gen_n, gen_R.value_or(std::round(recipe / kC1)), gen_T, gen_alpha};
                auto tes = std::make_shared<Tessellation>(TilingRules::from_name(gen_tiling));
                const auto s = generate_dhrg(p, tes, rng);
                write_graph(graph_text, s.graph);
                write_discrete(emb_text, s.embedding);
                print_params(std::cout, "params", p);
                std::cout << "tiling " << gen_tiling << "\nedges " << s.graph.edge_count() << '\n';
                std::vector<std::size_t> occupancy(static_cast<std::size_t>(p.radius()) + 1, 0);
                for (Tile* t : s.embedding.tiles) ++occupancy[static_cast<std::size_t>(t->layer)];
                std::cout << "ring_occupancy";
                for (auto c : occupancy) std::cout << ' ' << c;
                std::cout << '\n';
            } else {
                const ModelParams p{gen_n, gen_R.value_or(recipe), gen_T, gen_alpha};
                const auto s = generate_hrg(p, rng);
                write_graph(graph_text, s.graph);
                write_continuous(emb_text, s.embedding);
                print_params(std::cout, "params", p);
                std::cout << "edges " << s.graph.edge_count() << '\n';
            }
            write_file(gen_graph, [&](std::ostream& o) { o << graph_text.str(); });
            write_file(gen_embedding, [&](std::ostream& o) { o << emb_text.str(); });
        } else if (*disc) {
            const auto ce = load_continuous(disc_in);
            auto tes = std::make_shared<Tessellation>(TilingRules::from_name(disc_tiling));
            std::size_t clamped = 0;
            const auto de = discretize(ce, tes, disc_c1, &clamped);
            print_params(std::cout, "continuous", ce.params);
            print_params(std::cout, "discrete", de.params);
            std::cout << "scale 1/" << fmt(disc_c1) << "\nclamped " << clamped << '\n';
            if (clamped)
                std::cerr << "dhrg: warning: " << clamped << " vertices lay beyond radius " << de.radius()
                          << " and were moved to their ancestor on that ring\n";
            write_file(disc_out, [&](std::ostream& o) { write_discrete(o, de); });
        } else if (*dedisc) {
            const auto de = load_discrete(dedisc_in);
            const auto ce = dediscretize(de, dedisc_c1);
            print_params(std::cout, "discrete", de.params);
            print_params(std::cout, "continuous", ce.params);
            std::cout << "scale " << fmt(dedisc_c1) << '\n';
            write_file(dedisc_out, [&](std::ostream& o) { write_continuous(o, ce); });
        } else if (*ll) {
            if (is_discrete_file(ll_embedding)) {
                const auto de = load_discrete(ll_embedding);
                const Graph g = load_graph(ll_graph, de.params.n);
                const auto h = compute_histograms(g, de);
                if (ll_hist.empty()) {
                    std::cout << "# d pairs edges\n";
                    write_histograms(std::cout, h);
                } else {
                    write_file(ll_hist, [&](std::ostream& o) { write_histograms(o, h); });
                }
                std::cout << "loglik " << fmt(loglik_logistic(h, de.params.R, de.params.T)) << '\n';
                if (ll_pointwise) std::cout << "pointwise " << fmt(loglik_pointwise_mle(h)) << '\n';
                if (ll_fit) {
                    const auto f = fit_logistic(h);
                    std::cout << "fit R " << fmt(f.R) << " T " << fmt(f.T) << " loglik " << fmt(f.loglik) << '\n';
                }
            } else {
                if (ll_pointwise) throw std::invalid_argument("--pointwise needs a discrete embedding");
                const auto ce = load_continuous(ll_embedding);
                const Graph g = load_graph(ll_graph, ce.params.n);
                const ContinuousLogLik L(ce, g, ll_eps);
                std::cout << "loglik " << fmt(L(ce.params.R, ce.params.T)) << '\n';
                if (ll_fit) {
                    const auto f = L.fit();
                    std::cout << "fit R " << fmt(f.R) << " T " << fmt(f.T) << " loglik " << fmt(f.loglik) << '\n';
                }
            }
        } else if (*imp) {
            const auto de = load_discrete(imp_embedding);
            const Graph g = load_graph(imp_graph, de.params.n);
            const Objective obj =
                imp_objective == "pointwise" ? Objective::pointwise() : Objective::logistic(de.params.R, de.params.T);
            SearchState st(g, de, obj);
            st.improve(imp_iters);
            std::cout << "objective " << imp_objective << '\n';
            write_history(std::cout, st.history());
            write_file(imp_out, [&](std::ostream& o) { write_discrete(o, st.embedding()); });
            if (!imp_history.empty()) write_file(imp_history, [&](std::ostream& o) { write_history(o, st.history()); });
        } else if (*route) {
            std::cout << "seed " << route_seed << '\n';
            Rng rng(route_seed);
            RoutingReport rep;
            if (is_discrete_file(route_embedding)) {
                const auto de = load_discrete(route_embedding);
                const Graph g = load_graph(route_graph, de.params.n);
                report_components(g);
                rep = success_rate(g, DiscreteMetric{&de}, route_pairs, rng);
            } else {
                const auto ce = load_continuous(route_embedding);
                const Graph g = load_graph(route_graph, ce.params.n);
                report_components(g);
                rep = success_rate(g, ContinuousMetric{&ce}, route_pairs, rng);
            }
            std::cout << "# attempts successes rate mean_hops mean_stretch\n";
            write_routing_report(std::cout, rep);
            if (rep.disconnected) std::cout << "disconnected_pairs " << rep.disconnected << '\n';
        } else if (*cal) {
            std::cout << "seed " << cal_seed << '\n';
            const auto c = calibrate(TilingRules::from_name(cal_tiling), cal_dmax, cal_samples, cal_seed);
            if (cal_out.empty()) {
                std::cout << "# d ring_size mean_dist variance\n";
                write_calibration(std::cout, c);
            } else {
                write_file(cal_out, [&](std::ostream& o) { write_calibration(o, c); });
            }
            std::cout << "c1 " << fmt(c.c1) << "\nc2 " << fmt(c.c2) << "\nvariance_slope " << fmt(c.variance_slope)
                      << "\nvariance_r2 " << fmt(c.variance_r2) << '\n';
        } else if (*rings) {
            const RingTable t(TilingRules::from_name(rings_tiling), rings_dmax);
            for (int d = 0; d <= rings_dmax; ++d) std::cout << d << ' ' << t.count(TileType::kRoot, d) << '\n';
        } else if (*pipe) {
            Graph g;
            ContinuousEmbedding ce;
            if (pipe_generate) {
                std::cout << "seed " << pipe_seed << '\n';
                Rng rng(pipe_seed);
                const double R = 2 * std::log(static_cast<double>(*pipe_generate)) - 1;
                auto s = generate_hrg({*pipe_generate, R, 0.1, 0.75}, rng);
                g = std::move(s.graph);
                ce = std::move(s.embedding);
            } else {
                if (pipe_graph.empty() || pipe_embedding.empty())
                    throw std::invalid_argument("pipeline needs --graph and --embedding, or --generate");
                ce = load_continuous(pipe_embedding);
                g = load_graph(pipe_graph, ce.params.n);
            }
            using clock = std::chrono::steady_clock;
            auto secs = [](clock::time_point a) { return std::chrono::duration<double>(clock::now() - a).count(); };
            std::vector<PipelineRow> rows;

            auto t0 = clock::now();
            const ContinuousLogLik L0(ce, g, pipe_eps);
            rows.push_back({"L1", L0(ce.params.R, ce.params.T), "continuous, given parameters"});
            const auto f2 = L0.fit();
            rows.push_back({"L2", f2.loglik, "continuous, best R " + fmt(f2.R) + " T " + fmt(f2.T)});
            const double t_continuous = secs(t0);

            t0 = clock::now();
            auto tes = std::make_shared<Tessellation>(TilingRules::from_name(pipe_tiling));
            std::size_t clamped = 0;
            const auto de = discretize(ce, tes, kC1, &clamped);
            const double t_discretize = secs(t0);
            t0 = clock::now();
            const auto h0 = compute_histograms(g, de);
            const auto f3 = fit_logistic(h0);
            rows.push_back({"L3", f3.loglik, "discrete, best R " + fmt(f3.R) + " T " + fmt(f3.T)});
            rows.push_back({"L4", loglik_pointwise_mle(h0), "discrete, best arbitrary p(d)"});
            const double t_loglik = secs(t0);

            t0 = clock::now();
            const Objective obj =
                pipe_objective == "pointwise" ? Objective::pointwise() : Objective::logistic(de.params.R, de.params.T);
            SearchState st(g, de, obj);
            st.improve(pipe_iters);
            const double t_improve = secs(t0);
            const auto f5 = fit_logistic(st.histograms());
            rows.push_back({"L5", f5.loglik, "discrete after local search, best R " + fmt(f5.R) + " T " + fmt(f5.T)});
            rows.push_back({"L6", loglik_pointwise_mle(st.histograms()), "discrete after local search, best arbitrary p(d)"});

            t0 = clock::now();
            const auto back = dediscretize(st.embedding());
            const ContinuousLogLik L7(back, g, pipe_eps);
            const auto f7 = L7.fit();
            rows.push_back({"L7", f7.loglik, "de-discretized, best R " + fmt(f7.R) + " T " + fmt(f7.T)});
            const double t_continuous2 = secs(t0);

            print_params(std::cout, "input", ce.params);
            print_params(std::cout, "discrete", de.params);
            std::cout << "edges " << g.edge_count() << "\nclamped " << clamped << "\niterations " << st.iterations() << '\n';
            std::cout << "# row loglik description\n";
            for (const auto& r : rows) std::cout << r.label << ' ' << fmt(r.value) << "  # " << r.note << '\n';
            std::cout << "ratio L3/L2 " << fmt(rows[2].value / rows[1].value) << "\nratio L5/L3 "
                      << fmt(rows[4].value / rows[2].value) << "\nratio L7/L2 " << fmt(rows[6].value / rows[1].value) << '\n';
            std::cout << "time continuous_s " << fmt(t_continuous + t_continuous2) << " discretize_s " << fmt(t_discretize)
                      << " loglik_s " << fmt(t_loglik) << " improve_s " << fmt(t_improve) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "dhrg: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
