// beerpath command line: build, persist, query, verify and benchmark
// beer-distance indexes, plus seeded instance generation.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "beerpath/beerpath.hpp"

namespace bp = beerpath;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitVerify = 3;

struct GenSpec {
    std::string kind;  // sp | chords | ktree
    int n = 0;
    double p1 = 0.0;  // chords: chord fraction; ktree: width
    double beer = 0.25;
    bool has_p1 = false;
};

GenSpec parse_gen(const std::string& s) {
    GenSpec spec;
    std::istringstream ss(s);
    std::string tok;
    std::vector<std::string> parts;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() < 2) throw bp::ParseError("--gen wants kind:n[:p1[:beer]]");
    spec.kind = parts[0];
    spec.n = std::stoi(parts[1]);
    if (parts.size() > 2) {
        spec.p1 = std::stod(parts[2]);
        spec.has_p1 = true;
    }
    if (parts.size() > 3) spec.beer = std::stod(parts[3]);
    if (spec.kind != "sp" && spec.kind != "chords" && spec.kind != "ktree")
        throw bp::ParseError("--gen kind must be sp, chords or ktree");
    return spec;
}

struct Instance {
    bp::AnyGraph graph;
    std::optional<bp::TreeDecomposition> td;
};

Instance generate(const GenSpec& spec, std::uint64_t seed, bool directed) {
    bp::GenOptions opt;
    opt.beer_fraction = spec.beer;
    opt.directed = directed;
    if (spec.kind == "sp") {
        auto [g, td] = bp::gen_series_parallel_with_td<std::int64_t>(spec.n, seed, opt);
        return {bp::AnyGraph{std::move(g)}, std::move(td)};
    }
    if (spec.kind == "chords") {
        int chords = static_cast<int>((spec.has_p1 ? spec.p1 : 0.3) * spec.n);
        return {bp::AnyGraph{bp::gen_chorded_cycle<std::int64_t>(spec.n, chords, seed, opt)}, {}};
    }
    int width = spec.has_p1 ? static_cast<int>(spec.p1) : 2;
    auto [g, td] = bp::gen_graph_with_td<std::int64_t>(spec.n, width, seed, opt);
    return {bp::AnyGraph{std::move(g)}, std::move(td)};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw bp::ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Instance load_instance(const std::string& graph_path, const std::string& gen,
                       const std::string& td_path, std::uint64_t seed, bool directed) {
    Instance inst{bp::AnyGraph{bp::IntGraph{}}, {}};
    if (!gen.empty()) {
        inst = generate(parse_gen(gen), seed, directed);
    } else if (!graph_path.empty()) {
        inst.graph = bp::parse_graph_auto(slurp(graph_path));
    } else {
        throw bp::ParseError("need --graph or --gen");
    }
    if (!td_path.empty()) {
        std::ifstream f(td_path);
        if (!f) throw bp::ParseError("cannot open " + td_path);
        inst.td = bp::parse_td(f);
    }
    return inst;
}

template <typename T>
size_t serialized_size(const bp::TriIndex<T>& idx) {
    std::ostringstream os(std::ios::binary);
    bp::save_index(idx, os);
    return os.str().size();
}
template <typename T>
size_t serialized_size(const bp::TdIndex<T>& idx) {
    std::ostringstream os(std::ios::binary);
    bp::save_index(idx, os);
    return os.str().size();
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

template <typename T>
void print_build_report(const bp::TriIndex<T>& idx, double ms) {
    const auto& t = idx.tree;
    size_t f3n = 0, f4rn = 0, stab = 0;
    for (const auto& k : idx.f3)
        if (!k.bottom) ++f3n;
    for (const auto& tab : idx.f4r) f4rn += tab.size();
    for (const auto& st : idx.s_tables) stab += static_cast<size_t>(st.k);
    std::cout << "strategy " << bp::strategy_name(idx.strategy) << "\n"
              << "n " << idx.graph.n << "  m " << idx.graph.m() << "\n"
              << "r " << t.r << "  r+ " << t.r_plus() << "\n"
              << "nodes S " << t.count(bp::NodeKind::S) << "  P " << t.count(bp::NodeKind::P)
              << "  Q " << t.count(bp::NodeKind::Q) << "  R " << t.count(bp::NodeKind::R) << "\n"
              << "tables f1 " << t.node_count() - 1 << "  f2 " << t.node_count() - 1 << "  f3 "
              << f3n << "  f4r " << f4rn << "  s-entries " << stab << "\n"
              << "index bytes " << serialized_size(idx) << "\n"
              << "build ms " << ms << "\n";
}

template <typename T>
void print_build_report(const bp::TdIndex<T>& idx, double ms) {
    size_t f4n = 0;
    for (const auto& tab : idx.f4) f4n += tab.size();
    std::cout << "strategy td\n"
              << "n " << idx.graph.n << "  m " << idx.graph.m() << "\n"
              << "bags " << idx.td.node_count() << "  width " << idx.td.width() << "\n"
              << "tables f1 " << idx.td.node_count() << "  f2 " << idx.td.node_count() << "  f3 "
              << idx.td.node_count() - 1 << "  f4 " << f4n << "\n"
              << "index bytes " << serialized_size(idx) << "\n"
              << "build ms " << ms << "\n";
}

int cmd_build(const std::string& graph_path, const std::string& gen, const std::string& td_path,
              std::uint64_t seed, bool directed, const std::string& strategy,
              const std::string& index_path) {
    Instance inst = load_instance(graph_path, gen, td_path, seed, directed);
    auto t0 = std::chrono::steady_clock::now();
    if (strategy == "td") {
        if (!inst.td) throw bp::ParseError("strategy td needs --td (or a generator that emits one)");
        std::visit(
            [&](auto& g) {
                auto idx = bp::build_td_index(g, *inst.td);
                double ms = ms_since(t0);
                if (!index_path.empty()) bp::save_index_file(idx, index_path);
                print_build_report(idx, ms);
            },
            inst.graph);
        return 0;
    }
    auto st = bp::strategy_from_name(strategy);
    if (!st) throw bp::ParseError("unknown strategy '" + strategy + "'");
    std::visit(
        [&](auto& g) {
            auto idx = bp::build_tri_index(g, *st);
            double ms = ms_since(t0);
            if (!index_path.empty()) bp::save_index_file(idx, index_path);
            print_build_report(idx, ms);
        },
        inst.graph);
    return 0;
}

template <typename T>
void print_answer(int s, int t, const bp::DistPair<T>& p, const std::string& format,
                  std::ostream& os) {
    if (format == "records") {
        os << "{\"s\":" << s << ",\"t\":" << t << ",\"dist\":";
        if (p.dist.is_inf())
            os << "\"inf\"";
        else
            os << p.dist;
        os << ",\"beer\":";
        if (p.beer.is_inf())
            os << "\"inf\"";
        else
            os << p.beer;
        os << "}\n";
    } else {
        os << bp::to_string(p.dist) << " " << bp::to_string(p.beer) << "\n";
    }
}

int cmd_query(const std::string& index_path, const std::string& queries_path,
              const std::string& format) {
    auto any = bp::load_index_file(index_path);
    std::ifstream qf(queries_path);
    if (!qf) throw bp::ParseError("cannot open " + queries_path);
    std::vector<std::pair<int, int>> pairs;
    std::string line;
    int lineno = 0;
    while (bp::detail::next_content_line(qf, line, lineno)) {
        std::istringstream ss(line);
        int s, t;
        if (!(ss >> s >> t))
            throw bp::ParseError("line " + std::to_string(lineno) + ": malformed query pair");
        pairs.push_back({s, t});
    }
    std::visit(
        [&](const auto& idx) {
            using IdxT = std::decay_t<decltype(idx)>;
            for (auto [s, t] : pairs) {
                if constexpr (std::is_same_v<IdxT, bp::TriIndex<std::int64_t>> ||
                              std::is_same_v<IdxT, bp::TriIndex<double>>) {
                    print_answer(s, t, bp::query(idx, s, t), format, std::cout);
                } else {
                    print_answer(s, t, bp::td_query(idx, s, t), format, std::cout);
                }
            }
        },
        any);
    return 0;
}

int cmd_verify(const std::string& graph_path, const std::string& gen, const std::string& td_path,
               std::uint64_t seed, bool directed, const std::string& pairs_spec,
               const std::string& repro_prefix) {
    Instance inst = load_instance(graph_path, gen, td_path, seed, directed);
    int rc = 0;
    std::visit(
        [&](auto& g) {
            using T = typename std::decay_t<decltype(g)>::weight_type;
            std::vector<bp::Strategy> strategies;
            if (bp::validate_biconnected(g) && g.m() >= 2)
                strategies = {bp::Strategy::F12, bp::Strategy::F123, bp::Strategy::F1234R};
            const bp::TreeDecomposition* td = inst.td ? &*inst.td : nullptr;
            if (strategies.empty() && !td) {
                auto defect = bp::biconnectivity_defect(g);
                std::cout << "nothing to verify: graph is not biconnected";
                if (defect && *defect > 0) std::cout << " (articulation vertex " << *defect << ")";
                std::cout << " and no decomposition was supplied\n";
                rc = kExitInput;
                return;
            }
            auto pairs = bp::select_pairs(g.n, pairs_spec, seed);
            auto report = bp::verify_instance<T>(g, pairs, strategies, td);
            if (report.ok) {
                std::cout << "verify pass: " << report.pairs_checked << " pair checks\n";
                return;
            }
            std::cout << "verify FAIL: " << report.detail << "\n";
            auto [small, bad] = bp::shrink_failure<T>(g, strategies, td);
            std::string gpath = repro_prefix + ".repro.graph";
            std::ofstream gf(gpath);
            bp::write_graph(small, gf);
            std::ofstream pf(repro_prefix + ".repro.pairs");
            pf << bad.first << " " << bad.second << "\n";
            std::cout << "minimized reproduction written to " << gpath << " ("
                      << small.m() << " edges, pair " << bad.first << " " << bad.second << ")\n";
            rc = kExitVerify;
        },
        inst.graph);
    return rc;
}

int cmd_bench(const std::string& graph_path, const std::string& gen, const std::string& td_path,
              std::uint64_t seed, bool directed, int query_count) {
    Instance inst = load_instance(graph_path, gen, td_path, seed, directed);
    std::visit(
        [&](auto& g) {
            std::mt19937_64 rng(seed);
            std::uniform_int_distribution<int> d(1, g.n);
            std::vector<std::pair<int, int>> pairs;
            for (int i = 0; i < query_count; ++i) pairs.push_back({d(rng), d(rng)});

            std::cout << "strategy build_ms index_bytes query_us oplus_hat/q dijkstra/q\n";
            for (auto st : {bp::Strategy::F12, bp::Strategy::F123, bp::Strategy::F1234R}) {
                auto t0 = std::chrono::steady_clock::now();
                auto idx = bp::build_tri_index(g, st);
                double build_ms = ms_since(t0);
                size_t bytes = serialized_size(idx);
                bp::QueryStats stats;
                auto q0 = std::chrono::steady_clock::now();
                for (auto [s, t] : pairs) bp::query(idx, s, t, &stats);
                double qus = ms_since(q0) * 1000.0 / std::max<size_t>(1, pairs.size());
                std::cout << bp::strategy_name(st) << " " << build_ms << " " << bytes << " " << qus
                          << " " << static_cast<double>(stats.oplus_hat_ops) / pairs.size() << " "
                          << static_cast<double>(stats.dijkstra_calls) / pairs.size() << "\n";
            }
            if (inst.td) {
                auto t0 = std::chrono::steady_clock::now();
                auto idx = bp::build_td_index(g, *inst.td);
                double build_ms = ms_since(t0);
                size_t bytes = serialized_size(idx);
                bp::QueryStats stats;
                auto q0 = std::chrono::steady_clock::now();
                for (auto [s, t] : pairs) bp::td_query(idx, s, t, &stats);
                double qus = ms_since(q0) * 1000.0 / std::max<size_t>(1, pairs.size());
                std::cout << "td " << build_ms << " " << bytes << " " << qus << " "
                          << static_cast<double>(stats.oplus_hat_ops) / pairs.size() << " "
                          << static_cast<double>(stats.dijkstra_calls) / pairs.size() << "\n";
            }
        },
        inst.graph);
    return 0;
}

int cmd_gen(const std::string& gen, std::uint64_t seed, bool directed, const std::string& out,
            const std::string& td_out) {
    Instance inst = generate(parse_gen(gen), seed, directed);
    std::visit(
        [&](auto& g) {
            if (out.empty() || out == "-") {
                bp::write_graph(g, std::cout);
            } else {
                std::ofstream f(out);
                if (!f) throw bp::ParseError("cannot open " + out);
                bp::write_graph(g, f);
            }
        },
        inst.graph);
    if (!td_out.empty()) {
        if (!inst.td) throw bp::ParseError("this generator kind emits no decomposition");
        std::ofstream f(td_out);
        if (!f) throw bp::ParseError("cannot open " + td_out);
        bp::write_td(*inst.td, f);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"beer-distance query engine over SPQR and tree decompositions"};
    app.require_subcommand(1);

    std::string graph_path, index_path, strategy = "f123", queries_path, pairs_spec = "random:200";
    std::string gen_spec, td_path, format = "text", out_path = "-", td_out;
    std::uint64_t seed = 1;
    bool directed = false;
    int query_count = 1000;

    auto add_input = [&](CLI::App* cmd) {
        cmd->add_option("--graph", graph_path, "graph file");
        cmd->add_option("--gen", gen_spec, "generate instead: kind:n[:p1[:beer]]");
        cmd->add_option("--td", td_path, "tree decomposition file");
        cmd->add_option("--seed", seed, "generator seed");
        cmd->add_flag("--directed", directed, "generate a directed instance");
    };

    auto* build = app.add_subcommand("build", "build an index and persist it");
    add_input(build);
    build->add_option("--strategy", strategy, "f12 | f123 | f1234r | td");
    build->add_option("--index", index_path, "output index file");

    auto* query = app.add_subcommand("query", "answer query pairs from an index");
    query->add_option("--index", index_path, "index file")->required();
    query->add_option("--queries", queries_path, "file with one 's t' pair per line")->required();
    query->add_option("--format", format, "text | records");

    auto* verify = app.add_subcommand("verify", "check every strategy against the oracle");
    add_input(verify);
    verify->add_option("--pairs", pairs_spec, "all | random:k");

    auto* bench = app.add_subcommand("bench", "compare build/query costs per strategy");
    add_input(bench);
    bench->add_option("--queries-count", query_count, "random query pairs to time");

    auto* gen = app.add_subcommand("gen", "write a generated instance");
    gen->add_option("--gen", gen_spec, "kind:n[:p1[:beer]]")->required();
    gen->add_option("--seed", seed, "generator seed");
    gen->add_flag("--directed", directed, "directed weights");
    gen->add_option("--out", out_path, "output graph file, - for stdout");
    gen->add_option("--td-out", td_out, "also write the decomposition");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (build->parsed())
            return cmd_build(graph_path, gen_spec, td_path, seed, directed, strategy, index_path);
        if (query->parsed()) return cmd_query(index_path, queries_path, format);
        if (verify->parsed()) {
            std::string prefix = graph_path.empty() ? std::string("verify") : graph_path;
            return cmd_verify(graph_path, gen_spec, td_path, seed, directed, pairs_spec, prefix);
        }
        if (bench->parsed())
            return cmd_bench(graph_path, gen_spec, td_path, seed, directed, query_count);
        if (gen->parsed()) return cmd_gen(gen_spec, seed, directed, out_path, td_out);
    } catch (const bp::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const bp::NotBiconnected& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const bp::SerializeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}
