// Command-line front end: check, gen, decompose, oracle.

#include <compnet/compnet.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace compnet;
using nlohmann::json;

constexpr int exit_reachable = 0;
constexpr int exit_unreachable = 1;
constexpr int exit_error = 2;

struct CheckArgs {
    std::string net;
    std::string decomposition;
    std::size_t leaf_budget = default_leaf_budget;
    std::size_t max_width = 16;
    std::string stats;
    std::string dot_dir;
    bool no_memo = false;
    bool emit_sink = false;
};

int run_check(const CheckArgs& args)
{
    WiringExpr expr = WiringExpr::var("x0");
    Assignments assign;
    json report = json::array();
    if (!args.net.empty() && args.decomposition.empty()) {
        const MarkedNet m = io::load_net(args.net);
        auto d = decompose(m, args.leaf_budget);
        expr = d.expr;
        assign = std::move(d.assign);
        report = io::to_json(d.report);
    } else {
        if (!args.net.empty()) require_well_formed(io::load_net(args.net));
        auto d = io::load_decomposition(args.decomposition);
        expr = d.expr;
        assign = std::move(d.assign);
    }

    EvalOptions opt;
    opt.memoise = !args.no_memo;
    opt.max_width = args.max_width;
    std::size_t emitted = 0;
    if (!args.dot_dir.empty()) {
        std::filesystem::create_directories(args.dot_dir);
        opt.on_node = [&](const NodeStats& ns, const MinimalDfa& d) {
            if (ns.memo_hit) return;
            const std::string name = "node" + std::to_string(emitted++) + "_" + (ns.name.empty() ? ns.op : ns.name);
            io::write_file((std::filesystem::path(args.dot_dir) / (name + ".dot")).string(), to_dot(d, name, args.emit_sink));
        };
    }
    const auto rep = check_reachability(expr, assign, opt);
    std::cout << (rep.reachable ? "REACHABLE" : "UNREACHABLE") << "\n";
    if (!args.stats.empty()) {
        json j = {{"reachable", rep.reachable}, {"expr_nodes", expr.size()}, {"evaluation", io::to_json(rep.stats)}};
        if (!report.empty()) j["decomposition"] = report;
        io::write_file(args.stats, j.dump(2));
    }
    return rep.reachable ? exit_reachable : exit_unreachable;
}

struct GenArgs {
    std::string family;
    std::size_t n = 1;
    std::string shape = "flat";
    bool flat = false;
    std::string out;
};

int run_gen(const GenArgs& args)
{
    if (args.family == "buffer") {
        const auto shape = parse_buffer_shape(args.shape);
        const Family f = gen_buffer(args.n, shape);
        if (shape == BufferShape::flat)
            io::save_net(args.out, f.flat);
        else
            io::save_decomposition(args.out, *f.expr, f.assign);
    } else if (args.family == "tree" || args.family == "philosophers") {
        const Family f = args.family == "tree" ? gen_tree(args.n) : gen_philosophers(args.n);
        if (args.flat)
            io::save_net(args.out, f.flat);
        else
            io::save_decomposition(args.out, *f.expr, f.assign);
    } else if (args.family == "clique") {
        io::save_net(args.out, gen_clique(args.n));
    } else {
        throw ValidationError("unknown family '" + args.family + "'");
    }
    return 0;
}

int run_decompose(const std::string& net, const std::string& out, std::size_t budget, bool explain)
{
    const auto d = decompose(io::load_net(net), budget);
    io::save_decomposition(out, d.expr, d.assign);
    if (explain) {
        std::cout << d.expr.to_string() << "\n";
        for (const auto& s : d.report) {
            std::cout << s.kind << " " << s.element << " places=" << s.places;
            if (s.balance) std::cout << " balance=" << *s.balance;
            std::cout << " widths=";
            for (std::size_t i = 0; i < s.widths.size(); ++i)
                std::cout << (i ? "," : "") << s.widths[i].first << "->" << s.widths[i].second;
            if (s.kind != "leaf")
                std::cout << " candidates=" << s.transition_search.candidates << "+" << s.place_search.candidates;
            if (!s.note.empty()) std::cout << " (" << s.note << ")";
            std::cout << "\n";
        }
    }
    return 0;
}

int run_oracle(const std::string& net)
{
    const MarkedNet m = io::load_net(net);
    const auto r = oracle_reach(m);
    std::cout << (r.reachable ? "REACHABLE" : "UNREACHABLE") << "\n";
    std::cout << "explored " << r.explored << "\n";
    if (r.shortest_length) {
        std::cout << "shortest " << *r.shortest_length << "\n";
        std::cout << "witness";
        for (const auto& step : *r.witness) std::cout << " " << m.net.transition(step.front()).id;
        std::cout << "\n";
    }
    return r.reachable ? exit_reachable : exit_unreachable;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Compositional reachability checking for nets with boundaries"};
    app.set_version_flag("--version", std::string(compnet::version));
    app.require_subcommand(1);

    CheckArgs check;
    auto* c = app.add_subcommand("check", "decide whether a target marking is reachable");
    auto* c_net = c->add_option("--net", check.net, "net file (JSON)");
    auto* c_dec = c->add_option("--decomposition", check.decomposition, "use this decomposition instead of computing one");
    c->add_option("--leaf-budget", check.leaf_budget, "stop splitting at this many places")->check(CLI::PositiveNumber);
    c->add_option("--max-width", check.max_width, "largest admissible k+l of any component");
    c->add_option("--stats", check.stats, "write evaluation statistics (JSON)");
    c->add_option("--emit-dot", check.dot_dir, "write each minimised automaton as GraphViz into DIR");
    c->add_flag("--emit-sink", check.emit_sink, "draw the sink state in --emit-dot output");
    c->add_flag("--no-memo", check.no_memo, "disable memoisation");
    c->callback([&] {
        if (c_net->count() == 0 && c_dec->count() == 0) throw CLI::RequiredError("--net or --decomposition");
    });

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "generate a benchmark family");
    g->add_option("family", gen.family, "buffer, tree, philosophers or clique")
        ->required()
        ->check(CLI::IsMember({"buffer", "tree", "philosophers", "clique"}));
    g->add_option("-n", gen.n, "size")->required()->check(CLI::PositiveNumber);
    g->add_option("--shape", gen.shape, "buffer bracketing: flat, left, right or balanced")
        ->check(CLI::IsMember({"flat", "left", "right", "balanced"}));
    g->add_flag("--flat", gen.flat, "emit tree or philosophers as a flat net");
    g->add_option("-o", gen.out, "output file")->required();

    std::string d_net, d_out;
    std::size_t d_budget = compnet::default_leaf_budget;
    bool explain = false;
    auto* d = app.add_subcommand("decompose", "compute a wiring decomposition");
    d->add_option("--net", d_net, "net file (JSON)")->required();
    d->add_option("-o", d_out, "output decomposition file")->required();
    d->add_option("--leaf-budget", d_budget, "stop splitting at this many places")->check(CLI::PositiveNumber);
    d->add_flag("--explain", explain, "print the decomposition steps");

    std::string o_net;
    auto* o = app.add_subcommand("oracle", "explicit-state reachability");
    o->add_option("--net", o_net, "net file (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_error;
    }

    try {
        if (c->parsed()) return run_check(check);
        if (g->parsed()) return run_gen(gen);
        if (d->parsed()) return run_decompose(d_net, d_out, d_budget, explain);
        if (o->parsed()) return run_oracle(o_net);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}
