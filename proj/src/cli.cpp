#include "semidot/cli.hpp"

#include "semidot/error.hpp"
#include "semidot/format.hpp"
#include "semidot/laguerre.hpp"
#include "semidot/measure.hpp"
#include "semidot/multiscale.hpp"
#include "semidot/render.hpp"
#include "semidot/transport.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace semidot::cli {

namespace {

struct Inputs {
    GridDensity density;
    DiscreteMeasure nu;
};

// Maps library errors on input files to exit codes; returns 0 on success.
int load_inputs(const RunConfig& cfg, Inputs& inputs, std::ostream& err)
{
    try {
        RawImage const source = load_pgm_file(cfg.source_path);
        RawImage const target = load_pgm_file(cfg.target_path);
        inputs.density = refine(coarsen(image_to_density(source), cfg.grid_divisor), cfg.refine);
        inputs.nu = image_to_discrete(target);
    } catch (const Error& e) {
        err << "semidot: " << e.what() << '\n';
        return e.code() == ErrorCode::ZeroMassImage ? kExitZeroMass : kExitBadInput;
    }
    return 0;
}

int check_config(const RunConfig& cfg, std::ostream& err)
{
    if (!(cfg.eps > 0.0)) {
        err << "semidot: --eps must be positive\n";
        return kExitBadInput;
    }
    if (cfg.factor < 2 || cfg.coarsest < 1 || cfg.grid_divisor < 1 || cfg.refine < 1 || cfg.threads < 1
        || cfg.max_iters < 1) {
        err << "semidot: --factor must be >= 2; --coarsest, --grid-divisor, --refine, --threads and --max-iters >= 1\n";
        return kExitBadInput;
    }
    return 0;
}

std::string report_json(const TransportReport& r, const std::vector<std::size_t>& level_sizes,
                        std::uint64_t seed)
{
    std::string levels;
    for (std::size_t k = 0; k < level_sizes.size(); ++k)
        levels += (k > 0 ? ", " : "") + std::to_string(level_sizes[k]);
    std::ostringstream out;
    out << "{\n"
        << "  \"cost\": " << format_double(r.cost) << ",\n"
        << "  \"wasserstein_paper\": " << format_double(r.wasserstein_paper) << ",\n"
        << "  \"grad_l1\": " << format_double(r.grad_l1) << ",\n"
        << "  \"n_sites\": " << r.n_sites << ",\n"
        << "  \"grid\": [" << r.cols << ", " << r.rows << "],\n"
        << "  \"levels\": [" << levels << "],\n"
        << "  \"iterations_total\": " << r.iterations_total << ",\n"
        << "  \"upper_bound_C\": " << format_double(r.upper_bound_C) << ",\n"
        << "  \"seed\": " << seed << "\n"
        << "}\n";
    return out.str();
}

struct Solved {
    std::vector<double> w;
    std::vector<std::size_t> level_sizes;
    int iterations_total = 0;
    bool converged = true;
};

Solved solve(const RunConfig& cfg, const Inputs& in, std::ostream& err)
{
    OptimizerConfig opt;
    opt.eps = cfg.eps;
    opt.max_iters = cfg.max_iters;
    MultiscaleOptions ms;
    ms.factor = cfg.factor;
    ms.coarsest = cfg.coarsest;
    ms.seed = cfg.seed;
    ms.threads = cfg.threads;
    MultiscaleReport const report = solve_multiscale(in.density, in.nu, opt, ms);

    if (cfg.trace_path) {
        std::ofstream trace(*cfg.trace_path);
        if (!trace)
            throw Error(ErrorCode::Io, "cannot open '" + *cfg.trace_path + "' for writing");
        int level = static_cast<int>(report.per_level.size()) - 1;
        for (std::size_t k = 0; k < report.per_level.size(); ++k, --level)
            write_trace_csv(trace, report.per_level[k], level, k == 0);
    }

    Solved s;
    s.w = report.final_w;
    s.level_sizes.push_back(in.nu.size());
    for (auto const& level : report.levels)
        s.level_sizes.push_back(level.measure.size());
    s.iterations_total = report.iterations_total();
    s.converged = report.status() == OptimStatus::Converged;
    if (!s.converged)
        err << "semidot: solver stopped with status " << to_string(report.status())
                  << " (grad_l1 " << format_double(report.per_level.back().final_grad_l1) << ")\n";
    return s;
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    out << text;
    out.close();
    if (!out)
        throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

std::vector<double> read_weights(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open weights file '" + path + "'");
    std::vector<double> w;
    std::string token;
    while (in >> token) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size() || !std::isfinite(v))
            throw Error(ErrorCode::InvalidArgument, "bad weight '" + token + "' in '" + path + "'");
        w.push_back(v);
    }
    return w;
}

int finish(const RunConfig& cfg, const Inputs& in, const Solved& s, bool want_svg, std::ostream& out)
{
    CellAssignment const assignment = assign_cells(in.density, in.nu, s.w, cfg.threads);
    TransportReport const report = make_report(in.density, in.nu, assignment, s.iterations_total);
    if (want_svg && cfg.render_path)
        write_file(*cfg.render_path, render_svg(in.density, in.nu, s.w, assignment));
    out << report_json(report, s.level_sizes, cfg.seed);
    return s.converged ? kExitOk : kExitNotConverged;
}

} // namespace

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    if (int rc = check_config(cfg, err))
        return rc;
    Inputs in;
    if (int rc = load_inputs(cfg, in, err))
        return rc;
    try {
        Solved const s = solve(cfg, in, err);
        return finish(cfg, in, s, true, out);
    } catch (const Error& e) {
        err << "semidot: " << e.what() << '\n';
        return kExitBadInput;
    }
}

int cmd_render(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    if (!cfg.render_path) {
        err << "semidot: render needs --render <file.svg>\n";
        return kExitBadInput;
    }
    if (int rc = check_config(cfg, err))
        return rc;
    Inputs in;
    if (int rc = load_inputs(cfg, in, err))
        return rc;
    try {
        Solved s;
        if (cfg.weights_path) {
            s.w = read_weights(*cfg.weights_path);
            if (s.w.size() != in.nu.size()) {
                err << "semidot: weights file '" << *cfg.weights_path << "' has " << s.w.size()
                    << " entries, target has " << in.nu.size() << " sites\n";
                return kExitBadInput;
            }
            s.level_sizes.push_back(in.nu.size());
        } else {
            s = solve(cfg, in, err);
        }
        return finish(cfg, in, s, true, out);
    } catch (const Error& e) {
        err << "semidot: " << e.what() << '\n';
        return kExitBadInput;
    }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Semi-discrete optimal transport between grayscale images"};
    app.require_subcommand(1);

    RunConfig cfg;
    if (const char* env = std::getenv("SEMIDOT_THREADS")) {
        try {
            cfg.threads = std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            err << "semidot: ignoring malformed SEMIDOT_THREADS='" << env << "'\n";
        }
    } else {
        cfg.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }

    auto add_run_options = [&cfg](CLI::App* sub, bool render) {
        sub->add_option("source", cfg.source_path, "source image (PGM), the continuous measure")
            ->required();
        sub->add_option("target", cfg.target_path, "target image (PGM), the discrete measure")
            ->required();
        sub->add_option("--eps", cfg.eps, "l1 gradient tolerance")->capture_default_str();
        sub->add_option("--factor", cfg.factor, "clustering factor between levels")
            ->capture_default_str();
        sub->add_option("--coarsest", cfg.coarsest, "stop decomposing at this many sites")
            ->capture_default_str();
        sub->add_option("--seed", cfg.seed, "seed for the clustering")->capture_default_str();
        sub->add_option("--grid-divisor", cfg.grid_divisor,
                        "block-sum the source grid by this factor before solving")
            ->capture_default_str();
        sub->add_option("--refine", cfg.refine,
                        "split every source pixel into refine x refine squares")
            ->capture_default_str();
        sub->add_option("--max-iters", cfg.max_iters, "iteration budget per level")
            ->capture_default_str();
        sub->add_option("--threads", cfg.threads, "worker threads for cell labeling");
        sub->add_option("--trace", cfg.trace_path, "write the per-iteration CSV trace here");
        auto* r = sub->add_option("--render", cfg.render_path, "write an SVG of the diagram here");
        if (render) {
            r->required();
            sub->add_option("--weights", cfg.weights_path,
                            "draw these weights (one per target site) instead of solving");
        }
    };

    auto* compare = app.add_subcommand("compare", "solve and print the JSON transport report");
    add_run_options(compare, false);
    auto* render = app.add_subcommand("render", "solve (or load weights) and write an SVG");
    add_run_options(render, true);
    SelftestOptions selftest_opts;
    auto* selftest = app.add_subcommand("selftest", "run the built-in consistency checks");
    selftest->add_flag("--inject-gradient-fault", selftest_opts.inject_gradient_fault)
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitBadInput;
    }

    if (compare->parsed())
        return cmd_compare(cfg, out, err);
    if (render->parsed())
        return cmd_render(cfg, out, err);
    return cmd_selftest(selftest_opts, out, err);
}

} // namespace semidot::cli
