// Command-line front end: simulate, loop, chord, decompose, verify.

#include "preisach/classical.hpp"
#include "preisach/generalized.hpp"
#include "preisach/io.hpp"
#include "preisach/loop.hpp"
#include "preisach/memory.hpp"
#include "preisach/signal.hpp"
#include "preisach/verify.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace
{

using namespace preisach;

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_data = 2;
constexpr int exit_suite = 3;

struct Config
{
    std::string model = "classical";
    std::string agents;
    std::string shift;
    std::string input;
    std::string history;
    std::optional<double> start;
    std::string memory_in;
    std::string memory_out;
    std::size_t grid_n = 0;
    std::string grid_bounds;
    double tol = 1e-12;
    std::string out;

    double u_minus = 0.0;
    double u_plus = 0.0;
    std::size_t points = 21;
    std::string u_list;
    std::string u_grid;
    std::string format = "text";
    std::uint64_t seed = 20240611;
};

std::vector<double> parse_list(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    if (io::trimmed(text).empty())
        return out;
    for (auto f : io::split(text))
        out.push_back(io::parse_real(f, what));
    return out;
}

// The input path as (start, samples); samples are visited in order.
struct Path
{
    double start = 0.0;
    std::vector<double> samples;
};

Path load_path(const Config& cfg, const std::optional<StaircaseMemory>& mem)
{
    Path p;
    bool skip_first = false;
    if (!cfg.input.empty())
    {
        auto in = io::open_input(cfg.input);
        const auto series = io::read_series(in, cfg.input);
        for (const auto& s : series.samples())
            p.samples.push_back(s.u);
        if (mem)
            p.start = mem->current_u();
        else if (cfg.start)
            p.start = *cfg.start;
        else
        {
            p.start = p.samples.front();
            skip_first = true;
        }
    }
    else
    {
        p.samples = parse_list(cfg.history, "--history");
        p.start = mem ? mem->current_u() : cfg.start.value_or(0.0);
    }
    if (skip_first)
        p.samples.erase(p.samples.begin());
    return p;
}

std::vector<double> visited(const Path& p, const std::optional<StaircaseMemory>& mem, std::vector<double> extra = {})
{
    extra.push_back(p.start);
    extra.insert(extra.end(), p.samples.begin(), p.samples.end());
    if (mem)
        extra.insert(extra.end(), mem->extrema().begin(), mem->extrema().end());
    return extra;
}

std::optional<StaircaseMemory> load_memory(const Config& cfg)
{
    if (cfg.memory_in.empty())
        return std::nullopt;
    auto in = io::open_input(cfg.memory_in);
    return io::memory_from_json(io::read_json(in, cfg.memory_in), cfg.memory_in);
}

void save_memory(const Config& cfg, const StaircaseMemory& mem)
{
    if (cfg.memory_out.empty())
        return;
    std::ofstream out(cfg.memory_out);
    if (!out)
        throw Error(cfg.memory_out + ": cannot open for writing");
    out << io::to_json(mem).dump(2) << '\n';
}

class Output
{
  public:
    explicit Output(const std::string& path)
    {
        if (!path.empty())
        {
            file_.open(path);
            if (!file_)
                throw Error(path + ": cannot open for writing");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

  private:
    std::ofstream file_;
};

AgentPopulation load_agents(const Config& cfg)
{
    if (cfg.agents.empty())
        throw Error("--agents is required");
    auto in = io::open_input(cfg.agents);
    return io::read_agents(in, cfg.agents);
}

// Default bounds cover the agents and every input value the run visits.
WeightGrid make_grid(const Config& cfg, const AgentPopulation& pop, const std::vector<double>& visits)
{
    double lo = 0.0, hi = 0.0;
    if (!cfg.grid_bounds.empty())
    {
        const auto b = parse_list(cfg.grid_bounds, "--grid-bounds");
        if (b.size() != 2)
            throw Error("--grid-bounds expects lo,hi");
        lo = b[0];
        hi = b[1];
    }
    else
    {
        if (pop.agents.empty())
            throw Error("cannot infer grid bounds from an empty population");
        lo = std::numeric_limits<double>::infinity();
        hi = -lo;
        for (const auto& a : pop.agents)
        {
            lo = std::min(lo, a.beta);
            hi = std::max(hi, a.alpha);
        }
        for (double u : visits)
        {
            lo = std::min(lo, u);
            hi = std::max(hi, u);
        }
        if (!(hi > lo))
            hi = lo + 1.0;
    }
    if (cfg.grid_n < 2)
        throw Error("--grid-n must be at least 2");
    return WeightGrid::from_agents(pop, cfg.grid_n, lo, hi);
}

// Loads the configured model and calls fn(model, congruency_required).
template <class Fn>
int with_model(const Config& cfg, Fn&& fn, const std::vector<double>& visits = {})
{
    if (cfg.model == "classical")
    {
        const auto pop = load_agents(cfg);
        if (cfg.grid_n > 0)
        {
            const auto grid = make_grid(cfg, pop, visits);
            return fn(grid, true);
        }
        return fn(pop, true);
    }
    if (cfg.model == "generalized")
    {
        if (cfg.agents.empty())
            throw Error("--agents is required");
        auto in = io::open_input(cfg.agents);
        const auto gpop = io::generalized_from_json(io::read_json(in, cfg.agents), cfg.agents);
        return fn(gpop, false);
    }
    if (cfg.model == "shifted")
    {
        if (cfg.shift.empty())
            throw Error("--shift is required for the shifted model");
        auto in = io::open_input(cfg.shift);
        const auto sm = io::shift_from_json(io::read_json(in, cfg.shift), load_agents(cfg), cfg.shift);
        return fn(sm, true);
    }
    throw Error("unknown model '" + cfg.model + "'");
}

template <class Model>
auto start_tracker(const Model& model, const std::optional<StaircaseMemory>& mem, double start)
{
    return mem ? track(model, *mem) : track(model, start);
}

int cmd_simulate(const Config& cfg)
{
    const auto mem_in = load_memory(cfg);
    const auto path = load_path(cfg, mem_in);
    if (path.samples.empty())
        throw Error("empty series");
    return with_model(cfg, [&](const auto& model, bool) {
        auto tracker = start_tracker(model, mem_in, path.start);
        auto mem = mem_in ? *mem_in : StaircaseMemory::initial(path.start);
        Output out(cfg.out);
        auto& os = out.stream();
        os << "step,u,f\n";
        for (std::size_t i = 0; i < path.samples.size(); ++i)
        {
            const double u = path.samples[i];
            tracker.advance(u);
            if (u != mem.current_u())
                mem.push(u);
            os << i + 1 << ',' << io::format_real(u) << ',' << io::format_real(tracker.output()) << '\n';
        }
        save_memory(cfg, mem);
        return exit_ok;
    }, visited(path, mem_in));
}

int cmd_loop(const Config& cfg)
{
    if (!(cfg.u_minus < cfg.u_plus))
        throw Error("empty cycle: --u-minus must be below --u-plus");
    const auto mem_in = load_memory(cfg);
    const auto path = load_path(cfg, mem_in);
    return with_model(cfg, [&](const auto& model, bool) {
        auto tracker = start_tracker(model, mem_in, path.start);
        for (double u : path.samples)
            tracker.advance(u);
        std::vector<double> formula;
        formula.reserve(cfg.points);
        for (double u : uniform_grid(cfg.u_minus, cfg.u_plus, cfg.points))
            formula.push_back(vertical_chord(model, cfg.u_minus, cfg.u_plus, u));
        const auto loop = trace_cycle(tracker, cfg.u_minus, cfg.u_plus, cfg.points);
        const double scale = output_scale(model);
        bool mismatch = false;
        for (std::size_t i = 0; i < loop.size(); ++i)
            mismatch |= std::abs(formula[i] - loop.chord(i)) > cfg.tol * scale;
        Output out(cfg.out);
        auto& os = out.stream();
        os << "u,f_asc,f_desc,chord" << (mismatch ? ",chord_from_loop" : "") << '\n';
        for (std::size_t i = 0; i < loop.size(); ++i)
        {
            os << io::format_real(loop.u[i]) << ',' << io::format_real(loop.ascending[i]) << ','
               << io::format_real(loop.descending[i]) << ',' << io::format_real(formula[i]);
            if (mismatch)
                os << ',' << io::format_real(loop.chord(i));
            os << '\n';
        }
        if (mismatch)
        {
            std::cerr << "chord formula disagrees with the traced loop\n";
            return exit_suite;
        }
        return exit_ok;
    }, visited(path, mem_in, {cfg.u_minus, cfg.u_plus}));
}

int cmd_chord(const Config& cfg)
{
    require_chord_args(cfg.u_minus, cfg.u_plus, cfg.u_minus);
    std::vector<double> us = parse_list(cfg.u_list, "--u");
    if (us.empty())
        us = uniform_grid(cfg.u_minus, cfg.u_plus, cfg.points);
    return with_model(cfg, [&](const auto& model, bool) {
        std::vector<double> chords;
        for (double u : us)
            chords.push_back(vertical_chord(model, cfg.u_minus, cfg.u_plus, u));
        Output out(cfg.out);
        auto& os = out.stream();
        os << "u,chord\n";
        for (std::size_t i = 0; i < us.size(); ++i)
            os << io::format_real(us[i]) << ',' << io::format_real(chords[i]) << '\n';
        return exit_ok;
    }, std::vector<double>{cfg.u_minus, cfg.u_plus});
}

int cmd_decompose(const Config& cfg)
{
    const auto mem_in = load_memory(cfg);
    const auto path = load_path(cfg, mem_in);
    std::optional<std::vector<double>> grid;
    if (!cfg.u_grid.empty())
    {
        const auto g = parse_list(cfg.u_grid, "--u-grid");
        if (g.size() != 3 || g[2] < 2 || g[2] != std::floor(g[2]))
            throw Error("--u-grid expects lo,hi,n with n >= 2");
        grid = uniform_grid(g[0], g[1], static_cast<std::size_t>(g[2]));
    }
    else if (path.samples.empty())
        throw Error("empty series");
    return with_model(cfg, [&](const auto& model, bool) {
        auto tracker = start_tracker(model, mem_in, path.start);
        std::vector<std::pair<double, Decomposition>> rows;
        if (grid)
        {
            for (double u : path.samples)
                tracker.advance(u);
            for (double u : *grid)
            {
                auto probe = tracker;
                probe.advance(u);
                rows.emplace_back(u, probe.decompose());
            }
        }
        else
        {
            for (double u : path.samples)
            {
                tracker.advance(u);
                rows.emplace_back(u, tracker.decompose());
            }
        }
        const double scale = output_scale(model);
        bool mismatch = false;
        Output out(cfg.out);
        auto& os = out.stream();
        os << "u,f_irreversible,G,F,f_total\n";
        for (const auto& [u, d] : rows)
        {
            mismatch |= std::abs(d.irreversible + d.reversible + d.offset - d.total) > cfg.tol * scale;
            os << io::format_real(u) << ',' << io::format_real(d.irreversible) << ','
               << io::format_real(d.reversible) << ',' << io::format_real(d.offset) << ','
               << io::format_real(d.total) << '\n';
        }
        if (mismatch)
        {
            std::cerr << "decomposition does not reconstruct the output (is the start inside the support?)\n";
            return exit_suite;
        }
        return exit_ok;
    }, grid ? visited(path, mem_in, *grid) : visited(path, mem_in));
}

int cmd_verify(const Config& cfg)
{
    if (cfg.format != "text" && cfg.format != "json")
        throw Error("--format must be text or json");
    return with_model(cfg, [&](const auto& model, bool congruency_required) {
        VerifyOptions opt;
        opt.tol = cfg.tol;
        opt.seed = cfg.seed;
        const auto results = run_suite(model, congruency_required, opt);
        const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
        Output out(cfg.out);
        auto& os = out.stream();
        if (cfg.format == "json")
        {
            io::json j;
            j["model"] = cfg.model;
            j["passed"] = ok;
            j["checks"] = io::json::array();
            for (const auto& r : results)
                j["checks"].push_back(
                    {{"name", r.name}, {"passed", r.passed}, {"max_deviation", r.max_deviation}, {"note", r.note}});
            os << j.dump(2) << '\n';
        }
        else
        {
            for (const auto& r : results)
            {
                os << (r.passed ? "PASS " : "FAIL ") << r.name << " max_deviation=" << io::format_real(r.max_deviation);
                if (!r.note.empty())
                    os << " (" << r.note << ")";
                os << '\n';
            }
            os << (ok ? "all checks passed" : "property suite failed") << '\n';
        }
        return ok ? exit_ok : exit_suite;
    });
}

void add_model_options(CLI::App* sub, Config& cfg)
{
    sub->add_option("--model", cfg.model, "classical | generalized | shifted")
        ->check(CLI::IsMember({"classical", "generalized", "shifted"}));
    sub->add_option("--agents", cfg.agents, "agent file (CSV alpha,beta,nu; JSON for generalized)")->required();
    sub->add_option("--shift", cfg.shift, "shift functions JSON {\"g1\": [[u,g],...], \"g2\": [[u,g],...]}");
    sub->add_option("--grid-n", cfg.grid_n, "evaluate a classical model on an n x n weight grid");
    sub->add_option("--grid-bounds", cfg.grid_bounds, "grid support lo,hi (default: agent extent)");
    sub->add_option("--tol", cfg.tol, "tolerance relative to the output scale");
    sub->add_option("--out", cfg.out, "output path (default stdout)");
}

void add_path_options(CLI::App* sub, Config& cfg)
{
    sub->add_option("--input", cfg.input, "input series CSV time,u");
    sub->add_option("--history", cfg.history, "inline reversal list, e.g. 2.5,0.5");
    sub->add_option("--start", cfg.start, "initial input (default 0, or the first sample)");
    sub->add_option("--memory-in", cfg.memory_in, "initial memory JSON (default negative saturation)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Preisach hysteresis models: simulate, loops, chords, decompositions, verification"};
    app.require_subcommand(1);
    Config cfg;

    auto* sim = app.add_subcommand("simulate", "output after each input sample");
    add_model_options(sim, cfg);
    add_path_options(sim, cfg);
    sim->add_option("--memory-out", cfg.memory_out, "write the final memory JSON");

    auto* loop = app.add_subcommand("loop", "trace one cycle u_minus -> u_plus -> u_minus");
    add_model_options(loop, cfg);
    add_path_options(loop, cfg);
    loop->add_option("--u-minus", cfg.u_minus)->required();
    loop->add_option("--u-plus", cfg.u_plus)->required();
    loop->add_option("--points", cfg.points, "grid points per branch")->check(CLI::Range(2, 1000000));

    auto* chord = app.add_subcommand("chord", "vertical chord profile of a cycle");
    add_model_options(chord, cfg);
    chord->add_option("--u-minus", cfg.u_minus)->required();
    chord->add_option("--u-plus", cfg.u_plus)->required();
    chord->add_option("--u", cfg.u_list, "comma-separated query inputs");
    chord->add_option("--points", cfg.points, "uniform query points when --u is absent")
        ->check(CLI::Range(2, 1000000));

    auto* dec = app.add_subcommand("decompose", "reversible / irreversible split");
    add_model_options(dec, cfg);
    add_path_options(dec, cfg);
    dec->add_option("--u-grid", cfg.u_grid, "lo,hi,n queries from the final state");

    auto* ver = app.add_subcommand("verify", "run the property suite");
    add_model_options(ver, cfg);
    ver->add_option("--format", cfg.format, "text | json");
    ver->add_option("--seed", cfg.seed, "random seed for generated histories");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try
    {
        if (*sim)
            return cmd_simulate(cfg);
        if (*loop)
            return cmd_loop(cfg);
        if (*chord)
            return cmd_chord(cfg);
        if (*dec)
            return cmd_decompose(cfg);
        return cmd_verify(cfg);
    }
    catch (const preisach::Error& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    }
}
