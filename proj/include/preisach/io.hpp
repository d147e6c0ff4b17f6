#ifndef PREISACH_IO_HPP
#define PREISACH_IO_HPP

#include "preisach/classical.hpp"
#include "preisach/error.hpp"
#include "preisach/generalized.hpp"
#include "preisach/hysteron.hpp"
#include "preisach/memory.hpp"
#include "preisach/signal.hpp"

#include "json.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace preisach::io
{

/// Shortest representation that parses back to the same double.
[[nodiscard]] inline std::string format_real(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return {buf, res.ptr};
}

[[nodiscard]] inline double parse_real(std::string_view text, const std::string& where)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw Error(where + ": cannot parse number '" + std::string(text) + "'");
    return v;
}

[[nodiscard]] inline std::vector<std::string_view> split(std::string_view line, char sep = ',')
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true)
    {
        const auto next = line.find(sep, pos);
        out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos)
            break;
        pos = next + 1;
    }
    return out;
}

[[nodiscard]] inline std::string trimmed(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string_view::npos ? std::string() : std::string(s.substr(b, e - b + 1));
}

/// Reads a headered numeric CSV with the given column names. Blank lines and
/// lines starting with '#' are skipped. Rows are returned with their 1-based
/// line numbers.
[[nodiscard]] inline std::vector<std::pair<std::size_t, std::vector<double>>>
read_table(std::istream& in, const std::vector<std::string>& columns, const std::string& source)
{
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<std::pair<std::size_t, std::vector<double>>> rows;
    while (std::getline(in, line))
    {
        ++line_no;
        const auto t = trimmed(line);
        if (t.empty() || t.front() == '#')
            continue;
        const std::string where = source + ":" + std::to_string(line_no);
        const auto fields = split(t);
        if (!have_header)
        {
            bool ok = fields.size() == columns.size();
            for (std::size_t i = 0; ok && i < fields.size(); ++i)
                ok = trimmed(fields[i]) == columns[i];
            if (!ok)
            {
                std::string want;
                for (const auto& c : columns)
                    want += (want.empty() ? "" : ",") + c;
                throw Error(where + ": expected header '" + want + "'");
            }
            have_header = true;
            continue;
        }
        if (fields.size() != columns.size())
            throw Error(where + ": expected " + std::to_string(columns.size()) + " fields");
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields)
            row.push_back(parse_real(f, where));
        rows.emplace_back(line_no, std::move(row));
    }
    if (!have_header)
        throw Error(source + ": missing header");
    return rows;
}

[[nodiscard]] inline std::ifstream open_input(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(path + ": cannot open file");
    return in;
}

[[nodiscard]] inline SampledSeries read_series(std::istream& in, const std::string& source = "<series>")
{
    const auto rows = read_table(in, {"time", "u"}, source);
    if (rows.empty())
        throw Error(source + ": empty series");
    std::vector<Sample> samples;
    samples.reserve(rows.size());
    for (const auto& [line, r] : rows)
        samples.push_back({r[0], r[1]});
    try
    {
        return SampledSeries(std::move(samples));
    }
    catch (const Error& e)
    {
        throw Error(source + ": " + e.what());
    }
}

[[nodiscard]] inline AgentPopulation read_agents(std::istream& in, const std::string& source = "<agents>")
{
    AgentPopulation pop;
    for (const auto& [line, r] : read_table(in, {"alpha", "beta", "nu"}, source))
    {
        try
        {
            pop.agents.emplace_back(r[0], r[1], r[2]);
        }
        catch (const Error& e)
        {
            throw Error(source + ":" + std::to_string(line) + ": " + e.what());
        }
    }
    return pop;
}

inline void write_agents(std::ostream& out, const AgentPopulation& pop)
{
    out << "alpha,beta,nu\n";
    for (const auto& a : pop.agents)
        out << format_real(a.alpha) << ',' << format_real(a.beta) << ',' << format_real(a.nu) << '\n';
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

using nlohmann::json;

[[nodiscard]] inline json breakpoints_json(const PiecewiseLinear& f)
{
    json arr = json::array();
    for (const auto& [u, v] : f.points())
        arr.push_back({u, v});
    return arr;
}

[[nodiscard]] inline std::vector<std::pair<double, double>> breakpoints_from(const json& j, const std::string& where)
{
    if (!j.is_array())
        throw Error(where + ": breakpoints must be an array of [u, value] pairs");
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : j)
    {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw Error(where + ": breakpoint must be [u, value]");
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return pts;
}

[[nodiscard]] inline json to_json(const GeneralizedHysteron& h)
{
    return {{"alpha", h.alpha}, {"beta", h.beta}, {"f_plus", breakpoints_json(h.f_plus)},
            {"f_minus", breakpoints_json(h.f_minus)}};
}

[[nodiscard]] inline GeneralizedPopulation generalized_from_json(const json& j, const std::string& source)
{
    const json& arr = j.is_object() && j.contains("agents") ? j.at("agents") : j;
    if (!arr.is_array())
        throw Error(source + ": expected an array of agents");
    GeneralizedPopulation g;
    for (std::size_t k = 0; k < arr.size(); ++k)
    {
        const std::string where = source + ": agent " + std::to_string(k);
        const auto& a = arr[k];
        try
        {
            g.agents.emplace_back(a.at("alpha").get<double>(), a.at("beta").get<double>(),
                                  BranchFunction(breakpoints_from(a.at("f_plus"), where + " f_plus")),
                                  BranchFunction(breakpoints_from(a.at("f_minus"), where + " f_minus")));
        }
        catch (const json::exception& e)
        {
            throw Error(where + ": " + e.what());
        }
        catch (const Error& e)
        {
            throw Error(where + ": " + e.what());
        }
    }
    return g;
}

[[nodiscard]] inline json to_json(const GeneralizedPopulation& g)
{
    json arr = json::array();
    for (const auto& a : g.agents)
        arr.push_back(to_json(a));
    return arr;
}

/// Shift model file: {"g1": [[u, g], ...], "g2": [[u, g], ...]}.
[[nodiscard]] inline ShiftModel shift_from_json(const json& j, AgentPopulation base, const std::string& source)
{
    try
    {
        return {std::move(base), PiecewiseLinear(breakpoints_from(j.at("g1"), source + ": g1")),
                PiecewiseLinear(breakpoints_from(j.at("g2"), source + ": g2"))};
    }
    catch (const json::exception& e)
    {
        throw Error(source + ": " + e.what());
    }
}

[[nodiscard]] inline json to_json(const StaircaseMemory& mem)
{
    json pairs = json::array();
    for (const auto& p : mem.pairs())
        pairs.push_back({p.max, p.min});
    return {{"start_u", mem.start_u()}, {"pairs", pairs}, {"current_u", mem.current_u()},
            {"trend", to_string(mem.trend())}};
}

[[nodiscard]] inline StaircaseMemory memory_from_json(const json& j, const std::string& source = "<memory>")
{
    try
    {
        const std::string t = j.at("trend").get<std::string>();
        Trend trend;
        if (t == "initial")
            trend = Trend::initial;
        else if (t == "rising")
            trend = Trend::rising;
        else if (t == "falling")
            trend = Trend::falling;
        else
            throw Error("unknown trend '" + t + "'");
        std::vector<DominantPair> pairs;
        for (const auto& p : j.at("pairs"))
        {
            if (!p.is_array() || p.size() != 2)
                throw Error("pair must be [M, m]");
            pairs.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        return StaircaseMemory::from_pairs(j.at("start_u").get<double>(), pairs, j.at("current_u").get<double>(),
                                           trend);
    }
    catch (const json::exception& e)
    {
        throw Error(source + ": " + e.what());
    }
    catch (const Error& e)
    {
        throw Error(source + ": " + e.what());
    }
}

[[nodiscard]] inline json read_json(std::istream& in, const std::string& source)
{
    try
    {
        return json::parse(in);
    }
    catch (const json::exception& e)
    {
        throw Error(source + ": " + e.what());
    }
}

} // namespace preisach::io

#endif // PREISACH_IO_HPP
