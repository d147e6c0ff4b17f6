#ifndef PREISACH_SIGNAL_HPP
#define PREISACH_SIGNAL_HPP

#include "preisach/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace preisach
{

struct Sample
{
    double time;
    double u;
};

/// Time-stamped input samples with strictly increasing times and finite values.
class SampledSeries
{
  public:
    SampledSeries() = default;

    explicit SampledSeries(std::vector<Sample> samples) : samples_(std::move(samples))
    {
        for (std::size_t i = 0; i < samples_.size(); ++i)
        {
            if (!std::isfinite(samples_[i].time) || !std::isfinite(samples_[i].u))
                throw Error("invalid sample at index " + std::to_string(i));
            if (i > 0 && !(samples_[i].time > samples_[i - 1].time))
                throw Error("unordered series at index " + std::to_string(i));
        }
    }

    [[nodiscard]] std::span<const Sample> samples() const noexcept { return samples_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }

  private:
    std::vector<Sample> samples_;
};

/// Rate-independent input history: a start value followed by alternating
/// extrema. Construction does not validate; see validate().
struct ReversalSequence
{
    double start_u = 0.0;
    std::vector<double> extrema;

    /// Value the input currently sits at (last extremum or the start).
    [[nodiscard]] double last() const noexcept { return extrema.empty() ? start_u : extrema.back(); }

    friend bool operator==(const ReversalSequence&, const ReversalSequence&) = default;
};

struct Violation
{
    std::size_t index; // offending position in extrema
    std::string description;
};

/// Checks finiteness and strict alternation of direction; reports the first
/// offending extremum index.
[[nodiscard]] inline std::optional<Violation> validate(const ReversalSequence& seq)
{
    if (!std::isfinite(seq.start_u))
        return Violation{0, "start value is not finite"};
    double prev = seq.start_u;
    int prev_dir = 0;
    for (std::size_t i = 0; i < seq.extrema.size(); ++i)
    {
        const double e = seq.extrema[i];
        if (!std::isfinite(e))
            return Violation{i, "extremum is not finite"};
        if (e == prev)
            return Violation{i, "extremum repeats its predecessor"};
        const int dir = e > prev ? 1 : -1;
        if (dir == prev_dir)
            return Violation{i, dir > 0 ? "two increases in a row" : "two decreases in a row"};
        prev = e;
        prev_dir = dir;
    }
    return std::nullopt;
}

inline void require_valid(const ReversalSequence& seq)
{
    if (auto v = validate(seq))
        throw Error("invalid reversal sequence at index " + std::to_string(v->index) + ": " + v->description);
}

/// Reduces a piecewise-linear path start_u -> samples to its alternating
/// extrema. Plateaus collapse; monotone runs collapse to their endpoints. The
/// final sample always terminates the last run and is kept.
[[nodiscard]] inline ReversalSequence extract_reversals(std::span<const double> path, double start_u)
{
    if (!std::isfinite(start_u))
        throw Error("invalid sample: start value is not finite");
    ReversalSequence out{start_u, {}};
    double prev = start_u;
    int dir = 0;
    for (std::size_t i = 0; i < path.size(); ++i)
    {
        const double u = path[i];
        if (!std::isfinite(u))
            throw Error("invalid sample at index " + std::to_string(i));
        if (u == prev)
            continue;
        const int d = u > prev ? 1 : -1;
        if (d == dir)
            out.extrema.back() = u;
        else
            out.extrema.push_back(u);
        dir = d;
        prev = u;
    }
    return out;
}

[[nodiscard]] inline ReversalSequence extract_reversals(const SampledSeries& series, double start_u)
{
    if (series.empty())
        throw Error("empty series");
    std::vector<double> path;
    path.reserve(series.size());
    for (const auto& s : series.samples())
        path.push_back(s.u);
    return extract_reversals(path, start_u);
}

/// Piecewise-linear series through the reversal points, one unit of time per
/// segment, with `subdivisions` evenly spaced samples per segment.
[[nodiscard]] inline SampledSeries to_series(const ReversalSequence& seq, std::size_t subdivisions = 1,
                                             double dt = 1.0)
{
    if (subdivisions == 0)
        throw Error("subdivisions must be positive");
    std::vector<Sample> samples;
    samples.push_back({0.0, seq.start_u});
    double t = 0.0;
    double prev = seq.start_u;
    for (double e : seq.extrema)
    {
        for (std::size_t k = 1; k <= subdivisions; ++k)
        {
            const double w = static_cast<double>(k) / static_cast<double>(subdivisions);
            double u = e;
            if (k < subdivisions)
            {
                // Clamp so rounding cannot overshoot the segment end.
                u = prev + (e - prev) * w;
                u = e > prev ? std::min(u, e) : std::max(u, e);
            }
            samples.push_back({t + dt * w, u});
        }
        t += dt;
        prev = e;
    }
    return SampledSeries(std::move(samples));
}

} // namespace preisach

#endif // PREISACH_SIGNAL_HPP
