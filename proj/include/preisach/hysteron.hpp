#ifndef PREISACH_HYSTERON_HPP
#define PREISACH_HYSTERON_HPP

#include "preisach/error.hpp"
#include "preisach/signal.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace preisach
{

enum class BinaryState : unsigned char
{
    down,
    up
};

[[nodiscard]] constexpr double sign(BinaryState s) noexcept { return s == BinaryState::up ? 1.0 : -1.0; }

[[nodiscard]] inline const char* to_string(BinaryState s) noexcept { return s == BinaryState::up ? "up" : "down"; }

/// Rectangular loop: switches up at alpha, down at beta, contributes nu * (+-1).
struct RectHysteron
{
    double alpha = 0.0;
    double beta = 0.0;
    double nu = 1.0;

    RectHysteron() = default;
    RectHysteron(double up_threshold, double down_threshold, double capacity = 1.0)
        : alpha(up_threshold), beta(down_threshold), nu(capacity)
    {
        if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(nu))
            throw Error("hysteron parameters must be finite");
        if (alpha < beta)
            throw Error("hysteron requires alpha >= beta");
        if (nu < 0.0)
            throw Error("hysteron capacity must be non-negative");
    }

    friend bool operator==(const RectHysteron&, const RectHysteron&) = default;
};

// Closed thresholds: a rise ending at u switches up iff u >= alpha, a fall
// ending at u switches down iff u <= beta.
[[nodiscard]] constexpr BinaryState switch_state(double alpha, double beta, BinaryState state, double from_u,
                                                 double to_u) noexcept
{
    if (to_u > from_u && to_u >= alpha)
        return BinaryState::up;
    if (to_u < from_u && to_u <= beta)
        return BinaryState::down;
    return state;
}

struct RectTrace
{
    BinaryState final_state;
    std::vector<BinaryState> trace;
};

[[nodiscard]] inline RectTrace rect_apply(const RectHysteron& h, BinaryState state, const ReversalSequence& seq)
{
    require_valid(seq);
    RectTrace out{state, {}};
    out.trace.reserve(seq.extrema.size());
    double prev = seq.start_u;
    for (double e : seq.extrema)
    {
        out.final_state = switch_state(h.alpha, h.beta, out.final_state, prev, e);
        out.trace.push_back(out.final_state);
        prev = e;
    }
    return out;
}

/// Continuous piecewise-linear map through breakpoints, held constant at the
/// end values outside the breakpoint range.
class PiecewiseLinear
{
  public:
    PiecewiseLinear() : PiecewiseLinear(0.0) {}

    explicit PiecewiseLinear(double constant) : points_{{0.0, constant}}
    {
        if (!std::isfinite(constant))
            throw Error("piecewise-linear value must be finite");
    }

    explicit PiecewiseLinear(std::vector<std::pair<double, double>> points) : points_(std::move(points))
    {
        if (points_.empty())
            throw Error("piecewise-linear map needs at least one breakpoint");
        for (std::size_t i = 0; i < points_.size(); ++i)
        {
            if (!std::isfinite(points_[i].first) || !std::isfinite(points_[i].second))
                throw Error("breakpoint " + std::to_string(i) + " is not finite");
            if (i > 0 && !(points_[i].first > points_[i - 1].first))
                throw Error("breakpoint u values must be strictly increasing (index " + std::to_string(i) + ")");
        }
    }

    [[nodiscard]] double operator()(double u) const noexcept
    {
        if (u <= points_.front().first)
            return points_.front().second;
        if (u >= points_.back().first)
            return points_.back().second;
        const auto it = std::upper_bound(points_.begin(), points_.end(), u,
                                         [](double x, const auto& p) { return x < p.first; });
        const auto& [u1, f1] = *it;
        const auto& [u0, f0] = *(it - 1);
        return f0 + (f1 - f0) * ((u - u0) / (u1 - u0));
    }

    [[nodiscard]] std::span<const std::pair<double, double>> points() const noexcept { return points_; }

    [[nodiscard]] bool non_decreasing() const noexcept
    {
        return std::adjacent_find(points_.begin(), points_.end(),
                                  [](const auto& a, const auto& b) { return b.second < a.second; }) ==
               points_.end();
    }

    /// Smallest segment slope (0 when there is a single breakpoint; the
    /// clamped tails have slope 0).
    [[nodiscard]] double min_slope() const noexcept
    {
        double s = 0.0;
        for (std::size_t i = 1; i < points_.size(); ++i)
            s = std::min(s, (points_[i].second - points_[i - 1].second) / (points_[i].first - points_[i - 1].first));
        return s;
    }

    friend bool operator==(const PiecewiseLinear&, const PiecewiseLinear&) = default;

  private:
    std::vector<std::pair<double, double>> points_;
};

/// Monotone (non-decreasing) branch of a generalized hysteron.
class BranchFunction : public PiecewiseLinear
{
  public:
    BranchFunction() = default;
    explicit BranchFunction(double constant) : PiecewiseLinear(constant) {}
    explicit BranchFunction(std::vector<std::pair<double, double>> points) : PiecewiseLinear(std::move(points))
    {
        if (!non_decreasing())
            throw Error("branch function must be non-decreasing");
    }
};

/// Soft-branch loop: follows f_plus while down and f_minus while up; the
/// switching itself is that of the rectangular loop (alpha, beta).
struct GeneralizedHysteron
{
    double alpha = 0.0;
    double beta = 0.0;
    BranchFunction f_plus;
    BranchFunction f_minus;

    GeneralizedHysteron() = default;
    GeneralizedHysteron(double up_threshold, double down_threshold, BranchFunction ascending,
                        BranchFunction descending)
        : alpha(up_threshold), beta(down_threshold), f_plus(std::move(ascending)), f_minus(std::move(descending))
    {
        if (!std::isfinite(alpha) || !std::isfinite(beta))
            throw Error("hysteron thresholds must be finite");
        if (alpha < beta)
            throw Error("hysteron requires alpha >= beta");
        // The chord f_minus - f_plus is piecewise linear, so checking the
        // interval ends and every interior breakpoint is exact.
        auto check = [&](double u) {
            if (f_minus(u) < f_plus(u))
                throw Error("descending branch must lie above ascending branch on [beta, alpha]");
        };
        check(beta);
        check(alpha);
        for (const auto* f : {&f_plus, &f_minus})
            for (const auto& [u, v] : f->points())
                if (u > beta && u < alpha)
                    check(u);
    }

    /// Rectangular loop of capacity nu: f_plus = -nu, f_minus = +nu.
    [[nodiscard]] static GeneralizedHysteron rectangular(const RectHysteron& h)
    {
        return {h.alpha, h.beta, BranchFunction(-h.nu), BranchFunction(h.nu)};
    }

    /// Half the loop opening at u; the agent's input-dependent weight.
    [[nodiscard]] double weight(double u) const { return 0.5 * (f_minus(u) - f_plus(u)); }
};

/// Output of a generalized hysteron in a given state:
/// (f- - f+)/2 * s + (f- + f+)/2, which selects f_plus (down) or f_minus (up).
/// The selection is returned directly so the reductions are exact.
[[nodiscard]] inline double gen_output(const GeneralizedHysteron& h, BinaryState state, double u)
{
    return state == BinaryState::up ? h.f_minus(u) : h.f_plus(u);
}

/// Direction of the last move of a history: +1 rising, -1 falling, 0 none.
[[nodiscard]] inline int final_direction(const ReversalSequence& seq) noexcept
{
    if (seq.extrema.empty())
        return 0;
    const double before = seq.extrema.size() > 1 ? seq.extrema[seq.extrema.size() - 2] : seq.start_u;
    return seq.extrema.back() > before ? 1 : -1;
}

/// Throws unless query_u equals the last point of seq or continues its final
/// monotone run.
inline void require_consistent_query(const ReversalSequence& seq, double query_u)
{
    if (!std::isfinite(query_u))
        throw Error("query value is not finite");
    const int dir = final_direction(seq);
    const double last = seq.last();
    if ((dir > 0 && query_u < last) || (dir < 0 && query_u > last))
        throw Error("non-monotone query");
}

[[nodiscard]] inline BinaryState advance_to_query(double alpha, double beta, BinaryState state,
                                                  const ReversalSequence& seq, double query_u)
{
    double prev = seq.start_u;
    for (double e : seq.extrema)
    {
        state = switch_state(alpha, beta, state, prev, e);
        prev = e;
    }
    return switch_state(alpha, beta, state, prev, query_u);
}

[[nodiscard]] inline double gen_apply(const GeneralizedHysteron& h, BinaryState state, const ReversalSequence& seq,
                                      double query_u)
{
    require_consistent_query(seq, query_u);
    return gen_output(h, advance_to_query(h.alpha, h.beta, state, seq, query_u), query_u);
}

} // namespace preisach

#endif // PREISACH_HYSTERON_HPP
