#ifndef PREISACH_MEMORY_HPP
#define PREISACH_MEMORY_HPP

#include "preisach/error.hpp"
#include "preisach/hysteron.hpp"
#include "preisach/signal.hpp"

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace preisach
{

enum class Trend : unsigned char
{
    initial,
    rising,
    falling
};

[[nodiscard]] inline const char* to_string(Trend t) noexcept
{
    switch (t)
    {
    case Trend::rising:
        return "rising";
    case Trend::falling:
        return "falling";
    default:
        return "initial";
    }
}

struct DominantPair
{
    double max;
    double min;
    friend bool operator==(const DominantPair&, const DominantPair&) = default;
};

/**
 * Staircase interface of the Preisach plane, stored as the alternating
 * dominant extrema M1 > M2 > ... and m1 < m2 < ... in time order
 * (M1, m1, M2, m2, ...). The last stored value is the running extremum and
 * equals current_u, except after an initial fall from saturation, which
 * switches nothing and leaves the list empty.
 *
 * Initial condition is negative saturation: every hysteron is down no matter
 * where start_u lies.
 */
class StaircaseMemory
{
  public:
    StaircaseMemory() = default;

    [[nodiscard]] static StaircaseMemory initial(double start_u)
    {
        if (!std::isfinite(start_u))
            throw Error("start value is not finite");
        StaircaseMemory m;
        m.start_u_ = start_u;
        m.current_u_ = start_u;
        return m;
    }

    /**
     * Rebuilds a memory from its serialized form. `pairs` holds the completed
     * (M, m) pairs; while falling, the last pair is the running one and its
     * minimum must equal current_u. While rising, current_u is the running
     * maximum.
     */
    [[nodiscard]] static StaircaseMemory from_pairs(double start_u, std::span<const DominantPair> pairs,
                                                    double current_u, Trend trend)
    {
        StaircaseMemory m = initial(start_u);
        if (!std::isfinite(current_u))
            throw Error("current value is not finite");
        m.current_u_ = current_u;
        m.trend_ = trend;
        for (const auto& p : pairs)
        {
            m.extrema_.push_back(p.max);
            m.extrema_.push_back(p.min);
        }
        switch (trend)
        {
        case Trend::initial:
            if (!pairs.empty() || current_u != start_u)
                throw Error("initial memory must have no pairs and current_u == start_u");
            break;
        case Trend::rising:
            m.extrema_.push_back(current_u);
            break;
        case Trend::falling:
            if (!pairs.empty() && pairs.back().min != current_u)
                throw Error("falling memory: last pair minimum must equal current_u");
            break;
        }
        if (auto problem = m.check_invariants())
            throw Error("invalid memory: " + *problem);
        return m;
    }

    [[nodiscard]] double start_u() const noexcept { return start_u_; }
    [[nodiscard]] double current_u() const noexcept { return current_u_; }
    [[nodiscard]] Trend trend() const noexcept { return trend_; }

    /// Alternating dominant extrema, oldest first, starting with a maximum.
    [[nodiscard]] std::span<const double> extrema() const noexcept { return extrema_; }

    /// Serialized pair view: completed pairs, plus the running pair while falling.
    [[nodiscard]] std::vector<DominantPair> pairs() const
    {
        std::vector<DominantPair> out;
        for (std::size_t i = 0; i + 1 < extrema_.size(); i += 2)
            out.push_back({extrema_[i], extrema_[i + 1]});
        return out;
    }

    /// Pairs strictly before the running extremum (and its partner maximum).
    [[nodiscard]] std::vector<DominantPair> completed_pairs() const
    {
        auto out = pairs();
        if (trend_ == Trend::falling && !out.empty())
            out.pop_back();
        return out;
    }

    /// Maximum paired with the running minimum while falling.
    [[nodiscard]] std::optional<double> running_max() const noexcept
    {
        if (trend_ == Trend::falling && extrema_.size() >= 2)
            return extrema_[extrema_.size() - 2];
        return std::nullopt;
    }

    /**
     * Moves the input monotonically from current_u to u. A move in the same
     * direction as the current trend continues the running extremum. Every
     * stored maximum <= u (rise) or minimum >= u (fall) is wiped out together
     * with its partner.
     */
    void push(double u)
    {
        if (!std::isfinite(u))
            throw Error("extremum is not finite");
        if (u == current_u_)
            throw Error("not an extremum");
        const Trend dir = u > current_u_ ? Trend::rising : Trend::falling;
        if (dir == trend_ && !extrema_.empty() && extrema_.back() == current_u_)
            extrema_.pop_back();
        if (dir == Trend::rising)
        {
            // Stack ends with a minimum (or is empty); extrema_[size-2] is the
            // maximum it is paired with.
            while (extrema_.size() >= 2 && extrema_[extrema_.size() - 2] <= u)
                extrema_.resize(extrema_.size() - 2);
            extrema_.push_back(u);
        }
        else if (!extrema_.empty())
        {
            while (extrema_.size() >= 3 && extrema_[extrema_.size() - 2] >= u)
                extrema_.resize(extrema_.size() - 2);
            extrema_.push_back(u);
        }
        current_u_ = u;
        trend_ = dir;
    }

    void apply(const ReversalSequence& seq)
    {
        if (seq.start_u != current_u_)
            throw Error("discontinuous history");
        require_valid(seq);
        for (double e : seq.extrema)
            push(e);
    }

    /// State of the rectangular hysteron (alpha, beta) under this history.
    [[nodiscard]] BinaryState state_of(double alpha, double beta) const noexcept
    {
        // Replay the dominant extrema from saturation: maxima at even indices
        // are reached rising, minima at odd indices falling.
        BinaryState s = BinaryState::down;
        for (std::size_t i = 0; i < extrema_.size(); ++i)
        {
            if (i % 2 == 0)
            {
                if (extrema_[i] >= alpha)
                    s = BinaryState::up;
            }
            else if (extrema_[i] <= beta)
            {
                s = BinaryState::down;
            }
        }
        return s;
    }

    /// First broken ordering invariant, if any.
    [[nodiscard]] std::optional<std::string> check_invariants() const
    {
        for (std::size_t i = 0; i < extrema_.size(); ++i)
        {
            if (!std::isfinite(extrema_[i]))
                return "extremum " + std::to_string(i) + " is not finite";
            if (i >= 2 && i % 2 == 0 && !(extrema_[i] < extrema_[i - 2]))
                return "maxima must strictly decrease (index " + std::to_string(i) + ")";
            if (i >= 2 && i % 2 == 1 && !(extrema_[i] > extrema_[i - 2]))
                return "minima must strictly increase (index " + std::to_string(i) + ")";
            if (i >= 1 && i % 2 == 1 && !(extrema_[i] < extrema_[i - 1]))
                return "minimum must lie below its maximum (index " + std::to_string(i) + ")";
            if (i >= 1 && i % 2 == 0 && !(extrema_[i] > extrema_[i - 1]))
                return "maximum must lie above the preceding minimum (index " + std::to_string(i) + ")";
        }
        if (trend_ == Trend::initial && (!extrema_.empty() || current_u_ != start_u_))
            return "initial memory carries history";
        if (trend_ == Trend::rising && (extrema_.empty() || extrema_.size() % 2 == 0 || extrema_.back() != current_u_))
            return "rising memory must end on its running maximum";
        if (trend_ == Trend::falling && !extrema_.empty() &&
            (extrema_.size() % 2 == 1 || extrema_.back() != current_u_))
            return "falling memory must end on its running minimum";
        return std::nullopt;
    }

    friend bool operator==(const StaircaseMemory&, const StaircaseMemory&) = default;

  private:
    double start_u_ = 0.0;
    double current_u_ = 0.0;
    Trend trend_ = Trend::initial;
    std::vector<double> extrema_;
};

[[nodiscard]] inline StaircaseMemory initial_memory(double start_u) { return StaircaseMemory::initial(start_u); }

[[nodiscard]] inline StaircaseMemory push_extremum(StaircaseMemory mem, double u)
{
    mem.push(u);
    return mem;
}

[[nodiscard]] inline StaircaseMemory apply_sequence(StaircaseMemory mem, const ReversalSequence& seq)
{
    mem.apply(seq);
    return mem;
}

} // namespace preisach

#endif // PREISACH_MEMORY_HPP
