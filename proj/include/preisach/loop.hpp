#ifndef PREISACH_LOOP_HPP
#define PREISACH_LOOP_HPP

#include "preisach/error.hpp"
#include "preisach/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace preisach
{

/// One cycle u_minus -> u_plus -> u_minus sampled on a shared uniform grid.
/// descending[i] is the output at u[i] on the way back down.
struct LoopTrace
{
    double u_minus = 0.0;
    double u_plus = 0.0;
    std::vector<double> u;
    std::vector<double> ascending;
    std::vector<double> descending;

    [[nodiscard]] std::size_t size() const noexcept { return u.size(); }
    [[nodiscard]] double chord(std::size_t i) const { return descending[i] - ascending[i]; }
};

[[nodiscard]] inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n)
{
    if (n < 2)
        throw Error("grid needs at least two points");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = i + 1 == n ? hi : lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(n - 1));
    return g;
}

template <class Tracker>
[[nodiscard]] LoopTrace trace_cycle(Tracker& tracker, double u_minus, double u_plus, std::size_t n_points)
{
    if (!(u_minus < u_plus))
        throw Error("empty cycle");
    LoopTrace loop;
    loop.u_minus = u_minus;
    loop.u_plus = u_plus;
    loop.u = uniform_grid(u_minus, u_plus, n_points);
    loop.ascending.resize(n_points);
    loop.descending.resize(n_points);
    tracker.advance(u_minus);
    for (std::size_t i = 0; i < n_points; ++i)
    {
        tracker.advance(loop.u[i]);
        loop.ascending[i] = tracker.output();
    }
    for (std::size_t i = n_points; i-- > 0;)
    {
        tracker.advance(loop.u[i]);
        loop.descending[i] = tracker.output();
    }
    return loop;
}

/**
 * Applies `history` to a fresh tracker, moves the input to u_minus, then
 * samples one full cycle. The tracker is whatever track(model, start_u)
 * returns; it must offer advance(u) and output().
 */
template <class Model>
[[nodiscard]] LoopTrace minor_loop(const Model& model, const ReversalSequence& history, double u_minus,
                                   double u_plus, std::size_t n_points)
{
    require_valid(history);
    if (!(u_minus < u_plus))
        throw Error("empty cycle");
    auto tracker = track(model, history.start_u);
    for (double e : history.extrema)
        tracker.advance(e);
    return trace_cycle(tracker, u_minus, u_plus, n_points);
}

struct CongruencyReport
{
    bool congruent;
    double max_deviation;
};

inline void require_comparable(const LoopTrace& l1, const LoopTrace& l2)
{
    if (l1.u_minus != l2.u_minus || l1.u_plus != l2.u_plus || l1.u != l2.u)
        throw Error("incomparable loops");
}

/// Largest branch mismatch after translating loop 2 along f so both loops
/// start at the same output.
[[nodiscard]] inline CongruencyReport check_congruency(const LoopTrace& l1, const LoopTrace& l2, double tol)
{
    require_comparable(l1, l2);
    const double shift = l1.ascending.front() - l2.ascending.front();
    double dev = 0.0;
    for (std::size_t i = 0; i < l1.size(); ++i)
    {
        dev = std::max(dev, std::abs(l1.ascending[i] - (l2.ascending[i] + shift)));
        dev = std::max(dev, std::abs(l1.descending[i] - (l2.descending[i] + shift)));
    }
    return {dev <= tol, dev};
}

struct EqualChordsReport
{
    bool chords_equal;
    double max_chord_deviation;
    CongruencyReport congruency;
};

[[nodiscard]] inline EqualChordsReport check_equal_chords(const LoopTrace& l1, const LoopTrace& l2, double tol)
{
    require_comparable(l1, l2);
    double dev = 0.0;
    for (std::size_t i = 0; i < l1.size(); ++i)
        dev = std::max(dev, std::abs(l1.chord(i) - l2.chord(i)));
    return {dev <= tol, dev, check_congruency(l1, l2, tol)};
}

} // namespace preisach

#endif // PREISACH_LOOP_HPP
