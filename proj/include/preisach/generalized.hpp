#ifndef PREISACH_GENERALIZED_HPP
#define PREISACH_GENERALIZED_HPP

#include "preisach/classical.hpp"
#include "preisach/error.hpp"
#include "preisach/hysteron.hpp"
#include "preisach/memory.hpp"
#include "preisach/signal.hpp"
#include "preisach/summation.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace preisach
{

struct GeneralizedPopulation
{
    std::vector<GeneralizedHysteron> agents;

    [[nodiscard]] std::size_t size() const noexcept { return agents.size(); }

    /// Rectangular agents with branches -nu / +nu.
    [[nodiscard]] static GeneralizedPopulation rectangular(const AgentPopulation& pop)
    {
        GeneralizedPopulation g;
        g.agents.reserve(pop.size());
        for (const auto& a : pop.agents)
            g.agents.push_back(GeneralizedHysteron::rectangular(a));
        return g;
    }
};

namespace detail
{
inline std::vector<BinaryState> advance_states(const GeneralizedPopulation& gpop, const ReversalSequence& seq,
                                               double query_u)
{
    require_valid(seq);
    require_consistent_query(seq, query_u);
    std::vector<BinaryState> s;
    s.reserve(gpop.size());
    for (const auto& a : gpop.agents)
        s.push_back(advance_to_query(a.alpha, a.beta, BinaryState::down, seq, query_u));
    return s;
}
} // namespace detail

[[nodiscard]] inline double generalized_output(const GeneralizedPopulation& gpop, std::span<const BinaryState> states,
                                               double u)
{
    CompensatedSum f;
    for (std::size_t k = 0; k < gpop.agents.size(); ++k)
        f += gen_output(gpop.agents[k], states[k], u);
    return f.value();
}

/// Aggregate output at query_u after seq, starting from negative saturation.
[[nodiscard]] inline double eval_generalized(const GeneralizedPopulation& gpop, const ReversalSequence& seq,
                                             double query_u)
{
    return generalized_output(gpop, detail::advance_states(gpop, seq, query_u), query_u);
}

/// F(u): half the summed branch midlines, each agent counted once.
[[nodiscard]] inline double F_of(const GeneralizedPopulation& gpop, double u)
{
    CompensatedSum s;
    for (const auto& a : gpop.agents)
        s += 0.5 * (a.f_minus(u) + a.f_plus(u));
    return s.value();
}

/// G(u): weights of agents certainly up (alpha <= u, beta < u) minus those
/// certainly down (beta >= u, alpha > u).
[[nodiscard]] inline double G_of(const GeneralizedPopulation& gpop, double u)
{
    CompensatedSum s;
    for (const auto& a : gpop.agents)
    {
        if (a.alpha <= u && a.beta < u)
            s += a.weight(u);
        else if (a.beta >= u && a.alpha > u)
            s += -a.weight(u);
    }
    return s.value();
}

[[nodiscard]] inline bool in_band(double alpha, double beta, double u) noexcept
{
    return !(alpha <= u && beta < u) && !(beta >= u && alpha > u);
}

[[nodiscard]] inline double irreversible_part(const GeneralizedPopulation& gpop, std::span<const BinaryState> states,
                                              double u)
{
    CompensatedSum s;
    for (std::size_t k = 0; k < gpop.agents.size(); ++k)
    {
        const auto& a = gpop.agents[k];
        if (in_band(a.alpha, a.beta, u))
            s += a.weight(u) * sign(states[k]);
    }
    return s.value();
}

/// History-dependent part: signed weights over the band beta < u < alpha
/// (plus step agents sitting exactly at u).
[[nodiscard]] inline double eval_irreversible(const GeneralizedPopulation& gpop, const ReversalSequence& seq,
                                              double query_u)
{
    return irreversible_part(gpop, detail::advance_states(gpop, seq, query_u), query_u);
}

[[nodiscard]] inline Decomposition decompose_generalized(const GeneralizedPopulation& gpop,
                                                         std::span<const BinaryState> states, double u)
{
    return {irreversible_part(gpop, states, u), G_of(gpop, u), F_of(gpop, u), generalized_output(gpop, states, u)};
}

/// Loop opening at u for the cycle u_minus <-> u_plus, weighted by the
/// current-input weights of the agents in the chord rectangle.
[[nodiscard]] inline double chord_generalized(const GeneralizedPopulation& gpop, double u_minus, double u_plus,
                                              double u)
{
    require_chord_args(u_minus, u_plus, u);
    if (u == u_minus || u == u_plus)
        return 0.0;
    CompensatedSum s;
    for (const auto& a : gpop.agents)
    {
        if (a.alpha > u && a.alpha <= u_plus && a.beta >= u_minus && a.beta < u)
            s += a.weight(u);
        else if (a.alpha == u && a.beta == u)
            s += -a.weight(u);
    }
    return 2.0 * s.value();
}

[[nodiscard]] inline double vertical_chord(const GeneralizedPopulation& gpop, double u_minus, double u_plus,
                                           double u)
{
    return chord_generalized(gpop, u_minus, u_plus, u);
}

class GeneralizedTracker
{
  public:
    GeneralizedTracker(const GeneralizedPopulation& gpop, double start_u)
        : gpop_(&gpop), states_(gpop.size(), BinaryState::down), u_(start_u)
    {
    }

    GeneralizedTracker(const GeneralizedPopulation& gpop, const StaircaseMemory& mem)
        : gpop_(&gpop), u_(mem.current_u())
    {
        states_.reserve(gpop.size());
        for (const auto& a : gpop.agents)
            states_.push_back(mem.state_of(a.alpha, a.beta));
    }

    void advance(double u)
    {
        if (u == u_)
            return;
        for (std::size_t k = 0; k < states_.size(); ++k)
            states_[k] = switch_state(gpop_->agents[k].alpha, gpop_->agents[k].beta, states_[k], u_, u);
        u_ = u;
    }

    [[nodiscard]] double current_u() const noexcept { return u_; }
    [[nodiscard]] double output() const { return generalized_output(*gpop_, states_, u_); }
    [[nodiscard]] Decomposition decompose() const { return decompose_generalized(*gpop_, states_, u_); }
    [[nodiscard]] std::span<const BinaryState> states() const noexcept { return states_; }

  private:
    const GeneralizedPopulation* gpop_;
    std::vector<BinaryState> states_;
    double u_;
};

[[nodiscard]] inline GeneralizedTracker track(const GeneralizedPopulation& gpop, double start_u)
{
    return {gpop, start_u};
}
[[nodiscard]] inline GeneralizedTracker track(const GeneralizedPopulation& gpop, const StaircaseMemory& mem)
{
    return {gpop, mem};
}

// ---------------------------------------------------------------------------
// Input-dependent threshold shifts
// ---------------------------------------------------------------------------

namespace detail
{
// min{u : u + g(u) >= y} for u + g(u) continuous and non-decreasing.
inline double lower_inverse(const PiecewiseLinear& g, double y)
{
    const auto p = g.points();
    auto w = [&](std::size_t i) { return p[i].first + p[i].second; };
    if (y <= w(0))
        return y - p.front().second;
    if (y > w(p.size() - 1))
        return y - p.back().second;
    std::size_t i = 1;
    while (w(i) < y)
        ++i;
    const double w0 = w(i - 1), w1 = w(i);
    return p[i - 1].first + (y - w0) / (w1 - w0) * (p[i].first - p[i - 1].first);
}

// max{u : u + g(u) <= y}.
inline double upper_inverse(const PiecewiseLinear& g, double y)
{
    const auto p = g.points();
    auto w = [&](std::size_t i) { return p[i].first + p[i].second; };
    const std::size_t last = p.size() - 1;
    if (y >= w(last))
        return y - p.back().second;
    if (y < w(0))
        return y - p.front().second;
    std::size_t i = last - 1;
    while (w(i) > y)
        --i;
    const double w0 = w(i), w1 = w(i + 1);
    return p[i].first + (y - w0) / (w1 - w0) * (p[i + 1].first - p[i].first);
}
} // namespace detail

/**
 * Classical population whose thresholds move with the input: an agent
 * (alpha, beta) switches up when u + g2(u) >= alpha and down when
 * u + g1(u) <= beta. Requires g2 <= g1 and u + g_i(u) non-decreasing so each
 * effective threshold is crossed at most once per monotone segment.
 */
class ShiftModel
{
  public:
    ShiftModel(AgentPopulation base, PiecewiseLinear down_shift, PiecewiseLinear up_shift)
        : base_(std::move(base)), g1_(std::move(down_shift)), g2_(std::move(up_shift))
    {
        if (g1_.min_slope() < -1.0 || g2_.min_slope() < -1.0)
            throw Error("ill-posed shift: u + g(u) must be non-decreasing");
        auto check = [&](double u) {
            if (g2_(u) > g1_(u))
                throw Error("shift model requires g2(u) <= g1(u)");
        };
        for (const auto* g : {&g1_, &g2_})
            for (const auto& [u, v] : g->points())
                check(u);
        pinned_.agents.reserve(base_.size());
        for (const auto& a : base_.agents)
        {
            const double up = detail::lower_inverse(g2_, a.alpha);
            const double down = detail::upper_inverse(g1_, a.beta);
            pinned_.agents.emplace_back(std::max(up, down), down, a.nu);
        }
    }

    [[nodiscard]] const AgentPopulation& base() const noexcept { return base_; }
    [[nodiscard]] const PiecewiseLinear& g1() const noexcept { return g1_; }
    [[nodiscard]] const PiecewiseLinear& g2() const noexcept { return g2_; }

    /// Effective input seen by the down threshold, u + g1(u).
    [[nodiscard]] double down_input(double u) const { return u + g1_(u); }
    /// Effective input seen by the up threshold, u + g2(u).
    [[nodiscard]] double up_input(double u) const { return u + g2_(u); }

    /// Fixed input-space thresholds at which each agent actually switches.
    [[nodiscard]] const AgentPopulation& pinned() const noexcept { return pinned_; }

    [[nodiscard]] BinaryState step(const RectHysteron& a, BinaryState s, double from_u, double to_u) const
    {
        if (to_u > from_u && up_input(to_u) >= a.alpha)
            return BinaryState::up;
        if (to_u < from_u && down_input(to_u) <= a.beta)
            return BinaryState::down;
        return s;
    }

    /// Partition in shifted coordinates: +1 certainly up, -1 certainly down,
    /// 0 in the irreversible band.
    [[nodiscard]] int region(const RectHysteron& a, double u) const
    {
        const bool up_side = up_input(u) >= a.alpha;
        const bool down_side = down_input(u) <= a.beta;
        if (up_side && !down_side)
            return 1;
        if (down_side && !up_side)
            return -1;
        return 0;
    }

  private:
    AgentPopulation base_;
    PiecewiseLinear g1_;
    PiecewiseLinear g2_;
    AgentPopulation pinned_;
};

[[nodiscard]] inline Decomposition shifted_decompose(const ShiftModel& sm, std::span<const BinaryState> states,
                                                     double u)
{
    CompensatedSum band, g;
    const auto& agents = sm.base().agents;
    for (std::size_t k = 0; k < agents.size(); ++k)
    {
        switch (sm.region(agents[k], u))
        {
        case 1:
            g += agents[k].nu;
            break;
        case -1:
            g += -agents[k].nu;
            break;
        default:
            band += agents[k].nu * sign(states[k]);
        }
    }
    return {band.value(), g.value(), 0.0, direct_output(sm.base(), states)};
}

/// Time-domain switching with moving thresholds; returns the irreversible
/// band sum at query_u.
[[nodiscard]] inline double eval_shifted(const ShiftModel& sm, const ReversalSequence& seq, double query_u)
{
    require_valid(seq);
    require_consistent_query(seq, query_u);
    const auto& agents = sm.base().agents;
    std::vector<BinaryState> states(agents.size(), BinaryState::down);
    for (std::size_t k = 0; k < agents.size(); ++k)
    {
        double prev = seq.start_u;
        for (double e : seq.extrema)
        {
            states[k] = sm.step(agents[k], states[k], prev, e);
            prev = e;
        }
        states[k] = sm.step(agents[k], states[k], prev, query_u);
    }
    return shifted_decompose(sm, states, query_u).irreversible;
}

/**
 * Change-of-variables form of a shift model: at input u the weight
 * mu~(a', b', u) = mu(a' + g2(u), b' + g1(u)) places agent k's capacity at
 * (alpha_k - g2(u), beta_k - g1(u)). Each capacity is switched by the fixed
 * hysteron where its moving location meets the switching line a' = u
 * (resp. b' = u), so the model is evaluated from the input's staircase
 * memory like any generalized model.
 */
class ShiftedWeight
{
  public:
    explicit ShiftedWeight(const ShiftModel& sm) : sm_(&sm) {}

    /// mu~(., ., u) as point masses in shifted coordinates.
    [[nodiscard]] AgentPopulation at(double u) const
    {
        AgentPopulation out;
        out.agents.reserve(sm_->base().size());
        for (const auto& a : sm_->base().agents)
        {
            RectHysteron p;
            p.alpha = a.alpha - sm_->g2()(u);
            p.beta = a.beta - sm_->g1()(u);
            p.nu = a.nu;
            out.agents.push_back(p);
        }
        return out;
    }

    [[nodiscard]] const AgentPopulation& hysterons() const noexcept { return sm_->pinned(); }

    /// Irreversible part from the staircase memory: capacities of fixed
    /// hysterons inside the band R_u, signed by their state_of.
    [[nodiscard]] double irreversible(const StaircaseMemory& mem) const
    {
        const double u = mem.current_u();
        CompensatedSum s;
        for (const auto& h : hysterons().agents)
            if (in_band(h.alpha, h.beta, u))
                s += h.nu * sign(mem.state_of(h.alpha, h.beta));
        return s.value();
    }

    [[nodiscard]] Decomposition decompose(const StaircaseMemory& mem) const
    {
        const double u = mem.current_u();
        CompensatedSum g, total;
        for (const auto& h : hysterons().agents)
        {
            if (h.alpha <= u && h.beta < u)
                g += h.nu;
            else if (h.beta >= u && h.alpha > u)
                g += -h.nu;
            total += h.nu * sign(mem.state_of(h.alpha, h.beta));
        }
        return {irreversible(mem), g.value(), 0.0, total.value()};
    }

  private:
    const ShiftModel* sm_;
};

[[nodiscard]] inline ShiftedWeight to_generalized(const ShiftModel& sm) { return ShiftedWeight(sm); }

class ShiftedTracker
{
  public:
    ShiftedTracker(const ShiftModel& sm, double start_u)
        : sm_(&sm), states_(sm.base().size(), BinaryState::down), u_(start_u)
    {
    }

    ShiftedTracker(const ShiftModel& sm, const StaircaseMemory& mem) : sm_(&sm), u_(mem.current_u())
    {
        states_.reserve(sm.base().size());
        for (const auto& h : sm.pinned().agents)
            states_.push_back(mem.state_of(h.alpha, h.beta));
    }

    void advance(double u)
    {
        if (u == u_)
            return;
        const auto& agents = sm_->base().agents;
        for (std::size_t k = 0; k < states_.size(); ++k)
            states_[k] = sm_->step(agents[k], states_[k], u_, u);
        u_ = u;
    }

    [[nodiscard]] double current_u() const noexcept { return u_; }
    [[nodiscard]] double output() const { return direct_output(sm_->base(), states_); }
    [[nodiscard]] Decomposition decompose() const { return shifted_decompose(*sm_, states_, u_); }
    [[nodiscard]] std::span<const BinaryState> states() const noexcept { return states_; }

  private:
    const ShiftModel* sm_;
    std::vector<BinaryState> states_;
    double u_;
};

[[nodiscard]] inline ShiftedTracker track(const ShiftModel& sm, double start_u) { return {sm, start_u}; }
[[nodiscard]] inline ShiftedTracker track(const ShiftModel& sm, const StaircaseMemory& mem) { return {sm, mem}; }

/// Shift-model chord: capacities of the fixed hysterons in the chord rectangle.
[[nodiscard]] inline double vertical_chord(const ShiftModel& sm, double u_minus, double u_plus, double u)
{
    return vertical_chord(sm.pinned(), u_minus, u_plus, u);
}

} // namespace preisach

#endif // PREISACH_GENERALIZED_HPP
