#ifndef PREISACH_CLASSICAL_HPP
#define PREISACH_CLASSICAL_HPP

#include "preisach/error.hpp"
#include "preisach/hysteron.hpp"
#include "preisach/memory.hpp"
#include "preisach/signal.hpp"
#include "preisach/summation.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace preisach
{

/// Finite set of binary agents; duplicates of (alpha, beta) simply add capacity.
struct AgentPopulation
{
    std::vector<RectHysteron> agents;

    [[nodiscard]] std::size_t size() const noexcept { return agents.size(); }

    [[nodiscard]] double total_capacity() const
    {
        CompensatedSum s;
        for (const auto& a : agents)
            s += a.nu;
        return s.value();
    }
};

/// Output at the start of a history and after each extremum.
struct OutputTrace
{
    double at_start = 0.0;
    std::vector<double> at_extrema;

    [[nodiscard]] double last() const noexcept { return at_extrema.empty() ? at_start : at_extrema.back(); }
};

/// Reversible / irreversible split of one output value.
struct Decomposition
{
    double irreversible = 0.0; // signed sum over the band R_u
    double reversible = 0.0;   // G(u)
    double offset = 0.0;       // F(u); zero for the classical model
    double total = 0.0;        // model output computed independently
};

[[nodiscard]] inline double direct_output(const AgentPopulation& pop, std::span<const BinaryState> states)
{
    CompensatedSum f;
    for (std::size_t k = 0; k < pop.agents.size(); ++k)
        f += pop.agents[k].nu * sign(states[k]);
    return f.value();
}

/// Direct summation f = sum_k nu_k * s_k, agents in index order.
[[nodiscard]] inline OutputTrace eval_direct(const AgentPopulation& pop, const ReversalSequence& seq,
                                             std::span<const BinaryState> init)
{
    require_valid(seq);
    if (init.size() != pop.size())
        throw Error("initial state count does not match population size");
    CompensatedSum at_start;
    std::vector<CompensatedSum> steps(seq.extrema.size());
    for (std::size_t k = 0; k < pop.agents.size(); ++k)
    {
        const auto& a = pop.agents[k];
        BinaryState s = init[k];
        at_start += a.nu * sign(s);
        double prev = seq.start_u;
        for (std::size_t j = 0; j < seq.extrema.size(); ++j)
        {
            s = switch_state(a.alpha, a.beta, s, prev, seq.extrema[j]);
            steps[j] += a.nu * sign(s);
            prev = seq.extrema[j];
        }
    }
    OutputTrace out{at_start.value(), {}};
    out.at_extrema.reserve(steps.size());
    for (const auto& s : steps)
        out.at_extrema.push_back(s.value());
    return out;
}

/// Same, starting from negative saturation.
[[nodiscard]] inline OutputTrace eval_direct(const AgentPopulation& pop, const ReversalSequence& seq)
{
    const std::vector<BinaryState> init(pop.size(), BinaryState::down);
    return eval_direct(pop, seq, init);
}

/**
 * Discretized weight over the square [beta0, alpha0]^2 with n x n cells.
 * Cell (i, j) spans alpha-cell i and beta-cell j; only cells with i >= j may
 * carry mass, and a diagonal cell's mass is spread uniformly over its
 * alpha >= beta half. Region masses are exact for that cellwise density and
 * cost O(1) through a (n+1) x (n+1) prefix table.
 */
class WeightGrid
{
  public:
    WeightGrid(double beta0, double alpha0, std::size_t n, std::vector<double> cell_mass)
        : beta0_(beta0), alpha0_(alpha0), n_(n), cell_(std::move(cell_mass))
    {
        if (!std::isfinite(beta0) || !std::isfinite(alpha0) || !(alpha0 > beta0))
            throw Error("grid bounds must satisfy beta0 < alpha0");
        if (n < 1)
            throw Error("grid needs at least one cell per axis");
        if (cell_.size() != n * n)
            throw Error("cell mass table has wrong size");
        h_ = (alpha0_ - beta0_) / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
            {
                const double m = cell(i, j);
                if (!std::isfinite(m) || m < 0.0)
                    throw Error("cell masses must be finite and non-negative");
                if (j > i && m != 0.0)
                    throw Error("cells below the diagonal (alpha < beta) must carry zero mass");
            }
        prefix_ = build_prefix();
    }

    /// Bins each agent's capacity into the cell holding (alpha, beta).
    [[nodiscard]] static WeightGrid from_agents(const AgentPopulation& pop, std::size_t n, double beta0,
                                                double alpha0)
    {
        if (n < 1 || !(alpha0 > beta0))
            throw Error("invalid grid bounds");
        std::vector<double> mass(n * n, 0.0);
        const double h = (alpha0 - beta0) / static_cast<double>(n);
        auto bin = [&](double x) {
            const auto i = static_cast<std::size_t>(std::floor((x - beta0) / h));
            return std::min(i, n - 1);
        };
        for (std::size_t k = 0; k < pop.agents.size(); ++k)
        {
            const auto& a = pop.agents[k];
            if (a.beta < beta0 || a.alpha > alpha0)
                throw Error("agent out of range (index " + std::to_string(k) + ")");
            mass[bin(a.alpha) * n + bin(a.beta)] += a.nu;
        }
        return {beta0, alpha0, n, std::move(mass)};
    }

    /// Integrates a density over each cell's part of the triangle with a
    /// midpoint rule on `sub` x `sub` subcells (exact for constant density).
    template <class Density>
    [[nodiscard]] static WeightGrid from_density(double beta0, double alpha0, std::size_t n, Density&& density,
                                                 std::size_t sub = 4)
    {
        if (n < 1 || sub < 1 || !(alpha0 > beta0))
            throw Error("invalid grid parameters");
        const double h = (alpha0 - beta0) / static_cast<double>(n);
        const double hs = h / static_cast<double>(sub);
        std::vector<double> mass(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j)
            {
                CompensatedSum m;
                for (std::size_t p = 0; p < sub; ++p)
                    for (std::size_t q = 0; q < sub; ++q)
                    {
                        if (i == j && q > p)
                            continue;
                        const double a = beta0 + static_cast<double>(i) * h + (static_cast<double>(p) + 0.5) * hs;
                        const double b = beta0 + static_cast<double>(j) * h + (static_cast<double>(q) + 0.5) * hs;
                        // Diagonal subcells are half inside the triangle.
                        const double area = (i == j && p == q) ? 0.5 * hs * hs : hs * hs;
                        m += density(a, b) * area;
                    }
                mass[i * n + j] = m.value();
            }
        return {beta0, alpha0, n, std::move(mass)};
    }

    [[nodiscard]] double beta0() const noexcept { return beta0_; }
    [[nodiscard]] double alpha0() const noexcept { return alpha0_; }
    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] double cell_width() const noexcept { return h_; }
    [[nodiscard]] double cell(std::size_t i_alpha, std::size_t j_beta) const noexcept
    {
        return cell_[i_alpha * n_ + j_beta];
    }
    [[nodiscard]] std::span<const double> cell_masses() const noexcept { return cell_; }
    [[nodiscard]] double total_mass() const noexcept { return prefix(n_, n_); }
    [[nodiscard]] bool contains(double x) const noexcept { return x >= beta0_ && x <= alpha0_; }

    /// Edge k of the partition, beta0 + k*h.
    [[nodiscard]] double edge(std::size_t k) const noexcept
    {
        return k == n_ ? alpha0_ : beta0_ + static_cast<double>(k) * h_;
    }

    /// Rebuild-check of the prefix table against the cell masses.
    [[nodiscard]] bool prefix_consistent() const { return build_prefix() == prefix_; }

    /// Mass of {alpha <= a, beta <= b}; arguments are clamped to the support.
    [[nodiscard]] double cumulative(double a, double b) const noexcept
    {
        const auto [ia, sa] = locate(a);
        const auto [jb, tb] = locate(b);
        double p = prefix(ia, jb);
        if (ia < n_)
        {
            // Partial alpha-cell ia over beta-cells below jb.
            const double strip = prefix(ia + 1, jb) - prefix(ia, jb);
            p += sa * strip;
            if (jb > ia)
                p += (sa * sa - sa) * cell(ia, ia);
        }
        if (jb < n_)
        {
            // Partial beta-cell jb over alpha-cells below ia.
            const double strip = prefix(ia, jb + 1) - prefix(ia, jb);
            p += tb * strip;
            if (jb < ia)
                p += (tb - tb * tb) * cell(jb, jb);
        }
        if (ia < n_ && jb < n_ && ia >= jb)
        {
            const double c = cell(ia, jb);
            if (ia > jb)
                p += c * sa * tb;
            else
                p += c * (tb >= sa ? sa * sa : 2.0 * sa * tb - tb * tb);
        }
        return p;
    }

    /// Mass of the rectangle [a_lo, a_hi] x [b_lo, b_hi].
    [[nodiscard]] double rect_mass(double a_lo, double a_hi, double b_lo, double b_hi) const noexcept
    {
        if (a_hi <= a_lo || b_hi <= b_lo)
            return 0.0;
        return cumulative(a_hi, b_hi) - cumulative(a_lo, b_hi) - cumulative(a_hi, b_lo) + cumulative(a_lo, b_lo);
    }

    void require_support(double x) const
    {
        if (!contains(x))
            throw Error("out of triangle T: " + std::to_string(x) + " not in [" + std::to_string(beta0_) + ", " +
                        std::to_string(alpha0_) + "]");
    }

  private:
    [[nodiscard]] double prefix(std::size_t i, std::size_t j) const noexcept { return prefix_[i * (n_ + 1) + j]; }

    [[nodiscard]] std::vector<double> build_prefix() const
    {
        std::vector<double> p((n_ + 1) * (n_ + 1), 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                p[(i + 1) * (n_ + 1) + (j + 1)] =
                    cell(i, j) + p[i * (n_ + 1) + (j + 1)] + p[(i + 1) * (n_ + 1) + j] - p[i * (n_ + 1) + j];
        return p;
    }

    // Cell index and fractional offset of x; values within a few ulps of an
    // edge snap onto it so cell-aligned queries are exact.
    [[nodiscard]] std::pair<std::size_t, double> locate(double x) const noexcept
    {
        const double t = (std::clamp(x, beta0_, alpha0_) - beta0_) / h_;
        const double r = std::round(t);
        if (std::abs(t - r) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, t))
            return {static_cast<std::size_t>(r), 0.0};
        const auto i = std::min(static_cast<std::size_t>(std::floor(t)), n_);
        return {i, i == n_ ? 0.0 : t - static_cast<double>(i)};
    }

    double beta0_;
    double alpha0_;
    std::size_t n_;
    double h_ = 1.0;
    std::vector<double> cell_;
    std::vector<double> prefix_;
};

inline void require_within(const WeightGrid& grid, const StaircaseMemory& mem)
{
    grid.require_support(mem.current_u());
    for (double e : mem.extrema())
        grid.require_support(e);
}

/// Mass of the up-set S+(t): one rectangle per staircase step.
[[nodiscard]] inline double up_mass(const WeightGrid& grid, const StaircaseMemory& mem)
{
    const auto e = mem.extrema();
    CompensatedSum m;
    for (std::size_t k = 0; k < e.size(); k += 2)
    {
        const double lower = k == 0 ? grid.beta0() : e[k - 1];
        const double upper = k + 1 < e.size() ? e[k + 1] : grid.alpha0();
        m += grid.cumulative(e[k], upper) - grid.cumulative(e[k], lower);
    }
    return m.value();
}

/// f = mass(S+) - mass(S-) = 2 mass(S+) - total, in O(#vertices).
[[nodiscard]] inline double eval_geometric(const WeightGrid& grid, const StaircaseMemory& mem)
{
    require_within(grid, mem);
    return 2.0 * up_mass(grid, mem) - grid.total_mass();
}

/**
 * Splits the output at u = current_u into the history-dependent band
 * R_u = {beta < u < alpha} and the reversible part
 * G(u) = mass{alpha <= u, beta < u} - mass{beta >= u, alpha > u}.
 * The sum equals eval_geometric whenever the initial saturation is
 * consistent with the history (start at or below beta0).
 */
[[nodiscard]] inline Decomposition decompose_classical(const WeightGrid& grid, const StaircaseMemory& mem)
{
    require_within(grid, mem);
    const double u = mem.current_u();
    const double a0 = grid.alpha0();
    const double b0 = grid.beta0();
    const double s_plus = grid.cumulative(u, u);
    const double s_minus = grid.rect_mass(u, a0, u, a0);
    const double band = grid.rect_mass(u, a0, b0, u);

    const auto e = mem.extrema();
    CompensatedSum band_up;
    for (std::size_t k = 0; k < e.size(); k += 2)
    {
        const double lower = k == 0 ? b0 : e[k - 1];
        const double upper = std::min(k + 1 < e.size() ? e[k + 1] : a0, u);
        band_up += grid.rect_mass(u, e[k], lower, upper);
    }
    Decomposition d;
    d.irreversible = 2.0 * band_up.value() - band;
    d.reversible = s_plus - s_minus;
    d.offset = 0.0;
    d.total = eval_geometric(grid, mem);
    return d;
}

/// Discrete-agent counterpart; R_u also holds agents with alpha == beta == u,
/// whose state depends on the direction of arrival.
[[nodiscard]] inline Decomposition decompose_direct(const AgentPopulation& pop, std::span<const BinaryState> states,
                                                    double u)
{
    CompensatedSum band, g;
    for (std::size_t k = 0; k < pop.agents.size(); ++k)
    {
        const auto& a = pop.agents[k];
        if (a.alpha <= u && a.beta < u)
            g += a.nu;
        else if (a.beta >= u && a.alpha > u)
            g += -a.nu;
        else
            band += a.nu * sign(states[k]);
    }
    return {band.value(), g.value(), 0.0, direct_output(pop, states)};
}

inline void require_chord_args(double u_minus, double u_plus, double u)
{
    if (!(u_minus < u_plus))
        throw Error("empty cycle");
    if (u < u_minus || u > u_plus)
        throw Error("outside cycle");
}

/**
 * Loop opening f_desc(u) - f_asc(u) for the cycle u_minus <-> u_plus:
 * twice the capacity with u < alpha <= u_plus and u_minus <= beta < u, less
 * twice the capacity of step agents at alpha == beta == u (up on the way up,
 * down on the way back). Zero at the cycle ends.
 */
[[nodiscard]] inline double vertical_chord(const AgentPopulation& pop, double u_minus, double u_plus, double u)
{
    require_chord_args(u_minus, u_plus, u);
    if (u == u_minus || u == u_plus)
        return 0.0;
    CompensatedSum s;
    for (const auto& a : pop.agents)
    {
        if (a.alpha > u && a.alpha <= u_plus && a.beta >= u_minus && a.beta < u)
            s += a.nu;
        else if (a.alpha == u && a.beta == u)
            s += -a.nu;
    }
    return 2.0 * s.value();
}

[[nodiscard]] inline double vertical_chord(const WeightGrid& grid, double u_minus, double u_plus, double u)
{
    require_chord_args(u_minus, u_plus, u);
    if (!grid.contains(u_minus) || !grid.contains(u_plus))
        throw Error("cycle outside grid support");
    if (u == u_minus || u == u_plus)
        return 0.0;
    return 2.0 * grid.rect_mass(u, u_plus, u_minus, u);
}

/// Incremental per-agent simulation of a population.
class PopulationTracker
{
  public:
    PopulationTracker(const AgentPopulation& pop, double start_u)
        : pop_(&pop), states_(pop.size(), BinaryState::down), u_(start_u)
    {
    }

    PopulationTracker(const AgentPopulation& pop, const StaircaseMemory& mem) : pop_(&pop), u_(mem.current_u())
    {
        states_.reserve(pop.size());
        for (const auto& a : pop.agents)
            states_.push_back(mem.state_of(a.alpha, a.beta));
    }

    void advance(double u)
    {
        if (u == u_)
            return;
        for (std::size_t k = 0; k < states_.size(); ++k)
            states_[k] = switch_state(pop_->agents[k].alpha, pop_->agents[k].beta, states_[k], u_, u);
        u_ = u;
    }

    [[nodiscard]] double current_u() const noexcept { return u_; }
    [[nodiscard]] double output() const { return direct_output(*pop_, states_); }
    [[nodiscard]] Decomposition decompose() const { return decompose_direct(*pop_, states_, u_); }
    [[nodiscard]] std::span<const BinaryState> states() const noexcept { return states_; }

  private:
    const AgentPopulation* pop_;
    std::vector<BinaryState> states_;
    double u_;
};

/// Staircase-memory evaluation on a weight grid.
class GridTracker
{
  public:
    GridTracker(const WeightGrid& grid, double start_u) : grid_(&grid), mem_(StaircaseMemory::initial(start_u))
    {
        grid.require_support(start_u);
    }
    GridTracker(const WeightGrid& grid, StaircaseMemory mem) : grid_(&grid), mem_(std::move(mem))
    {
        require_within(grid, mem_);
    }

    void advance(double u)
    {
        if (u == mem_.current_u())
            return;
        grid_->require_support(u);
        mem_.push(u);
    }

    [[nodiscard]] double current_u() const noexcept { return mem_.current_u(); }
    [[nodiscard]] double output() const { return eval_geometric(*grid_, mem_); }
    [[nodiscard]] Decomposition decompose() const { return decompose_classical(*grid_, mem_); }
    [[nodiscard]] const StaircaseMemory& memory() const noexcept { return mem_; }

  private:
    const WeightGrid* grid_;
    StaircaseMemory mem_;
};

[[nodiscard]] inline PopulationTracker track(const AgentPopulation& pop, double start_u) { return {pop, start_u}; }
[[nodiscard]] inline PopulationTracker track(const AgentPopulation& pop, const StaircaseMemory& mem)
{
    return {pop, mem};
}
[[nodiscard]] inline GridTracker track(const WeightGrid& grid, double start_u) { return {grid, start_u}; }
[[nodiscard]] inline GridTracker track(const WeightGrid& grid, const StaircaseMemory& mem) { return {grid, mem}; }

} // namespace preisach

#endif // PREISACH_CLASSICAL_HPP
