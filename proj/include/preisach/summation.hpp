#ifndef PREISACH_SUMMATION_HPP
#define PREISACH_SUMMATION_HPP

#include <cmath>

namespace preisach
{

// Neumaier compensated accumulator. Terms are added in caller order, so the
// result is reproducible for a fixed agent ordering.
class CompensatedSum
{
  public:
    CompensatedSum& operator+=(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            carry_ += (sum_ - t) + x;
        else
            carry_ += (x - t) + sum_;
        sum_ = t;
        return *this;
    }

    [[nodiscard]] double value() const noexcept { return sum_ + carry_; }

  private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

} // namespace preisach

#endif // PREISACH_SUMMATION_HPP
