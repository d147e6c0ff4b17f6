#ifndef PREISACH_ERROR_HPP
#define PREISACH_ERROR_HPP

#include <stdexcept>
#include <string>

namespace preisach
{

/// Raised for invalid model data or inputs (bad thresholds, unordered
/// series, inconsistent memory, queries outside a grid's support).
class Error : public std::runtime_error
{
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace preisach

#endif // PREISACH_ERROR_HPP
