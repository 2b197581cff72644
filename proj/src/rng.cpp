#include "uquant/rng.hpp"

#include "uquant/math_util.hpp"

namespace uquant {

double Rng::normal() noexcept { return normal_quantile(uniform01()); }

}  // namespace uquant
