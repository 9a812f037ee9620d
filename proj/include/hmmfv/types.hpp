#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>

namespace hmmfv {

using Point = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

using Index = std::size_t;
using Triangle = std::array<Index, 3>;

} // namespace hmmfv
