#pragma once

#include <Eigen/Core>

namespace earnshaw {

using Vec3 = Eigen::Vector3d;

}  // namespace earnshaw
