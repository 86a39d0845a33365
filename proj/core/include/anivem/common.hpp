#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace anivem {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec4 = Eigen::Vector4d;

using VertexId = int;
using FaceId = int;
using CellId = int;

/// Side of the (discrete) interface. Minus is where the level set is negative.
enum class Side { minus, plus };

enum class Material { plus, minus, interface };

inline int side_sign(Side s) { return s == Side::minus ? -1 : 1; }

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GeometryError : Error {
  using Error::Error;
};
struct FormatError : Error {
  using Error::Error;
};
struct SolverError : Error {
  using Error::Error;
};

/// Level-set function; the minus side is where it is negative.
struct LevelSet {
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;
};

/// Number of worker threads: explicit value if positive, else ANIVEM_THREADS, else hardware.
int resolve_threads(int requested);

/// Static-chunked parallel loop over [0, n). Results must be written per index.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

} // namespace anivem
