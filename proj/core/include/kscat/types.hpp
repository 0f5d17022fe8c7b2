#ifndef KSCAT_TYPES_HPP
#define KSCAT_TYPES_HPP

#include <complex>
#include <Eigen/Dense>

namespace kscat {

using Real = double;
using Complex = std::complex<double>;

using Vec3 = Eigen::Vector3d;
using VectorC = Eigen::VectorXcd;
using VectorR = Eigen::VectorXd;
using MatrixC = Eigen::MatrixXcd;
using MatrixR = Eigen::MatrixXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr Complex iu{0.0, 1.0};

/// Default conditioning gate: a factor counts as singular past this.
inline constexpr double default_cond_limit = 1e12;

} // namespace kscat

#endif
