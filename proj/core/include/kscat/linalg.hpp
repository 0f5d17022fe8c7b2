#ifndef KSCAT_LINALG_HPP
#define KSCAT_LINALG_HPP

#include <memory>
#include <string>

#include "kscat/types.hpp"

namespace kscat {

/// Dense LU factorization with a 1-norm condition estimate attached.
///
/// All inversions in the library go through this so that "singular" has one
/// meaning everywhere: cond_1 estimate above the configured limit.
class GatedLU {
public:
    GatedLU() = default;
    explicit GatedLU(const MatrixC& a);

    bool valid() const { return lu_ != nullptr; }
    double cond() const { return cond_; }
    Eigen::Index rows() const;

    /// Solve A x = b.
    VectorC solve(const VectorC& b) const;
    MatrixC solve(const MatrixC& b) const;
    MatrixC inverse() const;

    /// Throws `make_error(msg)` if the factor exceeds `cond_limit`.
    template <class E>
    const GatedLU& require(double cond_limit, const std::string& what) const {
        if (!valid() || !(cond_ < cond_limit))
            throw E(what + " (cond estimate " + std::to_string(cond_) + ")");
        return *this;
    }

private:
    std::shared_ptr<Eigen::PartialPivLU<MatrixC>> lu_;
    double cond_ = std::numeric_limits<double>::infinity();
};

/// Hager-Higham style estimate of ||inv(A)||_1 from a factorization.
double inverse_norm1_estimate(const Eigen::PartialPivLU<MatrixC>& lu);

/// 1-norm condition estimate of a square matrix (factorizes internally).
double cond1_estimate(const MatrixC& a);

} // namespace kscat

#endif
