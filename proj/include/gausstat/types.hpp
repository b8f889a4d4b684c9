#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gausstat {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

enum class ErrorKind {
  Validation,
  UnsupportedOrder,
  UndefinedCorrelation,
  InsufficientData,
  Infeasible,
  Inconsistent,
  SectorMismatch,
  Truncation,
  Numerical,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

const char* error_kind_name(ErrorKind kind);

// 2 validation, 3 infeasible/inconsistent, 4 numerical
int exit_code(ErrorKind kind);

} // namespace gausstat
