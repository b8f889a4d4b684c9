#pragma once

#include <functional>

#include "gausstat/types.hpp"

namespace gausstat::linalg {

// f applied to the spectrum of a hermitian matrix (input is symmetrized first).
CMat hermitian_function(const CMat& h, const std::function<double(double)>& f);

// exp(i h) for hermitian h.
CMat expi_hermitian(const CMat& h);

// Hermitian phi with exp(i phi) = u, eigenphases in (-pi, pi].
CMat log_unitary(const CMat& u);

double max_abs(const CMat& m);
double max_abs(const RMat& m);

// Real symplectic form [[0, I], [-I, 0]] on (x_1..x_M, p_1..p_M).
RMat omega(int modes);

// Wrap an angle into (-pi, pi].
double wrap_angle(double x);

} // namespace gausstat::linalg
