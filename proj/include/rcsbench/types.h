#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace rcsbench {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;
using CMatrix = Eigen::MatrixXcd;

// Qubit q maps to bit (n - 1 - q) of a basis-state index: qubit 0 is the MSB.
inline unsigned qubit_bit(int n, int q) { return static_cast<unsigned>(n - 1 - q); }

inline int popcount(uint64_t x) { return __builtin_popcountll(x); }

}  // namespace rcsbench
