#pragma once

#include <cstddef>
#include <span>

#include "rcsbench/types.h"

// Dense matrix action on selected bits of a complex vector of length 2^k.
// Bit positions are physical (0 = least significant). The first listed bit is
// the most significant bit of the matrix's local index.
namespace rcsbench::kernels {

void apply_1bit(Complex* v, size_t dim, unsigned bit, const Complex* m);
void apply_2bit(Complex* v, size_t dim, unsigned bit_hi, unsigned bit_lo, const Complex* m);
// General case; m is row-major (2^k x 2^k), k = bits.size() <= 8.
void apply_kbit(Complex* v, size_t dim, std::span<const unsigned> bits, const Complex* m);

// Row-major copy of an Eigen matrix.
std::vector<Complex> row_major(const CMatrix& m);

}  // namespace rcsbench::kernels
