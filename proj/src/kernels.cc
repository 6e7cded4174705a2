#include "rcsbench/kernels.h"

#include <algorithm>
#include <stdexcept>

namespace rcsbench::kernels {
namespace {

// Plain arithmetic avoids the NaN-recovery path of std::complex multiplication.
inline void madd(double& re, double& im, const Complex& a, const Complex& b) {
  re += a.real() * b.real() - a.imag() * b.imag();
  im += a.real() * b.imag() + a.imag() * b.real();
}

}  // namespace

std::vector<Complex> row_major(const CMatrix& m) {
  std::vector<Complex> out(static_cast<size_t>(m.rows() * m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<size_t>(r * m.cols() + c)] = m(r, c);
  return out;
}

void apply_1bit(Complex* v, size_t dim, unsigned bit, const Complex* m) {
  const size_t stride = size_t{1} << bit;
  for (size_t base = 0; base < dim; base += 2 * stride) {
    for (size_t i = base; i < base + stride; ++i) {
      const Complex a0 = v[i], a1 = v[i + stride];
      double r0 = 0, i0 = 0, r1 = 0, i1 = 0;
      madd(r0, i0, m[0], a0);
      madd(r0, i0, m[1], a1);
      madd(r1, i1, m[2], a0);
      madd(r1, i1, m[3], a1);
      v[i] = {r0, i0};
      v[i + stride] = {r1, i1};
    }
  }
}

void apply_2bit(Complex* v, size_t dim, unsigned bit_hi, unsigned bit_lo, const Complex* m) {
  const size_t bh = size_t{1} << bit_hi;
  const size_t bl = size_t{1} << bit_lo;
  const size_t lo = std::min(bh, bl), hi = std::max(bh, bl);
  for (size_t a = 0; a < dim; a += 2 * hi) {
    for (size_t b = a; b < a + hi; b += 2 * lo) {
      for (size_t i = b; i < b + lo; ++i) {
        const size_t idx[4] = {i, i | bl, i | bh, i | bh | bl};
        const Complex in[4] = {v[idx[0]], v[idx[1]], v[idx[2]], v[idx[3]]};
        for (int r = 0; r < 4; ++r) {
          double re = 0, im = 0;
          const Complex* row = m + 4 * r;
          madd(re, im, row[0], in[0]);
          madd(re, im, row[1], in[1]);
          madd(re, im, row[2], in[2]);
          madd(re, im, row[3], in[3]);
          v[idx[r]] = {re, im};
        }
      }
    }
  }
}

void apply_kbit(Complex* v, size_t dim, std::span<const unsigned> bits, const Complex* m) {
  const size_t k = bits.size();
  if (k == 1) return apply_1bit(v, dim, bits[0], m);
  if (k == 2) return apply_2bit(v, dim, bits[0], bits[1], m);
  if (k == 0 || k > 8) throw std::invalid_argument("apply_kbit supports 1..8 bits");
  const size_t local = size_t{1} << k;
  size_t mask = 0;
  for (unsigned b : bits) mask |= size_t{1} << b;
  // offset[j] = physical offset of local index j (local MSB = bits[0]).
  std::vector<size_t> offset(local, 0);
  for (size_t j = 0; j < local; ++j)
    for (size_t t = 0; t < k; ++t)
      if (j >> (k - 1 - t) & 1) offset[j] |= size_t{1} << bits[t];
  std::vector<Complex> in(local);
  for (size_t i = 0; i < dim; ++i) {
    if (i & mask) continue;
    for (size_t j = 0; j < local; ++j) in[j] = v[i | offset[j]];
    for (size_t r = 0; r < local; ++r) {
      double re = 0, im = 0;
      const Complex* row = m + r * local;
      for (size_t c = 0; c < local; ++c) madd(re, im, row[c], in[c]);
      v[i | offset[r]] = {re, im};
    }
  }
}

}  // namespace rcsbench::kernels
