// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Mixed-radix FFT. Forward transforms are unnormalized (e^{-2 pi i kn/N});
// inverse transforms are unnormalized too, callers scale by 1/N.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "dfn/error.hpp"

namespace dfn {

template <typename T>
class ComplexFft {
 public:
  using Complex = std::complex<T>;

  explicit ComplexFft(std::size_t n) : n_(n) {
    if (n_ == 0) throw ConfigError("fft: size must be positive");
    Factorize();
    fwd_twiddles_.resize(n_);
    inv_twiddles_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(n_);
      fwd_twiddles_[k] = Complex(static_cast<T>(std::cos(phase)),
                                 static_cast<T>(std::sin(phase)));
      inv_twiddles_[k] = std::conj(fwd_twiddles_[k]);
    }
  }

  std::size_t size() const { return n_; }

  // `in` and `out` must not alias.
  void Forward(std::span<const Complex> in, std::span<Complex> out) const {
    Transform(in, out, false);
  }
  void Inverse(std::span<const Complex> in, std::span<Complex> out) const {
    Transform(in, out, true);
  }

 private:
  void Factorize() {
    std::size_t n = n_;
    auto take = [&](std::size_t p) {
      while (n % p == 0) {
        n /= p;
        factors_.push_back(p);
        factors_.push_back(n);
      }
    };
    take(4);
    take(2);
    for (std::size_t p = 3; p * p <= n; p += 2) take(p);
    if (n > 1) {
      factors_.push_back(n);
      factors_.push_back(1);
    }
    if (factors_.empty()) {
      factors_.push_back(1);
      factors_.push_back(1);
    }
  }

  void Transform(std::span<const Complex> in, std::span<Complex> out,
                 bool inverse) const {
    if (in.size() != n_ || out.size() != n_)
      throw ShapeError("fft: expected " + std::to_string(n_) + " points");
    const auto& tw = inverse ? inv_twiddles_ : fwd_twiddles_;
    Work(out.data(), in.data(), 1, factors_.data(), tw, inverse);
  }

  void Work(Complex* out, const Complex* in, std::size_t fstride,
            const std::size_t* factors, const std::vector<Complex>& tw,
            bool inverse) const {
    const std::size_t p = factors[0];
    const std::size_t m = factors[1];
    Complex* const begin = out;
    if (m == 1) {
      for (std::size_t q = 0; q < p; ++q) out[q] = in[q * fstride];
    } else {
      for (std::size_t q = 0; q < p; ++q)
        Work(out + q * m, in + q * fstride, fstride * p, factors + 2, tw,
             inverse);
    }
    switch (p) {
      case 1:
        break;
      case 2:
        Butterfly2(begin, fstride, m, tw);
        break;
      case 4:
        Butterfly4(begin, fstride, m, tw, inverse);
        break;
      default:
        ButterflyGeneric(begin, fstride, p, m, tw);
    }
  }

  void Butterfly2(Complex* out, std::size_t fstride, std::size_t m,
                  const std::vector<Complex>& tw) const {
    for (std::size_t k = 0; k < m; ++k) {
      const Complex t = out[k + m] * tw[k * fstride];
      out[k + m] = out[k] - t;
      out[k] += t;
    }
  }

  void Butterfly4(Complex* out, std::size_t fstride, std::size_t m,
                  const std::vector<Complex>& tw, bool inverse) const {
    for (std::size_t k = 0; k < m; ++k) {
      const Complex s0 = out[k + m] * tw[k * fstride];
      const Complex s1 = out[k + 2 * m] * tw[2 * k * fstride];
      const Complex s2 = out[k + 3 * m] * tw[3 * k * fstride];
      const Complex s5 = out[k] - s1;
      const Complex a = out[k] + s1;
      const Complex s3 = s0 + s2;
      const Complex s4 = s0 - s2;
      out[k + 2 * m] = a - s3;
      out[k] = a + s3;
      // Multiplication of s4 by -i (forward) or +i (inverse).
      const Complex rot = inverse ? Complex(-s4.imag(), s4.real())
                                  : Complex(s4.imag(), -s4.real());
      out[k + m] = s5 + rot;
      out[k + 3 * m] = s5 - rot;
    }
  }

  void ButterflyGeneric(Complex* out, std::size_t fstride, std::size_t p,
                        std::size_t m, const std::vector<Complex>& tw) const {
    std::array<Complex, 8> small{};
    std::vector<Complex> large;
    Complex* scratch = small.data();
    if (p > small.size()) {
      large.resize(p);
      scratch = large.data();
    }
    for (std::size_t u = 0; u < m; ++u) {
      for (std::size_t q = 0; q < p; ++q) scratch[q] = out[u + q * m];
      for (std::size_t q1 = 0; q1 < p; ++q1) {
        const std::size_t k = u + q1 * m;
        Complex acc = scratch[0];
        std::size_t idx = 0;
        for (std::size_t q = 1; q < p; ++q) {
          idx += fstride * k;
          idx %= n_;
          acc += scratch[q] * tw[idx];
        }
        out[k] = acc;
      }
    }
  }

  std::size_t n_;
  std::vector<std::size_t> factors_;  // (radix, remaining length) pairs
  std::vector<Complex> fwd_twiddles_;
  std::vector<Complex> inv_twiddles_;
};

// Real-input FFT of even length n computed through an n/2-point complex FFT.
// Spectra hold n/2 + 1 bins; bins 0 and n/2 have exactly zero imaginary part.
template <typename T>
class RealFft {
 public:
  using Complex = std::complex<T>;

  explicit RealFft(std::size_t n) : n_(n), half_(CheckedHalf(n)) {
    rotation_.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k <= n_ / 2; ++k) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(n_);
      rotation_[k] = Complex(static_cast<T>(std::cos(phase)),
                             static_cast<T>(std::sin(phase)));
    }
  }

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  void Forward(std::span<const T> in, std::span<Complex> out) const {
    if (in.size() != n_ || out.size() != bins())
      throw ShapeError("rfft: size mismatch for n=" + std::to_string(n_));
    const std::size_t h = n_ / 2;
    std::vector<Complex> packed(h), z(h);
    for (std::size_t m = 0; m < h; ++m)
      packed[m] = Complex(in[2 * m], in[2 * m + 1]);
    half_.Forward(packed, z);
    out[0] = Complex(z[0].real() + z[0].imag(), T(0));
    out[h] = Complex(z[0].real() - z[0].imag(), T(0));
    for (std::size_t k = 1; k < h; ++k) {
      const Complex zk = z[k];
      const Complex zc = std::conj(z[h - k]);
      const Complex even = (zk + zc) * T(0.5);
      const Complex diff = (zk - zc) * T(0.5);
      const Complex odd(diff.imag(), -diff.real());  // diff / i
      out[k] = even + rotation_[k] * odd;
    }
  }

  // Unnormalized: Inverse(Forward(x)) == n * x.
  void Inverse(std::span<const Complex> in, std::span<T> out) const {
    if (in.size() != bins() || out.size() != n_)
      throw ShapeError("irfft: size mismatch for n=" + std::to_string(n_));
    const std::size_t h = n_ / 2;
    std::vector<Complex> packed(h), z(h);
    for (std::size_t k = 0; k < h; ++k) {
      const Complex xk = in[k];
      const Complex xc = std::conj(in[h - k]);
      const Complex even = xk + xc;
      const Complex odd = (xk - xc) * std::conj(rotation_[k]);
      packed[k] = even + Complex(-odd.imag(), odd.real());  // even + i*odd
    }
    half_.Inverse(packed, z);
    for (std::size_t m = 0; m < h; ++m) {
      out[2 * m] = z[m].real();
      out[2 * m + 1] = z[m].imag();
    }
  }

 private:
  static std::size_t CheckedHalf(std::size_t n) {
    if (n < 2 || n % 2 != 0)
      throw ConfigError("rfft: size must be even and >= 2, got " +
                        std::to_string(n));
    return n / 2;
  }

  std::size_t n_;
  ComplexFft<T> half_;
  std::vector<Complex> rotation_;
};

}  // namespace dfn
