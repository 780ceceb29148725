#pragma once

// Mixed-radix discrete Fourier transform for arbitrary lengths, plus the
// magnitude-spectrum helpers used by the feature pipeline and modal sweeps.
//
// The transform is a recursive decimation-in-time Cooley-Tukey: a length
// n = p * m input is split on its smallest prime factor p into p interleaved
// sub-sequences of length m, each transformed recursively, then recombined
// with a generic radix-p butterfly. A prime length degenerates to a single
// radix-n butterfly, i.e. a direct O(n^2) sum, so every length is supported.

#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace whisker {

namespace detail {

inline std::size_t smallest_prime_factor(std::size_t n) {
  if (n % 2 == 0) return 2;
  for (std::size_t f = 3; f * f <= n; f += 2) {
    if (n % f == 0) return f;
  }
  return n;
}

template <std::floating_point T>
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n), twiddles_(n) {
    // Each twiddle is evaluated directly from its angle; a running product
    // would accumulate rounding error over long transforms.
    for (std::size_t j = 0; j < n; ++j) {
      const T angle = -T(2) * std::numbers::pi_v<T> * T(j) / T(n);
      twiddles_[j] = {std::cos(angle), std::sin(angle)};
    }
  }

  void execute(const std::complex<T>* in, std::complex<T>* out) const {
    std::vector<std::complex<T>> scratch(n_);
    recurse(in, 1, out, n_, scratch.data());
  }

 private:
  // Transforms n elements of `in` taken at `stride` into out[0..n).
  void recurse(const std::complex<T>* in, std::size_t stride, std::complex<T>* out,
               std::size_t n, std::complex<T>* scratch) const {
    if (n == 1) {
      out[0] = in[0];
      return;
    }
    const std::size_t p = smallest_prime_factor(n);
    const std::size_t m = n / p;
    const std::size_t tw_step = n_ / n;  // W_n^j == W_N^(j * N / n)

    for (std::size_t r = 0; r < p; ++r) {
      recurse(in + r * stride, stride * p, out + r * m, m, scratch);
    }

    // out[r*m + k] now holds Y_r[k]. Butterfly into scratch, then copy back.
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t q = 0; q < p; ++q) {
        const std::size_t bin = k + q * m;
        std::complex<T> acc = out[k];
        for (std::size_t r = 1; r < p; ++r) {
          const std::size_t idx = ((r * bin) % n) * tw_step;
          acc += twiddles_[idx] * out[r * m + k];
        }
        scratch[bin] = acc;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = scratch[i];
  }

  std::size_t n_;
  std::vector<std::complex<T>> twiddles_;
};

}  // namespace detail

/// Forward DFT, X[k] = sum_j x[j] exp(-2 pi i j k / N), unnormalized.
template <std::floating_point T>
std::vector<std::complex<T>> fft(std::span<const std::complex<T>> input) {
  std::vector<std::complex<T>> out(input.size());
  if (input.empty()) return out;
  detail::FftPlan<T>(input.size()).execute(input.data(), out.data());
  return out;
}

template <std::floating_point T>
std::vector<std::complex<T>> fft_real(std::span<const T> input) {
  std::vector<std::complex<T>> promoted(input.begin(), input.end());
  return fft<T>(promoted);
}

/// Two-sided magnitude spectrum of an N-point transform.
struct Spectrum {
  std::vector<double> magnitudes;
  double bin_width = 1.0;  // Hz; sample_rate / N
};

inline Spectrum fft_magnitude(std::span<const double> window, double sample_rate = 1.0) {
  if (window.empty()) throw std::invalid_argument("fft_magnitude: empty window");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("fft_magnitude: sample_rate must be > 0");
  const auto bins = fft_real<double>(window);
  Spectrum spec;
  spec.magnitudes.reserve(bins.size());
  for (const auto& b : bins) spec.magnitudes.push_back(std::abs(b));
  spec.bin_width = sample_rate / static_cast<double>(window.size());
  return spec;
}

/// Index of the largest bin among 1..N/2 (DC and mirrored negative
/// frequencies excluded). Ties resolve to the lowest index.
inline std::size_t dominant_bin(const Spectrum& spec) {
  const std::size_t n = spec.magnitudes.size();
  if (n < 3) throw std::invalid_argument("dominant_bin: need at least 3 bins");
  std::size_t best = 1;
  for (std::size_t k = 2; k <= n / 2; ++k) {
    if (spec.magnitudes[k] > spec.magnitudes[best]) best = k;
  }
  return best;
}

inline double dominant_frequency(const Spectrum& spec) {
  return static_cast<double>(dominant_bin(spec)) * spec.bin_width;
}

}  // namespace whisker
