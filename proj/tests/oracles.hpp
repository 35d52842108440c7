// Independent reference implementations used only by tests. Everything here
// is written against the math directly (brute-force loops, FFT, dense
// eigensolver, finite differences) so it shares no code path with the
// library routines it checks.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "npvq/mlp.hpp"

namespace oracle {

// Plain double-loop autocorrelation.
inline std::vector<double> autocorr_bruteforce(const std::vector<double>& s, int max_lag) {
    std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
    for (int k = 0; k <= max_lag; ++k)
        for (std::size_t n = 0; n + static_cast<std::size_t>(k) < s.size(); ++n)
            r[static_cast<std::size_t>(k)] += s[n] * s[n + static_cast<std::size_t>(k)];
    return r;
}

// Iterative radix-2 FFT (size must be a power of two); forward when sign=-1.
inline void fft(std::vector<std::complex<double>>& x, int sign) {
    const std::size_t n = x.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = x[i + j];
                const std::complex<double> v = x[i + j + len / 2] * w;
                x[i + j] = u + v;
                x[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (sign > 0)
        for (auto& v : x) v /= static_cast<double>(n);
}

// Cepstrum of the all-pole filter 1/A(z), A(z) = 1 - sum a_k z^-k, computed
// from the log magnitude spectrum: for a minimum-phase filter the complex
// cepstrum at n >= 1 is twice the (even) real cepstrum.
inline std::vector<double> lpc_cepstrum_fft(const std::vector<double>& lpc, int cep_order,
                                            std::size_t fft_size = 8192) {
    std::vector<std::complex<double>> spec(fft_size);
    for (std::size_t m = 0; m < fft_size; ++m) {
        const double w = 2.0 * M_PI * static_cast<double>(m) / static_cast<double>(fft_size);
        std::complex<double> a(1.0, 0.0);
        for (std::size_t k = 0; k < lpc.size(); ++k)
            a -= lpc[k] * std::exp(std::complex<double>(0.0, -w * static_cast<double>(k + 1)));
        spec[m] = std::complex<double>(-std::log(std::abs(a)), 0.0); // log |1/A|
    }
    fft(spec, +1); // inverse transform of the even log spectrum
    std::vector<double> c(static_cast<std::size_t>(cep_order));
    for (int n = 1; n <= cep_order; ++n)
        c[static_cast<std::size_t>(n - 1)] = 2.0 * spec[static_cast<std::size_t>(n)].real();
    return c;
}

// Cyclic Jacobi eigensolver for a symmetric matrix (row-major dim x dim).
// Returns eigenvalues (unsorted) and the matching eigenvectors as columns.
struct EigenResult {
    std::vector<double> values;
    std::vector<double> vectors; // column j = eigenvector of values[j]
};

inline EigenResult jacobi_eigen(std::vector<double> a, std::size_t dim) {
    std::vector<double> v(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) v[i * dim + i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < dim; ++p)
            for (std::size_t q = p + 1; q < dim; ++q) off += a[p * dim + q] * a[p * dim + q];
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < dim; ++p) {
            for (std::size_t q = p + 1; q < dim; ++q) {
                const double apq = a[p * dim + q];
                if (std::fabs(apq) < 1e-300) continue;
                const double theta = (a[q * dim + q] - a[p * dim + p]) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < dim; ++i) {
                    const double aip = a[i * dim + p];
                    const double aiq = a[i * dim + q];
                    a[i * dim + p] = c * aip - s * aiq;
                    a[i * dim + q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < dim; ++i) {
                    const double api = a[p * dim + i];
                    const double aqi = a[q * dim + i];
                    a[p * dim + i] = c * api - s * aqi;
                    a[q * dim + i] = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < dim; ++i) {
                    const double vip = v[i * dim + p];
                    const double viq = v[i * dim + q];
                    v[i * dim + p] = c * vip - s * viq;
                    v[i * dim + q] = s * vip + c * viq;
                }
            }
        }
    }
    EigenResult res;
    res.values.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) res.values[i] = a[i * dim + i];
    res.vectors = std::move(v);
    return res;
}

// Second, independently written evaluation of the 10-4-2-1 network.
inline double mlp_forward_reference(const npvq::MlpPredictor& mlp,
                                    const std::vector<double>& history) {
    std::vector<double> layer(history);
    // layer 1
    std::vector<double> h1;
    for (int j = 0; j < npvq::kMlpHidden1; ++j) {
        double z = mlp.b1[static_cast<std::size_t>(j)];
        for (int i = 0; i < npvq::kMlpInputs; ++i)
            z += mlp.w1[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] *
                 layer[static_cast<std::size_t>(i)];
        h1.push_back(std::tanh(z));
    }
    std::vector<double> h2;
    for (int j = 0; j < npvq::kMlpHidden2; ++j) {
        double z = mlp.b2[static_cast<std::size_t>(j)];
        for (int i = 0; i < npvq::kMlpHidden1; ++i)
            z += mlp.w2[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] *
                 h1[static_cast<std::size_t>(i)];
        h2.push_back(std::tanh(z));
    }
    double out = mlp.b3;
    for (int j = 0; j < npvq::kMlpHidden2; ++j)
        out += mlp.w3[static_cast<std::size_t>(j)] * h2[static_cast<std::size_t>(j)];
    return out;
}

// Central finite differences of the network output w.r.t. each parameter.
inline std::vector<double> mlp_jacobian_fd(const npvq::MlpPredictor& mlp,
                                           const std::vector<double>& history, double h = 1e-5) {
    const auto base = npvq::parameters(mlp);
    std::vector<double> grad(npvq::kMlpParams);
    for (int p = 0; p < npvq::kMlpParams; ++p) {
        auto plus = base;
        auto minus = base;
        plus[static_cast<std::size_t>(p)] += h;
        minus[static_cast<std::size_t>(p)] -= h;
        const double fp =
            mlp_forward_reference(npvq::predictor_from_parameters(plus), history);
        const double fm =
            mlp_forward_reference(npvq::predictor_from_parameters(minus), history);
        grad[static_cast<std::size_t>(p)] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

} // namespace oracle
