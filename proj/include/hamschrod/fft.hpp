#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <utility>

#include <fftw3.h>

#include "hamschrod/types.hpp"

namespace hamschrod::fft {

// FFTW's planner is not thread safe; execution on distinct buffers is. Plans are
// created once per (length, direction) behind a mutex and live for the process.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        auto* in = fftw_alloc_complex(n);
        auto* out = fftw_alloc_complex(n);
        fftw_plan p = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        plans_.emplace(key, p);
        return p;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, p] : plans_) fftw_destroy_plan(p);
    }

    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

/// Unnormalized forward DFT: X_k = sum_j x_j exp(-2 pi i jk/n). Operates out of place on
/// contiguous complex buffers of length n.
inline void forward(const Complex* in, Complex* out, int n) {
    fftw_execute_dft(PlanCache::instance().get(n, FFTW_FORWARD),
                     reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

/// Normalized inverse DFT (divides by n).
inline void inverse(const Complex* in, Complex* out, int n) {
    fftw_execute_dft(PlanCache::instance().get(n, FFTW_BACKWARD),
                     reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    const double scale = 1.0 / n;
    for (int i = 0; i < n; ++i) out[i] *= scale;
}

inline Vector forward(const Vector& x) {
    Vector out(x.size());
    forward(x.data(), out.data(), static_cast<int>(x.size()));
    return out;
}

inline Vector inverse(const Vector& x) {
    Vector out(x.size());
    inverse(x.data(), out.data(), static_cast<int>(x.size()));
    return out;
}

/// Signed integer wavenumber of DFT bin j for length n: 0..n/2-1, then -n/2..-1.
inline int signed_index(int j, int n) { return j < (n + 1) / 2 ? j : j - n; }

}  // namespace hamschrod::fft
