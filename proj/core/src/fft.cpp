#include "cpgd/fft.hpp"

#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace cpgd::fft {

namespace {

// Process-lifetime plan cache.  Plan creation is not thread-safe in FFTW, so
// it is serialised; fftw_execute_dft on distinct buffers is safe.  Plans are
// created FFTW_UNALIGNED so they may run on any caller buffer.
std::mutex plan_mutex;
std::map<std::pair<Index, int>, fftw_plan>& plan_cache() {
    static std::map<std::pair<Index, int>, fftw_plan> cache;
    return cache;
}

fftw_plan plan_for(Index n, int sign) {
    std::scoped_lock lock(plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find({n, sign});
    if (it != cache.end()) return it->second;
    std::vector<Complex> probe(static_cast<size_t>(n));
    auto* buf = reinterpret_cast<fftw_complex*>(probe.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("fft: plan creation failed");
    cache.emplace(std::make_pair(n, sign), plan);
    return plan;
}

}  // namespace

Index next_pow2(Index n) {
    Index p = 1;
    while (p < n) p <<= 1;
    return p;
}

void forward(ComplexVector& buf) {
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(plan_for(buf.size(), FFTW_FORWARD), p, p);
}

void inverse(ComplexVector& buf) {
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(plan_for(buf.size(), FFTW_BACKWARD), p, p);
    buf /= static_cast<double>(buf.size());
}

ComplexVector convolve(const ComplexVector& a, const ComplexVector& b) {
    const Index full = a.size() + b.size() - 1;
    const Index len = next_pow2(full);
    ComplexVector fa = ComplexVector::Zero(len);
    ComplexVector fb = ComplexVector::Zero(len);
    fa.head(a.size()) = a;
    fb.head(b.size()) = b;
    forward(fa);
    forward(fb);
    fa.array() *= fb.array();
    inverse(fa);
    return fa.head(full);
}

}  // namespace cpgd::fft
