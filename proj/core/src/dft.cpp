#include "dft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace qpfc::detail {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// FFTW's planner is not thread-safe; executing distinct plans on caller
// buffers is (plans are created FFTW_UNALIGNED so any array qualifies).
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int m) {
  static std::unordered_map<int, PlanPair>* cache =
      new std::unordered_map<int, PlanPair>();
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache->find(m);
  if (it != cache->end()) return it->second;

  std::vector<std::complex<double>> a(m), b(m);
  PlanPair p;
  p.forward = fftw_plan_dft_1d(m, reinterpret_cast<fftw_complex*>(a.data()),
                               reinterpret_cast<fftw_complex*>(b.data()),
                               FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.backward = fftw_plan_dft_1d(m, reinterpret_cast<fftw_complex*>(a.data()),
                                reinterpret_cast<fftw_complex*>(b.data()),
                                FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p.forward || !p.backward) throw std::runtime_error("fftw plan failed");
  return cache->emplace(m, p).first->second;
}

}  // namespace

std::vector<std::complex<double>> analyze(const std::vector<double>& values,
                                          int order) {
  const int m = static_cast<int>(values.size());
  if (m < 2 * order + 1)
    throw std::invalid_argument("analyze: grid smaller than 2*order+1");
  std::vector<std::complex<double>> in(values.begin(), values.end());
  std::vector<std::complex<double>> bins(m);
  fftw_execute_dft(plans_for(m).forward,
                   reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(bins.data()));
  std::vector<std::complex<double>> out(2 * order + 1);
  const double scale = 1.0 / m;
  for (int n = -order; n <= order; ++n) {
    const int k = ((n % m) + m) % m;
    out[n + order] = bins[k] * scale;
  }
  return out;
}

std::vector<double> synthesize(const std::vector<std::complex<double>>& coeffs,
                               int m) {
  const int len = static_cast<int>(coeffs.size());
  const int order = (len - 1) / 2;
  if (len != 2 * order + 1)
    throw std::invalid_argument("synthesize: coefficient table length is even");
  if (m < len) throw std::invalid_argument("synthesize: grid smaller than table");
  std::vector<std::complex<double>> bins(m);
  for (int n = -order; n <= order; ++n) {
    const int k = ((n % m) + m) % m;
    bins[k] = coeffs[n + order];
  }
  std::vector<std::complex<double>> out(m);
  fftw_execute_dft(plans_for(m).backward,
                   reinterpret_cast<fftw_complex*>(bins.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  std::vector<double> values(m);
  for (int j = 0; j < m; ++j) values[j] = out[j].real();
  return values;
}

}  // namespace qpfc::detail
