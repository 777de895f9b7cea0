#include "sbsim/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "sbsim/error.hpp"

namespace sbsim {
namespace detail {

struct GridData {
  int dim = 0;
  int n = 0;
  std::size_t size = 0;
  std::vector<Wavenumber> k;
  std::vector<double> k2;
  std::vector<std::uint8_t> nyquist;
  std::vector<std::uint8_t> dealias;
  std::vector<int> max_abs;
  std::vector<double> phase;  // (-1)^(sum of spectral indices)
  fftw_plan forward_plan = nullptr;
  fftw_plan inverse_plan = nullptr;

  GridData() = default;
  GridData(const GridData&) = delete;
  GridData& operator=(const GridData&) = delete;
  ~GridData() {
    if (forward_plan) fftw_destroy_plan(forward_plan);
    if (inverse_plan) fftw_destroy_plan(inverse_plan);
  }
};

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::shared_ptr<const GridData> make_grid_data(int dim, int n) {
  auto data = std::make_shared<GridData>();
  data->dim = dim;
  data->n = n;
  std::size_t size = 1;
  for (int a = 0; a < dim; ++a) size *= static_cast<std::size_t>(n);
  data->size = size;
  data->k.resize(size);
  data->k2.resize(size);
  data->nyquist.resize(size);
  data->dealias.resize(size);
  data->max_abs.resize(size);
  data->phase.resize(size);
  const int band = n / 3;
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t rem = idx;
    Wavenumber k{0, 0, 0};
    int index_sum = 0;
    for (int a = dim - 1; a >= 0; --a) {
      const int j = static_cast<int>(rem % static_cast<std::size_t>(n));
      rem /= static_cast<std::size_t>(n);
      k[a] = j <= n / 2 ? j : j - n;
      index_sum += j;
    }
    double k2 = 0.0;
    bool nyq = false;
    bool in_band = true;
    int max_abs = 0;
    for (int a = 0; a < dim; ++a) {
      k2 += static_cast<double>(k[a]) * k[a];
      nyq = nyq || (k[a] == n / 2);
      in_band = in_band && (std::abs(k[a]) <= band);
      max_abs = std::max(max_abs, std::abs(k[a]));
    }
    data->k[idx] = k;
    data->k2[idx] = k2;
    data->nyquist[idx] = nyq ? 1 : 0;
    data->dealias[idx] = in_band ? 1 : 0;
    data->max_abs[idx] = max_abs;
    data->phase[idx] = (index_sum % 2 == 0) ? 1.0 : -1.0;
  }

  int dims[3] = {n, n, n};
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_complex* in = fftw_alloc_complex(size);
  fftw_complex* out = fftw_alloc_complex(size);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  data->forward_plan = fftw_plan_dft(dim, dims, in, out, FFTW_FORWARD, flags);
  data->inverse_plan = fftw_plan_dft(dim, dims, in, out, FFTW_BACKWARD, flags);
  fftw_free(in);
  fftw_free(out);
  if (!data->forward_plan || !data->inverse_plan) {
    throw Error("FFTW plan creation failed for n = " + std::to_string(n));
  }
  return data;
}

std::shared_ptr<const GridData> shared_grid_data(int dim, int n) {
  static std::mutex registry_mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const GridData>> registry;
  std::lock_guard<std::mutex> lock(registry_mutex);
  auto& slot = registry[{dim, n}];
  if (!slot) slot = make_grid_data(dim, n);
  return slot;
}

std::vector<cplx>& scratch_in(std::size_t size) {
  thread_local std::vector<cplx> buffer;
  if (buffer.size() < size) buffer.resize(size);
  return buffer;
}

std::vector<cplx>& scratch_out(std::size_t size) {
  thread_local std::vector<cplx> buffer;
  if (buffer.size() < size) buffer.resize(size);
  return buffer;
}

}  // namespace
}  // namespace detail

Grid::Grid(int dimension, int resolution) {
  if (dimension != 2 && dimension != 3) {
    throw ValidationError("grid dimension must be 2 or 3, got " + std::to_string(dimension));
  }
  if (resolution < 4 || (resolution & (resolution - 1)) != 0) {
    throw ValidationError("grid resolution must be a power of two >= 4, got " +
                          std::to_string(resolution));
  }
  data_ = detail::shared_grid_data(dimension, resolution);
}

int Grid::dimension() const noexcept { return data_->dim; }
int Grid::resolution() const noexcept { return data_->n; }
std::size_t Grid::size() const noexcept { return data_->size; }
double Grid::spacing() const noexcept { return 2.0 * std::numbers::pi / data_->n; }
double Grid::volume() const noexcept { return std::pow(2.0 * std::numbers::pi, data_->dim); }

Wavenumber Grid::wavenumber(std::size_t index) const noexcept { return data_->k[index]; }
double Grid::k_squared(std::size_t index) const noexcept { return data_->k2[index]; }
double Grid::k_component(std::size_t index, int axis) const noexcept {
  return static_cast<double>(data_->k[index][axis]);
}
bool Grid::is_nyquist(std::size_t index) const noexcept { return data_->nyquist[index] != 0; }
bool Grid::in_dealias_band(std::size_t index) const noexcept { return data_->dealias[index] != 0; }
int Grid::max_abs_component(std::size_t index) const noexcept { return data_->max_abs[index]; }
const std::vector<double>& Grid::k_squared_table() const noexcept { return data_->k2; }
const std::vector<Wavenumber>& Grid::wavenumber_table() const noexcept { return data_->k; }

std::size_t Grid::index_of(const Wavenumber& k) const noexcept {
  const int n = data_->n;
  std::size_t idx = 0;
  for (int a = 0; a < data_->dim; ++a) {
    const int j = ((k[a] % n) + n) % n;
    idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(j);
  }
  return idx;
}

double Grid::coordinate(std::size_t index, int axis) const noexcept {
  const std::size_t n = static_cast<std::size_t>(data_->n);
  std::size_t rem = index;
  for (int a = data_->dim - 1; a > axis; --a) rem /= n;
  const std::size_t j = rem % n;
  return -std::numbers::pi + static_cast<double>(j) * spacing();
}

void Grid::forward(std::span<const double> physical, std::span<cplx> spectral) const {
  const std::size_t size = data_->size;
  auto& in = detail::scratch_in(size);
  for (std::size_t i = 0; i < size; ++i) in[i] = cplx(physical[i], 0.0);
  fftw_execute_dft(data_->forward_plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(spectral.data()));
  const double scale = 1.0 / static_cast<double>(size);
  const auto& phase = data_->phase;
  for (std::size_t i = 0; i < size; ++i) spectral[i] *= phase[i] * scale;
}

void Grid::inverse(std::span<const cplx> spectral, std::span<double> physical) const {
  const std::size_t size = data_->size;
  auto& in = detail::scratch_in(size);
  auto& out = detail::scratch_out(size);
  const auto& phase = data_->phase;
  for (std::size_t i = 0; i < size; ++i) in[i] = spectral[i] * phase[i];
  fftw_execute_dft(data_->inverse_plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  for (std::size_t i = 0; i < size; ++i) physical[i] = out[i].real();
}

bool Grid::operator==(const Grid& other) const noexcept {
  return data_->dim == other.data_->dim && data_->n == other.data_->n;
}

}  // namespace sbsim
