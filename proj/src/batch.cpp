#include "spsdgeo/batch.hpp"

#include "spsdgeo/errors.hpp"

namespace spsdgeo::batch {

namespace {

// Exceptions must not escape an OpenMP region; the first failing index is
// rethrown after the loop.
class CapturedError {
 public:
  void capture() {
#pragma omp critical(spsdgeo_batch_error)
    {
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow_if_set() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

}  // namespace

std::vector<SpsdPoint> factor_serial(const std::vector<Matrix>& mats, int r,
                                     bool truncate) {
  std::vector<SpsdPoint> out(mats.size());
  for (std::size_t i = 0; i < mats.size(); ++i)
    out[i] = truncate ? spsd_factor_truncated(mats[i], r)
                      : spsd_factor(mats[i], r);
  return out;
}

std::vector<SpsdPoint> factor(const std::vector<Matrix>& mats, int r,
                              bool truncate) {
  std::vector<SpsdPoint> out(mats.size());
  CapturedError err;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(mats.size()); ++i) {
    try {
      out[i] = truncate ? spsd_factor_truncated(mats[i], r)
                        : spsd_factor(mats[i], r);
    } catch (...) {
      err.capture();
    }
  }
  err.rethrow_if_set();
  return out;
}

std::vector<SpsdPoint> align_to_serial(const Matrix& g_base,
                                       const std::vector<SpsdPoint>& items) {
  std::vector<SpsdPoint> out(items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    out[i] = align_to_frame(g_base, items[i]);
  return out;
}

std::vector<SpsdPoint> align_to(const Matrix& g_base,
                                const std::vector<SpsdPoint>& items) {
  std::vector<SpsdPoint> out(items.size());
  CapturedError err;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(items.size()); ++i) {
    try {
      out[i] = align_to_frame(g_base, items[i]);
    } catch (...) {
      err.capture();
    }
  }
  err.rethrow_if_set();
  return out;
}

std::vector<SpsdTangent> log_at_serial(const SpsdPoint& base,
                                       const std::vector<SpsdPoint>& items) {
  std::vector<SpsdTangent> out(items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    out[i] = spsd_log(base, items[i]);
  return out;
}

std::vector<SpsdTangent> log_at(const SpsdPoint& base,
                                const std::vector<SpsdPoint>& items) {
  std::vector<SpsdTangent> out(items.size());
  CapturedError err;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(items.size()); ++i) {
    try {
      out[i] = spsd_log(base, items[i]);
    } catch (...) {
      err.capture();
    }
  }
  err.rethrow_if_set();
  return out;
}

std::vector<SpsdPoint> apply_transport_serial(
    const SpsdTransport& transport, const std::vector<SpsdPoint>& items) {
  std::vector<SpsdPoint> out(items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    out[i] = apply_spsd_transport(transport, items[i]);
  return out;
}

std::vector<SpsdPoint> apply_transport(const SpsdTransport& transport,
                                       const std::vector<SpsdPoint>& items) {
  std::vector<SpsdPoint> out(items.size());
  CapturedError err;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(items.size()); ++i) {
    try {
      out[i] = apply_spsd_transport(transport, items[i]);
    } catch (...) {
      err.capture();
    }
  }
  err.rethrow_if_set();
  return out;
}

std::vector<Matrix> compose_serial(const std::vector<SpsdPoint>& items) {
  std::vector<Matrix> out(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) out[i] = spsd_compose(items[i]);
  return out;
}

std::vector<Matrix> compose(const std::vector<SpsdPoint>& items) {
  std::vector<Matrix> out(items.size());
  CapturedError err;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(items.size()); ++i) {
    try {
      out[i] = spsd_compose(items[i]);
    } catch (...) {
      err.capture();
    }
  }
  err.rethrow_if_set();
  return out;
}

Matrix pairwise_curve_length_serial(const std::vector<SpsdPoint>& items,
                                    const SpsdMetricConfig& cfg) {
  const std::int64_t n = static_cast<std::int64_t>(items.size());
  Matrix out = Matrix::Zero(n, n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i + 1; j < n; ++j) {
      const double l = spsd_curve_length(items[i], items[j], cfg);
      out(i, j) = l;
      out(j, i) = l;
    }
  return out;
}

Matrix pairwise_curve_length(const std::vector<SpsdPoint>& items,
                             const SpsdMetricConfig& cfg) {
  const std::int64_t n = static_cast<std::int64_t>(items.size());
  Matrix out = Matrix::Zero(n, n);
  CapturedError err;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = i + 1; j < n; ++j) {
      try {
        const double l = spsd_curve_length(items[i], items[j], cfg);
        out(i, j) = l;
        out(j, i) = l;
      } catch (...) {
        err.capture();
      }
    }
  }
  err.rethrow_if_set();
  return out;
}

}  // namespace spsdgeo::batch
