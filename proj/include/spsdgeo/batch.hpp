#pragma once

#include <vector>

#include "spsdgeo/spsd.hpp"
#include "spsdgeo/transport.hpp"
#include "spsdgeo/types.hpp"

namespace spsdgeo::batch {

// Set-level kernels. Every kernel has an OpenMP-parallel version and a
// plain-loop serial reference; each item writes its own output slot, so the
// two produce bit-identical results (the serial versions back the equality
// tests and the benchmark baseline).

std::vector<SpsdPoint> factor(const std::vector<Matrix>& mats, int r,
                              bool truncate = false);
std::vector<SpsdPoint> factor_serial(const std::vector<Matrix>& mats, int r,
                                     bool truncate = false);

std::vector<SpsdPoint> align_to(const Matrix& g_base,
                                const std::vector<SpsdPoint>& items);
std::vector<SpsdPoint> align_to_serial(const Matrix& g_base,
                                       const std::vector<SpsdPoint>& items);

std::vector<SpsdTangent> log_at(const SpsdPoint& base,
                                const std::vector<SpsdPoint>& items);
std::vector<SpsdTangent> log_at_serial(const SpsdPoint& base,
                                       const std::vector<SpsdPoint>& items);

std::vector<SpsdPoint> apply_transport(const SpsdTransport& transport,
                                       const std::vector<SpsdPoint>& items);
std::vector<SpsdPoint> apply_transport_serial(
    const SpsdTransport& transport, const std::vector<SpsdPoint>& items);

std::vector<Matrix> compose(const std::vector<SpsdPoint>& items);
std::vector<Matrix> compose_serial(const std::vector<SpsdPoint>& items);

// Full symmetric matrix of curve lengths.
Matrix pairwise_curve_length(const std::vector<SpsdPoint>& items,
                             const SpsdMetricConfig& cfg = {});
Matrix pairwise_curve_length_serial(const std::vector<SpsdPoint>& items,
                                    const SpsdMetricConfig& cfg = {});

}  // namespace spsdgeo::batch
