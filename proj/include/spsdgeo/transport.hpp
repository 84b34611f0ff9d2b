#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spsdgeo/spsd.hpp"
#include "spsdgeo/types.hpp"

namespace spsdgeo {

// Mean-to-mean transport maps. Each map moves a whole set from its Frechet
// mean to a target mean: log at the source mean, parallel transport, exp at
// the target mean. On the SPD and Grassmann manifolds this collapses to a
// single congruence / rotation applied to every point.

struct SpdTransport {
  Matrix source_mean;
  Matrix target_mean;
  Matrix factor;  // E with E source_mean E^T = target_mean
};

SpdTransport build_spd_transport(const Matrix& pbar, const Matrix& rbar);
Matrix spd_gamma_plus(const SpdTransport& transport, const Matrix& p);

// Rotation carrying [Gbar] onto [Vbar]; Vbar must already be the aligned
// representative (Vbar = projection of Vbar onto the fiber over Gbar).
struct GrassTransport {
  OrthFrame qbar;  // completion of the source mean frame
  OrthFrame obar;  // completion of the target mean frame, aligned to qbar

  Matrix rotation() const { return obar.q * qbar.q.transpose(); }
};

GrassTransport build_grass_transport(const Matrix& gbar, const Matrix& vbar);
Matrix grass_gamma_plus(const GrassTransport& transport, const Matrix& g);

// Transport on the structure space: rotate frames, congruence-map cores.
struct SpsdTransport {
  Matrix source_frame;  // Gbar
  Matrix source_core;   // Pbar
  Matrix target_frame;  // Vbar, aligned to Gbar
  Matrix target_core;   // Rbar
  Matrix rotation;      // d-by-d, carries [Gbar] to [Vbar]
  Matrix core_factor;   // r-by-r E with E Pbar E^T = Rbar

  int dim() const { return static_cast<int>(source_frame.rows()); }
  int rank() const { return static_cast<int>(source_frame.cols()); }
};

struct DaConfig {
  int rank = 1;
  SpsdMetricConfig metric{};
  MeanConfig mean{};
  std::optional<int> mean_subsample;  // cap on matrices used per mean
  std::uint64_t seed = 0;             // drives the subsample draw
  bool force_rank = false;            // truncate instead of rejecting
};

// Builds the frozen transport from the source mean pair to the target mean
// given as a d-by-d SPSD matrix.
SpsdTransport build_spsd_transport(const SpsdPoint& source_mean,
                                   const Matrix& target_mean_matrix,
                                   const DaConfig& cfg);

// Applies the transport to one canonically aligned item.
SpsdPoint apply_spsd_transport(const SpsdTransport& transport,
                               const SpsdPoint& canonical_item);

struct DaDiagnostics {
  SpsdMeanDiagnostics source_mean;
  SpsdMeanDiagnostics target_mean;
};

struct DaResult {
  std::vector<Matrix> adapted;
  SpsdTransport transport;
  DaDiagnostics diagnostics;
};

// Whole-set adaptation: canonicalize the source, estimate both means
// (optionally on a seeded subsample), build the transport, apply it to every
// source item. Labels are never consulted.
DaResult da_adapt(const std::vector<Matrix>& source,
                  const std::vector<Matrix>& target, const DaConfig& cfg);

// Out-of-sample extension with a frozen transport.
Matrix da_oos(const SpsdTransport& transport, const Matrix& x_star,
              bool force_rank = false);

// Adapts every set except the reference to the reference set.
std::vector<std::vector<Matrix>> da_multi(
    const std::vector<std::vector<Matrix>>& sets, int reference_index,
    const DaConfig& cfg);

}  // namespace spsdgeo
