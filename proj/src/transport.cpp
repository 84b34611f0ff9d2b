#include "spsdgeo/transport.hpp"

#include <cmath>

#include "spsdgeo/batch.hpp"
#include "spsdgeo/errors.hpp"
#include "spsdgeo/grassmann.hpp"
#include "spsdgeo/rng.hpp"
#include "spsdgeo/spd.hpp"

namespace spsdgeo {

namespace {

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

SpdTransport build_spd_transport(const Matrix& pbar, const Matrix& rbar) {
  SpdTransport out;
  out.source_mean = pbar;
  out.target_mean = rbar;
  out.factor = spd_congruence_factor(pbar, rbar);
  return out;
}

Matrix spd_gamma_plus(const SpdTransport& transport, const Matrix& p) {
  if (p.rows() != transport.factor.rows() || p.cols() != p.rows())
    throw DimensionMismatch("spd_gamma_plus: dimension mismatch");
  return symmetrize(transport.factor * p * transport.factor.transpose());
}

GrassTransport build_grass_transport(const Matrix& gbar, const Matrix& vbar) {
  if (gbar.rows() != vbar.rows() || gbar.cols() != vbar.cols())
    throw DimensionMismatch("build_grass_transport: frame mismatch");
  GrassTransport out;
  out.qbar = orth_complete(gbar);
  // Any completion of vbar serves as the log target; the exp then lands on
  // the completion aligned to qbar, with vbar itself in the leading columns.
  const Matrix b0 = grass_log_full(out.qbar, orth_complete(vbar));
  out.obar = grass_exp_full(out.qbar, b0);
  return out;
}

Matrix grass_gamma_plus(const GrassTransport& transport, const Matrix& g) {
  if (g.rows() != transport.qbar.q.rows())
    throw DimensionMismatch("grass_gamma_plus: dimension mismatch");
  return transport.rotation() * g;
}

SpsdTransport build_spsd_transport(const SpsdPoint& source_mean,
                                   const Matrix& target_mean_matrix,
                                   const DaConfig& cfg) {
  const int r = source_mean.rank();
  const SpsdPoint target_raw =
      cfg.force_rank ? spsd_factor_truncated(target_mean_matrix, r)
                     : spsd_factor(target_mean_matrix, r);

  SpsdTransport out;
  out.source_frame = source_mean.frame;
  out.source_core = source_mean.core;
  out.target_frame = grass_project(source_mean.frame, target_raw.frame);
  out.target_core = symmetrize(out.target_frame.transpose() *
                               target_mean_matrix * out.target_frame);

  const GrassTransport rot =
      build_grass_transport(out.source_frame, out.target_frame);
  out.rotation = rot.rotation();
  out.core_factor = spd_congruence_factor(out.source_core, out.target_core);
  return out;
}

SpsdPoint apply_spsd_transport(const SpsdTransport& transport,
                               const SpsdPoint& canonical_item) {
  if (canonical_item.dim() != transport.dim() ||
      canonical_item.rank() != transport.rank())
    throw DimensionMismatch("apply_spsd_transport: dimension mismatch");
  const Matrix projected =
      grass_project(transport.source_frame, canonical_item.frame);
  const double tol =
      1e-6 * std::sqrt(static_cast<double>(canonical_item.rank()));
  if ((projected - canonical_item.frame).norm() > tol)
    throw NotAligned("apply_spsd_transport: item is not canonically aligned");

  SpsdPoint out;
  out.frame = transport.rotation * canonical_item.frame;
  out.core = symmetrize(transport.core_factor * canonical_item.core *
                        transport.core_factor.transpose());
  return out;
}

namespace {

std::vector<SpsdPoint> subsample_items(const std::vector<SpsdPoint>& items,
                                       std::optional<int> cap, Rng& rng) {
  if (!cap || static_cast<std::size_t>(*cap) >= items.size()) return items;
  const auto idx = rng.sample_without_replacement(
      items.size(), static_cast<std::size_t>(*cap));
  std::vector<SpsdPoint> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(items[i]);
  return out;
}

}  // namespace

DaResult da_adapt(const std::vector<Matrix>& source,
                  const std::vector<Matrix>& target, const DaConfig& cfg) {
  if (source.empty() || target.empty())
    throw EmptySet("da_adapt: both sets must be nonempty");
  if (cfg.mean_subsample && *cfg.mean_subsample < 2)
    throw ConfigError("da_adapt: mean_subsample must be at least 2");

  const std::vector<SpsdPoint> source_points =
      batch::factor(source, cfg.rank, cfg.force_rank);
  const std::vector<SpsdPoint> target_points =
      batch::factor(target, cfg.rank, cfg.force_rank);

  // The subsample draw order is fixed: source indices first, then target.
  Rng rng(cfg.seed);
  const std::vector<SpsdPoint> source_mean_items =
      subsample_items(source_points, cfg.mean_subsample, rng);
  const std::vector<SpsdPoint> target_mean_items =
      subsample_items(target_points, cfg.mean_subsample, rng);

  DaResult result;
  const CanonicalSet source_canon = spsd_canonicalize(
      source_mean_items, cfg.mean, &result.diagnostics.source_mean);

  std::vector<SpsdPoint> aligned =
      source_mean_items.size() == source_points.size()
          ? source_canon.items
          : batch::align_to(source_canon.mean_frame, source_points);

  const SpsdPoint target_mean = spsd_mean(target_mean_items, cfg.mean,
                                          &result.diagnostics.target_mean);

  result.transport = build_spsd_transport(source_canon.mean(),
                                          spsd_compose(target_mean), cfg);
  const std::vector<SpsdPoint> moved =
      batch::apply_transport(result.transport, aligned);
  result.adapted = batch::compose(moved);
  return result;
}

Matrix da_oos(const SpsdTransport& transport, const Matrix& x_star,
              bool force_rank) {
  const SpsdPoint point = force_rank
                              ? spsd_factor_truncated(x_star, transport.rank())
                              : spsd_factor(x_star, transport.rank());
  const SpsdPoint aligned = align_to_frame(transport.source_frame, point);
  return spsd_compose(apply_spsd_transport(transport, aligned));
}

std::vector<std::vector<Matrix>> da_multi(
    const std::vector<std::vector<Matrix>>& sets, int reference_index,
    const DaConfig& cfg) {
  if (sets.size() < 2) throw ConfigError("da_multi: need at least two sets");
  if (reference_index < 0 ||
      reference_index >= static_cast<int>(sets.size()))
    throw IndexOutOfRange("da_multi: reference index out of range");

  std::vector<std::vector<Matrix>> out(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (static_cast<int>(i) == reference_index)
      out[i] = sets[i];
    else
      out[i] = da_adapt(sets[i], sets[reference_index], cfg).adapted;
  }
  return out;
}

}  // namespace spsdgeo
