#include "spsdgeo/synth.hpp"

#include <cmath>

#include "spsdgeo/errors.hpp"
#include "spsdgeo/grassmann.hpp"
#include "spsdgeo/sym_eig.hpp"
#include "spsdgeo/rng.hpp"
#include "spsdgeo/spsd.hpp"

namespace spsdgeo {

namespace {

// Class prototypes sit in a geodesic ball around one center frame, the way
// covariance descriptors from one sensor share most of their range; fully
// dispersed subspaces would put the data outside the regime a mean-anchored
// transport can align.
constexpr double kPrototypeSpread = 0.45;  // radians from the center frame
constexpr double kCoreScale = 0.6;         // spread of the prototype cores
constexpr double kCongruenceScale = 0.5;   // spread of the core distortion
constexpr double kRotationAngle = 1.0;     // principal angles moved

// noise_scale is the expected Frobenius norm of each tangent block, not the
// entrywise deviation; otherwise the perturbation would grow with d and r
// and drown the class layout.
SpsdTangent draw_tangent(Rng& rng, const SpsdPoint& base, double scale) {
  const int d = base.dim();
  const int r = base.rank();
  SpsdTangent t;
  const Matrix z = rng.gaussian(d, r);
  const double delta_norm = std::sqrt(static_cast<double>((d - r) * r));
  t.delta = (scale / delta_norm) *
            (z - base.frame * (base.frame.transpose() * z));
  const Matrix s = rng.gaussian(r, r);
  const double sym_norm = std::sqrt(0.5 * r * (r + 1));
  t.sym = (scale / sym_norm) * 0.5 * (s + s.transpose());
  return t;
}

Matrix prototype_frame(Rng& rng, const Matrix& center, double spread) {
  Matrix dir = rng.gaussian(static_cast<int>(center.rows()),
                            static_cast<int>(center.cols()));
  dir -= center * (center.transpose() * dir);
  return grass_exp(center, (spread / dir.norm()) * dir);
}

}  // namespace

void SynthConfig::validate() const {
  if (classes < 2) throw ConfigError("SynthConfig: need at least two classes");
  if (per_class < 2) throw ConfigError("SynthConfig: need at least two items per class");
  if (r < 1 || r >= d) throw ConfigError("SynthConfig: rank must satisfy 1 <= r < d");
  if (noise_scale < 0.0) throw ConfigError("SynthConfig: noise_scale must be nonnegative");
}

SynthData synth_generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  // Draw order is part of the format: center frame, prototypes,
  // distortions, source items, target items.
  const Matrix center = random_frame(rng, cfg.d, cfg.r);
  std::vector<SpsdPoint> prototypes;
  prototypes.reserve(static_cast<std::size_t>(cfg.classes));
  for (int c = 0; c < cfg.classes; ++c) {
    SpsdPoint proto;
    proto.frame = prototype_frame(rng, center, kPrototypeSpread);
    proto.core = random_spd(rng, cfg.r, kCoreScale);
    prototypes.push_back(std::move(proto));
  }

  SynthData out;
  if (cfg.subspace_rotation) {
    // A twist-free rotation: it carries the data center along a Grassmann
    // geodesic without spinning the cluster about it, which is the family
    // a mean-anchored transport can undo.
    const OrthFrame qc = orth_complete(center);
    const Matrix z = rng.gaussian(cfg.d - cfg.r, cfg.r);
    const CompactSvd svd = svd_compact(z);
    // Every principal direction swings by the same angle.
    const Matrix b =
        kRotationAngle * svd.u * svd.v.transpose();
    out.rotation = grass_exp_full(qc, b).q * qc.q.transpose();
  }
  if (cfg.core_congruence)
    out.core_factor = random_spd(rng, cfg.r, kCongruenceScale);

  std::vector<SpsdPoint> source_items;
  std::vector<SpsdPoint> target_items;
  std::vector<int> labels;
  source_items.reserve(static_cast<std::size_t>(cfg.classes) * cfg.per_class);
  target_items.reserve(source_items.capacity());
  labels.reserve(source_items.capacity());
  for (int c = 0; c < cfg.classes; ++c)
    for (int i = 0; i < cfg.per_class; ++i) labels.push_back(c);

  for (int c = 0; c < cfg.classes; ++c)
    for (int i = 0; i < cfg.per_class; ++i)
      source_items.push_back(
          spsd_exp(prototypes[c], draw_tangent(rng, prototypes[c], cfg.noise_scale)));

  for (int c = 0; c < cfg.classes; ++c)
    for (int i = 0; i < cfg.per_class; ++i) {
      SpsdPoint item =
          spsd_exp(prototypes[c], draw_tangent(rng, prototypes[c], cfg.noise_scale));
      if (out.core_factor)
        item.core = ((*out.core_factor) * item.core *
                     out.core_factor->transpose()).eval();
      if (out.rotation) item.frame = ((*out.rotation) * item.frame).eval();
      target_items.push_back(std::move(item));
    }

  out.source = MatrixSet::from_factored(std::move(source_items), labels);
  out.target = MatrixSet::from_factored(std::move(target_items), labels);
  return out;
}

}  // namespace spsdgeo
