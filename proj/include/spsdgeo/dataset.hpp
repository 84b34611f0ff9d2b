#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spsdgeo/matrix_set.hpp"
#include "spsdgeo/transport.hpp"
#include "spsdgeo/types.hpp"

namespace spsdgeo {

// Dataset container: a JSON manifest (schema_version 1) with the payload
// either inline as nested arrays or in a little-endian float64 sidecar file
// referenced by byte offsets. Matrices are row-major in the binary payload;
// a factored item stores G (d-by-r) then P (r-by-r).

enum class PayloadMode { Inline, Binary };

void write_dataset(const MatrixSet& set, const std::filesystem::path& path,
                   MatrixSet::Storage storage,
                   PayloadMode payload = PayloadMode::Inline);

// Writes in the set's own storage form.
void write_dataset(const MatrixSet& set, const std::filesystem::path& path,
                   PayloadMode payload = PayloadMode::Inline);

// Reads and validates a dataset. Shape mismatches and violated frame/core
// invariants are reported with the offending item index.
MatrixSet read_dataset(const std::filesystem::path& path);

void write_transport(const SpsdTransport& transport,
                     const std::filesystem::path& path);
SpsdTransport read_transport(const std::filesystem::path& path);

// CSV helpers. Exports carry a header row, comma separators, LF endings,
// and floats with 17 significant digits.
std::string format_double(double value);

struct FeatureTable {
  std::vector<int> set_ids;              // empty when the column is absent
  std::optional<std::vector<int>> labels;
  Matrix features;
};

void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<int>& set_ids,
                       const std::optional<std::vector<int>>& labels,
                       const Matrix& features);
FeatureTable read_feature_csv(const std::filesystem::path& path);

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::string& column_prefix);

// Pixel table: optional leading "label" column, remaining columns numeric.
struct PixelTable {
  std::optional<std::vector<int>> labels;
  Matrix pixels;
};
PixelTable read_pixel_csv(const std::filesystem::path& path);
void write_pixel_csv(const std::filesystem::path& path,
                     const std::optional<std::vector<int>>& labels,
                     const Matrix& pixels);

}  // namespace spsdgeo
