#include "spsdgeo/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "spsdgeo/errors.hpp"
#include "spsdgeo/sym_eig.hpp"

namespace spsdgeo {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;
constexpr double kFrameOrthoTol = 1e-10;
constexpr double kSymTol = 1e-12;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, Eigen::Index expect_rows,
                        Eigen::Index expect_cols, const std::string& what) {
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != expect_rows)
    throw ShapeMismatch(what + ": wrong row count");
  Matrix m(expect_rows, expect_cols);
  for (Eigen::Index i = 0; i < expect_rows; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() ||
        static_cast<Eigen::Index>(row.size()) != expect_cols)
      throw ShapeMismatch(what + ": wrong column count");
    for (Eigen::Index j = 0; j < expect_cols; ++j) {
      const json& cell = row[static_cast<std::size_t>(j)];
      if (!cell.is_number()) throw ParseError(what + ": non-numeric entry");
      m(i, j) = cell.get<double>();
    }
  }
  return m;
}

void append_row_major(std::vector<double>& payload, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) payload.push_back(m(i, j));
}

Matrix take_row_major(const std::vector<double>& payload, std::size_t offset,
                      Eigen::Index rows, Eigen::Index cols,
                      const std::string& what) {
  if (offset + static_cast<std::size_t>(rows * cols) > payload.size())
    throw ShapeMismatch(what + ": binary payload too short");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = payload[offset + static_cast<std::size_t>(i * cols + j)];
  return m;
}

void check_symmetric(const Matrix& m, std::size_t index, const char* what) {
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymTol * std::max(scale, 1.0))
    throw InvariantViolation(std::string(what) + " at item " +
                             std::to_string(index) + ": not symmetric");
}

void check_item_invariants(const SpsdPoint& x, std::size_t index) {
  const Matrix gram =
      x.frame.transpose() * x.frame -
      Matrix::Identity(x.frame.cols(), x.frame.cols());
  if (gram.norm() > kFrameOrthoTol)
    throw InvariantViolation("frame at item " + std::to_string(index) +
                             ": columns are not orthonormal");
  check_symmetric(x.core, index, "core");
  SymEig eig = sym_eig(x.core);
  if (eig.values(0) <= 0.0 ||
      eig.values(eig.values.size() - 1) <= kSpdTol * eig.values(0))
    throw InvariantViolation("core at item " + std::to_string(index) +
                             ": not positive definite");
}

std::vector<double> read_binary_payload(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open binary payload " + path.string());
  in.seekg(0, std::ios::end);
  const std::streamoff bytes = in.tellg();
  in.seekg(0, std::ios::beg);
  if (bytes % static_cast<std::streamoff>(sizeof(double)) != 0)
    throw ParseError("binary payload size is not a multiple of 8 bytes");
  std::vector<double> payload(static_cast<std::size_t>(bytes) / sizeof(double));
  in.read(reinterpret_cast<char*>(payload.data()), bytes);
  if (!in) throw IoError("failed reading binary payload " + path.string());
  return payload;
}

}  // namespace

void write_dataset(const MatrixSet& set, const std::filesystem::path& path,
                   MatrixSet::Storage storage, PayloadMode payload_mode) {
  json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["count"] = set.size();
  if (set.labels) manifest["labels"] = *set.labels;

  // Resolve the requested storage against what the set holds.
  std::vector<SpsdPoint> factored;
  std::vector<Matrix> dense;
  int d = set.d;
  int r = set.r;
  if (storage == MatrixSet::Storage::Factored) {
    if (set.storage == MatrixSet::Storage::Factored) {
      factored = set.factored;
    } else {
      if (set.r < 1)
        throw ConfigError("write_dataset: cannot factor dense items without a rank");
      for (const Matrix& m : set.dense) factored.push_back(spsd_factor(m, set.r));
    }
    if (!factored.empty()) {
      d = factored.front().dim();
      r = factored.front().rank();
    }
  } else {
    dense = set.compose_all();
    if (!dense.empty()) d = static_cast<int>(dense.front().rows());
  }

  manifest["d"] = d;
  manifest["r"] = r;
  manifest["storage"] =
      storage == MatrixSet::Storage::Factored ? "factored" : "dense";

  if (payload_mode == PayloadMode::Inline) {
    json data = json::array();
    if (storage == MatrixSet::Storage::Factored) {
      for (const SpsdPoint& x : factored) {
        json item;
        item["G"] = matrix_to_json(x.frame);
        item["P"] = matrix_to_json(x.core);
        data.push_back(std::move(item));
      }
    } else {
      for (const Matrix& m : dense) data.push_back(matrix_to_json(m));
    }
    manifest["data"] = std::move(data);
  } else {
    std::vector<double> payload;
    std::vector<std::size_t> offsets;
    if (storage == MatrixSet::Storage::Factored) {
      for (const SpsdPoint& x : factored) {
        offsets.push_back(payload.size() * sizeof(double));
        append_row_major(payload, x.frame);
        append_row_major(payload, x.core);
      }
    } else {
      for (const Matrix& m : dense) {
        offsets.push_back(payload.size() * sizeof(double));
        append_row_major(payload, m);
      }
    }
    std::filesystem::path bin_path = path;
    bin_path.replace_extension(".bin");
    std::ofstream bin(bin_path, std::ios::binary | std::ios::trunc);
    if (!bin) throw IoError("cannot write " + bin_path.string());
    bin.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(double)));
    if (!bin) throw IoError("failed writing " + bin_path.string());
    manifest["binary_path"] = bin_path.filename().string();
    manifest["offsets"] = offsets;
  }

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << manifest.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path.string());
}

void write_dataset(const MatrixSet& set, const std::filesystem::path& path,
                   PayloadMode payload) {
  write_dataset(set, path, set.storage, payload);
}

MatrixSet read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw ParseError("invalid dataset manifest: " + std::string(e.what()));
  }

  if (!manifest.contains("schema_version") ||
      manifest["schema_version"].get<int>() != kSchemaVersion)
    throw ParseError("unsupported schema_version");
  for (const char* field : {"d", "r", "count", "storage"})
    if (!manifest.contains(field))
      throw ParseError(std::string("manifest is missing field ") + field);

  const int d = manifest["d"].get<int>();
  const int r = manifest["r"].get<int>();
  const std::size_t count = manifest["count"].get<std::size_t>();
  const std::string storage = manifest["storage"].get<std::string>();
  if (storage != "dense" && storage != "factored")
    throw ParseError("unknown storage mode " + storage);
  const bool is_factored = storage == "factored";
  if (d < 1) throw ParseError("manifest d must be positive");
  if (is_factored && (r < 1 || r >= d))
    throw ParseError("manifest r must satisfy 1 <= r < d for factored storage");

  MatrixSet set;
  set.storage =
      is_factored ? MatrixSet::Storage::Factored : MatrixSet::Storage::Dense;
  set.d = d;
  set.r = r;

  if (manifest.contains("labels")) {
    std::vector<int> labels = manifest["labels"].get<std::vector<int>>();
    if (labels.size() != count)
      throw ShapeMismatch("label count differs from item count");
    set.labels = std::move(labels);
  }

  const std::size_t dense_len = static_cast<std::size_t>(d) * d;
  const std::size_t factored_len =
      static_cast<std::size_t>(d) * r + static_cast<std::size_t>(r) * r;

  if (manifest.contains("data")) {
    const json& data = manifest["data"];
    if (!data.is_array() || data.size() != count)
      throw ShapeMismatch("data array length differs from declared count");
    for (std::size_t i = 0; i < count; ++i) {
      const std::string what = "item " + std::to_string(i);
      if (is_factored) {
        const json& item = data[i];
        if (!item.contains("G") || !item.contains("P"))
          throw ParseError(what + ": factored item needs G and P");
        SpsdPoint x;
        x.frame = matrix_from_json(item["G"], d, r, what + " G");
        x.core = matrix_from_json(item["P"], r, r, what + " P");
        set.factored.push_back(std::move(x));
      } else {
        set.dense.push_back(matrix_from_json(data[i], d, d, what));
      }
    }
  } else if (manifest.contains("binary_path")) {
    if (!manifest.contains("offsets"))
      throw ParseError("binary dataset needs offsets");
    const std::vector<std::size_t> offsets =
        manifest["offsets"].get<std::vector<std::size_t>>();
    if (offsets.size() != count)
      throw ShapeMismatch("offset count differs from declared count");
    const std::filesystem::path bin_path =
        path.parent_path() / manifest["binary_path"].get<std::string>();
    const std::vector<double> payload = read_binary_payload(bin_path);
    const std::size_t item_len = is_factored ? factored_len : dense_len;
    for (std::size_t i = 0; i < count; ++i) {
      const std::string what = "item " + std::to_string(i);
      if (offsets[i] % sizeof(double) != 0)
        throw ParseError(what + ": unaligned byte offset");
      const std::size_t base = offsets[i] / sizeof(double);
      if (base + item_len > payload.size())
        throw ShapeMismatch(what + ": offset past end of payload");
      if (is_factored) {
        SpsdPoint x;
        x.frame = take_row_major(payload, base, d, r, what + " G");
        x.core = take_row_major(payload, base + static_cast<std::size_t>(d) * r,
                                r, r, what + " P");
        set.factored.push_back(std::move(x));
      } else {
        set.dense.push_back(take_row_major(payload, base, d, d, what));
      }
    }
  } else {
    throw ParseError("manifest has neither inline data nor binary_path");
  }

  // Validate invariants with the item index in the message.
  if (is_factored) {
    for (std::size_t i = 0; i < set.factored.size(); ++i)
      check_item_invariants(set.factored[i], i);
  } else {
    for (std::size_t i = 0; i < set.dense.size(); ++i)
      check_symmetric(set.dense[i], i, "dense item");
  }
  return set;
}

void write_transport(const SpsdTransport& transport,
                     const std::filesystem::path& path) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "spsd_transport";
  doc["d"] = transport.dim();
  doc["r"] = transport.rank();
  doc["G_bar"] = matrix_to_json(transport.source_frame);
  doc["P_bar"] = matrix_to_json(transport.source_core);
  doc["V_bar"] = matrix_to_json(transport.target_frame);
  doc["R_bar"] = matrix_to_json(transport.target_core);
  doc["rotation"] = matrix_to_json(transport.rotation);
  doc["E"] = matrix_to_json(transport.core_factor);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path.string());
}

SpsdTransport read_transport(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError("invalid transport file: " + std::string(e.what()));
  }
  if (!doc.contains("schema_version") ||
      doc["schema_version"].get<int>() != kSchemaVersion)
    throw ParseError("unsupported schema_version");
  if (!doc.contains("kind") || doc["kind"].get<std::string>() != "spsd_transport")
    throw ParseError("not a transport file");
  const int d = doc["d"].get<int>();
  const int r = doc["r"].get<int>();
  SpsdTransport t;
  t.source_frame = matrix_from_json(doc["G_bar"], d, r, "G_bar");
  t.source_core = matrix_from_json(doc["P_bar"], r, r, "P_bar");
  t.target_frame = matrix_from_json(doc["V_bar"], d, r, "V_bar");
  t.target_core = matrix_from_json(doc["R_bar"], r, r, "R_bar");
  t.rotation = matrix_from_json(doc["rotation"], d, d, "rotation");
  t.core_factor = matrix_from_json(doc["E"], r, r, "E");
  const Matrix gram = t.rotation.transpose() * t.rotation - Matrix::Identity(d, d);
  if (gram.norm() > kFrameOrthoTol)
    throw InvariantViolation("transport rotation is not orthogonal");
  return t;
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  double value = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end)
    throw ParseError(what + ": cannot parse number '" + s + "'");
  return value;
}

int parse_int(const std::string& s, const std::string& what) {
  int value = 0;
  const auto result = std::from_chars(s.data(), s.data() + s.size(), value);
  if (result.ec != std::errc() || result.ptr != s.data() + s.size())
    throw ParseError(what + ": cannot parse integer '" + s + "'");
  return value;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<int>& set_ids,
                       const std::optional<std::vector<int>>& labels,
                       const Matrix& features) {
  const std::size_t n = static_cast<std::size_t>(features.rows());
  if (!set_ids.empty() && set_ids.size() != n)
    throw LengthMismatch("write_feature_csv: set id count mismatch");
  if (labels && labels->size() != n)
    throw LengthMismatch("write_feature_csv: label count mismatch");

  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "set,label";
  for (Eigen::Index j = 0; j < features.cols(); ++j) out << ",c" << (j + 1);
  out << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << (set_ids.empty() ? 0 : set_ids[i]) << ",";
    if (labels) out << (*labels)[i];
    for (Eigen::Index j = 0; j < features.cols(); ++j)
      out << "," << format_double(features(static_cast<Eigen::Index>(i), j));
    out << "\n";
  }
  if (!out) throw IoError("failed writing " + path.string());
}

FeatureTable read_feature_csv(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty CSV " + path.string());
  const std::vector<std::string> header = split_csv_line(lines[0]);

  int set_col = -1;
  int label_col = -1;
  std::vector<int> feature_cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "set")
      set_col = static_cast<int>(j);
    else if (header[j] == "label")
      label_col = static_cast<int>(j);
    else
      feature_cols.push_back(static_cast<int>(j));
  }
  if (feature_cols.empty())
    throw ParseError("CSV has no feature columns: " + path.string());

  FeatureTable table;
  const std::size_t n = lines.size() - 1;
  table.features.resize(static_cast<Eigen::Index>(n),
                        static_cast<Eigen::Index>(feature_cols.size()));
  std::vector<int> labels;
  bool any_label = false;
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<std::string> fields = split_csv_line(lines[i + 1]);
    if (fields.size() != header.size())
      throw ShapeMismatch("CSV row " + std::to_string(i + 1) +
                          " has wrong field count");
    const std::string what = "CSV row " + std::to_string(i + 1);
    if (set_col >= 0)
      table.set_ids.push_back(parse_int(fields[static_cast<std::size_t>(set_col)], what));
    if (label_col >= 0) {
      const std::string& field = fields[static_cast<std::size_t>(label_col)];
      if (field.empty()) {
        labels.push_back(0);
      } else {
        labels.push_back(parse_int(field, what));
        any_label = true;
      }
    }
    for (std::size_t j = 0; j < feature_cols.size(); ++j)
      table.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_double(fields[static_cast<std::size_t>(feature_cols[j])], what);
  }
  if (label_col >= 0 && any_label) table.labels = std::move(labels);
  return table;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::string& column_prefix) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (j > 0) out << ",";
    out << column_prefix << j;
  }
  out << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ",";
      out << format_double(m(i, j));
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing " + path.string());
}

PixelTable read_pixel_csv(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty CSV " + path.string());
  const std::vector<std::string> header = split_csv_line(lines[0]);

  int label_col = -1;
  std::vector<int> value_cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "label")
      label_col = static_cast<int>(j);
    else
      value_cols.push_back(static_cast<int>(j));
  }
  if (value_cols.empty())
    throw ParseError("pixel CSV has no value columns: " + path.string());

  PixelTable table;
  const std::size_t n = lines.size() - 1;
  table.pixels.resize(static_cast<Eigen::Index>(n),
                      static_cast<Eigen::Index>(value_cols.size()));
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<std::string> fields = split_csv_line(lines[i + 1]);
    if (fields.size() != header.size())
      throw ShapeMismatch("CSV row " + std::to_string(i + 1) +
                          " has wrong field count");
    const std::string what = "CSV row " + std::to_string(i + 1);
    if (label_col >= 0)
      labels.push_back(parse_int(fields[static_cast<std::size_t>(label_col)], what));
    for (std::size_t j = 0; j < value_cols.size(); ++j)
      table.pixels(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_double(fields[static_cast<std::size_t>(value_cols[j])], what);
  }
  if (label_col >= 0) table.labels = std::move(labels);
  return table;
}

void write_pixel_csv(const std::filesystem::path& path,
                     const std::optional<std::vector<int>>& labels,
                     const Matrix& pixels) {
  if (labels && labels->size() != static_cast<std::size_t>(pixels.rows()))
    throw LengthMismatch("write_pixel_csv: label count mismatch");
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  if (labels) out << "label,";
  for (Eigen::Index j = 0; j < pixels.cols(); ++j) {
    if (j > 0) out << ",";
    out << "b" << j;
  }
  out << "\n";
  for (Eigen::Index i = 0; i < pixels.rows(); ++i) {
    if (labels) out << (*labels)[static_cast<std::size_t>(i)] << ",";
    for (Eigen::Index j = 0; j < pixels.cols(); ++j) {
      if (j > 0) out << ",";
      out << format_double(pixels(i, j));
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace spsdgeo
