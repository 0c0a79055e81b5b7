#include "pbr/dataio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "pbr/error.hpp"
#include "pbr/rng.hpp"

namespace pbr {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, std::size_t line_no) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    raise(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad number '" + text + "'",
          static_cast<long>(line_no));
  }
  return value;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) {
    raise(ErrorCode::ParseError, "empty file: " + path, 1);
  }
  const auto header = split_csv_line(strip_cr(line));
  if (header.size() < 3 || header[0] != "label") {
    raise(ErrorCode::ParseError, "line 1: header must be label,f0,f1,...", 1);
  }
  const std::size_t dim = header.size() - 1;

  std::vector<FeatureVector> vectors;
  std::vector<int> labels;
  std::map<std::string, int> ids;       // label string -> id, by first appearance
  std::map<int, std::string> names;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != dim + 1) {
      raise(ErrorCode::ParseError,
            "line " + std::to_string(line_no) + ": expected " + std::to_string(dim + 1) +
                " fields, got " + std::to_string(fields.size()),
            static_cast<long>(line_no));
    }
    std::vector<double> values(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      values[c] = parse_double(fields[c + 1], line_no);
      if (values[c] < 0.0) {
        raise(ErrorCode::NegativeElement,
              "line " + std::to_string(line_no) + ": negative feature value " + fields[c + 1],
              static_cast<long>(line_no));
      }
    }
    const auto [it, inserted] = ids.emplace(fields[0], static_cast<int>(ids.size()));
    if (inserted) names[it->second] = fields[0];
    labels.push_back(it->second);
    vectors.emplace_back(std::move(values));
  }
  if (vectors.empty()) {
    raise(ErrorCode::ParseError, "no data rows in " + path, static_cast<long>(line_no));
  }
  return Dataset(std::move(vectors), std::move(labels), std::move(names));
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << "label";
  for (std::size_t c = 0; c < data.dimension(); ++c) out << ",f" << c;
  out << "\n";
  char buffer[64];
  for (std::size_t r = 0; r < data.size(); ++r) {
    out << data.class_names().at(data.label(r));
    for (std::size_t c = 0; c < data.dimension(); ++c) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", data.vector(r)[c]);
      out << ',' << buffer;
    }
    out << "\n";
  }
  if (!out) raise(ErrorCode::IoError, "write failed: " + path);
}

namespace {

constexpr char kFeatureMagic[4] = {'P', 'B', 'R', 'F'};
constexpr std::uint32_t kFeatureVersion = 1;

template <typename T>
void write_le(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

}  // namespace

void save_features_binary(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot open " + path + " for writing");
  out.write(kFeatureMagic, 4);
  write_le<std::uint32_t>(out, kFeatureVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.dimension()));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.size()));
  write_le<std::uint8_t>(out, 1);  // labels present
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t c = 0; c < data.dimension(); ++c) write_le<double>(out, data.vector(r)[c]);
  }
  for (std::size_t r = 0; r < data.size(); ++r) {
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.label(r)));
  }
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.class_names().size()));
  for (const auto& [id, name] : data.class_names()) {
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(id));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  if (!out) raise(ErrorCode::IoError, "write failed: " + path);
}

Dataset load_features_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kFeatureMagic, 4) != 0) {
    raise(ErrorCode::ParseError, "bad magic in " + path);
  }
  if (read_le<std::uint32_t>(in) != kFeatureVersion) {
    raise(ErrorCode::ParseError, "unsupported feature file version");
  }
  const auto dim = read_le<std::uint32_t>(in);
  const auto count = read_le<std::uint32_t>(in);
  const auto has_labels = read_le<std::uint8_t>(in);
  std::vector<FeatureVector> vectors;
  vectors.reserve(count);
  for (std::uint32_t r = 0; r < count; ++r) {
    std::vector<double> values(dim);
    for (auto& v : values) v = read_le<double>(in);
    vectors.emplace_back(std::move(values));
  }
  std::vector<int> labels(count, 0);
  std::map<int, std::string> names;
  if (has_labels) {
    for (auto& l : labels) l = static_cast<int>(read_le<std::uint32_t>(in));
    const auto classes = read_le<std::uint32_t>(in);
    for (std::uint32_t c = 0; c < classes; ++c) {
      const auto id = read_le<std::uint32_t>(in);
      const auto len = read_le<std::uint32_t>(in);
      std::string name(len, '\0');
      in.read(name.data(), static_cast<std::streamsize>(len));
      names[static_cast<int>(id)] = std::move(name);
    }
  } else {
    names[0] = "unlabelled";
  }
  if (!in) raise(ErrorCode::ParseError, "truncated feature file: " + path);
  return Dataset(std::move(vectors), std::move(labels), std::move(names));
}

std::vector<std::vector<double>> load_columns_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) raise(ErrorCode::ParseError, "empty file: " + path, 1);
  const auto header = split_csv_line(strip_cr(line));
  if (header.empty()) raise(ErrorCode::ParseError, "no columns in " + path, 1);
  std::vector<std::vector<double>> columns(header.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != columns.size()) {
      raise(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": ragged row",
            static_cast<long>(line_no));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      columns[c].push_back(parse_double(fields[c], line_no));
    }
  }
  return columns;
}

Dataset synth_dirichlet(int classes, int dims, int per_class, double concentration,
                        double separation, std::uint64_t seed) {
  if (classes < 2) raise(ErrorCode::InvalidArgument, "need at least 2 classes");
  if (dims < 2) raise(ErrorCode::InvalidArgument, "need dimension >= 2");
  if (per_class < 1) raise(ErrorCode::InvalidArgument, "need per_class >= 1");
  if (!(concentration > 0.0)) raise(ErrorCode::InvalidArgument, "concentration must be positive");
  if (separation < 0.0) raise(ErrorCode::InvalidArgument, "separation must be non-negative");

  Rng center_rng(mix_seed(seed, 0xC3A7ULL));
  const std::vector<double> flat_alpha(static_cast<std::size_t>(dims), 1.0);
  const double uniform = 1.0 / static_cast<double>(dims);

  std::vector<FeatureVector> vectors;
  std::vector<int> labels;
  std::map<int, std::string> names;
  vectors.reserve(static_cast<std::size_t>(classes) * per_class);

  for (int c = 0; c < classes; ++c) {
    names[c] = "class_" + std::to_string(c);
    std::vector<double> center = center_rng.dirichlet(flat_alpha);
    double total = 0.0;
    for (double& v : center) {
      v = std::max(0.0, uniform + separation * (v - uniform));
      total += v;
    }
    for (double& v : center) v /= total;

    std::vector<double> alpha(center.size());
    for (std::size_t k = 0; k < center.size(); ++k) alpha[k] = concentration * center[k];

    Rng sample_rng(mix_seed(seed, 0x5A17ULL + static_cast<std::uint64_t>(c)));
    for (int s = 0; s < per_class; ++s) {
      std::vector<double> v = sample_rng.dirichlet(alpha);
      vectors.push_back(FeatureVector(std::move(v), true));
      labels.push_back(c);
    }
  }
  return Dataset(std::move(vectors), std::move(labels), std::move(names));
}

std::array<FeatureVector, 3> toy_fixture() {
  return {normalize(FeatureVector({1, 15, 24, 32, 2})),
          normalize(FeatureVector({3, 15, 26, 33, 52})),
          normalize(FeatureVector({20, 20, 20, 20, 20}))};
}

std::array<FeatureVector, 3> semimetric_witness() {
  return {FeatureVector({1.0, 0.0}, true), FeatureVector({0.5, 0.5}, true),
          FeatureVector({0.0, 1.0}, true)};
}

}  // namespace pbr
