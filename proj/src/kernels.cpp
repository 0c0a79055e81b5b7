#include "pbr/kernels.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "pbr/error.hpp"
#include "pbr/parallel.hpp"

namespace pbr {

KernelSpec KernelSpec::linear() {
  KernelSpec s;
  s.kind = Kind::Linear;
  return s;
}

KernelSpec KernelSpec::polynomial(int degree) {
  if (degree < 1 || degree > 5) {
    raise(ErrorCode::InvalidArgument, "polynomial degree must be in 1..5");
  }
  KernelSpec s;
  s.kind = Kind::Polynomial;
  s.degree = degree;
  s.coef = 1.0;
  return s;
}

KernelSpec KernelSpec::distance_rbf(MeasureId measure, double gamma) {
  if (!(gamma > 0.0)) {
    raise(ErrorCode::InvalidArgument, "gamma must be positive");
  }
  KernelSpec s;
  s.kind = Kind::DistanceRbf;
  s.measure = measure;
  s.gamma = gamma;
  return s;
}

std::string KernelSpec::describe() const {
  switch (kind) {
    case Kind::Linear: return "linear";
    case Kind::Polynomial: return "poly(d=" + std::to_string(degree) + ")";
    case Kind::DistanceRbf:
      return measure_name(measure) + "-rbf(gamma=" + std::to_string(gamma) + ")";
  }
  return "?";
}

namespace {

double dot(const FeatureVector& x, const FeatureVector& y) {
  validate_pair(x, y);
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += x[i] * y[i];
  return d;
}

}  // namespace

double kernel_value(const KernelSpec& spec, const FeatureVector& x, const FeatureVector& y) {
  switch (spec.kind) {
    case KernelSpec::Kind::Linear:
      return dot(x, y);
    case KernelSpec::Kind::Polynomial: {
      double base = dot(x, y) + spec.coef;
      double v = 1.0;
      for (int i = 0; i < spec.degree; ++i) v *= base;
      return v;
    }
    case KernelSpec::Kind::DistanceRbf: {
      const double d = evaluate(spec.measure, x, y);
      if (is_infinite_distance(d)) return 0.0;
      return std::exp(-spec.gamma * d);
    }
  }
  raise(ErrorCode::InvalidArgument, "unknown kernel kind");
}

GramMatrix::GramMatrix(std::size_t rows, std::size_t cols, KernelSpec spec)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0), spec_(spec) {}

GramMatrix gram(const KernelSpec& spec, const Dataset& row_data, const Dataset& col_data,
                unsigned threads) {
  if (row_data.dimension() != col_data.dimension()) {
    raise(ErrorCode::DimensionMismatch, "row and column datasets differ in dimension");
  }
  GramMatrix g(row_data.size(), col_data.size(), spec);
  parallel_for(row_data.size(), threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < col_data.size(); ++j) {
      g.at(i, j) = kernel_value(spec, row_data.vector(i), col_data.vector(j));
    }
  });
  return g;
}

GramMatrix gram(const KernelSpec& spec, const Dataset& data, unsigned threads) {
  GramMatrix g(data.size(), data.size(), spec);
  parallel_for(data.size(), threads, [&](std::size_t i) {
    for (std::size_t j = i; j < data.size(); ++j) {
      const double v = kernel_value(spec, data.vector(i), data.vector(j));
      g.at(i, j) = v;
      g.at(j, i) = v;
    }
  });
  return g;
}

namespace {

/// In-place lower Cholesky; true iff every pivot is strictly positive.
bool cholesky(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) return false;
    const double root = std::sqrt(d);
    a[j * n + j] = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / root;
    }
  }
  return true;
}

/// True iff (a - sigma I) admits a Cholesky factorization, i.e. sigma is
/// strictly below the smallest eigenvalue.
bool shifted_is_pd(const std::vector<double>& a, std::size_t n, double sigma) {
  std::vector<double> work = a;
  for (std::size_t i = 0; i < n; ++i) work[i * n + i] -= sigma;
  return cholesky(work, n);
}

/// Smallest eigenvalue by bisection on the shift, using the same
/// factorization the PD verdict rests on. Gershgorin discs bound the search.
double smallest_eigenvalue(const std::vector<double>& a, std::size_t n) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) radius += std::abs(a[i * n + j]);
    }
    lo = std::min(lo, a[i * n + i] - radius);
    hi = std::min(hi, a[i * n + i]);  // lambda_min never exceeds the least diagonal
  }
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  lo -= 1e-12 * scale;
  hi += 1e-12 * scale;
  for (int iter = 0; iter < 200 && hi - lo > 1e-12 * scale; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (shifted_is_pd(a, n, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PdReport check_pd(const GramMatrix& g) {
  if (g.rows() != g.cols()) {
    raise(ErrorCode::NotSquare, "PD check needs a square matrix");
  }
  const std::size_t n = g.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(g.at(i, j) - g.at(j, i)) > 1e-10) {
        raise(ErrorCode::NotSymmetric, "matrix asymmetry exceeds 1e-10");
      }
    }
  }

  PdReport report;
  std::vector<double> work = g.values();
  report.is_pd = cholesky(work, n);
  report.min_eigenvalue_estimate = smallest_eigenvalue(g.values(), n);
  return report;
}

namespace {

constexpr char kGramMagic[4] = {'P', 'B', 'R', 'G'};
constexpr std::uint32_t kGramVersion = 1;

template <typename T>
void write_le(std::ofstream& out, T value) {
  // target is little-endian; byte order pinned by the format contract
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

}  // namespace

void save_gram(const GramMatrix& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot open " + path + " for writing");
  out.write(kGramMagic, 4);
  write_le<std::uint32_t>(out, kGramVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.rows()));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.cols()));
  const KernelSpec& s = g.spec();
  write_le<std::uint8_t>(out, static_cast<std::uint8_t>(s.kind));
  switch (s.kind) {
    case KernelSpec::Kind::Linear:
      break;
    case KernelSpec::Kind::Polynomial:
      write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.degree));
      write_le<double>(out, s.coef);
      break;
    case KernelSpec::Kind::DistanceRbf:
      write_le<std::uint8_t>(out, static_cast<std::uint8_t>(s.measure));
      write_le<double>(out, s.gamma);
      break;
  }
  for (double v : g.values()) write_le<double>(out, v);
  if (!out) raise(ErrorCode::IoError, "write failed: " + path);
}

GramMatrix load_gram(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kGramMagic, 4) != 0) {
    raise(ErrorCode::ParseError, "bad magic in " + path);
  }
  const auto version = read_le<std::uint32_t>(in);
  if (version != kGramVersion) {
    raise(ErrorCode::ParseError, "unsupported gram file version " + std::to_string(version));
  }
  const auto rows = read_le<std::uint32_t>(in);
  const auto cols = read_le<std::uint32_t>(in);
  KernelSpec spec;
  spec.kind = static_cast<KernelSpec::Kind>(read_le<std::uint8_t>(in));
  switch (spec.kind) {
    case KernelSpec::Kind::Linear:
      break;
    case KernelSpec::Kind::Polynomial:
      spec.degree = static_cast<int>(read_le<std::uint32_t>(in));
      spec.coef = read_le<double>(in);
      break;
    case KernelSpec::Kind::DistanceRbf: {
      spec.measure = static_cast<MeasureId>(read_le<std::uint8_t>(in));
      spec.gamma = read_le<double>(in);
      break;
    }
    default:
      raise(ErrorCode::ParseError, "unknown kernel kind in " + path);
  }
  GramMatrix g(rows, cols, spec);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      g.at(i, j) = read_le<double>(in);
    }
  }
  if (!in) raise(ErrorCode::ParseError, "truncated gram file: " + path);
  return g;
}

}  // namespace pbr
