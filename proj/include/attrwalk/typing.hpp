#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <type_traits>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "attrwalk/error.hpp"
#include "attrwalk/features.hpp"
#include "attrwalk/matrix.hpp"
#include "attrwalk/rng.hpp"

namespace attrwalk {

using TypeId = std::int32_t;

enum class TypeMapKind { log_binning, kmeans, identity };

inline const char* to_string(TypeMapKind k) {
  switch (k) {
    case TypeMapKind::log_binning: return "log_binning";
    case TypeMapKind::kmeans: return "kmeans";
    case TypeMapKind::identity: return "identity";
  }
  return "unknown";
}

// The fitted function phi mapping an attribute vector to a discrete type.
// Fit-time state is frozen so the identical function can be replayed on
// attribute matrices from graphs never seen at fit time.
struct TypeMap {
  TypeMapKind kind = TypeMapKind::log_binning;
  TypeId num_types = 0;
  std::size_t num_columns = 0;
  std::vector<std::string> column_names;
  std::uint64_t seed = 0;

  // log_binning
  double alpha = 2.0;
  int bins = 8;
  std::vector<double> shifts;              // added per column before binning
  std::vector<std::int64_t> observed_raw;  // sorted; dense id = rank in this list

  // kmeans
  std::vector<int> log_transform;  // per-column flag
  std::vector<double> col_means;
  std::vector<double> col_stds;
  Matrix centroids;  // num_types x num_columns, in transformed space
};

struct TypeAssignment {
  std::vector<TypeId> types;
  TypeId num_types = 0;
};

struct KmeansFitInfo {
  std::vector<double> objective_history;  // sum of squared distances after each assignment step
  std::vector<TypeId> final_assignment;
  std::vector<std::string> warnings;
};

namespace detail {

inline int log_bin(double value, double alpha, int bins) {
  if (value < 0) value = 0;  // below fit-time range
  const int b = static_cast<int>(std::floor(std::log1p(value) / std::log(alpha)));
  return std::min(std::max(b, 0), bins - 1);
}

inline std::int64_t raw_type_id(const std::vector<int>& bin_digits, int bins) {
  std::int64_t id = 0;
  for (int d : bin_digits) id = id * bins + d;
  return id;
}

inline std::vector<int> decode_raw_id(std::int64_t raw, std::size_t k, int bins) {
  std::vector<int> digits(k, 0);
  for (std::size_t i = k; i-- > 0;) {
    digits[i] = static_cast<int>(raw % bins);
    raw /= bins;
  }
  return digits;
}

inline void check_finite(const Matrix& x) {
  for (double v : x.data())
    if (!std::isfinite(v)) fail(ErrorKind::data, "attribute matrix contains a non-finite value");
}

inline std::vector<int> bin_row(const TypeMap& phi, std::span<const double> row) {
  std::vector<int> digits(phi.num_columns);
  for (std::size_t c = 0; c < phi.num_columns; ++c)
    digits[c] = log_bin(row[c] + phi.shifts[c], phi.alpha, phi.bins);
  return digits;
}

inline void check_schema(const TypeMap& phi, const AttributeMatrix& x) {
  if (x.cols() != phi.num_columns)
    fail(ErrorKind::schema, "attribute matrix has " + std::to_string(x.cols()) +
                                " columns, type map expects " + std::to_string(phi.num_columns));
  if (x.column_names != phi.column_names)
    fail(ErrorKind::schema, "attribute column names differ from the ones the type map was fit on");
}

inline std::vector<double> transform_row(const TypeMap& phi, std::span<const double> row) {
  std::vector<double> t(phi.num_columns);
  for (std::size_t c = 0; c < phi.num_columns; ++c) {
    double v = row[c];
    if (phi.log_transform[c]) v = std::log1p(std::max(v, 0.0));
    t[c] = (v - phi.col_means[c]) / phi.col_stds[c];
  }
  return t;
}

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline TypeId nearest_centroid(const Matrix& centroids, std::span<const double> point) {
  TypeId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < centroids.rows(); ++t) {
    const double d = sq_dist(centroids.row(t), point);
    if (d < best_d) {  // strict: ties keep the lowest index
      best_d = d;
      best = static_cast<TypeId>(t);
    }
  }
  return best;
}

}  // namespace detail

// Logarithmic binning: bin(v) = min(floor(log_alpha(1+v)), B-1) per column,
// combined into a mixed-radix id (first column most significant), then densely
// re-indexed over the combinations observed in the fit data.
inline TypeMap fit_log_binning(const AttributeMatrix& x, int bins_per_column, double alpha) {
  if (bins_per_column < 1) fail(ErrorKind::config, "bins_per_column must be >= 1");
  if (!(alpha > 1.0)) fail(ErrorKind::config, "alpha must be > 1");
  if (x.rows() == 0 || x.cols() == 0) fail(ErrorKind::input, "empty attribute matrix");
  if (static_cast<double>(x.cols()) * std::log2(static_cast<double>(bins_per_column)) > 62.0)
    fail(ErrorKind::config, "bins^columns exceeds the raw id range");
  detail::check_finite(x.values);

  TypeMap phi;
  phi.kind = TypeMapKind::log_binning;
  phi.num_columns = x.cols();
  phi.column_names = x.column_names;
  phi.alpha = alpha;
  phi.bins = bins_per_column;
  phi.shifts.assign(x.cols(), 0.0);
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double min_v = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) min_v = std::min(min_v, x.values(i, c));
    if (min_v < 0.0) phi.shifts[c] = -min_v;
  }

  std::unordered_set<std::int64_t> raw_ids;
  for (std::size_t i = 0; i < x.rows(); ++i)
    raw_ids.insert(detail::raw_type_id(detail::bin_row(phi, x.values.row(i)), phi.bins));
  phi.observed_raw.assign(raw_ids.begin(), raw_ids.end());
  std::sort(phi.observed_raw.begin(), phi.observed_raw.end());
  phi.num_types = static_cast<TypeId>(phi.observed_raw.size());
  return phi;
}

// K-means on log1p + z-scored columns (statistics frozen at fit time),
// k-means++ initialization, Lloyd iterations with deterministic tie-breaking.
inline TypeMap fit_kmeans(const AttributeMatrix& x, TypeId target_types, std::uint64_t seed,
                          int max_iters = 100, double tol = 1e-6, KmeansFitInfo* info = nullptr) {
  const std::size_t n = x.rows();
  const std::size_t k = x.cols();
  if (n == 0 || k == 0) fail(ErrorKind::input, "empty attribute matrix");
  if (target_types < 1) fail(ErrorKind::config, "type count must be >= 1");
  if (static_cast<std::size_t>(target_types) > n)
    fail(ErrorKind::config, "type count " + std::to_string(target_types) +
                                " exceeds node count " + std::to_string(n));
  if (max_iters < 1) fail(ErrorKind::config, "max_iters must be >= 1");
  detail::check_finite(x.values);

  TypeMap phi;
  phi.kind = TypeMapKind::kmeans;
  phi.num_columns = k;
  phi.column_names = x.column_names;
  phi.seed = seed;
  phi.log_transform.assign(k, 0);
  phi.col_means.assign(k, 0.0);
  phi.col_stds.assign(k, 1.0);
  for (std::size_t c = 0; c < k; ++c) {
    double min_v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) min_v = std::min(min_v, x.values(i, c));
    phi.log_transform[c] = min_v >= 0.0 ? 1 : 0;
  }

  Matrix points(n, k);
  for (std::size_t c = 0; c < k; ++c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double v = x.values(i, c);
      if (phi.log_transform[c]) v = std::log1p(v);
      points(i, c) = v;
      sum += v;
    }
    const double mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (points(i, c) - mean) * (points(i, c) - mean);
    const double std_dev = std::sqrt(var / static_cast<double>(n));
    phi.col_means[c] = mean;
    phi.col_stds[c] = std_dev > 0.0 ? std_dev : 1.0;
    for (std::size_t i = 0; i < n; ++i) points(i, c) = (points(i, c) - phi.col_means[c]) / phi.col_stds[c];
  }

  std::unordered_set<std::string> distinct;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = points.row(i);
    distinct.emplace(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(double));
  }
  TypeId t = target_types;
  if (static_cast<std::size_t>(t) > distinct.size()) {
    t = static_cast<TypeId>(distinct.size());
    if (info)
      info->warnings.push_back("requested " + std::to_string(target_types) +
                               " types but only " + std::to_string(distinct.size()) +
                               " distinct attribute rows; using " + std::to_string(t));
  }

  Rng rng(derive_seed(seed, "kmeans"));
  Matrix centroids(static_cast<std::size_t>(t), k);

  // k-means++ seeding
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  {
    const auto first = static_cast<std::size_t>(rng.next_below(n));
    for (std::size_t c = 0; c < k; ++c) centroids(0, c) = points(first, c);
    for (TypeId j = 1; j < t; ++j) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        d2[i] = std::min(d2[i], detail::sq_dist(points.row(i), centroids.row(static_cast<std::size_t>(j - 1))));
        total += d2[i];
      }
      std::size_t chosen = 0;
      if (total > 0.0) {
        const double r = rng.next_real() * total;
        double acc = 0.0;
        chosen = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          acc += d2[i];
          if (acc > r) {
            chosen = i;
            break;
          }
        }
      } else {
        chosen = static_cast<std::size_t>(rng.next_below(n));
      }
      for (std::size_t c = 0; c < k; ++c) centroids(static_cast<std::size_t>(j), c) = points(chosen, c);
    }
  }

  std::vector<TypeId> assign(n, 0);
  std::vector<std::size_t> counts(static_cast<std::size_t>(t), 0);
  for (int iter = 0; iter < max_iters; ++iter) {
    double objective = 0.0;
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      assign[i] = detail::nearest_centroid(centroids, points.row(i));
      counts[static_cast<std::size_t>(assign[i])]++;
      objective += detail::sq_dist(points.row(i), centroids.row(static_cast<std::size_t>(assign[i])));
    }
    if (info) info->objective_history.push_back(objective);

    // reseed empty clusters to the point farthest from its centroid
    std::vector<bool> used(n, false);
    for (TypeId j = 0; j < t; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        const double d = detail::sq_dist(points.row(i), centroids.row(static_cast<std::size_t>(assign[i])));
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      used[far] = true;
      for (std::size_t c = 0; c < k; ++c) centroids(static_cast<std::size_t>(j), c) = points(far, c);
    }

    Matrix sums(static_cast<std::size_t>(t), k);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = static_cast<std::size_t>(detail::nearest_centroid(centroids, points.row(i)));
      counts[j]++;
      for (std::size_t c = 0; c < k; ++c) sums(j, c) += points(i, c);
    }
    double shift = 0.0;
    for (TypeId j = 0; j < t; ++j) {
      const auto cj = static_cast<std::size_t>(j);
      if (counts[cj] == 0) continue;
      double move = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        const double next = sums(cj, c) / static_cast<double>(counts[cj]);
        const double d = next - centroids(cj, c);
        move += d * d;
        centroids(cj, c) = next;
      }
      shift = std::max(shift, std::sqrt(move));
    }
    if (shift < tol) break;
  }

  phi.num_types = t;
  phi.centroids = std::move(centroids);
  if (info) {
    info->final_assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      info->final_assignment[i] = detail::nearest_centroid(phi.centroids, points.row(i));
  }
  return phi;
}

// Degenerate phi assigning every row its own type; composing it with walks
// recovers node-identity walks exactly.
inline TypeMap fit_identity(std::size_t num_rows) {
  if (num_rows == 0) fail(ErrorKind::input, "identity type map needs at least one row");
  TypeMap phi;
  phi.kind = TypeMapKind::identity;
  phi.num_types = static_cast<TypeId>(num_rows);
  phi.num_columns = 0;
  return phi;
}

// Applies the fitted phi to any attribute matrix with the fit-time schema.
// Total: every finite row maps to a TypeId in [0, num_types). Bin
// combinations unseen at fit time resolve to the nearest observed combination
// (L1 distance on bin digits, ties to the lowest raw id).
inline TypeAssignment assign_types(const TypeMap& phi, const AttributeMatrix& x) {
  TypeAssignment out;
  out.num_types = phi.num_types;
  out.types.resize(x.rows());

  if (phi.kind == TypeMapKind::identity) {
    if (x.rows() > static_cast<std::size_t>(phi.num_types))
      fail(ErrorKind::schema, "identity type map was fit for " + std::to_string(phi.num_types) +
                                  " rows, got " + std::to_string(x.rows()));
    for (std::size_t i = 0; i < x.rows(); ++i) out.types[i] = static_cast<TypeId>(i);
    return out;
  }

  detail::check_schema(phi, x);
  detail::check_finite(x.values);

  if (phi.kind == TypeMapKind::log_binning) {
    std::unordered_map<std::int64_t, TypeId> memo;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto digits = detail::bin_row(phi, x.values.row(i));
      const std::int64_t raw = detail::raw_type_id(digits, phi.bins);
      auto cached = memo.find(raw);
      if (cached != memo.end()) {
        out.types[i] = cached->second;
        continue;
      }
      auto it = std::lower_bound(phi.observed_raw.begin(), phi.observed_raw.end(), raw);
      TypeId id;
      if (it != phi.observed_raw.end() && *it == raw) {
        id = static_cast<TypeId>(it - phi.observed_raw.begin());
      } else {
        int best_l1 = std::numeric_limits<int>::max();
        std::size_t best = 0;
        for (std::size_t j = 0; j < phi.observed_raw.size(); ++j) {
          const auto obs = detail::decode_raw_id(phi.observed_raw[j], phi.num_columns, phi.bins);
          int l1 = 0;
          for (std::size_t c = 0; c < digits.size(); ++c) l1 += std::abs(digits[c] - obs[c]);
          if (l1 < best_l1) {
            best_l1 = l1;
            best = j;
          }
        }
        id = static_cast<TypeId>(best);
      }
      memo.emplace(raw, id);
      out.types[i] = id;
    }
  } else {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto point = detail::transform_row(phi, x.values.row(i));
      out.types[i] = detail::nearest_centroid(phi.centroids, point);
    }
  }
  return out;
}

inline void save_assignment(const TypeAssignment& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write assignment '" + path + "'");
  out << "num_types=" << a.num_types << '\n';
  for (std::size_t i = 0; i < a.types.size(); ++i) out << i << ' ' << a.types[i] << '\n';
}

inline TypeAssignment load_assignment(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open assignment '" + path + "'");
  TypeAssignment a;
  std::string line;
  if (!std::getline(in, line) || line.rfind("num_types=", 0) != 0)
    fail(ErrorKind::format, "assignment file missing num_types header");
  a.num_types = static_cast<TypeId>(std::stol(line.substr(10)));
  std::size_t expect = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t node = 0;
    std::int64_t type = -1;
    if (!(row >> node >> type) || node != expect || type < 0 || type >= a.num_types)
      fail(ErrorKind::format, "assignment file corrupt at row " + std::to_string(expect));
    a.types.push_back(static_cast<TypeId>(type));
    ++expect;
  }
  return a;
}

namespace detail {

template <typename T>
std::string join_values(const std::vector<T>& values) {
  std::ostringstream out;
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ' ';
    if constexpr (std::is_same_v<T, double>) {
      std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
      out << buf;
    } else {
      out << values[i];
    }
  }
  return out.str();
}

inline std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ',';
    out += names[i];
  }
  return out;
}

class KvReader {
 public:
  explicit KvReader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

  std::string require(const std::string& key) {
    std::string line;
    if (!std::getline(in_, line))
      fail(ErrorKind::format, path_ + ": truncated (expected '" + key + "')");
    if (line.rfind(key + "=", 0) != 0)
      fail(ErrorKind::format, path_ + ": expected '" + key + "=', got '" + line + "'");
    return line.substr(key.size() + 1);
  }

  std::istream& stream() { return in_; }
  const std::string& path() const { return path_; }

 private:
  std::istream& in_;
  std::string path_;
};

}  // namespace detail

// Versioned plain-text round trip; re-applying a loaded map reproduces the
// original assignments bit-exactly.
inline void save_typemap(const TypeMap& phi, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write type map '" + path + "'");
  out << "typemap version=1\n";
  out << "kind=" << to_string(phi.kind) << '\n';
  out << "num_types=" << phi.num_types << '\n';
  out << "num_columns=" << phi.num_columns << '\n';
  out << "columns=" << detail::join_names(phi.column_names) << '\n';
  out << "seed=" << phi.seed << '\n';
  char buf[64];
  if (phi.kind == TypeMapKind::log_binning) {
    std::snprintf(buf, sizeof(buf), "%.17g", phi.alpha);
    out << "alpha=" << buf << '\n';
    out << "bins=" << phi.bins << '\n';
    out << "shifts=" << detail::join_values(phi.shifts) << '\n';
    out << "observed=" << phi.observed_raw.size() << '\n';
    for (auto raw : phi.observed_raw) out << raw << '\n';
  } else if (phi.kind == TypeMapKind::kmeans) {
    out << "log_transform=" << detail::join_values(phi.log_transform) << '\n';
    out << "means=" << detail::join_values(phi.col_means) << '\n';
    out << "stds=" << detail::join_values(phi.col_stds) << '\n';
    out << "centroids=" << phi.centroids.rows() << ' ' << phi.centroids.cols() << '\n';
    for (std::size_t i = 0; i < phi.centroids.rows(); ++i) {
      for (std::size_t c = 0; c < phi.centroids.cols(); ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", phi.centroids(i, c));
        out << (c ? " " : "") << buf;
      }
      out << '\n';
    }
  }
  out << "end\n";
  if (!out) fail(ErrorKind::io, "short write to '" + path + "'");
}

inline TypeMap load_typemap(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open type map '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::format, path + ": empty file");
  if (line.rfind("typemap version=", 0) != 0)
    fail(ErrorKind::format, path + ": not a type map file");
  if (line.substr(16) != "1")
    fail(ErrorKind::format, path + ": unsupported typemap version '" + line.substr(16) + "'");

  detail::KvReader kv(in, path);
  TypeMap phi;
  const std::string kind = kv.require("kind");
  if (kind == "log_binning") {
    phi.kind = TypeMapKind::log_binning;
  } else if (kind == "kmeans") {
    phi.kind = TypeMapKind::kmeans;
  } else if (kind == "identity") {
    phi.kind = TypeMapKind::identity;
  } else {
    fail(ErrorKind::format, path + ": unknown kind '" + kind + "'");
  }
  phi.num_types = static_cast<TypeId>(std::stol(kv.require("num_types")));
  phi.num_columns = static_cast<std::size_t>(std::stoul(kv.require("num_columns")));
  {
    const std::string cols = kv.require("columns");
    std::istringstream colstream(cols);
    std::string name;
    while (std::getline(colstream, name, ',')) phi.column_names.push_back(name);
    if (phi.column_names.size() != phi.num_columns)
      fail(ErrorKind::format, path + ": column name count mismatch");
  }
  phi.seed = std::stoull(kv.require("seed"));

  auto parse_doubles = [&](const std::string& text, std::size_t count) {
    std::istringstream s(text);
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i)
      if (!(s >> values[i])) fail(ErrorKind::format, path + ": bad numeric list");
    return values;
  };

  if (phi.kind == TypeMapKind::log_binning) {
    phi.alpha = std::stod(kv.require("alpha"));
    phi.bins = std::stoi(kv.require("bins"));
    phi.shifts = parse_doubles(kv.require("shifts"), phi.num_columns);
    const auto count = std::stoul(kv.require("observed"));
    phi.observed_raw.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      if (!std::getline(in, line)) fail(ErrorKind::format, path + ": truncated observed block");
      phi.observed_raw.push_back(std::stoll(line));
    }
    if (!std::is_sorted(phi.observed_raw.begin(), phi.observed_raw.end()))
      fail(ErrorKind::format, path + ": observed ids not sorted");
    if (static_cast<TypeId>(count) != phi.num_types)
      fail(ErrorKind::format, path + ": observed count disagrees with num_types");
  } else if (phi.kind == TypeMapKind::kmeans) {
    const auto flags = parse_doubles(kv.require("log_transform"), phi.num_columns);
    for (double f : flags) phi.log_transform.push_back(f != 0.0 ? 1 : 0);
    phi.col_means = parse_doubles(kv.require("means"), phi.num_columns);
    phi.col_stds = parse_doubles(kv.require("stds"), phi.num_columns);
    std::istringstream dims(kv.require("centroids"));
    std::size_t rows = 0, cols = 0;
    if (!(dims >> rows >> cols) || rows != static_cast<std::size_t>(phi.num_types) ||
        cols != phi.num_columns)
      fail(ErrorKind::format, path + ": bad centroid dimensions");
    phi.centroids = Matrix(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      if (!std::getline(in, line)) fail(ErrorKind::format, path + ": truncated centroid block");
      std::istringstream row(line);
      for (std::size_t c = 0; c < cols; ++c)
        if (!(row >> phi.centroids(i, c))) fail(ErrorKind::format, path + ": bad centroid row");
    }
  }

  if (!std::getline(in, line) || line != "end")
    fail(ErrorKind::format, path + ": truncated (missing end marker)");
  return phi;
}

}  // namespace attrwalk
