#include "sppll/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sppll/rng.hpp"

namespace sppll {

long long PriorCounts::total() const {
  return std::accumulate(n_p.begin(), n_p.end(), 0LL);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_real(const std::string& tok, int line) {
  double value = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(line, "bad feature value '" + tok + "'");
  }
  return value;
}

int parse_int(const std::string& tok, int line, const char* what) {
  int value = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(line, std::string("bad ") + what + " '" + tok + "'");
  }
  return value;
}

}  // namespace

PartialLabelDataset parse_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::istringstream header(line);
  long long n = -1, d = -1, q = -1;
  if (!(header >> n >> d >> q)) throw ParseError(1, "header must be 'n d q'");
  std::string rest;
  if (header >> rest) throw ParseError(1, "header must be 'n d q'");
  if (n <= 0) throw ParseError(1, "n must be positive");
  if (d <= 0) throw ParseError(1, "d must be positive");
  if (q <= 0) throw ParseError(1, "q must be positive");

  PartialLabelDataset ds;
  ds.q = static_cast<int>(q);
  ds.features.resize(n, d);
  ds.candidates.resize(static_cast<std::size_t>(n));
  std::vector<int> truth;

  for (long long i = 0; i < n; ++i) {
    const int lineno = static_cast<int>(i) + 2;
    if (!std::getline(in, line)) throw ParseError(lineno, "unexpected end of file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto parts = split(line, '|');
    if (parts.size() < 2 || parts.size() > 3) {
      throw ParseError(lineno, "expected 'features|labels' or 'features|labels|truth'");
    }

    const auto feats = split(parts[0], ',');
    if (static_cast<long long>(feats.size()) != d) {
      throw ParseError(lineno, "expected " + std::to_string(d) + " features, got " +
                                   std::to_string(feats.size()));
    }
    for (long long j = 0; j < d; ++j) {
      ds.features(i, j) = parse_real(feats[static_cast<std::size_t>(j)], lineno);
    }

    auto& set = ds.candidates[static_cast<std::size_t>(i)];
    for (const auto& tok : split(parts[1], ',')) {
      const int label = parse_int(tok, lineno, "candidate label");
      if (label < 1 || label > ds.q) {
        throw ParseError(lineno, "candidate label out of range: " + std::to_string(label));
      }
      if (!set.empty() && label <= set.back()) {
        throw ParseError(lineno, "candidate labels must be strictly increasing");
      }
      set.push_back(label);
    }

    const bool has_truth = parts.size() == 3;
    if (i == 0) {
      if (has_truth) truth.reserve(static_cast<std::size_t>(n));
    } else if (has_truth != !truth.empty()) {
      throw ParseError(lineno, "truth field must be present on all lines or none");
    }
    if (has_truth) {
      const int t = parse_int(parts[2], lineno, "true label");
      if (t < 1 || t > ds.q) {
        throw ParseError(lineno, "true label out of range: " + std::to_string(t));
      }
      truth.push_back(t);
    }
  }

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) {
      throw ParseError(static_cast<int>(n) + 2, "unexpected trailing content");
    }
  }

  if (!truth.empty()) ds.truth = std::move(truth);
  validate_or_throw(ds);
  return ds;
}

PartialLabelDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return parse_dataset(in);
}

void write_dataset(const PartialLabelDataset& dataset, std::ostream& out) {
  validate_or_throw(dataset);
  out << dataset.n() << ' ' << dataset.d() << ' ' << dataset.q << '\n';
  char buf[64];
  for (int i = 0; i < dataset.n(); ++i) {
    for (int j = 0; j < dataset.d(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", dataset.features(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '|';
    const auto& set = dataset.candidates[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < set.size(); ++k) {
      if (k) out << ',';
      out << set[k];
    }
    if (dataset.truth) out << '|' << (*dataset.truth)[static_cast<std::size_t>(i)];
    out << '\n';
  }
}

void save_dataset(const PartialLabelDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_dataset(dataset, out);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

PartialLabelDataset corrupt_labels(const PartialLabelDataset& supervised, double p, int r,
                                   std::uint64_t seed) {
  validate_or_throw(supervised);
  if (!supervised.supervised()) {
    throw NotSupervised("corrupt_labels requires singleton candidate sets equal to truth");
  }
  if (r < 0) throw Error("r must be non-negative");
  if (r > supervised.q - 1) throw RTooLarge("r must be <= q-1");
  if (!(p >= 0.0 && p <= 1.0)) throw Error("p must be in [0,1]");

  const int n = supervised.n();
  const int count = static_cast<int>(std::llround(p * n));

  PartialLabelDataset out = supervised;
  std::mt19937_64 rng(seed);

  std::vector<int> chosen = sample_without_replacement(rng, n, count);
  std::sort(chosen.begin(), chosen.end());

  std::vector<int> pool(static_cast<std::size_t>(supervised.q - 1));
  for (int i : chosen) {
    const int t = (*supervised.truth)[static_cast<std::size_t>(i)];
    int w = 0;
    for (int label = 1; label <= supervised.q; ++label) {
      if (label != t) pool[static_cast<std::size_t>(w++)] = label;
    }
    for (int k = 0; k < r; ++k) {
      std::swap(pool[static_cast<std::size_t>(k)],
                pool[static_cast<std::size_t>(k) +
                     uniform_below(rng, static_cast<std::uint64_t>(w - k))]);
    }
    auto& set = out.candidates[static_cast<std::size_t>(i)];
    set.assign(pool.begin(), pool.begin() + r);
    set.push_back(t);
    std::sort(set.begin(), set.end());
  }
  return out;
}

namespace {

long long gcd_ll(long long a, long long b) {
  while (b) {
    const long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Largest-remainder distribution given per-class (floor, fractional-part key)
// pairs. Keys only need a consistent ordering.
template <typename Key>
std::vector<int> distribute_residual(std::vector<int> floors, const std::vector<Key>& frac,
                                     long long residual) {
  const int q = static_cast<int>(floors.size());
  std::vector<int> order(static_cast<std::size_t>(q));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (frac[static_cast<std::size_t>(a)] != frac[static_cast<std::size_t>(b)]) {
      return frac[static_cast<std::size_t>(a)] > frac[static_cast<std::size_t>(b)];
    }
    return a < b;
  });
  for (long long k = 0; k < residual; ++k) {
    floors[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] += 1;
  }
  return floors;
}

}  // namespace

PriorCounts class_prior_counts(const PartialLabelDataset& dataset) {
  validate_or_throw(dataset);
  const int n = dataset.n();
  const int q = dataset.q;

  // Common denominator over the candidate-set sizes actually present.
  long long denom = 1;
  bool exact = true;
  for (const auto& set : dataset.candidates) {
    const long long s = static_cast<long long>(set.size());
    denom = denom / gcd_ll(denom, s) * s;
    if (denom > (1LL << 44)) {
      exact = false;
      break;
    }
  }

  std::vector<int> floors(static_cast<std::size_t>(q), 0);
  long long residual = 0;

  if (exact && denom <= (1LL << 62) / std::max(n, 1)) {
    // nhat_p = units[p] / denom, handled as exact integers.
    std::vector<long long> units(static_cast<std::size_t>(q), 0);
    for (const auto& set : dataset.candidates) {
      const long long share = denom / static_cast<long long>(set.size());
      for (int label : set) units[static_cast<std::size_t>(label - 1)] += share;
    }
    std::vector<long long> rema(static_cast<std::size_t>(q), 0);
    long long floor_sum = 0;
    for (int pth = 0; pth < q; ++pth) {
      floors[static_cast<std::size_t>(pth)] =
          static_cast<int>(units[static_cast<std::size_t>(pth)] / denom);
      rema[static_cast<std::size_t>(pth)] = units[static_cast<std::size_t>(pth)] % denom;
      floor_sum += floors[static_cast<std::size_t>(pth)];
    }
    residual = n - floor_sum;
    PriorCounts counts{distribute_residual(std::move(floors), rema, residual)};
    if (counts.total() != n) throw Error("internal: class prior counts do not sum to n");
    return counts;
  }

  // Fallback for absurdly many distinct set sizes: double accumulation.
  std::vector<double> nhat(static_cast<std::size_t>(q), 0.0);
  for (const auto& set : dataset.candidates) {
    const double share = 1.0 / static_cast<double>(set.size());
    for (int label : set) nhat[static_cast<std::size_t>(label - 1)] += share;
  }
  std::vector<double> frac(static_cast<std::size_t>(q), 0.0);
  long long floor_sum = 0;
  for (int pth = 0; pth < q; ++pth) {
    const double f = std::floor(nhat[static_cast<std::size_t>(pth)]);
    floors[static_cast<std::size_t>(pth)] = static_cast<int>(f);
    frac[static_cast<std::size_t>(pth)] = nhat[static_cast<std::size_t>(pth)] - f;
    floor_sum += static_cast<long long>(f);
  }
  residual = n - floor_sum;
  PriorCounts counts{distribute_residual(std::move(floors), frac, residual)};
  if (counts.total() != n) throw Error("internal: class prior counts do not sum to n");
  return counts;
}

}  // namespace sppll
