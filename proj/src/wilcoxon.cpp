#include "gsi/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gsi/error.hpp"

namespace gsi {

namespace {

constexpr std::size_t kExactLimit = 20;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct RankedDiffs {
  std::vector<double> ranks;  // average ranks of |d|
  std::vector<bool> positive;
  double tie_term = 0.0;      // sum over tie groups of t^3 - t
};

RankedDiffs rank_differences(std::span<const double> a, std::span<const double> b) {
  std::vector<double> diffs;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double d = a[t] - b[t];
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) {
    fail(ErrorKind::AllZeroDifferences, "every paired difference is zero");
  }
  std::vector<std::size_t> order(diffs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(diffs[x]) < std::abs(diffs[y]);
  });

  RankedDiffs out;
  out.ranks.resize(diffs.size());
  out.positive.resize(diffs.size());
  for (std::size_t s = 0; s < order.size();) {
    std::size_t e = s + 1;
    while (e < order.size() && std::abs(diffs[order[e]]) == std::abs(diffs[order[s]])) ++e;
    const double avg = 0.5 * static_cast<double>(s + 1 + e);  // mean of ranks s+1..e
    for (std::size_t q = s; q < e; ++q) out.ranks[order[q]] = avg;
    const auto t = static_cast<double>(e - s);
    out.tie_term += t * t * t - t;
    s = e;
  }
  for (std::size_t t = 0; t < diffs.size(); ++t) out.positive[t] = diffs[t] > 0.0;
  return out;
}

// Null distribution of 2*W+ by dynamic programming over the doubled
// (integer) ranks; equivalent to enumerating all 2^n sign assignments.
std::vector<double> doubled_rank_counts(const std::vector<double>& ranks) {
  std::size_t total = 0;
  std::vector<std::size_t> r2;
  for (double r : ranks) {
    r2.push_back(static_cast<std::size_t>(std::llround(2.0 * r)));
    total += r2.back();
  }
  std::vector<double> counts(total + 1, 0.0);
  counts[0] = 1.0;
  std::size_t reach = 0;
  for (std::size_t w : r2) {
    for (std::size_t s = reach + 1; s-- > 0;) {
      if (counts[s] != 0.0) counts[s + w] += counts[s];
    }
    reach += w;
  }
  return counts;
}

}  // namespace

std::string_view to_string(Alternative alt) noexcept {
  switch (alt) {
    case Alternative::Less: return "less";
    case Alternative::Greater: return "greater";
    case Alternative::TwoSided: return "two-sided";
  }
  return "two-sided";
}

std::optional<Alternative> parse_alternative(std::string_view s) {
  if (s == "less") return Alternative::Less;
  if (s == "greater") return Alternative::Greater;
  if (s == "two-sided" || s == "two_sided" || s == "twosided") return Alternative::TwoSided;
  return std::nullopt;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> errors_a,
                                    std::span<const double> errors_b,
                                    Alternative alternative, PValueMethod method) {
  if (errors_a.size() != errors_b.size()) {
    fail(ErrorKind::InvalidArgument, "paired error lists differ in length");
  }
  const RankedDiffs rd = rank_differences(errors_a, errors_b);
  const std::size_t n = rd.ranks.size();

  WilcoxonResult res;
  res.n = n;
  for (std::size_t t = 0; t < n; ++t) {
    if (rd.positive[t]) res.statistic += rd.ranks[t];
  }
  res.exact = method == PValueMethod::Exact ||
              (method == PValueMethod::Auto && n <= kExactLimit);

  double p_less = 0.0, p_greater = 0.0;
  if (res.exact) {
    const std::vector<double> counts = doubled_rank_counts(rd.ranks);
    const auto w2 = static_cast<std::size_t>(std::llround(2.0 * res.statistic));
    const double all = std::ldexp(1.0, static_cast<int>(n));
    double le = 0.0, ge = 0.0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
      if (s <= w2) le += counts[s];
      if (s >= w2) ge += counts[s];
    }
    p_less = le / all;
    p_greater = ge / all;
  } else {
    const auto nd = static_cast<double>(n);
    const double mu = nd * (nd + 1.0) / 4.0;
    const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - rd.tie_term / 48.0;
    const double sd = std::sqrt(var);
    p_less = normal_cdf((res.statistic - mu + 0.5) / sd);
    p_greater = normal_cdf(-(res.statistic - mu - 0.5) / sd);
  }
  switch (alternative) {
    case Alternative::Less: res.p_value = p_less; break;
    case Alternative::Greater: res.p_value = p_greater; break;
    case Alternative::TwoSided:
      res.p_value = std::min(1.0, 2.0 * std::min(p_less, p_greater));
      break;
  }
  return res;
}

}  // namespace gsi
