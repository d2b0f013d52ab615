#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace gsi {

enum class Alternative { Less, Greater, TwoSided };

std::string_view to_string(Alternative alt) noexcept;
std::optional<Alternative> parse_alternative(std::string_view s);

enum class PValueMethod { Auto, Exact, Normal };

struct WilcoxonResult {
  double statistic = 0.0;  // W+: rank sum of positive differences
  double p_value = 1.0;
  std::size_t n = 0;       // pairs with non-zero difference
  bool exact = false;
};

/// Paired signed-rank test on errors_a - errors_b. "Less" tests whether a
/// tends to be smaller than b. Auto uses the exact null distribution for
/// n <= 20 and the tie- and continuity-corrected normal approximation
/// otherwise. Throws AllZeroDifferences.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> errors_a,
                                    std::span<const double> errors_b,
                                    Alternative alternative,
                                    PValueMethod method = PValueMethod::Auto);

}  // namespace gsi
