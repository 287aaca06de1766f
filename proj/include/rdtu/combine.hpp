#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rdtu/rdt.hpp"

namespace rdtu {

/// Ensemble combination strategies.  The first four score each leaf and
/// average; Vote averages sign votes; the rest combine the raw counts.
enum class Method { ProbAvg, LaplaceAvg, PlsAvg, CbAvg, Vote, Pool, Dempster, Cautious, Eva };

inline constexpr Method kAllMethods[] = {Method::ProbAvg,  Method::LaplaceAvg, Method::PlsAvg,
                                         Method::CbAvg,    Method::Vote,       Method::Pool,
                                         Method::Dempster, Method::Cautious,   Method::Eva};

/// Stable identifiers: prob, laplace, pls, cb, vote, pool, dempster, cautious, eva.
std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);
/// Parses a comma-separated list; throws std::invalid_argument naming the
/// first unknown identifier.
std::vector<Method> parse_method_list(std::string_view csv);

struct CombineContext {
  double prior_pos = 0.5;
  double eva_smoothing = 0.1;

  void validate() const;
};

/// sum(w+) / sum(n) - 1/2.
double pool(std::span<const LeafStats> leaves);

/// Evidence accumulation under class-conditional independence:
///   A = P(+) prod_i P(+|w_i)/P(+),  B = P(-) prod_i P(-|w_i)/P(-)
/// with P(y|w) = (w_y + s)/(n + 2s).  Returns (A - B)/(A + B), computed as
/// tanh((log A - log B)/2) so the products are never formed.
double eva(std::span<const LeafStats> leaves, const CombineContext& ctx);

double combine(Method method, std::span<const LeafStats> leaves, const CombineContext& ctx);

}  // namespace rdtu
