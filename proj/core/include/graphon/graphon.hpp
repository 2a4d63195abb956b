#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "graphon/types.hpp"

namespace graphon {

enum class GraphonKind {
  Constant,  // f = c
  Product,   // f = xy
  Min,       // f = min(x, y)
  Additive,  // f = (x + y) / 2
  Smooth,    // f = 1/2 + cos(pi x) cos(pi y) / 4, infinitely differentiable
  Holder,    // f = |x - y|^a / 2 with a in (0, 1]
  Block,     // piecewise constant on the intervals [(a-1)/k, a/k)
};

/// A built-in graphon together with its declared smoothness: f belongs to the
/// Hoelder class of order `alpha` with norm at most `holder_bound`.
/// For the block graphon `holder_bound` is +inf (no finite Hoelder norm).
struct GraphonSpec {
  GraphonKind kind = GraphonKind::Constant;
  std::vector<double> params;
  double alpha = 1.0;
  double holder_bound = 1.0;

  /// Gallery identifier that parse_graphon() maps back to this spec.
  std::string id() const;
};

GraphonSpec constant_graphon(double c);
GraphonSpec product_graphon();
GraphonSpec min_graphon();
GraphonSpec additive_graphon();
GraphonSpec smooth_graphon();
GraphonSpec holder_graphon(double exponent);
/// `q` must be symmetric with entries in [0,1].
GraphonSpec block_graphon(const Matrix& q);
/// Two-block graphon with `p_in` on the diagonal blocks and `p_out` across.
GraphonSpec block_graphon(int k, double p_in, double p_out);

/// Parses identifiers such as "product", "constant:0.3", "holder:0.5",
/// "sbm:2:0.6:0.2" (k, within, between). Throws FormatError.
GraphonSpec parse_graphon(std::string_view id);

/// One representative of every family.
std::vector<GraphonSpec> graphon_gallery();

/// f(x, y). Throws DomainError when x or y lies outside [0,1].
double eval_graphon(const GraphonSpec& spec, double x, double y);

}  // namespace graphon
