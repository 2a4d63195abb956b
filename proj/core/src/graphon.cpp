#include "graphon/graphon.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "graphon/error.hpp"
#include "graphon/model.hpp"

namespace graphon {

namespace {

std::string format_param(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double parse_number(std::string_view text, std::string_view id) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw FormatError("graphon id '" + std::string(id) + "': bad number '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

GraphonSpec constant_graphon(double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw DomainError("constant graphon: value outside [0,1]");
  return {GraphonKind::Constant, {c}, 1.0, c};
}

// Declared bounds are Hoelder norms: sup |f| plus the seminorm of the top
// derivative, so they also cover the Lipschitz-type inequality.
GraphonSpec product_graphon() { return {GraphonKind::Product, {}, 1.0, 2.0}; }

GraphonSpec min_graphon() { return {GraphonKind::Min, {}, 1.0, 2.0}; }

GraphonSpec additive_graphon() { return {GraphonKind::Additive, {}, 1.0, 1.5}; }

GraphonSpec smooth_graphon() {
  // Derivatives up to order two are bounded by pi^2 / 4 < 2.5.
  return {GraphonKind::Smooth, {}, 2.0, 8.0};
}

GraphonSpec holder_graphon(double exponent) {
  if (!(exponent > 0.0 && exponent <= 1.0)) {
    throw DomainError("holder graphon: exponent must lie in (0,1]");
  }
  return {GraphonKind::Holder, {exponent}, exponent, 1.0};
}

GraphonSpec block_graphon(const Matrix& q) {
  // Validates symmetry and range.
  BlockMatrix checked(q, true);
  GraphonSpec spec{GraphonKind::Block, {static_cast<double>(q.rows())}, 1.0,
                   std::numeric_limits<double>::infinity()};
  for (Index a = 0; a < q.rows(); ++a) {
    for (Index b = 0; b < q.cols(); ++b) spec.params.push_back(q(a, b));
  }
  return spec;
}

GraphonSpec block_graphon(int k, double p_in, double p_out) {
  if (k < 1) throw DomainError("block graphon: k must be positive");
  Matrix q = Matrix::Constant(k, k, p_out);
  q.diagonal().setConstant(p_in);
  return block_graphon(q);
}

std::string GraphonSpec::id() const {
  switch (kind) {
    case GraphonKind::Constant:
      return "constant:" + format_param(params.at(0));
    case GraphonKind::Product:
      return "product";
    case GraphonKind::Min:
      return "min";
    case GraphonKind::Additive:
      return "additive";
    case GraphonKind::Smooth:
      return "smooth";
    case GraphonKind::Holder:
      return "holder:" + format_param(params.at(0));
    case GraphonKind::Block: {
      const int k = static_cast<int>(params.at(0));
      std::string out = "block:" + std::to_string(k);
      for (std::size_t i = 1; i < params.size(); ++i) out += ":" + format_param(params[i]);
      return out;
    }
  }
  return "unknown";
}

GraphonSpec parse_graphon(std::string_view id) {
  const auto parts = split(id, ':');
  const std::string_view name = parts.front();
  auto expect_args = [&](std::size_t count) {
    if (parts.size() != count + 1) {
      throw FormatError("graphon id '" + std::string(id) + "': expected " + std::to_string(count) +
                        " parameter(s)");
    }
  };
  if (name == "constant") {
    expect_args(1);
    return constant_graphon(parse_number(parts[1], id));
  }
  if (name == "product") {
    expect_args(0);
    return product_graphon();
  }
  if (name == "min") {
    expect_args(0);
    return min_graphon();
  }
  if (name == "additive") {
    expect_args(0);
    return additive_graphon();
  }
  if (name == "smooth") {
    expect_args(0);
    return smooth_graphon();
  }
  if (name == "holder") {
    expect_args(1);
    return holder_graphon(parse_number(parts[1], id));
  }
  if (name == "sbm") {
    expect_args(3);
    const double k = parse_number(parts[1], id);
    if (k < 1 || k != std::floor(k)) throw FormatError("graphon id '" + std::string(id) + "': bad k");
    return block_graphon(static_cast<int>(k), parse_number(parts[2], id), parse_number(parts[3], id));
  }
  if (name == "block") {
    if (parts.size() < 2) throw FormatError("graphon id '" + std::string(id) + "': missing k");
    const double kd = parse_number(parts[1], id);
    const auto k = static_cast<Index>(kd);
    if (k < 1 || kd != static_cast<double>(k) ||
        parts.size() != static_cast<std::size_t>(2 + k * k)) {
      throw FormatError("graphon id '" + std::string(id) + "': expected k and k*k values");
    }
    Matrix q(k, k);
    for (Index a = 0; a < k; ++a) {
      for (Index b = 0; b < k; ++b) {
        q(a, b) = parse_number(parts[static_cast<std::size_t>(2 + a * k + b)], id);
      }
    }
    return block_graphon(q);
  }
  throw FormatError("unknown graphon id '" + std::string(id) + "'");
}

std::vector<GraphonSpec> graphon_gallery() {
  return {constant_graphon(0.3), product_graphon(),  min_graphon(),
          additive_graphon(),    smooth_graphon(),   holder_graphon(0.5),
          block_graphon(2, 0.6, 0.2)};
}

double eval_graphon(const GraphonSpec& spec, double x, double y) {
  if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0)) {
    throw DomainError("eval_graphon: argument outside [0,1]");
  }
  switch (spec.kind) {
    case GraphonKind::Constant:
      return spec.params.at(0);
    case GraphonKind::Product:
      return x * y;
    case GraphonKind::Min:
      return std::min(x, y);
    case GraphonKind::Additive:
      return 0.5 * (x + y);
    case GraphonKind::Smooth:
      return 0.5 + 0.25 * std::cos(std::numbers::pi * x) * std::cos(std::numbers::pi * y);
    case GraphonKind::Holder:
      return 0.5 * std::pow(std::abs(x - y), spec.params.at(0));
    case GraphonKind::Block: {
      const int k = static_cast<int>(spec.params.at(0));
      const int a = interval_index(x, k);
      const int b = interval_index(y, k);
      return spec.params.at(static_cast<std::size_t>(1 + a * k + b));
    }
  }
  throw DomainError("eval_graphon: unknown kind");
}

}  // namespace graphon
