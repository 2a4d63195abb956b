#include <nlohmann/json.hpp>

#include "graphon/error.hpp"
#include "graphon/estimators.hpp"

namespace graphon {

using nlohmann::json;
using nlohmann::ordered_json;

std::string fit_result_to_json(const FitResult& fit) {
  const BlockMatrix& q = fit.q_hat;
  json rows = json::array();
  for (Index a = 0; a < q.rows(); ++a) {
    json row = json::array();
    for (Index b = 0; b < q.cols(); ++b) row.push_back(q(a, b));
    rows.push_back(std::move(row));
  }
  json labels = json::array();
  for (int label : fit.z_hat.labels()) labels.push_back(label + 1);
  const ordered_json doc = {
      {"method", fit.method},
      {"n", fit.z_hat.size()},
      {"k", fit.z_hat.k()},
      {"objective", fit.objective},
      {"iterations", fit.iterations},
      {"restarts_used", fit.restarts_used},
      {"init_fallback", fit.init_fallback},
      {"labels", std::move(labels)},
      {"q", std::move(rows)},
      {"objective_history", fit.objective_history},
  };
  return doc.dump(2) + "\n";
}

FitResult fit_result_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    const int k = doc.at("k").get<int>();
    std::vector<int> labels;
    for (const auto& v : doc.at("labels")) labels.push_back(v.get<int>() - 1);
    if (labels.size() != doc.at("n").get<std::size_t>()) throw FormatError("fit json: label count != n");
    Assignment z(std::move(labels), k);
    const auto& rows = doc.at("q");
    if (rows.size() != static_cast<std::size_t>(k)) throw FormatError("fit json: q must be k x k");
    Matrix q(k, k);
    for (Index a = 0; a < k; ++a) {
      const auto& row = rows.at(static_cast<std::size_t>(a));
      if (row.size() != static_cast<std::size_t>(k)) throw FormatError("fit json: q must be k x k");
      for (Index b = 0; b < k; ++b) q(a, b) = row.at(static_cast<std::size_t>(b)).get<double>();
    }
    BlockMatrix block(std::move(q), true);
    ProbMatrix theta = theta_from_blocks(block, z);
    FitResult fit{std::move(block), std::move(z), std::move(theta), doc.at("objective").get<double>(),
                  doc.value("iterations", 0), doc.value("restarts_used", 0),
                  doc.at("method").get<std::string>(), {}, doc.value("init_fallback", false)};
    if (doc.contains("objective_history")) {
      fit.objective_history = doc.at("objective_history").get<std::vector<double>>();
    }
    return fit;
  } catch (const json::exception& e) {
    throw FormatError(std::string("fit json: ") + e.what());
  }
}

}  // namespace graphon
