#include "disq/triangle.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace disq {

CoefficientTriangle::CoefficientTriangle(TriangleKind kind, Rational alpha_sq,
                                         std::vector<std::vector<Rational>> rows)
    : kind_(kind), alpha_sq_(std::move(alpha_sq)), rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("triangle needs at least row 0");
  for (size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].size() != i + 1)
      throw std::invalid_argument("row " + std::to_string(i) + " has wrong length");
    if (rows_[i][i] != 1)
      throw std::invalid_argument("diagonal entry (" + std::to_string(i) + "," +
                                  std::to_string(i) + ") != 1");
    for (const auto& e : rows_[i])
      if (e < 0) throw std::invalid_argument("negative triangle entry in row " + std::to_string(i));
  }
}

Rational CoefficientTriangle::at(int i, int k) const {
  if (i < 0 || i > depth()) throw std::out_of_range("triangle row out of range");
  if (k < 0 || k > i) return 0;
  return rows_[i][k];
}

void CoefficientTriangle::save(std::ostream& out) const {
  nlohmann::json j;
  j["kind"] = kind_ == TriangleKind::L ? "L" : "M";
  j["alpha_sq"] = to_fraction_string(alpha_sq_);
  j["depth"] = depth();
  auto rows = nlohmann::json::array();
  for (const auto& row : rows_) {
    auto r = nlohmann::json::array();
    for (const auto& e : row) r.push_back(to_fraction_string(e));
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  out << j.dump(1, ' ') << '\n';
}

void CoefficientTriangle::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write triangle cache '" + path + "'");
  save(out);
}

CoefficientTriangle CoefficientTriangle::load(std::istream& in) {
  nlohmann::json j = nlohmann::json::parse(in);
  TriangleKind kind = j.value("kind", "L") == std::string("M") ? TriangleKind::M : TriangleKind::L;
  Rational alpha_sq = parse_rational(j.at("alpha_sq").get<std::string>());
  std::vector<std::vector<Rational>> rows;
  for (const auto& r : j.at("rows")) {
    std::vector<Rational> row;
    for (const auto& e : r) row.push_back(parse_rational(e.get<std::string>()));
    rows.push_back(std::move(row));
  }
  if (j.contains("depth") && j["depth"].get<int>() != static_cast<int>(rows.size()) - 1)
    throw std::invalid_argument("triangle cache depth field disagrees with row count");
  return CoefficientTriangle(kind, std::move(alpha_sq), std::move(rows));
}

CoefficientTriangle CoefficientTriangle::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open triangle cache '" + path + "'");
  return load(in);
}

}  // namespace disq
