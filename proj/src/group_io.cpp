#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qlgt/group.hpp"

namespace qlgt {

using nlohmann::json;

FiniteGroup group_from_json_text(const std::string& text) {
  const json doc = json::parse(text);
  const auto order = doc.at("order").get<std::size_t>();
  auto mult = doc.at("mult").get<std::vector<std::vector<Element>>>();
  if (mult.size() != order) {
    throw std::invalid_argument("group json: mult has " + std::to_string(mult.size()) +
                                " rows, order is " + std::to_string(order));
  }
  std::vector<Irrep> irreps;
  for (const auto& item : doc.at("irreps")) {
    Irrep rep;
    rep.label = item.at("label").get<std::string>();
    rep.dim = item.at("dim").get<std::size_t>();
    for (const auto& mat : item.at("matrices")) {
      const auto d = static_cast<Eigen::Index>(rep.dim);
      if (mat.size() != rep.dim) throw std::invalid_argument("group json: bad matrix rows");
      CMatrix m(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        if (mat[r].size() != rep.dim) throw std::invalid_argument("group json: bad matrix cols");
        for (Eigen::Index c = 0; c < d; ++c) {
          const auto& z = mat[r][c];
          m(r, c) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
        }
      }
      rep.matrices.push_back(std::move(m));
    }
    irreps.push_back(std::move(rep));
  }
  return FiniteGroup(doc.value("name", std::string("custom")), std::move(mult),
                     std::move(irreps));
}

FiniteGroup load_group_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open group file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return group_from_json_text(buf.str());
}

std::string group_to_json_text(const FiniteGroup& group) {
  json doc;
  doc["name"] = group.name();
  doc["order"] = group.order();
  doc["mult"] = group.mult_table();
  json irreps = json::array();
  for (const auto& rep : group.irreps()) {
    json mats = json::array();
    for (const auto& m : rep.matrices) {
      json rows = json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          row.push_back({m(r, c).real(), m(r, c).imag()});
        }
        rows.push_back(std::move(row));
      }
      mats.push_back(std::move(rows));
    }
    irreps.push_back({{"label", rep.label}, {"dim", rep.dim}, {"matrices", std::move(mats)}});
  }
  doc["irreps"] = std::move(irreps);
  return doc.dump(2);
}

}  // namespace qlgt
