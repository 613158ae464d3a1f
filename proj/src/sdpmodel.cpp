#include "codebound/sdpmodel.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include <Eigen/Eigenvalues>

namespace codebound {

using nlohmann::json;

int SdpModel::var_index(const std::string& name) const {
  for (size_t i = 0; i < variables.size(); ++i)
    if (variables[i] == name) return static_cast<int>(i);
  return -1;
}

int SdpModel::total_block_dim() const {
  int n = 0;
  for (const auto& b : blocks) n += b.size;
  return n;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::PrimalInfeasible: return "PrimalInfeasible";
    case SolveStatus::DualUnbounded: return "DualUnbounded";
    case SolveStatus::NumericalLimit: return "NumericalLimit";
  }
  return "Unknown";
}

namespace {

void canonicalize_coords(std::vector<CoordEntry>& coords, int size, const char* what) {
  for (auto& c : coords) {
    if (c.row > c.col) std::swap(c.row, c.col);
    if (c.row < 0 || c.col >= size) {
      std::ostringstream msg;
      msg << what << ": coordinate (" << c.row << "," << c.col << ") outside block of size "
          << size;
      throw std::invalid_argument(msg.str());
    }
  }
  std::sort(coords.begin(), coords.end(), [](const CoordEntry& x, const CoordEntry& y) {
    return std::tie(x.row, x.col) < std::tie(y.row, y.col);
  });
  // merge duplicates
  std::vector<CoordEntry> merged;
  for (auto& c : coords) {
    if (!merged.empty() && merged.back().row == c.row && merged.back().col == c.col)
      merged.back().value += c.value;
    else
      merged.push_back(c);
  }
  std::erase_if(merged, [](const CoordEntry& c) { return c.value == 0; });
  coords = std::move(merged);
}

}  // namespace

SdpModel assemble(std::vector<std::string> variables, Sense sense, std::vector<Rational> objective,
                  std::vector<AffineBlock> blocks, std::vector<Equality> equalities) {
  if (variables.size() != objective.size())
    throw std::invalid_argument("assemble: objective length must match variable count");
  std::set<std::string> seen;
  for (const auto& v : variables)
    if (!seen.insert(v).second) throw std::invalid_argument("assemble: duplicate variable " + v);

  const int nvars = static_cast<int>(variables.size());
  for (auto& b : blocks) {
    if (b.size < 1) throw std::invalid_argument("assemble: block size must be >= 1");
    canonicalize_coords(b.constant, b.size, "constant");
    for (auto it = b.terms.begin(); it != b.terms.end();) {
      if (it->first < 0 || it->first >= nvars)
        throw std::invalid_argument("assemble: block references undeclared variable index");
      canonicalize_coords(it->second, b.size, "term");
      it = it->second.empty() ? b.terms.erase(it) : std::next(it);
    }
  }
  for (const auto& e : equalities)
    for (const auto& [vi, coef] : e.coeffs) {
      (void)coef;
      if (vi < 0 || vi >= nvars)
        throw std::invalid_argument("assemble: equality references undeclared variable index");
    }

  SdpModel m;
  m.variables = std::move(variables);
  m.sense = sense;
  m.objective = std::move(objective);
  m.blocks = std::move(blocks);
  m.equalities = std::move(equalities);
  return m;
}

Eigen::MatrixXd block_matrix(const AffineBlock& block, int var) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(block.size, block.size);
  const std::vector<CoordEntry>* coords = nullptr;
  if (var < 0) {
    coords = &block.constant;
  } else {
    auto it = block.terms.find(var);
    if (it == block.terms.end()) return M;
    coords = &it->second;
  }
  for (const auto& c : *coords) {
    const double v = to_double(c.value);
    M(c.row, c.col) = v;
    M(c.col, c.row) = v;
  }
  return M;
}

BlockValue eval_block(const SdpModel& model, int block_index, const std::vector<double>& x) {
  if (block_index < 0 || block_index >= static_cast<int>(model.blocks.size()))
    throw std::invalid_argument("eval_block: block index out of range");
  if (x.size() != model.variables.size())
    throw std::invalid_argument("eval_block: x must cover all variables");
  const AffineBlock& b = model.blocks[static_cast<size_t>(block_index)];
  Eigen::MatrixXd M = block_matrix(b, -1);
  for (const auto& [vi, coords] : b.terms) {
    (void)coords;
    M += x[static_cast<size_t>(vi)] * block_matrix(b, vi);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return BlockValue{M, es.eigenvalues().minCoeff()};
}

namespace {

json coords_to_json(const std::vector<CoordEntry>& coords) {
  json arr = json::array();
  for (const auto& c : coords) arr.push_back({c.row, c.col, to_fraction_string(c.value)});
  return arr;
}

std::vector<CoordEntry> coords_from_json(const json& arr) {
  std::vector<CoordEntry> out;
  for (const auto& e : arr)
    out.push_back(CoordEntry{e.at(0).get<int>(), e.at(1).get<int>(),
                             fraction_from_string(e.at(2).get<std::string>())});
  return out;
}

const char* bound_rule_name(BoundRule r) {
  switch (r) {
    case BoundRule::MinYReciprocal: return "min_y_reciprocal";
    case BoundRule::MaxC: return "max_c";
    default: return "none";
  }
}

BoundRule bound_rule_from(const std::string& s) {
  if (s == "min_y_reciprocal") return BoundRule::MinYReciprocal;
  if (s == "max_c") return BoundRule::MaxC;
  return BoundRule::None;
}

}  // namespace

std::string model_to_json_string(const SdpModel& model) {
  json j;
  j["variables"] = model.variables;
  j["objective"] = {{"sense", model.sense == Sense::Min ? "min" : "max"}, {"coeffs", json::array()}};
  for (const auto& c : model.objective) j["objective"]["coeffs"].push_back(to_fraction_string(c));
  j["blocks"] = json::array();
  for (const auto& b : model.blocks) {
    json jb;
    jb["size"] = b.size;
    jb["constant"] = coords_to_json(b.constant);
    jb["terms"] = json::object();
    for (const auto& [vi, coords] : b.terms)
      jb["terms"][model.variables[static_cast<size_t>(vi)]] = coords_to_json(coords);
    j["blocks"].push_back(std::move(jb));
  }
  j["equalities"] = json::array();
  for (const auto& e : model.equalities) {
    json je;
    je["coeffs"] = json::object();
    for (const auto& [vi, coef] : e.coeffs)
      je["coeffs"][model.variables[static_cast<size_t>(vi)]] = to_fraction_string(coef);
    je["rhs"] = to_fraction_string(e.rhs);
    j["equalities"].push_back(std::move(je));
  }
  j["metadata"] = {{"formulation", model.formulation},
                   {"notes", model.notes},
                   {"bound_rule", bound_rule_name(model.bound_rule)},
                   {"exact_data", model.exact_data}};
  return j.dump(2);
}

SdpModel model_from_json_string(const std::string& text) {
  const json j = json::parse(text);
  SdpModel probe;
  probe.variables = j.at("variables").get<std::vector<std::string>>();

  std::vector<Rational> objective;
  for (const auto& c : j.at("objective").at("coeffs"))
    objective.push_back(fraction_from_string(c.get<std::string>()));
  const Sense sense = j.at("objective").at("sense").get<std::string>() == "max" ? Sense::Max : Sense::Min;

  std::vector<AffineBlock> blocks;
  for (const auto& jb : j.at("blocks")) {
    AffineBlock b;
    b.size = jb.at("size").get<int>();
    b.constant = coords_from_json(jb.at("constant"));
    for (const auto& [name, coords] : jb.at("terms").items()) {
      const int vi = probe.var_index(name);
      if (vi < 0) throw std::invalid_argument("model file references unknown variable " + name);
      b.terms[vi] = coords_from_json(coords);
    }
    blocks.push_back(std::move(b));
  }
  std::vector<Equality> equalities;
  for (const auto& je : j.at("equalities")) {
    Equality e;
    for (const auto& [name, coef] : je.at("coeffs").items()) {
      const int vi = probe.var_index(name);
      if (vi < 0) throw std::invalid_argument("model file references unknown variable " + name);
      e.coeffs[vi] = fraction_from_string(coef.get<std::string>());
    }
    e.rhs = fraction_from_string(je.at("rhs").get<std::string>());
    equalities.push_back(std::move(e));
  }

  SdpModel m = assemble(probe.variables, sense, std::move(objective), std::move(blocks),
                        std::move(equalities));
  if (j.contains("metadata")) {
    const auto& md = j.at("metadata");
    m.formulation = md.value("formulation", "");
    m.notes = md.value("notes", "");
    m.bound_rule = bound_rule_from(md.value("bound_rule", "none"));
    m.exact_data = md.value("exact_data", true);
  }
  return m;
}

void save_model(const SdpModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << model_to_json_string(model) << "\n";
}

SdpModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json_string(ss.str());
}

std::string model_hash(const SdpModel& model) {
  const std::string text = model_to_json_string(model);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

}  // namespace codebound
