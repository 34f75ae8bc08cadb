#pragma once

// Tree artifact: a JSON document with a fixed field order,
//   {version, ground_terms, length_terms_per_node, leaves, output_half_width}
// Numbers are written with round-trip precision.

#include <array>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>

#include "hfcfdt/errors.hpp"
#include "hfcfdt/fdt_supervisor.hpp"
#include "hfcfdt/fuzzy_core.hpp"
#include "json.hpp"

namespace hfcfdt::io {

inline constexpr int kTreeFormatVersion = 1;

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline ordered_json term_to_json(const fuzzy::Term& t) {
  ordered_json j;
  j["label"] = t.label;
  j["a"] = t.mf.a();
  j["b"] = t.mf.b();
  j["c"] = t.mf.c();
  j["d"] = t.mf.d();
  return j;
}

inline ordered_json terms_to_json(const fuzzy::LinguisticVariable& v) {
  ordered_json arr = ordered_json::array();
  for (const auto& t : v.terms()) arr.push_back(term_to_json(t));
  return arr;
}

inline fuzzy::LinguisticVariable terms_from_json(const ordered_json& arr, const std::string& name,
                                                 std::size_t expected) {
  if (!arr.is_array() || arr.size() != expected) {
    throw ConfigError("tree artifact: '" + name + "' must hold " + std::to_string(expected) + " terms");
  }
  std::vector<fuzzy::Term> terms;
  for (const auto& j : arr) {
    terms.push_back({j.at("label").get<std::string>(),
                     fuzzy::MembershipFunction::trapezoid(j.at("a").get<double>(), j.at("b").get<double>(),
                                                          j.at("c").get<double>(), j.at("d").get<double>())});
  }
  const double lo = terms.front().mf.a();
  const double hi = terms.back().mf.d();
  return fuzzy::LinguisticVariable(name, lo, hi, std::move(terms), true);
}

}  // namespace detail

inline std::string tree_to_json(const fdt::FuzzyDecisionTree& tree) {
  tree.validate();
  detail::ordered_json j;
  j["version"] = kTreeFormatVersion;
  j["ground_terms"] = detail::terms_to_json(tree.ground);
  auto per_node = detail::ordered_json::array();
  for (const auto& v : tree.length) per_node.push_back(detail::terms_to_json(v));
  j["length_terms_per_node"] = per_node;
  auto leaves = detail::ordered_json::array();
  for (std::size_t i = 0; i < fdt::kLeaves; ++i) {
    detail::ordered_json leaf;
    leaf["id"] = fdt::leaf_id(i);
    leaf["delta_motor"] = tree.leaves[i].delta_motor;
    leaf["delta_servo"] = tree.leaves[i].delta_servo;
    leaves.push_back(leaf);
  }
  j["leaves"] = leaves;
  j["output_half_width"] = tree.output_half_width;
  return j.dump(2) + "\n";
}

inline fdt::FuzzyDecisionTree tree_from_json(const std::string& text) {
  try {
    const auto j = detail::ordered_json::parse(text);
    if (j.at("version").get<int>() != kTreeFormatVersion) throw ConfigError("tree artifact: unsupported version");
    fdt::FuzzyDecisionTree tree;
    tree.ground = detail::terms_from_json(j.at("ground_terms"), "ground", fdt::kGroundNodes);
    const auto& per_node = j.at("length_terms_per_node");
    if (!per_node.is_array() || per_node.size() != fdt::kGroundNodes) {
      throw ConfigError("tree artifact: 'length_terms_per_node' must hold 3 nodes");
    }
    for (std::size_t i = 0; i < fdt::kGroundNodes; ++i) {
      tree.length[i] = detail::terms_from_json(per_node[i], std::string("length_") + fdt::kGroundLabels[i],
                                               fdt::kLengthTerms);
    }
    const auto& leaves = j.at("leaves");
    if (!leaves.is_array() || leaves.size() != fdt::kLeaves) throw ConfigError("tree artifact: need 6 leaves");
    for (std::size_t i = 0; i < fdt::kLeaves; ++i) {
      if (leaves[i].at("id").get<std::string>() != fdt::leaf_id(i)) {
        throw ConfigError("tree artifact: leaf " + std::to_string(i) + " must have id " + fdt::leaf_id(i));
      }
      tree.leaves[i] = {leaves[i].at("delta_motor").get<double>(), leaves[i].at("delta_servo").get<double>()};
    }
    tree.output_half_width = j.at("output_half_width").get<double>();
    tree.trained = true;
    tree.validate();
    return tree;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("tree artifact: ") + e.what());
  }
}

inline fdt::FuzzyDecisionTree load_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tree artifact '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return tree_from_json(ss.str());
}

inline void save_tree(const fdt::FuzzyDecisionTree& tree, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write tree artifact '" + path + "'");
  out << tree_to_json(tree);
}

}  // namespace hfcfdt::io
