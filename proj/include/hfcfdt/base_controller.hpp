#pragma once

// Base fuzzy controller: tracking error e and its rate feed a 5x7 rule
// table; both actuator channels share the table and are mapped through
// their own actuator ranges.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hfcfdt/actuators.hpp"
#include "hfcfdt/errors.hpp"
#include "hfcfdt/fuzzy_core.hpp"

namespace hfcfdt::bfc {

enum class Term : std::uint8_t { NL, NM, NS, ZO, PS, PM, PL };

inline constexpr std::array<Term, 7> kSevenTerms = {Term::NL, Term::NM, Term::NS, Term::ZO,
                                                    Term::PS, Term::PM, Term::PL};
inline constexpr std::array<Term, 5> kFiveTerms = {Term::NL, Term::NS, Term::ZO, Term::PS, Term::PL};

constexpr std::string_view to_string(Term t) noexcept {
  constexpr std::array<std::string_view, 7> names = {"NL", "NM", "NS", "ZO", "PS", "PM", "PL"};
  return names[static_cast<std::size_t>(t)];
}

inline Term parse_term(std::string_view s) {
  for (Term t : kSevenTerms) {
    if (to_string(t) == s) return t;
  }
  throw ConfigError("unknown linguistic term '" + std::string(s) + "'");
}

/// Which input runs along the seven columns of the rule table. The table
/// header is "e / e-dot": columns are e, rows are e-dot.
enum class TableOrientation { ErrorAlongColumns, ErrorAlongRows };
inline constexpr TableOrientation kTableOrientation = TableOrientation::ErrorAlongColumns;

class RuleTable {
 public:
  static constexpr std::size_t kRows = 5;
  static constexpr std::size_t kCols = 7;

  /// Row labels, top to bottom.
  static constexpr std::array<Term, kRows> kRowTerms = {Term::PL, Term::PS, Term::ZO, Term::NS, Term::NL};
  /// Column labels, left to right.
  static constexpr std::array<Term, kCols> kColTerms = kSevenTerms;

  using Cells = std::array<std::array<Term, kCols>, kRows>;

  // clang-format off
  static constexpr Cells kCells = {{
      /* PL */ {Term::NM, Term::NS, Term::NS, Term::PS, Term::PM, Term::PL, Term::PL},
      /* PS */ {Term::NL, Term::NM, Term::NS, Term::ZO, Term::PM, Term::PL, Term::PL},
      /* ZO */ {Term::NL, Term::NM, Term::NS, Term::ZO, Term::PS, Term::PM, Term::PL},
      /* NS */ {Term::NL, Term::NL, Term::NM, Term::ZO, Term::PS, Term::PM, Term::PL},
      /* NL */ {Term::NL, Term::NL, Term::NM, Term::NS, Term::PS, Term::PS, Term::PM},
  }};
  // clang-format on

  static constexpr std::optional<std::size_t> row_of(Term t) noexcept {
    for (std::size_t i = 0; i < kRows; ++i) {
      if (kRowTerms[i] == t) return i;
    }
    return std::nullopt;
  }

  static constexpr std::optional<std::size_t> col_of(Term t) noexcept {
    for (std::size_t i = 0; i < kCols; ++i) {
      if (kColTerms[i] == t) return i;
    }
    return std::nullopt;
  }

  static constexpr Term cell(std::size_t row, std::size_t col) noexcept { return kCells[row][col]; }

  /// Output term for an (e, e-dot) antecedent pair.
  static Term lookup(Term e_term, Term edot_term) {
    const Term col_term = kTableOrientation == TableOrientation::ErrorAlongColumns ? e_term : edot_term;
    const Term row_term = kTableOrientation == TableOrientation::ErrorAlongColumns ? edot_term : e_term;
    const auto r = row_of(row_term);
    const auto c = col_of(col_term);
    if (!r || !c) {
      throw ConfigError("no rule for (e=" + std::string(to_string(e_term)) +
                        ", edot=" + std::string(to_string(edot_term)) + ")");
    }
    return kCells[*r][*c];
  }

  static Term lookup(std::string_view e_label, std::string_view edot_label) {
    return lookup(parse_term(e_label), parse_term(edot_label));
  }
};

using hfcfdt::ActuatorRange;

struct BfcConfig {
  fuzzy::LinguisticVariable error;
  fuzzy::LinguisticVariable error_rate;
  /// Output terms are full triangles with peaks spread over [-1, 1], so the
  /// crisp output reaches the ends of that interval.
  fuzzy::LinguisticVariable output;
  ActuatorRange actuators;

  static BfcConfig standard(ActuatorRange actuators = {}) {
    auto labels = [](auto terms) {
      std::vector<std::string> out;
      for (Term t : terms) out.emplace_back(to_string(t));
      return out;
    };
    const bool e_cols = kTableOrientation == TableOrientation::ErrorAlongColumns;
    auto cols = labels(kSevenTerms);
    auto rows = labels(kFiveTerms);
    return BfcConfig{
        fuzzy::LinguisticVariable::uniform_triangles("e", -1.0, 1.0, e_cols ? cols : rows),
        fuzzy::LinguisticVariable::uniform_triangles("edot", -1.0, 1.0, e_cols ? rows : cols),
        fuzzy::LinguisticVariable::uniform_triangles("u", -1.0, 1.0, cols),
        actuators,
    };
  }
};

struct Command {
  double u_motor = 0.0;
  double u_servo = 0.0;
};

struct ActuatorCommand {
  double p_motor = 0.0;  // W
  double v_servo = 0.0;  // V
};

class BaseController {
 public:
  explicit BaseController(BfcConfig cfg = BfcConfig::standard()) : cfg_(std::move(cfg)) {
    const std::size_t e_terms = cfg_.error.size();
    const std::size_t r_terms = cfg_.error_rate.size();
    const bool e_cols = kTableOrientation == TableOrientation::ErrorAlongColumns;
    if (e_terms != (e_cols ? RuleTable::kCols : RuleTable::kRows) ||
        r_terms != (e_cols ? RuleTable::kRows : RuleTable::kCols)) {
      throw ConfigError("BFC term counts do not match the rule table");
    }
    for (const auto& t : cfg_.error.terms()) e_term_.push_back(parse_term(t.label));
    for (const auto& t : cfg_.error_rate.terms()) r_term_.push_back(parse_term(t.label));
    for (const auto& t : cfg_.output.terms()) {
      out_index_[static_cast<std::size_t>(parse_term(t.label))] = out_mf_.size();
      out_mf_.push_back(t.mf);
    }
    // Fail at construction if any rule names a missing output term.
    for (Term e : e_term_) {
      for (Term r : r_term_) output_mf(RuleTable::lookup(e, r));
    }
  }

  const BfcConfig& config() const noexcept { return cfg_; }

  /// One Mamdani pass: min firing, clip, max aggregation, centroid. Returns
  /// 0 when nothing fires.
  double infer(double e, double edot) const {
    const auto de = cfg_.error.fuzzify(e);
    const auto dr = cfg_.error_rate.fuzzify(edot);
    std::vector<fuzzy::FuzzySet> clipped;
    clipped.reserve(4);
    for (std::size_t i = 0; i < de.size(); ++i) {
      if (!(de[i] > 0.0)) continue;
      for (std::size_t j = 0; j < dr.size(); ++j) {
        const double strength = std::min(de[i], dr[j]);
        if (!(strength > 0.0)) continue;
        clipped.push_back(fuzzy::clip(output_mf(RuleTable::lookup(e_term_[i], r_term_[j])), strength));
      }
    }
    const auto centroid = fuzzy::aggregate(clipped).centroid();
    return centroid.value_or(0.0);
  }

  /// Both channels are driven by the same rule base.
  Command evaluate(double e, double edot) const {
    const double u = infer(e, edot);
    return {u, u};
  }

  ActuatorCommand map_to_actuators(Command u) const noexcept {
    return {cfg_.actuators.p_max * (u.u_motor + 1.0) / 2.0, cfg_.actuators.v_max * u.u_servo};
  }

 private:
  const fuzzy::MembershipFunction& output_mf(Term t) const {
    const auto idx = out_index_[static_cast<std::size_t>(t)];
    if (!idx) throw ConfigError("output variable lacks term " + std::string(to_string(t)));
    return out_mf_[*idx];
  }

  BfcConfig cfg_;
  std::vector<Term> e_term_;
  std::vector<Term> r_term_;
  std::vector<fuzzy::MembershipFunction> out_mf_;
  std::array<std::optional<std::size_t>, 7> out_index_{};
};

}  // namespace hfcfdt::bfc
