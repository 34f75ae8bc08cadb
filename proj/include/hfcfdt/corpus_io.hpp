#pragma once

// Training corpus CSV: header `r_speed,r_length,delta_motor,delta_servo`,
// one sample per row, '.' decimal point.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hfcfdt/errors.hpp"
#include "hfcfdt/format.hpp"
#include "hfcfdt/training.hpp"

namespace hfcfdt::io {

inline constexpr const char* kCorpusHeader = "r_speed,r_length,delta_motor,delta_servo";

inline void write_corpus(std::ostream& out, const std::vector<training::TrainingSample>& samples) {
  out << kCorpusHeader << '\n';
  for (const auto& s : samples) {
    out << format_double(s.r_speed) << ',' << format_double(s.r_length) << ',' << format_double(s.delta_motor) << ','
        << format_double(s.delta_servo) << '\n';
  }
}

inline std::vector<training::TrainingSample> read_corpus(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("corpus: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCorpusHeader) throw ConfigError("corpus: expected header '" + std::string(kCorpusHeader) + "'");
  std::vector<training::TrainingSample> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string field;
    try {
      while (std::getline(ss, field, ',')) fields.push_back(parse_double(field));
    } catch (const ConfigError& e) {
      throw ConfigError("corpus row " + std::to_string(row) + ": " + e.what());
    }
    if (fields.size() != 4) throw ConfigError("corpus row " + std::to_string(row) + ": expected 4 fields");
    training::TrainingSample s{fields[0], fields[1], fields[2], fields[3]};
    if (!s.valid()) throw ConfigError("corpus row " + std::to_string(row) + ": values must be positive");
    out.push_back(s);
  }
  return out;
}

inline std::vector<training::TrainingSample> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open corpus '" + path + "'");
  return read_corpus(in);
}

inline void save_corpus(const std::vector<training::TrainingSample>& samples, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write corpus '" + path + "'");
  write_corpus(out, samples);
}

}  // namespace hfcfdt::io
