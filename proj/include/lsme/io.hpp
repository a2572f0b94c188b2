#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsme/graph.hpp"
#include "lsme/types.hpp"
#include "lsme/verify.hpp"

namespace lsme {

using json = nlohmann::json;

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline bool is_number(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace detail

// CSV: one row per sample, header optional. The inlier mask, when present,
// is a 0/1 column named "inlier".
inline void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.precision(17);
  for (Index c = 0; c < data.n(); ++c) os << (c ? "," : "") << "x" << c;
  if (data.inlier_mask) os << ",inlier";
  os << "\n";
  for (Index i = 0; i < data.m(); ++i) {
    for (Index c = 0; c < data.n(); ++c) os << (c ? "," : "") << data.samples(i, c);
    if (data.inlier_mask) os << "," << int((*data.inlier_mask)[static_cast<std::size_t>(i)]);
    os << "\n";
  }
}

inline Dataset read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::vector<char> mask;
  Index inlier_col = -1;
  bool first = true, have_header = false;
  Index ncols = -1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (first) {
      first = false;
      if (!detail::is_number(cells[0])) {
        have_header = true;
        for (std::size_t c = 0; c < cells.size(); ++c)
          if (cells[c] == "inlier") inlier_col = static_cast<Index>(c);
        ncols = static_cast<Index>(cells.size());
        continue;
      }
    }
    if (ncols < 0) ncols = static_cast<Index>(cells.size());
    if (static_cast<Index>(cells.size()) != ncols)
      throw std::runtime_error("ragged CSV row in " + path);
    std::vector<double> row;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (static_cast<Index>(c) == inlier_col)
        mask.push_back(std::stod(cells[c]) != 0.0 ? 1 : 0);
      else
        row.push_back(std::stod(cells[c]));
    }
    rows.push_back(std::move(row));
  }
  (void)have_header;
  if (rows.empty()) throw std::runtime_error("empty dataset: " + path);
  Dataset data;
  data.samples.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < rows[i].size(); ++c)
      data.samples(static_cast<Index>(i), static_cast<Index>(c)) = rows[i][c];
  if (inlier_col >= 0) data.inlier_mask = std::move(mask);
  data.validate();
  return data;
}

// JSON-lines: {"x": [...], "inlier": 0|1} per line; inlier optional.
inline void write_jsonl(const Dataset& data, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  for (Index i = 0; i < data.m(); ++i) {
    json row;
    row["x"] = std::vector<double>(data.samples.row(i).begin(), data.samples.row(i).end());
    if (data.inlier_mask) row["inlier"] = int((*data.inlier_mask)[static_cast<std::size_t>(i)]);
    os << row.dump() << "\n";
  }
}

inline Dataset read_jsonl(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::vector<char> mask;
  bool any_mask = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json row = json::parse(line);
    rows.push_back(row.at("x").get<std::vector<double>>());
    if (row.contains("inlier")) {
      any_mask = true;
      mask.push_back(row["inlier"].get<int>() != 0 ? 1 : 0);
    } else {
      mask.push_back(0);
    }
  }
  if (rows.empty()) throw std::runtime_error("empty dataset: " + path);
  Dataset data;
  data.samples.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < rows[i].size(); ++c)
      data.samples(static_cast<Index>(i), static_cast<Index>(c)) = rows[i][c];
  if (any_mask) data.inlier_mask = std::move(mask);
  data.validate();
  return data;
}

inline bool has_suffix(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

inline Dataset read_dataset(const std::string& path) {
  if (has_suffix(path, ".jsonl") || has_suffix(path, ".ndjson")) return read_jsonl(path);
  return read_csv(path);
}

inline void write_dataset(const Dataset& data, const std::string& path) {
  if (has_suffix(path, ".jsonl") || has_suffix(path, ".ndjson"))
    write_jsonl(data, path);
  else
    write_csv(data, path);
}

inline json estimate_list_to_json(const EstimateList& list) {
  json out;
  out["candidates"] = json::array();
  for (const auto& c : list.candidates)
    out["candidates"].push_back(std::vector<double>(c.begin(), c.end()));
  out["seeds"] = list.seeds;
  out["fail_count"] = list.fail_count;
  return out;
}

inline json graph_to_json(const PairGraph& g) {
  json out;
  out["vertex_count"] = g.vertex_count();
  out["edges"] = json::array();
  for (const auto& [i, j] : g.edges()) out["edges"].push_back({i, j});
  return out;
}

inline PairGraph graph_from_json(const json& j) {
  PairGraph g(j.at("vertex_count").get<Index>());
  for (const auto& e : j.at("edges")) g.add_edge(e[0].get<Index>(), e[1].get<Index>());
  return g;
}

inline json report_to_json(const VerifyReport& report) {
  json out;
  out["all_passed"] = report.all_passed();
  out["lemmas"] = json::array();
  for (const auto& l : report.lemmas) {
    json jl;
    jl["name"] = l.name;
    jl["checks"] = l.checks;
    jl["failures"] = l.failures;
    jl["passed"] = l.passed();
    jl["counterexamples"] = l.counterexamples;
    out["lemmas"].push_back(jl);
  }
  return out;
}

// Plain-text key=value config; '#' starts a comment.
inline std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) out[key] = val;
  }
  return out;
}

}  // namespace lsme
