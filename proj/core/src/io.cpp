#include "tabasco/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace tabasco {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

double parse_double(const std::string& tok, int row = -1, int col = -1) {
  const std::string t = trim(tok);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    std::string where;
    if (row >= 0) where = " at row " + std::to_string(row) + ", column " + std::to_string(col);
    throw ParseError("cannot parse number '" + t + "'" + where);
  }
  return v;
}

std::vector<std::vector<double>> parse_csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<double> row;
    int col = 0;
    for (const auto& tok : split(t, ',')) row.push_back(parse_double(tok, lineno, ++col));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("ragged CSV: row " + std::to_string(lineno) + " has " +
                       std::to_string(row.size()) + " columns, expected " +
                       std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty CSV input");
  return rows;
}

}  // namespace

std::string matrix_to_csv(const RealMatrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string matrix_to_csv(const ComplexMatrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j).real());
      out += ',';
      out += format_double(m(i, j).imag());
    }
    out += '\n';
  }
  return out;
}

RealMatrix csv_to_matrix(const std::string& text) {
  const auto rows = parse_csv_rows(text);
  RealMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

ComplexMatrix csv_to_complex_matrix(const std::string& text) {
  const auto rows = parse_csv_rows(text);
  if (rows.front().size() % 2 != 0)
    throw ParseError("complex CSV needs an even column count of (re,im) pairs");
  ComplexMatrix m(rows.size(), rows.front().size() / 2);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j + 1 < rows[i].size(); j += 2)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j / 2)) =
          Complex(rows[i][j], rows[i][j + 1]);
  return m;
}

RealMatrix read_csv_file(const std::string& path) { return csv_to_matrix(read_text_file(path)); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

namespace {

double parse_index_expr(const std::string& tok, int p) {
  const std::string t = trim(tok);
  if (t.empty()) throw ParseError("empty index expression");
  if (t == "p") return static_cast<double>(p);
  if (t.rfind("p-", 0) == 0) return static_cast<double>(p) - parse_double(t.substr(2));
  return parse_double(t);
}

}  // namespace

std::vector<double> parse_index_list(const std::string& text, int p) {
  std::vector<double> out;
  for (const auto& tok : split(text, ',')) {
    const auto dots = tok.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_index_expr(tok, p));
    } else {
      const double lo = parse_index_expr(tok.substr(0, dots), p);
      const double hi = parse_index_expr(tok.substr(dots + 2), p);
      if (hi < lo) throw ParseError("descending range in index list: " + tok);
      for (double v = lo; v <= hi; v += 1.0) out.push_back(v);
    }
  }
  if (out.empty()) throw ParseError("empty index list");
  return out;
}

TemplateKind template_kind_from_string(const std::string& name) {
  if (name == "banding") return TemplateKind::Banding;
  if (name == "minimax") return TemplateKind::Minimax;
  if (name == "sinc") return TemplateKind::Sinc;
  if (name == "stap") return TemplateKind::StapKron;
  throw ParseError("unknown template kind: " + name);
}

FamilySpec parse_family_spec(const std::string& text, int p) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ParseError("family spec must look like kind:indices, got: " + text);
  FamilySpec spec;
  spec.kind = template_kind_from_string(trim(text.substr(0, colon)));
  spec.indices = parse_index_list(text.substr(colon + 1), p);
  return spec;
}

}  // namespace tabasco
