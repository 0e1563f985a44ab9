#include "manylaser/sweep_table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "manylaser/errors.hpp"

namespace manylaser {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<T, bool>) return *v ? "1" : "0";
  else if constexpr (std::is_same_v<T, int>) return std::to_string(*v);
  else return num(*v);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw DomainError("bad number '" + s + "'");
  return v;
}

Method method_from(const std::string& s) {
  if (s == "exact") return Method::Exact;
  if (s == "jump") return Method::Jump;
  if (s == "diffusive") return Method::Diffusive;
  throw DomainError("unknown method '" + s + "'");
}

}  // namespace

const std::vector<std::string>& SweepTable::columns() {
  static const std::vector<std::string> c = {
      "L",        "J",          "U",           "g",       "P",          "kappa",
      "n_max",    "sweep_axis", "sweep_value", "observable", "site_a",  "site_b",
      "value",    "standard_error", "method",  "defined", "energy",     "state_magnetization",
      "bright_state", "top3",   "residual_norm", "trace_error", "min_eigenvalue", "top_fock_population"};
  return c;
}

std::string SweepTable::to_csv() const {
  std::ostringstream os;
  for (const auto& [k, v] : metadata) os << "# " << k << ": " << v << '\n';
  const auto& cols = columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : rows) {
    const auto& p = r.params;
    os << p.L << ',' << num(p.J) << ',' << num(p.U) << ',' << num(p.g) << ',' << num(p.P) << ',' << num(p.kappa)
       << ',' << p.n_max << ',' << r.sweep_axis << ',' << num(r.sweep_value) << ',' << r.observable << ','
       << r.site_a << ',' << r.site_b << ',' << num(r.value) << ',' << num(r.standard_error) << ','
       << to_string(r.method) << ',' << (r.defined ? 1 : 0) << ',' << opt(r.energy) << ','
       << opt(r.state_magnetization) << ',' << opt(r.bright_state) << ',' << opt(r.top3) << ','
       << opt(r.residual_norm) << ',' << opt(r.trace_error) << ',' << opt(r.min_eigenvalue) << ','
       << opt(r.top_fock_population) << '\n';
  }
  return os.str();
}

void SweepTable::write_csv(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot write " + path);
  os << to_csv();
}

SweepTable SweepTable::from_csv(const std::string& text) {
  SweepTable t;
  std::istringstream is(text);
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon != std::string::npos) t.metadata[line.substr(2, colon - 2)] = line.substr(colon + 2);
      continue;
    }
    const auto cells = split(line);
    if (!header) {
      if (cells != columns()) throw DomainError("unexpected CSV header");
      header = true;
      continue;
    }
    if (cells.size() != columns().size()) throw DomainError("wrong cell count on line " + std::to_string(lineno));
    try {
      TableRow r;
      r.params.L = std::stoi(cells[0]);
      r.params.J = to_double(cells[1]);
      r.params.U = to_double(cells[2]);
      r.params.g = to_double(cells[3]);
      r.params.P = to_double(cells[4]);
      r.params.kappa = to_double(cells[5]);
      r.params.n_max = std::stoi(cells[6]);
      r.sweep_axis = cells[7];
      r.sweep_value = to_double(cells[8]);
      r.observable = cells[9];
      r.site_a = std::stoi(cells[10]);
      r.site_b = std::stoi(cells[11]);
      r.value = to_double(cells[12]);
      r.standard_error = to_double(cells[13]);
      r.method = method_from(cells[14]);
      r.defined = cells[15] == "1";
      if (!cells[16].empty()) r.energy = to_double(cells[16]);
      if (!cells[17].empty()) r.state_magnetization = std::stoi(cells[17]);
      if (!cells[18].empty()) r.bright_state = cells[18] == "1";
      if (!cells[19].empty()) r.top3 = cells[19] == "1";
      if (!cells[20].empty()) r.residual_norm = to_double(cells[20]);
      if (!cells[21].empty()) r.trace_error = to_double(cells[21]);
      if (!cells[22].empty()) r.min_eigenvalue = to_double(cells[22]);
      if (!cells[23].empty()) r.top_fock_population = to_double(cells[23]);
      t.rows.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw DomainError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header) throw DomainError("CSV header missing");
  return t;
}

SweepTable SweepTable::read_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_csv(ss.str());
}

std::vector<const TableRow*> SweepTable::select(const std::string& observable, int site_a, int site_b) const {
  std::vector<const TableRow*> out;
  for (const auto& r : rows) {
    if (r.observable != observable) continue;
    if (site_a >= 0 && r.site_a != site_a) continue;
    if (site_b >= 0 && r.site_b != site_b) continue;
    out.push_back(&r);
  }
  return out;
}

}  // namespace manylaser
