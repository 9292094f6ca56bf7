#include "daecert/power/network_case.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace daecert::power {

namespace fs = std::filesystem;

namespace {

struct CsvTable {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> lines;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw InputError(file + ": missing column '" + name + "'");
  }

  std::string where(std::size_t row, const std::string& col) const {
    return file + ":" + std::to_string(lines[row]) + " field '" + col + "'";
  }

  double number(std::size_t row, const std::string& col) const {
    const std::string& s = rows[row][column(col)];
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw InputError(where(row, col) + ": not a number: '" + s + "'");
    }
  }

  int integer(std::size_t row, const std::string& col) const {
    const double v = number(row, col);
    if (v != std::floor(v)) throw InputError(where(row, col) + ": not an integer");
    return static_cast<int>(v);
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  CsvTable t;
  t.file = path.filename().string();
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw InputError(t.file + ":" + std::to_string(n) + ": expected " +
                       std::to_string(t.header.size()) + " fields, got " +
                       std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
    t.lines.push_back(n);
  }
  if (t.header.empty()) throw InputError(t.file + ": empty file");
  return t;
}

BusType parse_type(const std::string& s, const std::string& where) {
  if (s == "PQ") return BusType::kPQ;
  if (s == "PV") return BusType::kPV;
  if (s == "slack") return BusType::kSlack;
  throw InputError(where + ": unknown bus type '" + s + "'");
}

}  // namespace

int NetworkCase::bus_index(int id) const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].id == id) return static_cast<int>(i);
  }
  throw InputError("unknown bus id " + std::to_string(id));
}

int NetworkCase::branch_index(int id) const {
  for (std::size_t i = 0; i < branches.size(); ++i) {
    if (branches[i].id == id) return static_cast<int>(i);
  }
  throw InputError("unknown branch id " + std::to_string(id));
}

std::vector<int> NetworkCase::model_order() const {
  std::vector<int> order;
  std::set<int> gen_buses;
  for (const auto& g : generators) {
    order.push_back(bus_index(g.bus));
    gen_buses.insert(order.back());
  }
  for (int i = 0; i < static_cast<int>(buses.size()); ++i) {
    if (!gen_buses.count(i)) order.push_back(i);
  }
  return order;
}

void NetworkCase::check() const {
  if (buses.empty()) throw InputError("case has no buses");
  std::set<int> ids;
  int slack = 0;
  for (const auto& b : buses) {
    if (!ids.insert(b.id).second) throw InputError("duplicate bus id " + std::to_string(b.id));
    if (b.type == BusType::kSlack) ++slack;
    if (!(b.v_set > 0.0)) throw InputError("bus " + std::to_string(b.id) + ": v_set must be positive");
  }
  if (slack != 1) throw InputError("case needs exactly one slack bus, found " + std::to_string(slack));
  std::set<int> branch_ids;
  for (const auto& br : branches) {
    if (!branch_ids.insert(br.id).second) {
      throw InputError("duplicate branch id " + std::to_string(br.id));
    }
    bus_index(br.from);
    bus_index(br.to);
    if (br.from == br.to) throw InputError("branch " + std::to_string(br.id) + " is a self-loop");
    if (br.r == 0.0 && br.x == 0.0) {
      throw InputError("branch " + std::to_string(br.id) + " has zero impedance");
    }
    if (!(br.tap > 0.0)) throw InputError("branch " + std::to_string(br.id) + ": tap must be positive");
  }
  std::set<int> gen_buses;
  for (const auto& g : generators) {
    const int i = bus_index(g.bus);
    if (!gen_buses.insert(g.bus).second) {
      throw InputError("two generators at bus " + std::to_string(g.bus));
    }
    if (buses[i].type == BusType::kPQ) {
      throw InputError("generator at PQ bus " + std::to_string(g.bus));
    }
    if (!(g.h > 0.0) || !(g.x_d > 0.0) || g.d < 0.0) {
      throw InputError("generator at bus " + std::to_string(g.bus) +
                       ": H and X_d must be positive, D nonnegative");
    }
  }
  for (const auto& b : buses) {
    if (b.type != BusType::kPQ && !gen_buses.count(b.id)) {
      throw InputError("voltage-controlled bus " + std::to_string(b.id) + " has no generator");
    }
  }
  if (!(omega > 0.0)) throw InputError("system frequency must be positive");
  if (!is_connected(*this)) throw InputError("network graph is disconnected");
}

NetworkCase load_case(const std::string& path) {
  fs::path meta_path = path;
  if (fs::is_directory(meta_path)) meta_path /= "case.json";
  std::ifstream in(meta_path);
  if (!in) throw InputError("cannot open case file '" + meta_path.string() + "'");
  nlohmann::json meta;
  try {
    in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(meta_path.string() + ": " + e.what());
  }
  const fs::path dir = meta_path.parent_path();

  NetworkCase c;
  CsvTable buses, branches, gens;
  try {
    if (meta.value("schema", 0) != 1) throw InputError(meta_path.string() + ": unsupported schema");
    c.name = meta.value("name", "");
    c.base_mva = meta.at("base_mva").get<double>();
    c.omega = 2.0 * std::numbers::pi * meta.at("frequency_hz").get<double>();
    buses = read_csv(dir / meta.at("buses").get<std::string>());
    branches = read_csv(dir / meta.at("branches").get<std::string>());
    gens = read_csv(dir / meta.at("generators").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(meta_path.string() + ": " + e.what());
  }
  if (!(c.base_mva > 0.0)) throw InputError(meta_path.string() + ": base_mva must be positive");
  const double base = c.base_mva;

  for (std::size_t r = 0; r < buses.rows.size(); ++r) {
    Bus b;
    b.id = buses.integer(r, "id");
    b.type = parse_type(buses.rows[r][buses.column("type")], buses.where(r, "type"));
    b.v_set = buses.number(r, "v_set");
    b.p_load = buses.number(r, "p_load_mw") / base;
    b.q_load = buses.number(r, "q_load_mvar") / base;
    b.g_shunt = buses.number(r, "g_shunt_mw") / base;
    b.b_shunt = buses.number(r, "b_shunt_mvar") / base;
    for (const auto& other : c.buses) {
      if (other.id == b.id) {
        throw InputError(buses.where(r, "id") + ": duplicate bus id " + std::to_string(b.id));
      }
    }
    c.buses.push_back(b);
  }
  for (std::size_t r = 0; r < branches.rows.size(); ++r) {
    Branch br;
    br.id = branches.integer(r, "id");
    br.from = branches.integer(r, "from");
    br.to = branches.integer(r, "to");
    br.r = branches.number(r, "r");
    br.x = branches.number(r, "x");
    br.b = branches.number(r, "b");
    br.tap = branches.number(r, "tap");
    c.branches.push_back(br);
  }
  for (std::size_t r = 0; r < gens.rows.size(); ++r) {
    Generator g;
    g.bus = gens.integer(r, "bus");
    g.p_gen = gens.number(r, "p_gen_mw") / base;
    g.h = gens.number(r, "h");
    g.d = gens.number(r, "d");
    g.x_d = gens.number(r, "x_d");
    c.generators.push_back(g);
  }
  c.check();
  return c;
}

bool is_connected(const NetworkCase& c, std::optional<int> skip_branch) {
  const int n = static_cast<int>(c.buses.size());
  if (n == 0) return true;
  std::map<int, int> index;
  for (int i = 0; i < n; ++i) index[c.buses[i].id] = i;
  std::vector<std::vector<int>> adj(n);
  for (const auto& br : c.branches) {
    if (skip_branch && br.id == *skip_branch) continue;
    const int a = index.at(br.from), b = index.at(br.to);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int w : adj[u]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == n;
}

void stamp_branch(const NetworkCase& c, const Branch& br, ComplexMatrix& y) {
  const int f = c.bus_index(br.from), t = c.bus_index(br.to);
  const Complex ys = br.series_admittance();
  const Complex half_b(0.0, br.b / 2.0);
  y(f, f) += (ys + half_b) / (br.tap * br.tap);
  y(t, t) += ys + half_b;
  y(f, t) -= ys / br.tap;
  y(t, f) -= ys / br.tap;
}

ComplexMatrix admittance(const NetworkCase& c, std::optional<int> skip_branch) {
  const int n = static_cast<int>(c.buses.size());
  ComplexMatrix y = ComplexMatrix::Zero(n, n);
  for (const auto& br : c.branches) {
    if (skip_branch && br.id == *skip_branch) continue;
    stamp_branch(c, br, y);
  }
  for (int i = 0; i < n; ++i) y(i, i) += Complex(c.buses[i].g_shunt, c.buses[i].b_shunt);
  return y;
}

}  // namespace daecert::power
