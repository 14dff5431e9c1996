#include "gridwatch/case_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gridwatch {
namespace {

using ordered_json = nlohmann::ordered_json;

struct Token {
  double value;
  int line;
};

struct MatrixBlock {
  std::vector<std::vector<Token>> rows;
  int line = 0;  // line of the block header
};

// Strip a '%' comment, respecting nothing fancier: MATPOWER case files do
// not put '%' inside strings we care about.
std::string strip_comment(const std::string& line) {
  auto pos = line.find('%');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool parse_number(const std::string& tok, double& out) {
  try {
    size_t used = 0;
    out = std::stod(tok, &used);
    return used == tok.size();
  } catch (const std::exception&) {
    return false;
  }
}

// Scan `mpc.<name> = ...` statements; matrix blocks run to the closing `];`.
// Anything else (function header, version string, unknown scalars) is
// skipped.
class CaseScanner {
 public:
  explicit CaseScanner(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::string pending_name;
    MatrixBlock* open_block = nullptr;
    while (std::getline(in, raw)) {
      ++lineno;
      std::string line = strip_comment(raw);
      if (open_block == nullptr) {
        auto eq = line.find('=');
        auto mpc = line.find("mpc.");
        if (mpc == std::string::npos || eq == std::string::npos || eq < mpc) continue;
        std::string name = trim(line.substr(mpc + 4, eq - mpc - 4));
        std::string rest = trim(line.substr(eq + 1));
        if (rest.rfind('[', 0) == 0) {
          auto [it, ok] = blocks_.try_emplace(name);
          if (!ok) throw ParseError("duplicate block mpc." + name, lineno);
          it->second.line = lineno;
          open_block = &it->second;
          pending_name = name;
          rest = rest.substr(1);
          if (consume_rows(*open_block, rest, lineno)) open_block = nullptr;
        } else {
          // scalar assignment, e.g. baseMVA; ignore non-numeric values
          if (!rest.empty() && rest.back() == ';') rest.pop_back();
          double v;
          if (parse_number(trim(rest), v)) scalars_[name] = {v, lineno};
        }
      } else {
        if (consume_rows(*open_block, line, lineno)) open_block = nullptr;
      }
    }
    if (open_block != nullptr)
      throw ParseError("unterminated matrix block mpc." + pending_name,
                       open_block->line);
  }

  const MatrixBlock* block(const std::string& name) const {
    auto it = blocks_.find(name);
    return it == blocks_.end() ? nullptr : &it->second;
  }

  bool scalar(const std::string& name, double& out) const {
    auto it = scalars_.find(name);
    if (it == scalars_.end()) return false;
    out = it->second.value;
    return true;
  }

 private:
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  // Append row text to the block; returns true when `];` closes it.
  bool consume_rows(MatrixBlock& block, std::string text, int lineno) {
    bool closed = false;
    auto end = text.find(']');
    if (end != std::string::npos) {
      closed = true;
      text = text.substr(0, end);
    }
    std::string tok;
    auto flush_token = [&](int line) {
      if (tok.empty()) return;
      double v;
      if (!parse_number(tok, v)) throw ParseError("bad numeric token '" + tok + "'", line);
      row_.push_back({v, line});
      tok.clear();
    };
    for (char c : text) {
      if (c == ';' ) {
        flush_token(lineno);
        if (!row_.empty()) {
          if (block.rows.empty()) expected_cols_ = row_.size();
          else if (row_.size() != expected_cols_)
            throw ParseError("matrix row has " + std::to_string(row_.size()) +
                                 " columns, expected " + std::to_string(expected_cols_),
                             lineno);
          block.rows.push_back(std::move(row_));
          row_.clear();
        }
      } else if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
        flush_token(lineno);
      } else {
        tok += c;
      }
    }
    flush_token(lineno);
    if (closed && !row_.empty()) {
      // allow a final row without a trailing ';'
      if (!block.rows.empty() && row_.size() != expected_cols_)
        throw ParseError("matrix row has " + std::to_string(row_.size()) +
                             " columns, expected " + std::to_string(expected_cols_),
                         lineno);
      block.rows.push_back(std::move(row_));
      row_.clear();
    }
    return closed;
  }

  std::map<std::string, MatrixBlock> blocks_;
  std::map<std::string, Token> scalars_;
  std::vector<Token> row_;
  size_t expected_cols_ = 0;
};

void sort_case(GridCase& gc) {
  std::sort(gc.buses.begin(), gc.buses.end(),
            [](const Bus& a, const Bus& b) { return a.id < b.id; });
  for (auto& br : gc.branches)
    if (br.from > br.to) std::swap(br.from, br.to);
  std::sort(gc.branches.begin(), gc.branches.end(), [](const Branch& a, const Branch& b) {
    return std::make_pair(a.from, a.to) < std::make_pair(b.from, b.to);
  });
}

void merge_parallel(GridCase& gc) {
  std::vector<Branch> merged;
  for (const auto& br : gc.branches) {
    if (!merged.empty() && merged.back().from == br.from && merged.back().to == br.to)
      merged.back().b += br.b;
    else
      merged.push_back(br);
  }
  gc.branches = std::move(merged);
}

}  // namespace

int GridCase::bus_index(int bus_id) const {
  auto it = std::lower_bound(buses.begin(), buses.end(), bus_id,
                             [](const Bus& b, int id) { return b.id < id; });
  if (it == buses.end() || it->id != bus_id) return -1;
  return static_cast<int>(it - buses.begin());
}

void validate(const GridCase& gc) {
  if (gc.buses.empty()) throw ValidationError("case has no buses");
  for (size_t i = 1; i < gc.buses.size(); ++i)
    if (gc.buses[i].id == gc.buses[i - 1].id)
      throw ValidationError("duplicate bus id " + std::to_string(gc.buses[i].id));
  if (!gc.has_bus(gc.slack))
    throw ValidationError("slack bus " + std::to_string(gc.slack) + " is not declared");
  for (const auto& br : gc.branches) {
    if (br.from == br.to)
      throw ValidationError("self-loop at bus " + std::to_string(br.from));
    if (!gc.has_bus(br.from) || !gc.has_bus(br.to))
      throw ValidationError("branch " + std::to_string(br.from) + "-" +
                            std::to_string(br.to) + " references an undeclared bus");
    if (!(br.b > 0.0) || !std::isfinite(br.b))
      throw ValidationError("branch " + std::to_string(br.from) + "-" +
                            std::to_string(br.to) + " has nonpositive susceptance");
  }
  // connectivity over the branch graph
  const int p = static_cast<int>(gc.buses.size());
  std::vector<std::vector<int>> adj(p);
  for (const auto& br : gc.branches) {
    adj[gc.bus_index(br.from)].push_back(gc.bus_index(br.to));
    adj[gc.bus_index(br.to)].push_back(gc.bus_index(br.from));
  }
  std::vector<char> seen(p, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
  }
  if (reached != p) throw ValidationError("branch graph is disconnected");
}

GridCase parse_matpower_case(const std::string& text) {
  CaseScanner scan(text);

  const MatrixBlock* bus = scan.block("bus");
  if (bus == nullptr) throw ParseError("missing mpc.bus block");
  const MatrixBlock* branch = scan.block("branch");
  if (branch == nullptr) throw ParseError("missing mpc.branch block");

  GridCase gc;
  double base = 100.0;
  if (scan.scalar("baseMVA", base)) gc.base_mva = base;

  int slack_count = 0;
  for (const auto& row : bus->rows) {
    if (row.size() < 2) throw ParseError("bus row needs at least id and type columns",
                                         row.empty() ? bus->line : row.front().line);
    Bus b;
    b.id = static_cast<int>(row[0].value);
    const int type = static_cast<int>(row[1].value);
    b.area = row.size() >= 7 ? static_cast<int>(row[6].value) : 1;
    if (type == 3) {
      gc.slack = b.id;
      ++slack_count;
    }
    gc.buses.push_back(b);
  }
  if (slack_count == 0) throw ValidationError("no slack (type-3) bus");
  if (slack_count > 1) throw ValidationError("multiple slack (type-3) buses");

  for (const auto& row : branch->rows) {
    if (row.size() < 4) throw ParseError("branch row needs at least 4 columns",
                                         row.empty() ? branch->line : row.front().line);
    const int status = row.size() >= 11 ? static_cast<int>(row[10].value) : 1;
    if (status == 0) continue;
    const double x = row[3].value;
    if (x == 0.0)
      throw ValidationError("branch " + std::to_string(static_cast<int>(row[0].value)) +
                            "-" + std::to_string(static_cast<int>(row[1].value)) +
                            " has zero reactance");
    Branch br;
    br.from = static_cast<int>(row[0].value);
    br.to = static_cast<int>(row[1].value);
    br.b = 1.0 / std::abs(x);
    gc.branches.push_back(br);
  }

  sort_case(gc);
  merge_parallel(gc);
  validate(gc);
  return gc;
}

GridCase load_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open case file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matpower_case(buf.str());
}

std::string to_canonical_json(const GridCase& gc) {
  GridCase sorted = gc;
  sort_case(sorted);
  ordered_json j;
  j["base_mva"] = sorted.base_mva;
  j["slack"] = sorted.slack;
  j["buses"] = ordered_json::array();
  for (const auto& b : sorted.buses) j["buses"].push_back({{"id", b.id}, {"area", b.area}});
  j["branches"] = ordered_json::array();
  for (const auto& br : sorted.branches)
    j["branches"].push_back({{"from", br.from}, {"to", br.to}, {"b", br.b}});
  return j.dump(2) + "\n";
}

GridCase from_canonical_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  auto require = [&](const ordered_json& obj, const char* field) -> const ordered_json& {
    if (!obj.contains(field))
      throw ParseError(std::string("missing required field \"") + field + "\"");
    return obj.at(field);
  };
  GridCase gc;
  gc.base_mva = require(j, "base_mva").get<double>();
  gc.slack = require(j, "slack").get<int>();
  for (const auto& jb : require(j, "buses"))
    gc.buses.push_back({require(jb, "id").get<int>(), require(jb, "area").get<int>()});
  for (const auto& jb : require(j, "branches"))
    gc.branches.push_back({require(jb, "from").get<int>(), require(jb, "to").get<int>(),
                           require(jb, "b").get<double>()});
  sort_case(gc);
  merge_parallel(gc);
  validate(gc);
  return gc;
}

}  // namespace gridwatch
