#include "apsim/lut.hpp"

#include <sstream>

#include "apsim/errors.hpp"

namespace apsim {

namespace {

std::vector<std::int8_t> pattern(std::string_view s) {
  std::vector<std::int8_t> out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '0': out.push_back(0); break;
      case '1': out.push_back(1); break;
      case 'x': case 'X': case '-': out.push_back(-1); break;
      default: throw ConfigError(std::string("bad LUT pattern character '") + ch + "'");
    }
  }
  return out;
}

std::string render(const std::vector<std::int8_t>& p) {
  std::string s;
  for (auto v : p) s.push_back(v < 0 ? 'x' : static_cast<char>('0' + v));
  return s;
}

LutPass pass(std::string_view match, std::string_view write) {
  return {pattern(match), pattern(write)};
}

std::string ordinal(std::size_t n) {
  static const char* suffix[] = {"th", "st", "nd", "rd"};
  const std::size_t mod = n % 10;
  const bool teen = (n % 100) / 10 == 1;
  return std::to_string(n) + (teen || mod > 3 ? suffix[0] : suffix[mod]);
}

}  // namespace

const LutProgram& add_lut() {
  static const LutProgram lut{
      "add",
      {"C", "A", "B"},
      {pass("011", "1x0"), pass("010", "xx1"), pass("100", "0x1"), pass("101", "xx0")}};
  return lut;
}

const LutProgram& guarded_add_lut() {
  static const LutProgram lut = [] {
    LutProgram g{"guarded_add", {"Bj", "C", "A", "P"}, {}};
    for (const auto& p : add_lut().passes) {
      LutPass q;
      q.match.push_back(1);
      q.write.push_back(-1);
      q.match.insert(q.match.end(), p.match.begin(), p.match.end());
      q.write.insert(q.write.end(), p.write.begin(), p.write.end());
      g.passes.push_back(std::move(q));
    }
    return g;
  }();
  return lut;
}

const LutProgram& relu_lut() {
  static const LutProgram lut{"relu", {"A", "F"}, {pass("11", "0x")}};
  return lut;
}

const LutProgram& max_lut() {
  static const LutProgram lut{
      "max",
      {"A", "B", "F1", "F2"},
      {pass("1000", "x1x1"), pass("0100", "xx11"), pass("1001", "x1xx"), pass("0101", "x0xx")}};
  return lut;
}

std::string to_text(const LutProgram& program) {
  std::ostringstream os;
  os << "lut " << program.name << "\nroles";
  for (const auto& r : program.roles) os << ' ' << r;
  os << '\n';
  for (const auto& p : program.passes) os << "pass " << render(p.match) << ' ' << render(p.write) << '\n';
  return os.str();
}

LutProgram parse_lut(std::string_view text) {
  LutProgram program;
  std::istringstream in{std::string(text)};
  std::string line;
  bool have_name = false;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "lut") {
      ls >> program.name;
      have_name = true;
    } else if (word == "roles") {
      program.roles.clear();
      while (ls >> word) program.roles.push_back(word);
    } else if (word == "pass") {
      std::string m, w;
      if (!(ls >> m >> w)) throw ConfigError("pass line needs match and write patterns");
      if (m.size() != program.roles.size() || w.size() != program.roles.size()) {
        throw ConfigError("pass pattern width does not match role count");
      }
      program.passes.push_back(pass(m, w));
    } else {
      throw ConfigError("unknown LUT directive '" + word + "'");
    }
  }
  if (!have_name || program.roles.empty()) throw ConfigError("LUT text needs 'lut' and 'roles'");
  return program;
}

std::vector<LutRow> truth_table(const LutProgram& program) {
  const std::size_t n = program.roles.size();
  std::vector<LutRow> rows;
  for (std::size_t state = 0; state < (std::size_t{1} << n); ++state) {
    std::vector<int> bits(n);
    for (std::size_t k = 0; k < n; ++k) bits[k] = static_cast<int>((state >> (n - 1 - k)) & 1U);
    LutRow row;
    for (int b : bits) row.before.push_back(static_cast<char>('0' + b));
    row.pass = "NC";
    for (std::size_t p = 0; p < program.passes.size(); ++p) {
      const auto& lp = program.passes[p];
      bool match = true;
      for (std::size_t k = 0; k < n; ++k) {
        if (lp.match[k] >= 0 && lp.match[k] != bits[k]) match = false;
      }
      if (!match) continue;
      if (row.pass == "NC") row.pass = ordinal(p + 1);
      for (std::size_t k = 0; k < n; ++k) {
        if (lp.write[k] >= 0) bits[k] = lp.write[k];
      }
    }
    for (int b : bits) row.after.push_back(static_cast<char>('0' + b));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace apsim
